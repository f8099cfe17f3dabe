//! Finite-word witnesses for the semigroup generated by the coefficient law:
//! attractive fixed points of contracting words, proximal elements and their
//! directions, the log spectral radii, invariant-cone detection and the `d = 1`
//! case split.
//!
//! Every limit set here is a closure of an infinite set, so all results are
//! approximations from inside by words of bounded length.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, Matrix};
use crate::model::{AffineMap, AffineMeasure, CoefficientLaw, LinearMeasure};
use crate::scalar::Real;
use crate::sphere::SphereBinning;

/// Largest cumulative word count `enumerate_words` accepts.
pub const WORD_CAP: u64 = 10_000_000;
/// Words with spectral radius below `1 − CONTRACTION_MARGIN` count as contracting.
pub const CONTRACTION_MARGIN: f64 = 1e-9;
pub const DEFAULT_GAP_TOL: f64 = 0.05;
/// Margin of the separating-hyperplane test.
pub const SEPARATION_MARGIN: f64 = 1e-6;
/// A running extreme beyond this multiple of `max ‖b‖` witnesses escape to infinity.
pub const ESCAPE_FACTOR: f64 = 1e3;
pub const DEFAULT_D1_MAX_LEN: usize = 18;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StructureError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{count} words up to the requested length exceeds the cap of {cap}")]
    ExplosionGuard { count: u64, cap: u64 },
    #[error("operation needs dimension {expected}, measure has dimension {got}")]
    WrongDimension { expected: usize, got: usize },
}

impl StructureError {
    pub fn code(&self) -> &'static str {
        match self {
            StructureError::InvalidParameter(_) => "InvalidParameter",
            StructureError::ExplosionGuard { .. } => "ExplosionGuard",
            StructureError::WrongDimension { .. } => "WrongDimension",
        }
    }
}

/// `h_{i₁} ∘ … ∘ h_{iₙ}`, so the linear part is `a_{i₁} ⋯ a_{iₙ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Word<T> {
    pub indices: Vec<usize>,
    pub composed: AffineMap<T>,
    /// `NaN` if the eigenvalue iteration failed.
    pub spectral_radius: f64,
}

impl<T: Real> Word<T> {
    pub fn is_contracting(&self) -> bool {
        self.spectral_radius < 1.0 - CONTRACTION_MARGIN
    }
}

/// `Σ_{l=1}^{max_len} m^l`, saturating.
pub fn word_count(atoms: usize, max_len: usize) -> u64 {
    let m = atoms as u64;
    let mut total: u64 = 0;
    let mut layer: u64 = 1;
    for _ in 0..max_len {
        layer = layer.saturating_mul(m);
        total = total.saturating_add(layer);
    }
    total
}

/// All words of length `1..=max_len`, by length then lexicographically.
pub fn enumerate_words<T: Real>(eta: &AffineMeasure<T>, max_len: usize) -> Result<WordIter<'_, T>, StructureError> {
    if max_len == 0 {
        return Err(StructureError::InvalidParameter("max_len must be ≥ 1".into()));
    }
    let count = word_count(eta.len(), max_len);
    if count > WORD_CAP {
        return Err(StructureError::ExplosionGuard { count, cap: WORD_CAP });
    }
    Ok(WordIter {
        eta,
        max_len,
        indices: Vec::new(),
        stack: Vec::new(),
    })
}

/// Odometer over words; `stack[j]` holds the composition of the first `j + 1` letters,
/// so advancing the last letter costs one composition.
pub struct WordIter<'a, T> {
    eta: &'a AffineMeasure<T>,
    max_len: usize,
    indices: Vec<usize>,
    stack: Vec<AffineMap<T>>,
}

impl<T: Real> WordIter<'_, T> {
    fn rebuild_from(&mut self, pos: usize) {
        self.stack.truncate(pos);
        for j in pos..self.indices.len() {
            let h = &self.eta.atom(self.indices[j]).map;
            let next = match self.stack.last() {
                Some(prev) => prev.compose(h),
                None => h.clone(),
            };
            self.stack.push(next);
        }
    }
}

impl<T: Real> Iterator for WordIter<'_, T> {
    type Item = Word<T>;

    fn next(&mut self) -> Option<Word<T>> {
        let m = self.eta.len();
        if self.indices.is_empty() {
            self.indices = vec![0];
            self.rebuild_from(0);
        } else {
            match self.indices.iter().rposition(|&i| i + 1 < m) {
                Some(p) => {
                    self.indices[p] += 1;
                    self.indices[p + 1..].iter_mut().for_each(|i| *i = 0);
                    self.rebuild_from(p);
                }
                None => {
                    let len = self.indices.len() + 1;
                    if len > self.max_len {
                        return None;
                    }
                    self.indices = vec![0; len];
                    self.rebuild_from(0);
                }
            }
        }
        let composed = self.stack.last().expect("nonempty word").clone();
        let spectral_radius = radius(&composed.a);
        Some(Word {
            indices: self.indices.clone(),
            composed,
            spectral_radius,
        })
    }
}

fn radius<T: Real>(a: &Matrix<T>) -> f64 {
    if a.dim() == 1 {
        return a[(0, 0)].abs().to_f64_lossy();
    }
    a.spectral_radius().map_or(f64::NAN, |r| r.to_f64_lossy())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub word: Vec<usize>,
    pub point: Vec<f64>,
    /// `‖a x + b − x‖` recomputed from the composed map.
    pub residual: f64,
}

/// Attractive fixed points `(I − a)⁻¹ b` of contracting words up to `max_len`.
pub fn fixed_points<T: Real>(eta: &AffineMeasure<T>, max_len: usize) -> Result<Vec<FixedPoint>, StructureError> {
    Ok(enumerate_words(eta, max_len)?
        .filter(Word::is_contracting)
        .filter_map(|w| {
            let x = w.composed.fixed_point()?;
            let residual = w.composed.fixed_point_residual(&x).to_f64_lossy();
            Some(FixedPoint {
                word: w.indices,
                point: x.iter().map(|v| v.to_f64_lossy()).collect(),
                residual,
            })
        })
        .collect())
}

/// Running extremes of fixed points over word lengths `1..=len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthExtremes {
    pub len: usize,
    /// `d = 1`: smallest fixed point so far; otherwise `−max ‖x‖`.
    pub min: f64,
    /// `d = 1`: largest fixed point so far; otherwise `max ‖x‖`.
    pub max: f64,
}

pub fn fixed_point_extremes(points: &[FixedPoint], max_len: usize) -> Vec<LengthExtremes> {
    let mut out = Vec::with_capacity(max_len);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut by_len = vec![(f64::INFINITY, f64::NEG_INFINITY); max_len + 1];
    for p in points {
        let v = if p.point.len() == 1 { p.point[0] } else { linalg::norm(&p.point) };
        let (l, h) = &mut by_len[p.word.len()];
        if p.point.len() == 1 {
            *l = l.min(v);
        } else {
            *l = l.min(-v);
        }
        *h = h.max(v);
    }
    for (len, &(l, h)) in by_len.iter().enumerate().skip(1) {
        lo = lo.min(l);
        hi = hi.max(h);
        out.push(LengthExtremes { len, min: lo, max: hi });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProximalWitness {
    pub word: Vec<usize>,
    pub lambda: f64,
    /// Unit eigenvector, first nonzero coordinate positive.
    pub v: Vec<f64>,
    /// `(|λ₁| − |λ₂|) / |λ₁|`.
    pub gap: f64,
}

/// Words whose top-modulus eigenvalue is real, simple and separated by more than
/// `gap_tol` (relative) from the rest of the spectrum.
pub fn proximal_scan<T: Real>(mu: &LinearMeasure<T>, max_len: usize, gap_tol: f64) -> Result<Vec<ProximalWitness>, StructureError> {
    if !(0.0..1.0).contains(&gap_tol) {
        return Err(StructureError::InvalidParameter("gap_tol must lie in [0, 1)".into()));
    }
    let affine = mu.as_affine();
    let mut out = Vec::new();
    for w in enumerate_words(&affine, max_len)? {
        if let Some(p) = proximal_witness(&w.composed.a, gap_tol) {
            out.push(ProximalWitness { word: w.indices, ..p });
        }
    }
    Ok(out)
}

/// Proximality test for one matrix (`word` left empty).
pub fn proximal_witness<T: Real>(a: &Matrix<T>, gap_tol: f64) -> Option<ProximalWitness> {
    if a.dim() == 1 {
        let x = a[(0, 0)].to_f64_lossy();
        // every nonzero scalar is proximal; the sign of λ is the information
        return (x != 0.0).then(|| ProximalWitness {
            word: Vec::new(),
            lambda: x,
            v: vec![1.0],
            gap: 1.0,
        });
    }
    let mut ev = a.eigenvalues().ok()?;
    ev.sort_by(|x, y| y.modulus().partial_cmp(&x.modulus()).unwrap_or(std::cmp::Ordering::Equal));
    let top = ev[0];
    if !top.is_real() {
        return None;
    }
    let r1 = top.modulus().to_f64_lossy();
    let r2 = ev[1].modulus().to_f64_lossy();
    if !(r1 > 0.0) {
        return None;
    }
    let gap = (r1 - r2) / r1;
    if !(gap > gap_tol) {
        return None;
    }
    let v = a.real_eigenvector(top.re).ok()?;
    let mut v: Vec<f64> = v.iter().map(|x| x.to_f64_lossy()).collect();
    linalg::normalize(&mut v);
    if v.iter().find(|x| **x != 0.0).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    Some(ProximalWitness {
        word: Vec::new(),
        lambda: top.re.to_f64_lossy(),
        v,
        gap,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// `log |λ_g|` of every proximal witness, sorted ascending.
    pub spectrum_logs: Vec<f64>,
    /// `d = 1`: `Some(true)` when some pair of `log |a|` has an irrational ratio.
    pub non_arithmetic_witness: Option<bool>,
    /// `d = 1`: the first ratio failing the rationality test.
    pub irrational_ratio: Option<f64>,
    /// `d > 1` diagnostic: distinct values and smallest positive gap of the spectrum.
    pub distinct_logs: usize,
    pub min_gap: Option<f64>,
}

/// Largest denominator tried by the rationality test.
pub const MAX_DENOMINATOR: u64 = 64;
pub const RATIONAL_TOL: f64 = 1e-9;

/// `p/q` with `q ≤ MAX_DENOMINATOR` and `|r − p/q| ≤ RATIONAL_TOL·|r|`, if any.
pub fn rational_approximation(r: f64) -> Option<(i64, u64)> {
    (1..=MAX_DENOMINATOR).find_map(|q| {
        let p = (r * q as f64).round();
        ((r - p / q as f64).abs() <= RATIONAL_TOL * r.abs()).then_some((p as i64, q))
    })
}

pub fn spectrum_and_arithmeticity<T: Real>(
    mu: &LinearMeasure<T>,
    witnesses: &[ProximalWitness],
) -> SpectrumReport {
    let mut spectrum_logs: Vec<f64> = witnesses.iter().map(|w| w.lambda.abs().ln()).collect();
    spectrum_logs.sort_by(f64::total_cmp);
    let mut distinct = spectrum_logs.clone();
    distinct.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
    let min_gap = distinct
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(None, |m: Option<f64>, g| Some(m.map_or(g, |m| m.min(g))));
    let (non_arithmetic_witness, irrational_ratio) = if mu.dim() == 1 {
        // log-moduli of the nonzero atoms; modulus 1 is ρ⁰ for every ρ
        let logs: Vec<f64> = mu
            .atoms()
            .iter()
            .map(|(_, a)| a[(0, 0)].abs().to_f64_lossy())
            .filter(|&x| x > 0.0)
            .map(f64::ln)
            .filter(|&l| l != 0.0)
            .collect();
        let mut found = None;
        'outer: for i in 0..logs.len() {
            for j in i + 1..logs.len() {
                let r = logs[i] / logs[j];
                if rational_approximation(r).is_none() {
                    found = Some(r);
                    break 'outer;
                }
            }
        }
        (Some(found.is_some()), found)
    } else {
        (None, None)
    };
    SpectrumReport {
        spectrum_logs,
        non_arithmetic_witness,
        irrational_ratio,
        distinct_logs: distinct.len(),
        min_gap,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeCase {
    CaseI,
    CaseII,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeReport {
    pub classification: ConeCase,
    /// Unit `u` with `⟨u, x⟩ > 0` on the propagated set (Case II).
    pub separating: Option<Vec<f64>>,
    /// Distance from the origin to the convex hull of the propagated set.
    pub hull_distance: f64,
    pub propagated_directions: usize,
    /// Bins hit by the propagated set, and how many of them have their antipode hit too.
    pub occupied_bins: usize,
    pub antipodal_pairs: usize,
    /// Proximal element found and the propagated directions span the space.
    pub ip_witnessed: bool,
    pub flags: Vec<String>,
}

/// Signed directions `a_w v / ‖a_w v‖` for every word `w` up to `max_len`, plus `v`,
/// where `v` is the eigendirection of the first (largest-gap) witness.
pub fn propagated_directions<T: Real>(
    mu: &LinearMeasure<T>,
    seed_direction: &[f64],
    max_len: usize,
) -> Result<Vec<Vec<f64>>, StructureError> {
    let affine = mu.as_affine();
    let v: Vec<T> = seed_direction.iter().map(|&x| T::of(x)).collect();
    let mut out = vec![seed_direction.to_vec()];
    for w in enumerate_words(&affine, max_len)? {
        let mut img: Vec<f64> = w.composed.a.mul_vec(&v).iter().map(|x| x.to_f64_lossy()).collect();
        if linalg::normalize(&mut img) > 0.0 {
            out.push(img);
        }
    }
    Ok(out)
}

/// Case I (no invariant cone) versus Case II (invariant cone), witnessed on the signed
/// direction set propagated from one proximal eigendirection.
pub fn classify_cone<T: Real>(
    mu: &LinearMeasure<T>,
    witnesses: &[ProximalWitness],
    max_len: usize,
) -> Result<ConeReport, StructureError> {
    let d = mu.dim();
    if d < 2 {
        return Err(StructureError::InvalidParameter("classify_cone needs d ≥ 2".into()));
    }
    let Some(seed) = witnesses
        .iter()
        .max_by(|a, b| a.gap.partial_cmp(&b.gap).unwrap_or(std::cmp::Ordering::Equal))
    else {
        return Ok(ConeReport {
            classification: ConeCase::Undetermined,
            separating: None,
            hull_distance: f64::NAN,
            propagated_directions: 0,
            occupied_bins: 0,
            antipodal_pairs: 0,
            ip_witnessed: false,
            flags: vec!["i.p. not witnessed".into()],
        });
    };
    let dirs = propagated_directions(mu, &seed.v, max_len)?;
    let w = min_norm_point(&dirs);
    let hull_distance = linalg::norm(&w);
    let binning = SphereBinning::for_dim(d);
    let mut hit = vec![false; binning.len()];
    for x in &dirs {
        hit[binning.bin_of(x)] = true;
    }
    let occupied_bins = hit.iter().filter(|&&h| h).count();
    let antipodal_pairs = (0..hit.len()).filter(|&i| hit[i] && hit[binning.antipode(i)]).count();
    let ip_witnessed = spans_space(&dirs);
    let mut flags = Vec::new();
    if !ip_witnessed {
        flags.push("i.p. not witnessed: propagated directions lie near a proper subspace".into());
    }
    let (classification, separating) = if hull_distance > SEPARATION_MARGIN {
        (ConeCase::CaseII, Some(w.iter().map(|x| x / hull_distance).collect()))
    } else if antipodal_pairs > 0 {
        (ConeCase::CaseI, None)
    } else {
        flags.push("hull contains the origin but no antipodal bin pair is covered".into());
        (ConeCase::Undetermined, None)
    };
    Ok(ConeReport {
        classification,
        separating,
        hull_distance,
        propagated_directions: dirs.len(),
        occupied_bins,
        antipodal_pairs,
        ip_witnessed,
        flags,
    })
}

/// The second moment matrix of the directions is well conditioned.
fn spans_space(dirs: &[Vec<f64>]) -> bool {
    let d = dirs[0].len();
    let mut m = Matrix::<f64>::zeros(d);
    for x in dirs {
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] += x[i] * x[j];
            }
        }
    }
    let m = m.scaled(1.0 / dirs.len() as f64);
    match m.eigenvalues() {
        Ok(ev) => ev.iter().all(|e| e.re > 1e-6),
        Err(_) => false,
    }
}

/// Point of minimum norm in the convex hull of `points` (Wolfe's algorithm).
pub fn min_norm_point(points: &[Vec<f64>]) -> Vec<f64> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let scale = points.iter().map(|p| dot(p, p)).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let eps = 1e-12 * scale;
    let start = (0..points.len())
        .min_by(|&i, &j| dot(&points[i], &points[i]).total_cmp(&dot(&points[j], &points[j])))
        .expect("nonempty point set");
    let mut active = vec![start];
    let mut lambda = vec![1.0];
    let combine = |active: &[usize], lambda: &[f64]| {
        let mut x = vec![0.0; points[0].len()];
        for (&i, &l) in active.iter().zip(lambda) {
            x.iter_mut().zip(&points[i]).for_each(|(x, p)| *x += l * p);
        }
        x
    };
    let mut x = points[start].clone();
    for _ in 0..1000 {
        let xx = dot(&x, &x);
        if xx <= eps {
            return x;
        }
        let j = (0..points.len())
            .min_by(|&i, &k| dot(&x, &points[i]).total_cmp(&dot(&x, &points[k])))
            .expect("nonempty");
        if xx - dot(&x, &points[j]) <= eps || active.contains(&j) {
            return x;
        }
        active.push(j);
        lambda.push(0.0);
        loop {
            // affine minimizer over the active set
            let k = active.len();
            let mut m = Matrix::<f64>::zeros(k + 1);
            for a in 0..k {
                for b in 0..k {
                    m[(a, b)] = dot(&points[active[a]], &points[active[b]]);
                }
                m[(a, k)] = 1.0;
                m[(k, a)] = 1.0;
            }
            let mut rhs = vec![0.0; k + 1];
            rhs[k] = 1.0;
            let Ok(sol) = m.solve(&rhs) else {
                return x;
            };
            let alpha = &sol[..k];
            if alpha.iter().all(|&a| a > 1e-14) {
                lambda = alpha.to_vec();
                x = combine(&active, &lambda);
                break;
            }
            let theta = (0..k)
                .filter(|&i| alpha[i] <= 1e-14)
                .map(|i| lambda[i] / (lambda[i] - alpha[i]))
                .fold(1.0, f64::min);
            for i in 0..k {
                lambda[i] = (1.0 - theta) * lambda[i] + theta * alpha[i];
            }
            let keep: Vec<bool> = lambda.iter().map(|&l| l > 1e-14).collect();
            let mut n = 0;
            for i in 0..k {
                if keep[i] {
                    active[n] = active[i];
                    lambda[n] = lambda[i];
                    n += 1;
                }
            }
            active.truncate(n);
            lambda.truncate(n);
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
            x = combine(&active, &lambda);
        }
    }
    x
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    PlusInfinity,
    MinusInfinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum D1Case {
    I,
    II1,
    II2(Side),
    /// No escape witnessed on either side up to the word length (support likely compact).
    Undetermined,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct D1Classification {
    pub case: D1Case,
    pub max_len: usize,
    /// Infimum of the fixed points found (the left end of the support in Case II2(+∞)).
    pub m_estimate: Option<f64>,
    /// Supremum of the fixed points found.
    pub sup_estimate: Option<f64>,
    pub plus_witness: bool,
    pub minus_witness: bool,
    pub growth: Vec<LengthExtremes>,
    pub notes: Vec<String>,
}

/// Running extreme escapes: beyond `ESCAPE_FACTOR·B_max`, or ten-fold growth at two
/// consecutive lengths.
fn escapes(series: &[f64], b_max: f64) -> bool {
    if series.iter().any(|&x| x > ESCAPE_FACTOR * b_max) {
        return true;
    }
    series
        .windows(3)
        .any(|w| w[0] > 0.0 && w[1] > 10.0 * w[0] && w[2] > 10.0 * w[1])
}

/// Case I when some slope is negative; otherwise Case II1 / II2 from the escape of the
/// running fixed-point extremes to `±∞`.
pub fn classify_case_d1<T: Real>(eta: &AffineMeasure<T>, max_len: usize) -> Result<D1Classification, StructureError> {
    if eta.dim() != 1 {
        return Err(StructureError::WrongDimension {
            expected: 1,
            got: eta.dim(),
        });
    }
    let points = fixed_points(eta, max_len)?;
    let growth = fixed_point_extremes(&points, max_len);
    let finite = |x: f64| x.is_finite().then_some(x);
    let m_estimate = growth.last().and_then(|g| finite(g.min));
    let sup_estimate = growth.last().and_then(|g| finite(g.max));
    let b_max = eta.max_translation_norm().to_f64_lossy();
    let maxima: Vec<f64> = growth.iter().map(|g| g.max).filter(|x| x.is_finite()).collect();
    let minima: Vec<f64> = growth.iter().map(|g| -g.min).filter(|x| x.is_finite()).collect();
    let plus_witness = escapes(&maxima, b_max);
    let minus_witness = escapes(&minima, b_max);
    let mut notes = Vec::new();
    let negative = eta.atoms().iter().any(|a| a.map.a[(0, 0)] < T::zero());
    let case = if negative {
        D1Case::I
    } else {
        match (plus_witness, minus_witness) {
            (true, true) => D1Case::II1,
            (true, false) => D1Case::II2(Side::PlusInfinity),
            (false, true) => D1Case::II2(Side::MinusInfinity),
            (false, false) => {
                notes.push(format!(
                    "no escape to ±∞ witnessed up to length {max_len}; the support is likely compact"
                ));
                D1Case::Undetermined
            }
        }
    };
    Ok(D1Classification {
        case,
        max_len,
        m_estimate,
        sup_estimate,
        plus_witness,
        minus_witness,
        growth,
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureParams {
    /// Word length for fixed points, proximal scan and cone propagation.
    pub max_len: usize,
    /// Word length for the `d = 1` case split.
    pub d1_max_len: usize,
    pub gap_tol: f64,
}

impl Default for StructureParams {
    fn default() -> Self {
        Self {
            max_len: 12,
            d1_max_len: DEFAULT_D1_MAX_LEN,
            gap_tol: DEFAULT_GAP_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub params: StructureParams,
    pub fixed_points: Vec<FixedPoint>,
    pub fixed_point_growth: Vec<LengthExtremes>,
    pub proximal_witnesses: Vec<ProximalWitness>,
    pub spectrum: SpectrumReport,
    pub cone: Option<ConeReport>,
    pub cone_classification: ConeCase,
    pub d1: Option<D1Classification>,
    pub d1_case: D1Case,
}

impl StructureReport {
    /// CSV of the fixed points: `word` (atom indices joined by `-`) then coordinates.
    pub fn fixed_points_csv(&self) -> String {
        let d = self.fixed_points.first().map_or(1, |p| p.point.len());
        let mut header = vec!["word".to_string()];
        header.extend((0..d).map(|i| format!("x{i}")));
        let header: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
        crate::io::csv_string(
            &header,
            self.fixed_points.iter().map(|p| {
                let word = p.word.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("-");
                std::iter::once(word)
                    .chain(p.point.iter().map(|&x| crate::io::fmt_f64(x)))
                    .collect::<Vec<_>>()
            }),
        )
    }
}

pub fn structure_report<T: Real>(eta: &AffineMeasure<T>, params: &StructureParams) -> Result<StructureReport, StructureError> {
    let mu = eta.linear_projection();
    let fixed = fixed_points(eta, params.max_len)?;
    let fixed_point_growth = fixed_point_extremes(&fixed, params.max_len);
    let proximal_witnesses = proximal_scan(&mu, params.max_len, params.gap_tol)?;
    let spectrum = spectrum_and_arithmeticity(&mu, &proximal_witnesses);
    let (cone, d1) = if eta.dim() == 1 {
        (None, Some(classify_case_d1(eta, params.d1_max_len)?))
    } else {
        (Some(classify_cone(&mu, &proximal_witnesses, params.max_len)?), None)
    };
    Ok(StructureReport {
        params: *params,
        fixed_points: fixed,
        fixed_point_growth,
        proximal_witnesses,
        spectrum,
        cone_classification: cone.as_ref().map_or(ConeCase::Undetermined, |c| c.classification),
        cone,
        d1_case: d1.as_ref().map_or(D1Case::NotApplicable, |c| c.case),
        d1,
    })
}
