//! Sampling the stationary law: truncated backward series, forward orbits and a
//! stationarity check `ν = η * ν`.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io;
use crate::linalg::{self, Matrix};
use crate::model::{AffineMeasure, CoefficientLaw};
use crate::rng::{self, Seed, StreamOp, StreamRng};
use crate::scalar::Real;
use crate::spectral;
use crate::stats;

/// Samples generated by one random stream.
pub const CHUNK: usize = 1024;
/// Window of the local decay estimate in the stopping rule.
pub const DECAY_WINDOW: usize = 20;
/// Power-iteration steps per prefix norm update.
const NORM_ITERS: usize = 10;
/// Largest tolerated fraction of truncated samples.
pub const MAX_FAILURE_FRACTION: f64 = 0.001;
/// Forward orbits stop with an error past this norm.
pub const OVERFLOW_NORM: f64 = 1e300;
/// Projections used by the stationarity test for `d > 1`.
pub const STATIONARITY_PROJECTIONS: usize = 20;
/// Significance of the stationarity test.
pub const STATIONARITY_ALPHA: f64 = 0.001;
/// Smallest sample accepted by [`stationarity_check`].
pub const STATIONARITY_MIN_SAMPLES: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulateError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("state norm exceeded 1e300 at step {step}")]
    Overflow { step: usize },
    #[error("backward series not within tolerance after {depth} terms")]
    TruncationFailure { depth: usize },
    #[error("{failures} of {samples} backward samples hit max_depth (limit 0.1%)")]
    ExcessiveTruncationFailures { failures: usize, samples: usize },
    #[error("stationarity check needs at least {STATIONARITY_MIN_SAMPLES} samples, got {0}")]
    TooFewSamples(usize),
}

impl SimulateError {
    pub fn code(&self) -> &'static str {
        match self {
            SimulateError::InvalidParameter(_) => "InvalidParameter",
            SimulateError::Overflow { .. } => "Overflow",
            SimulateError::TruncationFailure { .. } => "TruncationFailure",
            SimulateError::ExcessiveTruncationFailures { .. } => "ExcessiveTruncationFailures",
            SimulateError::TooFewSamples(_) => "TooFewSamples",
        }
    }
}

/// Points of `ℝ^d` stored contiguously.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> PointCloud<T> {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1);
        Self { dim, data: Vec::new() }
    }

    pub fn from_flat(dim: usize, data: Vec<T>) -> Self {
        assert!(dim >= 1 && data.len().is_multiple_of(dim), "flat data is not a multiple of d");
        Self { dim, data }
    }

    pub fn from_points(dim: usize, points: &[Vec<T>]) -> Self {
        let mut c = Self::new(dim);
        points.iter().for_each(|p| c.push(p));
        c
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn push(&mut self, p: &[T]) {
        assert_eq!(p.len(), self.dim);
        self.data.extend_from_slice(p);
    }

    pub fn get(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, T> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[T] {
        &self.data
    }

    /// First `n` points.
    pub fn prefix(&self, n: usize) -> Self {
        Self {
            dim: self.dim,
            data: self.data[..n.min(self.len()) * self.dim].to_vec(),
        }
    }

    pub fn norms(&self) -> Vec<f64> {
        self.iter().map(|p| linalg::norm(p).to_f64_lossy()).collect()
    }

    /// `⟨u, x_i⟩` for every point.
    pub fn project(&self, u: &[f64]) -> Vec<f64> {
        self.iter()
            .map(|p| p.iter().zip(u).map(|(x, y)| x.to_f64_lossy() * y).sum())
            .collect()
    }

    pub fn to_f64(&self) -> PointCloud<f64> {
        PointCloud {
            dim: self.dim,
            data: self.data.iter().map(|x| x.to_f64_lossy()).collect(),
        }
    }

    /// CSV with columns `x0 … x{d−1}`.
    pub fn to_csv(&self) -> String {
        let header: Vec<String> = (0..self.dim).map(|i| format!("x{i}")).collect();
        let header: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
        io::csv_string(
            &header,
            self.iter()
                .map(|p| p.iter().map(|x| io::fmt_f64(x.to_f64_lossy())).collect::<Vec<_>>()),
        )
    }
}

/// States `x_0, …, x_n` of one forward orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitTrace<T> {
    pub start: Vec<T>,
    pub states: Vec<Vec<T>>,
    pub atom_indices: Vec<usize>,
}

impl<T: Real> OrbitTrace<T> {
    pub fn len(&self) -> usize {
        self.states.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn last(&self) -> &[T] {
        self.states.last().expect("orbit holds x0")
    }
}

fn run_orbit<T: Real>(
    eta: &AffineMeasure<T>,
    x0: &[T],
    n: usize,
    rng: &mut StreamRng,
    mut record: impl FnMut(usize, &[T]),
) -> Result<Vec<T>, SimulateError> {
    let mut x = x0.to_vec();
    let mut y = vec![T::zero(); x.len()];
    for step in 0..n {
        let i = eta.sample_index(rng);
        let h = &eta.atom(i).map;
        h.a.mul_vec_into(&x, &mut y);
        y.iter_mut().zip(&h.b).for_each(|(y, &b)| *y += b);
        std::mem::swap(&mut x, &mut y);
        if !(linalg::norm(&x).to_f64_lossy() <= OVERFLOW_NORM) {
            return Err(SimulateError::Overflow { step: step + 1 });
        }
        record(i, &x);
    }
    Ok(x)
}

/// `n` steps of `x_{k+1} = a_{k+1} x_k + b_{k+1}` from `x0`.
pub fn forward_orbit<T: Real>(
    eta: &AffineMeasure<T>,
    x0: &[T],
    n: usize,
    seed: Seed,
) -> Result<OrbitTrace<T>, SimulateError> {
    check_start(eta, x0, n)?;
    let mut rng = seed.stream(StreamOp::Forward, 0, 0);
    let mut states = vec![x0.to_vec()];
    let mut atom_indices = Vec::with_capacity(n);
    run_orbit(eta, x0, n, &mut rng, |i, x| {
        atom_indices.push(i);
        states.push(x.to_vec());
    })?;
    Ok(OrbitTrace {
        start: x0.to_vec(),
        states,
        atom_indices,
    })
}

/// Time-`n` states of `count` independent forward orbits from `x0`.
pub fn forward_marginal<T: Real>(
    eta: &AffineMeasure<T>,
    x0: &[T],
    n: usize,
    count: usize,
    seed: Seed,
) -> Result<PointCloud<T>, SimulateError> {
    check_start(eta, x0, n)?;
    let chunks: Vec<Result<Vec<T>, SimulateError>> = (0..count.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut rng = seed.stream(StreamOp::Forward, 1 + c as u64, 0);
            let mut out = Vec::new();
            for _ in 0..CHUNK.min(count - c * CHUNK) {
                out.extend(run_orbit(eta, x0, n, &mut rng, |_, _| {})?);
            }
            Ok(out)
        })
        .collect();
    let mut data = Vec::with_capacity(count * eta.dim());
    for c in chunks {
        data.extend(c?);
    }
    Ok(PointCloud::from_flat(eta.dim(), data))
}

fn check_start<T: Real>(eta: &AffineMeasure<T>, x0: &[T], n: usize) -> Result<(), SimulateError> {
    if n == 0 {
        return Err(SimulateError::InvalidParameter("orbit length must be ≥ 1".into()));
    }
    if x0.len() != eta.dim() {
        return Err(SimulateError::InvalidParameter(format!(
            "start has length {}, measure has dimension {}",
            x0.len(),
            eta.dim()
        )));
    }
    Ok(())
}

/// Outcome of one backward-series evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct BackwardDraw<T> {
    pub z: Vec<T>,
    /// Number of terms summed.
    pub depth: usize,
    /// Stopping rule met (otherwise `max_depth` was reached).
    pub converged: bool,
}

/// Reusable buffers for the backward series.
struct BackwardWork<T> {
    prefix: Matrix<T>,
    next: Matrix<T>,
    pb: Vec<T>,
    v: Vec<T>,
    scratch: Vec<T>,
    log_norms: Vec<f64>,
}

impl<T: Real> BackwardWork<T> {
    fn new(d: usize) -> Self {
        Self {
            prefix: Matrix::identity(d),
            next: Matrix::zeros(d),
            pb: vec![T::zero(); d],
            v: vec![T::zero(); d],
            scratch: vec![T::zero(); d],
            log_norms: Vec::new(),
        }
    }
}

/// Partial sums `z_K = Σ_{k<K} a₁⋯a_k b_{k+1}` until `p_K / (1 − γ̂) < tol`, where
/// `p_K = ‖a₁⋯a_K‖`, `γ̂ = max(½, (p_K / p_{K−20})^{1/20})` and the bound is only trusted
/// when `γ̂ < 1`. Since every later term is at most `p_K · B_max` in norm, `tol` is the
/// truncation error relative to `B_max = max_i ‖b_i‖`.
pub fn backward_sample_with<T: Real>(
    eta: &AffineMeasure<T>,
    tol: f64,
    max_depth: usize,
    rng: &mut StreamRng,
) -> BackwardDraw<T> {
    let mut work = BackwardWork::new(eta.dim());
    backward_draw(eta, tol, max_depth, rng, &mut work)
}

fn backward_draw<T: Real>(
    eta: &AffineMeasure<T>,
    tol: f64,
    max_depth: usize,
    rng: &mut StreamRng,
    w: &mut BackwardWork<T>,
) -> BackwardDraw<T> {
    let d = eta.dim();
    let mut z = vec![T::zero(); d];
    w.prefix = Matrix::identity(d);
    // prefix = stored · 2^exp
    let mut exp: i32 = 0;
    w.log_norms.clear();
    w.log_norms.push(0.0);
    let inv_sqrt_d = T::one() / T::of_usize(d).sqrt();
    w.v.iter_mut().for_each(|x| *x = inv_sqrt_d);
    let ln_tol = tol.ln();
    let ln2 = std::f64::consts::LN_2;
    for depth in 1..=max_depth {
        let h = &eta.sample_atom(rng);
        // z += prefix · b
        w.prefix.mul_vec_into(&h.b, &mut w.pb);
        let f = T::of(2f64.powi(exp));
        z.iter_mut().zip(&w.pb).for_each(|(z, &p)| *z += p * f);
        w.prefix.mul_into(&h.a, &mut w.next);
        std::mem::swap(&mut w.prefix, &mut w.next);
        let m = w.prefix.max_abs();
        if m == T::zero() {
            // every later term vanishes
            return BackwardDraw { z, depth, converged: true };
        }
        let e = m.to_f64_lossy().log2().round() as i32;
        if e.abs() > 16 {
            w.prefix.scale_pow2(-e);
            exp += e;
        }
        let p = w.prefix.spectral_norm_warm(NORM_ITERS, &mut w.v, &mut w.scratch);
        if p == T::zero() {
            return BackwardDraw { z, depth, converged: true };
        }
        let ln_p = p.to_f64_lossy().ln() + exp as f64 * ln2;
        w.log_norms.push(ln_p);
        if depth >= DECAY_WINDOW {
            let ln_gamma = ((ln_p - w.log_norms[depth - DECAY_WINDOW]) / DECAY_WINDOW as f64).max(-ln2);
            if ln_gamma < 0.0 {
                let bound = ln_p - (-ln_gamma.exp_m1()).ln();
                if bound < ln_tol {
                    return BackwardDraw { z, depth, converged: true };
                }
            }
        }
    }
    BackwardDraw {
        z,
        depth: max_depth,
        converged: false,
    }
}

/// One backward sample from the stream `(Backward, 0, 0)`.
pub fn backward_sample<T: Real>(
    eta: &AffineMeasure<T>,
    tol: f64,
    max_depth: usize,
    seed: Seed,
) -> Result<Vec<T>, SimulateError> {
    check_tol(tol, max_depth)?;
    let mut rng = seed.stream(StreamOp::Backward, 0, 0);
    let draw = backward_sample_with(eta, tol, max_depth, &mut rng);
    if draw.converged {
        Ok(draw.z)
    } else {
        Err(SimulateError::TruncationFailure { depth: draw.depth })
    }
}

fn check_tol(tol: f64, max_depth: usize) -> Result<(), SimulateError> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(SimulateError::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    if max_depth == 0 {
        return Err(SimulateError::InvalidParameter("max_depth must be ≥ 1".into()));
    }
    Ok(())
}

/// Independent draws from the stationary law with their truncation record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationarySampleSet<T> {
    pub samples: PointCloud<T>,
    pub truncation_tol: f64,
    pub max_depth: usize,
    pub seed: Seed,
    /// Samples that reached `max_depth`; their partial sums are kept in `samples`.
    pub truncation_failures: usize,
    pub mean_depth: f64,
    pub warnings: Vec<String>,
}

impl<T: Real> StationarySampleSet<T> {
    pub fn dim(&self) -> usize {
        self.samples.dim()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn failure_fraction(&self) -> f64 {
        self.truncation_failures as f64 / self.len().max(1) as f64
    }

    /// JSON sidecar for the CSV export.
    pub fn sidecar(&self) -> SampleSidecar {
        SampleSidecar {
            dim: self.dim(),
            n_samples: self.len(),
            seed: self.seed,
            truncation_tol: self.truncation_tol,
            max_depth: self.max_depth,
            truncation_failures: self.truncation_failures,
            mean_depth: self.mean_depth,
            warnings: self.warnings.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSidecar {
    pub dim: usize,
    pub n_samples: usize,
    pub seed: Seed,
    pub truncation_tol: f64,
    pub max_depth: usize,
    pub truncation_failures: usize,
    pub mean_depth: f64,
    pub warnings: Vec<String>,
}

/// `n_samples` backward samples; chunk `c` of [`CHUNK`] samples uses stream
/// `(Backward, c, 0)`, so the output does not depend on the thread count.
pub fn sample_stationary<T: Real>(
    eta: &AffineMeasure<T>,
    n_samples: usize,
    tol: f64,
    max_depth: usize,
    seed: Seed,
) -> Result<StationarySampleSet<T>, SimulateError> {
    check_tol(tol, max_depth)?;
    if n_samples == 0 {
        return Err(SimulateError::InvalidParameter("n_samples must be ≥ 1".into()));
    }
    let mut warnings = Vec::new();
    if let Ok(l) = spectral::top_lyapunov(&eta.linear_projection(), 1000, 16, seed.derive(StreamOp::Lyapunov as u64)) {
        if !l.is_negative() {
            warnings.push(format!(
                "Lyapunov estimate {:.4} ± {:.4} is not negative at 3 stderr; the backward series may diverge",
                l.alpha, l.stderr
            ));
        }
    }
    let d = eta.dim();
    let chunks: Vec<(Vec<T>, usize, usize)> = (0..n_samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut rng = seed.stream(StreamOp::Backward, c as u64, 0);
            let mut work = BackwardWork::new(d);
            let count = CHUNK.min(n_samples - c * CHUNK);
            let mut data = Vec::with_capacity(count * d);
            let (mut failures, mut depth) = (0, 0);
            for _ in 0..count {
                let draw = backward_draw(eta, tol, max_depth, &mut rng, &mut work);
                failures += usize::from(!draw.converged);
                depth += draw.depth;
                data.extend(draw.z);
            }
            (data, failures, depth)
        })
        .collect();
    let mut data = Vec::with_capacity(n_samples * d);
    let (mut failures, mut depth) = (0, 0);
    for (c, f, dp) in chunks {
        data.extend(c);
        failures += f;
        depth += dp;
    }
    if failures as f64 > MAX_FAILURE_FRACTION * n_samples as f64 {
        return Err(SimulateError::ExcessiveTruncationFailures {
            failures,
            samples: n_samples,
        });
    }
    Ok(StationarySampleSet {
        samples: PointCloud::from_flat(d, data),
        truncation_tol: tol,
        max_depth,
        seed,
        truncation_failures: failures,
        mean_depth: depth as f64 / n_samples as f64,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationarityResult {
    /// KS statistic (maximum over projections for `d > 1`).
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
    pub projections: usize,
}

/// Compares the samples `x_i` with `y_i = a_i x_{π(i)} + b_i` (fresh coefficients,
/// random permutation `π`) by a two-sample KS test at level 0.001; for `d > 1` the
/// maximum over 20 random projections is compared with the Bonferroni threshold.
pub fn stationarity_check<T: Real>(
    samples: &PointCloud<T>,
    eta: &AffineMeasure<T>,
    seed: Seed,
) -> Result<StationarityResult, SimulateError> {
    let n = samples.len();
    if n < STATIONARITY_MIN_SAMPLES {
        return Err(SimulateError::TooFewSamples(n));
    }
    if samples.dim() != eta.dim() {
        return Err(SimulateError::InvalidParameter("sample and measure dimensions differ".into()));
    }
    let d = eta.dim();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut seed.stream(StreamOp::Stationarity, 0, 0));
    let pushed: Vec<T> = perm
        .par_chunks(CHUNK)
        .enumerate()
        .flat_map_iter(|(c, idx)| {
            let mut rng = seed.stream(StreamOp::Stationarity, 1 + c as u64, 0);
            let mut out = Vec::with_capacity(idx.len() * d);
            for &i in idx {
                out.extend(eta.sample_atom(&mut rng).apply(samples.get(i)));
            }
            out
        })
        .collect();
    let pushed = PointCloud::from_flat(d, pushed);
    let (directions, alpha) = if d == 1 {
        (vec![vec![1.0]], STATIONARITY_ALPHA)
    } else {
        let mut rng = seed.stream(StreamOp::Stationarity, 0, 1);
        let dirs = (0..STATIONARITY_PROJECTIONS)
            .map(|_| rng::unit_vector::<f64, _>(&mut rng, d))
            .collect();
        (dirs, STATIONARITY_ALPHA / STATIONARITY_PROJECTIONS as f64)
    };
    let statistic = directions
        .par_iter()
        .map(|u| {
            let mut x = samples.project(u);
            let mut y = pushed.project(u);
            stats::sort_floats(&mut x);
            stats::sort_floats(&mut y);
            stats::ks_sorted(&x, &y)
        })
        .reduce(|| 0.0, f64::max);
    let threshold = stats::ks_critical(alpha, n, n);
    Ok(StationarityResult {
        statistic,
        threshold,
        pass: statistic < threshold,
        projections: directions.len(),
    })
}

/// `mean ‖x‖^s` over each prefix length.
pub fn prefix_moments<T: Real>(samples: &PointCloud<T>, s: f64, prefixes: &[usize]) -> Vec<f64> {
    let powers: Vec<f64> = samples.norms().iter().map(|r| r.powf(s)).collect();
    prefixes
        .iter()
        .map(|&n| {
            let n = n.min(powers.len());
            powers[..n].iter().sum::<f64>() / n as f64
        })
        .collect()
}

/// `(max − min) / min` of a moment profile.
pub fn relative_spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    (max - min) / min
}

/// Number of samples equal to an earlier sample (exact float ties).
pub fn duplicate_count<T: Real>(samples: &PointCloud<T>) -> usize {
    let mut keys: Vec<Vec<u64>> = samples
        .iter()
        .map(|p| p.iter().map(|x| x.to_f64_lossy().to_bits()).collect())
        .collect();
    keys.par_sort_unstable();
    keys.windows(2).filter(|w| w[0] == w[1]).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn contraction() -> AffineMeasure<f64> {
        // single atom; the constructor does not reject degenerate measures
        AffineMeasure::scalar(&[(1.0, 0.5, 1.0)]).unwrap()
    }

    #[test]
    fn forward_orbit_of_contraction() {
        let t = forward_orbit(&contraction(), &[0.0], 4, Seed(1)).unwrap();
        let xs: Vec<f64> = t.states.iter().map(|s| s[0]).collect();
        assert_eq!(xs, vec![0.0, 1.0, 1.5, 1.75, 1.875]);
        assert_eq!(t.len(), 4);
    }

    #[test]
    fn forward_orbit_overflow() {
        let eta = AffineMeasure::scalar(&[(1.0, 1e200, 1.0)]).unwrap();
        assert_eq!(
            forward_orbit(&eta, &[1.0], 10, Seed(1)).unwrap_err(),
            SimulateError::Overflow { step: 2 }
        );
    }

    #[test]
    fn backward_sample_of_contraction() {
        let z = backward_sample(&contraction(), 1e-10, 1000, Seed(2)).unwrap();
        assert!((z[0] - 2.0).abs() <= 1e-10);
    }

    #[test]
    fn truncation_failure_when_depth_too_small() {
        assert!(matches!(
            backward_sample(&contraction(), 1e-10, 5, Seed(2)),
            Err(SimulateError::TruncationFailure { depth: 5 })
        ));
    }

    #[test]
    fn zero_atom_stops_immediately() {
        let eta = AffineMeasure::scalar(&[(1.0, 0.0, 3.0)]).unwrap();
        let mut rng = Seed(3).stream(StreamOp::Backward, 0, 0);
        let d = backward_sample_with(&eta, 1e-9, 100, &mut rng);
        assert_eq!((d.z, d.depth, d.converged), (vec![3.0], 1, true));
    }

    #[test]
    fn sample_set_is_thread_independent() {
        let eta = AffineMeasure::<f64>::scalar(&[(0.5, 1.0 / 3.0, 1.0), (0.5, 2.0, 1.0)]).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let a = one.install(|| sample_stationary(&eta, 3000, 1e-8, 10_000, Seed(9)).unwrap());
        let b = sample_stationary(&eta, 3000, 1e-8, 10_000, Seed(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn degenerate_samples_pass_stationarity() {
        let cloud = PointCloud::from_flat(1, vec![2.0; STATIONARITY_MIN_SAMPLES]);
        let r = stationarity_check(&cloud, &contraction(), Seed(4)).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(r.pass);
        let small = PointCloud::from_flat(1, vec![2.0; 10]);
        assert!(matches!(stationarity_check(&small, &contraction(), Seed(4)), Err(SimulateError::TooFewSamples(10))));
    }

    #[test]
    fn point_cloud_csv() {
        let c = PointCloud::from_points(2, &[vec![1.0, -0.5], vec![0.25, 2.0]]);
        assert_eq!(c.to_csv(), "x0,x1\n1.0,-0.5\n0.25,2.0\n");
        assert_eq!(c.norms()[0], 1.25f64.sqrt());
    }

    #[test]
    fn duplicates_counted() {
        let c = PointCloud::from_flat(1, vec![1.0, 2.0, 1.0, 1.0]);
        assert_eq!(duplicate_count(&c), 2);
    }
}
