//! Tail diagnostics for samples of the stationary law: Hill estimator, radial
//! homogeneity `t^χ ν(‖x‖ ≥ t)`, directional tails `t^χ ν(⟨u,x⟩ ≥ t)`, the angular
//! measure of large samples, and the Mellin identity `h(s)(1 − k(s)) = u(s)` for `d = 1`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io;
use crate::model::{AffineMeasure, CoefficientLaw};
use crate::rng::{Seed, StreamOp};
use crate::scalar::Real;
use crate::simulate::PointCloud;
use crate::sphere::{BinningError, SphereBinning, SphereHistogram};
use crate::spectral;
use crate::stats;

/// Default exceedance quantile for the angular measure.
pub const DEFAULT_THRESHOLD_QUANTILE: f64 = 0.99;
pub const MIN_EXCEEDANCES: usize = 200;
/// Fraction of the sample treated as Pareto tail in the Mellin check.
const MELLIN_TAIL_FRACTION: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TailError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("top {k_order} order statistics are all equal")]
    DegenerateSample { k_order: usize },
    #[error("no sample beyond t = {t}")]
    EmptyUpperTail { t: f64 },
    #[error("{count} exceedances above the threshold, need {required}")]
    TooFewExceedances { count: usize, required: usize },
    #[error(transparent)]
    BinningMismatch(#[from] BinningError),
    #[error("operation needs dimension {expected}, samples have dimension {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("s = {s} is not below chi = {chi}")]
    SAboveChi { s: f64, chi: f64 },
    #[error("the identity needs every slope a > 0")]
    NonPositiveSlope,
}

impl TailError {
    pub fn code(&self) -> &'static str {
        match self {
            TailError::InvalidParameter(_) => "InvalidParameter",
            TailError::DegenerateSample { .. } => "DegenerateSample",
            TailError::EmptyUpperTail { .. } => "EmptyUpperTail",
            TailError::TooFewExceedances { .. } => "TooFewExceedances",
            TailError::BinningMismatch(_) => "BinningMismatch",
            TailError::WrongDimension { .. } => "WrongDimension",
            TailError::SAboveChi { .. } => "SAboveChi",
            TailError::NonPositiveSlope => "NonPositiveSlope",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HillEstimate {
    pub chi_hat: f64,
    pub stderr: f64,
    pub k_order: usize,
}

/// `k / Σ_{i<k} log(X_(i) / X_(k))` over descending order statistics.
pub fn hill_estimator(norms: &[f64], k_order: usize) -> Result<HillEstimate, TailError> {
    if k_order == 0 || 2 * k_order >= norms.len() {
        return Err(TailError::InvalidParameter(format!(
            "k_order must satisfy 0 < k < n/2 (k = {k_order}, n = {})",
            norms.len()
        )));
    }
    if norms.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(TailError::InvalidParameter("norms must be positive and finite".into()));
    }
    let mut sorted = norms.to_vec();
    // descending
    sorted.sort_by(|a, b| b.total_cmp(a));
    let xk = sorted[k_order];
    // ratios, so a common scale factor cancels before the logarithm
    let sum: f64 = sorted[..k_order].iter().map(|x| (x / xk).ln()).sum();
    if sum == 0.0 {
        return Err(TailError::DegenerateSample { k_order });
    }
    let chi_hat = k_order as f64 / sum;
    Ok(HillEstimate {
        chi_hat,
        stderr: chi_hat / (k_order as f64).sqrt(),
        k_order,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: f64,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialCurve {
    pub chi: f64,
    pub points: Vec<CurvePoint>,
    /// `(max − min) / mean` of the curve values.
    pub flatness: f64,
}

/// `count` values ≥ `t` in ascending `sorted`.
fn count_at_least(sorted: &[f64], t: f64) -> usize {
    sorted.len() - sorted.partition_point(|&x| x < t)
}

fn check_grid(t_grid: &[f64]) -> Result<(), TailError> {
    if t_grid.is_empty() || t_grid.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
        return Err(TailError::InvalidParameter("t_grid must be nonempty and positive".into()));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(TailError::InvalidParameter("t_grid must be strictly increasing".into()));
    }
    Ok(())
}

/// `t^χ · #{x : stat(x) ≥ t} / n` with its binomial standard error.
fn scaled_tail(sorted: &[f64], n: usize, chi: f64, t: f64) -> CurvePoint {
    let p = count_at_least(sorted, t) as f64 / n as f64;
    let scale = t.powf(chi);
    CurvePoint {
        t,
        value: scale * p,
        stderr: scale * (p * (1.0 - p) / n as f64).sqrt(),
    }
}

/// Tail curve of the norms; errors if nothing reaches the first grid point.
pub fn radial_homogeneity<T: Real>(
    samples: &PointCloud<T>,
    chi: f64,
    t_grid: &[f64],
) -> Result<RadialCurve, TailError> {
    let mut norms = samples.norms();
    stats::sort_floats(&mut norms);
    radial_curve_sorted(&norms, chi, t_grid)
}

pub fn radial_curve_sorted(sorted_norms: &[f64], chi: f64, t_grid: &[f64]) -> Result<RadialCurve, TailError> {
    check_grid(t_grid)?;
    if count_at_least(sorted_norms, t_grid[0]) == 0 {
        return Err(TailError::EmptyUpperTail { t: t_grid[0] });
    }
    let n = sorted_norms.len();
    let points: Vec<CurvePoint> = t_grid.iter().map(|&t| scaled_tail(sorted_norms, n, chi, t)).collect();
    let values: Vec<f64> = points.iter().map(|p| p.value).collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Ok(RadialCurve {
        chi,
        points,
        flatness: (max - min) / mean,
    })
}

/// `count` geometrically spaced points between the `q_lo` and `q_hi` quantiles of the
/// sample norms.
pub fn quantile_t_grid<T: Real>(samples: &PointCloud<T>, q_lo: f64, q_hi: f64, count: usize) -> Result<Vec<f64>, TailError> {
    if !(0.0 < q_lo && q_lo < q_hi && q_hi < 1.0) || count < 2 {
        return Err(TailError::InvalidParameter("need 0 < q_lo < q_hi < 1 and count ≥ 2".into()));
    }
    let mut norms = samples.norms();
    stats::sort_floats(&mut norms);
    let lo = stats::sorted_quantile(&norms, q_lo);
    let hi = stats::sorted_quantile(&norms, q_hi);
    if !(lo > 0.0 && hi > lo) {
        return Err(TailError::InvalidParameter(format!("quantile range [{lo}, {hi}] is degenerate")));
    }
    let r = (hi / lo).ln() / (count - 1) as f64;
    Ok((0..count)
        .map(|i| if i + 1 == count { hi } else { lo * (r * i as f64).exp() })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionalTail {
    pub u: Vec<f64>,
    pub c_hat: f64,
    pub stderr: f64,
    pub points: Vec<CurvePoint>,
}

impl DirectionalTail {
    /// `c_hat > 3·stderr`.
    pub fn is_positive(&self) -> bool {
        self.c_hat > 3.0 * self.stderr
    }
}

/// Mean over `t_grid` of `t^χ · #{⟨u, x⟩ ≥ t} / n`; the standard error is the binomial
/// one at the geometric mean of the grid.
pub fn directional_tail<T: Real>(
    samples: &PointCloud<T>,
    u: &[f64],
    chi: f64,
    t_grid: &[f64],
) -> Result<DirectionalTail, TailError> {
    if u.len() != samples.dim() {
        return Err(TailError::WrongDimension {
            expected: samples.dim(),
            got: u.len(),
        });
    }
    check_grid(t_grid)?;
    let mut proj = samples.project(u);
    stats::sort_floats(&mut proj);
    if count_at_least(&proj, t_grid[0]) == 0 {
        return Err(TailError::EmptyUpperTail { t: t_grid[0] });
    }
    let n = proj.len();
    let points: Vec<CurvePoint> = t_grid.iter().map(|&t| scaled_tail(&proj, n, chi, t)).collect();
    let c_hat = points.iter().map(|p| p.value).sum::<f64>() / points.len() as f64;
    let t_geo = (t_grid.iter().map(|t| t.ln()).sum::<f64>() / t_grid.len() as f64).exp();
    let stderr = scaled_tail(&proj, n, chi, t_geo).stderr;
    Ok(DirectionalTail {
        u: u.to_vec(),
        c_hat,
        stderr,
        points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularHistogram {
    pub threshold_quantile: f64,
    /// Norm threshold (the sample quantile).
    pub threshold: f64,
    pub exceedances: usize,
    pub histogram: SphereHistogram,
}

impl AngularHistogram {
    /// CSV with columns `c0 … c{d−1}, mass` (bin centers).
    pub fn to_csv(&self) -> String {
        let d = self.histogram.binning.dim();
        let mut header: Vec<String> = (0..d).map(|i| format!("c{i}")).collect();
        header.push("mass".into());
        let header: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
        io::csv_string(
            &header,
            self.histogram
                .binning
                .centers()
                .iter()
                .zip(&self.histogram.masses)
                .map(|(c, &m)| c.iter().copied().chain([m]).map(io::fmt_f64).collect::<Vec<_>>()),
        )
    }
}

/// Directions of the samples whose norm exceeds the `threshold_quantile` sample quantile.
pub fn angular_measure<T: Real>(samples: &PointCloud<T>, threshold_quantile: f64) -> Result<AngularHistogram, TailError> {
    if !(0.95..=0.9999).contains(&threshold_quantile) {
        return Err(TailError::InvalidParameter(format!(
            "threshold_quantile must lie in [0.95, 0.9999], got {threshold_quantile}"
        )));
    }
    let norms = samples.norms();
    let mut sorted = norms.clone();
    stats::sort_floats(&mut sorted);
    let threshold = stats::sorted_quantile(&sorted, threshold_quantile);
    let exceedances = sorted.len() - sorted.partition_point(|&x| x <= threshold);
    if exceedances < MIN_EXCEEDANCES {
        return Err(TailError::TooFewExceedances {
            count: exceedances,
            required: MIN_EXCEEDANCES,
        });
    }
    let big: Vec<Vec<f64>> = samples
        .iter()
        .zip(&norms)
        .filter(|(_, &r)| r > threshold)
        .map(|(p, _)| p.iter().map(|x| x.to_f64_lossy()).collect())
        .collect();
    let histogram = SphereHistogram::from_weighted(
        SphereBinning::for_dim(samples.dim()),
        big.iter().map(|v| (v.as_slice(), 1.0)),
    );
    Ok(AngularHistogram {
        threshold_quantile,
        threshold,
        exceedances,
        histogram,
    })
}

/// Case attribution used to compare the angular measure with `ν₁`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AngularCase {
    /// `ν_∞ ∝ ν₁`.
    CaseI,
    /// `ν_∞ = C₊ν₁⁺ + C₋ν₁⁻` with `ν₁⁻` the antipodal image of `ν₁⁺`.
    CaseII,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularComparison {
    pub case: AngularCase,
    /// TV distance to `ν₁` (Case I) or to the fitted mixture (Case II).
    pub tv: f64,
    /// TV distance after folding through `u ↦ −u`.
    pub folded_tv: f64,
    pub c_plus: Option<f64>,
    pub c_minus: Option<f64>,
    /// `"II2"` when `C₋/C₊ < 0.01`, `"II1"` when above 0.1, absent in between.
    pub mixture_verdict: Option<String>,
}

impl AngularComparison {
    pub fn ratio(&self) -> Option<f64> {
        match (self.c_plus, self.c_minus) {
            (Some(p), Some(m)) if p > 0.0 => Some(m / p),
            _ => None,
        }
    }
}

pub fn compare_angular_to_nu1(
    angular: &SphereHistogram,
    nu1: &SphereHistogram,
    case: AngularCase,
) -> Result<AngularComparison, TailError> {
    let folded_tv = angular.folded_tv_distance(nu1)?;
    match case {
        AngularCase::CaseI => Ok(AngularComparison {
            case,
            tv: angular.tv_distance(nu1)?,
            folded_tv,
            c_plus: None,
            c_minus: None,
            mixture_verdict: None,
        }),
        AngularCase::CaseII => {
            let plus = &nu1.masses;
            let minus = nu1.antipodal_image().masses;
            let (cp, cm) = nnls2(plus, &minus, &angular.masses);
            let fit: Vec<f64> = plus.iter().zip(&minus).map(|(p, m)| cp * p + cm * m).collect();
            let total: f64 = fit.iter().sum();
            let tv = if total > 0.0 {
                0.5 * fit
                    .iter()
                    .zip(&angular.masses)
                    .map(|(f, a)| (f / total - a).abs())
                    .sum::<f64>()
            } else {
                1.0
            };
            let ratio = if cp > 0.0 { cm / cp } else { f64::INFINITY };
            let mixture_verdict = if ratio < 0.01 {
                Some("II2".to_string())
            } else if ratio > 0.1 {
                Some("II1".to_string())
            } else {
                None
            };
            Ok(AngularComparison {
                case,
                tv,
                folded_tv,
                c_plus: Some(cp),
                c_minus: Some(cm),
                mixture_verdict,
            })
        }
    }
}

/// Nonnegative least squares `min ‖c₁x + c₂y − z‖` over `c ≥ 0` for two columns.
fn nnls2(x: &[f64], y: &[f64], z: &[f64]) -> (f64, f64) {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    let (xx, yy, xy, xz, yz) = (dot(x, x), dot(y, y), dot(x, y), dot(x, z), dot(y, z));
    let det = xx * yy - xy * xy;
    if det > 1e-14 * xx * yy {
        let c1 = (yy * xz - xy * yz) / det;
        let c2 = (xx * yz - xy * xz) / det;
        if c1 >= 0.0 && c2 >= 0.0 {
            return (c1, c2);
        }
    }
    let err = |c1: f64, c2: f64| {
        x.iter()
            .zip(y)
            .zip(z)
            .map(|((a, b), c)| (c1 * a + c2 * b - c).powi(2))
            .sum::<f64>()
    };
    let only_x = if xx > 0.0 { (xz / xx).max(0.0) } else { 0.0 };
    let only_y = if yy > 0.0 { (yz / yy).max(0.0) } else { 0.0 };
    if err(only_x, 0.0) <= err(0.0, only_y) {
        (only_x, 0.0)
    } else {
        (0.0, only_y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MellinRow {
    pub s: f64,
    pub h: f64,
    pub h_stderr: f64,
    pub k: f64,
    pub u: f64,
    pub u_stderr: f64,
    /// `h(1 − k) − u`.
    pub residual: f64,
    pub stderr: f64,
    pub pass: bool,
}

/// Checks `h(s)(1 − k(s)) = u(s)` with `h(s) = E (z⁺)^s` and
/// `u(s) = E[(z⁺)^s − ((z − b)⁺)^s]`, where `z = a z' + b` pairs each sample `z'` with a
/// fresh coefficient draw. Since `(z⁺)^s` has index `χ/s`, its mean is taken as the
/// mean below the top 1% plus the Pareto mean of the top 1%.
pub fn mellin_identity_check<T: Real>(
    eta: &AffineMeasure<T>,
    s_list: &[f64],
    samples: &PointCloud<T>,
    chi: f64,
    seed: Seed,
) -> Result<Vec<MellinRow>, TailError> {
    if eta.dim() != 1 || samples.dim() != 1 {
        return Err(TailError::WrongDimension {
            expected: 1,
            got: eta.dim().max(samples.dim()),
        });
    }
    if eta.atoms().iter().any(|a| !(a.map.a[(0, 0)] > T::zero())) {
        return Err(TailError::NonPositiveSlope);
    }
    if let Some(&s) = s_list.iter().find(|&&s| !(s >= 0.0 && s < chi)) {
        return Err(TailError::SAboveChi { s, chi });
    }
    let n = samples.len();
    if n < 2 * MIN_EXCEEDANCES {
        return Err(TailError::InvalidParameter(format!("need at least {} samples", 2 * MIN_EXCEEDANCES)));
    }
    let mut rng = seed.stream(StreamOp::Mellin, 0, 0);
    // (z⁺, (a z')⁺) pairs
    let pairs: Vec<(f64, f64)> = samples
        .iter()
        .map(|p| {
            let h = eta.sample_atom(&mut rng);
            let az = (h.a[(0, 0)] * p[0]).to_f64_lossy();
            let z = az + h.b[0].to_f64_lossy();
            (z.max(0.0), az.max(0.0))
        })
        .collect();
    let mu = eta.linear_projection();
    s_list
        .iter()
        .map(|&s| {
            let k = spectral::exact_k_d1(&mu, s).expect("dimension checked");
            if s == 0.0 {
                return Ok(MellinRow {
                    s,
                    h: 1.0,
                    h_stderr: 0.0,
                    k,
                    u: 0.0,
                    u_stderr: 0.0,
                    residual: 0.0,
                    stderr: 0.0,
                    pass: true,
                });
            }
            let mut y: Vec<f64> = pairs.iter().map(|&(z, _)| z.powf(s)).collect();
            let u_vals: Vec<f64> = pairs.iter().map(|&(z, az)| z.powf(s) - az.powf(s)).collect();
            let u_est = stats::mean_stderr(&u_vals);
            stats::sort_floats(&mut y);
            let (h, h_stderr) = tail_corrected_mean(&y, chi / s);
            let residual = h * (1.0 - k) - u_est.mean;
            let stderr = ((1.0 - k).powi(2) * h_stderr.powi(2) + u_est.stderr.powi(2)).sqrt();
            Ok(MellinRow {
                s,
                h,
                h_stderr,
                k,
                u: u_est.mean,
                u_stderr: u_est.stderr,
                residual,
                stderr,
                pass: residual.abs() <= 3.0 * stderr,
            })
        })
        .collect()
}

/// Mean of ascending `sorted` values whose upper tail is Pareto with index `alpha > 1`:
/// empirical part below the top `k` plus `(k/n) X_(k) α/(α − 1)`. The tail term's error
/// propagates a relative index uncertainty of `1/√k`.
fn tail_corrected_mean(sorted: &[f64], alpha: f64) -> (f64, f64) {
    let n = sorted.len();
    let k = ((n as f64 * MELLIN_TAIL_FRACTION).ceil() as usize).clamp(1, n - 1);
    let body = &sorted[..n - k];
    let xk = sorted[n - k - 1];
    let nf = n as f64;
    let body_sum: f64 = body.iter().sum();
    let body_mean_all = body_sum / nf;
    // variance of Y·1{Y ≤ X_(k)} over all n
    let sq: f64 = body.iter().map(|y| y * y).sum::<f64>() / nf;
    let var_trim = (sq - body_mean_all * body_mean_all).max(0.0);
    let se_trim = (var_trim / nf).sqrt();
    let frac = k as f64 / nf;
    let tail = frac * xk * alpha / (alpha - 1.0);
    let se_tail = frac * xk * alpha / (alpha - 1.0).powi(2) * (alpha / (k as f64).sqrt());
    (body_mean_all + tail, (se_trim * se_trim + se_tail * se_tail).sqrt())
}

/// Tail summary of one sample set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub chi: f64,
    pub chi_hill: HillEstimate,
    pub radial_curve: RadialCurve,
    pub directional: Vec<DirectionalTail>,
    pub angular: AngularHistogram,
    pub threshold_quantile: f64,
}

impl TailReport {
    /// CSV `t, value, stderr` of the radial curve.
    pub fn radial_csv(&self) -> String {
        curve_csv(&self.radial_curve.points)
    }

    /// CSV `u…, t, value, stderr` of every directional curve.
    pub fn directional_csv(&self) -> String {
        let d = self.directional.first().map_or(1, |t| t.u.len());
        let mut header: Vec<String> = (0..d).map(|i| format!("u{i}")).collect();
        header.extend(["t", "value", "stderr"].map(String::from));
        let header: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
        io::csv_string(
            &header,
            self.directional.iter().flat_map(|dt| {
                dt.points.iter().map(move |p| {
                    dt.u.iter()
                        .copied()
                        .chain([p.t, p.value, p.stderr])
                        .map(io::fmt_f64)
                        .collect::<Vec<_>>()
                })
            }),
        )
    }
}

pub fn curve_csv(points: &[CurvePoint]) -> String {
    io::csv_string(
        &["t", "value", "stderr"],
        points
            .iter()
            .map(|p| [io::fmt_f64(p.t), io::fmt_f64(p.value), io::fmt_f64(p.stderr)]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn pareto(n: usize, index: f64, seed: u64) -> Vec<f64> {
        let mut rng = Seed(seed).stream(StreamOp::Oracle, 0, 0);
        (0..n).map(|_| (1.0 - rng.random::<f64>()).powf(-1.0 / index)).collect()
    }

    #[test]
    fn hill_on_pareto() {
        let x = pareto(200_000, 2.0, 1);
        let h = hill_estimator(&x, 2000).unwrap();
        assert!((h.chi_hat - 2.0).abs() < 3.0 * h.stderr, "{h:?}");
    }

    #[test]
    fn hill_errors() {
        assert!(matches!(hill_estimator(&[1.0; 100], 10), Err(TailError::DegenerateSample { .. })));
        assert!(matches!(hill_estimator(&[1.0, 2.0], 1), Err(TailError::InvalidParameter(_))));
    }

    #[test]
    fn hill_exactly_invariant_under_power_of_two_scaling() {
        let x = pareto(10_000, 1.5, 2);
        let y: Vec<f64> = x.iter().map(|v| v * 8.0).collect();
        assert_eq!(hill_estimator(&x, 100).unwrap(), hill_estimator(&y, 100).unwrap());
    }

    #[test]
    fn empty_tail() {
        let c = PointCloud::from_flat(1, vec![1.0, 1.5, 2.0]);
        assert!(matches!(radial_homogeneity(&c, 1.0, &[2.5, 3.0]), Err(TailError::EmptyUpperTail { .. })));
        assert!(matches!(radial_homogeneity(&c, 1.0, &[3.0, 2.5]), Err(TailError::InvalidParameter(_))));
    }

    #[test]
    fn ray_samples_land_in_one_bin() {
        let data: Vec<f64> = (1..=1000).flat_map(|i| [i as f64, 0.0]).collect();
        let c = PointCloud::from_flat(2, data);
        let a = angular_measure(&c, 0.95).unwrap_err();
        assert!(matches!(a, TailError::TooFewExceedances { count: 50, .. }));
        let data: Vec<f64> = (1..=10_000).flat_map(|i| [i as f64, 0.0]).collect();
        let a = angular_measure(&PointCloud::from_flat(2, data), 0.95).unwrap();
        assert_eq!(a.histogram.occupied_bins(), 1);
        let e1 = a.histogram.binning.bin_of(&[1.0, 0.0]);
        assert_eq!(a.histogram.masses[e1], 1.0);
    }

    #[test]
    fn nnls_cases() {
        let (a, b) = nnls2(&[1.0, 0.0], &[0.0, 1.0], &[0.7, 0.3]);
        assert!((a - 0.7).abs() < 1e-15 && (b - 0.3).abs() < 1e-15);
        let (a, b) = nnls2(&[1.0, 0.0], &[0.0, 1.0], &[0.7, -0.3]);
        assert_eq!((a, b), (0.7, 0.0));
    }

    #[test]
    fn identical_histograms_have_zero_tv() {
        let b = SphereBinning::for_dim(2);
        let h = SphereHistogram::from_weighted(b, [(&[1.0, 0.3][..], 1.0), (&[-1.0, 0.2][..], 2.0)]);
        let c = compare_angular_to_nu1(&h, &h, AngularCase::CaseI).unwrap();
        assert_eq!(c.tv, 0.0);
    }

    #[test]
    fn tail_corrected_mean_of_pareto() {
        // Pareto(α) on [1, ∞) has mean α/(α − 1)
        let alpha = 1.5;
        let mut x = pareto(400_000, alpha, 3);
        stats::sort_floats(&mut x);
        let (m, se) = tail_corrected_mean(&x, alpha);
        assert!((m - 3.0).abs() < 3.0 * se, "{m} ± {se}");
    }
}
