//! Growth rates of random matrix products: the top Lyapunov exponent, the moment
//! function `k(s)`, the tail index `χ` solving `k(χ) = 1`, and the stationary
//! direction measure of the `s = χ` transfer operator.
//!
//! For `d > 1`, `k(s)` is the spectral radius of the operator
//! `ρ ↦ ∫∫ ‖g x‖^s δ_{g·x} dμ(g) dρ(x)` on measures on the sphere. It is estimated by a
//! weighted particle power iteration: each particle is a unit direction carrying a
//! weight, each step pushes it through a freshly drawn matrix and multiplies the weight
//! by `‖a u‖^s`. The per-step log growth of the total weight averages to `log k(s)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, LinalgError};
use crate::model::{CoefficientLaw, LinearMeasure};
use crate::rng::{self, Seed, StreamOp};
use crate::scalar::Real;
use crate::serde_ext::nonfinite;
use crate::sphere::{SphereBinning, SphereHistogram};
use crate::stats;

/// Particles handled by one random stream; fixed so results do not depend on threads.
const BLOCK: usize = 256;
/// Batches used for the batch-means standard error of the growth series.
const GROWTH_BATCHES: usize = 20;
/// Residual bound (TV distance) for the stationary direction measure.
pub const DIRECTION_RESIDUAL_TOL: f64 = 0.05;
/// Default cap on the root search for `χ`.
pub const DEFAULT_S_MAX: f64 = 20.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("operation needs dimension {expected}, measure has dimension {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("all particle weights vanished at step {step}")]
    DegenerateParticles { step: usize },
    #[error("no root of k(s) = 1 below s_max = {s_max}: k(s_max) = {k_at_cap:e}, slope of log k at the cap {slope:.4} ({reason})")]
    NoRootBelowCap {
        s_max: f64,
        k_at_cap: f64,
        slope: f64,
        reason: String,
    },
    #[error("Lyapunov exponent not negative: alpha = {alpha} ± {stderr}")]
    AlphaNotNegative { alpha: f64, stderr: f64 },
    #[error("direction measure residual {residual:.4} exceeds {DIRECTION_RESIDUAL_TOL}")]
    NonStationaryResidual { residual: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl SpectralError {
    pub fn code(&self) -> &'static str {
        match self {
            SpectralError::InvalidParameter(_) => "InvalidParameter",
            SpectralError::WrongDimension { .. } => "WrongDimension",
            SpectralError::DegenerateParticles { .. } => "DegenerateParticles",
            SpectralError::NoRootBelowCap { .. } => "NoRootBelowCap",
            SpectralError::AlphaNotNegative { .. } => "AlphaNotNegative",
            SpectralError::NonStationaryResidual { .. } => "NonStationaryResidual",
            SpectralError::Linalg(_) => "LinalgError",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerIterParams {
    pub n_particles: usize,
    pub n_steps: usize,
    pub burn_in: usize,
    pub resample_threshold: f64,
}

impl Default for PowerIterParams {
    fn default() -> Self {
        Self {
            n_particles: 4096,
            n_steps: 400,
            burn_in: 100,
            resample_threshold: 0.5,
        }
    }
}

impl PowerIterParams {
    pub fn validate(&self) -> Result<(), SpectralError> {
        if self.n_particles == 0 || self.n_steps == 0 {
            return Err(SpectralError::InvalidParameter("n_particles and n_steps must be positive".into()));
        }
        if self.burn_in >= self.n_steps {
            return Err(SpectralError::InvalidParameter(format!(
                "burn_in ({}) must be below n_steps ({})",
                self.burn_in, self.n_steps
            )));
        }
        if !(self.resample_threshold > 0.0 && self.resample_threshold <= 1.0) {
            return Err(SpectralError::InvalidParameter("resample_threshold must lie in (0, 1]".into()));
        }
        Ok(())
    }

    pub fn with_particles(self, n_particles: usize) -> Self {
        Self { n_particles, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    #[serde(with = "nonfinite")]
    pub alpha: f64,
    pub stderr: f64,
    /// Per-trial estimates in trial order.
    pub trials: Vec<f64>,
    /// Set when some product vector vanished (a zero atom with `d = 1`); `alpha = −∞`.
    pub hit_zero: bool,
}

impl LyapunovEstimate {
    /// `alpha + 3·stderr < 0`.
    pub fn is_negative(&self) -> bool {
        self.alpha + 3.0 * self.stderr < 0.0
    }
}

/// Deterministic initial directions for `n` trials or particles.
pub fn initial_directions<T: Real>(d: usize, n: usize, seed: Seed) -> Vec<Vec<T>> {
    (0..n.div_ceil(BLOCK))
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = seed.stream(StreamOp::DirectionInit, b as u64, 0);
            let count = BLOCK.min(n - b * BLOCK);
            (0..count).map(move |_| rng::unit_vector::<T, _>(&mut rng, d)).collect::<Vec<_>>()
        })
        .collect()
}

/// Top Lyapunov exponent from `n_trials` norm-renormalized products of length `n_steps`.
pub fn top_lyapunov<T: Real>(
    mu: &LinearMeasure<T>,
    n_steps: usize,
    n_trials: usize,
    seed: Seed,
) -> Result<LyapunovEstimate, SpectralError> {
    let starts = initial_directions(mu.dim(), n_trials, seed);
    top_lyapunov_from(mu, n_steps, &starts, seed)
}

/// As [`top_lyapunov`] with explicit start vectors (one trial per start).
pub fn top_lyapunov_from<T: Real>(
    mu: &LinearMeasure<T>,
    n_steps: usize,
    starts: &[Vec<T>],
    seed: Seed,
) -> Result<LyapunovEstimate, SpectralError> {
    if n_steps < 100 {
        return Err(SpectralError::InvalidParameter("top_lyapunov needs n_steps ≥ 100".into()));
    }
    if starts.is_empty() {
        return Err(SpectralError::InvalidParameter("need at least one trial".into()));
    }
    let d = mu.dim();
    let per_trial: Vec<Option<f64>> = starts
        .par_iter()
        .enumerate()
        .map(|(t, start)| {
            let mut rng = seed.stream(StreamOp::Lyapunov, t as u64, 0);
            let mut u = start.clone();
            linalg::normalize(&mut u);
            let mut v = vec![T::zero(); d];
            let mut sum = 0.0;
            for _ in 0..n_steps {
                let a = mu.sample_matrix(&mut rng);
                a.mul_vec_into(&u, &mut v);
                let n = linalg::norm(&v);
                if n == T::zero() {
                    return None;
                }
                sum += n.to_f64_lossy().ln();
                for (ui, &vi) in u.iter_mut().zip(&v) {
                    *ui = vi / n;
                }
            }
            Some(sum / n_steps as f64)
        })
        .collect();
    if per_trial.iter().any(|x| x.is_none()) {
        return Ok(LyapunovEstimate {
            alpha: f64::NEG_INFINITY,
            stderr: 0.0,
            trials: per_trial.iter().map(|x| x.unwrap_or(f64::NEG_INFINITY)).collect(),
            hit_zero: true,
        });
    }
    let trials: Vec<f64> = per_trial.into_iter().flatten().collect();
    let est = stats::mean_stderr(&trials);
    Ok(LyapunovEstimate {
        alpha: est.mean,
        stderr: est.stderr,
        trials,
        hit_zero: false,
    })
}

/// `k(s) = Σ w_i |a_i|^s` for `d = 1` (with `0^0 = 1`).
pub fn exact_k_d1<T: Real>(mu: &LinearMeasure<T>, s: f64) -> Result<f64, SpectralError> {
    if mu.dim() != 1 {
        return Err(SpectralError::WrongDimension {
            expected: 1,
            got: mu.dim(),
        });
    }
    if !(s >= 0.0) {
        return Err(SpectralError::InvalidParameter(format!("s must be ≥ 0, got {s}")));
    }
    Ok(mu
        .atoms()
        .iter()
        .map(|(w, a)| w.to_f64_lossy() * a[(0, 0)].to_f64_lossy().abs().powf(s))
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KEstimate {
    pub s: f64,
    pub k: f64,
    pub stderr: f64,
}

impl KEstimate {
    fn exact(s: f64, k: f64) -> Self {
        Self { s, k, stderr: 0.0 }
    }

    /// Standard error of `log k`.
    pub fn log_stderr(&self) -> f64 {
        if self.k > 0.0 {
            self.stderr / self.k
        } else {
            f64::INFINITY
        }
    }
}

/// How the particle directions are initialized.
#[derive(Debug, Clone, PartialEq)]
pub enum ParticleInit<T> {
    /// Uniform on the sphere, from the seeded direction stream.
    Uniform,
    /// Uniform directions reflected into `{x : ⟨u, x⟩ ≥ 0}`.
    HalfSpace(Vec<T>),
    /// Explicit directions (one per particle).
    Explicit(Vec<Vec<T>>),
}

/// Weighted particle cloud on the unit sphere (weights are normalized to sum 1).
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleCloud<T> {
    dim: usize,
    dirs: Vec<T>,
    weights: Vec<f64>,
}

impl<T: Real> ParticleCloud<T> {
    pub fn new(dim: usize, n: usize, init: &ParticleInit<T>, seed: Seed) -> Result<Self, SpectralError> {
        let directions: Vec<Vec<T>> = match init {
            ParticleInit::Uniform => initial_directions(dim, n, seed),
            ParticleInit::HalfSpace(u) => {
                if u.len() != dim {
                    return Err(SpectralError::InvalidParameter("half-space normal has wrong length".into()));
                }
                initial_directions(dim, n, seed)
                    .into_iter()
                    .map(|v| {
                        if linalg::dot(&v, u) < T::zero() {
                            v.into_iter().map(|x| -x).collect()
                        } else {
                            v
                        }
                    })
                    .collect()
            }
            ParticleInit::Explicit(v) => {
                if v.len() != n || v.iter().any(|x| x.len() != dim) {
                    return Err(SpectralError::InvalidParameter("explicit directions do not match n × d".into()));
                }
                v.clone()
            }
        };
        let mut dirs = Vec::with_capacity(n * dim);
        for mut v in directions {
            if linalg::normalize(&mut v) == T::zero() {
                return Err(SpectralError::InvalidParameter("zero initial direction".into()));
            }
            dirs.extend(v);
        }
        Ok(Self {
            dim,
            dirs,
            weights: vec![1.0 / n as f64; n],
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn direction(&self, j: usize) -> &[T] {
        &self.dirs[j * self.dim..(j + 1) * self.dim]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn effective_sample_size(&self) -> f64 {
        1.0 / self.weights.iter().map(|w| w * w).sum::<f64>()
    }

    /// One application of the weighted transfer step; returns `log(total weight)`
    /// (weights are renormalized afterwards).
    fn step(&mut self, mu: &LinearMeasure<T>, s: f64, seed: Seed, step: usize) -> Result<f64, SpectralError> {
        let d = self.dim;
        self.dirs
            .par_chunks_mut(BLOCK * d)
            .zip(self.weights.par_chunks_mut(BLOCK))
            .enumerate()
            .for_each(|(b, (dirs, weights))| {
                let mut rng = seed.stream(StreamOp::KEstimate, step as u64, b as u64);
                let mut v = vec![T::zero(); d];
                for (u, w) in dirs.chunks_mut(d).zip(weights.iter_mut()) {
                    let a = mu.sample_matrix(&mut rng);
                    a.mul_vec_into(u, &mut v);
                    let n = linalg::norm(&v);
                    if n == T::zero() {
                        // killed; direction kept so the slot stays valid until resampling
                        *w = 0.0;
                        continue;
                    }
                    *w *= n.to_f64_lossy().powf(s);
                    for (ui, &vi) in u.iter_mut().zip(&v) {
                        *ui = vi / n;
                    }
                }
            });
        let total: f64 = self.weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(SpectralError::DegenerateParticles { step });
        }
        self.weights.iter_mut().for_each(|w| *w /= total);
        Ok(total.ln())
    }

    /// Systematic resampling to uniform weights.
    pub fn resample(&mut self, seed: Seed, tag: u64) {
        let n = self.len();
        let d = self.dim;
        let mut rng = seed.stream(StreamOp::Resample, tag, 0);
        let u0: f64 = rng::uniform(&mut rng);
        let mut new_dirs = Vec::with_capacity(self.dirs.len());
        let mut cum = 0.0;
        let mut j = 0usize;
        for i in 0..n {
            let pos = (u0 + i as f64) / n as f64;
            while j + 1 < n && cum + self.weights[j] <= pos {
                cum += self.weights[j];
                j += 1;
            }
            new_dirs.extend_from_slice(&self.dirs[j * d..(j + 1) * d]);
        }
        self.dirs = new_dirs;
        self.weights = vec![1.0 / n as f64; n];
    }

    /// Weighted histogram of the directions.
    pub fn histogram(&self) -> SphereHistogram {
        let binning = SphereBinning::for_dim(self.dim);
        let dirs: Vec<Vec<f64>> = (0..self.len())
            .map(|j| self.direction(j).iter().map(|x| x.to_f64_lossy()).collect())
            .collect();
        SphereHistogram::from_weighted(binning, dirs.iter().map(|v| v.as_slice()).zip(self.weights.iter().copied()))
    }
}

/// Runs the weighted power iteration and returns the per-step log growth series.
fn run_power_iteration<T: Real>(
    mu: &LinearMeasure<T>,
    s: f64,
    params: &PowerIterParams,
    seed: Seed,
    cloud: &mut ParticleCloud<T>,
) -> Result<Vec<f64>, SpectralError> {
    let mut growth = Vec::with_capacity(params.n_steps);
    for step in 0..params.n_steps {
        growth.push(cloud.step(mu, s, seed, step)?);
        if cloud.effective_sample_size() < params.resample_threshold * cloud.len() as f64 {
            cloud.resample(seed, step as u64);
        }
    }
    Ok(growth)
}

/// Estimate of `k(s)`; exact for `d = 1`, particle power iteration otherwise.
pub fn k_estimate<T: Real>(
    mu: &LinearMeasure<T>,
    s: f64,
    params: &PowerIterParams,
    seed: Seed,
) -> Result<KEstimate, SpectralError> {
    if mu.dim() == 1 {
        return Ok(KEstimate::exact(s, exact_k_d1(mu, s)?));
    }
    k_estimate_from(mu, s, params, seed, &ParticleInit::Uniform)
}

/// Particle estimate of `k(s)` with a chosen initialization (any dimension).
pub fn k_estimate_from<T: Real>(
    mu: &LinearMeasure<T>,
    s: f64,
    params: &PowerIterParams,
    seed: Seed,
    init: &ParticleInit<T>,
) -> Result<KEstimate, SpectralError> {
    params.validate()?;
    if !(s >= 0.0) || !s.is_finite() {
        return Err(SpectralError::InvalidParameter(format!("s must be finite and ≥ 0, got {s}")));
    }
    if s == 0.0 {
        // every multiplier is ‖a u‖⁰ = 1
        return Ok(KEstimate::exact(0.0, 1.0));
    }
    let mut cloud = ParticleCloud::new(mu.dim(), params.n_particles, init, seed)?;
    let growth = run_power_iteration(mu, s, params, seed, &mut cloud)?;
    let est = stats::batch_means(&growth[params.burn_in..], GROWTH_BATCHES);
    let k = est.mean.exp();
    Ok(KEstimate {
        s,
        k,
        stderr: k * est.stderr,
    })
}

/// `k` on a grid of `s` values, with common random numbers across the grid.
pub fn k_curve<T: Real>(
    mu: &LinearMeasure<T>,
    s_grid: &[f64],
    params: &PowerIterParams,
    seed: Seed,
) -> Result<Vec<KEstimate>, SpectralError> {
    s_grid.iter().map(|&s| k_estimate(mu, s, params, seed)).collect()
}

/// Interior grid indices where `log k` rises above its chord by more than three
/// combined standard errors.
pub fn log_convexity_violations(grid: &[KEstimate]) -> Vec<usize> {
    let mut out = Vec::new();
    for i in 1..grid.len().saturating_sub(1) {
        let (l, m, r) = (grid[i - 1], grid[i], grid[i + 1]);
        if !(l.k > 0.0 && m.k > 0.0 && r.k > 0.0) {
            continue;
        }
        let t = (m.s - l.s) / (r.s - l.s);
        let chord = (1.0 - t) * l.k.ln() + t * r.k.ln();
        let se = (l.log_stderr().powi(2) + m.log_stderr().powi(2) + r.log_stderr().powi(2)).sqrt();
        if m.k.ln() > chord + 3.0 * se + 1e-12 {
            out.push(i);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSolution {
    pub chi: f64,
    /// `k` evaluated at `chi`.
    pub k_at_chi: KEstimate,
    /// Final bracket `[lo, hi]`.
    pub bracket: (f64, f64),
    /// Number of `k` evaluations spent.
    pub evaluations: usize,
    /// `|k(chi) − 1| ≤ max(2·stderr, 1e−4)`.
    pub within_tolerance: bool,
}

impl ChiSolution {
    pub fn residual(&self) -> f64 {
        (self.k_at_chi.k - 1.0).abs()
    }
}

/// Coarse grid points scanned before bisection.
const CHI_GRID: usize = 40;
/// Bisection stops at this bracket width.
const CHI_BRACKET_TOL: f64 = 1e-4;
/// Particle count may grow by at most this factor when the guard band straddles 1.
const MAX_PARTICLE_GROWTH: usize = 8;

/// Positive root of `k(s) = 1`.
pub fn chi_solve<T: Real>(
    mu: &LinearMeasure<T>,
    lyapunov: &LyapunovEstimate,
    s_max: f64,
    params: &PowerIterParams,
    seed: Seed,
) -> Result<ChiSolution, SpectralError> {
    if !lyapunov.is_negative() {
        return Err(SpectralError::AlphaNotNegative {
            alpha: lyapunov.alpha,
            stderr: lyapunov.stderr,
        });
    }
    if !(s_max > 0.0) || !s_max.is_finite() {
        return Err(SpectralError::InvalidParameter("s_max must be positive and finite".into()));
    }
    if mu.dim() == 1 {
        return chi_solve_exact(mu, s_max);
    }
    params.validate()?;
    let step = s_max / CHI_GRID as f64;
    let mut evaluations = 0;
    let eval = |s: f64, p: &PowerIterParams, evaluations: &mut usize| {
        *evaluations += 1;
        k_estimate(mu, s, p, seed)
    };

    // bracket: last grid point below 1 and first grid point above 1
    let mut lo = 0.0;
    let mut hi = None;
    let mut last = KEstimate::exact(0.0, 1.0);
    let mut prev = last;
    for i in 1..=CHI_GRID {
        let s = step * i as f64;
        let est = eval(s, params, &mut evaluations)?;
        prev = last;
        last = est;
        match guard(&est) {
            Side::Above => {
                hi = Some(s);
                break;
            }
            Side::Below => lo = s,
            Side::Straddle => {
                if est.k >= 1.0 {
                    hi = Some(s);
                    break;
                }
                lo = s;
            }
        }
    }
    let Some(mut hi) = hi else {
        let slope = if last.k > 0.0 && prev.k > 0.0 {
            (last.k.ln() - prev.k.ln()) / (last.s - prev.s)
        } else {
            f64::NEG_INFINITY
        };
        let reason = if slope <= 0.0 {
            "log k still decreasing at the cap: k(s) < 1 for all s, condition k → ∞ fails"
        } else {
            "log k increasing at the cap: raise s_max"
        };
        return Err(SpectralError::NoRootBelowCap {
            s_max,
            k_at_cap: last.k,
            slope,
            reason: reason.into(),
        });
    };

    let mut current = *params;
    let max_particles = params.n_particles * MAX_PARTICLE_GROWTH;
    while hi - lo > CHI_BRACKET_TOL {
        let mid = 0.5 * (lo + hi);
        let est = eval(mid, &current, &mut evaluations)?;
        match guard(&est) {
            Side::Above => hi = mid,
            Side::Below => lo = mid,
            Side::Straddle if current.n_particles < max_particles => {
                current = current.with_particles(current.n_particles * 2);
                continue;
            }
            // inside the noise floor at the particle cap: follow the point estimate
            Side::Straddle => {
                if est.k >= 1.0 {
                    hi = mid
                } else {
                    lo = mid
                }
            }
        }
    }
    let chi = 0.5 * (lo + hi);
    let k_at_chi = eval(chi, &current, &mut evaluations)?;
    let within_tolerance = (k_at_chi.k - 1.0).abs() <= (2.0 * k_at_chi.stderr).max(1e-4);
    Ok(ChiSolution {
        chi,
        k_at_chi,
        bracket: (lo, hi),
        evaluations,
        within_tolerance,
    })
}

enum Side {
    Above,
    Below,
    Straddle,
}

fn guard(est: &KEstimate) -> Side {
    if est.k - 3.0 * est.stderr > 1.0 {
        Side::Above
    } else if est.k + 3.0 * est.stderr < 1.0 {
        Side::Below
    } else {
        Side::Straddle
    }
}

fn chi_solve_exact<T: Real>(mu: &LinearMeasure<T>, s_max: f64) -> Result<ChiSolution, SpectralError> {
    let k = |s: f64| exact_k_d1(mu, s);
    let step = s_max / CHI_GRID as f64;
    let mut evaluations = 0;
    let mut lo = 0.0;
    let mut hi = None;
    let mut last = (0.0, 1.0);
    let mut prev = last;
    for i in 1..=CHI_GRID {
        let s = step * i as f64;
        let v = k(s)?;
        evaluations += 1;
        prev = last;
        last = (s, v);
        if v > 1.0 {
            hi = Some(s);
            break;
        }
        lo = s;
    }
    let Some(mut hi) = hi else {
        let slope = if last.1 > 0.0 && prev.1 > 0.0 {
            (last.1.ln() - prev.1.ln()) / (last.0 - prev.0)
        } else {
            f64::NEG_INFINITY
        };
        let reason = if slope <= 0.0 {
            "log k still decreasing at the cap: k(s) < 1 for all s, condition k → ∞ fails"
        } else {
            "log k increasing at the cap: raise s_max"
        };
        return Err(SpectralError::NoRootBelowCap {
            s_max,
            k_at_cap: last.1,
            slope,
            reason: reason.into(),
        });
    };
    // exact k is deterministic: bisect to float resolution
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        evaluations += 1;
        if k(mid)? > 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let chi = 0.5 * (lo + hi);
    let k_at_chi = KEstimate::exact(chi, k(chi)?);
    Ok(ChiSolution {
        chi,
        k_at_chi,
        bracket: (lo, hi),
        evaluations,
        within_tolerance: (k_at_chi.k - 1.0).abs() <= 1e-4,
    })
}

/// Particle approximation of the stationary direction measure `ν₁` of the `s = χ`
/// transfer operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionMeasure {
    pub dim: usize,
    /// Unit vectors with uniform weights.
    pub particles: Vec<Vec<f64>>,
    pub histogram: SphereHistogram,
    /// TV distance moved by one further transfer step.
    pub residual: f64,
}

pub fn stationary_direction_measure<T: Real>(
    mu: &LinearMeasure<T>,
    chi: f64,
    params: &PowerIterParams,
    seed: Seed,
    init: &ParticleInit<T>,
) -> Result<DirectionMeasure, SpectralError> {
    params.validate()?;
    if !(chi > 0.0) {
        return Err(SpectralError::InvalidParameter("chi must be positive".into()));
    }
    let mut cloud = ParticleCloud::new(mu.dim(), params.n_particles, init, seed)?;
    run_power_iteration(mu, chi, params, seed, &mut cloud)?;
    cloud.resample(seed, params.n_steps as u64);
    let histogram = cloud.histogram();
    let mut next = cloud.clone();
    next.step(mu, chi, seed.derive(StreamOp::Residual as u64), 0)?;
    let residual = histogram
        .tv_distance(&next.histogram())
        .expect("same binning by construction");
    if residual > DIRECTION_RESIDUAL_TOL {
        return Err(SpectralError::NonStationaryResidual { residual });
    }
    Ok(DirectionMeasure {
        dim: mu.dim(),
        particles: (0..cloud.len())
            .map(|j| cloud.direction(j).iter().map(|x| x.to_f64_lossy()).collect())
            .collect(),
        histogram,
        residual,
    })
}

/// Summary of the spectral stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralProfile {
    #[serde(with = "nonfinite")]
    pub alpha: f64,
    pub alpha_stderr: f64,
    pub k_grid: Vec<KEstimate>,
    /// Always `+inf`: every moment of a finitely supported law is finite.
    #[serde(with = "nonfinite")]
    pub s_infinity: f64,
    pub chi: Option<ChiSolution>,
    pub nu1: Option<DirectionMeasure>,
    /// `None` when no structural scan was run.
    pub ip_witnessed: Option<bool>,
}
