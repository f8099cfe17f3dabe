//! Stage orchestration shared by the subcommands.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use kesten_core::io::{to_json_pretty, write_atomic};
use kesten_core::model::{AffineMeasure, CoefficientLaw, ModelError};
use kesten_core::simulate::{self, SampleSidecar, StationarityResult, StationarySampleSet};
use kesten_core::spectral::{
    self, ChiSolution, DirectionMeasure, KEstimate, LyapunovEstimate, ParticleInit, SpectralError, SpectralProfile,
};
use kesten_core::structure::{self, ConeCase, D1Case, Side, StructureReport};
use kesten_core::tails::{self, AngularCase, AngularComparison, MellinRow, TailReport};
use kesten_core::{AffineMeasure64, Seed};
use serde::Serialize;
use serde_json::json;

use crate::config::{ConfigError, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    InvalidConfig = 2,
    SpectralPrecondition = 3,
    CheckFailure = 4,
    Io = 5,
}

/// A stage failure with its exit status and machine-readable diagnostic.
#[derive(Debug, Clone)]
pub struct Failure {
    pub exit: Exit,
    pub stage: &'static str,
    pub code: String,
    pub message: String,
    pub detail: serde_json::Value,
}

impl Failure {
    pub fn new(exit: Exit, stage: &'static str, code: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            exit,
            stage,
            code: code.into(),
            message: message.into(),
            detail: serde_json::Value::Null,
        }
    }

    pub fn diagnostic(&self) -> serde_json::Value {
        json!({
            "status": "error",
            "exit_code": self.exit as i32,
            "stage": self.stage,
            "code": self.code,
            "message": self.message,
            "detail": self.detail,
        })
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::new(Exit::InvalidConfig, "config", e.code, e.message)
    }
}

fn model_failure(e: ModelError) -> Failure {
    Failure::new(Exit::InvalidConfig, "validate", e.code(), e.to_string())
}

/// Output directory with atomic writes; every error is an I/O failure of `stage`.
pub struct Out {
    dir: PathBuf,
}

impl Out {
    pub fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf() }
    }

    pub fn write(&self, stage: &'static str, name: &str, contents: &str) -> Result<(), Failure> {
        let io = |e: std::io::Error| Failure::new(Exit::Io, stage, "IoError", format!("{}: {e}", self.dir.join(name).display()));
        std::fs::create_dir_all(&self.dir).map_err(io)?;
        write_atomic(&self.dir.join(name), contents.as_bytes()).map_err(io)
    }

    pub fn json<S: Serialize>(&self, stage: &'static str, name: &str, value: &S) -> Result<(), Failure> {
        self.write(stage, name, &to_json_pretty(value))
    }
}

/// Wall-clock seconds per stage; written to their own file so the other outputs stay
/// byte-identical across runs.
#[derive(Debug, Default, Serialize)]
pub struct Durations(BTreeMap<String, f64>);

impl Durations {
    pub fn time<R>(&mut self, stage: &str, f: impl FnOnce() -> R) -> R {
        let t = Instant::now();
        let r = f();
        self.0.insert(stage.to_string(), t.elapsed().as_secs_f64());
        r
    }
}

/// Independent seeds per stage, so running one stage alone reproduces its part of a
/// full report.
pub fn stage_seed(master: Seed, stage: u64) -> Seed {
    master.derive(0x5747_0000 + stage)
}

/// Parses the measure and enforces the structural invariants.
pub fn parse_measure(cfg: &RunConfig) -> Result<AffineMeasure64, Failure> {
    AffineMeasure::from_json_file(&cfg.measure).map_err(model_failure)
}

/// Structural invariants plus the no-common-fixed-point hypothesis.
pub fn load_measure(cfg: &RunConfig) -> Result<AffineMeasure64, Failure> {
    let eta = parse_measure(cfg)?;
    eta.validate().map_err(model_failure)?;
    Ok(eta)
}

pub fn validation_summary(eta: &AffineMeasure64) -> serde_json::Value {
    json!({
        "status": "valid",
        "dimension": eta.dim(),
        "atoms": eta.len(),
        "max_translation_norm": eta.max_translation_norm(),
    })
}

fn spectral_failure(e: &SpectralError) -> Failure {
    Failure::new(Exit::SpectralPrecondition, "spectral", e.code(), e.to_string())
}

/// Result of the spectral stage; `error` is set when chi or nu1 is unavailable.
pub struct SpectralOutcome {
    pub profile: SpectralProfile,
    pub error: Option<SpectralError>,
    pub warnings: Vec<String>,
}

impl SpectralOutcome {
    pub fn chi(&self) -> Option<&ChiSolution> {
        self.profile.chi.as_ref()
    }
}

/// How to seed the direction particles for `ν₁`.
pub fn default_init(eta: &AffineMeasure64) -> ParticleInit<f64> {
    let nonneg = eta.atoms().iter().all(|a| a.map.a[(0, 0)] >= 0.0);
    if eta.dim() == 1 && nonneg {
        ParticleInit::HalfSpace(vec![1.0])
    } else {
        ParticleInit::Uniform
    }
}

pub fn run_spectral(eta: &AffineMeasure64, cfg: &RunConfig, seed: Seed, init: &ParticleInit<f64>) -> Result<SpectralOutcome, Failure> {
    let mu = eta.linear_projection();
    let s = &cfg.spectral;
    let params = s.power_params();
    let seed = stage_seed(seed, 1);
    let fail = |e: SpectralError| spectral_failure(&e);
    let lyap: LyapunovEstimate = spectral::top_lyapunov(&mu, s.lyapunov_steps, s.lyapunov_trials, seed).map_err(fail)?;
    let k_grid: Vec<KEstimate> = spectral::k_curve(&mu, &s.s_grid, &params, seed).map_err(fail)?;
    let mut profile = SpectralProfile {
        alpha: lyap.alpha,
        alpha_stderr: lyap.stderr,
        k_grid,
        s_infinity: f64::INFINITY,
        chi: None,
        nu1: None,
        ip_witnessed: None,
    };
    let chi = match spectral::chi_solve(&mu, &lyap, s.s_max, &params, seed) {
        Ok(c) => c,
        Err(e) => return Ok(SpectralOutcome { profile, error: Some(e), warnings: Vec::new() }),
    };
    let nu1: Result<DirectionMeasure, SpectralError> = spectral::stationary_direction_measure(&mu, chi.chi, &params, seed, init);
    profile.chi = Some(chi);
    match nu1 {
        Ok(n) => {
            profile.nu1 = Some(n);
            Ok(SpectralOutcome { profile, error: None, warnings: Vec::new() })
        }
        Err(e) => Ok(SpectralOutcome { profile, error: Some(e), warnings: Vec::new() }),
    }
}

pub fn k_curve_csv(profile: &SpectralProfile) -> String {
    kesten_core::io::csv_string(
        &["s", "k", "stderr"],
        profile.k_grid.iter().map(|k| {
            [k.s, k.k, k.stderr].map(kesten_core::io::fmt_f64)
        }),
    )
}

pub fn write_spectral(out: &Out, outcome: &SpectralOutcome) -> Result<(), Failure> {
    let mut value = serde_json::to_value(&outcome.profile).expect("profile serializes");
    if let Some(e) = &outcome.error {
        value["error"] = json!({ "code": e.code(), "message": e.to_string() });
    }
    value["warnings"] = json!(outcome.warnings);
    out.json("spectral", "spectral.json", &value)?;
    out.write("spectral", "k_curve.csv", &k_curve_csv(&outcome.profile))
}

pub fn require_chi(outcome: &SpectralOutcome) -> Result<f64, Failure> {
    match (&outcome.profile.chi, &outcome.error) {
        (Some(c), _) => Ok(c.chi),
        (None, Some(e)) => Err(spectral_failure(e)),
        (None, None) => Err(Failure::new(Exit::SpectralPrecondition, "spectral", "NoChi", "chi unavailable")),
    }
}

pub fn run_sample(eta: &AffineMeasure64, cfg: &RunConfig, seed: Seed) -> Result<StationarySampleSet<f64>, Failure> {
    let p = &cfg.sample;
    simulate::sample_stationary(eta, p.n_samples, p.tol, p.max_depth, stage_seed(seed, 2))
        .map_err(|e| Failure::new(Exit::CheckFailure, "sample", e.code(), e.to_string()))
}

pub fn write_samples(out: &Out, set: &StationarySampleSet<f64>) -> Result<(), Failure> {
    out.write("sample", "samples.csv", &set.samples.to_csv())?;
    let sidecar: SampleSidecar = set.sidecar();
    out.json("sample", "samples.json", &sidecar)
}

fn tails_failure(e: tails::TailError) -> Failure {
    Failure::new(Exit::CheckFailure, "tails", e.code(), e.to_string())
}

/// Default directions: `±e_i`.
pub fn axis_directions(d: usize) -> Vec<Vec<f64>> {
    (0..d)
        .flat_map(|i| {
            [1.0, -1.0].map(|s| {
                let mut u = vec![0.0; d];
                u[i] = s;
                u
            })
        })
        .collect()
}

/// Tail report plus the directional tails that came back empty (compact side).
pub struct TailsOutcome {
    pub report: TailReport,
    pub empty_directions: Vec<Vec<f64>>,
    pub mellin: Option<Vec<MellinRow>>,
}

pub fn run_tails(eta: &AffineMeasure64, cfg: &RunConfig, set: &StationarySampleSet<f64>, chi: f64, seed: Seed) -> Result<TailsOutcome, Failure> {
    let t = &cfg.tails;
    let samples = &set.samples;
    let grid = match &t.t_grid {
        Some(g) => g.clone(),
        None => tails::quantile_t_grid(samples, t.t_quantiles.0, t.t_quantiles.1, t.t_points).map_err(tails_failure)?,
    };
    let norms = samples.norms();
    let chi_hill = tails::hill_estimator(&norms, cfg.k_order()).map_err(tails_failure)?;
    let radial_curve = tails::radial_homogeneity(samples, chi, &grid).map_err(tails_failure)?;
    let directions = t.directions.clone().unwrap_or_else(|| axis_directions(eta.dim()));
    let mut directional = Vec::new();
    let mut empty_directions = Vec::new();
    for u in directions {
        match tails::directional_tail(samples, &u, chi, &grid) {
            Ok(d) => directional.push(d),
            Err(tails::TailError::EmptyUpperTail { .. }) => empty_directions.push(u),
            Err(e) => return Err(tails_failure(e)),
        }
    }
    let angular = tails::angular_measure(samples, t.threshold_quantile).map_err(tails_failure)?;
    let positive = eta.atoms().iter().all(|a| a.map.a[(0, 0)] > 0.0);
    let mellin = if eta.dim() == 1 && positive {
        let s_list: Vec<f64> = t.mellin_fractions.iter().map(|f| f * chi).collect();
        Some(tails::mellin_identity_check(eta, &s_list, samples, chi, stage_seed(seed, 3)).map_err(tails_failure)?)
    } else {
        None
    };
    Ok(TailsOutcome {
        report: TailReport {
            chi,
            chi_hill,
            radial_curve,
            directional,
            angular,
            threshold_quantile: t.threshold_quantile,
        },
        empty_directions,
        mellin,
    })
}

pub fn write_tails(out: &Out, t: &TailsOutcome) -> Result<(), Failure> {
    out.json(
        "tails",
        "tails.json",
        &json!({
            "report": t.report,
            "empty_directions": t.empty_directions,
            "mellin": t.mellin,
        }),
    )?;
    out.write("tails", "radial.csv", &t.report.radial_csv())?;
    out.write("tails", "directional.csv", &t.report.directional_csv())?;
    out.write("tails", "angular.csv", &t.report.angular.to_csv())
}

pub fn run_structure(eta: &AffineMeasure64, cfg: &RunConfig) -> Result<StructureReport, Failure> {
    structure::structure_report(eta, &cfg.structure.params())
        .map_err(|e| Failure::new(Exit::CheckFailure, "structure", e.code(), e.to_string()))
}

pub fn write_structure(out: &Out, r: &StructureReport) -> Result<(), Failure> {
    out.json("structure", "structure.json", r)?;
    out.write("structure", "fixed_points.csv", &r.fixed_points_csv())
}

/// One named invariant check: the measured statistic is kept apart from the verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub statistic: f64,
    pub threshold: String,
    pub pass: bool,
}

fn check(name: &str, statistic: f64, threshold: impl Into<String>, pass: bool) -> Check {
    Check {
        name: name.into(),
        statistic,
        threshold: threshold.into(),
        pass,
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub tool_version: &'static str,
    pub config: RunConfig,
    pub spectral: SpectralProfile,
    pub samples: SampleSidecar,
    pub stationarity: StationarityResult,
    pub moments: serde_json::Value,
    pub tails: serde_json::Value,
    pub angular_comparison: Option<AngularComparison>,
    pub structure: StructureReport,
    pub checks: Vec<Check>,
    pub all_pass: bool,
}

pub const MOMENT_PREFIXES: [usize; 3] = [1_000, 10_000, 100_000];

/// Runs every stage and evaluates the invariant checks.
pub fn run_report(eta: &AffineMeasure64, cfg: &RunConfig, seed: Seed, durations: &mut Durations, out: &Out) -> Result<RunReport, Failure> {
    let structure = durations.time("structure", || run_structure(eta, cfg))?;
    write_structure(out, &structure)?;
    // Case II: seed ν₁ in the half-space of the invariant cone
    let init = match structure.cone.as_ref().and_then(|c| c.separating.clone()) {
        Some(u) => ParticleInit::HalfSpace(u),
        None => default_init(eta),
    };
    let spectral = durations.time("spectral", || run_spectral(eta, cfg, seed, &init))?;
    write_spectral(out, &spectral)?;
    let chi = require_chi(&spectral)?;
    if let Some(e) = &spectral.error {
        return Err(spectral_failure(e));
    }
    let set = durations.time("sample", || run_sample(eta, cfg, seed))?;
    write_samples(out, &set)?;
    let stationarity = durations
        .time("stationarity", || simulate::stationarity_check(&set.samples, eta, stage_seed(seed, 4)))
        .map_err(|e| Failure::new(Exit::CheckFailure, "sample", e.code(), e.to_string()))?;
    let tails_out = durations.time("tails", || run_tails(eta, cfg, &set, chi, seed))?;
    write_tails(out, &tails_out)?;

    let mut checks = Vec::new();
    let p = &spectral.profile;
    checks.push(check("alpha_negative", p.alpha + 3.0 * p.alpha_stderr, "< 0", p.alpha + 3.0 * p.alpha_stderr < 0.0));
    if let Some(k0) = p.k_grid.iter().find(|k| k.s == 0.0) {
        checks.push(check("k_at_zero_is_one", k0.k, "== 1", k0.k == 1.0));
    }
    let violations = spectral::log_convexity_violations(&p.k_grid);
    checks.push(check("log_convexity", violations.len() as f64, "== 0 violations", violations.is_empty()));
    let c = p.chi.as_ref().expect("chi present");
    checks.push(check(
        "chi_residual",
        c.residual(),
        format!("<= {:e}", (2.0 * c.k_at_chi.stderr).max(1e-4)),
        c.within_tolerance,
    ));
    let nu1 = p.nu1.as_ref().expect("nu1 present");
    checks.push(check(
        "nu1_residual",
        nu1.residual,
        format!("<= {}", spectral::DIRECTION_RESIDUAL_TOL),
        nu1.residual <= spectral::DIRECTION_RESIDUAL_TOL,
    ));
    checks.push(check(
        "truncation_failures",
        set.failure_fraction(),
        format!("<= {}", simulate::MAX_FAILURE_FRACTION),
        set.failure_fraction() <= simulate::MAX_FAILURE_FRACTION,
    ));
    checks.push(check(
        "stationarity_ks",
        stationarity.statistic,
        format!("< {}", stationarity.threshold),
        stationarity.pass,
    ));
    let t = &tails_out.report;
    let hill_rel = (t.chi_hill.chi_hat - chi).abs() / chi;
    checks.push(check("hill_vs_chi", hill_rel, "<= 0.10 relative", hill_rel <= 0.10));
    checks.push(check("radial_flatness", t.radial_curve.flatness, "<= 0.25", t.radial_curve.flatness <= 0.25));
    let worst_fp = structure
        .fixed_points
        .iter()
        .map(|f| f.residual / (1.0 + kesten_core::linalg::norm(&f.point)))
        .fold(0.0, f64::max);
    checks.push(check("fixed_point_residuals", worst_fp, "<= 1e-6 (relative to 1 + |x|)", worst_fp <= 1e-6));
    if eta.dim() > 1 {
        let mu = eta.linear_projection();
        let worst = structure
            .proximal_witnesses
            .iter()
            .map(|w| eigen_residual(&mu, w))
            .fold(0.0, f64::max);
        checks.push(check("proximal_eigen_residuals", worst, "<= 1e-8 (relative to |lambda|)", worst <= 1e-8));
    }
    if let Some(rows) = &tails_out.mellin {
        for r in rows {
            checks.push(check(
                &format!("mellin_identity_s={:.4}", r.s),
                r.residual.abs(),
                format!("<= 3 * {:e}", r.stderr),
                r.pass,
            ));
        }
    }
    let positive_dirs: Vec<&tails::DirectionalTail> = t.directional.iter().filter(|d| d.is_positive()).collect();

    let angular_comparison = if eta.dim() == 1 {
        let d1 = structure.d1.as_ref().expect("d = 1 classification");
        let plus = positive_dirs.iter().any(|d| d.u[0] > 0.0);
        let minus = positive_dirs.iter().any(|d| d.u[0] < 0.0);
        let (want_plus, want_minus) = match d1.case {
            D1Case::I | D1Case::II1 => (true, true),
            D1Case::II2(Side::PlusInfinity) => (true, false),
            D1Case::II2(Side::MinusInfinity) => (false, true),
            D1Case::Undetermined | D1Case::NotApplicable => (false, false),
        };
        checks.push(check(
            "d1_case_matches_directional_tails",
            (u8::from(plus) * 2 + u8::from(minus)) as f64,
            format!("+tail {want_plus}, -tail {want_minus}"),
            plus == want_plus && minus == want_minus,
        ));
        let case = if d1.case == D1Case::I { AngularCase::CaseI } else { AngularCase::CaseII };
        let cmp = tails::compare_angular_to_nu1(&t.angular.histogram, &nu1.histogram, case).map_err(tails_failure)?;
        if let D1Case::II2(side) = d1.case {
            // ν₁⁺ is seeded on the positive side
            let (main, other) = (cmp.c_plus.unwrap_or(0.0), cmp.c_minus.unwrap_or(0.0));
            let ratio = if side == Side::PlusInfinity { other / main } else { main / other };
            checks.push(check("case_II2_single_sided_angular", ratio, "< 0.01", ratio < 0.01));
        }
        Some(cmp)
    } else {
        let cone = structure.cone_classification;
        checks.push(check(
            "cone_classified",
            f64::from(u8::from(cone != ConeCase::Undetermined)),
            "CaseI or CaseII",
            cone != ConeCase::Undetermined,
        ));
        let case = if cone == ConeCase::CaseII { AngularCase::CaseII } else { AngularCase::CaseI };
        let cmp = tails::compare_angular_to_nu1(&t.angular.histogram, &nu1.histogram, case).map_err(tails_failure)?;
        if cone == ConeCase::CaseI {
            let occupied = t.angular.histogram.occupied_bins();
            let bins = t.angular.histogram.masses.len();
            checks.push(check("angular_support_all_bins", occupied as f64, format!("== {bins}"), occupied == bins));
            checks.push(check("angular_vs_nu1_tv", cmp.tv, "< 0.1", cmp.tv < 0.1));
            let all_dirs = positive_dirs.len() == t.directional.len() && tails_out.empty_directions.is_empty();
            checks.push(check(
                "directional_tails_positive",
                positive_dirs.len() as f64,
                format!("== {}", t.directional.len() + tails_out.empty_directions.len()),
                all_dirs,
            ));
        }
        Some(cmp)
    };

    let moments = {
        let half = simulate::prefix_moments(&set.samples, chi / 2.0, &MOMENT_PREFIXES);
        let over = simulate::prefix_moments(&set.samples, 1.5 * chi, &MOMENT_PREFIXES);
        json!({
            "prefixes": MOMENT_PREFIXES,
            "half_chi": half,
            "half_chi_spread": simulate::relative_spread(&half),
            "one_and_half_chi": over,
            "one_and_half_chi_growth": over.last().unwrap() / over.first().unwrap() - 1.0,
            "duplicate_samples": simulate::duplicate_count(&set.samples),
        })
    };
    let all_pass = checks.iter().all(|c| c.pass);
    let mut spectral_profile = spectral.profile;
    spectral_profile.ip_witnessed = Some(match &structure.cone {
        Some(c) => c.ip_witnessed,
        None => !structure.proximal_witnesses.is_empty(),
    });
    Ok(RunReport {
        tool_version: env!("CARGO_PKG_VERSION"),
        config: cfg.clone(),
        spectral: spectral_profile,
        samples: set.sidecar(),
        stationarity,
        moments,
        tails: json!({
            "report": tails_out.report,
            "empty_directions": tails_out.empty_directions,
            "mellin": tails_out.mellin,
        }),
        angular_comparison,
        structure,
        checks,
        all_pass,
    })
}

fn eigen_residual(mu: &kesten_core::LinearMeasure64, w: &structure::ProximalWitness) -> f64 {
    let mut a = kesten_core::Matrix64::identity(mu.dim());
    for &i in &w.word {
        a = a.mul(mu.linear(i));
    }
    let av = a.mul_vec(&w.v);
    let r: f64 = av.iter().zip(&w.v).map(|(x, v)| (x - w.lambda * v).powi(2)).sum::<f64>().sqrt();
    r / w.lambda.abs()
}
