use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kesten_cli::config::RunConfig;
use kesten_cli::pipeline::{self, Durations, Exit, Failure, Out};
use kesten_core::Seed;

#[derive(Parser)]
#[command(name = "kesten", version, about = "Stationary laws and tails of random affine recursions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Parse and validate the measure.
    Validate,
    /// Lyapunov exponent, k(s), chi and nu1.
    Spectral,
    /// Draw from the stationary law.
    Sample,
    /// Tail estimates from a fresh sample.
    Tails,
    /// Fixed points, proximal words, cone and d = 1 classification.
    Structure,
    /// Every stage plus the checks table.
    Report,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::from(Exit::Ok as u8),
        Err(f) => {
            println!("{}", serde_json::to_string_pretty(&f.diagnostic()).expect("json"));
            eprintln!("kesten: {} failed: {} ({})", f.stage, f.message, f.code);
            ExitCode::from(f.exit as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| Failure::new(Exit::InvalidConfig, "config", "ThreadPool", e.to_string()))?;
    }
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Failure::new(Exit::InvalidConfig, "config", "MissingConfig", "--config is required"))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    // k, chi and nu1 only see the linear part, so a shared fixed point is a warning there
    let mut warnings = Vec::new();
    let eta = if cli.command == Command::Spectral {
        let eta = pipeline::parse_measure(&cfg)?;
        if let Err(e) = eta.validate() {
            warnings.push(format!("{}: {e}", e.code()));
        }
        eta
    } else {
        pipeline::load_measure(&cfg)?
    };
    if cli.command == Command::Validate {
        println!("{}", serde_json::to_string_pretty(&pipeline::validation_summary(&eta)).expect("json"));
        return Ok(());
    }
    let out_dir = cli.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("kesten-out"));
    let out = Out::new(&out_dir);
    let seed = Seed(cfg.seed);
    let mut durations = Durations::default();
    let result = match cli.command {
        Command::Validate => unreachable!(),
        Command::Spectral => {
            let mut o = durations.time("spectral", || pipeline::run_spectral(&eta, &cfg, seed, &pipeline::default_init(&eta)))?;
            o.warnings = warnings;
            pipeline::write_spectral(&out, &o)?;
            pipeline::require_chi(&o).map(|_| ())?;
            match &o.error {
                Some(e) => Err(Failure::new(Exit::SpectralPrecondition, "spectral", e.code(), e.to_string())),
                None => Ok(()),
            }
        }
        Command::Sample => {
            let set = durations.time("sample", || pipeline::run_sample(&eta, &cfg, seed))?;
            pipeline::write_samples(&out, &set)
        }
        Command::Tails => {
            let o = durations.time("spectral", || pipeline::run_spectral(&eta, &cfg, seed, &pipeline::default_init(&eta)))?;
            let chi = pipeline::require_chi(&o)?;
            let set = durations.time("sample", || pipeline::run_sample(&eta, &cfg, seed))?;
            let t = durations.time("tails", || pipeline::run_tails(&eta, &cfg, &set, chi, seed))?;
            pipeline::write_tails(&out, &t)
        }
        Command::Structure => {
            let r = durations.time("structure", || pipeline::run_structure(&eta, &cfg))?;
            pipeline::write_structure(&out, &r)
        }
        Command::Report => {
            let r = pipeline::run_report(&eta, &cfg, seed, &mut durations, &out)?;
            out.json("report", "report.json", &r)?;
            if r.all_pass {
                Ok(())
            } else {
                let failed: Vec<&str> = r.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
                let mut f = Failure::new(Exit::CheckFailure, "report", "CheckFailed", format!("failed checks: {}", failed.join(", ")));
                f.detail = serde_json::json!(failed);
                Err(f)
            }
        }
    };
    // the stage error wins over a failure to record timings
    let timing = out.json("durations", "durations.json", &durations);
    result.and(timing)
}
