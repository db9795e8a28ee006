use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zxperc::harness::{self, Experiment, ExperimentConfig, Stage};
use zxperc::Error;

#[derive(Parser)]
#[command(name = "zxperc", version, about = "Monitored Clifford circuits, ZX simplification and percolation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Overrides `master_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `workers`; 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
    /// Overrides `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// I₂ against p per size, and the crossing estimate.
    MiScan(RunArgs),
    /// P_path curves, threshold fits and extrapolation.
    PercScan(RunArgs),
    /// MI and percolation boundaries over an (r, p) grid.
    PhaseDiagram(RunArgs),
    /// Second-largest cluster curves and peak locations.
    Slc(RunArgs),
    /// Rewrite distance histograms.
    DistanceStats(RunArgs),
    /// Collapse scores of I₂ and P_path for several exponents.
    Collapse(RunArgs),
    /// Small-p phase boundary r_c(p) and its exponential fit.
    BoundaryFit(RunArgs),
    /// Re-derive a diagram stage from a circuit record or earlier dump.
    Replay {
        input: PathBuf,
        #[arg(long, value_parser = parse_stage)]
        stage: Stage,
        /// Reject inputs stamped by a different config.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the oracle suites.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_stage(s: &str) -> Result<Stage, String> {
    Stage::from_name(s).ok_or_else(|| format!("unknown stage `{s}` (raw, graphlike, simplified)"))
}

const INVALID_CONFIG: u8 = 1;
const RUNTIME_FAILURE: u8 = 2;
const SELFTEST_FAILURE: u8 = 3;

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Config { .. } => ExitCode::from(INVALID_CONFIG),
        _ => ExitCode::from(RUNTIME_FAILURE),
    }
}

fn load_config(path: &PathBuf, experiment: Option<Experiment>) -> Result<ExperimentConfig, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config {
        field: "$".into(),
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    ExperimentConfig::from_json(&text, experiment)
}

fn run(experiment: Experiment, args: RunArgs) -> ExitCode {
    let mut cfg = match load_config(&args.config, Some(experiment)) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    if let Some(o) = args.out {
        cfg.output_dir = o;
    }
    eprintln!("{} config {} seed {}", experiment.name(), &cfg.hash()[..12], cfg.master_seed);
    match harness::run_experiment(&cfg) {
        Ok(m) => {
            for f in &m.files {
                println!("{}\t{} rows", cfg.output_dir.join(&f.name).display(), f.rows);
            }
            println!("{}\tmanifest", cfg.output_dir.join("manifest.json").display());
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn replay(input: PathBuf, stage: Stage, config: Option<PathBuf>, seed: Option<u64>, out: Option<PathBuf>) -> ExitCode {
    let expected = match config {
        Some(path) => match load_config(&path, None) {
            Ok(mut c) => {
                if let Some(s) = seed {
                    c.master_seed = s;
                }
                Some(c.hash())
            }
            Err(e) => return fail(&e),
        },
        None => None,
    };
    let result = fs::read_to_string(&input)
        .map_err(Error::from)
        .and_then(|text| harness::replay(&text, stage, expected.as_deref()));
    let value = match result {
        Ok(v) => v,
        Err(e) => return fail(&e),
    };
    let text = serde_json::to_string_pretty(&value).expect("json serializes") + "\n";
    match out {
        Some(path) => match fs::write(&path, text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(&e.into()),
        },
        None => {
            print!("{text}");
            ExitCode::SUCCESS
        }
    }
}

fn selftest(seed: u64, workers: Option<usize>) -> ExitCode {
    let checks = match harness::with_workers(workers.unwrap_or(0), || harness::selftest(seed)) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let mut ok = true;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        ok &= c.passed;
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(SELFTEST_FAILURE)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { INVALID_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::MiScan(a) => run(Experiment::MiScan, a),
        Command::PercScan(a) => run(Experiment::PercScan, a),
        Command::PhaseDiagram(a) => run(Experiment::PhaseDiagram, a),
        Command::Slc(a) => run(Experiment::Slc, a),
        Command::DistanceStats(a) => run(Experiment::DistanceStats, a),
        Command::Collapse(a) => run(Experiment::Collapse, a),
        Command::BoundaryFit(a) => run(Experiment::BoundaryFit, a),
        Command::Replay {
            input,
            stage,
            config,
            seed,
            workers: _,
            out,
        } => replay(input, stage, config, seed, out),
        Command::Selftest { seed, workers, .. } => selftest(seed, workers),
    }
}
