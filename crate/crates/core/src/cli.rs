//! Command-line front end: `run`, `batch` and `oracle`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::experiment::{oracle_battery, run_batch, run_scenario, summarize, Algorithm};
use crate::model::GainModel;
use crate::report::{oracle_csv, write_batch, write_run};
use crate::scenario::ScenarioConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "udnsim", version, about = "Base-station sleeping simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one algorithm on one seeded scenario.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::Proposed)]
        algorithm: AlgorithmArg,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        svg: bool,
    },
    /// Run both algorithms over seeds 1..=K.
    Batch {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 50)]
        seeds: u64,
    },
    /// Compare the proposed heuristic with the exhaustive optimum on small instances.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        instances: u64,
        #[arg(long, default_value_t = 6)]
        bs: usize,
        /// UEs per instance (overrides --ues for this command).
        #[arg(long, default_value_t = 20)]
        instance_ues: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
pub struct Common {
    /// JSON scenario file; missing keys take their defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, env = "UDNSIM_OUT", default_value = "out")]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub gain: Option<GainArg>,
    #[arg(long)]
    pub ues: Option<usize>,
    /// Load threshold for the optional C5 check.
    #[arg(long)]
    pub tload: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum AlgorithmArg {
    Proposed,
    Baseline,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Proposed => Algorithm::Proposed,
            AlgorithmArg::Baseline => Algorithm::Baseline,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GainArg {
    Unit,
    Powerlaw,
}

impl Common {
    fn scenario(&self) -> Result<ScenarioConfig<f64>> {
        let mut cfg = match &self.config {
            Some(path) => ScenarioConfig::load(path)?,
            None => ScenarioConfig::default(),
        };
        if let Some(g) = self.gain {
            cfg.radio.gain_model = match g {
                GainArg::Unit => GainModel::UnitGain,
                GainArg::Powerlaw => GainModel::PowerLaw,
            };
        }
        if let Some(m) = self.ues {
            cfg.n_ue = m;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Outcome of a command that ran to completion.
#[derive(Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Violation(String),
}

pub fn execute(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::Run {
            common,
            algorithm,
            seed,
            svg,
        } => {
            let mut cfg = common.scenario()?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let algorithm = Algorithm::from(algorithm);
            let out = run_scenario(&cfg, algorithm, common.tload);
            write_run(&common.out, &cfg, algorithm, &out, svg)?;
            println!(
                "{} seed {}: {} -> {} active BSs, EE {:.6}, {} unserved",
                algorithm.as_str(),
                cfg.seed,
                out.initial.n_bs(),
                out.report.o2_active,
                out.report.o1_ee,
                out.connection.unserved.len()
            );
            if !out.report.all_ok() {
                let first = out
                    .report
                    .violations
                    .first()
                    .map(|v| v.detail.clone())
                    .unwrap_or_default();
                return Ok(Status::Violation(format!(
                    "{} constraint violation(s) in final state, first: {first}",
                    out.report.violations.len()
                )));
            }
            Ok(Status::Ok)
        }
        Command::Batch { common, seeds } => {
            if seeds == 0 {
                bail!("--seeds must be at least 1");
            }
            let cfg = common.scenario()?;
            let rows = run_batch(&cfg, seeds, common.tload);
            let summary = summarize(&rows);
            write_batch(&common.out, &rows, &summary)?;
            for (name, s) in [
                ("proposed", &summary.proposed),
                ("baseline", &summary.baseline),
            ] {
                println!(
                    "{name}: median final active {}, median convergence iteration {}, median final EE {:.6}",
                    s.median_final_active, s.median_convergence_iteration, s.median_final_ee
                );
            }
            let bad = rows.iter().filter(|r| !r.core_constraints_ok).count();
            if bad > 0 {
                return Ok(Status::Violation(format!(
                    "{bad} run(s) ended with constraint violations"
                )));
            }
            Ok(Status::Ok)
        }
        Command::Oracle {
            common,
            instances,
            bs,
            instance_ues,
            seed,
        } => {
            let cfg = common.scenario()?;
            let rows = oracle_battery(&cfg, bs, instance_ues, instances, seed)?;
            write_file(&common.out, "oracle.csv", &oracle_csv(&rows))?;
            let mean = rows.iter().map(|r| r.gap as f64).sum::<f64>() / rows.len().max(1) as f64;
            println!("{} instances, mean gap {mean:.3}", rows.len());
            if let Some(r) = rows.iter().find(|r| r.gap < 0) {
                return Ok(Status::Violation(format!(
                    "instance {}: heuristic {} below optimum {}",
                    r.instance, r.heuristic, r.optimum
                )));
            }
            Ok(Status::Ok)
        }
    }
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(Status::Ok) => EXIT_OK,
        Ok(Status::Violation(msg)) => {
            eprintln!("error: {msg}");
            EXIT_VIOLATION
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}
