//! Command-line front end: single trials, benchmark suites, and
//! ablations.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use trajservo::bench::{run_suite, run_tau_ablation, suite_pairs};
use trajservo::config::RunConfig;
use trajservo::engine::{run_trial, MethodVariant};
use trajservo::metrics;
use trajservo::reftraj::TemplateId;

#[derive(Parser)]
#[command(name = "tsbench", about = "Trajectory servoing simulation benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Replenishment threshold override.
    #[arg(long = "tau-fr")]
    tau_fr: Option<usize>,
    /// Trials per (template, method) pair override.
    #[arg(long)]
    trials: Option<usize>,
}

impl CommonOpts {
    fn build(&self) -> trajservo::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.tau_fr {
            cfg.tau_fr = t;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a single trial and write its time-series log as CSV.
    Run {
        #[command(flatten)]
        common: CommonOpts,
        /// Reference template (SS, SWT, SST, STS, STT, LRU, LLU, LST, LZZ).
        #[arg(long)]
        template: TemplateIdArg,
        /// Steering method (PO, SLAM, TS, TS_PO, VS_PLUS, I_TS).
        #[arg(long)]
        method: MethodArg,
        /// Trial index within the seed stream.
        #[arg(long, default_value_t = 0)]
        trial: u64,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a suite and emit per-trial logs, an aggregate CSV, and a JSON
    /// summary into the output directory.
    Bench {
        #[command(flatten)]
        common: CommonOpts,
        /// Suite name: short, long, or ablate_its.
        #[arg(long, default_value = "short")]
        suite: String,
        /// Output directory.
        #[arg(long, default_value = "bench_out")]
        out: PathBuf,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Run an ablation: "tau" sweeps the replenishment threshold over the
    /// long templates; "its" compares per-frame regeneration against
    /// segment replenishment.
    Ablate {
        #[command(flatten)]
        common: CommonOpts,
        /// Ablation parameter: tau or its.
        #[arg(long, default_value = "tau")]
        param: String,
        #[arg(long, default_value = "ablate_out")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

#[derive(Clone)]
struct TemplateIdArg(TemplateId);

impl std::str::FromStr for TemplateIdArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.parse::<TemplateId>()
            .map(TemplateIdArg)
            .map_err(|e| e.to_string())
    }
}

#[derive(Clone)]
struct MethodArg(MethodVariant);

impl std::str::FromStr for MethodArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.parse::<MethodVariant>()
            .map(MethodArg)
            .map_err(|e| e.to_string())
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> trajservo::Result<()> {
    match cli.command {
        Command::Run {
            common,
            template,
            method,
            trial,
            out,
        } => {
            let cfg = common.build()?;
            let res = run_trial(&cfg, template.0, method.0, trial)?;
            match out {
                Some(path) => {
                    let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
                    res.log.write_csv(&mut f)?;
                    eprintln!("wrote {}", path.display());
                }
                None => {
                    let mut stdout = std::io::stdout().lock();
                    res.log.write_csv(&mut stdout)?;
                }
            }
            eprintln!(
                "{} {} trial {}: ale = {:.3} cm, te = {:.3} cm, smoothness = {:.4}, replenish = {:.3}/m",
                template.0,
                method.0,
                trial,
                metrics::ale_cm(&res.log)?,
                metrics::te_cm(&res.log)?,
                metrics::smoothness(&res.log)?,
                metrics::replenish_rate(&res.log)?,
            );
            Ok(())
        }
        Command::Bench {
            common,
            suite,
            out,
            workers,
        } => {
            let cfg = common.build()?;
            let pairs = suite_pairs(&suite)?;
            std::fs::create_dir_all(&out)?;
            let runs_dir = out.join("runs");
            let results = run_suite(&cfg, &pairs, workers, Some(&runs_dir))?;
            let mut agg = std::fs::File::create(out.join("aggregate.csv"))?;
            results.write_aggregate_csv(&mut agg)?;
            let summary = results.summary_json(&suite, &cfg)?;
            std::fs::write(
                out.join("summary.json"),
                serde_json::to_string_pretty(&summary).expect("valid json"),
            )?;
            eprintln!(
                "suite {suite}: {} trials -> {}",
                results.trials.len(),
                out.display()
            );
            Ok(())
        }
        Command::Ablate {
            common,
            param,
            out,
            workers,
        } => {
            let cfg = common.build()?;
            std::fs::create_dir_all(&out)?;
            match param.as_str() {
                "tau" => {
                    let sweep = run_tau_ablation(&cfg, workers, Some(&out.join("runs")))?;
                    let mut summaries = Vec::new();
                    for (tau, results) in &sweep {
                        let mut f =
                            std::fs::File::create(out.join(format!("aggregate_tau_{tau}.csv")))?;
                        results.write_aggregate_csv(&mut f)?;
                        let mut cfg_tau = cfg.clone();
                        cfg_tau.tau_fr = *tau;
                        summaries.push(results.summary_json("ablate_tau", &cfg_tau)?);
                    }
                    std::fs::write(
                        out.join("summary.json"),
                        serde_json::to_string_pretty(&serde_json::Value::Array(summaries))
                            .expect("valid json"),
                    )?;
                    eprintln!("tau ablation -> {}", out.display());
                }
                "its" => {
                    let pairs = suite_pairs("ablate_its")?;
                    let results = run_suite(&cfg, &pairs, workers, Some(&out.join("runs")))?;
                    let mut f = std::fs::File::create(out.join("aggregate.csv"))?;
                    results.write_aggregate_csv(&mut f)?;
                    let summary = results.summary_json("ablate_its", &cfg)?;
                    std::fs::write(
                        out.join("summary.json"),
                        serde_json::to_string_pretty(&summary).expect("valid json"),
                    )?;
                    eprintln!("its ablation -> {}", out.display());
                }
                other => {
                    return Err(trajservo::TsError::InvalidParams(format!(
                        "unknown ablation parameter {other}"
                    )))
                }
            }
            Ok(())
        }
    }
}
