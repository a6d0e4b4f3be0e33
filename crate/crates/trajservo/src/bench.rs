//! Benchmark suites: batches of trials over (template, method) pairs,
//! executed on a deterministic worker pool, with per-trial logs, an
//! aggregate CSV, and a JSON summary.
//!
//! Determinism contract: every trial is seeded from (master seed,
//! template, method, trial) alone, and results are collected by task
//! index, so the emitted aggregates are byte-identical regardless of the
//! worker count.

use crate::config::{AleMode, RunConfig};
use crate::engine::{run_trial, MethodVariant};
use crate::error::{Result, TsError};
use crate::metrics;
use crate::reftraj::TemplateId;
use crate::runlog::fmt_f64;
use crate::stats::{self, Summary};
use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

pub const METRIC_NAMES: [&str; 5] = [
    "ale_cm",
    "te_cm",
    "smoothness",
    "replenish_rate",
    "completed_fraction",
];

#[derive(Debug, Clone, Copy)]
pub struct TrialMetrics {
    pub template: TemplateId,
    pub method: MethodVariant,
    pub trial: u64,
    pub ale_cm: f64,
    pub te_cm: f64,
    pub smoothness: f64,
    pub replenish_rate: f64,
    pub completed_fraction: f64,
}

impl TrialMetrics {
    pub fn metric(&self, name: &str) -> f64 {
        match name {
            "ale_cm" => self.ale_cm,
            "te_cm" => self.te_cm,
            "smoothness" => self.smoothness,
            "replenish_rate" => self.replenish_rate,
            "completed_fraction" => self.completed_fraction,
            other => panic!("unknown metric {other}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchResults {
    pub pairs: Vec<(TemplateId, MethodVariant)>,
    pub trials: Vec<TrialMetrics>,
}

/// The (template, method) grid of a named suite.
pub fn suite_pairs(name: &str) -> Result<Vec<(TemplateId, MethodVariant)>> {
    let grid = |templates: &[TemplateId], methods: &[MethodVariant]| {
        templates
            .iter()
            .flat_map(|t| methods.iter().map(move |m| (*t, *m)))
            .collect::<Vec<_>>()
    };
    match name {
        "short" => Ok(grid(
            &TemplateId::SHORT,
            &[
                MethodVariant::Po,
                MethodVariant::Slam,
                MethodVariant::Ts,
                MethodVariant::VsPlus,
            ],
        )),
        "long" => Ok(grid(
            &TemplateId::LONG,
            &[
                MethodVariant::Po,
                MethodVariant::Slam,
                MethodVariant::Ts,
                MethodVariant::TsPo,
            ],
        )),
        "ablate_its" => Ok(grid(
            &TemplateId::LONG,
            &[MethodVariant::Ts, MethodVariant::Its],
        )),
        other => Err(TsError::InvalidParams(format!("unknown suite {other}"))),
    }
}

/// Replenishment thresholds swept by the tau ablation.
pub const TAU_SWEEP: [usize; 7] = [4, 6, 10, 16, 22, 36, 50];

/// Runs every (template, method, trial) task of a suite on `workers`
/// threads. If `out_runs` is given, each per-trial log is written there
/// as `<template>_<method>_<trial>.csv`.
pub fn run_suite(
    cfg: &RunConfig,
    pairs: &[(TemplateId, MethodVariant)],
    workers: usize,
    out_runs: Option<&Path>,
) -> Result<BenchResults> {
    cfg.validate()?;
    let workers = workers.max(1);
    if let Some(dir) = out_runs {
        std::fs::create_dir_all(dir)?;
    }
    let tasks: Vec<(TemplateId, MethodVariant, u64)> = pairs
        .iter()
        .flat_map(|(t, m)| (0..cfg.trials as u64).map(move |k| (*t, *m, k)))
        .collect();
    let mut slots: Vec<Option<Result<TrialMetrics>>> = (0..tasks.len()).map(|_| None).collect();
    let next = AtomicUsize::new(0);
    let slot_cells: Vec<Mutex<&mut Option<Result<TrialMetrics>>>> =
        slots.iter_mut().map(Mutex::new).collect();

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= tasks.len() {
                    break;
                }
                let (template, method, trial) = tasks[i];
                let res = run_one(cfg, template, method, trial, out_runs);
                **slot_cells[i].lock().unwrap() = Some(res);
            });
        }
    });

    let trials = slots
        .into_iter()
        .map(|s| s.expect("every task slot is filled"))
        .collect::<Result<Vec<_>>>()?;
    Ok(BenchResults {
        pairs: pairs.to_vec(),
        trials,
    })
}

fn run_one(
    cfg: &RunConfig,
    template: TemplateId,
    method: MethodVariant,
    trial: u64,
    out_runs: Option<&Path>,
) -> Result<TrialMetrics> {
    let out = run_trial(cfg, template, method, trial)?;
    if let Some(dir) = out_runs {
        let path = dir.join(format!("{template}_{method}_{trial}.csv"));
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        out.log.write_csv(&mut f)?;
    }
    Ok(TrialMetrics {
        template,
        method,
        trial,
        ale_cm: match cfg.ale_mode {
            AleMode::Synchronized => metrics::ale_cm(&out.log)?,
            AleMode::Nearest => metrics::ale_nearest_cm(&out.log, &out.reference)?,
        },
        te_cm: metrics::te_cm(&out.log)?,
        smoothness: metrics::smoothness(&out.log)?,
        replenish_rate: metrics::replenish_rate(&out.log)?,
        completed_fraction: metrics::completed_fraction(&out.log, &out.reference)?,
    })
}

impl BenchResults {
    /// Metric samples of one (template, method) group, in trial order.
    pub fn group(&self, template: TemplateId, method: MethodVariant, metric: &str) -> Vec<f64> {
        self.trials
            .iter()
            .filter(|t| t.template == template && t.method == method)
            .map(|t| t.metric(metric))
            .collect()
    }

    /// Metric samples of one method pooled over every template in the
    /// suite that ran it.
    pub fn pooled(&self, method: MethodVariant, metric: &str) -> Vec<f64> {
        self.trials
            .iter()
            .filter(|t| t.method == method)
            .map(|t| t.metric(metric))
            .collect()
    }

    pub fn aggregate(&self) -> Result<Vec<(TemplateId, MethodVariant, &'static str, Summary)>> {
        let mut rows = Vec::new();
        for (template, method) in &self.pairs {
            for metric in METRIC_NAMES {
                let xs = self.group(*template, *method, metric);
                rows.push((*template, *method, metric, stats::summarize(&xs)?));
            }
        }
        Ok(rows)
    }

    pub fn write_aggregate_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "template,method,metric,mean,std,ci95,n")?;
        for (template, method, metric, s) in self.aggregate()? {
            writeln!(
                w,
                "{template},{method},{metric},{},{},{},{}",
                fmt_f64(s.mean),
                fmt_f64(s.std),
                fmt_f64(s.ci95),
                s.n
            )?;
        }
        Ok(())
    }

    /// JSON summary: aggregates plus Welch p-values between every method
    /// pair of each template, for each metric.
    pub fn summary_json(&self, suite: &str, cfg: &RunConfig) -> Result<serde_json::Value> {
        use serde_json::json;
        let aggregates: Vec<_> = self
            .aggregate()?
            .into_iter()
            .map(|(t, m, metric, s)| {
                json!({
                    "template": t.to_string(),
                    "method": m.to_string(),
                    "metric": metric,
                    "mean": s.mean,
                    "std": s.std,
                    "ci95": s.ci95,
                    "n": s.n,
                })
            })
            .collect();
        let mut p_values = Vec::new();
        let mut templates: Vec<TemplateId> = Vec::new();
        for (t, _) in &self.pairs {
            if !templates.contains(t) {
                templates.push(*t);
            }
        }
        for t in &templates {
            let methods: Vec<MethodVariant> = self
                .pairs
                .iter()
                .filter(|(pt, _)| pt == t)
                .map(|(_, m)| *m)
                .collect();
            for i in 0..methods.len() {
                for j in i + 1..methods.len() {
                    for metric in METRIC_NAMES {
                        let a = self.group(*t, methods[i], metric);
                        let b = self.group(*t, methods[j], metric);
                        p_values.push(json!({
                            "template": t.to_string(),
                            "method_a": methods[i].to_string(),
                            "method_b": methods[j].to_string(),
                            "metric": metric,
                            "p": stats::welch_p_value(&a, &b)?,
                        }));
                    }
                }
            }
        }
        Ok(json!({
            "suite": suite,
            "seed": cfg.seed,
            "trials": cfg.trials,
            "tau_fr": cfg.tau_fr,
            "aggregates": aggregates,
            "welch_p_values": p_values,
        }))
    }
}

/// Runs the tau ablation: the long templates under feature-space
/// servoing, one batch per threshold in [`TAU_SWEEP`].
pub fn run_tau_ablation(
    base: &RunConfig,
    workers: usize,
    out_runs: Option<&Path>,
) -> Result<Vec<(usize, BenchResults)>> {
    let pairs: Vec<(TemplateId, MethodVariant)> = TemplateId::LONG
        .iter()
        .map(|t| (*t, MethodVariant::Ts))
        .collect();
    let mut out = Vec::new();
    for tau in TAU_SWEEP {
        let cfg = RunConfig {
            tau_fr: tau,
            ..base.clone()
        };
        let sub = out_runs.map(|d| d.join(format!("tau_{tau}")));
        out.push((tau, run_suite(&cfg, &pairs, workers, sub.as_deref())?));
    }
    Ok(out)
}
