//! Per-trial time series log and its CSV serialization.

use crate::error::{Result, TsError};
use std::io::Write;

/// Significant-digit float formatting used by every emitted file.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0.0".to_string();
    }
    format!("{x:.8e}")
}

#[derive(Debug, Clone, Default)]
pub struct LogRow {
    pub t: f64,
    pub x_true: f64,
    pub y_true: f64,
    pub theta_true: f64,
    pub x_ref: f64,
    pub y_ref: f64,
    pub theta_ref: f64,
    pub x_est: f64,
    pub y_est: f64,
    pub theta_est: f64,
    pub nu_cmd: f64,
    pub omega_cmd: f64,
    pub n_features: usize,
    pub segment_idx: usize,
    pub residual_norm: f64,
    pub event: &'static str,
}

#[derive(Debug, Clone, Default)]
pub struct RunLog {
    pub rows: Vec<LogRow>,
}

pub const RUNLOG_HEADER: &str = "t,x_true,y_true,theta_true,x_ref,y_ref,theta_ref,x_est,y_est,theta_est,nu_cmd,omega_cmd,n_features,segment_idx,residual_norm,event";

impl RunLog {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        if self.rows.is_empty() {
            return Err(TsError::EmptyLog);
        }
        writeln!(w, "{RUNLOG_HEADER}")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                fmt_f64(r.t),
                fmt_f64(r.x_true),
                fmt_f64(r.y_true),
                fmt_f64(r.theta_true),
                fmt_f64(r.x_ref),
                fmt_f64(r.y_ref),
                fmt_f64(r.theta_ref),
                fmt_f64(r.x_est),
                fmt_f64(r.y_est),
                fmt_f64(r.theta_est),
                fmt_f64(r.nu_cmd),
                fmt_f64(r.omega_cmd),
                r.n_features,
                r.segment_idx,
                fmt_f64(r.residual_norm),
                r.event,
            )?;
        }
        Ok(())
    }
}
