//! Trial metrics computed from a run log. All formulas are frozen here
//! so that emitted aggregates can be recomputed from the per-trial logs.

use crate::error::{Result, TsError};
use crate::reftraj::ReferenceTrajectory;
use crate::runlog::RunLog;
use crate::se2::{pose_error, Pose2};

fn row_poses(log: &RunLog) -> Result<()> {
    if log.rows.is_empty() {
        return Err(TsError::EmptyLog);
    }
    Ok(())
}

/// Average lateral error in centimeters: the mean over all log rows of
/// the absolute lateral component of the time-synchronized pose error.
pub fn ale_cm(log: &RunLog) -> Result<f64> {
    row_poses(log)?;
    let sum: f64 = log
        .rows
        .iter()
        .map(|r| {
            let g = Pose2::new(r.x_true, r.y_true, r.theta_true);
            let g_star = Pose2::new(r.x_ref, r.y_ref, r.theta_ref);
            pose_error(&g, &g_star).y_tilde.abs()
        })
        .sum();
    Ok(100.0 * sum / log.rows.len() as f64)
}

/// Average lateral error against the nearest reference point instead of
/// the time-synchronized one, in centimeters. Sensitivity-check variant;
/// the nearest point is resolved on a 1 cm arc-length grid.
pub fn ale_nearest_cm(log: &RunLog, reference: &ReferenceTrajectory) -> Result<f64> {
    row_poses(log)?;
    let total = reference.total_length();
    let n = (total / 0.01).ceil() as usize;
    let grid: Vec<Pose2> = (0..=n)
        .map(|i| reference.pose_at_arclength(total * i as f64 / n as f64))
        .collect();
    let sum: f64 = log
        .rows
        .iter()
        .map(|r| {
            grid.iter()
                .map(|p| (p.x - r.x_true).powi(2) + (p.y - r.y_true).powi(2))
                .fold(f64::INFINITY, f64::min)
                .sqrt()
        })
        .sum();
    Ok(100.0 * sum / log.rows.len() as f64)
}

/// Terminal error in centimeters: distance from the final true position
/// to the reference terminal position.
pub fn te_cm(log: &RunLog) -> Result<f64> {
    row_poses(log)?;
    let last = log.rows.last().unwrap();
    let dx = last.x_true - last.x_ref;
    let dy = last.y_true - last.y_ref;
    Ok(100.0 * (dx * dx + dy * dy).sqrt())
}

/// Control smoothness: the summed norm of command differences divided by
/// the sample interval, normalized by the number of log rows. A single
/// unit jump at 10 Hz over a 10-row log scores (1/0.1)/10 = 1.0.
pub fn smoothness(log: &RunLog) -> Result<f64> {
    row_poses(log)?;
    let n = log.rows.len();
    if n < 2 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for w in log.rows.windows(2) {
        let dt = w[1].t - w[0].t;
        if dt <= 0.0 {
            continue;
        }
        let dn = w[1].nu_cmd - w[0].nu_cmd;
        let dw = w[1].omega_cmd - w[0].omega_cmd;
        sum += (dn * dn + dw * dw).sqrt() / dt;
    }
    Ok(sum / n as f64)
}

/// Distance actually traveled by the robot, in meters.
pub fn distance_traveled(log: &RunLog) -> Result<f64> {
    row_poses(log)?;
    Ok(log
        .rows
        .windows(2)
        .map(|w| {
            let dx = w[1].x_true - w[0].x_true;
            let dy = w[1].y_true - w[0].y_true;
            (dx * dx + dy * dy).sqrt()
        })
        .sum())
}

/// Replenishment events per meter traveled.
pub fn replenish_rate(log: &RunLog) -> Result<f64> {
    let dist = distance_traveled(log)?;
    if dist <= 0.0 {
        return Ok(0.0);
    }
    let n = log.rows.iter().filter(|r| r.event == "replenish").count();
    Ok(n as f64 / dist)
}

/// Fraction of the reference path completed: the arc length of the
/// reference point closest to the final true position, over the total
/// length. Resolved on a 1 cm grid.
pub fn completed_fraction(log: &RunLog, reference: &ReferenceTrajectory) -> Result<f64> {
    row_poses(log)?;
    let last = log.rows.last().unwrap();
    let total = reference.total_length();
    let n = (total / 0.01).ceil() as usize;
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..=n {
        let s = total * i as f64 / n as f64;
        let p = reference.pose_at_arclength(s);
        let d = (p.x - last.x_true).powi(2) + (p.y - last.y_true).powi(2);
        if d < best.0 {
            best = (d, s);
        }
    }
    Ok(best.1 / total)
}
