//! Reference trajectory templates and arc-length-parameterized sampling.
//!
//! A template is a chain of straight and constant-curvature segments.
//! Curvature transitions are smoothed by linear ramps over a fixed ramp
//! distance so the commanded turn rate is continuous. The trajectory is
//! realized as a dense grid of constant-twist cells in arc length; poses
//! come from exact unicycle integration cell by cell, so the sampled pose
//! and twist are mutually consistent to machine precision, and the path
//! geometry is independent of the cruise speed.

use crate::error::{Result, TsError};
use crate::se2::{integrate_unicycle, Pose2, Twist2};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Distance in meters over which curvature ramps between segments.
pub const RAMP_DIST: f64 = 0.09;

/// Arc-length grid resolution in meters.
const CELL_DS: f64 = 0.002;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TemplateId {
    /// Short straight run.
    SS,
    /// Short wide turn: a single gentle arc.
    SWT,
    /// Short straight then turn.
    SST,
    /// Short turn between two straights.
    STS,
    /// Short double turn: left arc then right arc.
    STT,
    /// Long right-U route.
    LRU,
    /// Long left-L loop with two quarter turns.
    LLU,
    /// Long straight with a sweeping turn.
    LST,
    /// Long zig-zag.
    LZZ,
}

impl TemplateId {
    pub const ALL: [TemplateId; 9] = [
        TemplateId::SS,
        TemplateId::SWT,
        TemplateId::SST,
        TemplateId::STS,
        TemplateId::STT,
        TemplateId::LRU,
        TemplateId::LLU,
        TemplateId::LST,
        TemplateId::LZZ,
    ];

    pub const SHORT: [TemplateId; 5] = [
        TemplateId::SS,
        TemplateId::SWT,
        TemplateId::SST,
        TemplateId::STS,
        TemplateId::STT,
    ];

    pub const LONG: [TemplateId; 4] = [
        TemplateId::LRU,
        TemplateId::LLU,
        TemplateId::LST,
        TemplateId::LZZ,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TemplateId::SS => "SS",
            TemplateId::SWT => "SWT",
            TemplateId::SST => "SST",
            TemplateId::STS => "STS",
            TemplateId::STT => "STT",
            TemplateId::LRU => "LRU",
            TemplateId::LLU => "LLU",
            TemplateId::LST => "LST",
            TemplateId::LZZ => "LZZ",
        }
    }
}

impl fmt::Display for TemplateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TemplateId {
    type Err = TsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "SS" => Ok(TemplateId::SS),
            "SWT" => Ok(TemplateId::SWT),
            "SST" => Ok(TemplateId::SST),
            "STS" => Ok(TemplateId::STS),
            "STT" => Ok(TemplateId::STT),
            "LRU" => Ok(TemplateId::LRU),
            "LLU" => Ok(TemplateId::LLU),
            "LST" => Ok(TemplateId::LST),
            "LZZ" => Ok(TemplateId::LZZ),
            other => Err(TsError::UnknownTemplate(other.to_string())),
        }
    }
}

/// One primitive of a template path: a length and a signed curvature
/// (zero for straight, positive turns left).
#[derive(Debug, Clone, Copy)]
pub struct PathSegment {
    pub length: f64,
    pub curvature: f64,
}

impl PathSegment {
    pub fn straight(length: f64) -> Self {
        PathSegment {
            length,
            curvature: 0.0,
        }
    }

    /// Arc of the given signed radius (positive = left turn) covering
    /// `length` meters of arc.
    pub fn arc(radius: f64, length: f64) -> Self {
        PathSegment {
            length,
            curvature: 1.0 / radius,
        }
    }
}

fn template_segments(id: TemplateId) -> Vec<PathSegment> {
    use PathSegment as P;
    match id {
        TemplateId::SS => vec![P::straight(4.0)],
        TemplateId::SWT => vec![P::arc(3.0, 4.0)],
        TemplateId::SST => vec![P::straight(2.0), P::arc(1.5, 2.0)],
        TemplateId::STS => vec![P::straight(1.5), P::arc(1.0, 1.0), P::straight(1.5)],
        TemplateId::STT => vec![
            P::straight(1.4),
            P::arc(1.2, 1.3),
            P::arc(-1.2, 1.3),
        ],
        TemplateId::LRU => vec![
            P::straight(8.0),
            P::arc(-2.0, std::f64::consts::PI * 2.0),
            P::straight(8.0),
        ],
        TemplateId::LLU => vec![
            P::straight(6.0),
            P::arc(2.0, std::f64::consts::FRAC_PI_2 * 2.0),
            P::straight(6.0),
            P::arc(2.0, std::f64::consts::FRAC_PI_2 * 2.0),
            P::straight(6.0),
        ],
        TemplateId::LST => vec![
            P::straight(10.0),
            P::arc(3.0, std::f64::consts::FRAC_PI_2 * 3.0),
            P::straight(6.0),
        ],
        TemplateId::LZZ => vec![
            P::straight(4.0),
            P::arc(2.0, std::f64::consts::FRAC_PI_2 * 2.0),
            P::straight(4.0),
            P::arc(-2.0, std::f64::consts::PI * 2.0),
            P::straight(4.0),
            P::arc(2.0, std::f64::consts::FRAC_PI_2 * 2.0),
            P::straight(2.0),
        ],
    }
}

/// Builds the piecewise-linear curvature profile knots (s, kappa) for a
/// segment chain, with ramps of `RAMP_DIST` at the start and at every
/// interior boundary.
fn curvature_knots(segments: &[PathSegment]) -> Result<Vec<(f64, f64)>> {
    if segments.is_empty() {
        return Err(TsError::InvalidParams("empty segment list".into()));
    }
    let half = RAMP_DIST / 2.0;
    for seg in segments {
        if seg.length <= RAMP_DIST {
            return Err(TsError::InvalidParams(format!(
                "segment length {} must exceed the ramp distance",
                seg.length
            )));
        }
    }
    let mut knots = Vec::new();
    let mut s = 0.0;
    // initial ramp from zero curvature
    knots.push((0.0, 0.0));
    knots.push((RAMP_DIST, segments[0].curvature));
    for (i, seg) in segments.iter().enumerate() {
        let end = s + seg.length;
        if i + 1 < segments.len() {
            knots.push((end - half, seg.curvature));
            knots.push((end + half, segments[i + 1].curvature));
        } else {
            knots.push((end, seg.curvature));
        }
        s = end;
    }
    Ok(knots)
}

fn kappa_at(knots: &[(f64, f64)], s: f64) -> f64 {
    if s <= knots[0].0 {
        return knots[0].1;
    }
    for w in knots.windows(2) {
        let (s0, k0) = w[0];
        let (s1, k1) = w[1];
        if s <= s1 {
            if s1 - s0 < 1e-12 {
                return k1;
            }
            return k0 + (k1 - k0) * (s - s0) / (s1 - s0);
        }
    }
    knots.last().unwrap().1
}

/// A sampled reference: pose and feedforward twist at a given time.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceSample {
    pub pose: Pose2,
    pub twist: Twist2,
}

pub struct ReferenceTrajectory {
    nu: f64,
    total_length: f64,
    // per-cell curvature and the pose at each cell's start
    cell_kappa: Vec<f64>,
    knot_poses: Vec<Pose2>,
}

impl ReferenceTrajectory {
    pub fn from_segments(segments: &[PathSegment], nu: f64) -> Result<Self> {
        if nu <= 0.0 {
            return Err(TsError::InvalidParams(format!(
                "cruise speed must be positive, got {nu}"
            )));
        }
        let knots = curvature_knots(segments)?;
        let total_length: f64 = segments.iter().map(|s| s.length).sum();
        let n_cells = (total_length / CELL_DS).ceil() as usize;
        let mut cell_kappa = Vec::with_capacity(n_cells);
        let mut knot_poses = Vec::with_capacity(n_cells + 1);
        let mut g = Pose2::identity();
        knot_poses.push(g);
        for j in 0..n_cells {
            let mid = (j as f64 + 0.5) * CELL_DS;
            let k = kappa_at(&knots, mid.min(total_length));
            cell_kappa.push(k);
            let ds = (total_length - j as f64 * CELL_DS).min(CELL_DS);
            g = integrate_unicycle(&g, &Twist2::new(nu, k * nu), ds / nu);
            knot_poses.push(g);
        }
        Ok(ReferenceTrajectory {
            nu,
            total_length,
            cell_kappa,
            knot_poses,
        })
    }

    pub fn from_template(id: TemplateId, nu: f64) -> Result<Self> {
        Self::from_segments(&template_segments(id), nu)
    }

    pub fn cruise_speed(&self) -> f64 {
        self.nu
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn total_time(&self) -> f64 {
        self.total_length / self.nu
    }

    pub fn terminal_pose(&self) -> Pose2 {
        *self.knot_poses.last().unwrap()
    }

    /// Pose and feedforward twist at time `t`, clamped to the trajectory
    /// span; past the end the pose holds at the terminus with zero twist.
    pub fn sample(&self, t: f64) -> ReferenceSample {
        let s = (self.nu * t.max(0.0)).min(self.total_length);
        if s >= self.total_length {
            return ReferenceSample {
                pose: self.terminal_pose(),
                twist: Twist2::zero(),
            };
        }
        let j = ((s / CELL_DS) as usize).min(self.cell_kappa.len() - 1);
        let twist = Twist2::new(self.nu, self.cell_kappa[j] * self.nu);
        let rem = s - j as f64 * CELL_DS;
        let pose = integrate_unicycle(&self.knot_poses[j], &twist, rem / self.nu);
        ReferenceSample { pose, twist }
    }

    /// Pose at a given arc length along the path, independent of speed.
    pub fn pose_at_arclength(&self, s: f64) -> Pose2 {
        self.sample(s.clamp(0.0, self.total_length) / self.nu).pose
    }
}
