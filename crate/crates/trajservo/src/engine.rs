//! Closed-loop trial execution: a unicycle plant integrated at a fine
//! step, a fixed-rate control loop, the emulated localization stack, and
//! per-method steering, producing a time-series log.

use crate::camera::back_project;
use crate::config::RunConfig;
use crate::control::{pose_control, ts_control, FeaturePair, TsCommand};
use crate::error::{Result, TsError};
use crate::feattraj::{correspondences, lift_to_world, DesiredFeature, FeatureTrajSegment};
use crate::reftraj::{ReferenceTrajectory, TemplateId};
use crate::runlog::{LogRow, RunLog};
use crate::scene::Scene;
use crate::se2::{integrate_unicycle, pose_error, Pose2, Twist2};
use crate::slam::{SlamEmulator, TrackMode, TrackedFeature};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodVariant {
    /// Pose feedback from perfect odometry.
    Po,
    /// Pose feedback from the drifting localization estimate.
    Slam,
    /// Trajectory servoing: feature feedback with keyframe-anchored
    /// replenishment.
    Ts,
    /// Trajectory servoing with ground-truth replenishment poses.
    TsPo,
    /// Visual servoing toward a single initial feature segment, with
    /// frame-by-frame tracking and no replenishment.
    VsPlus,
    /// Image-space feedback whose desired features are regenerated from
    /// the per-frame localization estimate at every control step.
    Its,
}

impl MethodVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            MethodVariant::Po => "PO",
            MethodVariant::Slam => "SLAM",
            MethodVariant::Ts => "TS",
            MethodVariant::TsPo => "TS_PO",
            MethodVariant::VsPlus => "VS_PLUS",
            MethodVariant::Its => "I_TS",
        }
    }

    pub fn is_feature_based(&self) -> bool {
        !matches!(self, MethodVariant::Po | MethodVariant::Slam)
    }

    fn track_mode(&self) -> TrackMode {
        match self {
            MethodVariant::VsPlus => TrackMode::FrameByFrame,
            _ => TrackMode::Map,
        }
    }
}

impl fmt::Display for MethodVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodVariant {
    type Err = TsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "PO" => Ok(MethodVariant::Po),
            "SLAM" => Ok(MethodVariant::Slam),
            "TS" => Ok(MethodVariant::Ts),
            "TS_PO" => Ok(MethodVariant::TsPo),
            "VS_PLUS" => Ok(MethodVariant::VsPlus),
            "I_TS" => Ok(MethodVariant::Its),
            other => Err(TsError::InvalidParams(format!("unknown method {other}"))),
        }
    }
}

/// Splitmix64 finalizer; used to derive independent seeds.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn template_index(t: TemplateId) -> u64 {
    TemplateId::ALL.iter().position(|x| *x == t).unwrap() as u64
}

fn method_index(m: MethodVariant) -> u64 {
    match m {
        MethodVariant::Po => 0,
        MethodVariant::Slam => 1,
        MethodVariant::Ts => 2,
        MethodVariant::TsPo => 3,
        MethodVariant::VsPlus => 4,
        MethodVariant::Its => 5,
    }
}

/// Scene seed: shared by all methods of the same (template, trial) so
/// comparisons run in the same world.
pub fn scene_seed(master: u64, template: TemplateId, trial: u64) -> u64 {
    mix(master
        .wrapping_add(mix(template_index(template).wrapping_add(0x100)))
        .wrapping_add(mix(trial.wrapping_add(0x10_000))))
}

/// Per-trial noise stream seed, distinct per method.
pub fn noise_seed(master: u64, template: TemplateId, method: MethodVariant, trial: u64) -> u64 {
    mix(scene_seed(master, template, trial).wrapping_add(mix(method_index(method).wrapping_add(0x1_000_000))))
}

pub struct TrialOutput {
    pub log: RunLog,
    pub reference: ReferenceTrajectory,
}

pub fn run_trial(
    cfg: &RunConfig,
    template: TemplateId,
    method: MethodVariant,
    trial: u64,
) -> Result<TrialOutput> {
    cfg.validate()?;
    let reference = ReferenceTrajectory::from_template(template, cfg.cruise_speed)?;
    let scene = Scene::new(&cfg.scene, scene_seed(cfg.seed, template, trial))?;
    let mut slam = SlamEmulator::new(
        cfg.noise,
        method.track_mode(),
        noise_seed(cfg.seed, template, method, trial),
    );

    let control_dt = cfg.control_dt();
    let total_time = reference.total_time() + cfg.settle_time;
    let n_steps = (total_time / control_dt).ceil() as usize;

    let mut g = Pose2::identity();
    let mut prev_g = g;
    let mut segment: Option<FeatureTrajSegment> = None;
    let mut segment_idx: usize = 0;
    let mut prev_omega = 0.0;
    let mut log = RunLog::default();

    for k in 0..n_steps {
        let t = k as f64 * control_dt;
        let r = reference.sample(t);
        let dist_delta = g.position_distance(&prev_g);
        prev_g = g;
        let est = slam.estimate_pose(&g, dist_delta);
        let tracked = slam.track_features(&g, &scene, &cfg.camera, &cfg.mount);

        let mut event: &'static str = "";
        let mut n_features = tracked.len();
        let mut residual_norm = 0.0;
        let mut abort = false;

        let u = match method {
            MethodVariant::Po => pose_control(&pose_error(&g, &r.pose), &r.twist, &cfg.gains),
            MethodVariant::Slam => {
                pose_control(&pose_error(&est, &r.pose), &r.twist, &cfg.gains)
            }
            MethodVariant::Its => {
                // desired features regenerated from the per-frame estimate
                let pairs = its_pairs(&tracked, &est, &r.pose, cfg)?;
                n_features = pairs.len();
                event = "replenish";
                segment_idx = k + 1;
                match ts_control(&pairs, &r.twist, &cfg.camera, &cfg.mount, &cfg.gains) {
                    Ok(cmd) => {
                        residual_norm = cmd.residual_norm;
                        cmd.twist
                    }
                    Err(_) => {
                        event = "starvation";
                        Twist2::new(r.twist.nu, prev_omega)
                    }
                }
            }
            MethodVariant::Ts | MethodVariant::TsPo | MethodVariant::VsPlus => {
                let allow_replenish = method != MethodVariant::VsPlus || segment.is_none();
                let matched_now = segment
                    .as_ref()
                    .map(|seg| {
                        let desired = seg.desired(t, &reference, &cfg.camera, &cfg.mount);
                        correspondences(&tracked, &desired).len()
                    })
                    .unwrap_or(0);
                if matched_now < cfg.tau_fr && allow_replenish && !tracked.is_empty() {
                    let lift_pose = if method == MethodVariant::TsPo {
                        g
                    } else {
                        slam.anchored_pose(&g)
                    };
                    if let Ok(seg) = FeatureTrajSegment::init(
                        t,
                        &tracked,
                        &lift_pose,
                        &reference,
                        &cfg.camera,
                        &cfg.mount,
                        control_dt,
                    ) {
                        segment = Some(seg);
                        segment_idx += 1;
                        event = "replenish";
                    }
                }
                let attempt: Result<TsCommand> = segment
                    .as_ref()
                    .ok_or(TsError::FeatureStarvation {
                        have: 0,
                        need: cfg.gains.min_features,
                    })
                    .and_then(|seg| {
                        let desired = seg.desired(t, &reference, &cfg.camera, &cfg.mount);
                        let pairs = build_pairs(&tracked, &desired, cfg)?;
                        n_features = pairs.len();
                        ts_control(&pairs, &r.twist, &cfg.camera, &cfg.mount, &cfg.gains)
                    });
                match attempt {
                    Ok(cmd) => {
                        residual_norm = cmd.residual_norm;
                        cmd.twist
                    }
                    Err(e) => {
                        event = match e {
                            TsError::DegenerateJacobian(_) => "degenerate",
                            _ => "starvation",
                        };
                        if method == MethodVariant::VsPlus {
                            abort = true;
                        }
                        Twist2::new(r.twist.nu, prev_omega)
                    }
                }
            }
        };

        prev_omega = u.omega;
        log.rows.push(LogRow {
            t,
            x_true: g.x,
            y_true: g.y,
            theta_true: g.theta,
            x_ref: r.pose.x,
            y_ref: r.pose.y,
            theta_ref: r.pose.theta,
            x_est: est.x,
            y_est: est.y,
            theta_est: est.theta,
            nu_cmd: u.nu,
            omega_cmd: u.omega,
            n_features,
            segment_idx,
            residual_norm,
            event,
        });
        if abort {
            break;
        }

        // zero-order-hold propagation of the plant at the fine step
        let mut remaining = control_dt;
        while remaining > 1e-12 {
            let dt = remaining.min(cfg.plant_dt);
            g = integrate_unicycle(&g, &u, dt);
            remaining -= dt;
        }
    }

    if log.is_empty() {
        return Err(TsError::EmptyLog);
    }
    Ok(TrialOutput { log, reference })
}

/// Matched measured/desired pairs for segment-based servoing. The
/// measured camera point is back-projected from the noisy pixel and the
/// noisy triangulated depth.
fn build_pairs(
    tracked: &[TrackedFeature],
    desired: &[DesiredFeature],
    cfg: &RunConfig,
) -> Result<Vec<FeaturePair>> {
    correspondences(tracked, desired)
        .into_iter()
        .map(|(tf, df)| {
            Ok(FeaturePair {
                q: back_project(&tf.pixel, tf.depth, &cfg.camera)?,
                pixel: tf.pixel,
                q_star: df.q,
                pixel_star: df.pixel,
            })
        })
        .collect()
}

/// Pairs for the per-frame-regenerated variant: each tracked feature is
/// lifted through the current estimate and reprojected through the
/// current reference pose.
fn its_pairs(
    tracked: &[TrackedFeature],
    est: &Pose2,
    g_star: &Pose2,
    cfg: &RunConfig,
) -> Result<Vec<FeaturePair>> {
    use crate::camera::{is_visible, project, to_camera_frame};
    let mut out = Vec::with_capacity(tracked.len());
    for tf in tracked {
        let world = lift_to_world(&tf.pixel, tf.depth, est, &cfg.camera, &cfg.mount)?;
        let q_star = to_camera_frame(&world, g_star, &cfg.mount);
        if !is_visible(&q_star, &cfg.camera) {
            continue;
        }
        let pixel_star = match project(&q_star, &cfg.camera) {
            Ok(p) => p,
            Err(_) => continue,
        };
        out.push(FeaturePair {
            q: back_project(&tf.pixel, tf.depth, &cfg.camera)?,
            pixel: tf.pixel,
            q_star,
            pixel_star,
        });
    }
    Ok(out)
}
