//! Stand-in for an indirect feature-based V-SLAM stack: persistent-id
//! feature tracking with measurement noise, a drifting pose estimator,
//! and the degraded frame-by-frame tracking mode used by the VS+ baseline.
//!
//! The pose estimator answers two kinds of query. The per-frame estimate
//! carries accumulated drift plus a smooth transient wander, modeling the
//! frame-rate tracking pose. The anchored estimate carries drift only,
//! modeling a deliberate low-frequency query of the refined keyframe pose
//! (the outer-loop replenishment query).

use crate::camera::{project, project_right_u, CameraIntrinsics, PixelPoint};
use crate::scene::Scene;
use crate::se2::{MountPose, Pose2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// A tracked image feature: persistent id, noisy pixel measurement, and
/// noisy triangulated depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackedFeature {
    pub id: u64,
    pub pixel: PixelPoint,
    pub depth: f64,
}

/// Pose estimate plus the current tracked feature set.
#[derive(Debug, Clone)]
pub struct SlamEstimate {
    pub pose: Pose2,
    pub tracked: Vec<TrackedFeature>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrackMode {
    /// Feature-map tracking: the id equals the landmark id forever, so a
    /// landmark re-entering the view resumes its old identity.
    Map,
    /// Frame-by-frame tracking: an id persists only across consecutive
    /// frames of continuous visibility; redetected features are new.
    FrameByFrame,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseModel {
    /// Pixel measurement noise, std in pixels per axis.
    pub pixel_sigma: f64,
    /// Relative std of the triangulated depth.
    pub depth_rel_sigma: f64,
    /// Random-walk position drift intensity, meters per sqrt-meter traveled.
    pub drift_pos_rate: f64,
    /// Random-walk yaw drift intensity, radians per sqrt-meter traveled.
    pub drift_yaw_rate: f64,
    /// Stationary std in meters of the smooth transient wander on the
    /// per-frame pose estimate.
    pub per_step_jitter: f64,
    /// Per-frame probability that frame-by-frame tracking drops a track.
    pub track_loss_per_frame: f64,
    /// Tracking-drift intensity: each track's pixel offset performs a
    /// random walk with this std in px per sqrt-meter of travel, so long
    /// tracks accumulate persistent measurement bias.
    pub pixel_walk_rate: f64,
}

impl NoiseModel {
    pub fn zero() -> Self {
        NoiseModel {
            pixel_sigma: 0.0,
            depth_rel_sigma: 0.0,
            drift_pos_rate: 0.0,
            drift_yaw_rate: 0.0,
            per_step_jitter: 0.0,
            track_loss_per_frame: 0.0,
            pixel_walk_rate: 0.0,
        }
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            pixel_sigma: 3.0,
            depth_rel_sigma: 0.02,
            drift_pos_rate: 0.005,
            drift_yaw_rate: 0.0012,
            per_step_jitter: 0.045,
            track_loss_per_frame: 0.03,
            pixel_walk_rate: 30.0,
        }
    }
}

/// Correlation length in meters of the per-frame wander process.
const WANDER_CORR_LEN: f64 = 0.8;

/// Distance constant in meters of the second-order shaping filter that
/// smooths the exposed per-frame estimate. The raw drift walk and wander
/// have white increments; a frame-rate tracking pose does not jump, so
/// the exposed error follows them through a critically damped tracker
/// and stays continuously differentiable.
const SMOOTH_LEN: f64 = 0.5;

/// One emulator instance per trial; single-threaded mutation.
pub struct SlamEmulator {
    noise: NoiseModel,
    mode: TrackMode,
    rng: ChaCha8Rng,
    // accumulated drift random walk (x, y, yaw), left-composed error
    target: [f64; 3],
    // transient wander on the per-frame estimate, world frame
    wander: (f64, f64),
    // smoothed exposed error and its distance-derivative
    exposed: [f64; 3],
    vel: [f64; 3],
    // cumulative distance traveled, advanced by estimate_pose
    cum_dist: f64,
    // distance stamp of the previous tracking frame
    last_frame_dist: f64,
    // accumulated tracking-drift pixel offset of each live track
    walk: HashMap<u64, (f64, f64)>,
    // frame-mode bookkeeping
    prev_tracks: HashMap<u64, u64>,
    next_track_id: u64,
}

impl SlamEmulator {
    pub fn new(noise: NoiseModel, mode: TrackMode, seed: u64) -> Self {
        SlamEmulator {
            noise,
            mode,
            rng: ChaCha8Rng::seed_from_u64(seed),
            target: [0.0; 3],
            wander: (0.0, 0.0),
            exposed: [0.0; 3],
            vel: [0.0; 3],
            cum_dist: 0.0,
            last_frame_dist: 0.0,
            walk: HashMap::new(),
            prev_tracks: HashMap::new(),
            next_track_id: 1 << 32,
        }
    }

    fn gauss(&mut self, sigma: f64) -> f64 {
        if sigma == 0.0 {
            0.0
        } else {
            let n: f64 = StandardNormal.sample(&mut self.rng);
            n * sigma
        }
    }

    /// All currently visible landmarks with noisy pixel and depth, in
    /// deterministic ascending landmark order.
    pub fn track_features(
        &mut self,
        true_pose: &Pose2,
        scene: &Scene,
        camera: &CameraIntrinsics,
        mount: &MountPose,
    ) -> Vec<TrackedFeature> {
        let visible = scene.visible_from(true_pose, mount, camera);
        let mut out = Vec::with_capacity(visible.len());
        let mut new_tracks = HashMap::new();
        let mut new_walk = HashMap::with_capacity(visible.len());
        let step = (self.cum_dist - self.last_frame_dist).max(0.0);
        self.last_frame_dist = self.cum_dist;
        let walk_sigma = self.noise.pixel_walk_rate * step.sqrt();
        for (lm_id, q) in visible {
            let mut off = self.walk.get(&lm_id).copied().unwrap_or((0.0, 0.0));
            off.0 += self.gauss(walk_sigma);
            off.1 += self.gauss(walk_sigma);
            new_walk.insert(lm_id, off);
            let exact = project(&q, camera).expect("visible point has positive depth");
            let u = (exact.u + off.0 + self.gauss(self.noise.pixel_sigma)).clamp(0.0, camera.width);
            let v = (exact.v + off.1 + self.gauss(self.noise.pixel_sigma)).clamp(0.0, camera.height);
            // stereo depth: exact disparity perturbed through the relative
            // depth noise, clamped to the usable range
            let _right_u = project_right_u(&q, camera).expect("positive depth");
            let depth = (q.z * (1.0 + self.gauss(self.noise.depth_rel_sigma)))
                .clamp(camera.min_depth, camera.max_depth);
            let id = match self.mode {
                TrackMode::Map => lm_id,
                TrackMode::FrameByFrame => {
                    let prior = self.prev_tracks.get(&lm_id).copied();
                    let lost = prior.is_some()
                        && self.noise.track_loss_per_frame > 0.0
                        && rand::Rng::gen_bool(&mut self.rng, self.noise.track_loss_per_frame);
                    match prior.filter(|_| !lost) {
                        Some(tid) => tid,
                        None => {
                            let tid = self.next_track_id;
                            self.next_track_id += 1;
                            tid
                        }
                    }
                }
            };
            if self.mode == TrackMode::FrameByFrame {
                new_tracks.insert(lm_id, id);
            }
            out.push(TrackedFeature {
                id,
                pixel: PixelPoint { u, v },
                depth,
            });
        }
        if self.mode == TrackMode::FrameByFrame {
            self.prev_tracks = new_tracks;
        }
        self.walk = new_walk;
        out
    }

    /// Advances the error processes for `dist_delta` meters of travel:
    /// the drift random walk, the wander, and the smoothed exposure.
    fn advance(&mut self, dist_delta: f64) {
        if dist_delta <= 0.0 {
            return;
        }
        self.cum_dist += dist_delta;
        let sp = self.noise.drift_pos_rate * dist_delta.sqrt();
        let sy = self.noise.drift_yaw_rate * dist_delta.sqrt();
        self.target[0] += self.gauss(sp);
        self.target[1] += self.gauss(sp);
        self.target[2] += self.gauss(sy);
        if self.noise.per_step_jitter > 0.0 {
            let a = (-dist_delta / WANDER_CORR_LEN).exp();
            let s = self.noise.per_step_jitter * (1.0 - a * a).sqrt();
            self.wander.0 = a * self.wander.0 + self.gauss(s);
            self.wander.1 = a * self.wander.1 + self.gauss(s);
        }
        let goal = [
            self.target[0] + self.wander.0,
            self.target[1] + self.wander.1,
            self.target[2],
        ];
        for i in 0..3 {
            self.vel[i] += dist_delta
                * ((goal[i] - self.exposed[i]) / (SMOOTH_LEN * SMOOTH_LEN)
                    - 2.0 * self.vel[i] / SMOOTH_LEN);
            self.exposed[i] += dist_delta * self.vel[i];
        }
    }

    /// Per-frame pose estimate: truth composed with the smoothed exposed
    /// error (accumulated drift plus transient wander).
    pub fn estimate_pose(&mut self, true_pose: &Pose2, dist_delta: f64) -> Pose2 {
        self.advance(dist_delta);
        Pose2::new(self.exposed[0], self.exposed[1], self.exposed[2]).compose(true_pose)
    }

    /// Keyframe-anchored pose estimate: accumulated drift only, without
    /// the per-frame wander. Used by the low-frequency outer loop.
    pub fn anchored_pose(&self, true_pose: &Pose2) -> Pose2 {
        Pose2::new(self.target[0], self.target[1], self.target[2]).compose(true_pose)
    }
}
