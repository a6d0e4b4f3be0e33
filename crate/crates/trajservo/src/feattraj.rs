//! Feature trajectory segments: the image-space references for servoing.
//!
//! At a replenishment event the currently tracked features are lifted to
//! world estimates through the localization pose, and their desired pixel
//! paths are defined by reprojection through the reference poses. Each
//! feature's path is truncated at the time it is predicted to leave the
//! field of view, so the active set shrinks as the robot advances until a
//! new segment is initialized.

use crate::camera::{
    back_project, is_visible, project, to_camera_frame, CameraIntrinsics, CameraPoint, PixelPoint,
};
use crate::error::{Result, TsError};
use crate::reftraj::ReferenceTrajectory;
use crate::se2::{MountPose, Pose2};
use crate::slam::TrackedFeature;

/// One lifted feature: estimated world position and predicted exit time.
#[derive(Debug, Clone, Copy)]
pub struct SegmentFeature {
    pub id: u64,
    pub world: [f64; 3],
    /// Absolute time at which the reprojection first leaves the FoV.
    pub exit_time: f64,
}

/// Desired image state of one feature at a query time.
#[derive(Debug, Clone, Copy)]
pub struct DesiredFeature {
    pub id: u64,
    pub q: CameraPoint,
    pub pixel: PixelPoint,
}

#[derive(Debug, Clone)]
pub struct FeatureTrajSegment {
    pub start_time: f64,
    features: Vec<SegmentFeature>,
}

/// Recovers an estimated world landmark from a pixel measurement, its
/// triangulated depth, and the current pose estimate.
pub fn lift_to_world(
    pixel: &PixelPoint,
    depth: f64,
    pose: &Pose2,
    camera: &CameraIntrinsics,
    mount: &MountPose,
) -> Result<[f64; 3]> {
    let q = back_project(pixel, depth, camera)?;
    let cam = pose.compose(&mount.as_pose());
    let (fwd, left) = (q.z, -q.x);
    let (wx, wy) = cam.transform_point(fwd, left);
    Ok([wx, wy, -q.y])
}

impl FeatureTrajSegment {
    /// Lifts the tracked set through `slam_pose` and truncates each
    /// feature at its predicted FoV exit along the reference. `scan_dt`
    /// is the horizon scan resolution (typically the control period).
    pub fn init(
        t_e: f64,
        tracked: &[TrackedFeature],
        slam_pose: &Pose2,
        reference: &ReferenceTrajectory,
        camera: &CameraIntrinsics,
        mount: &MountPose,
        scan_dt: f64,
    ) -> Result<Self> {
        if tracked.is_empty() {
            return Err(TsError::EmptyFeatureSet);
        }
        let horizon = reference.total_time();
        let mut features = Vec::with_capacity(tracked.len());
        for tf in tracked {
            let world = lift_to_world(&tf.pixel, tf.depth, slam_pose, camera, mount)?;
            let mut exit_time = horizon;
            let mut t = t_e;
            while t <= horizon {
                let g_star = reference.sample(t).pose;
                let q = to_camera_frame(&world, &g_star, mount);
                if !is_visible(&q, camera) {
                    exit_time = t;
                    break;
                }
                t += scan_dt;
            }
            // skip features already outside the predicted view at start
            if exit_time > t_e {
                features.push(SegmentFeature {
                    id: tf.id,
                    world,
                    exit_time,
                });
            }
        }
        if features.is_empty() {
            return Err(TsError::EmptyFeatureSet);
        }
        features.sort_by_key(|f| f.id);
        Ok(FeatureTrajSegment {
            start_time: t_e,
            features,
        })
    }

    pub fn features(&self) -> &[SegmentFeature] {
        &self.features
    }

    pub fn n_active(&self, t: f64) -> usize {
        self.features.iter().filter(|f| f.exit_time > t).count()
    }

    /// Desired camera points and pixels of the still-active features at
    /// time `t`, ascending by id. Features whose reprojection has left
    /// the view (or whose truncation time has passed) are omitted.
    pub fn desired(
        &self,
        t: f64,
        reference: &ReferenceTrajectory,
        camera: &CameraIntrinsics,
        mount: &MountPose,
    ) -> Vec<DesiredFeature> {
        let g_star = reference.sample(t).pose;
        self.features
            .iter()
            .filter(|f| f.exit_time > t)
            .filter_map(|f| {
                let q = to_camera_frame(&f.world, &g_star, mount);
                let pixel = project(&q, camera).ok()?;
                is_visible(&q, camera).then_some(DesiredFeature { id: f.id, q, pixel })
            })
            .collect()
    }
}

/// Pairs tracked features with desired features by id. Both inputs are
/// ascending by id, so this is a linear merge.
pub fn correspondences<'a>(
    tracked: &'a [TrackedFeature],
    desired: &'a [DesiredFeature],
) -> Vec<(&'a TrackedFeature, &'a DesiredFeature)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < tracked.len() && j < desired.len() {
        match tracked[i].id.cmp(&desired[j].id) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push((&tracked[i], &desired[j]));
                i += 1;
                j += 1;
            }
        }
    }
    out
}
