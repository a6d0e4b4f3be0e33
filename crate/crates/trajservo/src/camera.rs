//! Pinhole stereo camera model and the image Jacobian connecting planar
//! camera twists to pixel velocities.
//!
//! Camera 3D frame convention: x right, y down, z forward along the
//! optical axis. The camera's planar SE(2) frame has x along the optical
//! axis and y to the camera's left, so a planar point (px, py) at height h
//! above the optical center embeds as (-py, -h, px) in camera coordinates.

use crate::error::{Result, TsError};
use crate::se2::{robot_twist_to_camera, MountPose, PlanarCameraTwist, Pose2, Twist2};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    /// Focal length in pixels.
    pub f: f64,
    /// Principal point.
    pub cu: f64,
    pub cv: f64,
    pub width: f64,
    pub height: f64,
    /// Stereo baseline in meters.
    pub baseline: f64,
    pub min_depth: f64,
    pub max_depth: f64,
    /// Horizontal half field of view in radians.
    pub half_fov: f64,
}

impl Default for CameraIntrinsics {
    fn default() -> Self {
        CameraIntrinsics {
            f: 500.0,
            cu: 320.0,
            cv: 240.0,
            width: 640.0,
            height: 480.0,
            baseline: 0.1,
            min_depth: 0.3,
            max_depth: 4.0,
            half_fov: 0.55,
        }
    }
}

impl CameraIntrinsics {
    pub fn validate(&self) -> Result<()> {
        if self.f <= 0.0 || self.baseline <= 0.0 {
            return Err(TsError::ConfigError(
                "focal length and baseline must be positive".into(),
            ));
        }
        if !(0.0 < self.min_depth && self.min_depth < self.max_depth) {
            return Err(TsError::ConfigError(
                "need 0 < min_depth < max_depth".into(),
            ));
        }
        Ok(())
    }
}

/// A point in the camera frame; `z` is the depth q^3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PixelPoint {
    pub u: f64,
    pub v: f64,
}

/// Stacked image-Jacobian columns for an ordered feature set: `l1` is the
/// coefficient of the forward speed, `l2` of the yaw rate. Row dimension
/// is twice the number of features.
#[derive(Debug, Clone)]
pub struct JacobianBlocks {
    pub l1: Vec<f64>,
    pub l2: Vec<f64>,
}

impl JacobianBlocks {
    pub fn n_features(&self) -> usize {
        self.l1.len() / 2
    }
}

/// Rigid transform of a world point into the camera frame at robot pose
/// `g` with camera mount `mount`, under the upright-camera embedding.
pub fn to_camera_frame(position: &[f64; 3], g: &Pose2, mount: &MountPose) -> CameraPoint {
    let cam = g.compose(&mount.as_pose());
    let (fwd, left) = cam.inverse_transform_point(position[0], position[1]);
    CameraPoint {
        x: -left,
        y: -position[2],
        z: fwd,
    }
}

pub fn project(q: &CameraPoint, k: &CameraIntrinsics) -> Result<PixelPoint> {
    if q.z <= 0.0 {
        return Err(TsError::NonPositiveDepth(q.z));
    }
    Ok(PixelPoint {
        u: k.cu + k.f * q.x / q.z,
        v: k.cv + k.f * q.y / q.z,
    })
}

/// Recovers a camera-frame point from a pixel and its depth.
pub fn back_project(r: &PixelPoint, depth: f64, k: &CameraIntrinsics) -> Result<CameraPoint> {
    if depth <= 0.0 {
        return Err(TsError::NonPositiveDepth(depth));
    }
    Ok(CameraPoint {
        x: (r.u - k.cu) * depth / k.f,
        y: (r.v - k.cv) * depth / k.f,
        z: depth,
    })
}

/// Horizontal pixel coordinate of the point in the right stereo view; the
/// right camera is displaced by the baseline along camera +x.
pub fn project_right_u(q: &CameraPoint, k: &CameraIntrinsics) -> Result<f64> {
    if q.z <= 0.0 {
        return Err(TsError::NonPositiveDepth(q.z));
    }
    Ok(k.cu + k.f * (q.x - k.baseline) / q.z)
}

pub fn triangulate_depth(disparity: f64, k: &CameraIntrinsics) -> Result<f64> {
    if disparity <= 0.0 {
        return Err(TsError::NonPositiveDisparity(disparity));
    }
    Ok(k.f * k.baseline / disparity)
}

/// FoV and depth-range visibility test; no occlusion by scene geometry.
pub fn is_visible(q: &CameraPoint, k: &CameraIntrinsics) -> bool {
    if q.z < k.min_depth || q.z > k.max_depth {
        return false;
    }
    if q.x.abs().atan2(q.z) > k.half_fov {
        return false;
    }
    match project(q, k) {
        Ok(r) => r.u >= 0.0 && r.u <= k.width && r.v >= 0.0 && r.v <= k.height,
        Err(_) => false,
    }
}

/// Analytic differential of the projected pixel with respect to the
/// planar camera twist (v1, v2, omega): a 2x3 matrix in row-major order.
///
/// Derived from the static-point kinematics q_dot = -Omega x q - V with
/// the upright embedding; signs are fixed by the finite-difference oracle
/// of the projection under integrated camera motion.
pub fn image_jacobian(
    q: &CameraPoint,
    r: &PixelPoint,
    k: &CameraIntrinsics,
) -> Result<[[f64; 3]; 2]> {
    if q.z <= 0.0 {
        return Err(TsError::NonPositiveDepth(q.z));
    }
    let uu = r.u - k.cu;
    let vv = r.v - k.cv;
    Ok([
        [uu / q.z, k.f / q.z, k.f + uu * uu / k.f],
        [vv / q.z, 0.0, uu * vv / k.f],
    ])
}

/// Pixel velocity of one feature under a planar camera twist.
pub fn pixel_velocity(
    q: &CameraPoint,
    r: &PixelPoint,
    k: &CameraIntrinsics,
    zeta: &PlanarCameraTwist,
) -> Result<(f64, f64)> {
    let l = image_jacobian(q, r, k)?;
    Ok((
        l[0][0] * zeta.v1 + l[0][1] * zeta.v2 + l[0][2] * zeta.omega,
        l[1][0] * zeta.v1 + l[1][1] * zeta.v2 + l[1][2] * zeta.omega,
    ))
}

/// The textbook in-image-plane interaction matrix over (translation along
/// image axes, optical-axis rotation): [[-f/z, 0, r2], [0, -f/z, -r1]]
/// for principal-point-centered pixel coordinates (r1, r2). Retained as a
/// reference form; the controller path uses [`image_jacobian`].
pub fn inplane_interaction_matrix(
    r_centered: (f64, f64),
    depth: f64,
    f: f64,
) -> Result<[[f64; 3]; 2]> {
    if depth <= 0.0 {
        return Err(TsError::NonPositiveDepth(depth));
    }
    Ok([
        [-f / depth, 0.0, r_centered.1],
        [0.0, -f / depth, -r_centered.0],
    ])
}

/// Stacks per-feature Jacobians in list order and maps them through the
/// mount adjoint onto the robot controls: columns over (nu, omega).
pub fn stack_jacobian(
    features: &[(CameraPoint, PixelPoint)],
    k: &CameraIntrinsics,
    mount: &MountPose,
) -> Result<JacobianBlocks> {
    if features.is_empty() {
        return Err(TsError::EmptyFeatureSet);
    }
    let col_nu = robot_twist_to_camera(&Twist2::new(1.0, 0.0), mount);
    let col_omega = robot_twist_to_camera(&Twist2::new(0.0, 1.0), mount);
    let mut l1 = Vec::with_capacity(2 * features.len());
    let mut l2 = Vec::with_capacity(2 * features.len());
    for (q, r) in features {
        let l = image_jacobian(q, r, k)?;
        for row in &l {
            l1.push(row[0] * col_nu.v1 + row[1] * col_nu.v2 + row[2] * col_nu.omega);
            l2.push(row[0] * col_omega.v1 + row[1] * col_omega.v2 + row[2] * col_omega.omega);
        }
    }
    Ok(JacobianBlocks { l1, l2 })
}
