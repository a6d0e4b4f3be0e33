//! Planar rigid-body algebra: SE(2) poses, unicycle twists, exact arc
//! integration, and the adjoint map that carries robot twists into the
//! camera frame.

use serde::{Deserialize, Serialize};

/// Wraps an angle into `(-pi, pi]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut a = theta % two_pi;
    if a <= -std::f64::consts::PI {
        a += two_pi;
    } else if a > std::f64::consts::PI {
        a -= two_pi;
    }
    a
}

/// An SE(2) element: planar position plus heading, with `theta` kept in
/// `(-pi, pi]` by every constructor and operation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose2 {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose2 {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Pose2 {
            x,
            y,
            theta: normalize_angle(theta),
        }
    }

    pub fn identity() -> Self {
        Pose2 {
            x: 0.0,
            y: 0.0,
            theta: 0.0,
        }
    }

    /// Group product; equals the product of the 3x3 homogeneous matrices.
    pub fn compose(&self, other: &Pose2) -> Pose2 {
        let (s, c) = self.theta.sin_cos();
        Pose2::new(
            self.x + c * other.x - s * other.y,
            self.y + s * other.x + c * other.y,
            self.theta + other.theta,
        )
    }

    pub fn inverse(&self) -> Pose2 {
        let (s, c) = self.theta.sin_cos();
        Pose2::new(
            -(c * self.x + s * self.y),
            -(-s * self.x + c * self.y),
            -self.theta,
        )
    }

    /// Maps a point from this frame's coordinates into the parent frame.
    pub fn transform_point(&self, px: f64, py: f64) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        (self.x + c * px - s * py, self.y + s * px + c * py)
    }

    /// Maps a parent-frame point into this frame's coordinates.
    pub fn inverse_transform_point(&self, px: f64, py: f64) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        let dx = px - self.x;
        let dy = py - self.y;
        (c * dx + s * dy, -s * dx + c * dy)
    }

    pub fn position_distance(&self, other: &Pose2) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

/// Body velocity of the unicycle: forward speed and yaw rate. The lateral
/// component is identically zero (non-holonomic constraint).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Twist2 {
    pub nu: f64,
    pub omega: f64,
}

impl Twist2 {
    pub fn new(nu: f64, omega: f64) -> Self {
        Twist2 { nu, omega }
    }

    pub fn zero() -> Self {
        Twist2 {
            nu: 0.0,
            omega: 0.0,
        }
    }
}

/// Planar offset of the camera frame in the robot frame. The camera is
/// upright: its optical axis is parallel to the ground plane and points
/// along the camera frame's planar x-axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MountPose {
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
}

impl MountPose {
    pub fn new(x: f64, y: f64, yaw: f64) -> Self {
        MountPose {
            x,
            y,
            yaw: normalize_angle(yaw),
        }
    }

    pub fn identity() -> Self {
        MountPose {
            x: 0.0,
            y: 0.0,
            yaw: 0.0,
        }
    }

    pub fn as_pose(&self) -> Pose2 {
        Pose2::new(self.x, self.y, self.yaw)
    }
}

/// Camera twist in the motion plane, expressed in camera planar
/// coordinates: v1 along the optical axis, v2 to the camera's left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarCameraTwist {
    pub v1: f64,
    pub v2: f64,
    pub omega: f64,
}

/// Body-frame pose error coordinates of `g~ = g^-1 g*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseError {
    pub x_tilde: f64,
    pub y_tilde: f64,
    pub theta_tilde: f64,
}

/// Exact flow of the unicycle kinematics: circular arc for nonzero yaw
/// rate, straight line otherwise. Near-zero `omega*dt` falls back to a
/// second-order expansion of the arc terms.
pub fn integrate_unicycle(g: &Pose2, u: &Twist2, dt: f64) -> Pose2 {
    let wt = u.omega * dt;
    // The series branch must take over well before 1-cos(wt) underflows;
    // at |wt| = 1e-4 the truncation error is ~1e-18 relative.
    let (dx_body, dy_body) = if wt.abs() < 1e-4 {
        // sin(wt)/w -> dt, (1-cos(wt))/w -> w*dt^2/2 with next-order terms
        (
            u.nu * dt * (1.0 - wt * wt / 6.0),
            u.nu * dt * (wt / 2.0 - wt * wt * wt / 24.0),
        )
    } else {
        (
            u.nu / u.omega * wt.sin(),
            u.nu / u.omega * (1.0 - wt.cos()),
        )
    };
    let (world_dx, world_dy) = {
        let (s, c) = g.theta.sin_cos();
        (c * dx_body - s * dy_body, s * dx_body + c * dy_body)
    };
    Pose2::new(g.x + world_dx, g.y + world_dy, g.theta + wt)
}

/// Coordinates of the relative pose `g^-1 g*`, with the heading component
/// taken as the shortest angle difference.
pub fn pose_error(g: &Pose2, g_star: &Pose2) -> PoseError {
    let rel = g.inverse().compose(g_star);
    PoseError {
        x_tilde: rel.x,
        y_tilde: rel.y,
        theta_tilde: rel.theta,
    }
}

/// Inverse-adjoint action of the mount on the embedded unicycle twist:
/// the camera-frame twist induced by the body twist `u`.
///
/// For h = (R, p), Ad_h^-1 (v, w) = (R^T v + w S R^T p, w) with
/// S = [[0, -1], [1, 0]].
pub fn robot_twist_to_camera(u: &Twist2, mount: &MountPose) -> PlanarCameraTwist {
    let (s, c) = mount.yaw.sin_cos();
    // R^T v with v = (nu, 0)
    let rv1 = c * u.nu;
    let rv2 = -s * u.nu;
    // R^T p
    let rp1 = c * mount.x + s * mount.y;
    let rp2 = -s * mount.x + c * mount.y;
    // S (R^T p) = (-rp2, rp1)
    PlanarCameraTwist {
        v1: rv1 - u.omega * rp2,
        v2: rv2 + u.omega * rp1,
        omega: u.omega,
    }
}
