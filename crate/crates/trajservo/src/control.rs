//! Steering laws: feature-space trajectory servoing and pose-space
//! feedback. Both command the reference forward speed and compute only
//! the turn rate; the turn rate is saturated to the platform limit.

use crate::camera::{stack_jacobian, CameraIntrinsics, CameraPoint, PixelPoint};
use crate::error::{Result, TsError};
use crate::se2::{MountPose, PoseError, Twist2};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GainConfig {
    /// Feature-error feedback gain.
    pub lambda: f64,
    /// Heading-error gain of the pose controller.
    pub k_theta: f64,
    /// Lateral-error gain of the pose controller.
    pub k_y: f64,
    /// Turn-rate saturation, rad/s.
    pub omega_max: f64,
    /// Threshold on the squared norm of the turn-rate Jacobian column
    /// below which the pseudo-inverse is considered degenerate.
    pub pinv_eps: f64,
    /// Minimum matched features for a feature-space command.
    pub min_features: usize,
}

impl Default for GainConfig {
    fn default() -> Self {
        GainConfig {
            lambda: 1.5,
            k_theta: 2.0,
            k_y: 4.0,
            omega_max: 1.5,
            pinv_eps: 1e-9,
            min_features: 2,
        }
    }
}

/// One matched feature: the measured image state and the desired one.
#[derive(Debug, Clone, Copy)]
pub struct FeaturePair {
    pub q: CameraPoint,
    pub pixel: PixelPoint,
    pub q_star: CameraPoint,
    pub pixel_star: PixelPoint,
}

#[derive(Debug, Clone, Copy)]
pub struct TsCommand {
    pub twist: Twist2,
    /// Euclidean norm of the stacked pixel error.
    pub residual_norm: f64,
}

/// Feature-space steering: the forward speed is the reference speed and
/// the turn rate is the least-squares solution of
/// L2 w = L1*(q*,s*) nu* + L2*(q*,s*) w* - L1(q,s) nu* - lambda (s - s*).
pub fn ts_control(
    pairs: &[FeaturePair],
    u_star: &Twist2,
    camera: &CameraIntrinsics,
    mount: &MountPose,
    gains: &GainConfig,
) -> Result<TsCommand> {
    if pairs.len() < gains.min_features {
        return Err(TsError::FeatureStarvation {
            have: pairs.len(),
            need: gains.min_features,
        });
    }
    let measured: Vec<(CameraPoint, PixelPoint)> = pairs.iter().map(|p| (p.q, p.pixel)).collect();
    let desired: Vec<(CameraPoint, PixelPoint)> =
        pairs.iter().map(|p| (p.q_star, p.pixel_star)).collect();
    let l = stack_jacobian(&measured, camera, mount)?;
    let l_star = stack_jacobian(&desired, camera, mount)?;

    let mut num = 0.0;
    let mut den = 0.0;
    let mut err_sq = 0.0;
    for (i, p) in pairs.iter().enumerate() {
        let e = [p.pixel.u - p.pixel_star.u, p.pixel.v - p.pixel_star.v];
        for r in 0..2 {
            let row = 2 * i + r;
            let b = l_star.l1[row] * u_star.nu + l_star.l2[row] * u_star.omega
                - l.l1[row] * u_star.nu
                - gains.lambda * e[r];
            num += l.l2[row] * b;
            den += l.l2[row] * l.l2[row];
            err_sq += e[r] * e[r];
        }
    }
    if den < gains.pinv_eps {
        return Err(TsError::DegenerateJacobian(den));
    }
    let omega = (num / den).clamp(-gains.omega_max, gains.omega_max);
    Ok(TsCommand {
        twist: Twist2::new(u_star.nu, omega),
        residual_norm: err_sq.sqrt(),
    })
}

/// Pose-space steering from the relative pose error, with the reference
/// turn rate as feedforward.
pub fn pose_control(err: &PoseError, u_star: &Twist2, gains: &GainConfig) -> Twist2 {
    let omega = (gains.k_theta * err.theta_tilde + gains.k_y * err.y_tilde + u_star.omega)
        .clamp(-gains.omega_max, gains.omega_max);
    Twist2::new(u_star.nu, omega)
}
