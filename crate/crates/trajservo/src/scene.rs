//! Synthetic landmark worlds: deterministic seeded generation over a
//! configured volume, plus a uniform grid index so per-frame visibility
//! queries only touch nearby landmarks.

use crate::camera::{is_visible, to_camera_frame, CameraIntrinsics, CameraPoint};
use crate::error::{Result, TsError};
use crate::se2::{MountPose, Pose2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A static 3D world point with a persistent identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Landmark {
    pub id: u64,
    pub position: [f64; 3],
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SceneConfig {
    pub n_landmarks: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    /// Landmark heights relative to the camera optical-center plane.
    pub z_min: f64,
    pub z_max: f64,
}

impl Default for SceneConfig {
    fn default() -> Self {
        SceneConfig {
            n_landmarks: 3000,
            x_min: -6.0,
            x_max: 26.0,
            y_min: -13.0,
            y_max: 13.0,
            z_min: -0.4,
            z_max: 1.0,
        }
    }
}

impl SceneConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_landmarks == 0 {
            return Err(TsError::InvalidSceneConfig(
                "landmark count must be positive".into(),
            ));
        }
        if self.x_min >= self.x_max || self.y_min >= self.y_max || self.z_min >= self.z_max {
            return Err(TsError::InvalidSceneConfig("degenerate bounds".into()));
        }
        Ok(())
    }
}

pub fn generate_scene(config: &SceneConfig, seed: u64) -> Result<Vec<Landmark>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..config.n_landmarks)
        .map(|id| Landmark {
            id: id as u64,
            position: [
                rng.gen_range(config.x_min..config.x_max),
                rng.gen_range(config.y_min..config.y_max),
                rng.gen_range(config.z_min..config.z_max),
            ],
        })
        .collect())
}

/// Grid-bucketed landmark set; queries return candidates within a radius
/// of a planar position, in ascending id order.
pub struct Scene {
    landmarks: Vec<Landmark>,
    cell: f64,
    x0: f64,
    y0: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl Scene {
    pub fn new(config: &SceneConfig, seed: u64) -> Result<Self> {
        let landmarks = generate_scene(config, seed)?;
        let cell = 2.0;
        let x0 = config.x_min;
        let y0 = config.y_min;
        let nx = ((config.x_max - config.x_min) / cell).ceil() as usize + 1;
        let ny = ((config.y_max - config.y_min) / cell).ceil() as usize + 1;
        let mut buckets = vec![Vec::new(); nx * ny];
        for lm in &landmarks {
            let ix = ((lm.position[0] - x0) / cell) as usize;
            let iy = ((lm.position[1] - y0) / cell) as usize;
            buckets[iy * nx + ix].push(lm.id as u32);
        }
        Ok(Scene {
            landmarks,
            cell,
            x0,
            y0,
            nx,
            ny,
            buckets,
        })
    }

    pub fn landmarks(&self) -> &[Landmark] {
        &self.landmarks
    }

    pub fn landmark(&self, id: u64) -> &Landmark {
        &self.landmarks[id as usize]
    }

    /// Landmarks whose planar position lies within `radius` of (x, y),
    /// ascending by id.
    pub fn candidates_near(&self, x: f64, y: f64, radius: f64) -> Vec<u64> {
        let lo_x = (((x - radius - self.x0) / self.cell).floor().max(0.0)) as usize;
        let lo_y = (((y - radius - self.y0) / self.cell).floor().max(0.0)) as usize;
        let hi_x = ((((x + radius - self.x0) / self.cell).ceil()) as usize).min(self.nx - 1);
        let hi_y = ((((y + radius - self.y0) / self.cell).ceil()) as usize).min(self.ny - 1);
        let r2 = radius * radius;
        let mut out = Vec::new();
        for iy in lo_y..=hi_y {
            for ix in lo_x..=hi_x {
                for &id in &self.buckets[iy * self.nx + ix] {
                    let p = &self.landmarks[id as usize].position;
                    let dx = p[0] - x;
                    let dy = p[1] - y;
                    if dx * dx + dy * dy <= r2 {
                        out.push(id as u64);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// All landmarks visible from the given robot pose, ascending by id,
    /// with their camera-frame points.
    pub fn visible_from(
        &self,
        g: &Pose2,
        mount: &MountPose,
        k: &CameraIntrinsics,
    ) -> Vec<(u64, CameraPoint)> {
        let cam = g.compose(&mount.as_pose());
        self.candidates_near(cam.x, cam.y, k.max_depth + 0.1)
            .into_iter()
            .filter_map(|id| {
                let q = to_camera_frame(&self.landmarks[id as usize].position, g, mount);
                is_visible(&q, k).then_some((id, q))
            })
            .collect()
    }
}
