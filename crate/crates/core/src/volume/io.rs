//! JSON scene description.
//!
//! ```json
//! {
//!   "primitives": [
//!     {"type": "sphere_shell", "center": [0, 0, 0], "radius": 1, "softness": 0.1,
//!      "density": 40, "albedo": [0.8, 0.6, 0.5], "k_d": 1.0, "k_s": {"16": 0.2}}
//!   ],
//!   "normals": "analytic",
//!   "controls": "bend.json",
//!   "alpha": 1.0,
//!   "residual": [0, 0, 0],
//!   "camera": {"eye": [0, 0, 4], "target": [0, 0, 0], "up": [0, 1, 0],
//!              "fov_deg": 40, "width": 128, "height": 128, "near": 2, "far": 6}
//! }
//! ```
//!
//! `controls` is resolved relative to the scene file.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::color::Rgb;
use crate::error::{Error, Result};
use crate::mls::{ControlSet, MlsField, DEFAULT_ALPHA};
use crate::volume::{Aabb, Camera, ConstantResidual, NormalSource, Primitive, VolumeScene};
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalMode {
    #[default]
    Analytic,
    Density,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraFile {
    pub eye: Vec3,
    pub target: Vec3,
    #[serde(default = "default_up")]
    pub up: Vec3,
    #[serde(default = "default_fov")]
    pub fov_deg: f64,
    pub width: usize,
    pub height: usize,
    #[serde(default = "default_near")]
    pub near: f64,
    #[serde(default = "default_far")]
    pub far: f64,
}

fn default_up() -> Vec3 {
    Vec3::y()
}
fn default_fov() -> f64 {
    40.0
}
fn default_near() -> f64 {
    2.0
}
fn default_far() -> f64 {
    6.0
}
fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneFile {
    pub primitives: Vec<Primitive>,
    #[serde(default)]
    pub normals: NormalMode,
    /// Finite-difference step for density normals; defaults to 1e-3 of the
    /// scene extent.
    #[serde(default)]
    pub normal_step: Option<f64>,
    #[serde(default)]
    pub bounds: Option<Aabb>,
    #[serde(default)]
    pub controls: Option<String>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub residual: Option<Rgb>,
    pub camera: CameraFile,
}

impl SceneFile {
    /// Builds the scene; `base` resolves a relative controls path.
    pub fn build(&self, base: &Path) -> Result<(VolumeScene, Camera)> {
        let mut scene = VolumeScene::new(self.primitives.clone())?;
        if let Some(b) = self.bounds {
            scene = scene.with_bounds(b);
        }
        if self.normals == NormalMode::Density {
            let extent = scene.bounds().max - scene.bounds().min;
            let step = self.normal_step.unwrap_or(1e-3 * extent.max());
            if !(step > 0.0) {
                return Err(Error::invalid("normal step must be positive"));
            }
            scene = scene.with_normals(NormalSource::Density { step });
        }
        if let Some(path) = &self.controls {
            let controls = ControlSet::load(base.join(path))?;
            scene = scene.with_deformation(MlsField::new(controls, self.alpha)?);
        }
        if let Some(r) = self.residual {
            scene = scene.with_residual(ConstantResidual(r));
        }
        let c = &self.camera;
        let camera = Camera::look_at(
            c.eye,
            c.target,
            c.up,
            c.fov_deg.to_radians(),
            (c.width, c.height),
            (c.near, c.far),
        )?;
        Ok((scene, camera))
    }
}

pub fn load_scene(path: impl AsRef<Path>) -> Result<(VolumeScene, Camera)> {
    let path = path.as_ref();
    let file: SceneFile = serde_json::from_slice(&std::fs::read(path)?)?;
    file.build(path.parent().unwrap_or(Path::new(".")))
}
