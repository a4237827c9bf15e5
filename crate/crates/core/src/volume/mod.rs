//! Procedural volumes rendered by emission-absorption ray marching with
//! Phong-decomposed point colors.
//!
//! Fields live in canonical space. With a deformation attached, a target-space
//! sample `p` is evaluated at `T(p)` and its canonical normal is carried back
//! with `R⁻¹`.

mod camera;
mod io;
mod march;
mod render;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::color::Rgb;
use crate::envmap::Direction;
use crate::error::{Error, Result};
use crate::mls::MlsField;
use crate::Vec3;

pub use camera::Camera;
pub use io::{load_scene, CameraFile, NormalMode, SceneFile};
pub use march::{march_ray, march_ray_traced, MarchStep, RayResult};
pub use render::{render, tonemap, RenderOutput, RenderSettings, DEFAULT_SAMPLES};

/// Smallest gradient norm accepted by [`normal_from_density`].
const MIN_GRADIENT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn contains(&self, p: &Vec3) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    pub fn union(&self, o: &Aabb) -> Aabb {
        Aabb {
            min: self.min.inf(&o.min),
            max: self.max.sup(&o.max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Shape {
    /// `exp(−‖p − c‖² / 2r²)`.
    GaussianBall { center: Vec3, radius: f64 },
    /// Solid sphere whose boundary is a smoothstep shell of width `softness`
    /// centered on `radius`.
    SphereShell {
        center: Vec3,
        radius: f64,
        softness: f64,
    },
    /// Constant density inside an axis-aligned box.
    Slab { min: Vec3, max: Vec3 },
}

fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

impl Shape {
    /// Unscaled density in `[0, 1]`.
    pub fn profile(&self, p: &Vec3) -> f64 {
        match self {
            Shape::GaussianBall { center, radius } => {
                (-(p - center).norm_squared() / (2.0 * radius * radius)).exp()
            }
            Shape::SphereShell {
                center,
                radius,
                softness,
            } => {
                let half = 0.5 * softness;
                smoothstep((radius + half - (p - center).norm()) / softness)
            }
            Shape::Slab { min, max } => {
                if (0..3).all(|i| p[i] >= min[i] && p[i] <= max[i]) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Outward surface direction; radial for round shapes, the nearest face
    /// for slabs.
    pub fn analytic_normal(&self, p: &Vec3) -> Vec3 {
        match self {
            Shape::GaussianBall { center, .. } | Shape::SphereShell { center, .. } => {
                let d = p - center;
                let n = d.norm();
                if n > 0.0 {
                    d / n
                } else {
                    Vec3::y()
                }
            }
            Shape::Slab { min, max } => {
                let mut best = (f64::INFINITY, Vec3::y());
                for i in 0..3 {
                    let mut axis = Vec3::zeros();
                    axis[i] = 1.0;
                    let lo = (p[i] - min[i]).abs();
                    let hi = (max[i] - p[i]).abs();
                    if lo < best.0 {
                        best = (lo, -axis);
                    }
                    if hi < best.0 {
                        best = (hi, axis);
                    }
                }
                best.1
            }
        }
    }

    pub fn bounds(&self) -> Aabb {
        match self {
            Shape::GaussianBall { center, radius } => {
                let e = Vec3::repeat(5.0 * radius);
                Aabb {
                    min: center - e,
                    max: center + e,
                }
            }
            Shape::SphereShell {
                center,
                radius,
                softness,
            } => {
                let e = Vec3::repeat(radius + softness);
                Aabb {
                    min: center - e,
                    max: center + e,
                }
            }
            Shape::Slab { min, max } => Aabb {
                min: *min,
                max: *max,
            },
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            Shape::GaussianBall { radius, .. } => *radius > 0.0,
            Shape::SphereShell {
                radius, softness, ..
            } => *radius > 0.0 && *softness > 0.0,
            Shape::Slab { min, max } => (0..3).all(|i| min[i] < max[i]),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("degenerate shape {self:?}")))
        }
    }
}

/// Surface parameters carried by a primitive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub albedo: Rgb,
    pub k_d: f64,
    /// Keyed by shininess exponent; written as a JSON object with string keys.
    #[serde(default, deserialize_with = "exponent_keys")]
    pub k_s: BTreeMap<u32, f64>,
}

// Flattened structs lose serde_json's integer-key handling, so parse keys by hand.
fn exponent_keys<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<BTreeMap<u32, f64>, D::Error> {
    use serde::de::Error as _;
    let raw = BTreeMap::<String, f64>::deserialize(d)?;
    raw.into_iter()
        .map(|(k, v)| {
            k.trim()
                .parse::<u32>()
                .map(|k| (k, v))
                .map_err(|_| D::Error::custom(format!("shininess key {k:?} is not an integer")))
        })
        .collect()
}

impl Material {
    pub fn lambertian(albedo: Rgb, k_d: f64) -> Self {
        Material {
            albedo,
            k_d,
            k_s: BTreeMap::new(),
        }
    }

    pub fn with_specular(mut self, shininess: u32, k: f64) -> Self {
        self.k_s.insert(shininess, k);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Primitive {
    #[serde(flatten)]
    pub shape: Shape,
    /// Peak density, in inverse length units.
    pub density: f64,
    #[serde(flatten)]
    pub material: Material,
}

impl Primitive {
    pub fn new(shape: Shape, density: f64, material: Material) -> Self {
        Primitive {
            shape,
            density,
            material,
        }
    }

    pub fn sigma(&self, p: &Vec3) -> f64 {
        self.density * self.shape.profile(p)
    }
}

/// Where canonical normals come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormalSource {
    Analytic,
    /// Unit negative density gradient by central differences with this step;
    /// falls back to the analytic normal where the gradient vanishes.
    Density {
        step: f64,
    },
}

/// Additive color correction `δc` evaluated per sample in canonical space.
pub trait ResidualHook: Send + Sync {
    fn residual(&self, p: &Vec3, albedo: Rgb) -> Rgb;
}

impl<F> ResidualHook for F
where
    F: Fn(&Vec3, Rgb) -> Rgb + Send + Sync,
{
    fn residual(&self, p: &Vec3, albedo: Rgb) -> Rgb {
        self(p, albedo)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroResidual;

impl ResidualHook for ZeroResidual {
    fn residual(&self, _: &Vec3, _: Rgb) -> Rgb {
        Rgb::BLACK
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConstantResidual(pub Rgb);

impl ResidualHook for ConstantResidual {
    fn residual(&self, _: &Vec3, _: Rgb) -> Rgb {
        self.0
    }
}

/// Blended attributes of all primitives at one canonical point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointAttributes {
    pub sigma: f64,
    pub albedo: Rgb,
    pub k_d: f64,
    pub k_s: BTreeMap<u32, f64>,
}

/// Union of density primitives with optional deformation. Materials of
/// overlapping primitives blend by density.
#[derive(Clone)]
pub struct VolumeScene {
    primitives: Vec<Primitive>,
    bounds: Aabb,
    pub normals: NormalSource,
    pub deformation: Option<MlsField>,
    pub residual: Arc<dyn ResidualHook>,
}

impl fmt::Debug for VolumeScene {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VolumeScene")
            .field("primitives", &self.primitives)
            .field("bounds", &self.bounds)
            .field("normals", &self.normals)
            .field("deformation", &self.deformation.is_some())
            .finish_non_exhaustive()
    }
}

impl VolumeScene {
    pub fn new(primitives: Vec<Primitive>) -> Result<Self> {
        for p in &primitives {
            p.shape.validate()?;
            if !(p.density >= 0.0 && p.density.is_finite()) {
                return Err(Error::invalid(format!("density {} must be ≥ 0", p.density)));
            }
            let a = p.material.albedo.to_array();
            if a.iter().any(|x| !(0.0..=1.0).contains(x)) {
                return Err(Error::invalid(format!("albedo {a:?} outside [0, 1]")));
            }
            let coeffs = std::iter::once(&p.material.k_d).chain(p.material.k_s.values());
            if coeffs.into_iter().any(|k| !(*k >= 0.0 && k.is_finite())) {
                return Err(Error::invalid(
                    "shading coefficients must be finite and ≥ 0",
                ));
            }
        }
        let bounds = primitives
            .iter()
            .map(|p| p.shape.bounds())
            .reduce(|a, b| a.union(&b))
            .unwrap_or(Aabb {
                min: Vec3::zeros(),
                max: Vec3::zeros(),
            });
        Ok(VolumeScene {
            primitives,
            bounds,
            normals: NormalSource::Analytic,
            deformation: None,
            residual: Arc::new(ZeroResidual),
        })
    }

    pub fn with_bounds(mut self, bounds: Aabb) -> Self {
        self.bounds = bounds;
        self
    }

    pub fn with_normals(mut self, normals: NormalSource) -> Self {
        self.normals = normals;
        self
    }

    pub fn with_deformation(mut self, field: MlsField) -> Self {
        self.deformation = Some(field);
        self
    }

    pub fn with_residual(mut self, hook: impl ResidualHook + 'static) -> Self {
        self.residual = Arc::new(hook);
        self
    }

    pub fn primitives(&self) -> &[Primitive] {
        &self.primitives
    }

    pub fn bounds(&self) -> &Aabb {
        &self.bounds
    }

    /// Canonical-space density; zero outside the bounds.
    pub fn density(&self, p: &Vec3) -> f64 {
        if !self.bounds.contains(p) {
            return 0.0;
        }
        self.primitives.iter().map(|q| q.sigma(p)).sum()
    }

    pub fn attributes(&self, p: &Vec3) -> PointAttributes {
        let mut out = PointAttributes {
            sigma: 0.0,
            albedo: Rgb::BLACK,
            k_d: 0.0,
            k_s: BTreeMap::new(),
        };
        if !self.bounds.contains(p) {
            return out;
        }
        let sigmas: Vec<f64> = self.primitives.iter().map(|q| q.sigma(p)).collect();
        out.sigma = sigmas.iter().sum();
        if out.sigma <= 0.0 {
            return out;
        }
        for (prim, s) in self.primitives.iter().zip(&sigmas) {
            let w = s / out.sigma;
            if w == 0.0 {
                continue;
            }
            out.albedo += prim.material.albedo * w;
            out.k_d += prim.material.k_d * w;
            for (n, k) in &prim.material.k_s {
                *out.k_s.entry(*n).or_insert(0.0) += k * w;
            }
        }
        out
    }

    fn analytic_normal(&self, p: &Vec3) -> Direction {
        let blended = self
            .primitives
            .iter()
            .map(|q| q.shape.analytic_normal(p) * q.sigma(p))
            .sum::<Vec3>();
        Direction::normalize(blended)
            .or_else(|| {
                self.primitives
                    .first()
                    .and_then(|q| Direction::normalize(q.shape.analytic_normal(p)))
            })
            .unwrap_or(Direction::UP)
    }

    /// Canonical-space normal at `p`.
    pub fn canonical_normal(&self, p: &Vec3) -> Direction {
        match self.normals {
            NormalSource::Analytic => self.analytic_normal(p),
            NormalSource::Density { step } => normal_from_density(|q| self.density(q), p, step)
                .unwrap_or_else(|_| self.analytic_normal(p)),
        }
    }
}

/// `−∇σ / ‖∇σ‖` by central differences with step `h`.
pub fn normal_from_density(density: impl Fn(&Vec3) -> f64, p: &Vec3, h: f64) -> Result<Direction> {
    let mut grad = Vec3::zeros();
    for i in 0..3 {
        let mut e = Vec3::zeros();
        e[i] = h;
        grad[i] = (density(&(p + e)) - density(&(p - e))) / (2.0 * h);
    }
    if !(grad.norm() > MIN_GRADIENT) {
        return Err(Error::UndefinedNormal(p.x, p.y, p.z));
    }
    Ok(Direction::normalize(-grad).expect("gradient is nonzero"))
}
