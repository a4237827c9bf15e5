//! Per-point Phong composition against baked lightmaps:
//! `c = k_d · a ⊙ s_d(n) + Σₖ k_s(k) · s_s(k, r) + δc` with `r` the view
//! direction mirrored about `n`.

use std::collections::BTreeMap;

use crate::baker::{LightMapSet, Lobe};
use crate::color::Rgb;
use crate::envmap::Direction;
use crate::error::{Error, Result};
use crate::Mat3;

/// Mirror of `v` about `n`: `2(n·v)n − v`. Both point away from the surface.
pub fn reflect(n: Direction, v: Direction) -> Direction {
    let n = n.as_vec();
    let v = v.as_vec();
    let r = n * (2.0 * n.dot(v)) - v;
    Direction::normalize(r).expect("reflection of unit vectors is unit")
}

/// Canonical normal carried to target space, `R⁻¹·nᶜ`.
pub fn pose_normal(rotation: &Mat3, canonical: Direction) -> Direction {
    let n = crate::mls::apply_to_normal(rotation, canonical.as_vec());
    Direction::normalize(n).expect("rotated unit vector is nonzero")
}

/// Attributes of one shading point.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSample {
    /// Target-space normal.
    pub normal: Direction,
    pub canonical_normal: Direction,
    pub albedo: Rgb,
    pub k_d: f64,
    /// Specular coefficient per shininess exponent.
    pub k_s: BTreeMap<u32, f64>,
    pub residual: Rgb,
}

impl SurfaceSample {
    /// Diffuse-only sample with identical target and canonical normal.
    pub fn lambertian(normal: Direction, albedo: Rgb, k_d: f64) -> Self {
        SurfaceSample {
            normal,
            canonical_normal: normal,
            albedo,
            k_d,
            k_s: BTreeMap::new(),
            residual: Rgb::BLACK,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let a = self.albedo.to_array();
        if a.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::invalid(format!("albedo {a:?} outside [0, 1]")));
        }
        let coeffs = std::iter::once(self.k_d).chain(self.k_s.values().copied());
        if coeffs.into_iter().any(|k| !(k >= 0.0 && k.is_finite())) {
            return Err(Error::invalid(
                "shading coefficients must be finite and nonnegative",
            ));
        }
        if !self.residual.is_finite() {
            return Err(Error::invalid("residual must be finite"));
        }
        Ok(())
    }
}

/// Total color and its intrinsic parts. `color = (diffuse + specular) + residual`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shade {
    pub color: Rgb,
    pub diffuse: Rgb,
    pub specular: Rgb,
}

/// Shades `sample` seen from direction `v` (surface towards viewer).
pub fn shade_point(sample: &SurfaceSample, v: Direction, lights: &LightMapSet) -> Result<Shade> {
    let s_d = lights.sample(Lobe::Diffuse, sample.normal)?;
    let diffuse = sample.albedo.hadamard(s_d) * sample.k_d;
    let r = reflect(sample.normal, v);
    let mut specular = Rgb::BLACK;
    for (&n, &k) in &sample.k_s {
        specular += lights.sample(Lobe::Specular(n), r)? * k;
    }
    Ok(Shade {
        color: diffuse + specular + sample.residual,
        diffuse,
        specular,
    })
}
