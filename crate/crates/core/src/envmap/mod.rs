//! Equirectangular (lat-long) maps over the unit sphere.
//!
//! Row `v` spans polar angle `θ ∈ [vπ/H, (v+1)π/H]` measured from `+y`, column
//! `u` spans azimuth `φ ∈ [2πu/W, 2π(u+1)/W]` measured from `+x` towards `+z`.
//! A direction is `(sinθ cosφ, cosθ, sinθ sinφ)`.

mod hdr;
pub(crate) mod pfm;

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use crate::color::Rgb;
use crate::error::{Error, Result};
use crate::Vec3;

pub use hdr::{decode_rgbe, read_hdr, write_hdr};
pub use pfm::{read_pfm, write_pfm};

const UNIT_TOLERANCE: f64 = 1e-6;

/// A unit vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction(Vec3);

impl Direction {
    pub const UP: Direction = Direction(Vec3::new(0.0, 1.0, 0.0));

    /// Checked constructor: the components must already form a unit vector.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::from_unit(Vec3::new(x, y, z))
    }

    pub fn from_unit(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !n.is_finite() || (n - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::invalid(format!(
                "direction has norm {n}, expected 1"
            )));
        }
        Ok(Direction(v))
    }

    /// Normalizes `v`; `None` for zero or non-finite input.
    pub fn normalize(v: Vec3) -> Option<Self> {
        let n = v.norm();
        (n > 0.0 && n.is_finite()).then(|| Direction(v / n))
    }

    /// Direction at polar angle `theta` from `+y` and azimuth `phi`.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Direction(Vec3::new(st * cp, ct, st * sp))
    }

    /// `(theta, phi)` with `phi` in `[0, 2π)`.
    pub fn to_spherical(self) -> (f64, f64) {
        let theta = self.0.y.clamp(-1.0, 1.0).acos();
        let mut phi = self.0.z.atan2(self.0.x);
        if phi < 0.0 {
            phi += 2.0 * PI;
        }
        if phi >= 2.0 * PI {
            phi = 0.0;
        }
        (theta, phi)
    }

    pub fn as_vec(&self) -> &Vec3 {
        &self.0
    }

    pub fn into_vec(self) -> Vec3 {
        self.0
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn x(&self) -> f64 {
        self.0.x
    }
    pub fn y(&self) -> f64 {
        self.0.y
    }
    pub fn z(&self) -> f64 {
        self.0.z
    }
}

impl std::ops::Neg for Direction {
    type Output = Direction;
    fn neg(self) -> Direction {
        Direction(-self.0)
    }
}

/// Continuous texel coordinates in edge convention: texel `(u, v)` covers
/// `[u, u+1) × [v, v+1)`, so its center sits at `(u + 0.5, v + 0.5)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TexelCoord {
    pub u: f64,
    pub v: f64,
}

/// Row-major RGB grid on the sphere. Used for environment maps and lightmaps.
#[derive(Debug, Clone, PartialEq)]
pub struct LatLongMap {
    width: usize,
    height: usize,
    texels: Vec<Rgb>,
}

impl LatLongMap {
    pub fn new(width: usize, height: usize, texels: Vec<Rgb>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(format!("empty map {width}×{height}")));
        }
        if texels.len() != width * height {
            return Err(Error::invalid(format!(
                "{} texels for a {width}×{height} map",
                texels.len()
            )));
        }
        Ok(LatLongMap {
            width,
            height,
            texels,
        })
    }

    pub fn filled(width: usize, height: usize, value: Rgb) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Evaluates `f` at every texel-center direction.
    pub fn from_fn(width: usize, height: usize, f: impl Fn(Direction) -> Rgb) -> Result<Self> {
        let mut map = Self::filled(width, height, Rgb::BLACK)?;
        for v in 0..height {
            for u in 0..width {
                let d = map.texel_to_direction(u, v);
                map.texels[v * width + u] = f(d);
            }
        }
        Ok(map)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn texels(&self) -> &[Rgb] {
        &self.texels
    }

    pub fn into_texels(self) -> Vec<Rgb> {
        self.texels
    }

    pub fn get(&self, u: usize, v: usize) -> Rgb {
        self.texels[v * self.width + u]
    }

    pub fn set(&mut self, u: usize, v: usize, value: Rgb) {
        self.texels[v * self.width + u] = value;
    }

    /// Direction through the center of texel `(u, v)`.
    ///
    /// Panics if the indices are out of range.
    pub fn texel_to_direction(&self, u: usize, v: usize) -> Direction {
        assert!(
            u < self.width && v < self.height,
            "texel ({u}, {v}) outside {}×{} map",
            self.width,
            self.height
        );
        let theta = (v as f64 + 0.5) * PI / self.height as f64;
        let phi = (u as f64 + 0.5) * 2.0 * PI / self.width as f64;
        Direction::from_spherical(theta, phi)
    }

    /// Continuous coordinates of `dir`. Azimuth lands in `[0, W)`, the polar
    /// coordinate in `[0, H]` with the poles on the boundary rows.
    pub fn direction_to_texel(&self, dir: Direction) -> TexelCoord {
        let (theta, phi) = dir.to_spherical();
        let u = (phi * self.width as f64 / (2.0 * PI)).rem_euclid(self.width as f64);
        let v = (theta * self.height as f64 / PI).clamp(0.0, self.height as f64);
        TexelCoord { u, v }
    }

    /// Solid angle subtended by any texel of row `v`, in steradians.
    pub fn texel_solid_angle(&self, v: usize) -> f64 {
        assert!(
            v < self.height,
            "row {v} outside map of height {}",
            self.height
        );
        let h = self.height as f64;
        let top = (v as f64 * PI / h).cos();
        let bottom = ((v + 1) as f64 * PI / h).cos();
        2.0 * PI / self.width as f64 * (top - bottom)
    }

    /// Bilinear lookup with periodic azimuth and clamped polar coordinate.
    pub fn sample(&self, dir: Direction) -> Rgb {
        let TexelCoord { u, v } = self.direction_to_texel(dir);
        let x = u - 0.5;
        let y = (v - 0.5).clamp(0.0, (self.height - 1) as f64);

        let x0 = x.floor();
        let fx = x - x0;
        let w = self.width as i64;
        let u0 = (x0 as i64).rem_euclid(w) as usize;
        let u1 = (u0 + 1) % self.width;

        let y0 = y.floor();
        let fy = y - y0;
        let v0 = y0 as usize;
        let v1 = (v0 + 1).min(self.height - 1);

        let top = self.get(u0, v0) * (1.0 - fx) + self.get(u1, v0) * fx;
        let bottom = self.get(u0, v1) * (1.0 - fx) + self.get(u1, v1) * fx;
        top * (1.0 - fy) + bottom * fy
    }

    /// Rotates the map about `+y` by `quarter_turns × 90°`, so that the value
    /// seen along `R·d` afterwards equals the value along `d` before.
    ///
    /// Requires the width to be a multiple of four, which makes the rotation
    /// an exact permutation of texels.
    pub fn rotate_y_quarter(&self, quarter_turns: i32) -> Result<Self> {
        if !self.width.is_multiple_of(4) {
            return Err(Error::invalid(format!(
                "width {} is not a multiple of 4",
                self.width
            )));
        }
        let shift = (quarter_turns.rem_euclid(4) as usize) * self.width / 4;
        let mut out = self.clone();
        for v in 0..self.height {
            for u in 0..self.width {
                // φ grows from +x towards +z; rotation R_y(β) maps φ to φ - β.
                let dst = (u + self.width - shift) % self.width;
                out.set(dst, v, self.get(u, v));
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, s: f64) -> Self {
        LatLongMap {
            width: self.width,
            height: self.height,
            texels: self.texels.iter().map(|&c| c * s).collect(),
        }
    }
}

/// Rotation about `+y` by `quarter_turns × 90°` matching [`LatLongMap::rotate_y_quarter`].
pub fn y_quarter_rotation(quarter_turns: i32) -> crate::Mat3 {
    let angle = quarter_turns as f64 * std::f64::consts::FRAC_PI_2;
    *nalgebra::Rotation3::from_axis_angle(&Vec3::y_axis(), angle).matrix()
}

/// HDR radiance over the sphere, `width = 2 × height`, all values finite and
/// nonnegative. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentMap(LatLongMap);

impl EnvironmentMap {
    pub fn new(map: LatLongMap) -> Result<Self> {
        if map.width != 2 * map.height {
            return Err(Error::Aspect {
                width: map.width,
                height: map.height,
            });
        }
        for (i, c) in map.texels.iter().enumerate() {
            for value in c.to_array() {
                if !value.is_finite() || value < 0.0 {
                    return Err(Error::BadTexel {
                        u: i % map.width,
                        v: i / map.width,
                        value,
                    });
                }
            }
        }
        Ok(EnvironmentMap(map))
    }

    pub fn constant(width: usize, height: usize, value: Rgb) -> Result<Self> {
        Self::new(LatLongMap::filled(width, height, value)?)
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(Direction) -> Rgb) -> Result<Self> {
        Self::new(LatLongMap::from_fn(width, height, f)?)
    }

    pub fn map(&self) -> &LatLongMap {
        &self.0
    }

    pub fn into_map(self) -> LatLongMap {
        self.0
    }

    pub fn rotate_y_quarter(&self, quarter_turns: i32) -> Result<Self> {
        Ok(EnvironmentMap(self.0.rotate_y_quarter(quarter_turns)?))
    }
}

impl std::ops::Deref for EnvironmentMap {
    type Target = LatLongMap;
    fn deref(&self) -> &LatLongMap {
        &self.0
    }
}

/// Loads a Radiance `.hdr` or a `.pfm` file, sniffing the magic bytes.
pub fn load_hdr(path: impl AsRef<Path>) -> Result<EnvironmentMap> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    let map = if bytes.starts_with(b"PF") || bytes.starts_with(b"Pf") {
        read_pfm(&bytes)?
    } else {
        read_hdr(&bytes)?
    };
    EnvironmentMap::new(map)
}

/// Smooth outdoor-style test environment: a bluish sky brightening towards
/// the zenith, a warm ground bounce and a broad sun lobe. Every texel is
/// strictly positive.
pub fn sun_and_sky(width: usize, height: usize) -> Result<EnvironmentMap> {
    let sun = Vec3::new(0.5, 0.6, 0.3).normalize();
    EnvironmentMap::from_fn(width, height, |d| {
        let up = d.y().max(0.0);
        let down = (-d.y()).max(0.0);
        let glow = 4.0 * (8.0 * (d.as_vec().dot(&sun) - 1.0)).exp();
        Rgb::new(
            0.35 + 0.2 * up + 0.15 * down,
            0.4 + 0.3 * up + 0.1 * down,
            0.5 + 0.6 * up + 0.05 * down,
        ) + Rgb::new(1.0, 0.85, 0.6) * glow
    })
}
