//! Phong-lobe prefiltering of environment maps ("lightmap baking").
//!
//! The diffuse lightmap stores `s_d(n) = Σ L(l) max(0, n·l) Δω(l)` for every
//! normal `n`, and each specular lightmap stores
//! `s_s(k, r) = Σ L(l) max(0, r·l)^k Δω(l)` for every reflected view direction
//! `r`. The sums run over all environment texels with their exact row solid
//! angles. Lobes are not normalized.
//!
//! [`Oracle`] evaluates the same sums at arbitrary directions; it is the
//! per-query `O(N)` path that a lightmap lookup replaces.

mod bundle;

pub use bundle::{load_bundle, read_bundle, save_bundle, write_bundle};

use crate::color::Rgb;
use crate::envmap::{Direction, EnvironmentMap, LatLongMap};
use crate::error::{Error, Result};
use crate::{par, Vec3};

pub const DEFAULT_SHININESS: [u32; 4] = [1, 16, 32, 64];
pub const DEFAULT_RESOLUTION: (usize, usize) = (128, 64);

/// Which lobe a lightmap holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lobe {
    Diffuse,
    Specular(u32),
}

/// Environment texels as (direction, radiance × solid angle), in row-major
/// order. Black texels contribute nothing and are dropped.
#[derive(Debug, Clone)]
struct Emitters {
    dirs: Vec<Vec3>,
    power: Vec<Rgb>,
}

impl Emitters {
    fn new(env: &EnvironmentMap) -> Self {
        let mut dirs = Vec::new();
        let mut power = Vec::new();
        for v in 0..env.height() {
            let dw = env.texel_solid_angle(v);
            for u in 0..env.width() {
                let l = env.get(u, v);
                if l == Rgb::BLACK {
                    continue;
                }
                dirs.push(env.texel_to_direction(u, v).into_vec());
                power.push(l * dw);
            }
        }
        Emitters { dirs, power }
    }

    /// Serial sum in texel order; the fixed order keeps results bit-stable.
    #[inline]
    fn integrate(&self, axis: &Vec3, lobe: Lobe) -> Rgb {
        match lobe {
            Lobe::Diffuse => self.sum(axis, |c| c),
            Lobe::Specular(n) => self.sum(axis, |c| c.powi(n as i32)),
        }
    }

    #[inline(always)]
    fn sum(&self, axis: &Vec3, weight: impl Fn(f64) -> f64) -> Rgb {
        let mut acc = Rgb::BLACK;
        for (l, p) in self.dirs.iter().zip(&self.power) {
            let c = axis.dot(l);
            if c > 0.0 {
                acc += *p * weight(c);
            }
        }
        acc
    }
}

fn check_resolution((w, h): (usize, usize)) -> Result<()> {
    if w == 0 || h == 0 {
        return Err(Error::invalid(format!(
            "lightmap resolution {w}×{h} is empty"
        )));
    }
    if w != 2 * h {
        return Err(Error::Aspect {
            width: w,
            height: h,
        });
    }
    Ok(())
}

fn bake_lobe(
    emitters: &Emitters,
    lobe: Lobe,
    (w, h): (usize, usize),
    threads: Option<usize>,
) -> Result<LatLongMap> {
    let mut grid = LatLongMap::filled(w, h, Rgb::BLACK)?;
    let values = par::map_indexed(w * h, threads, |i| {
        let axis = grid.texel_to_direction(i % w, i / w).into_vec();
        emitters.integrate(&axis, lobe)
    });
    for (i, c) in values.into_iter().enumerate() {
        grid.set(i % w, i / w, c);
    }
    Ok(grid)
}

/// Diffuse lightmap indexed by surface normal.
pub fn bake_diffuse(env: &EnvironmentMap, resolution: (usize, usize)) -> Result<LatLongMap> {
    check_resolution(resolution)?;
    bake_lobe(&Emitters::new(env), Lobe::Diffuse, resolution, None)
}

/// Specular lightmap for one shininess exponent, indexed by reflected view
/// direction.
pub fn bake_specular(
    env: &EnvironmentMap,
    shininess: u32,
    resolution: (usize, usize),
) -> Result<LatLongMap> {
    check_resolution(resolution)?;
    if shininess == 0 {
        return Err(Error::invalid("shininess must be at least 1"));
    }
    bake_lobe(
        &Emitters::new(env),
        Lobe::Specular(shininess),
        resolution,
        None,
    )
}

pub fn bake_all(
    env: &EnvironmentMap,
    shininess: &[u32],
    resolution: (usize, usize),
) -> Result<LightMapSet> {
    bake_all_with_threads(env, shininess, resolution, None)
}

/// Bakes the diffuse map and one specular map per exponent. Output is
/// bit-identical for any `threads`.
pub fn bake_all_with_threads(
    env: &EnvironmentMap,
    shininess: &[u32],
    resolution: (usize, usize),
    threads: Option<usize>,
) -> Result<LightMapSet> {
    check_shininess(shininess)?;
    check_resolution(resolution)?;
    let emitters = Emitters::new(env);
    let diffuse = bake_lobe(&emitters, Lobe::Diffuse, resolution, threads)?;
    let specular = shininess
        .iter()
        .map(|&n| {
            Ok((
                n,
                bake_lobe(&emitters, Lobe::Specular(n), resolution, threads)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    LightMapSet::new(diffuse, specular)
}

fn check_shininess(shininess: &[u32]) -> Result<()> {
    if shininess.is_empty() {
        return Err(Error::invalid("shininess set is empty"));
    }
    if shininess[0] == 0 {
        return Err(Error::invalid("shininess must be at least 1"));
    }
    if shininess.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::invalid(format!(
            "shininess set {shininess:?} is not strictly increasing"
        )));
    }
    Ok(())
}

/// Baked diffuse map plus specular maps keyed by shininess, sharing one
/// resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct LightMapSet {
    diffuse: LatLongMap,
    specular: Vec<(u32, LatLongMap)>,
}

impl LightMapSet {
    pub fn new(diffuse: LatLongMap, specular: Vec<(u32, LatLongMap)>) -> Result<Self> {
        let exps: Vec<u32> = specular.iter().map(|(n, _)| *n).collect();
        check_shininess(&exps)?;
        let res = (diffuse.width(), diffuse.height());
        check_resolution(res)?;
        for (_, m) in &specular {
            if (m.width(), m.height()) != res {
                return Err(Error::invalid("lightmaps differ in resolution"));
            }
        }
        for map in std::iter::once(&diffuse).chain(specular.iter().map(|(_, m)| m)) {
            if let Some((i, c)) = map
                .texels()
                .iter()
                .enumerate()
                .find(|(_, c)| !c.is_finite() || c.r < 0.0 || c.g < 0.0 || c.b < 0.0)
            {
                return Err(Error::BadTexel {
                    u: i % res.0,
                    v: i / res.0,
                    value: c.r.min(c.g).min(c.b),
                });
            }
        }
        Ok(LightMapSet { diffuse, specular })
    }

    pub fn resolution(&self) -> (usize, usize) {
        (self.diffuse.width(), self.diffuse.height())
    }

    pub fn diffuse(&self) -> &LatLongMap {
        &self.diffuse
    }

    pub fn specular(&self) -> &[(u32, LatLongMap)] {
        &self.specular
    }

    pub fn exponents(&self) -> Vec<u32> {
        self.specular.iter().map(|(n, _)| *n).collect()
    }

    pub fn map(&self, lobe: Lobe) -> Result<&LatLongMap> {
        match lobe {
            Lobe::Diffuse => Ok(&self.diffuse),
            Lobe::Specular(n) => self
                .specular
                .iter()
                .find(|(k, _)| *k == n)
                .map(|(_, m)| m)
                .ok_or_else(|| Error::MissingExponent {
                    requested: n,
                    available: self.exponents(),
                }),
        }
    }

    /// Bilinear `O(1)` lookup.
    pub fn sample(&self, lobe: Lobe, dir: Direction) -> Result<Rgb> {
        Ok(self.map(lobe)?.sample(dir))
    }

    /// All maps multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        LightMapSet {
            diffuse: self.diffuse.scaled(s),
            specular: self
                .specular
                .iter()
                .map(|(n, m)| (*n, m.scaled(s)))
                .collect(),
        }
    }

    /// Rotation about `+y` by quarter turns, see [`LatLongMap::rotate_y_quarter`].
    pub fn rotate_y_quarter(&self, quarter_turns: i32) -> Result<Self> {
        Ok(LightMapSet {
            diffuse: self.diffuse.rotate_y_quarter(quarter_turns)?,
            specular: self
                .specular
                .iter()
                .map(|(n, m)| Ok((*n, m.rotate_y_quarter(quarter_turns)?)))
                .collect::<Result<_>>()?,
        })
    }
}

/// Exact shading values for one query.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleShade {
    pub diffuse: Rgb,
    pub specular: Vec<(u32, Rgb)>,
}

/// Brute-force shading: sums the whole environment for every query.
#[derive(Debug, Clone)]
pub struct Oracle {
    emitters: Emitters,
}

impl Oracle {
    pub fn new(env: &EnvironmentMap) -> Self {
        Oracle {
            emitters: Emitters::new(env),
        }
    }

    pub fn diffuse(&self, n: Direction) -> Rgb {
        self.emitters.integrate(n.as_vec(), Lobe::Diffuse)
    }

    pub fn specular(&self, shininess: u32, r: Direction) -> Rgb {
        self.emitters
            .integrate(r.as_vec(), Lobe::Specular(shininess))
    }

    pub fn shade(&self, n: Direction, r: Direction, shininess: &[u32]) -> OracleShade {
        OracleShade {
            diffuse: self.diffuse(n),
            specular: shininess
                .iter()
                .map(|&k| (k, self.specular(k, r)))
                .collect(),
        }
    }
}

/// One-shot brute-force shading at normal `n` and reflected direction `r`.
pub fn oracle_shade(
    env: &EnvironmentMap,
    n: Direction,
    r: Direction,
    shininess: &[u32],
) -> OracleShade {
    Oracle::new(env).shade(n, r, shininess)
}
