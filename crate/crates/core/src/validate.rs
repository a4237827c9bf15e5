//! Self-check table of closed-form cases: constant-environment lobe
//! integrals, a constant-density slab, and MLS interpolation and rigid
//! recovery.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::baker::{bake_all, LightMapSet, DEFAULT_SHININESS};
use crate::bench::Check;
use crate::color::Rgb;
use crate::envmap::{Direction, EnvironmentMap, LatLongMap};
use crate::error::Result;
use crate::mls::fixtures::{bend_fixture, random_rigid};
use crate::mls::{apply_to_point, mls_transform, ControlSet, DEFAULT_ALPHA};
use crate::volume::{march_ray_traced, Material, Primitive, Shape, VolumeScene};
use crate::Vec3;

fn max_rel(map: &LatLongMap, expected: f64) -> f64 {
    map.texels()
        .iter()
        .flat_map(|c| c.to_array())
        .map(|x| (x - expected).abs() / expected)
        .fold(0.0, f64::max)
}

/// Bakes a constant unit 128×64 environment and compares every lightmap
/// texel with `π` (diffuse) and `2π/(n+1)` (specular).
pub fn constant_environment_checks(lightmap: (usize, usize)) -> Result<Vec<Check>> {
    let env = EnvironmentMap::constant(128, 64, Rgb::splat(1.0))?;
    let lights = bake_all(&env, &DEFAULT_SHININESS, lightmap)?;
    let mut checks = Vec::new();
    let err = max_rel(lights.diffuse(), PI);
    checks.push(Check {
        name: "constant env diffuse = π".into(),
        pass: err < 5e-3,
        detail: format!("max rel err {err:.2e} (limit 5e-3)"),
    });
    for (n, map) in lights.specular() {
        let expected = 2.0 * PI / (*n as f64 + 1.0);
        let err = max_rel(map, expected);
        checks.push(Check {
            name: format!("constant env specular n={n} = 2π/(n+1)"),
            pass: err < 1e-2,
            detail: format!("max rel err {err:.2e} (limit 1e-2)"),
        });
    }
    Ok(checks)
}

/// Quantities from one ray through a constant-density slab.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabCase {
    pub measured: Rgb,
    pub expected: Rgb,
    pub transmittance_monotone: bool,
    pub weight_sum: f64,
}

/// Ray along `−z` from the origin over `t ∈ [2, 6]` through a slab occupying
/// `t ∈ [3, 5]`, lit by flat lightmaps so each sample shades to
/// `k_d · a · π`. The closed form is `c · (1 − e^(−σΔt))`.
pub fn slab_case(sigma: f64, samples: usize) -> Result<SlabCase> {
    let albedo = Rgb::new(0.8, 0.5, 0.25);
    let k_d = 0.9;
    let flat = |v: f64| LatLongMap::filled(16, 8, Rgb::splat(v));
    let lights = LightMapSet::new(flat(PI)?, vec![(16, flat(2.0 * PI / 17.0)?)])?;
    let slab = Primitive::new(
        Shape::Slab {
            min: Vec3::new(-10.0, -10.0, -5.0),
            max: Vec3::new(10.0, 10.0, -3.0),
        },
        sigma,
        Material::lambertian(albedo, k_d),
    );
    let scene = VolumeScene::new(vec![slab])?;
    let dir = Direction::new(0.0, 0.0, -1.0)?;
    let (res, trace) = march_ray_traced(&scene, &Vec3::zeros(), dir, (2.0, 6.0), &lights, samples)?;
    let expected = albedo * (k_d * PI * (1.0 - (-sigma * 2.0).exp()));
    Ok(SlabCase {
        measured: res.color,
        expected,
        transmittance_monotone: trace
            .windows(2)
            .all(|w| w[1].transmittance <= w[0].transmittance),
        weight_sum: trace.iter().map(|s| s.weight).sum(),
    })
}

fn max_abs_diff(a: Rgb, b: Rgb) -> f64 {
    (a - b).to_array().iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn slab_checks() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for sigma in [0.1, 0.5, 2.0] {
        let c = slab_case(sigma, 256)?;
        let err = max_abs_diff(c.measured, c.expected) / c.expected.max_component();
        checks.push(Check {
            name: format!("slab σ={sigma} closed form"),
            pass: err < 5e-3 && c.transmittance_monotone && c.weight_sum <= 1.0 + 1e-12,
            detail: format!(
                "rel err {err:.2e} (limit 5e-3), monotone {}, Σw {:.6}",
                c.transmittance_monotone, c.weight_sum
            ),
        });
    }
    Ok(checks)
}

/// Largest `‖T(uᵢ) uᵢ − vᵢ‖` over the control points, evaluated exactly at
/// the posed positions.
pub fn interpolation_error(controls: &ControlSet, alpha: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (p, u) in controls.posed().iter().zip(controls.unposed()) {
        let t = mls_transform(controls, p, alpha)?;
        worst = worst.max((apply_to_point(&t, p) - u).norm());
    }
    Ok(worst)
}

pub fn mls_checks() -> Result<Vec<Check>> {
    let err = interpolation_error(&bend_fixture(), DEFAULT_ALPHA)?;
    let mut checks = vec![Check {
        name: "MLS interpolates bend controls".into(),
        pass: err < 1e-9,
        detail: format!("max error {err:.2e} (limit 1e-9)"),
    }];

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let motion = random_rigid(&mut rng);
    let posed: Vec<Vec3> = bend_fixture().posed().to_vec();
    let unposed: Vec<Vec3> = posed.iter().map(|p| apply_to_point(&motion, p)).collect();
    let controls = ControlSet::new(posed, unposed)?;
    let probe = Vec3::new(0.7, -1.3, 2.1);
    let t = mls_transform(&controls, &probe, DEFAULT_ALPHA)?;
    let err = (t.rotation - motion.rotation).abs().max()
        + (t.translation - motion.translation).abs().max();
    checks.push(Check {
        name: "MLS recovers a global rigid motion".into(),
        pass: err < 1e-9,
        detail: format!("max entry error {err:.2e} (limit 1e-9)"),
    });
    Ok(checks)
}

/// The full table.
pub fn run() -> Result<Vec<Check>> {
    let mut checks = constant_environment_checks((32, 16))?;
    checks.extend(slab_checks()?);
    checks.extend(mls_checks()?);
    Ok(checks)
}
