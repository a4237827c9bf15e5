//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Images cross the boundary as RGBA bytes ready for `ImageData`; polylines
//! as flat `[x0, y0, x1, y1, …]` float arrays.

use std::f64::consts::PI;

use phongfield::baker::{bake_all, LightMapSet, DEFAULT_SHININESS};
use phongfield::bench::bench_continuity;
use phongfield::mls::fixtures::bend_fixture_by;
use phongfield::mls::{apply_to_point, ControlSet, MlsField, SurfaceField};
use phongfield::volume::{
    render, tonemap, Camera, Material, Primitive, RenderSettings, Shape, VolumeScene,
};
use phongfield::{EnvironmentMap, LatLongMap, Rgb, Vec3};
use wasm_bindgen::prelude::*;

const ENV_SIZE: (usize, usize) = (64, 32);
const LIGHTMAP_SIZE: (usize, usize) = (32, 16);

fn sky(sun: Vec3, sharpness: f64) -> EnvironmentMap {
    EnvironmentMap::from_fn(ENV_SIZE.0, ENV_SIZE.1, |d| {
        let up = d.y().max(0.0);
        let ground = Rgb::new(0.25, 0.2, 0.15) * (-d.y()).max(0.0);
        let sky =
            Rgb::new(0.3 + 0.2 * up, 0.45 + 0.25 * up, 0.7 + 0.3 * up) * d.y().max(0.0).sqrt();
        let glow = 6.0 * (sharpness * (d.as_vec().dot(&sun) - 1.0)).exp();
        sky + ground + Rgb::new(1.0, 0.85, 0.6) * glow
    })
    .expect("procedural sky is finite and nonnegative")
}

fn sun_direction(elevation_deg: f64, azimuth_deg: f64) -> Vec3 {
    let (e, a) = (elevation_deg.to_radians(), azimuth_deg.to_radians());
    Vec3::new(e.cos() * a.cos(), e.sin(), e.cos() * a.sin())
}

/// RGBA bytes with every channel scaled so the brightest value maps to one.
fn to_rgba(texels: &[Rgb]) -> Vec<u8> {
    let peak = texels
        .iter()
        .map(|c| c.max_component())
        .fold(1e-12, f64::max);
    texels
        .iter()
        .flat_map(|c| {
            let [r, g, b] = c.to_array().map(|x| tonemap(x, 1.0 / peak));
            [r, g, b, 255]
        })
        .collect()
}

/// A procedural sky and the lightmaps baked from it.
#[wasm_bindgen]
pub struct Studio {
    env: EnvironmentMap,
    lights: LightMapSet,
}

impl Default for Studio {
    fn default() -> Self {
        Self::new()
    }
}

#[wasm_bindgen]
impl Studio {
    #[wasm_bindgen(constructor)]
    pub fn new() -> Studio {
        let mut studio = Studio {
            env: EnvironmentMap::constant(ENV_SIZE.0, ENV_SIZE.1, Rgb::BLACK).unwrap(),
            lights: LightMapSet::new(
                LatLongMap::filled(2, 1, Rgb::BLACK).unwrap(),
                vec![(1, LatLongMap::filled(2, 1, Rgb::BLACK).unwrap())],
            )
            .unwrap(),
        };
        studio.set_sun(35.0, 60.0, 40.0);
        studio
    }

    /// Moves the sun and re-bakes every lightmap.
    pub fn set_sun(&mut self, elevation_deg: f64, azimuth_deg: f64, sharpness: f64) {
        let sharpness = sharpness.clamp(1.0, 500.0);
        self.env = sky(sun_direction(elevation_deg, azimuth_deg), sharpness);
        self.lights =
            bake_all(&self.env, &DEFAULT_SHININESS, LIGHTMAP_SIZE).expect("valid bake inputs");
    }

    pub fn env_width(&self) -> usize {
        ENV_SIZE.0
    }

    pub fn env_height(&self) -> usize {
        ENV_SIZE.1
    }

    pub fn lightmap_width(&self) -> usize {
        LIGHTMAP_SIZE.0
    }

    pub fn lightmap_height(&self) -> usize {
        LIGHTMAP_SIZE.1
    }

    pub fn shininess(&self) -> Vec<u32> {
        self.lights.exponents()
    }

    pub fn env_rgba(&self) -> Vec<u8> {
        to_rgba(self.env.texels())
    }

    /// Panel 0 is the diffuse map, panel `i ≥ 1` the `i`-th specular map.
    pub fn lightmap_rgba(&self, panel: usize) -> Vec<u8> {
        match panel {
            0 => to_rgba(self.lights.diffuse().texels()),
            i => {
                let specular = self.lights.specular();
                to_rgba(specular[(i - 1).min(specular.len() - 1)].1.texels())
            }
        }
    }

    /// Renders a soft volumetric sphere lit by the current lightmaps.
    /// `shininess` snaps to the nearest baked exponent.
    pub fn render_sphere(&self, k_d: f64, k_s: f64, shininess: u32, size: usize) -> Vec<u8> {
        let size = size.clamp(8, 256);
        let exponent = self
            .lights
            .exponents()
            .into_iter()
            .min_by_key(|e| e.abs_diff(shininess))
            .unwrap_or(1);
        let material = Material::lambertian(Rgb::new(0.8, 0.62, 0.5), k_d.clamp(0.0, 4.0))
            .with_specular(exponent, k_s.clamp(0.0, 4.0));
        let shell = Primitive::new(
            Shape::SphereShell {
                center: Vec3::zeros(),
                radius: 0.9,
                softness: 0.08,
            },
            60.0,
            material,
        );
        let scene = VolumeScene::new(vec![shell]).expect("valid sphere");
        let camera = Camera::look_at(
            Vec3::new(0.0, 0.0, 3.5),
            Vec3::zeros(),
            Vec3::y(),
            PI / 4.5,
            (size, size),
            (2.0, 5.0),
        )
        .expect("valid camera");
        let settings = RenderSettings {
            samples: 48,
            threads: None,
            jitter: None,
        };
        let out =
            render(&scene, &camera, &self.lights, &settings).expect("render inputs are valid");
        // Exposure follows the brightest pixel so every sun setting stays visible.
        let peak = out
            .color
            .iter()
            .map(|c| c.max_component())
            .fold(1e-12, f64::max);
        out.color
            .iter()
            .zip(&out.alpha)
            .flat_map(|(c, a)| {
                let [r, g, b] = c.to_array().map(|x| tonemap(x, 0.95 / peak));
                [r, g, b, (a * 255.0).round() as u8]
            })
            .collect()
    }
}

/// The bend fixture with canonical and posed roles swapped, so the field
/// carries the straight bar into its bent pose.
fn forward_bend(bend_deg: f64) -> ControlSet {
    let set = bend_fixture_by(bend_deg.to_radians());
    ControlSet::new(set.unposed().to_vec(), set.posed().to_vec())
        .and_then(|s| s.with_triangles(set.triangles().expect("fixture has triangles").to_vec()))
        .expect("swapped fixture is valid")
}

/// Grid lines over the straight bar (`x ∈ [−0.5, 4.5]`, `y ∈ [−0.75, 0.75]`,
/// `z = 0`) pushed through the bend field. Returns `rows` horizontal lines
/// followed by `columns` vertical ones, each with `samples` points.
#[wasm_bindgen]
pub fn bent_grid(
    bend_deg: f64,
    alpha: f64,
    use_sf: bool,
    rows: usize,
    columns: usize,
    samples: usize,
) -> Vec<f32> {
    let (rows, columns, samples) = (
        rows.clamp(2, 64),
        columns.clamp(2, 128),
        samples.clamp(2, 1024),
    );
    let controls = forward_bend(bend_deg);
    let warp: Box<dyn Fn(&Vec3) -> Vec3> = if use_sf {
        let field = SurfaceField::new(&controls).expect("fixture triangles are valid");
        Box::new(move |p| apply_to_point(&field.transform(p), p))
    } else {
        let field = MlsField::new(controls, alpha.clamp(0.1, 4.0)).expect("fixture is valid");
        Box::new(move |p| field.warp(p).unwrap_or(*p))
    };
    let (x0, x1, y0, y1) = (-0.5, 4.5, -0.75, 0.75);
    let lerp = |a: f64, b: f64, t: f64| a + (b - a) * t;
    let mut out = Vec::with_capacity((rows + columns) * samples * 2);
    let mut push = |p: Vec3| {
        let q = warp(&p);
        out.push(q.x as f32);
        out.push(q.y as f32);
    };
    for r in 0..rows {
        let y = lerp(y0, y1, r as f64 / (rows - 1) as f64);
        for i in 0..samples {
            push(Vec3::new(
                lerp(x0, x1, i as f64 / (samples - 1) as f64),
                y,
                0.0,
            ));
        }
    }
    for c in 0..columns {
        let x = lerp(x0, x1, c as f64 / (columns - 1) as f64);
        for i in 0..samples {
            push(Vec3::new(
                x,
                lerp(y0, y1, i as f64 / (samples - 1) as f64),
                0.0,
            ));
        }
    }
    out
}

/// `[mls_max_jump, sf_max_jump]` along the probe segment at 100 samples.
#[wasm_bindgen]
pub fn bend_jumps(bend_deg: f64, alpha: f64) -> Vec<f64> {
    match bench_continuity(
        &bend_fixture_by(bend_deg.to_radians()),
        &[100],
        alpha.clamp(0.1, 4.0),
    ) {
        Ok(r) => vec![r.mls_max_jump[0], r.sf_max_jump[0]],
        Err(_) => vec![f64::NAN, f64::NAN],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn studio_images_have_expected_sizes() {
        let mut studio = Studio::new();
        assert_eq!(studio.env_rgba().len(), 64 * 32 * 4);
        assert_eq!(studio.lightmap_rgba(0).len(), 32 * 16 * 4);
        assert_eq!(studio.lightmap_rgba(4).len(), 32 * 16 * 4);
        let a = studio.render_sphere(0.8, 0.3, 16, 24);
        assert_eq!(a.len(), 24 * 24 * 4);
        studio.set_sun(10.0, 200.0, 80.0);
        assert_ne!(a, studio.render_sphere(0.8, 0.3, 16, 24));
    }

    #[test]
    fn sphere_is_lit_from_the_sun_side() {
        let mut studio = Studio::new();
        studio.set_sun(0.0, 0.0, 200.0);
        let img = studio.render_sphere(1.0, 0.0, 1, 32);
        let luma = |x: usize, y: usize| img[(y * 32 + x) * 4] as u32;
        // Sun along +x: the right half of the disk is brighter.
        assert!(luma(26, 16) > luma(5, 16));
    }

    #[test]
    fn grid_has_requested_shape_and_bends() {
        let (rows, samples) = (5, 20);
        let pts = bent_grid(90.0, 1.0, false, rows, 9, samples);
        assert_eq!(pts.len(), (rows + 9) * samples * 2);
        // Middle row: the left end stays near (−0.5, 0) while the right end
        // swings from (4.5, 0) to about (2, 2.5). With eight controls the far
        // cluster still pulls each end by roughly a quarter unit.
        let row = 2 * samples * 2;
        let (lx, ly) = (pts[row], pts[row + 1]);
        let end = row + (samples - 1) * 2;
        let (rx, ry) = (pts[end], pts[end + 1]);
        assert!(
            lx.hypot(ly) < 0.6 && (lx + 0.5).hypot(ly) < 0.35,
            "({lx}, {ly})"
        );
        assert!((rx - 2.0).hypot(ry - 2.5) < 0.35, "({rx}, {ry})");
        let straight = bent_grid(0.0, 1.0, true, rows, 9, samples);
        assert!((straight[0] + 0.5).abs() < 1e-5 && (straight[1] + 0.75).abs() < 1e-5);
    }

    #[test]
    fn jumps_favor_mls() {
        let j = bend_jumps(90.0, 1.0);
        assert!(j[1] > 10.0 * j[0], "{j:?}");
    }
}
