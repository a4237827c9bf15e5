use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::baker::LightMapSet;
use crate::color::Rgb;
use crate::envmap::pfm::write_pfm_rgb;
use crate::error::{Error, Result};
use crate::par;
use crate::volume::march::march;
use crate::volume::{Camera, RayResult, VolumeScene};
use crate::Vec3;

pub const DEFAULT_SAMPLES: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderSettings {
    pub samples: usize,
    pub threads: Option<usize>,
    /// Seed for stratified jitter; `None` samples segment midpoints.
    pub jitter: Option<u64>,
}

impl Default for RenderSettings {
    fn default() -> Self {
        RenderSettings {
            samples: DEFAULT_SAMPLES,
            threads: None,
            jitter: None,
        }
    }
}

/// Per-pixel intrinsic channels, row-major with row 0 at the top.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderOutput {
    pub width: usize,
    pub height: usize,
    pub color: Vec<Rgb>,
    pub diffuse: Vec<Rgb>,
    pub specular: Vec<Rgb>,
    pub residual: Vec<Rgb>,
    pub albedo: Vec<Rgb>,
    pub normal: Vec<Vec3>,
    pub alpha: Vec<f64>,
    pub depth: Vec<f64>,
}

impl RenderOutput {
    fn from_pixels(width: usize, height: usize, px: Vec<RayResult>) -> Self {
        RenderOutput {
            width,
            height,
            color: px.iter().map(|p| p.color).collect(),
            diffuse: px.iter().map(|p| p.diffuse).collect(),
            specular: px.iter().map(|p| p.specular).collect(),
            residual: px.iter().map(|p| p.residual).collect(),
            albedo: px.iter().map(|p| p.albedo).collect(),
            normal: px.iter().map(|p| p.normal).collect(),
            alpha: px.iter().map(|p| p.alpha).collect(),
            depth: px.iter().map(|p| p.depth).collect(),
        }
    }

    /// Named RGB views of every channel. Normals map to `0.5 + 0.5n`.
    pub fn channels(&self) -> Vec<(&'static str, Vec<Rgb>)> {
        let grey = |v: &[f64]| v.iter().map(|&x| Rgb::splat(x)).collect::<Vec<_>>();
        vec![
            ("color", self.color.clone()),
            ("diffuse", self.diffuse.clone()),
            ("specular", self.specular.clone()),
            ("residual", self.residual.clone()),
            ("albedo", self.albedo.clone()),
            (
                "normal",
                self.normal
                    .iter()
                    .map(|n| Rgb::new(0.5 + 0.5 * n.x, 0.5 + 0.5 * n.y, 0.5 + 0.5 * n.z))
                    .collect(),
            ),
            ("alpha", grey(&self.alpha)),
            ("depth", grey(&self.depth)),
        ]
    }

    /// Writes `<name>.pfm` and a tone-mapped `<name>.png` for each channel.
    /// Shading channels are scaled by `exposure` before gamma 2.2; albedo,
    /// normal and alpha are written as-is and depth is normalized by its
    /// maximum.
    pub fn write_channels(&self, dir: impl AsRef<Path>, exposure: f64) -> Result<Vec<PathBuf>> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (name, data) in self.channels() {
            let pfm = dir.join(format!("{name}.pfm"));
            fs::write(&pfm, write_pfm_rgb(self.width, self.height, &data))?;
            written.push(pfm);

            let scale = match name {
                "color" | "diffuse" | "specular" | "residual" => exposure,
                "depth" => 1.0 / data.iter().map(|c| c.r).fold(1e-9, f64::max),
                _ => 1.0,
            };
            let png_path = dir.join(format!("{name}.png"));
            write_png(&png_path, self.width, self.height, &data, scale)?;
            written.push(png_path);
        }
        Ok(written)
    }
}

/// 8-bit sRGB-ish encoding: `clamp(x · scale)^(1/2.2)`.
pub fn tonemap(x: f64, scale: f64) -> u8 {
    ((x * scale).clamp(0.0, 1.0).powf(1.0 / 2.2) * 255.0).round() as u8
}

fn write_png(path: &Path, width: usize, height: usize, data: &[Rgb], scale: f64) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut enc = png::Encoder::new(std::io::BufWriter::new(file), width as u32, height as u32);
    enc.set_color(png::ColorType::Rgb);
    enc.set_depth(png::BitDepth::Eight);
    let bytes: Vec<u8> = data
        .iter()
        .flat_map(|c| c.to_array().map(|x| tonemap(x, scale)))
        .collect();
    let mut writer = enc
        .write_header()
        .map_err(|e| Error::invalid(format!("png: {e}")))?;
    writer
        .write_image_data(&bytes)
        .map_err(|e| Error::invalid(format!("png: {e}")))?;
    Ok(())
}

/// One ray per pixel through the camera.
pub fn render(
    scene: &VolumeScene,
    camera: &Camera,
    lights: &LightMapSet,
    settings: &RenderSettings,
) -> Result<RenderOutput> {
    camera.validate()?;
    if settings.samples < 2 {
        return Err(Error::invalid("at least two samples per ray"));
    }
    let (w, h) = (camera.width, camera.height);
    let pixels = par::map_indexed(w * h, settings.threads, |i| {
        let (origin, dir) = camera.ray(i % w, i / w);
        let offsets: Vec<f64> = match settings.jitter {
            None => vec![0.5; settings.samples],
            Some(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                (0..settings.samples).map(|_| rng.random::<f64>()).collect()
            }
        };
        march(
            scene,
            &origin,
            dir,
            (camera.near, camera.far),
            lights,
            &offsets,
            None,
        )
    });
    let pixels = pixels.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(RenderOutput::from_pixels(w, h, pixels))
}
