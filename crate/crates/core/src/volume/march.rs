use crate::baker::LightMapSet;
use crate::color::Rgb;
use crate::envmap::Direction;
use crate::error::Result;
use crate::mls::apply_to_point;
use crate::shading::{pose_normal, shade_point, SurfaceSample};
use crate::volume::VolumeScene;
use crate::{Mat3, Vec3};

/// Transmittance below which the rest of a ray is skipped.
const OPAQUE: f64 = 1e-12;

/// Composited channels of one ray.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RayResult {
    /// `(diffuse + specular) + residual`.
    pub color: Rgb,
    pub diffuse: Rgb,
    pub specular: Rgb,
    pub residual: Rgb,
    pub albedo: Rgb,
    /// Unit where anything was hit, zero otherwise.
    pub normal: Vec3,
    /// `1 − T` at the far bound.
    pub alpha: f64,
    /// Expected termination distance `Σ wᵢ tᵢ / Σ wᵢ`.
    pub depth: f64,
}

/// Quadrature record of one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarchStep {
    pub t: f64,
    pub sigma: f64,
    /// Transmittance arriving at this sample.
    pub transmittance: f64,
    pub weight: f64,
}

/// Marches `origin + t·dir` over `[near, far]` with `samples` midpoint samples.
pub fn march_ray(
    scene: &VolumeScene,
    origin: &Vec3,
    dir: Direction,
    (near, far): (f64, f64),
    lights: &LightMapSet,
    samples: usize,
) -> Result<RayResult> {
    march(
        scene,
        origin,
        dir,
        (near, far),
        lights,
        &vec![0.5; samples],
        None,
    )
}

/// Like [`march_ray`], also returning the per-sample quadrature weights.
pub fn march_ray_traced(
    scene: &VolumeScene,
    origin: &Vec3,
    dir: Direction,
    bounds: (f64, f64),
    lights: &LightMapSet,
    samples: usize,
) -> Result<(RayResult, Vec<MarchStep>)> {
    let mut trace = Vec::with_capacity(samples);
    let res = march(
        scene,
        origin,
        dir,
        bounds,
        lights,
        &vec![0.5; samples],
        Some(&mut trace),
    )?;
    Ok((res, trace))
}

/// `offsets[i]` in `[0, 1)` places sample `i` inside its segment.
pub(crate) fn march(
    scene: &VolumeScene,
    origin: &Vec3,
    dir: Direction,
    (near, far): (f64, f64),
    lights: &LightMapSet,
    offsets: &[f64],
    mut trace: Option<&mut Vec<MarchStep>>,
) -> Result<RayResult> {
    assert!(offsets.len() >= 2, "at least two samples per ray");
    let delta = (far - near) / offsets.len() as f64;
    let view = -dir;
    let mut out = RayResult::default();
    let mut transmittance = 1.0;
    let mut weight_sum = 0.0;
    let mut depth_sum = 0.0;

    for (i, off) in offsets.iter().enumerate() {
        let t = near + (i as f64 + off) * delta;
        let p = origin + dir.as_vec() * t;
        let (q, field) = match &scene.deformation {
            Some(field) => (apply_to_point(&field.transform(&p)?, &p), Some(field)),
            None => (p, None),
        };
        let attrs = scene.attributes(&q);
        let alpha = 1.0 - (-attrs.sigma * delta).exp();
        let weight = transmittance * alpha;
        if let Some(trace) = trace.as_deref_mut() {
            trace.push(MarchStep {
                t,
                sigma: attrs.sigma,
                transmittance,
                weight,
            });
        }
        if weight > 0.0 {
            let canonical = scene.canonical_normal(&q);
            let rotation = match field {
                Some(f) => f.rotation(&p)?,
                None => Mat3::identity(),
            };
            let normal = pose_normal(&rotation, canonical);
            let residual = scene.residual.residual(&q, attrs.albedo);
            let sample = SurfaceSample {
                normal,
                canonical_normal: canonical,
                albedo: attrs.albedo,
                k_d: attrs.k_d,
                k_s: attrs.k_s,
                residual,
            };
            let shade = shade_point(&sample, view, lights)?;
            out.diffuse += shade.diffuse * weight;
            out.specular += shade.specular * weight;
            out.residual += residual * weight;
            out.albedo += sample.albedo * weight;
            out.normal += normal.as_vec() * weight;
            weight_sum += weight;
            depth_sum += weight * t;
        }
        transmittance *= 1.0 - alpha;
        if transmittance < OPAQUE {
            break;
        }
    }

    out.alpha = 1.0 - transmittance;
    out.depth = depth_sum / weight_sum.max(1e-9);
    out.normal = out.normal.try_normalize(0.0).unwrap_or_else(Vec3::zeros);
    out.color = out.diffuse + out.specular + out.residual;
    Ok(out)
}
