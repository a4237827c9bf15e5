//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use phongfield::baker::{bake_all, Lobe, Oracle, DEFAULT_SHININESS};
use phongfield::bench::{
    bench_continuity_default, bench_shading, ShadingConfig, DEFAULT_ENV_RESOLUTIONS,
};
use phongfield::envmap::{read_hdr, sun_and_sky, write_hdr, y_quarter_rotation};
use phongfield::mls::fixtures::{bend_fixture, random_rigid};
use phongfield::mls::{
    apply_to_point, mls_rotation, mls_transform, ControlSet, MlsField, RigidTransform,
};
use phongfield::shading::{shade_point, SurfaceSample};
use phongfield::validate::slab_case;
use phongfield::volume::{
    render, Camera, ConstantResidual, Material, NormalSource, Primitive, RenderOutput,
    RenderSettings, Shape, VolumeScene,
};
use phongfield::{Direction, EnvironmentMap, Mat3, Rgb, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn run(id: usize, title: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    let in_time = took <= limit;
    let pass = out.pass && in_time;
    println!(
        "{} criterion {id} ({title}): {}; {:.2} s (limit {} s)",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        took.as_secs_f64(),
        limit.as_secs()
    );
    pass
}

fn max_rel(values: &[Rgb], expected: f64) -> f64 {
    values
        .iter()
        .flat_map(|c| c.to_array())
        .map(|x| (x - expected).abs() / expected)
        .fold(0.0, f64::max)
}

fn analytic_bake() -> Outcome {
    let env = EnvironmentMap::constant(128, 64, Rgb::splat(1.0)).unwrap();
    let lights = bake_all(&env, &DEFAULT_SHININESS, (128, 64)).unwrap();
    let d = max_rel(lights.diffuse().texels(), PI);
    let mut pass = d < 5e-3;
    let mut detail = format!("diffuse max rel err {d:.1e}");
    for (n, map) in lights.specular() {
        let e = max_rel(map.texels(), 2.0 * PI / (*n as f64 + 1.0));
        pass &= e < 1e-2;
        detail += &format!(", n={n} {e:.1e}");
    }
    outcome(pass, detail)
}

fn uniform_direction(rng: &mut impl Rng) -> Direction {
    loop {
        let v = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return Direction::normalize(v).unwrap();
        }
    }
}

fn oracle_agreement() -> Outcome {
    // Round trip through the Radiance format so the fixture is a real HDR file.
    let smooth = sun_and_sky(256, 128).unwrap();
    let env = EnvironmentMap::new(read_hdr(&write_hdr(smooth.map(), true)).unwrap()).unwrap();
    let lights = bake_all(&env, &DEFAULT_SHININESS, (128, 64)).unwrap();
    let oracle = Oracle::new(&env);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let lobes: Vec<Lobe> = std::iter::once(Lobe::Diffuse)
        .chain(DEFAULT_SHININESS.iter().map(|&k| Lobe::Specular(k)))
        .collect();
    let mut sums = vec![0.0; lobes.len()];
    let count = 1000;
    for _ in 0..count {
        let d = uniform_direction(&mut rng);
        for (i, &lobe) in lobes.iter().enumerate() {
            let got = lights.sample(lobe, d).unwrap();
            let want = match lobe {
                Lobe::Diffuse => oracle.diffuse(d),
                Lobe::Specular(k) => oracle.specular(k, d),
            };
            let rel: f64 = got
                .to_array()
                .iter()
                .zip(want.to_array())
                .map(|(g, w)| (g - w).abs() / w)
                .sum::<f64>()
                / 3.0;
            sums[i] += rel;
        }
    }
    let means: Vec<f64> = sums.iter().map(|s| s / count as f64).collect();
    let worst = means.iter().cloned().fold(0.0, f64::max);
    outcome(
        worst < 0.02,
        format!(
            "mean rel err per lobe {:?} (limit 2%)",
            means
                .iter()
                .map(|m| format!("{:.3}%", m * 100.0))
                .collect::<Vec<_>>()
        ),
    )
}

fn complexity() -> Outcome {
    let report = bench_shading(&DEFAULT_ENV_RESOLUTIONS, &ShadingConfig::default()).unwrap();
    let checks = report.checks(2.0, 32.0, 50.0);
    let pass = checks.iter().all(|c| c.pass);
    let detail = checks
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join("; ");
    outcome(pass, detail)
}

fn random_control_set(rng: &mut impl Rng) -> ControlSet {
    let n = rng.random_range(4..12);
    let posed: Vec<Vec3> = (0..n)
        .map(|_| {
            Vec3::new(
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            )
        })
        .collect();
    // Two rigid motions blended across the set plus jitter: a generic,
    // non-rigid correspondence.
    let a = random_rigid(rng);
    let b = random_rigid(rng);
    let unposed = posed
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let m = if i % 2 == 0 { &a } else { &b };
            apply_to_point(m, p)
                + Vec3::new(
                    rng.random_range(-0.1..0.1),
                    rng.random_range(-0.1..0.1),
                    rng.random_range(-0.1..0.1),
                )
        })
        .collect();
    let normals_t: Vec<Vec3> = (0..n).map(|_| *uniform_direction(rng).as_vec()).collect();
    let normals_c: Vec<Vec3> = normals_t
        .iter()
        .enumerate()
        .map(|(i, m)| {
            if i % 2 == 0 {
                a.rotation * m
            } else {
                b.rotation * m
            }
        })
        .collect();
    ControlSet::new(posed, unposed)
        .unwrap()
        .with_normals(normals_t, normals_c)
        .unwrap()
}

fn orthonormal_error(r: &Mat3) -> (f64, f64) {
    (
        (r.transpose() * r - Mat3::identity()).abs().max(),
        r.determinant(),
    )
}

fn mls_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut ortho, mut det_err, mut interp, mut rigid) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let solves = 10_000;
    for i in 0..solves {
        let set = random_control_set(&mut rng);
        let p = Vec3::new(
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
        );
        let t = mls_transform(&set, &p, 1.0).unwrap();
        let r = mls_rotation(&set, &p, 1.0).unwrap().rotation;
        for m in [t.rotation, r] {
            let (o, d) = orthonormal_error(&m);
            ortho = ortho.max(o);
            det_err = det_err.max((d - 1.0).abs());
        }
        if i % 10 == 0 {
            for (v, u) in set.posed().iter().zip(set.unposed()) {
                let t = mls_transform(&set, v, 1.0).unwrap();
                interp = interp.max((apply_to_point(&t, v) - u).norm());
            }
        }
        if i % 10 == 5 {
            let motion = random_rigid(&mut rng);
            let unposed = set
                .posed()
                .iter()
                .map(|v| apply_to_point(&motion, v))
                .collect();
            let rigid_set = ControlSet::new(set.posed().to_vec(), unposed).unwrap();
            let t = mls_transform(&rigid_set, &p, 1.0).unwrap();
            rigid = rigid.max(
                (t.rotation - motion.rotation).abs().max()
                    + (t.translation - motion.translation).abs().max(),
            );
        }
    }
    outcome(
        ortho < 1e-9 && det_err < 1e-9 && interp < 1e-9 && rigid < 1e-9,
        format!(
            "{solves} solves: |RᵀR−I| {ortho:.1e}, |det−1| {det_err:.1e}, interpolation {interp:.1e}, rigid recovery {rigid:.1e}"
        ),
    )
}

fn continuity() -> Outcome {
    let report = bench_continuity_default(&bend_fixture()).unwrap();
    let checks = report.checks(10.0, 0.55, 0.10);
    let pass = checks[0].pass && checks[1].pass;
    let detail = checks
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join("; ");
    outcome(pass, detail)
}

fn volume_quadrature() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for sigma in [0.1, 0.5, 2.0, 8.0] {
        let c = slab_case(sigma, 256).unwrap();
        let err = (c.measured - c.expected)
            .to_array()
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()))
            / c.expected.max_component();
        pass &= err < 5e-3 && c.transmittance_monotone && c.weight_sum <= 1.0 + 1e-12;
        parts.push(format!(
            "σ={sigma}: rel err {err:.1e}, Σw {:.4}, monotone {}",
            c.weight_sum, c.transmittance_monotone
        ));
    }
    outcome(pass, parts.join(", "))
}

fn fibonacci_sphere(count: usize) -> Vec<Vec3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let y = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let r = (1.0 - y * y).sqrt();
            let phi = golden * i as f64;
            Vec3::new(r * phi.cos(), y, r * phi.sin())
        })
        .collect()
}

fn density_normals() -> Outcome {
    let center = Vec3::new(0.3, -0.2, 0.1);
    let (radius, softness) = (1.0, 0.2);
    let shell = Primitive::new(
        Shape::SphereShell {
            center,
            radius,
            softness,
        },
        30.0,
        Material::lambertian(Rgb::splat(0.5), 1.0),
    );
    let scene = VolumeScene::new(vec![shell])
        .unwrap()
        .with_normals(NormalSource::Density { step: 1e-3 });
    let mut worst = 0.0f64;
    for dir in fibonacci_sphere(100) {
        let p = center + dir * radius;
        let n = scene.canonical_normal(&p);
        let angle = n.as_vec().dot(&dir).clamp(-1.0, 1.0).acos().to_degrees();
        worst = worst.max(angle);
    }
    outcome(
        worst < 1.0,
        format!("max angle {worst:.2e}° over 100 points (limit 1°)"),
    )
}

/// Shiny shell with an off-center blob so the scene has no rotational
/// symmetry about the turn axis.
fn showcase_scene() -> VolumeScene {
    let shell = Primitive::new(
        Shape::SphereShell {
            center: Vec3::zeros(),
            radius: 0.8,
            softness: 0.1,
        },
        40.0,
        Material::lambertian(Rgb::new(0.8, 0.55, 0.4), 0.8)
            .with_specular(16, 0.15)
            .with_specular(64, 0.1),
    );
    let blob = Primitive::new(
        Shape::GaussianBall {
            center: Vec3::new(0.7, 0.3, 0.5),
            radius: 0.25,
        },
        25.0,
        Material::lambertian(Rgb::new(0.2, 0.5, 0.9), 1.0).with_specular(32, 0.3),
    );
    VolumeScene::new(vec![shell, blob]).unwrap()
}

fn showcase_camera(size: usize) -> Camera {
    Camera::look_at(
        Vec3::new(0.5, 1.0, 3.8),
        Vec3::zeros(),
        Vec3::y(),
        40f64.to_radians(),
        (size, size),
        (2.0, 6.0),
    )
    .unwrap()
}

fn equivariance() -> Outcome {
    let env = sun_and_sky(64, 32).unwrap();
    let shininess = [1, 16, 32, 64];
    let lights = bake_all(&env, &shininess, (64, 32)).unwrap();
    let turned = bake_all(&env.rotate_y_quarter(1).unwrap(), &shininess, (64, 32)).unwrap();

    // Pose: quarter turn about +y through the scene center. The field maps
    // posed points back to canonical ones.
    let r0 = y_quarter_rotation(1);
    let pose = RigidTransform::new(r0, Vec3::zeros());
    let corners: Vec<Vec3> = (0..8)
        .map(|i| {
            Vec3::new(
                if i & 1 == 0 { -1.5 } else { 1.5 },
                if i & 2 == 0 { -1.5 } else { 1.5 },
                if i & 4 == 0 { -1.5 } else { 1.5 },
            )
        })
        .collect();
    let posed: Vec<Vec3> = corners.iter().map(|c| apply_to_point(&pose, c)).collect();
    let normals_c: Vec<Vec3> = corners.iter().map(|c| c.normalize()).collect();
    let normals_t: Vec<Vec3> = normals_c.iter().map(|n| r0 * n).collect();
    let controls = ControlSet::new(posed, corners)
        .unwrap()
        .with_normals(normals_t, normals_c)
        .unwrap();

    let camera = showcase_camera(64);
    let settings = RenderSettings {
        samples: 128,
        threads: None,
        jitter: None,
    };
    let unposed = render(&showcase_scene(), &camera, &lights, &settings).unwrap();
    let posed_scene = showcase_scene().with_deformation(MlsField::new(controls, 1.0).unwrap());
    let reposed = render(&posed_scene, &camera.transformed(&pose), &turned, &settings).unwrap();

    let mut total = 0.0;
    let mut masked = 0;
    for i in 0..unposed.color.len() {
        if unposed.alpha[i] <= 0.5 {
            continue;
        }
        let a = unposed.color[i];
        let b = reposed.color[i];
        let diff: f64 = (a - b).to_array().iter().map(|x| x.abs()).sum();
        let norm: f64 = a.to_array().iter().map(|x| x.abs()).sum();
        total += diff / norm.max(1e-12);
        masked += 1;
    }
    let mean = total / masked.max(1) as f64;
    outcome(
        masked > 200 && mean < 0.02,
        format!("mean rel err {mean:.2e} over {masked} masked pixels (limit 2%)"),
    )
}

fn channels_consistent(out: &RenderOutput) -> bool {
    (0..out.color.len()).all(|i| out.color[i] == out.diffuse[i] + out.specular[i] + out.residual[i])
}

fn intrinsic_channels() -> Outcome {
    let env = sun_and_sky(64, 32).unwrap();
    let lights = bake_all(&env, &DEFAULT_SHININESS, (64, 32)).unwrap();
    let camera = showcase_camera(32);
    let settings = RenderSettings {
        samples: 96,
        threads: None,
        jitter: Some(3),
    };
    let delta = Rgb::new(0.05, -0.02, 0.1);

    let base = render(&showcase_scene(), &camera, &lights, &settings).unwrap();
    let zero_residual = base.residual.iter().all(|r| *r == Rgb::BLACK);
    let exact_sum =
        (0..base.color.len()).all(|i| base.color[i] == base.diffuse[i] + base.specular[i]);

    let shifted_scene = showcase_scene().with_residual(ConstantResidual(delta));
    let shifted = render(&shifted_scene, &camera, &lights, &settings).unwrap();
    let same_shading = shifted.diffuse == base.diffuse && shifted.specular == base.specular;
    let composed = channels_consistent(&shifted);
    // A ray gathers the residual with the same weights as the shading, so the
    // pixel shift is δc scaled by opacity; opaque pixels shift by δc itself.
    let mut opacity_err = 0.0f64;
    let mut opaque_err = 0.0f64;
    for i in 0..base.color.len() {
        let want = delta * shifted.alpha[i];
        opacity_err = opacity_err.max(
            (shifted.residual[i] - want)
                .to_array()
                .iter()
                .fold(0.0, |m, x| m.max(x.abs())),
        );
        if shifted.alpha[i] > 1.0 - 1e-12 {
            let shift = shifted.color[i] - base.color[i];
            opaque_err = opaque_err.max(
                (shift - delta)
                    .to_array()
                    .iter()
                    .fold(0.0, |m, x| m.max(x.abs())),
            );
        }
    }

    // Single shading point: the shift is exact.
    let mut sample = SurfaceSample::lambertian(
        Direction::normalize(Vec3::new(0.2, 0.7, 0.4)).unwrap(),
        Rgb::new(0.7, 0.4, 0.3),
        0.9,
    );
    sample.k_s.insert(16, 0.3);
    let view = Direction::normalize(Vec3::new(-0.3, 0.2, 1.0)).unwrap();
    let point_base = shade_point(&sample, view, &lights).unwrap();
    sample.residual = delta;
    let point_shifted = shade_point(&sample, view, &lights).unwrap();
    let point_exact = point_base.color == point_base.diffuse + point_base.specular
        && point_shifted.color == point_base.color + delta;

    let pass = zero_residual
        && exact_sum
        && same_shading
        && composed
        && opacity_err < 1e-12
        && opaque_err < 1e-12
        && point_exact;
    outcome(
        pass,
        format!(
            "δc=0 color==diffuse+specular {exact_sum}; shading unchanged by δc {same_shading}; color==d+s+residual {composed}; \
             |residual−δc·α| {opacity_err:.1e}; opaque shift err {opaque_err:.1e}; point shift exact {point_exact}"
        ),
    )
}

fn main() {
    let secs = Duration::from_secs;
    let results = [
        run(1, "analytic bake values", secs(10), analytic_bake),
        run(2, "oracle agreement", secs(30), oracle_agreement),
        run(3, "lookup vs oracle complexity", secs(120), complexity),
        run(4, "MLS exactness and rigidity", secs(30), mls_exactness),
        run(5, "MLS vs SF continuity", secs(10), continuity),
        run(6, "volume quadrature", secs(5), volume_quadrature),
        run(7, "density-gradient normals", secs(5), density_normals),
        run(8, "repose equivariance", secs(120), equivariance),
        run(
            9,
            "intrinsic channel consistency",
            secs(60),
            intrinsic_channels,
        ),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
