//! The two-cluster bend and helpers for measuring field continuity.
//!
//! Canonical space holds a straight bar along `x` from 0 to 4 with a
//! tetrahedral cluster at each end. In the posed configuration cluster A stays
//! put and cluster B is turned 90° about the `z` axis through the bar's
//! midpoint `(2, 0, 0)`, giving an L shape.

use nalgebra::Rotation3;
use rand::Rng;

use crate::error::Result;
use crate::mls::{apply_to_point, ControlSet, RigidTransform};
use crate::{Mat3, Vec3};

fn cluster(x_face: f64, x_tip: f64) -> [Vec3; 4] {
    [
        Vec3::new(x_face, -0.5, -0.5),
        Vec3::new(x_face, 0.5, -0.5),
        Vec3::new(x_face, 0.0, 0.5),
        Vec3::new(x_tip, 0.0, 0.0),
    ]
}

fn tetra_triangles(base: usize) -> [[usize; 3]; 4] {
    [
        [base, base + 1, base + 2],
        [base, base + 1, base + 3],
        [base, base + 2, base + 3],
        [base + 1, base + 2, base + 3],
    ]
}

/// Posed-from-canonical motion of cluster B.
pub fn bend_motion() -> RigidTransform {
    bend_motion_by(std::f64::consts::FRAC_PI_2)
}

/// Cluster B turned by `angle` radians about `z` through `(2, 0, 0)`.
pub fn bend_motion_by(angle: f64) -> RigidTransform {
    let r = *Rotation3::from_axis_angle(&Vec3::z_axis(), angle).matrix();
    let pivot = Vec3::new(2.0, 0.0, 0.0);
    RigidTransform::new(r, pivot - r * pivot)
}

fn outward(points: &[Vec3]) -> Vec<Vec3> {
    let c = points.iter().sum::<Vec3>() / points.len() as f64;
    points.iter().map(|p| (p - c).normalize()).collect()
}

/// Bent bar with normals and triangles.
pub fn bend_fixture() -> ControlSet {
    bar_fixture(&bend_motion())
}

/// The bar with cluster B turned by `angle` radians.
pub fn bend_fixture_by(angle: f64) -> ControlSet {
    bar_fixture(&bend_motion_by(angle))
}

/// Same bar, posed equal to canonical.
pub fn identity_fixture() -> ControlSet {
    bar_fixture(&RigidTransform::identity())
}

fn bar_fixture(motion: &RigidTransform) -> ControlSet {
    let a = cluster(0.0, 1.0);
    let b = cluster(4.0, 3.0);
    let unposed: Vec<Vec3> = a.iter().chain(&b).copied().collect();
    let posed: Vec<Vec3> = a
        .iter()
        .copied()
        .chain(b.iter().map(|p| apply_to_point(motion, p)))
        .collect();
    let mut unposed_normals = outward(&a);
    unposed_normals.extend(outward(&b));
    let posed_normals = unposed_normals
        .iter()
        .enumerate()
        .map(|(i, n)| if i < 4 { *n } else { motion.rotation * n })
        .collect();
    let triangles = tetra_triangles(0)
        .into_iter()
        .chain(tetra_triangles(4))
        .collect();
    ControlSet::new(posed, unposed)
        .and_then(|s| s.with_normals(posed_normals, unposed_normals))
        .and_then(|s| s.with_triangles(triangles))
        .expect("bar fixture is well posed")
}

/// Posed-space probe segment running from cluster A's tip to cluster B's tip,
/// lifted slightly off the control points.
pub fn bend_probe_segment() -> (Vec3, Vec3) {
    (Vec3::new(1.0, 0.0, 0.1), Vec3::new(2.0, 1.0, 0.1))
}

/// Displacements `T(p) − p` at `samples` evenly spaced points from `a` to `b`.
pub fn displacement_profile(
    field: impl Fn(&Vec3) -> Result<RigidTransform>,
    a: Vec3,
    b: Vec3,
    samples: usize,
) -> Result<Vec<Vec3>> {
    assert!(samples >= 2, "need at least two samples");
    (0..samples)
        .map(|i| {
            let p = a + (b - a) * (i as f64 / (samples - 1) as f64);
            Ok(apply_to_point(&field(&p)?, &p) - p)
        })
        .collect()
}

/// Largest displacement change between neighbouring samples.
pub fn max_adjacent_jump(profile: &[Vec3]) -> f64 {
    profile
        .windows(2)
        .map(|w| (w[1] - w[0]).norm())
        .fold(0.0, f64::max)
}

/// Uniformly random rotation with a translation in `[-2, 2]³`.
pub fn random_rigid(rng: &mut impl Rng) -> RigidTransform {
    // A normalized Gaussian 4-vector is a uniform unit quaternion.
    let mut gauss = || {
        let (u1, u2): (f64, f64) = (rng.random::<f64>().max(1e-300), rng.random());
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };
    let q = nalgebra::Quaternion::new(gauss(), gauss(), gauss(), gauss());
    let r: Mat3 = *nalgebra::UnitQuaternion::from_quaternion(q)
        .to_rotation_matrix()
        .matrix();
    let t = Vec3::new(gauss(), gauss(), gauss()).map(|x| x.clamp(-2.0, 2.0));
    RigidTransform::new(r, t)
}
