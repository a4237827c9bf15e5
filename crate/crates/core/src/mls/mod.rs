//! Moving-least-squares deformation fields.
//!
//! For a query point `p` in target (posed) space, the translation field `T`
//! is the rigid motion minimizing `Σ wᵢ ‖T(Vᵗᵢ) − Vᶜᵢ‖²` and the rotation
//! field `R` the rotation minimizing `Σ wᵢ ‖R(Nᵗᵢ) − Nᶜᵢ‖²`, both with
//! `wᵢ = ‖Vᵗᵢ − p‖^(−2α)`. Both are solved in closed form by a weighted SVD
//! (Kabsch) with the reflection removed.
//!
//! At a control point the weight is infinite. The solver then pins the fit to
//! that control and solves for the remaining freedom with the other weights,
//! which is the limit of the field as `p` approaches the control, so the field
//! stays continuous and interpolates exactly.

pub mod fixtures;
pub mod grid;
mod sf;

use std::path::Path;

use nalgebra::{Rotation3, Unit};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{Mat3, Vec3};

pub use sf::{sf_transform, SurfaceField};

/// Fall-off exponent used unless told otherwise.
pub const DEFAULT_ALPHA: f64 = 1.0;

/// Squared distance below which a query counts as sitting on a control point.
const COINCIDENT_SQ: f64 = 1e-24;
const DEGENERATE_RATIO: f64 = 1e-12;
const UNIT_TOLERANCE: f64 = 1e-6;

/// Rotation plus translation, `x ↦ R·x + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub rotation: Mat3,
    pub translation: Vec3,
}

impl RigidTransform {
    pub fn identity() -> Self {
        RigidTransform {
            rotation: Mat3::identity(),
            translation: Vec3::zeros(),
        }
    }

    pub fn new(rotation: Mat3, translation: Vec3) -> Self {
        RigidTransform {
            rotation,
            translation,
        }
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        RigidTransform {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &RigidTransform) -> Self {
        RigidTransform {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }
}

/// `R·p + t`.
pub fn apply_to_point(t: &RigidTransform, p: &Vec3) -> Vec3 {
    t.rotation * p + t.translation
}

/// `R⁻¹·n`, i.e. carries a canonical-space normal back to target space.
/// Normals ignore translation.
pub fn apply_to_normal(rotation: &Mat3, n: &Vec3) -> Vec3 {
    rotation.transpose() * n
}

/// Paired posed/unposed control points with optional normals and triangles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ControlSetFile", into = "ControlSetFile")]
pub struct ControlSet {
    posed: Vec<Vec3>,
    unposed: Vec<Vec3>,
    normals: Option<(Vec<Vec3>, Vec<Vec3>)>,
    triangles: Option<Vec<[usize; 3]>>,
}

/// On-disk layout of a control set.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ControlSetFile {
    posed: Vec<[f64; 3]>,
    unposed: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    posed_normals: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    unposed_normals: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    triangles: Option<Vec<[usize; 3]>>,
}

impl TryFrom<ControlSetFile> for ControlSet {
    type Error = Error;

    fn try_from(f: ControlSetFile) -> Result<Self> {
        let v = |a: Vec<[f64; 3]>| a.into_iter().map(Vec3::from).collect::<Vec<_>>();
        let normals = match (f.posed_normals, f.unposed_normals) {
            (Some(a), Some(b)) => Some((v(a), v(b))),
            (None, None) => None,
            _ => {
                return Err(Error::invalid(
                    "posed and unposed normals must come together",
                ))
            }
        };
        let mut set = ControlSet::new(v(f.posed), v(f.unposed))?;
        if let Some((a, b)) = normals {
            set = set.with_normals(a, b)?;
        }
        if let Some(t) = f.triangles {
            set = set.with_triangles(t)?;
        }
        Ok(set)
    }
}

impl From<ControlSet> for ControlSetFile {
    fn from(s: ControlSet) -> Self {
        let v = |a: &[Vec3]| a.iter().map(|p| [p.x, p.y, p.z]).collect::<Vec<_>>();
        ControlSetFile {
            posed: v(&s.posed),
            unposed: v(&s.unposed),
            posed_normals: s.normals.as_ref().map(|(a, _)| v(a)),
            unposed_normals: s.normals.as_ref().map(|(_, b)| v(b)),
            triangles: s.triangles,
        }
    }
}

impl ControlSet {
    pub fn new(posed: Vec<Vec3>, unposed: Vec<Vec3>) -> Result<Self> {
        if posed.len() != unposed.len() {
            return Err(Error::invalid(format!(
                "{} posed vs {} unposed control points",
                posed.len(),
                unposed.len()
            )));
        }
        if posed.len() < 3 {
            return Err(Error::invalid("at least 3 control points are required"));
        }
        if posed
            .iter()
            .chain(&unposed)
            .any(|p| !p.iter().all(|x| x.is_finite()))
        {
            return Err(Error::invalid("control points must be finite"));
        }
        let ones = vec![1.0; posed.len()];
        let centroid = weighted_centroid(&posed, &ones);
        check_spread(posed.iter().map(|p| p - centroid), &ones)?;
        Ok(ControlSet {
            posed,
            unposed,
            normals: None,
            triangles: None,
        })
    }

    pub fn with_normals(mut self, posed: Vec<Vec3>, unposed: Vec<Vec3>) -> Result<Self> {
        if posed.len() != self.len() || unposed.len() != self.len() {
            return Err(Error::invalid("normal count differs from point count"));
        }
        if let Some(n) = posed
            .iter()
            .chain(&unposed)
            .find(|n| !((n.norm() - 1.0).abs() <= UNIT_TOLERANCE))
        {
            return Err(Error::invalid(format!("normal {n:?} is not unit length")));
        }
        self.normals = Some((posed, unposed));
        Ok(self)
    }

    pub fn with_triangles(mut self, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if let Some(t) = triangles
            .iter()
            .find(|t| t.iter().any(|&i| i >= self.len()))
        {
            return Err(Error::invalid(format!(
                "triangle {t:?} indexes past the control points"
            )));
        }
        self.triangles = Some(triangles);
        Ok(self)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_slice(&std::fs::read(path)?)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("control sets always serialize")
    }

    pub fn len(&self) -> usize {
        self.posed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posed.is_empty()
    }

    pub fn posed(&self) -> &[Vec3] {
        &self.posed
    }

    pub fn unposed(&self) -> &[Vec3] {
        &self.unposed
    }

    pub fn posed_normals(&self) -> Option<&[Vec3]> {
        self.normals.as_ref().map(|(a, _)| a.as_slice())
    }

    pub fn unposed_normals(&self) -> Option<&[Vec3]> {
        self.normals.as_ref().map(|(_, b)| b.as_slice())
    }

    pub fn triangles(&self) -> Option<&[[usize; 3]]> {
        self.triangles.as_deref()
    }

    /// Applies `f` to every posed point and normal rotation `r` to every
    /// posed normal, keeping the unposed side.
    pub fn repose(&self, f: impl Fn(&Vec3) -> Vec3, r: &Mat3) -> Result<Self> {
        let mut out = ControlSet::new(self.posed.iter().map(f).collect(), self.unposed.clone())?;
        if let Some((a, b)) = &self.normals {
            out = out.with_normals(a.iter().map(|n| r * n).collect(), b.clone())?;
        }
        if let Some(t) = &self.triangles {
            out = out.with_triangles(t.clone())?;
        }
        Ok(out)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "fall-off exponent must be positive, got {alpha}"
        )))
    }
}

/// Indices of controls whose posed position coincides with `p`.
fn coincident(controls: &ControlSet, p: &Vec3) -> Vec<usize> {
    controls
        .posed
        .iter()
        .enumerate()
        .filter(|(_, x)| (*x - p).norm_squared() < COINCIDENT_SQ)
        .map(|(i, _)| i)
        .collect()
}

/// `wᵢ = ‖Vᵗᵢ − p‖^(−2α)`. When `p` sits on one or more controls the weights
/// are the indicator of those controls.
pub fn mls_weights(controls: &ControlSet, p: &Vec3, alpha: f64) -> Vec<f64> {
    let hits = coincident(controls, p);
    if !hits.is_empty() {
        let mut w = vec![0.0; controls.len()];
        hits.into_iter().for_each(|i| w[i] = 1.0);
        return w;
    }
    controls
        .posed
        .iter()
        .map(|x| (x - p).norm_squared().powf(-alpha))
        .collect()
}

fn weighted_centroid(points: &[Vec3], weights: &[f64]) -> Vec3 {
    let total: f64 = weights.iter().sum();
    points
        .iter()
        .zip(weights)
        .fold(Vec3::zeros(), |acc, (p, w)| acc + p * *w)
        / total
}

/// Fails when the weighted, centered points are collinear (or coincide).
fn check_spread(centered: impl Iterator<Item = Vec3>, weights: &[f64]) -> Result<()> {
    let cov = centered
        .zip(weights)
        .fold(Mat3::zeros(), |acc, (d, w)| acc + d * d.transpose() * *w);
    let mut eig: Vec<f64> = cov.symmetric_eigen().eigenvalues.iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    if !(eig[0] > 0.0) || eig[1] <= DEGENERATE_RATIO * eig[0] {
        return Err(Error::Degenerate(format!(
            "weighted points are collinear (spread eigenvalues {eig:?})"
        )));
    }
    Ok(())
}

/// Rotation maximizing `tr(R·H)` for `H = Σ w a bᵀ`, i.e. best mapping the
/// `a`s onto the `b`s. Returns the rotation and the singular values of `H` in
/// decreasing order.
fn kabsch(h: &Mat3) -> (Mat3, [f64; 3]) {
    let svd = h.svd(true, true);
    let u = svd.u.expect("requested U");
    let mut v = svd.v_t.expect("requested Vᵀ").transpose();
    let s = svd.singular_values;
    if (v * u.transpose()).determinant() < 0.0 {
        let smallest = (0..3).min_by(|&a, &b| s[a].total_cmp(&s[b])).unwrap_or(2);
        v.column_mut(smallest).neg_mut();
    }
    let mut sorted = [s[0], s[1], s[2]];
    sorted.sort_by(|a, b| b.total_cmp(a));
    (v * u.transpose(), sorted)
}

/// Weighted rigid fit carrying `posed` onto `unposed`, for explicit weights.
pub fn fit_rigid(posed: &[Vec3], unposed: &[Vec3], weights: &[f64]) -> Result<RigidTransform> {
    if posed.len() != unposed.len() || posed.len() != weights.len() {
        return Err(Error::invalid("point and weight counts differ"));
    }
    if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite())
        || !(weights.iter().sum::<f64>() > 0.0)
    {
        return Err(Error::invalid(
            "weights must be finite, nonnegative and not all zero",
        ));
    }
    let ct = weighted_centroid(posed, weights);
    let cc = weighted_centroid(unposed, weights);
    check_spread(posed.iter().map(|x| x - ct), weights)?;
    let h = posed
        .iter()
        .zip(unposed)
        .zip(weights)
        .fold(Mat3::zeros(), |acc, ((x, y), w)| {
            acc + (x - ct) * (y - cc).transpose() * *w
        });
    let (rotation, _) = kabsch(&h);
    Ok(RigidTransform {
        rotation,
        translation: cc - rotation * ct,
    })
}

/// Fit pinned to coincident controls: the anchor maps exactly, the rotation
/// comes from the remaining controls relative to the anchor.
fn fit_anchored(
    controls: &ControlSet,
    p: &Vec3,
    alpha: f64,
    hits: &[usize],
) -> Result<RigidTransform> {
    let mean = |pts: &[Vec3]| hits.iter().map(|&i| pts[i]).sum::<Vec3>() / hits.len() as f64;
    let (at, ac) = (mean(&controls.posed), mean(&controls.unposed));
    let others: Vec<usize> = (0..controls.len()).filter(|i| !hits.contains(i)).collect();
    let weights: Vec<f64> = others
        .iter()
        .map(|&j| (controls.posed[j] - p).norm_squared().powf(-alpha))
        .collect();
    check_spread(others.iter().map(|&j| controls.posed[j] - at), &weights)?;
    let h = others
        .iter()
        .zip(&weights)
        .fold(Mat3::zeros(), |acc, (&j, w)| {
            acc + (controls.posed[j] - at) * (controls.unposed[j] - ac).transpose() * *w
        });
    let (rotation, _) = kabsch(&h);
    Ok(RigidTransform {
        rotation,
        translation: ac - rotation * at,
    })
}

/// Target→canonical rigid transform at `p`.
pub fn mls_transform(controls: &ControlSet, p: &Vec3, alpha: f64) -> Result<RigidTransform> {
    check_alpha(alpha)?;
    let hits = coincident(controls, p);
    if hits.is_empty() {
        fit_rigid(
            &controls.posed,
            &controls.unposed,
            &mls_weights(controls, p, alpha),
        )
    } else {
        fit_anchored(controls, p, alpha, &hits)
    }
}

/// Result of the rotation field at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationFit {
    pub rotation: Mat3,
    /// The normals did not pin down the rotation (e.g. all parallel); the
    /// free axis was fixed by the SVD convention.
    pub ambiguous: bool,
}

/// Target→canonical rotation at `p` fitted to the normal pairs. Weights use
/// posed positions, there is no centroid term.
pub fn mls_rotation(controls: &ControlSet, p: &Vec3, alpha: f64) -> Result<RotationFit> {
    check_alpha(alpha)?;
    let (nt, nc) = controls.normals.as_ref().ok_or(Error::MissingNormals)?;
    let hits = coincident(controls, p);
    if !hits.is_empty() {
        return rotation_anchored(controls, nt, nc, p, alpha, &hits);
    }
    let w = mls_weights(controls, p, alpha);
    let h = nt
        .iter()
        .zip(nc)
        .zip(&w)
        .fold(Mat3::zeros(), |acc, ((a, b), w)| {
            acc + a * b.transpose() * *w
        });
    let (rotation, s) = kabsch(&h);
    Ok(RotationFit {
        rotation,
        ambiguous: s[1] <= DEGENERATE_RATIO * s[0],
    })
}

/// Maps the coincident normal exactly, then picks the twist about it that
/// best fits the other normals.
fn rotation_anchored(
    controls: &ControlSet,
    nt: &[Vec3],
    nc: &[Vec3],
    p: &Vec3,
    alpha: f64,
    hits: &[usize],
) -> Result<RotationFit> {
    let sum = |ns: &[Vec3]| hits.iter().map(|&i| ns[i]).sum::<Vec3>();
    let (from, to) = match (Unit::try_new(sum(nt), 1e-12), Unit::try_new(sum(nc), 1e-12)) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::Degenerate(
                "coincident control normals cancel".into(),
            ))
        }
    };
    let align = Rotation3::rotation_between(from.as_ref(), to.as_ref()).unwrap_or_else(|| {
        // Antiparallel: half turn about any axis perpendicular to `from`.
        let helper = if from.x.abs() < 0.9 {
            Vec3::x()
        } else {
            Vec3::y()
        };
        Rotation3::from_axis_angle(
            &Unit::new_normalize(from.cross(&helper)),
            std::f64::consts::PI,
        )
    });
    let k = to.into_inner();
    let (mut a, mut b) = (0.0, 0.0);
    for j in (0..controls.len()).filter(|i| !hits.contains(i)) {
        let w = (controls.posed[j] - p).norm_squared().powf(-alpha);
        let q = align * nt[j];
        let m = nc[j];
        a += w * (m.dot(&q) - m.dot(&k) * k.dot(&q));
        b += w * m.dot(&k.cross(&q));
    }
    let ambiguous = a.hypot(b) <= 1e-12;
    let twist = Rotation3::from_axis_angle(&to, if ambiguous { 0.0 } else { b.atan2(a) });
    Ok(RotationFit {
        rotation: *(twist * align).matrix(),
        ambiguous,
    })
}

/// A control set paired with a fall-off exponent; the deformation field.
#[derive(Debug, Clone, PartialEq)]
pub struct MlsField {
    pub controls: ControlSet,
    pub alpha: f64,
}

impl MlsField {
    pub fn new(controls: ControlSet, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(MlsField { controls, alpha })
    }

    pub fn transform(&self, p: &Vec3) -> Result<RigidTransform> {
        mls_transform(&self.controls, p, self.alpha)
    }

    /// Rotation field; falls back to the rotation of `T` when the controls
    /// carry no normals.
    pub fn rotation(&self, p: &Vec3) -> Result<Mat3> {
        if self.controls.normals.is_some() {
            Ok(mls_rotation(&self.controls, p, self.alpha)?.rotation)
        } else {
            Ok(self.transform(p)?.rotation)
        }
    }

    /// `p` carried into canonical space.
    pub fn warp(&self, p: &Vec3) -> Result<Vec3> {
        Ok(apply_to_point(&self.transform(p)?, p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mls::fixtures::{bend_fixture, random_rigid};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cube_controls() -> ControlSet {
        let pts: Vec<Vec3> = (0..8)
            .map(|i| Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
            .collect();
        ControlSet::new(pts.clone(), pts).unwrap()
    }

    fn close_mat(a: &Mat3, b: &Mat3, tol: f64) -> bool {
        (a - b).abs().max() <= tol
    }

    #[test]
    fn weights_basic() {
        let pts = vec![
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 2.0, 0.0),
            Vec3::new(0.0, 0.0, 5.0),
        ];
        let set = ControlSet::new(pts.clone(), pts).unwrap();
        let w = mls_weights(&set, &Vec3::zeros(), 1.0);
        assert_eq!(&w[..2], &[1.0, 0.25]);
        assert!((w[2] - 0.04).abs() < 1e-15);
        assert_eq!(
            mls_weights(&set, &Vec3::new(1.0, 0.0, 0.0), 1.0),
            vec![1.0, 0.0, 0.0]
        );

        let sym = vec![Vec3::x(), Vec3::y(), Vec3::z(), -Vec3::x()];
        let set = ControlSet::new(sym.clone(), sym).unwrap();
        let w = mls_weights(&set, &Vec3::zeros(), 1.7);
        assert!(w.iter().all(|&x| (x - w[0]).abs() < 1e-15));
    }

    #[test]
    fn identity_correspondence() {
        let set = cube_controls();
        for p in [
            Vec3::new(0.3, 0.2, 0.9),
            Vec3::new(5.0, -1.0, 2.0),
            Vec3::zeros(),
        ] {
            let t = mls_transform(&set, &p, 1.0).unwrap();
            assert!(close_mat(&t.rotation, &Mat3::identity(), 1e-12));
            assert!(t.translation.norm() < 1e-12);
        }
    }

    #[test]
    fn global_rigid_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let motion = random_rigid(&mut rng);
        let posed: Vec<Vec3> = (0..10)
            .map(|_| Vec3::new(rng.random(), rng.random(), rng.random()) * 2.0)
            .collect();
        let unposed = posed.iter().map(|p| apply_to_point(&motion, p)).collect();
        let set = ControlSet::new(posed.clone(), unposed).unwrap();
        for p in posed.iter().chain([&Vec3::new(3.0, -2.0, 0.5)]) {
            let t = mls_transform(&set, p, 1.0).unwrap();
            assert!(close_mat(&t.rotation, &motion.rotation, 1e-9));
            assert!((t.translation - motion.translation).norm() < 1e-9);
        }
    }

    #[test]
    fn rejects_degenerate_sets() {
        let line: Vec<Vec3> = (0..4).map(|i| Vec3::new(i as f64, 0.0, 0.0)).collect();
        assert!(matches!(
            ControlSet::new(line.clone(), line),
            Err(Error::Degenerate(_))
        ));
        assert!(ControlSet::new(vec![Vec3::x(); 2], vec![Vec3::x(); 2]).is_err());
        let set = cube_controls();
        assert!(mls_transform(&set, &Vec3::zeros(), 0.0).is_err());
        assert!(matches!(
            mls_rotation(&set, &Vec3::zeros(), 1.0),
            Err(Error::MissingNormals)
        ));
    }

    #[test]
    fn rotation_field_basics() {
        let set = bend_fixture();
        let normals = set.posed_normals().unwrap().to_vec();
        let same = set.clone().with_normals(normals.clone(), normals).unwrap();
        let fit = mls_rotation(&same, &Vec3::new(1.5, 0.5, 0.0), 1.0).unwrap();
        assert!(close_mat(&fit.rotation, &Mat3::identity(), 1e-12));
        assert!(!fit.ambiguous);

        // Near a control the rotation reproduces that control's normal.
        let (nt, nc) = (set.posed_normals().unwrap(), set.unposed_normals().unwrap());
        for i in 0..set.len() {
            for offset in [1e-9, 0.0] {
                let p = set.posed()[i] + Vec3::new(offset, 0.0, 0.0);
                let r = mls_rotation(&set, &p, 1.0).unwrap().rotation;
                assert!((r * nt[i] - nc[i]).norm() < 1e-6, "control {i}");
            }
        }
    }

    #[test]
    fn parallel_normals_flag_ambiguity() {
        let set = cube_controls();
        let up = vec![Vec3::z(); 8];
        let set = set.with_normals(up.clone(), up).unwrap();
        let fit = mls_rotation(&set, &Vec3::new(0.5, 0.5, 3.0), 1.0).unwrap();
        assert!(fit.ambiguous);
        assert!((fit.rotation * Vec3::z() - Vec3::z()).norm() < 1e-12);
    }

    #[test]
    fn apply_helpers() {
        let p = Vec3::new(1.0, 2.0, 3.0);
        assert_eq!(apply_to_point(&RigidTransform::identity(), &p), p);
        let shift = RigidTransform::new(Mat3::identity(), Vec3::new(4.0, 5.0, 6.0));
        assert_eq!(apply_to_normal(&shift.rotation, &Vec3::x()), Vec3::x());
        let rz = *Rotation3::from_axis_angle(&Vec3::z_axis(), std::f64::consts::FRAC_PI_2).matrix();
        let t = RigidTransform::new(rz, Vec3::zeros());
        assert!((apply_to_point(&t, &Vec3::x()) - Vec3::y()).norm() < 1e-15);
        let back = t.inverse().compose(&t);
        assert!(close_mat(&back.rotation, &Mat3::identity(), 1e-15));
    }

    #[test]
    fn json_round_trip() {
        let set = bend_fixture();
        let back: ControlSet = serde_json::from_str(&set.to_json()).unwrap();
        assert_eq!(back, set);
        let bad = r#"{"posed": [[0,0,0],[1,0,0],[0,1,0]], "unposed": [[0,0,0],[1,0,0]]}"#;
        assert!(serde_json::from_str::<ControlSet>(bad).is_err());
        let tri = r#"{"posed": [[0,0,0],[1,0,0],[0,1,0]], "unposed": [[0,0,0],[1,0,0],[0,1,0]],
                      "triangles": [[0,1,3]]}"#;
        assert!(serde_json::from_str::<ControlSet>(tri).is_err());
    }
}
