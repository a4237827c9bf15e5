//! Displacement fields sampled on a regular grid, and their binary file.
//!
//! Layout (little-endian): magic `DGRD`, `u32` version, `u32` N, six `f32`
//! for the box min and max corners, then `N³` displacement triples as `f32`
//! with `x` varying fastest, then `y`, then `z`.

use crate::error::{Error, Result};
use crate::mls::{apply_to_point, ControlSet, RigidTransform};
use crate::Vec3;

const MAGIC: &[u8; 4] = b"DGRD";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct DeformGrid {
    pub n: usize,
    pub min: Vec3,
    pub max: Vec3,
    /// `T(p) − p` per node, `x` fastest.
    pub displacement: Vec<Vec3>,
}

impl DeformGrid {
    pub fn node(&self, i: usize, j: usize, k: usize) -> Vec3 {
        let step = (self.max - self.min) / (self.n - 1) as f64;
        self.min + Vec3::new(i as f64 * step.x, j as f64 * step.y, k as f64 * step.z)
    }
}

/// Bounding box of the posed controls grown by `pad` of its extent per side.
pub fn padded_bounds(controls: &ControlSet, pad: f64) -> (Vec3, Vec3) {
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    for p in controls.posed() {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let margin = (hi - lo).map(|e| e.max(1e-6) * pad);
    (lo - margin, hi + margin)
}

/// Samples `field` at `n³` nodes spanning `[min, max]`.
pub fn sample_grid(
    field: impl Fn(&Vec3) -> Result<RigidTransform>,
    n: usize,
    (min, max): (Vec3, Vec3),
) -> Result<DeformGrid> {
    if n < 2 {
        return Err(Error::invalid("grid needs at least two nodes per axis"));
    }
    let mut grid = DeformGrid {
        n,
        min,
        max,
        displacement: Vec::with_capacity(n * n * n),
    };
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let p = grid.node(i, j, k);
                grid.displacement.push(apply_to_point(&field(&p)?, &p) - p);
            }
        }
    }
    Ok(grid)
}

pub fn write_grid(grid: &DeformGrid) -> Vec<u8> {
    let mut out = Vec::with_capacity(36 + grid.displacement.len() * 12);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(grid.n as u32).to_le_bytes());
    for v in grid
        .min
        .iter()
        .chain(grid.max.iter())
        .chain(grid.displacement.iter().flat_map(|d| d.iter()))
    {
        out.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    out
}

pub fn read_grid(bytes: &[u8]) -> Result<DeformGrid> {
    let bad = |reason: &str| Error::format("deformation grid", reason);
    if bytes.len() < 36 || &bytes[..4] != MAGIC {
        return Err(bad("missing DGRD header"));
    }
    let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
    if word(4) != VERSION {
        return Err(bad(&format!("unsupported version {}", word(4))));
    }
    let n = word(8) as usize;
    let float =
        |i: usize| f32::from_le_bytes(bytes[12 + 4 * i..16 + 4 * i].try_into().unwrap()) as f64;
    if n < 2 || bytes.len() != 36 + n.pow(3) * 12 {
        return Err(bad(&format!(
            "{} bytes do not hold a {n}³ grid",
            bytes.len()
        )));
    }
    let min = Vec3::new(float(0), float(1), float(2));
    let max = Vec3::new(float(3), float(4), float(5));
    let displacement = (0..n.pow(3))
        .map(|i| Vec3::new(float(6 + 3 * i), float(7 + 3 * i), float(8 + 3 * i)))
        .collect();
    Ok(DeformGrid {
        n,
        min,
        max,
        displacement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mls::fixtures::bend_fixture;
    use crate::mls::MlsField;

    #[test]
    fn grid_round_trip() {
        let controls = bend_fixture();
        let field = MlsField::new(controls.clone(), 1.0).unwrap();
        let bounds = padded_bounds(&controls, 0.1);
        let grid = sample_grid(|p| field.transform(p), 4, bounds).unwrap();
        assert_eq!(grid.displacement.len(), 64);
        let back = read_grid(&write_grid(&grid)).unwrap();
        assert_eq!(back.n, 4);
        for (a, b) in back.displacement.iter().zip(&grid.displacement) {
            assert!((a - b).norm() < 1e-5);
        }
        assert!(read_grid(&write_grid(&grid)[..40]).is_err());
    }

    #[test]
    fn rigid_field_is_constant_translation() {
        let grid = sample_grid(
            |_| {
                Ok(RigidTransform::new(
                    crate::Mat3::identity(),
                    Vec3::new(1.0, 2.0, 3.0),
                ))
            },
            3,
            (Vec3::zeros(), Vec3::repeat(1.0)),
        )
        .unwrap();
        assert!(grid
            .displacement
            .iter()
            .all(|d| *d == Vec3::new(1.0, 2.0, 3.0)));
        assert_eq!(grid.node(2, 1, 0), Vec3::new(1.0, 0.5, 0.0));
    }
}
