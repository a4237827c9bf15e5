//! Surface-field baseline: each query takes the rigid motion of the triangle
//! whose posed centroid is nearest.

use kiddo::{KdTree, SquaredEuclidean};

use crate::error::{Error, Result};
use crate::mls::{fit_rigid, ControlSet, RigidTransform};
use crate::Vec3;

pub struct SurfaceField {
    tree: KdTree<f64, 3>,
    motions: Vec<RigidTransform>,
}

impl SurfaceField {
    pub fn new(controls: &ControlSet) -> Result<Self> {
        let triangles = controls.triangles().ok_or(Error::MissingTriangles)?;
        if triangles.is_empty() {
            return Err(Error::MissingTriangles);
        }
        let mut tree: KdTree<f64, 3> = KdTree::with_capacity(triangles.len());
        let mut motions = Vec::with_capacity(triangles.len());
        for (i, tri) in triangles.iter().enumerate() {
            let posed: Vec<Vec3> = tri.iter().map(|&j| controls.posed()[j]).collect();
            let unposed: Vec<Vec3> = tri.iter().map(|&j| controls.unposed()[j]).collect();
            let motion = fit_rigid(&posed, &unposed, &[1.0; 3])
                .map_err(|_| Error::Degenerate(format!("triangle {i} {tri:?} has no area")))?;
            let c = (posed[0] + posed[1] + posed[2]) / 3.0;
            tree.add(&[c.x, c.y, c.z], i as u64);
            motions.push(motion);
        }
        Ok(SurfaceField { tree, motions })
    }

    pub fn nearest_triangle(&self, p: &Vec3) -> usize {
        self.tree
            .nearest_one::<SquaredEuclidean>(&[p.x, p.y, p.z])
            .item as usize
    }

    pub fn transform(&self, p: &Vec3) -> RigidTransform {
        self.motions[self.nearest_triangle(p)]
    }
}

/// One-shot query; build a [`SurfaceField`] to answer many.
pub fn sf_transform(controls: &ControlSet, p: &Vec3) -> Result<RigidTransform> {
    Ok(SurfaceField::new(controls)?.transform(p))
}
