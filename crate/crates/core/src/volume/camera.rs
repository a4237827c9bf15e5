use crate::envmap::Direction;
use crate::error::{Error, Result};
use crate::mls::RigidTransform;
use crate::{Mat3, Vec3};

/// Pinhole camera looking down its local `−z`, `+y` up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Camera {
    pub origin: Vec3,
    /// Camera-to-world rotation; columns are right, up and back.
    pub orientation: Mat3,
    /// Vertical field of view in radians.
    pub fov: f64,
    pub width: usize,
    pub height: usize,
    pub near: f64,
    pub far: f64,
}

impl Camera {
    pub fn look_at(
        eye: Vec3,
        target: Vec3,
        up: Vec3,
        fov: f64,
        (width, height): (usize, usize),
        (near, far): (f64, f64),
    ) -> Result<Self> {
        let back = (eye - target)
            .try_normalize(1e-12)
            .ok_or_else(|| Error::invalid("camera eye and target coincide"))?;
        let right = up
            .cross(&back)
            .try_normalize(1e-12)
            .ok_or_else(|| Error::invalid("camera up is parallel to the view direction"))?;
        let true_up = back.cross(&right);
        let cam = Camera {
            origin: eye,
            orientation: Mat3::from_columns(&[right, true_up, back]),
            fov,
            width,
            height,
            near,
            far,
        };
        cam.validate()?;
        Ok(cam)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.near && self.near < self.far) {
            return Err(Error::invalid(format!(
                "ray bounds [{}, {}] are not ordered",
                self.near, self.far
            )));
        }
        if !(self.fov > 0.0 && self.fov < std::f64::consts::PI) {
            return Err(Error::invalid(format!(
                "field of view {} outside (0, π)",
                self.fov
            )));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::invalid("image has no pixels"));
        }
        Ok(())
    }

    /// World-space ray through the center of pixel `(x, y)`, row 0 at the top.
    pub fn ray(&self, x: usize, y: usize) -> (Vec3, Direction) {
        let half = (0.5 * self.fov).tan();
        let aspect = self.width as f64 / self.height as f64;
        let sx = (2.0 * (x as f64 + 0.5) / self.width as f64 - 1.0) * half * aspect;
        let sy = (1.0 - 2.0 * (y as f64 + 0.5) / self.height as f64) * half;
        let d = self.orientation * Vec3::new(sx, sy, -1.0);
        (
            self.origin,
            Direction::normalize(d).expect("pixel ray is nonzero"),
        )
    }

    /// The same camera moved rigidly by `t`.
    pub fn transformed(&self, t: &RigidTransform) -> Camera {
        Camera {
            origin: t.rotation * self.origin + t.translation,
            orientation: t.rotation * self.orientation,
            ..*self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_ray_hits_target() {
        let cam = Camera::look_at(
            Vec3::new(0.0, 0.0, 4.0),
            Vec3::zeros(),
            Vec3::y(),
            0.7,
            (65, 33),
            (2.0, 6.0),
        )
        .unwrap();
        let (o, d) = cam.ray(32, 16);
        assert_eq!(o, Vec3::new(0.0, 0.0, 4.0));
        assert!((d.as_vec() + Vec3::z()).norm() < 1e-12);
        // Top rows look up, left columns look left.
        assert!(cam.ray(32, 0).1.y() > 0.0);
        assert!(cam.ray(0, 16).1.x() < 0.0);
    }

    #[test]
    fn rejects_bad_setup() {
        let eye = Vec3::new(0.0, 0.0, 4.0);
        assert!(Camera::look_at(eye, Vec3::zeros(), Vec3::z(), 0.7, (8, 8), (2.0, 6.0)).is_err());
        assert!(Camera::look_at(eye, Vec3::zeros(), Vec3::y(), 3.2, (8, 8), (2.0, 6.0)).is_err());
        assert!(Camera::look_at(eye, Vec3::zeros(), Vec3::y(), 0.7, (8, 8), (6.0, 2.0)).is_err());
    }
}
