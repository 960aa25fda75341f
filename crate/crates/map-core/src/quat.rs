//! Unit quaternions representing end-effector orientation.
//!
//! Scalar-first layout `(w, x, y, z)`, matching the trajectory file
//! formats. `q` and `-q` encode the same rotation; orientation columns are
//! canonicalized to `w >= 0` before entering any kernel so that the
//! double cover cannot split otherwise identical inputs.

// Float method calls resolve inherently instead when a test build
// links std into the graph; the import must stay for no_std builds.
#[allow(unused_imports)]
use num_traits::Float;

/// Quaternion with scalar part `w` and vector part `(x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quat {
    pub const IDENTITY: Quat = Quat { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Quat {
        Quat { w, x, y, z }
    }

    /// Rotation of `angle` radians about `axis` (normalized internally).
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Quat {
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        assert!(norm > 0.0, "rotation axis must be nonzero");
        let half = 0.5 * angle;
        let s = half.sin() / norm;
        Quat {
            w: half.cos(),
            x: axis[0] * s,
            y: axis[1] * s,
            z: axis[2] * s,
        }
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(self, o: Quat) -> f64 {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    /// Unit-norm copy, or `None` when the norm is too small to normalize.
    pub fn normalized(self) -> Option<Quat> {
        let n = self.norm();
        if n < 1e-12 || !n.is_finite() {
            return None;
        }
        Some(Quat {
            w: self.w / n,
            x: self.x / n,
            y: self.y / n,
            z: self.z / n,
        })
    }

    pub fn conjugate(self) -> Quat {
        Quat { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    /// Sign-flipped onto the `w >= 0` hemisphere of the double cover.
    pub fn canonicalized(self) -> Quat {
        if self.w < 0.0 {
            Quat { w: -self.w, x: -self.x, y: -self.y, z: -self.z }
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn as_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 4]) -> Quat {
        Quat { w: a[0], x: a[1], y: a[2], z: a[3] }
    }
}

impl core::ops::Mul for Quat {
    type Output = Quat;

    /// Hamilton product; `a * b` applies `b` first, then `a`.
    fn mul(self, o: Quat) -> Quat {
        Quat {
            w: self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            x: self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            y: self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            z: self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn axis_angle_quarter_turn_about_z() {
        let q = Quat::from_axis_angle([0.0, 0.0, 1.0], FRAC_PI_2);
        // (cos 45, 0, 0, sin 45).
        assert!((q.w - (PI / 4.0).cos()).abs() < 1e-15);
        assert!((q.z - (PI / 4.0).sin()).abs() < 1e-15);
        assert_eq!(q.x, 0.0);
        assert_eq!(q.y, 0.0);
        assert!((q.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn conjugate_product_is_identity() {
        let q = Quat::from_axis_angle([1.0, 2.0, -0.5], 0.83);
        let p = q.conjugate() * q;
        assert!((p.w - 1.0).abs() < 1e-12);
        assert!(p.x.abs() < 1e-12 && p.y.abs() < 1e-12 && p.z.abs() < 1e-12);
    }

    #[test]
    fn product_composes_rotations() {
        // Two quarter turns about z compose to a half turn.
        let q = Quat::from_axis_angle([0.0, 0.0, 1.0], FRAC_PI_2);
        let half = q * q;
        let expect = Quat::from_axis_angle([0.0, 0.0, 1.0], PI);
        assert!((half.w - expect.w).abs() < 1e-12);
        assert!((half.z - expect.z).abs() < 1e-12);
    }

    #[test]
    fn canonicalize_flips_negative_hemisphere() {
        let q = Quat::new(-0.5, 0.5, 0.5, -0.5);
        let c = q.canonicalized();
        assert_eq!(c.w, 0.5);
        assert_eq!(c.x, -0.5);
        assert_eq!(c.z, 0.5);
        // Already-canonical values pass through untouched.
        assert_eq!(c.canonicalized(), c);
    }

    #[test]
    fn zero_quaternion_does_not_normalize() {
        assert!(Quat::new(0.0, 0.0, 0.0, 0.0).normalized().is_none());
        assert!(Quat::new(1e-300, 0.0, 0.0, 0.0).normalized().is_none());
    }

    #[test]
    fn normalized_rescales() {
        let q = Quat::new(0.0, 3.0, 0.0, 4.0).normalized().unwrap();
        assert!((q.norm() - 1.0).abs() < 1e-15);
        assert!((q.x - 0.6).abs() < 1e-15);
        assert!((q.z - 0.8).abs() < 1e-15);
    }
}
