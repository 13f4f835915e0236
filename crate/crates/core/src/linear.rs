use std::ops::Mul;

use crate::error::{Error, Result};

/// Invertible linear map of the plane, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearMap2 {
    m: [[f64; 2]; 2],
}

impl LinearMap2 {
    /// Tolerance on `|det - 1|` for the SL(2) flag.
    pub const SPECIAL_TOL: f64 = 1e-12;

    pub const IDENTITY: LinearMap2 = LinearMap2 {
        m: [[1.0, 0.0], [0.0, 1.0]],
    };

    pub fn new(m: [[f64; 2]; 2]) -> Result<Self> {
        let map = Self { m };
        let det = map.det();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::SingularMap(det));
        }
        Ok(map)
    }

    pub fn diagonal(a: f64, b: f64) -> Result<Self> {
        Self::new([[a, 0.0], [0.0, b]])
    }

    pub fn rotation(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self {
            m: [[c, -s], [s, c]],
        }
    }

    pub fn scaling(k: f64) -> Result<Self> {
        Self::diagonal(k, k)
    }

    #[inline]
    pub fn entries(&self) -> [[f64; 2]; 2] {
        self.m
    }

    #[inline]
    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// True when the map is in SL(2) up to [`Self::SPECIAL_TOL`].
    pub fn is_special(&self) -> bool {
        (self.det() - 1.0).abs() <= Self::SPECIAL_TOL
    }

    pub fn transpose(&self) -> Self {
        Self {
            m: [[self.m[0][0], self.m[1][0]], [self.m[0][1], self.m[1][1]]],
        }
    }

    pub fn inverse(&self) -> Self {
        let d = self.det();
        Self {
            m: [
                [self.m[1][1] / d, -self.m[0][1] / d],
                [-self.m[1][0] / d, self.m[0][0] / d],
            ],
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &LinearMap2) -> LinearMap2 {
        let a = &self.m;
        let b = &other.m;
        LinearMap2 {
            m: [
                [
                    a[0][0] * b[0][0] + a[0][1] * b[1][0],
                    a[0][0] * b[0][1] + a[0][1] * b[1][1],
                ],
                [
                    a[1][0] * b[0][0] + a[1][1] * b[1][0],
                    a[1][0] * b[0][1] + a[1][1] * b[1][1],
                ],
            ],
        }
    }

    #[inline]
    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    #[inline]
    pub fn apply_transpose(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.m[0][0] * v[0] + self.m[1][0] * v[1],
            self.m[0][1] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// Frobenius distance between two maps.
    pub fn distance(&self, other: &LinearMap2) -> f64 {
        let mut acc = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                acc += (self.m[i][j] - other.m[i][j]).powi(2);
            }
        }
        acc.sqrt()
    }
}

impl Mul for LinearMap2 {
    type Output = LinearMap2;

    fn mul(self, rhs: LinearMap2) -> LinearMap2 {
        self.compose(&rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_maps_are_rejected() {
        assert!(matches!(
            LinearMap2::new([[1.0, 2.0], [2.0, 4.0]]),
            Err(Error::SingularMap(_))
        ));
    }

    #[test]
    fn rotations_are_special() {
        let r = LinearMap2::rotation(0.7);
        assert!(r.is_special());
        assert!(!LinearMap2::diagonal(2.0, 1.0).unwrap().is_special());
    }

    #[test]
    fn compose_applies_right_factor_first() {
        let a = LinearMap2::diagonal(2.0, 3.0).unwrap();
        let b = LinearMap2::new([[1.0, 1.0], [0.0, 1.0]]).unwrap();
        let v = [0.5, -1.5];
        let lhs = (a * b).apply(v);
        let rhs = a.apply(b.apply(v));
        assert!((lhs[0] - rhs[0]).abs() < 1e-15 && (lhs[1] - rhs[1]).abs() < 1e-15);
        let id = a.compose(&a.inverse());
        assert!(id.distance(&LinearMap2::IDENTITY) < 1e-15);
    }
}
