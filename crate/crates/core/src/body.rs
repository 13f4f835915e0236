//! Origin-symmetric, strictly convex planar bodies represented by sampled
//! support functions.
//!
//! A body is built from raw samples by antipodal averaging followed by
//! validation: every support value must be positive and the curvature radius
//! `r = s'' + s` must exceed `1e-8 · max s` everywhere. Bodies are immutable;
//! every operation returns a new one.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::linear::LinearMap2;
use crate::spectral::{AngularGrid, TrigSeries};

/// Relative curvature-radius floor used by validation.
pub const DEFAULT_CURVATURE_TOL: f64 = 1e-8;

/// Origin-symmetric support samples on a uniform grid.
///
/// Symmetry is exact: `values[j + n/2] == values[j]` bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportFunction {
    grid: AngularGrid,
    values: Vec<f64>,
}

impl SupportFunction {
    /// Projects arbitrary samples onto the origin-symmetric class.
    pub fn symmetrized(grid: &AngularGrid, values: &[f64]) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        let half = grid.half();
        let mut out = vec![0.0; grid.len()];
        for j in 0..half {
            let avg = 0.5 * (values[j] + values[j + half]);
            out[j] = avg;
            out[j + half] = avg;
        }
        for (index, &value) in out.iter().enumerate() {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositiveSupport { index, value });
            }
        }
        Ok(Self {
            grid: grid.clone(),
            values: out,
        })
    }

    #[inline]
    pub fn grid(&self) -> &AngularGrid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// True when every antipodal pair matches exactly.
    pub fn is_symmetric(&self) -> bool {
        let half = self.grid.half();
        (0..half).all(|j| self.values[j] == self.values[j + half])
    }
}

/// Validated body with cached slope `s'`, curvature radius and area.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    support: SupportFunction,
    slope: Vec<f64>,
    curvature_radius: Vec<f64>,
    area: f64,
    min_r: f64,
    max_r: f64,
}

impl ConvexBody {
    /// Symmetrizes and validates raw support samples with the default
    /// curvature tolerance.
    pub fn from_samples(grid: &AngularGrid, values: &[f64]) -> Result<Self> {
        Self::from_samples_with_tol(grid, values, DEFAULT_CURVATURE_TOL)
    }

    pub fn from_samples_with_tol(
        grid: &AngularGrid,
        values: &[f64],
        relative_tol: f64,
    ) -> Result<Self> {
        let support = SupportFunction::symmetrized(grid, values)?;
        Self::from_support(support, relative_tol)
    }

    fn from_support(support: SupportFunction, relative_tol: f64) -> Result<Self> {
        let grid = support.grid().clone();
        let s = support.values();
        let (slope, second) = grid.derivatives(s);
        let curvature_radius: Vec<f64> = second.iter().zip(s).map(|(d2, v)| d2 + v).collect();

        let max_s = s.iter().cloned().fold(f64::MIN, f64::max);
        let tolerance = relative_tol * max_s;
        let (index, min_r) =
            curvature_radius
                .iter()
                .cloned()
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |acc, (j, r)| if r < acc.1 { (j, r) } else { acc },
                );
        if !(min_r > tolerance) {
            return Err(Error::NotStrictlyConvex {
                index,
                min_radius: min_r,
                tolerance,
            });
        }
        let max_r = curvature_radius.iter().cloned().fold(f64::MIN, f64::max);
        let integrand: Vec<f64> = s
            .iter()
            .zip(&curvature_radius)
            .map(|(a, b)| a * b)
            .collect();
        let area = 0.5 * grid.integrate(&integrand);

        Ok(Self {
            support,
            slope,
            curvature_radius,
            area,
            min_r,
            max_r,
        })
    }

    #[inline]
    pub fn grid(&self) -> &AngularGrid {
        self.support.grid()
    }

    #[inline]
    pub fn support_function(&self) -> &SupportFunction {
        &self.support
    }

    /// Support samples `s(θ_j)`.
    #[inline]
    pub fn support(&self) -> &[f64] {
        self.support.values()
    }

    /// `s'(θ_j)` by spectral differentiation.
    #[inline]
    pub fn slope(&self) -> &[f64] {
        &self.slope
    }

    /// `r_j = s''_j + s_j`, the reciprocal boundary curvature.
    #[inline]
    pub fn curvature_radius(&self) -> &[f64] {
        &self.curvature_radius
    }

    #[inline]
    pub fn area(&self) -> f64 {
        self.area
    }

    #[inline]
    pub fn min_curvature_radius(&self) -> f64 {
        self.min_r
    }

    #[inline]
    pub fn max_curvature_radius(&self) -> f64 {
        self.max_r
    }

    pub fn min_support(&self) -> f64 {
        self.support().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_support(&self) -> f64 {
        self.support()
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn series(&self) -> TrigSeries {
        self.grid().series(self.support())
    }

    /// Support value at an arbitrary angle by trigonometric interpolation.
    pub fn support_at(&self, theta: f64) -> f64 {
        self.series().eval(theta)
    }

    /// Boundary point with outward normal `(cos θ, sin θ)`:
    /// `x = s u + s' u⊥`.
    pub fn boundary_point(&self, theta: f64) -> [f64; 2] {
        let (s, ds, _) = self.series().eval_all(theta);
        point_from_support(theta, s, ds)
    }

    /// Boundary points at every grid angle.
    pub fn boundary_points(&self) -> Vec<[f64; 2]> {
        self.grid()
            .angles()
            .zip(self.support().iter().zip(&self.slope))
            .map(|(t, (&s, &ds))| point_from_support(t, s, ds))
            .collect()
    }

    /// Dilation by `k > 0` about the origin.
    pub fn scaled(&self, k: f64) -> Result<ConvexBody> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "scale factor {k} must be positive"
            )));
        }
        let values: Vec<f64> = self.support().iter().map(|v| v * k).collect();
        ConvexBody::from_samples(self.grid(), &values)
    }

    /// Dilation that brings the area to `target`.
    pub fn with_area(&self, target: f64) -> Result<ConvexBody> {
        self.scaled((target / self.area).sqrt())
    }

    /// Same body sampled on another grid.
    pub fn resampled(&self, grid: &AngularGrid) -> Result<ConvexBody> {
        if grid == self.grid() {
            return Ok(self.clone());
        }
        let values = self.series().resample(grid);
        ConvexBody::from_samples(grid, &values)
    }

    /// Image `T K` via `s_{TK}(u) = |Tᵀu| · s_K(Tᵀu / |Tᵀu|)`.
    pub fn apply_linear(&self, map: &LinearMap2) -> Result<ConvexBody> {
        let series = self.series();
        let values: Vec<f64> = self
            .grid()
            .angles()
            .map(|t| {
                let v = map.apply_transpose([t.cos(), t.sin()]);
                let norm = v[0].hypot(v[1]);
                let phi = v[1].atan2(v[0]).rem_euclid(TAU);
                norm * series.eval(phi)
            })
            .collect();
        ConvexBody::from_samples(self.grid(), &values)
    }

    /// Hausdorff distance `max_θ |s_K − s_L|`, resampling `other` onto this
    /// grid when they differ.
    pub fn hausdorff(&self, other: &ConvexBody) -> f64 {
        if self.grid() == other.grid() {
            max_abs_diff(self.support(), other.support())
        } else {
            let resampled = other.series().resample(self.grid());
            max_abs_diff(self.support(), &resampled)
        }
    }

    /// Hausdorff distance without resampling.
    pub fn hausdorff_strict(&self, other: &ConvexBody) -> Result<f64> {
        if self.grid() != other.grid() {
            return Err(Error::GridMismatch {
                left: self.grid().len(),
                right: other.grid().len(),
            });
        }
        Ok(max_abs_diff(self.support(), other.support()))
    }

    /// `s_self ≤ s_other + tol` at every grid angle.
    pub fn is_dominated_by(&self, other: &ConvexBody, tol: f64) -> bool {
        self.support()
            .iter()
            .zip(other.support())
            .all(|(a, b)| *a <= *b + tol)
    }
}

#[inline]
fn point_from_support(theta: f64, s: f64, ds: f64) -> [f64; 2] {
    let (sin, cos) = theta.sin_cos();
    [s * cos - ds * sin, s * sin + ds * cos]
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Free-function spelling of [`ConvexBody::from_samples`].
pub fn body_from_samples(grid: &AngularGrid, values: &[f64]) -> Result<ConvexBody> {
    ConvexBody::from_samples(grid, values)
}

pub fn curvature_radius(body: &ConvexBody) -> &[f64] {
    body.curvature_radius()
}

pub fn area(body: &ConvexBody) -> f64 {
    body.area()
}

pub fn boundary_point(body: &ConvexBody, theta: f64) -> [f64; 2] {
    body.boundary_point(theta)
}

pub fn hausdorff(a: &ConvexBody, b: &ConvexBody) -> f64 {
    a.hausdorff(b)
}

pub fn apply_linear(body: &ConvexBody, map: &LinearMap2) -> Result<ConvexBody> {
    body.apply_linear(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize) -> AngularGrid {
        AngularGrid::new(n).unwrap()
    }

    fn sample(g: &AngularGrid, f: impl Fn(f64) -> f64) -> Vec<f64> {
        g.angles().map(f).collect()
    }

    #[test]
    fn constant_support_is_unit_disk() {
        let g = grid(256);
        let body = ConvexBody::from_samples(&g, &vec![1.0; 256]).unwrap();
        assert!((body.area() - PI).abs() < 1e-12);
        assert!(body
            .curvature_radius()
            .iter()
            .all(|r| (r - 1.0).abs() < 1e-13));
    }

    #[test]
    fn odd_harmonic_is_averaged_away() {
        let g = grid(256);
        let body = ConvexBody::from_samples(&g, &sample(&g, |t| 1.0 + 0.5 * t.cos())).unwrap();
        assert!(body.support().iter().all(|s| (s - 1.0).abs() < 1e-15));
        assert!(body.support_function().is_symmetric());
    }

    #[test]
    fn strong_second_harmonic_is_not_convex() {
        let g = grid(256);
        let err =
            ConvexBody::from_samples(&g, &sample(&g, |t| 1.0 + 0.9 * (2.0 * t).cos())).unwrap_err();
        match err {
            Error::NotStrictlyConvex {
                index, min_radius, ..
            } => {
                assert_eq!(index, 0);
                assert!((min_radius - (1.0 - 2.7)).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_positive_support_rejected() {
        let g = grid(16);
        let mut v = vec![1.0; 16];
        v[3] = -1.0;
        v[11] = 0.5;
        assert!(matches!(
            ConvexBody::from_samples(&g, &v),
            Err(Error::NonPositiveSupport { index: 3, .. })
        ));
        assert!(matches!(
            ConvexBody::from_samples(&g, &v[..8]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn curvature_of_second_harmonic() {
        let g = grid(128);
        let a = 0.1;
        let body =
            ConvexBody::from_samples(&g, &sample(&g, |t| 1.0 + a * (2.0 * t).cos())).unwrap();
        for (j, t) in g.angles().enumerate() {
            let expected = 1.0 - 3.0 * a * (2.0 * t).cos();
            assert!((body.curvature_radius()[j] - expected).abs() < 1e-12);
        }
        // A = ½∫(1 + a c)(1 − 3a c) = π(1 − 3a²/2)
        assert!((body.area() - PI * (1.0 - 1.5 * a * a)).abs() < 1e-13);
    }

    #[test]
    fn boundary_point_satisfies_support_identity() {
        let g = grid(128);
        let body =
            ConvexBody::from_samples(&g, &sample(&g, |t| 1.0 + 0.03 * (4.0 * t).cos())).unwrap();
        for &t in &[0.0, 0.3, 1.7, 2.9, 5.5] {
            let x = body.boundary_point(t);
            let s = x[0] * t.cos() + x[1] * t.sin();
            assert!((s - body.support_at(t)).abs() < 1e-12);
        }
        let unit = ConvexBody::from_samples(&g, &vec![1.0; 128]).unwrap();
        let p = unit.boundary_point(0.0);
        assert!((p[0] - 1.0).abs() < 1e-14 && p[1].abs() < 1e-14);
    }

    #[test]
    fn hausdorff_of_disks_and_grid_mismatch() {
        let a = ConvexBody::from_samples(&grid(64), &vec![1.0; 64]).unwrap();
        let b = ConvexBody::from_samples(&grid(64), &vec![2.0; 64]).unwrap();
        assert_eq!(a.hausdorff(&b), 1.0);
        assert_eq!(a.hausdorff(&a), 0.0);
        let c = ConvexBody::from_samples(&grid(32), &vec![2.0; 32]).unwrap();
        assert!(matches!(
            a.hausdorff_strict(&c),
            Err(Error::GridMismatch { .. })
        ));
        assert!((a.hausdorff(&c) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn scaling_rejects_non_positive_factor() {
        let a = ConvexBody::from_samples(&grid(16), &[1.0; 16]).unwrap();
        assert!(a.scaled(0.0).is_err());
        assert!((a.scaled(3.0).unwrap().area() - 9.0 * PI).abs() < 1e-12);
    }
}
