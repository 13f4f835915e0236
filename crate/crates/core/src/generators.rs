//! Test families of smooth origin-symmetric bodies.

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::spectral::AngularGrid;

/// Disk of radius `radius` centered at the origin.
pub fn disk(grid: &AngularGrid, radius: f64) -> Result<ConvexBody> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "disk radius {radius} must be positive"
        )));
    }
    ConvexBody::from_samples(grid, &vec![radius; grid.len()])
}

/// Ellipse with semi-axis `a` along direction `phi` and `b` perpendicular.
pub fn ellipse_body(grid: &AngularGrid, a: f64, b: f64, phi: f64) -> Result<ConvexBody> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "semi-axes ({a}, {b}) must be positive"
        )));
    }
    let values: Vec<f64> = grid
        .angles()
        .map(|t| {
            let along = (t - phi).cos();
            let across = (t - phi).sin();
            (a * a * along * along + b * b * across * across).sqrt()
        })
        .collect();
    ConvexBody::from_samples(grid, &values)
}

/// `s(θ) = 1 + a cos(2kθ)`; strictly convex iff `|a|(4k² − 1) < 1`.
pub fn cosine_perturbed(grid: &AngularGrid, a: f64, k: u32) -> Result<ConvexBody> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "harmonic index k must be >= 1".into(),
        ));
    }
    let m = 2 * k as usize;
    if m >= grid.max_wavenumber() {
        return Err(Error::InvalidParameter(format!(
            "harmonic 2k = {m} is not resolved by {} samples",
            grid.len()
        )));
    }
    let mf = m as f64;
    let values: Vec<f64> = grid.angles().map(|t| 1.0 + a * (mf * t).cos()).collect();
    ConvexBody::from_samples(grid, &values)
}

/// Unit ball of the `ℓ^q` norm, `|x|^q + |y|^q ≤ 1`, for `q ≥ 2`.
///
/// Its support function is the dual norm `‖u‖_{q'}`, `1/q + 1/q' = 1`.
/// The curvature radius is infinite at the four flat points; from about
/// `q = 5` on, the spectral `s'' + s` overshoots below zero next to them on
/// any grid and construction fails with `NotStrictlyConvex`.
pub fn superellipse(grid: &AngularGrid, q: f64) -> Result<ConvexBody> {
    if !(q >= 2.0) || !q.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "superellipse exponent {q} must be >= 2"
        )));
    }
    let values: Vec<f64> = grid
        .angles()
        .map(|t| superellipse_support(q, t.cos().abs(), t.sin().abs()))
        .collect();
    ConvexBody::from_samples(grid, &values)
}

/// Support of the `ℓ^q` ball in the direction `(ux, uy)`, `ux, uy ≥ 0`.
pub(crate) fn superellipse_support(q: f64, ux: f64, uy: f64) -> f64 {
    let dual = q / (q - 1.0);
    (ux.powf(dual) + uy.powf(dual)).powf(1.0 / dual)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_perturbed_curvature_range() {
        let g = AngularGrid::new(256).unwrap();
        let body = cosine_perturbed(&g, 0.05, 1).unwrap();
        assert!((body.min_curvature_radius() - 0.85).abs() < 1e-12);
        assert!((body.max_curvature_radius() - 1.15).abs() < 1e-12);
    }

    #[test]
    fn cosine_perturbed_bound_violation() {
        let g = AngularGrid::new(256).unwrap();
        // 4k² − 1 = 15 for k = 2
        assert!(matches!(
            cosine_perturbed(&g, 0.07, 2),
            Err(Error::NotStrictlyConvex { .. })
        ));
        assert!(cosine_perturbed(&g, 0.06, 2).is_ok());
    }

    #[test]
    fn superellipse_two_is_unit_disk() {
        let g = AngularGrid::new(256).unwrap();
        let body = superellipse(&g, 2.0).unwrap();
        assert!(body.support().iter().all(|s| (s - 1.0).abs() < 1e-9));
        assert!(superellipse(&g, 1.5).is_err());
        assert!(superellipse(&g, 4.5).is_ok());
        assert!(matches!(
            superellipse(&g, 6.0),
            Err(Error::NotStrictlyConvex { .. })
        ));
    }

    #[test]
    fn superellipse_support_is_attained_on_the_boundary() {
        // x = u^{q'−1} / ‖u‖^{q'−1} lies on the ℓ^q sphere and ⟨u, x⟩ = s(u)
        for &q in &[2.5, 3.0, 4.0, 7.0] {
            let qd = q / (q - 1.0);
            for i in 1..40 {
                let t = i as f64 * 0.0392;
                let (ux, uy) = (t.cos(), t.sin());
                let s = superellipse_support(q, ux, uy);
                let (x, y) = ((ux / s).powf(qd - 1.0), (uy / s).powf(qd - 1.0));
                assert!((x.powf(q) + y.powf(q) - 1.0).abs() < 1e-13);
                assert!((ux * x + uy * y - s).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn rotated_round_ellipse_is_disk() {
        let g = AngularGrid::new(128).unwrap();
        let body = ellipse_body(&g, 1.0, 1.0, 0.83).unwrap();
        assert!(body.support().iter().all(|s| (s - 1.0).abs() < 1e-15));
    }
}
