//! Affine invariants in support-function coordinates.
//!
//! Boundary integrals are rewritten as angle integrals using
//! `de = r dθ`, `κ = 1/r` and `⟨x, N⟩ = s`:
//!
//! * affine support `σ = s r^{1/3}`
//! * affine arc length element `d𝔰 = r^{2/3} dθ`
//! * `Ω_p = ∫ r^{2/(2+p)} s^{−2(p−1)/(2+p)} dθ`
//!
//! and then discretized with the trapezoid rule.

use std::f64::consts::PI;

use crate::body::ConvexBody;
use crate::error::{Error, Result};

/// Relative slack shared by all inequality assertions.
pub const QUADRATURE_TOL: f64 = 1e-8;

/// Admissible area mismatch for "area π" normalization.
pub const AREA_NORMALIZATION_TOL: f64 = 1e-8;

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidP(p));
    }
    Ok(())
}

/// Sampled affine support function and affine arc-length density.
#[derive(Debug, Clone)]
pub struct AffineProfile {
    pub sigma: Vec<f64>,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// `d𝔰/dθ = r^{2/3}`
    pub affine_length_element: Vec<f64>,
}

pub fn affine_support(body: &ConvexBody) -> AffineProfile {
    let sigma: Vec<f64> = body
        .support()
        .iter()
        .zip(body.curvature_radius())
        .map(|(s, r)| s * r.cbrt())
        .collect();
    let sigma_min = sigma.iter().cloned().fold(f64::INFINITY, f64::min);
    let sigma_max = sigma.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let affine_length_element = body
        .curvature_radius()
        .iter()
        .map(|r| r.cbrt().powi(2))
        .collect();
    AffineProfile {
        sigma,
        sigma_min,
        sigma_max,
        affine_length_element,
    }
}

/// Total affine arc length `∫ d𝔰`.
pub fn affine_length(body: &ConvexBody) -> f64 {
    body.grid()
        .integrate(&affine_support(body).affine_length_element)
}

/// p-affine surface area.
pub fn omega_p(body: &ConvexBody, p: f64) -> Result<f64> {
    check_p(p)?;
    let er = 2.0 / (2.0 + p);
    let es = -2.0 * (p - 1.0) / (2.0 + p);
    let integrand: Vec<f64> = body
        .support()
        .iter()
        .zip(body.curvature_radius())
        .map(|(s, r)| r.powf(er) * s.powf(es))
        .collect();
    Ok(body.grid().integrate(&integrand))
}

/// `(Ω_p^{2+p} / (2^{2+p} A^{2−p}))^{1/p}` from its ingredients.
pub fn ratio_from_parts(omega: f64, area: f64, p: f64) -> f64 {
    // logs keep Ω^{2+p} from overflowing for large p
    let log = (2.0 + p) * (omega.ln() - 2f64.ln()) - (2.0 - p) * area.ln();
    (log / p).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsoperimetricSummary {
    pub p: f64,
    pub omega_p: f64,
    pub area: f64,
    pub ratio: f64,
    /// `1 − ratio/π²`
    pub deficit: f64,
}

pub fn iso_ratio(body: &ConvexBody, p: f64) -> Result<IsoperimetricSummary> {
    let omega = omega_p(body, p)?;
    let area = body.area();
    let ratio = ratio_from_parts(omega, area, p);
    Ok(IsoperimetricSummary {
        p,
        omega_p: omega,
        area,
        ratio,
        deficit: 1.0 - ratio / (PI * PI),
    })
}

/// `1 − ratio/π²` for `body` at exponent `p`.
pub fn deficit(body: &ConvexBody, p: f64) -> Result<f64> {
    Ok(iso_ratio(body, p)?.deficit)
}

/// Exponents of the entropy integrand: `(−1 − 3p/(p+2), (1−p)/(p+2))`.
///
/// The first is the power of σ in `σ^{e} σ_𝔰²`; the second is the power
/// `a` in the equivalent form `((σ^a)_𝔰)²`. They satisfy `e = 2a − 2`.
pub fn entropy_exponents(p: f64) -> (f64, f64) {
    (-1.0 - 3.0 * p / (p + 2.0), (1.0 - p) / (p + 2.0))
}

/// `∫ σ^{−1−3p/(p+2)} σ_𝔰² d𝔰`, evaluated as
/// `∫ σ^{−1−3p/(p+2)} σ'(θ)² r^{−2/3} dθ`.
pub fn entropy_integral(body: &ConvexBody, p: f64) -> Result<f64> {
    check_p(p)?;
    let (e, _) = entropy_exponents(p);
    let profile = affine_support(body);
    let dsigma = body.grid().first_derivative(&profile.sigma);
    let integrand: Vec<f64> = profile
        .sigma
        .iter()
        .zip(&dsigma)
        .zip(body.curvature_radius())
        .map(|((sig, ds), r)| sig.powf(e) * ds * ds / r.cbrt().powi(2))
        .collect();
    Ok(body.grid().integrate(&integrand))
}

/// `∫ ((σ^a)_𝔰)² d𝔰` with `a = (1−p)/(p+2)`; equals `a² ·`
/// [`entropy_integral`].
pub fn entropy_power_form(body: &ConvexBody, p: f64) -> Result<f64> {
    check_p(p)?;
    let (_, a) = entropy_exponents(p);
    let profile = affine_support(body);
    let powered: Vec<f64> = profile.sigma.iter().map(|s| s.powf(a)).collect();
    let d = body.grid().first_derivative(&powered);
    let integrand: Vec<f64> = d
        .iter()
        .zip(body.curvature_radius())
        .map(|(v, r)| v * v / r.cbrt().powi(2))
        .collect();
    Ok(body.grid().integrate(&integrand))
}

/// Extremes of σ on an area-π body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaWindow {
    pub min: f64,
    pub max: f64,
}

impl SigmaWindow {
    /// `min ≤ 1 + tol` and `max ≥ 1 − tol`.
    pub fn straddles_one(&self, tol: f64) -> bool {
        self.min <= 1.0 + tol && self.max >= 1.0 - tol
    }
}

pub fn sigma_window(body: &ConvexBody) -> Result<SigmaWindow> {
    if (body.area() - PI).abs() > AREA_NORMALIZATION_TOL {
        return Err(Error::NotNormalized { area: body.area() });
    }
    let profile = affine_support(body);
    Ok(SigmaWindow {
        min: profile.sigma_min,
        max: profile.sigma_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cosine_perturbed, disk, ellipse_body};
    use crate::spectral::AngularGrid;

    #[test]
    fn disk_profile() {
        let g = AngularGrid::new(256).unwrap();
        let unit = disk(&g, 1.0).unwrap();
        let prof = affine_support(&unit);
        assert!(prof.sigma.iter().all(|s| (s - 1.0).abs() < 1e-14));
        let r = 1.7;
        let big = disk(&g, r).unwrap();
        let prof = affine_support(&big);
        assert!(prof
            .sigma
            .iter()
            .all(|s| (s - r.powf(4.0 / 3.0)).abs() < 1e-13));
        assert!((omega_p(&big, 1.0).unwrap() - 2.0 * PI * r.powf(2.0 / 3.0)).abs() < 1e-12);
        for &p in &[1.0, 1.5, 2.0, 3.0, 7.0] {
            assert!((omega_p(&unit, p).unwrap() - 2.0 * PI).abs() < 1e-12);
            let sum = iso_ratio(&unit, p).unwrap();
            assert!((sum.ratio - PI * PI).abs() < 1e-11);
        }
    }

    #[test]
    fn invalid_p() {
        let g = AngularGrid::new(64).unwrap();
        let unit = disk(&g, 1.0).unwrap();
        assert_eq!(omega_p(&unit, 0.5).unwrap_err(), Error::InvalidP(0.5));
        assert!(iso_ratio(&unit, f64::NAN).is_err());
        assert!(entropy_integral(&unit, 0.0).is_err());
    }

    #[test]
    fn exponent_identity() {
        for &p in &[1.5, 2.0, 3.0, 10.0] {
            let (e, a) = entropy_exponents(p);
            assert!((e - (2.0 * a - 2.0)).abs() < 1e-15);
            assert!((a - (0.5 - 3.0 * p / (2.0 * (p + 2.0)))).abs() < 1e-15);
        }
    }

    #[test]
    fn ellipse_has_constant_sigma_and_zero_entropy() {
        let g = AngularGrid::new(512).unwrap();
        let e = ellipse_body(&g, 2.0, 0.5, 0.4).unwrap();
        let prof = affine_support(&e);
        assert!(prof.sigma.iter().all(|s| (s - 1.0).abs() < 1e-9));
        for &p in &[1.5, 2.0, 4.0] {
            assert!(entropy_integral(&e, p).unwrap().abs() < 1e-10);
        }
        let w = sigma_window(&e).unwrap();
        assert!(w.straddles_one(1e-9));
    }

    #[test]
    fn sigma_window_requires_area_pi() {
        let g = AngularGrid::new(64).unwrap();
        assert!(matches!(
            sigma_window(&disk(&g, 1.1).unwrap()),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn power_form_identity() {
        let g = AngularGrid::new(512).unwrap();
        let body = cosine_perturbed(&g, 0.04, 2).unwrap();
        for &p in &[1.5, 2.0, 3.0, 10.0] {
            let (_, a) = entropy_exponents(p);
            let ent = entropy_integral(&body, p).unwrap();
            let pow = entropy_power_form(&body, p).unwrap();
            assert!(
                (pow - a * a * ent).abs() <= 1e-10 * pow.abs(),
                "p={p}: {pow} vs {}",
                a * a * ent
            );
        }
    }
}
