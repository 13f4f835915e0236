//! Deficit-to-distance estimates: constants and the verification
//! pipeline.
//!
//! Given a body `K` of area π with deficit `ε`, the pipeline flows `K` by the
//! affine normal flow for time `δ = ε^{2/5}`, picks the snapshot `t*` where
//! the entropy-weighted quantity is smallest, rescales it to area π, fits
//! inner and outer ellipses, and maps everything by an area-preserving `T`
//! that turns the outer ellipse into a disk. The claim checked is
//!
//! ```text
//! d_H(TK, ℰ) < C_p ε^{3/10}.
//! ```

use std::f64::consts::PI;

use crate::body::ConvexBody;
use crate::ellipse::{
    john_ellipse_with, lowner_ellipse_with, normalizing_transform, Ellipse, SolverOptions,
};
use crate::error::{Error, Result};
use crate::flow::{evolve_to, FlowConfig, FlowState};
use crate::functionals::{
    entropy_power_form, iso_ratio, omega_p, ratio_from_parts, sigma_window, SigmaWindow,
    AREA_NORMALIZATION_TOL, QUADRATURE_TOL,
};
use crate::linear::LinearMap2;

pub const BETA: f64 = 4.0 / 3.0;
/// `β/(2+β)`
pub const DELTA_EXPONENT: f64 = 2.0 / 5.0;
/// `3β/(4(2+β))`
pub const HD_EXPONENT: f64 = 3.0 / 10.0;

/// Support bounds guaranteed after John positioning at area π.
pub const JOHN_C1: f64 = std::f64::consts::FRAC_1_SQRT_2;
pub const JOHN_C2: f64 = std::f64::consts::SQRT_2;

/// Deficits at or below this are treated as the equality case.
pub const TRIVIAL_EPSILON: f64 = 1e-14;
/// Negative deficits beyond this signal a quadrature inconsistency.
pub const DEGENERATE_TOL: f64 = 1e-8;
/// Support slack used for the inclusion checks.
pub const SANDWICH_TOL: f64 = 1e-9;

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidP(p));
    }
    Ok(())
}

fn check_sandwich_constants(c1: f64, c2: f64) -> Result<()> {
    if !(c1 > 0.0 && c2 >= c1) || !c2.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "support bounds need 0 < c1 <= c2, got c1 = {c1}, c2 = {c2}"
        )));
    }
    Ok(())
}

pub fn d_p(p: f64) -> f64 {
    if p <= 2.0 {
        2.0 * (4.0 * p * p + 3.0 * p + 2.0) / (p * (p - 1.0))
    } else {
        6.0 * (p + 2.0) / ((p - 1.0) * (p - 1.0))
    }
}

/// `2√2 π / √d_p`
pub fn d_prime_p(p: f64) -> f64 {
    2.0 * std::f64::consts::SQRT_2 * PI / d_p(p).sqrt()
}

/// `(4/3)^{3/4} · 2c₂/c₁²`, the inflation coefficient of the outer disk.
pub fn andrews_coefficient(c1: f64, c2: f64) -> f64 {
    (4.0f64 / 3.0).powf(0.75) * 2.0 * c2 / (c1 * c1)
}

/// Time for `B_{c₁}` to shrink to `B_{c₁/2}` under the flow.
pub fn eta(c1: f64) -> f64 {
    0.75 * c1.powf(4.0 / 3.0) * (1.0 - 0.5f64.powf(4.0 / 3.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Admissibility {
    pub eps_max: f64,
    pub terms: [f64; 3],
    /// 1-based index of the smallest term.
    pub binding: usize,
}

/// Upper limit on the deficit under which the stability estimate applies.
pub fn epsilon_admissibility(p: f64, c1: f64, c2: f64) -> Result<Admissibility> {
    check_p(p)?;
    check_sandwich_constants(c1, c2)?;
    let terms = [
        0.25f64.powf((1.0 + BETA) / BETA),
        (1.0 / d_prime_p(p)).powf(2.0 + BETA),
        (0.75 * c1.powf(4.0 / 3.0) * (1.0 - 0.5f64.powf(4.0 / 3.0))).powf((2.0 + BETA) / BETA),
    ];
    let mut binding = 0;
    for i in 1..3 {
        if terms[i] < terms[binding] {
            binding = i;
        }
    }
    Ok(Admissibility {
        eps_max: terms[binding],
        terms,
        binding: binding + 1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityConstants {
    pub p: f64,
    pub beta: f64,
    pub c1: f64,
    pub c2: f64,
    pub d_p: f64,
    pub d_prime_p: f64,
    pub c_p: f64,
    pub eps_max: f64,
    pub admissibility: Admissibility,
    pub delta_exponent: f64,
    pub hd_exponent: f64,
}

pub fn constants(p: f64, c1: f64, c2: f64) -> Result<StabilityConstants> {
    let admissibility = epsilon_admissibility(p, c1, c2)?;
    let dp = d_prime_p(p);
    let c_p = 3.0 * (1.0 + andrews_coefficient(c1, c2) + 3.0 * (p + 2.0) / (2.0 * (p - 1.0)) * dp);
    Ok(StabilityConstants {
        p,
        beta: BETA,
        c1,
        c2,
        d_p: d_p(p),
        d_prime_p: dp,
        c_p,
        eps_max: admissibility.eps_max,
        admissibility,
        delta_exponent: DELTA_EXPONENT,
        hd_exponent: HD_EXPONENT,
    })
}

impl StabilityConstants {
    pub fn bound(&self, epsilon: f64) -> f64 {
        self.c_p * epsilon.max(TRIVIAL_EPSILON).powf(HD_EXPONENT)
    }
}

/// Maps an area-π body to John position: its John ellipse becomes a disk.
pub fn john_position(body: &ConvexBody) -> Result<(ConvexBody, LinearMap2)> {
    john_position_with(body, &SolverOptions::default())
}

pub fn john_position_with(
    body: &ConvexBody,
    opts: &SolverOptions,
) -> Result<(ConvexBody, LinearMap2)> {
    if (body.area() - PI).abs() > AREA_NORMALIZATION_TOL {
        return Err(Error::NotNormalized { area: body.area() });
    }
    let (john, _) = john_ellipse_with(body, opts)?;
    let map = normalizing_transform(&john);
    let positioned = body.apply_linear(&map)?.with_area(PI)?;
    Ok((positioned, map))
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub c1: f64,
    pub c2: f64,
    /// Flow settings; the snapshot count is the `t*` sampling resolution.
    pub flow: FlowConfig,
    pub solver: SolverOptions,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            c1: JOHN_C1,
            c2: JOHN_C2,
            flow: FlowConfig::default(),
            solver: SolverOptions::default(),
        }
    }
}

/// Ellipse fitted to `λK_{t*}` together with the area it was required to
/// respect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FittedEllipse {
    pub ellipse: Ellipse,
    pub area: f64,
    pub target_area: f64,
}

#[derive(Debug, Clone)]
pub struct StabilityReport {
    /// Exponent requested by the caller.
    pub p: f64,
    /// Exponent the pipeline actually ran with (2 for a reduced p = 1).
    pub pipeline_p: f64,
    pub reduced_from_p1: bool,
    pub constants: StabilityConstants,
    pub epsilon: f64,
    pub in_theorem_range: bool,
    pub trivial: bool,
    pub delta: f64,
    pub delta_clamped: bool,
    pub t_star: f64,
    /// Snapshots available for locating `t*`.
    pub t_star_samples: usize,
    pub lambda: f64,
    pub sigma_window_at_tstar: SigmaWindow,
    pub ellipse_in: FittedEllipse,
    pub ellipse_out: FittedEllipse,
    pub area_relations_ok: bool,
    /// `max_t Ω₁(K_t) Ω_p(K_t)` along the flow.
    pub omega_product_max: f64,
    pub john_map: LinearMap2,
    pub transform: LinearMap2,
    /// `ℰ` and `𝒟` in the frame of `TK`.
    pub inner: Ellipse,
    pub outer_disk: Ellipse,
    pub sandwich_factor: f64,
    pub sandwich_ok: bool,
    pub d_h_pipeline: f64,
    pub d_h_john: f64,
    pub d_h_measured: f64,
    pub bound_value: f64,
    pub pass: bool,
}

/// Runs the stability pipeline on `body` at exponent `p > 1`.
pub fn verify(body: &ConvexBody, p: f64, config: &VerifyConfig) -> Result<StabilityReport> {
    check_p(p)?;
    pipeline(body, p, None, config)
}

/// The `p = 1` case: the deficit is taken at `p = 1` and the pipeline is run
/// at `p = 2`, which is valid because the ratio is nondecreasing in `p`.
pub fn reduce_p1(body: &ConvexBody, config: &VerifyConfig) -> Result<StabilityReport> {
    let normalized = body.with_area(PI)?;
    let r1 = iso_ratio(&normalized, 1.0)?;
    let r2 = iso_ratio(&normalized, 2.0)?;
    if r2.ratio < r1.ratio - QUADRATURE_TOL * PI * PI {
        return Err(Error::MonotonicityViolated {
            ratio_p1: r1.ratio,
            ratio_p2: r2.ratio,
        });
    }
    let mut report = pipeline(&normalized, 2.0, Some(r1.deficit), config)?;
    report.p = 1.0;
    report.reduced_from_p1 = true;
    Ok(report)
}

fn pipeline(
    body: &ConvexBody,
    p: f64,
    epsilon: Option<f64>,
    config: &VerifyConfig,
) -> Result<StabilityReport> {
    let consts = constants(p, config.c1, config.c2)?;
    let normalized = body.with_area(PI)?;
    let (k, john_map) = john_position_with(&normalized, &config.solver)?;

    let epsilon = match epsilon {
        Some(e) => e,
        None => iso_ratio(&k, p)?.deficit,
    };
    if epsilon < -DEGENERATE_TOL {
        return Err(Error::DegenerateDeficit(epsilon));
    }
    let in_theorem_range = epsilon < consts.eps_max;
    let bound_value = consts.bound(epsilon);

    if epsilon <= TRIVIAL_EPSILON {
        let (john, _) = john_ellipse_with(&k, &config.solver)?;
        let (lowner, _) = lowner_ellipse_with(&k, &config.solver)?;
        let d = john.hausdorff_to(&k);
        let fitted = |e: Ellipse| FittedEllipse {
            ellipse: e,
            area: e.area(),
            target_area: PI,
        };
        return Ok(StabilityReport {
            p,
            pipeline_p: p,
            reduced_from_p1: false,
            constants: consts,
            epsilon,
            in_theorem_range,
            trivial: true,
            delta: 0.0,
            delta_clamped: false,
            t_star: 0.0,
            t_star_samples: 1,
            lambda: 1.0,
            sigma_window_at_tstar: sigma_window(&k)?,
            ellipse_in: fitted(john),
            ellipse_out: fitted(lowner),
            area_relations_ok: true,
            omega_product_max: omega_p(&k, 1.0)? * omega_p(&k, p)?,
            john_map,
            transform: john_map,
            inner: john,
            outer_disk: lowner,
            sandwich_factor: 1.0,
            sandwich_ok: john.is_inside(&k, SANDWICH_TOL) && lowner.encloses(&k, SANDWICH_TOL),
            d_h_pipeline: d,
            d_h_john: d,
            d_h_measured: d,
            bound_value,
            pass: d < bound_value,
        });
    }

    let delta_raw = epsilon.powf(DELTA_EXPONENT);
    let delta_cap = 0.25f64
        .min(0.75 * config.c1.powf(4.0 / 3.0))
        .min(eta(config.c1));
    let delta_clamped = delta_raw > delta_cap;
    let delta = delta_raw.min(delta_cap);

    let flow_cfg = FlowConfig {
        p_list: vec![p],
        ..config.flow.clone()
    };
    let trace = evolve_to(&FlowState::new(k.clone()), delta, &flow_cfg)?;

    let mut best = (0, f64::INFINITY);
    let mut omega_product_max = 0.0f64;
    for (i, (snap, diag)) in trace.snapshots.iter().zip(&trace.diagnostics).enumerate() {
        let om = diag.omega_p[0];
        omega_product_max = omega_product_max.max(diag.omega1 * om);
        let q = ratio_from_parts(om, diag.area, p) / om * entropy_power_form(&snap.body, p)?;
        if q < best.1 {
            best = (i, q);
        }
    }
    let star = &trace.snapshots[best.0];
    let lambda = (PI / star.body.area()).sqrt();
    let rescaled = star.body.scaled(lambda)?;
    let window = sigma_window(&rescaled)?;

    let (e_in, _) = john_ellipse_with(&rescaled, &config.solver)?;
    let (e_out, _) = lowner_ellipse_with(&rescaled, &config.solver)?;
    let x = consts.d_prime_p * (epsilon / delta).sqrt();
    let expo = 3.0 * (p + 2.0) / (2.0 * (p - 1.0));
    let target_out = if x < 1.0 {
        PI * (1.0 - x).powf(-expo)
    } else {
        f64::INFINITY
    };
    let target_in = PI * (1.0 + x).powf(-expo);
    let area_relations_ok = e_out.area() <= target_out * (1.0 + QUADRATURE_TOL)
        && e_in.area() >= target_in * (1.0 - QUADRATURE_TOL);

    let to_disk = normalizing_transform(&e_out);
    let transform = to_disk.compose(&john_map);
    let tk = k.apply_linear(&to_disk)?;
    let inner = e_in.scaled(1.0 / lambda).transformed(&to_disk);
    let outer_disk = e_out.scaled(1.0 / lambda).transformed(&to_disk);
    let sandwich_factor =
        1.0 + andrews_coefficient(config.c1, config.c2) * epsilon.powf(HD_EXPONENT);
    let sandwich_ok = inner.is_inside(&tk, SANDWICH_TOL)
        && outer_disk
            .scaled(sandwich_factor)
            .encloses(&tk, SANDWICH_TOL);

    let d_h_pipeline = inner.hausdorff_to(&tk);
    let (john_tk, _) = john_ellipse_with(&tk, &config.solver)?;
    let d_h_john = john_tk.hausdorff_to(&tk);
    let d_h_measured = d_h_pipeline.min(d_h_john);

    Ok(StabilityReport {
        p,
        pipeline_p: p,
        reduced_from_p1: false,
        constants: consts,
        epsilon,
        in_theorem_range,
        trivial: false,
        delta,
        delta_clamped,
        t_star: star.time,
        t_star_samples: trace.snapshots.len(),
        lambda,
        sigma_window_at_tstar: window,
        ellipse_in: FittedEllipse {
            ellipse: e_in,
            area: e_in.area(),
            target_area: target_in,
        },
        ellipse_out: FittedEllipse {
            ellipse: e_out,
            area: e_out.area(),
            target_area: target_out,
        },
        area_relations_ok,
        omega_product_max,
        john_map,
        transform,
        inner,
        outer_disk,
        sandwich_factor,
        sandwich_ok,
        d_h_pipeline,
        d_h_john,
        d_h_measured,
        bound_value,
        pass: d_h_measured < bound_value,
    })
}
