//! Affine normal flow in support-function form,
//!
//! ```text
//! ∂ₜ s(θ, t) = −(s_θθ + s)^{−1/3},
//! ```
//!
//! integrated by the method of lines: spectral derivatives in θ and a
//! classical fourth-order Runge–Kutta step in time. The step size is the
//! smaller of an accuracy limit (relative support change per step) and the
//! explicit stability limit of the linearized operator
//! `δs ↦ ⅓ r^{−4/3} (δs'' + δs)`, whose stiffest mode is the Nyquist one.

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::functionals::{
    affine_length, affine_support, entropy_integral, omega_p, ratio_from_parts,
};
use crate::spectral::AngularGrid;

/// Extent of the RK4 stability region along the negative real axis.
const RK4_REAL_STABILITY: f64 = 2.785;

/// Support slack allowed by the containment check.
pub const CONTAINMENT_TOL: f64 = 1e-8;

/// Slack on the initial support bounds `c₁ ≤ s ≤ c₂`.
pub const SANDWICH_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct FlowState {
    pub body: ConvexBody,
    pub time: f64,
}

impl FlowState {
    pub fn new(body: ConvexBody) -> Self {
        Self { body, time: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepController {
    /// Fraction of the accuracy and stability limits actually used.
    pub safety: f64,
    /// Cap on `max_θ |Δs| / s` per step.
    pub max_rel_change: f64,
    /// Steps below this abort the run.
    pub dt_min: f64,
    /// Runs may not be asked to go past this time.
    pub t_max: f64,
    /// Halvings tried on a rejected step before giving up.
    pub max_rejections: usize,
}

impl Default for StepController {
    fn default() -> Self {
        Self {
            safety: 0.8,
            max_rel_change: 1e-3,
            dt_min: 1e-12,
            t_max: f64::INFINITY,
            max_rejections: 40,
        }
    }
}

impl StepController {
    /// Proposed step for the current body.
    pub fn propose(&self, body: &ConvexBody) -> f64 {
        let grid = body.grid();
        let k = grid.max_wavenumber() as f64;
        let max_diffusion = body
            .curvature_radius()
            .iter()
            .map(|r| r.powf(-4.0 / 3.0) / 3.0)
            .fold(0.0, f64::max);
        let stiff = max_diffusion * (k * k - 1.0).max(1.0);
        let dt_stable = RK4_REAL_STABILITY / stiff;
        // |Δs|/s ≈ dt r^{-1/3} / s = dt / σ
        let min_sigma = body
            .support()
            .iter()
            .zip(body.curvature_radius())
            .map(|(s, r)| s * r.cbrt())
            .fold(f64::INFINITY, f64::min);
        let dt_accurate = self.max_rel_change * min_sigma;
        self.safety * dt_stable.min(dt_accurate)
    }
}

#[derive(Debug, Clone)]
pub struct FlowConfig {
    pub controller: StepController,
    /// Number of snapshots, both ends included.
    pub snapshots: usize,
    /// Exponents whose `Ω_p`, ratio and entropy are recorded per snapshot.
    pub p_list: Vec<f64>,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            controller: StepController::default(),
            snapshots: 64,
            p_list: vec![2.0],
        }
    }
}

/// Per-snapshot diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub time: f64,
    pub area: f64,
    pub omega1: f64,
    /// Aligned with [`FlowTrace::p_list`].
    pub omega_p: Vec<f64>,
    pub ratio: Vec<f64>,
    pub entropy: Vec<f64>,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub min_r: f64,
}

impl Diagnostics {
    pub fn of(body: &ConvexBody, time: f64, p_list: &[f64]) -> Result<Self> {
        let profile = affine_support(body);
        let area = body.area();
        let mut omegas = Vec::with_capacity(p_list.len());
        let mut ratios = Vec::with_capacity(p_list.len());
        let mut entropies = Vec::with_capacity(p_list.len());
        for &p in p_list {
            let om = omega_p(body, p)?;
            omegas.push(om);
            ratios.push(ratio_from_parts(om, area, p));
            entropies.push(entropy_integral(body, p)?);
        }
        Ok(Self {
            time,
            area,
            omega1: affine_length(body),
            omega_p: omegas,
            ratio: ratios,
            entropy: entropies,
            sigma_min: profile.sigma_min,
            sigma_max: profile.sigma_max,
            min_r: body.min_curvature_radius(),
        })
    }
}

/// Snapshots of one run plus the accepted step sizes.
#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub p_list: Vec<f64>,
    pub snapshots: Vec<FlowState>,
    pub diagnostics: Vec<Diagnostics>,
    pub steps: Vec<f64>,
    pub rejections: usize,
}

impl FlowTrace {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time).collect()
    }

    pub fn initial(&self) -> &ConvexBody {
        &self.snapshots[0].body
    }

    pub fn last(&self) -> &FlowState {
        self.snapshots.last().expect("trace is never empty")
    }

    /// Strictly increasing times and strictly decreasing areas.
    pub fn is_monotone(&self) -> bool {
        self.diagnostics
            .windows(2)
            .all(|w| w[1].time > w[0].time && w[1].area < w[0].area)
    }
}

/// `−(s'' + s)^{−1/3}`, or `None` if the stage has lost strict convexity.
fn normal_speed(grid: &AngularGrid, s: &[f64]) -> Option<Vec<f64>> {
    let d2 = grid.second_derivative(s);
    let mut out = Vec::with_capacity(s.len());
    for (a, b) in d2.iter().zip(s) {
        let r = a + b;
        if !(r > 0.0) {
            return None;
        }
        out.push(-r.cbrt().recip());
    }
    Some(out)
}

/// One RK4 step of size `dt`.
pub fn flow_step(state: &FlowState, dt: f64) -> Result<FlowState> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "step size {dt} must be positive"
        )));
    }
    let reject = |reason: &str| Error::StepRejected {
        time: state.time,
        reason: reason.to_string(),
    };
    let grid = state.body.grid();
    let s0 = state.body.support();
    let axpy =
        |h: f64, k: &[f64]| -> Vec<f64> { s0.iter().zip(k).map(|(s, v)| s + h * v).collect() };

    let k1 = normal_speed(grid, s0).ok_or_else(|| reject("stage 1 not convex"))?;
    let k2 =
        normal_speed(grid, &axpy(0.5 * dt, &k1)).ok_or_else(|| reject("stage 2 not convex"))?;
    let k3 =
        normal_speed(grid, &axpy(0.5 * dt, &k2)).ok_or_else(|| reject("stage 3 not convex"))?;
    let k4 = normal_speed(grid, &axpy(dt, &k3)).ok_or_else(|| reject("stage 4 not convex"))?;

    let next: Vec<f64> = (0..s0.len())
        .map(|j| s0[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]))
        .collect();
    let body = ConvexBody::from_samples(grid, &next).map_err(|e| reject(&e.to_string()))?;
    Ok(FlowState {
        body,
        time: state.time + dt,
    })
}

/// Lower bound on the extinction time: the inscribed disk `B_{min s}`
/// vanishes at `¾ (min s)^{4/3}`.
pub fn safe_horizon(body: &ConvexBody) -> f64 {
    0.75 * body.min_support().powf(4.0 / 3.0)
}

/// Integrates from `state.time` to `t_end`, recording uniformly spaced
/// snapshots.
pub fn evolve_to(state: &FlowState, t_end: f64, config: &FlowConfig) -> Result<FlowTrace> {
    let ctl = &config.controller;
    if config.snapshots < 2 {
        return Err(Error::InvalidParameter(
            "need at least two snapshots".into(),
        ));
    }
    if !(t_end > state.time) {
        return Err(Error::InvalidParameter(format!(
            "end time {t_end} must exceed start time {}",
            state.time
        )));
    }
    let horizon = (state.time + safe_horizon(&state.body)).min(ctl.t_max);
    if t_end >= horizon {
        return Err(Error::HorizonExceeded { t_end, horizon });
    }

    let t0 = state.time;
    let last = config.snapshots - 1;
    let mut current = state.clone();
    let mut trace = FlowTrace {
        p_list: config.p_list.clone(),
        snapshots: vec![current.clone()],
        diagnostics: vec![Diagnostics::of(&current.body, t0, &config.p_list)?],
        steps: Vec::new(),
        rejections: 0,
    };

    for i in 1..=last {
        let target = if i == last {
            t_end
        } else {
            t0 + (t_end - t0) * i as f64 / last as f64
        };
        while current.time < target {
            let remaining = target - current.time;
            let proposal = ctl.propose(&current.body);
            if proposal < ctl.dt_min {
                return Err(Error::ExtinctionReached {
                    time: current.time,
                    dt: proposal,
                });
            }
            let clipped = proposal >= remaining;
            let mut dt = proposal.min(remaining);
            let mut tries = 0;
            let next = loop {
                match flow_step(&current, dt) {
                    Ok(next) => break next,
                    Err(Error::StepRejected { .. }) if tries < ctl.max_rejections => {
                        tries += 1;
                        trace.rejections += 1;
                        dt *= 0.5;
                        if dt < ctl.dt_min {
                            return Err(Error::ExtinctionReached {
                                time: current.time,
                                dt,
                            });
                        }
                    }
                    Err(Error::StepRejected { .. }) => {
                        return Err(Error::ExtinctionReached {
                            time: current.time,
                            dt,
                        });
                    }
                    Err(e) => return Err(e),
                }
            };
            trace.steps.push(dt);
            current = next;
            if clipped && tries == 0 {
                current.time = target;
            }
        }
        current.time = target;
        trace
            .diagnostics
            .push(Diagnostics::of(&current.body, target, &config.p_list)?);
        trace.snapshots.push(current.clone());
    }
    Ok(trace)
}

/// Second-order derivative estimates at interior samples of a possibly
/// non-uniform series.
fn central_derivative(t: &[f64], f: &[f64], i: usize) -> f64 {
    let hm = t[i] - t[i - 1];
    let hp = t[i + 1] - t[i];
    (hm * hm * f[i + 1] - hp * hp * f[i - 1] + (hp * hp - hm * hm) * f[i]) / (hm * hp * (hm + hp))
}

fn require_snapshots(trace: &FlowTrace, needed: usize) -> Result<()> {
    if trace.snapshots.len() < needed {
        return Err(Error::InsufficientData {
            needed,
            got: trace.snapshots.len(),
        });
    }
    Ok(())
}

/// Largest relative residual of `dA/dt = −Ω₁` at interior snapshots.
pub fn check_area_ode(trace: &FlowTrace) -> Result<f64> {
    require_snapshots(trace, 3)?;
    let t: Vec<f64> = trace.diagnostics.iter().map(|d| d.time).collect();
    let a: Vec<f64> = trace.diagnostics.iter().map(|d| d.area).collect();
    Ok((1..t.len() - 1)
        .map(|i| {
            let om = trace.diagnostics[i].omega1;
            (central_derivative(&t, &a, i) + om).abs() / om
        })
        .fold(0.0, f64::max))
}

/// Per-snapshot `(t, min_θ(s_B − s_A), max_θ(s_B − s_A))`.
pub fn containment_gaps(inner: &FlowTrace, outer: &FlowTrace) -> Result<Vec<(f64, f64, f64)>> {
    if inner.snapshots.len() != outer.snapshots.len() {
        return Err(Error::Unsynchronized(format!(
            "{} vs {} snapshots",
            inner.snapshots.len(),
            outer.snapshots.len()
        )));
    }
    let mut rows = Vec::with_capacity(inner.snapshots.len());
    for (a, b) in inner.snapshots.iter().zip(&outer.snapshots) {
        if (a.time - b.time).abs() > 1e-12 * a.time.abs().max(1.0) {
            return Err(Error::Unsynchronized(format!(
                "times {} and {}",
                a.time, b.time
            )));
        }
        if a.body.grid() != b.body.grid() {
            return Err(Error::GridMismatch {
                left: a.body.grid().len(),
                right: b.body.grid().len(),
            });
        }
        let (lo, hi) = a
            .body
            .support()
            .iter()
            .zip(b.body.support())
            .map(|(x, y)| y - x)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), g| {
                (lo.min(g), hi.max(g))
            });
        rows.push((a.time, lo, hi));
    }
    Ok(rows)
}

/// True iff the inner body stays support-dominated by the outer one at
/// every common snapshot.
pub fn check_containment(inner: &FlowTrace, outer: &FlowTrace) -> Result<bool> {
    let rows = containment_gaps(inner, outer)?;
    if rows[0].1 < -CONTAINMENT_TOL {
        return Err(Error::NotNested { excess: -rows[0].1 });
    }
    Ok(rows.iter().all(|&(_, lo, _)| lo >= -CONTAINMENT_TOL))
}

/// `(4/3)^{3/4} c₂ / c₁`, the coefficient of `t^{3/4}` in the lower bound.
pub fn lower_bound_coefficient(c1: f64, c2: f64) -> f64 {
    (4.0f64 / 3.0).powf(0.75) * c2 / c1
}

/// Largest value of `s(θ,0) − (4/3)^{3/4}(c₂/c₁) t^{3/4} − s(θ,t)` over the
/// trace; non-positive when the bound holds.
pub fn check_lower_bound(trace: &FlowTrace, c1: f64, c2: f64) -> Result<f64> {
    let initial = trace.initial();
    let (lo, hi) = (initial.min_support(), initial.max_support());
    if !(c1 > 0.0) || lo < c1 - SANDWICH_TOL || hi > c2 + SANDWICH_TOL {
        return Err(Error::BadSandwich {
            min_support: lo,
            max_support: hi,
            c1,
            c2,
        });
    }
    let t0 = trace.snapshots[0].time;
    let window = 0.75 * c1.powf(4.0 / 3.0);
    let last = trace.last().time - t0;
    if last >= window {
        return Err(Error::HorizonExceeded {
            t_end: last,
            horizon: window,
        });
    }
    let k = lower_bound_coefficient(c1, c2);
    let s0 = initial.support();
    let mut worst = f64::NEG_INFINITY;
    for snap in &trace.snapshots {
        let shift = k * (snap.time - t0).powf(0.75);
        for (a, b) in s0.iter().zip(snap.body.support()) {
            worst = worst.max(a - shift - b);
        }
    }
    Ok(worst)
}

/// Both branches of the entropy coefficient, `(p ≤ 2 form, p > 2 form)`.
/// They coincide at `p = 2`.
pub fn entropy_coefficient_branches(p: f64) -> (f64, f64) {
    (
        2.0 * (p - 1.0) * (4.0 * p * p + 3.0 * p + 2.0) / (p + 2.0).powi(3),
        6.0 * p / (p + 2.0).powi(2),
    )
}

/// Coefficient of the entropy term in the lower bound on `dΩ_p/dt`.
pub fn entropy_coefficient(p: f64) -> f64 {
    let (low, high) = entropy_coefficient_branches(p);
    if p <= 2.0 {
        low
    } else {
        high
    }
}

/// Minimum slack of the `Ω_p` differential inequality along a trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaSlack {
    /// `min_i (dΩ_p/dt − rhs)`.
    pub min_slack: f64,
    /// `min_i (dΩ_p/dt − rhs) / Ω_p`.
    pub min_relative_slack: f64,
}

pub fn check_omega_p_inequality(trace: &FlowTrace, p: f64) -> Result<OmegaSlack> {
    if !(p >= 1.0) {
        return Err(Error::InvalidP(p));
    }
    require_snapshots(trace, 3)?;
    let coeff = entropy_coefficient(p);
    let t: Vec<f64> = trace.diagnostics.iter().map(|d| d.time).collect();
    let omegas = trace
        .snapshots
        .iter()
        .map(|s| omega_p(&s.body, p))
        .collect::<Result<Vec<_>>>()?;
    let mut min_slack = f64::INFINITY;
    let mut min_relative_slack = f64::INFINITY;
    for i in 1..t.len() - 1 {
        let d = &trace.diagnostics[i];
        let lhs = central_derivative(&t, &omegas, i);
        let entropy = entropy_integral(&trace.snapshots[i].body, p)?;
        let rhs = (p - 2.0) / (p + 2.0) * omegas[i] * d.omega1 / d.area + coeff * entropy;
        let slack = lhs - rhs;
        min_slack = min_slack.min(slack);
        min_relative_slack = min_relative_slack.min(slack / omegas[i].abs());
    }
    Ok(OmegaSlack {
        min_slack,
        min_relative_slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cosine_perturbed, disk};

    fn circle_radius(r0: f64, t: f64) -> f64 {
        (r0.powf(4.0 / 3.0) - 4.0 / 3.0 * t).powf(0.75)
    }

    #[test]
    fn single_step_on_unit_disk() {
        let g = AngularGrid::new(64).unwrap();
        let state = FlowState::new(disk(&g, 1.0).unwrap());
        let dt = 1e-4;
        let next = flow_step(&state, dt).unwrap();
        let expected = circle_radius(1.0, dt);
        for s in next.body.support() {
            assert!((s - expected).abs() < 1e-15);
            assert!(*s < 1.0);
        }
    }

    #[test]
    fn step_decreases_support_pointwise() {
        let g = AngularGrid::new(128).unwrap();
        let state = FlowState::new(cosine_perturbed(&g, 0.03, 2).unwrap());
        let next = flow_step(&state, 1e-4).unwrap();
        assert!(next
            .body
            .support()
            .iter()
            .zip(state.body.support())
            .all(|(a, b)| a < b));
        assert!(next.body.support_function().is_symmetric());
    }

    #[test]
    fn oversized_step_is_rejected() {
        let g = AngularGrid::new(256).unwrap();
        let state = FlowState::new(cosine_perturbed(&g, 0.05, 2).unwrap());
        assert!(matches!(
            flow_step(&state, 0.5),
            Err(Error::StepRejected { .. })
        ));
        assert!(flow_step(&state, -1.0).is_err());
    }

    #[test]
    fn horizon_is_enforced() {
        let g = AngularGrid::new(32).unwrap();
        let state = FlowState::new(disk(&g, 1.0).unwrap());
        assert!(matches!(
            evolve_to(&state, 0.8, &FlowConfig::default()),
            Err(Error::HorizonExceeded { .. })
        ));
    }

    #[test]
    fn circle_follows_power_law() {
        let g = AngularGrid::new(64).unwrap();
        let state = FlowState::new(disk(&g, 1.0).unwrap());
        let trace = evolve_to(&state, 0.3, &FlowConfig::default()).unwrap();
        assert_eq!(trace.snapshots.len(), 64);
        assert_eq!(trace.last().time, 0.3);
        let err = trace
            .snapshots
            .iter()
            .map(|s| (s.body.support()[0] - circle_radius(1.0, s.time)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "err = {err}");
        assert!(trace.is_monotone());
    }

    #[test]
    fn circle_area_ode_residual() {
        let g = AngularGrid::new(64).unwrap();
        let state = FlowState::new(disk(&g, 1.0).unwrap());
        let trace = evolve_to(&state, 0.1, &FlowConfig::default()).unwrap();
        let res = check_area_ode(&trace).unwrap();
        assert!(res < 1e-6, "residual {res}");
    }

    #[test]
    fn too_few_snapshots() {
        let g = AngularGrid::new(32).unwrap();
        let state = FlowState::new(disk(&g, 1.0).unwrap());
        let cfg = FlowConfig {
            snapshots: 2,
            ..FlowConfig::default()
        };
        let trace = evolve_to(&state, 0.1, &cfg).unwrap();
        assert!(matches!(
            check_area_ode(&trace),
            Err(Error::InsufficientData { .. })
        ));
        assert!(check_omega_p_inequality(&trace, 2.0).is_err());
    }

    #[test]
    fn coefficient_branches_meet_at_two() {
        let left = 2.0 * 1.0 * (16.0 + 6.0 + 2.0) / 64.0;
        let right = 12.0 / 16.0;
        assert_eq!(left, 0.75);
        assert_eq!(right, 0.75);
        assert_eq!(entropy_coefficient(2.0), 0.75);
        assert!((entropy_coefficient(2.0 + 1e-12) - 0.75).abs() < 1e-11);
    }
}
