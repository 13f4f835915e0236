//! Built-in invariant suite. Output has no timings, so repeated runs match.

use std::f64::consts::PI;

use affine_lab_core::ellipse::{
    disk_distance_bound, john_ellipse, lowner_ellipse, normalizing_transform,
};
use affine_lab_core::flow::{
    check_area_ode, check_containment, check_lower_bound, check_omega_p_inequality,
    entropy_coefficient_branches, evolve_to, FlowConfig, FlowState,
};
use affine_lab_core::functionals::{affine_length, iso_ratio, omega_p, sigma_window};
use affine_lab_core::generators::{cosine_perturbed, disk, ellipse_body, superellipse};
use affine_lab_core::stability::{constants, eta, john_position, JOHN_C1, JOHN_C2};
use affine_lab_core::{AngularGrid, ConvexBody, Ellipse, LinearMap2, Result};

use crate::commands::run_verify;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SelftestOptions {
    /// Corrupt `Ω₁` in the area-ODE check by 1%.
    pub inject_fault: bool,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match f() {
        Ok((pass, detail)) => Check { name, pass, detail },
        Err(e) => Check {
            name,
            pass: false,
            detail: format!("error: {e}"),
        },
    }
}

fn samples(g: &AngularGrid) -> Result<Vec<ConvexBody>> {
    Ok(vec![
        cosine_perturbed(g, 0.03, 2)?,
        cosine_perturbed(g, -0.02, 3)?,
        cosine_perturbed(g, 0.1, 1)?,
        superellipse(g, 3.0)?,
        ellipse_body(g, 1.7, 0.6, 0.4)?,
    ])
}

fn shear() -> Result<LinearMap2> {
    let d = LinearMap2::diagonal(1.6, 1.0 / 1.6)?;
    Ok(LinearMap2::rotation(0.7)
        .compose(&d)
        .compose(&LinearMap2::new([[1.0, 0.3], [0.0, 1.0]])?))
}

pub fn run(n: usize, opts: SelftestOptions) -> Vec<Check> {
    let g = match AngularGrid::new(n) {
        Ok(g) => g,
        Err(e) => {
            return vec![Check {
                name: "grid",
                pass: false,
                detail: e.to_string(),
            }]
        }
    };
    let pi2 = PI * PI;
    let flow_cfg = FlowConfig::default();
    let mut out = Vec::new();

    out.push(check("symmetrization is exact", || {
        let values: Vec<f64> = g
            .angles()
            .map(|t| 1.0 + 0.01 * t.cos() + 0.02 * (2.0 * t).cos())
            .collect();
        let body = ConvexBody::from_samples(&g, &values)?;
        Ok((
            body.support_function().is_symmetric(),
            "antipodal samples equal".into(),
        ))
    }));

    out.push(check("area is 2-homogeneous", || {
        let body = cosine_perturbed(&g, 0.03, 2)?;
        let err = (body.scaled(2.5)?.area() - 6.25 * body.area()).abs() / body.area();
        Ok((err <= 1e-12, format!("relative error {err:.2e}")))
    }));

    out.push(check("hausdorff triangle inequality", || {
        let b = samples(&g)?;
        let ok = (0..b.len()).all(|i| {
            (0..b.len()).all(|j| {
                (0..b.len())
                    .all(|k| b[i].hausdorff(&b[k]) <= b[i].hausdorff(&b[j]) + b[j].hausdorff(&b[k]))
            })
        });
        Ok((ok, format!("{} bodies", b.len())))
    }));

    out.push(check("equality for disks and ellipses", || {
        let bodies = [
            disk(&g, 0.8)?,
            ellipse_body(&g, 2.0, 0.5, 0.3)?,
            ellipse_body(&g, 4.0, 1.0, 1.0)?,
        ];
        let mut worst = 0.0f64;
        for b in &bodies {
            for p in [1.0, 2.0, 3.0] {
                worst = worst.max((iso_ratio(b, p)?.ratio - pi2).abs() / pi2);
            }
        }
        Ok((worst <= 1e-8, format!("max relative gap {worst:.2e}")))
    }));

    out.push(check("ratio bounded and nondecreasing in p", || {
        let mut ok = true;
        for b in samples(&g)? {
            let r: Vec<f64> = [1.0, 1.5, 2.0, 3.0, 5.0]
                .iter()
                .map(|&p| iso_ratio(&b, p).map(|s| s.ratio))
                .collect::<Result<_>>()?;
            ok &= r.iter().all(|v| *v <= pi2 * (1.0 + 1e-8));
            ok &= r.windows(2).all(|w| w[0] <= w[1] + 1e-9);
        }
        Ok((ok, "p in {1, 1.5, 2, 3, 5}".into()))
    }));

    out.push(check("omega_p is SL(2) invariant", || {
        let body = cosine_perturbed(&g, 0.02, 2)?;
        let image = body.apply_linear(&shear()?)?;
        let mut worst = 0.0f64;
        for p in [1.0, 2.0, 4.0] {
            let (a, b) = (omega_p(&body, p)?, omega_p(&image, p)?);
            worst = worst.max((a - b).abs() / a);
        }
        Ok((worst <= 1e-7, format!("max relative change {worst:.2e}")))
    }));

    out.push(check("affine length equals omega_1", || {
        let body = cosine_perturbed(&g, 0.02, 3)?;
        let err = (affine_length(&body) - omega_p(&body, 1.0)?).abs();
        Ok((
            err <= 1e-12 * affine_length(&body),
            format!("difference {err:.2e}"),
        ))
    }));

    out.push(check("sigma straddles one at area pi", || {
        let mut ok = true;
        for b in samples(&g)? {
            ok &= sigma_window(&b.with_area(PI)?)?.straddles_one(1e-8);
        }
        Ok((ok, "min sigma <= 1 <= max sigma".into()))
    }));

    out.push(check("john and lowner ellipses sandwich the body", || {
        let mut ok = true;
        for b in samples(&g)? {
            let (inner, outer) = (john_ellipse(&b)?, lowner_ellipse(&b)?);
            ok &= inner.is_inside(&b, 1e-8) && outer.encloses(&b, 1e-8);
            let window = sigma_window(&b.with_area(PI)?)?;
            let k = (PI / b.area()).sqrt();
            let (ai, ao) = (inner.scaled(k).area(), outer.scaled(k).area());
            ok &= ai >= PI * window.min.powf(1.5) - 1e-6 && ao <= PI * window.max.powf(1.5) + 1e-6;
        }
        Ok((ok, "inclusions and area relations".into()))
    }));

    out.push(check(
        "normalizing transform maps an ellipse to a disk",
        || {
            let e = Ellipse::from_axes(2.0, 0.5, 0.7)?;
            let t = normalizing_transform(&e);
            let (a, b) = e.transformed(&t).semi_axes();
            Ok((
                (a - 1.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12 && t.is_special(),
                format!("axes ({a:.12}, {b:.12})"),
            ))
        },
    ));

    out.push(check("disk distance bound", || {
        let mut ok = true;
        for a in [0.1, 0.25, 0.5, 0.75, 1.0] {
            let d = disk_distance_bound(&Ellipse::from_axes(1.0, a, 0.0)?, 1.0)?;
            ok &= d.distance <= d.bound + 1e-12;
        }
        let half = disk_distance_bound(&Ellipse::from_axes(1.0, 0.5, 0.0)?, 1.0)?;
        ok &= (half.bound - half.distance).abs() <= 1e-10;
        Ok((ok, "ellipse(a, 1) inside the unit disk".into()))
    }));

    out.push(check("circle power law", || {
        let trace = evolve_to(&FlowState::new(disk(&g, 1.0)?), 0.5, &flow_cfg)?;
        let worst = trace
            .snapshots
            .iter()
            .flat_map(|s| {
                let r = (1.0 - 4.0 / 3.0 * s.time).powf(0.75);
                s.body.support().iter().map(move |v| (v - r).abs())
            })
            .fold(0.0, f64::max);
        Ok((worst <= 1e-8, format!("max error {worst:.2e}")))
    }));

    out.push(check("disk of radius c1 halves at eta", || {
        let trace = evolve_to(&FlowState::new(disk(&g, JOHN_C1)?), eta(JOHN_C1), &flow_cfg)?;
        let err = (trace.last().body.support()[0] - JOHN_C1 / 2.0).abs();
        Ok((err <= 1e-6, format!("error {err:.2e}")))
    }));

    out.push(check("area ODE", || {
        let mut worst = 0.0f64;
        for body in [
            cosine_perturbed(&g, 0.03, 2)?,
            ellipse_body(&g, 1.5, 0.8, 0.3)?,
            cosine_perturbed(&g, 0.01, 3)?,
        ] {
            let mut trace = evolve_to(&FlowState::new(body), 0.2, &flow_cfg)?;
            if opts.inject_fault {
                for d in &mut trace.diagnostics {
                    d.omega1 *= 1.01;
                }
            }
            worst = worst.max(check_area_ode(&trace)?);
        }
        Ok((worst <= 1e-4, format!("max relative residual {worst:.2e}")))
    }));

    out.push(check("containment principle", || {
        let inner = evolve_to(&FlowState::new(disk(&g, 0.95)?), 0.3, &flow_cfg)?;
        let outer = evolve_to(
            &FlowState::new(cosine_perturbed(&g, 0.04, 2)?),
            0.3,
            &flow_cfg,
        )?;
        Ok((
            check_containment(&inner, &outer)?,
            "disk(0.95) inside cos(0.04, 2)".into(),
        ))
    }));

    out.push(check("support lower bound in john position", || {
        let (k, _) = john_position(&cosine_perturbed(&g, 0.05, 2)?.with_area(PI)?)?;
        let trace = evolve_to(&FlowState::new(k), 0.2, &flow_cfg)?;
        let worst = check_lower_bound(&trace, JOHN_C1, JOHN_C2)?;
        Ok((worst <= 1e-8, format!("max violation {worst:.2e}")))
    }));

    out.push(check("omega_p differential inequality", || {
        let trace = evolve_to(
            &FlowState::new(cosine_perturbed(&g, 0.03, 2)?),
            0.1,
            &flow_cfg,
        )?;
        let mut worst = f64::INFINITY;
        for p in [1.5, 2.0, 3.0] {
            worst = worst.min(check_omega_p_inequality(&trace, p)?.min_relative_slack);
        }
        let (low, high) = entropy_coefficient_branches(2.0);
        let branches = low == high;
        Ok((
            worst >= -1e-4 && branches,
            format!("min relative slack {worst:.2e}"),
        ))
    }));

    out.push(check("constants at p = 2", || {
        let c = constants(2.0, JOHN_C1, JOHN_C2)?;
        let ok = c.d_p == 24.0
            && (c.d_prime_p - PI / 3f64.sqrt()).abs() <= 1e-14
            && c.admissibility.binding == 3;
        Ok((ok, format!("C_2 = {:.12}", c.c_p)))
    }));

    out.push(check("stability bound on a perturbed disk", || {
        let body = cosine_perturbed(&g, 0.01, 2)?;
        let vc = Default::default();
        let rep = run_verify(&body, 2.0, &vc)?;
        let reduced = run_verify(&body, 1.0, &vc)?;
        Ok((
            rep.in_theorem_range && rep.pass && reduced.pass && reduced.reduced_from_p1,
            format!("d_H = {:.3e} < {:.3e}", rep.d_h_measured, rep.bound_value),
        ))
    }));

    out
}

pub fn render(checks: &[Check]) -> String {
    let mut out = String::new();
    for c in checks {
        out.push_str(&format!(
            "{} {}: {}\n",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        ));
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    out.push_str(&format!("{} checks, {} failed\n", checks.len(), failed));
    out
}
