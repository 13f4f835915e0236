//! Comma-separated tables and key=value reports.

use std::fmt::Write as _;

use affine_lab_core::flow::FlowTrace;
use affine_lab_core::stability::StabilityReport;

pub fn trace_header(p_list: &[f64]) -> String {
    let mut h = String::from("t,A,Omega1");
    for p in p_list {
        let _ = write!(h, ",Omega_{p}");
    }
    h.push_str(",sigma_min,sigma_max,min_r");
    h
}

/// One row per snapshot. `sigma_*` is the affine support of the snapshot
/// itself (not rescaled to area π).
pub fn trace_csv(trace: &FlowTrace) -> String {
    let mut out = trace_header(&trace.p_list);
    out.push('\n');
    for d in &trace.diagnostics {
        let _ = write!(out, "{:.15e},{:.15e},{:.15e}", d.time, d.area, d.omega1);
        for w in &d.omega_p {
            let _ = write!(out, ",{w:.15e}");
        }
        let _ = writeln!(
            out,
            ",{:.15e},{:.15e},{:.15e}",
            d.sigma_min, d.sigma_max, d.min_r
        );
    }
    out
}

/// Containment table: time, min and max of `s_outer − s_inner`.
pub fn containment_csv(gaps: &[(f64, f64, f64)]) -> String {
    let mut out = String::from("t,min_gap,max_gap\n");
    for (t, lo, hi) in gaps {
        let _ = writeln!(out, "{t:.15e},{lo:.15e},{hi:.15e}");
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalsRow {
    pub body: String,
    pub family: String,
    pub parameters: String,
    pub area: f64,
    /// `(p, Ω_p, ratio, deficit)`
    pub per_p: Vec<(f64, f64, f64, f64)>,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

pub fn functionals_csv(p_list: &[f64], rows: &[FunctionalsRow]) -> String {
    let mut out = String::from("body,family,parameters,A");
    for p in p_list {
        let _ = write!(out, ",Omega_{p},ratio_{p},deficit_{p}");
    }
    out.push_str(",sigma_min,sigma_max\n");
    for r in rows {
        let _ = write!(
            out,
            "{},{},{},{:.15e}",
            r.body, r.family, r.parameters, r.area
        );
        for (_, w, ratio, eps) in &r.per_p {
            let _ = write!(out, ",{w:.15e},{ratio:.15e},{eps:.15e}");
        }
        let _ = writeln!(out, ",{:.15e},{:.15e}", r.sigma_min, r.sigma_max);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub family: String,
    pub parameters: String,
    pub p: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub t_star: f64,
    pub lambda: f64,
    pub d_h: f64,
    pub bound: f64,
    pub pass: bool,
    pub in_theorem_range: bool,
    pub runtime_ms: u128,
}

pub const SWEEP_HEADER: &str =
    "family,parameters,p,epsilon,delta,t_star,lambda,d_h,bound,pass,in_theorem_range,runtime_ms";

impl SweepRow {
    pub fn from_report(
        family: &str,
        parameters: &str,
        rep: &StabilityReport,
        runtime_ms: u128,
    ) -> Self {
        Self {
            family: family.to_string(),
            parameters: parameters.to_string(),
            p: rep.p,
            epsilon: rep.epsilon,
            delta: rep.delta,
            t_star: rep.t_star,
            lambda: rep.lambda,
            d_h: rep.d_h_measured,
            bound: rep.bound_value,
            pass: rep.pass,
            in_theorem_range: rep.in_theorem_range,
            runtime_ms,
        }
    }

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{},{},{}",
            self.family,
            self.parameters,
            self.p,
            self.epsilon,
            self.delta,
            self.t_star,
            self.lambda,
            self.d_h,
            self.bound,
            self.pass,
            self.in_theorem_range,
            self.runtime_ms
        )
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv());
        out.push('\n');
    }
    out
}

fn map_entries(m: &affine_lab_core::LinearMap2) -> String {
    let e = m.entries();
    format!(
        "[[{:.15e}, {:.15e}], [{:.15e}, {:.15e}]]",
        e[0][0], e[0][1], e[1][0], e[1][1]
    )
}

pub fn report_text(body: &str, rep: &StabilityReport) -> String {
    let c = &rep.constants;
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k}={v}");
    };
    kv("body", body.to_string());
    kv("p", rep.p.to_string());
    kv("pipeline_p", rep.pipeline_p.to_string());
    if rep.reduced_from_p1 {
        kv("note_p1", "reduced to p = 2 with C_1 = C_2".into());
    }
    kv("epsilon", format!("{:.15e}", rep.epsilon));
    kv("eps_max", format!("{:.15e}", c.eps_max));
    kv("eps_max_binding_term", c.admissibility.binding.to_string());
    kv("in_theorem_range", rep.in_theorem_range.to_string());
    kv("trivial", rep.trivial.to_string());
    kv("d_p", format!("{:.15e}", c.d_p));
    kv("d_prime_p", format!("{:.15e}", c.d_prime_p));
    kv("c_p", format!("{:.15e}", c.c_p));
    kv("delta", format!("{:.15e}", rep.delta));
    kv("delta_clamped", rep.delta_clamped.to_string());
    kv("t_star", format!("{:.15e}", rep.t_star));
    kv("t_star_samples", rep.t_star_samples.to_string());
    kv(
        "t_star_note",
        "earliest minimizer over snapshot times; continuous minimization not attempted".into(),
    );
    kv("lambda", format!("{:.15e}", rep.lambda));
    kv(
        "sigma_min_at_tstar",
        format!("{:.15e}", rep.sigma_window_at_tstar.min),
    );
    kv(
        "sigma_max_at_tstar",
        format!("{:.15e}", rep.sigma_window_at_tstar.max),
    );
    kv("ellipse_in_area", format!("{:.15e}", rep.ellipse_in.area));
    kv(
        "ellipse_in_target",
        format!("{:.15e}", rep.ellipse_in.target_area),
    );
    kv("ellipse_out_area", format!("{:.15e}", rep.ellipse_out.area));
    kv(
        "ellipse_out_target",
        format!("{:.15e}", rep.ellipse_out.target_area),
    );
    kv("area_relations_ok", rep.area_relations_ok.to_string());
    kv(
        "omega_product_max",
        format!("{:.15e}", rep.omega_product_max),
    );
    kv("john_map", map_entries(&rep.john_map));
    kv("transform", map_entries(&rep.transform));
    kv("sandwich_factor", format!("{:.15e}", rep.sandwich_factor));
    kv("sandwich_ok", rep.sandwich_ok.to_string());
    kv("d_h_pipeline", format!("{:.15e}", rep.d_h_pipeline));
    kv("d_h_john", format!("{:.15e}", rep.d_h_john));
    kv("d_h_measured", format!("{:.15e}", rep.d_h_measured));
    kv("bound", format!("{:.15e}", rep.bound_value));
    kv("pass", rep.pass.to_string());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_row_matches_header() {
        let row = SweepRow {
            family: "disk".into(),
            parameters: "radius=1".into(),
            p: 2.0,
            epsilon: 0.0,
            delta: 0.0,
            t_star: 0.0,
            lambda: 1.0,
            d_h: 0.0,
            bound: 1.0,
            pass: true,
            in_theorem_range: true,
            runtime_ms: 0,
        };
        let fields = row.csv().split(',').count();
        assert_eq!(fields, SWEEP_HEADER.split(',').count());
        assert!(sweep_csv(&[row]).starts_with("family,parameters,p,"));
    }
}
