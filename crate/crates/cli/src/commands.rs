//! Subcommand implementations. Each returns whether every check held; hard
//! errors come back as [`CliError`].

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use affine_lab_core::flow::{
    check_area_ode, containment_gaps, evolve_to, FlowConfig, FlowState, FlowTrace, CONTAINMENT_TOL,
};
use affine_lab_core::functionals::{iso_ratio, sigma_window};
use affine_lab_core::stability::{
    constants, reduce_p1, verify, StabilityReport, VerifyConfig, TRIVIAL_EPSILON,
};
use affine_lab_core::{AngularGrid, ConvexBody};
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig};
use crate::output::{self, FunctionalsRow, SweepRow};
use crate::stats::bootstrap_slope;
use crate::svg::{Mark, Plot};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{body}: {source}")]
    Body {
        body: String,
        #[source]
        source: affine_lab_core::Error,
    },
    #[error("{0}")]
    Build(String),
    #[error("epsilon spans only a factor {span:.3} (need at least 5)")]
    InsufficientRange { span: f64 },
    #[error("config has no [sweep] section")]
    NoSweep,
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

impl CliError {
    /// 2 for config problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::NoSweep => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: PathBuf,
    pub jobs: Option<usize>,
    /// Record wall-clock runtimes and timestamps. Off keeps output byte-identical.
    pub stamp: bool,
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let io = |source, path: &Path| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(|e| io(e, dir))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| io(e, &path))?;
    Ok(path)
}

fn stamp(opts: &RunOptions) -> Option<String> {
    opts.stamp.then(|| {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        format!("unix {secs}")
    })
}

fn grid(cfg: &ExperimentConfig) -> Result<AngularGrid, CliError> {
    AngularGrid::new(cfg.grid).map_err(|e| CliError::Build(e.to_string()))
}

fn build_bodies(cfg: &ExperimentConfig) -> Result<Vec<(String, ConvexBody)>, CliError> {
    if cfg.bodies.is_empty() {
        return Err(ConfigError::Invalid("config defines no [body]".into()).into());
    }
    let g = grid(cfg)?;
    cfg.bodies
        .iter()
        .map(|b| {
            b.family
                .build(&g)
                .map(|body| (b.name.clone(), body))
                .map_err(|e| CliError::Build(format!("{}: {e}", b.name)))
        })
        .collect()
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Pool(e.to_string()))
}

fn jobs(cfg: &ExperimentConfig, opts: &RunOptions) -> Option<usize> {
    opts.jobs.or(cfg.jobs)
}

pub fn functionals(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<(String, bool), CliError> {
    let bodies = build_bodies(cfg)?;
    let mut rows = Vec::new();
    for ((name, body), spec) in bodies.iter().zip(&cfg.bodies) {
        let err = |source| CliError::Body {
            body: name.clone(),
            source,
        };
        let per_p = cfg
            .p_list
            .iter()
            .map(|&p| iso_ratio(body, p).map(|s| (p, s.omega_p, s.ratio, s.deficit)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let window = sigma_window(&body.with_area(PI).map_err(err)?).map_err(err)?;
        rows.push(FunctionalsRow {
            body: name.clone(),
            family: spec.family.name().into(),
            parameters: spec.family.parameters(),
            area: body.area(),
            per_p,
            sigma_min: window.min,
            sigma_max: window.max,
        });
    }
    let table = output::functionals_csv(&cfg.p_list, &rows);
    write_file(&opts.out, "functionals.csv", &table)?;
    let cap = PI * PI * (1.0 + cfg.tolerance.quadrature);
    let ok = rows
        .iter()
        .all(|r| r.per_p.iter().all(|&(_, _, ratio, _)| ratio <= cap));
    Ok((table, ok))
}

fn flow_config(cfg: &ExperimentConfig) -> FlowConfig {
    FlowConfig {
        controller: cfg.flow.controller,
        snapshots: cfg.flow.snapshots,
        p_list: cfg.p_list.clone(),
    }
}

fn boundary_plot(name: &str, trace: &FlowTrace, stamp: Option<String>) -> String {
    let mut plot = Plot::new(&format!("{name}: boundaries"), "x", "y");
    plot.equal_aspect = true;
    plot.stamp = stamp;
    let count = trace.snapshots.len();
    let picks = 6.min(count);
    for k in 0..picks {
        let i = if picks == 1 {
            0
        } else {
            k * (count - 1) / (picks - 1)
        };
        let s = &trace.snapshots[i];
        let pts = s.body.boundary_points();
        plot.add(&format!("t = {:.4}", s.time), Mark::Loop(pts));
    }
    plot.render()
}

fn series_plot(name: &str, trace: &FlowTrace, stamp: Option<String>) -> String {
    let mut plot = Plot::new(&format!("{name}: diagnostics"), "t", "value");
    plot.stamp = stamp;
    let d = &trace.diagnostics;
    plot.add(
        "A",
        Mark::Line(d.iter().map(|d| [d.time, d.area]).collect()),
    );
    plot.add(
        "Omega1",
        Mark::Line(d.iter().map(|d| [d.time, d.omega1]).collect()),
    );
    for (i, p) in trace.p_list.iter().enumerate() {
        plot.add(
            &format!("ratio_{p}"),
            Mark::Line(d.iter().map(|d| [d.time, d.ratio[i]]).collect()),
        );
    }
    plot.add(
        "min_r",
        Mark::Line(d.iter().map(|d| [d.time, d.min_r]).collect()),
    );
    plot.render()
}

pub fn flow(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<(String, bool), CliError> {
    let bodies = build_bodies(cfg)?;
    let fc = flow_config(cfg);
    let traces: Vec<Result<FlowTrace, CliError>> = pool(jobs(cfg, opts))?.install(|| {
        bodies
            .par_iter()
            .map(|(name, body)| {
                evolve_to(&FlowState::new(body.clone()), cfg.flow.t_end, &fc).map_err(|source| {
                    CliError::Body {
                        body: name.clone(),
                        source,
                    }
                })
            })
            .collect()
    });
    let mut summary = String::new();
    let mut ok = true;
    let mut done = Vec::new();
    for ((name, _), trace) in bodies.iter().zip(traces) {
        let trace = trace?;
        write_file(
            &opts.out,
            &format!("flow_{name}.csv"),
            &output::trace_csv(&trace),
        )?;
        write_file(
            &opts.out,
            &format!("flow_{name}_boundary.svg"),
            &boundary_plot(name, &trace, stamp(opts)),
        )?;
        write_file(
            &opts.out,
            &format!("flow_{name}_series.svg"),
            &series_plot(name, &trace, stamp(opts)),
        )?;
        let monotone = trace.is_monotone();
        let residual = check_area_ode(&trace).map_err(|source| CliError::Body {
            body: name.clone(),
            source,
        })?;
        let area_ok = residual <= cfg.tolerance.area_ode;
        ok &= monotone && area_ok;
        let _ = writeln!(
            summary,
            "{name}: t_end={:.6e} steps={} rejections={} area_decreasing={monotone} area_ode_residual={residual:.3e} area_ode_ok={area_ok}",
            trace.last().time,
            trace.steps.len(),
            trace.rejections
        );
        done.push((name.clone(), trace));
    }
    for (inner, outer) in &cfg.flow.pairs {
        let find = |n: &String| &done.iter().find(|(m, _)| m == n).expect("validated pair").1;
        let gaps = containment_gaps(find(inner), find(outer)).map_err(|source| CliError::Body {
            body: format!("{inner} in {outer}"),
            source,
        })?;
        write_file(
            &opts.out,
            &format!("containment_{inner}_{outer}.csv"),
            &output::containment_csv(&gaps),
        )?;
        let worst = gaps.iter().map(|g| g.1).fold(f64::INFINITY, f64::min);
        let nested = worst >= -CONTAINMENT_TOL;
        ok &= nested;
        let _ = writeln!(
            summary,
            "{inner} in {outer}: min_gap={worst:.3e} nested={nested}"
        );
    }
    Ok((summary, ok))
}

fn verify_config(cfg: &ExperimentConfig) -> VerifyConfig {
    VerifyConfig {
        c1: cfg.verify.c1,
        c2: cfg.verify.c2,
        flow: FlowConfig {
            controller: cfg.flow.controller,
            snapshots: cfg.verify.snapshots,
            p_list: vec![2.0],
        },
        ..VerifyConfig::default()
    }
}

/// Runs `verify`, routing `p = 1` through the reduction.
pub fn run_verify(
    body: &ConvexBody,
    p: f64,
    vc: &VerifyConfig,
) -> affine_lab_core::Result<StabilityReport> {
    if p == 1.0 {
        reduce_p1(body, vc)
    } else {
        verify(body, p, vc)
    }
}

fn timed<T>(stamp: bool, f: impl FnOnce() -> T) -> (T, u128) {
    let start = Instant::now();
    let out = f();
    (
        out,
        if stamp {
            start.elapsed().as_millis()
        } else {
            0
        },
    )
}

pub fn verify_cmd(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<(String, bool), CliError> {
    let bodies = build_bodies(cfg)?;
    let vc = verify_config(cfg);
    let jobs_list: Vec<(usize, f64)> = (0..bodies.len())
        .flat_map(|i| cfg.p_list.iter().map(move |&p| (i, p)))
        .collect();
    let results: Vec<_> = pool(jobs(cfg, opts))?.install(|| {
        jobs_list
            .par_iter()
            .map(|&(i, p)| timed(opts.stamp, || run_verify(&bodies[i].1, p, &vc)))
            .collect()
    });
    let mut rows = Vec::new();
    let mut summary = String::new();
    let mut ok = true;
    for (&(i, p), (rep, ms)) in jobs_list.iter().zip(results) {
        let name = &bodies[i].0;
        let rep = rep.map_err(|source| CliError::Body {
            body: format!("{name} (p = {p})"),
            source,
        })?;
        write_file(
            &opts.out,
            &format!("verify_{name}_p{p}.txt"),
            &output::report_text(name, &rep),
        )?;
        let family = &cfg.bodies[i].family;
        rows.push(SweepRow::from_report(
            family.name(),
            &family.parameters(),
            &rep,
            ms,
        ));
        // out-of-range rows are diagnostics, not failures
        ok &= !rep.in_theorem_range || rep.pass;
        let _ =
            writeln!(
            summary,
            "{name} p={p}: epsilon={:.6e} d_h={:.6e} bound={:.6e} in_theorem_range={} pass={}{}",
            rep.epsilon,
            rep.d_h_measured,
            rep.bound_value,
            rep.in_theorem_range,
            rep.pass,
            if rep.reduced_from_p1 { " (C_1 = C_2)" } else { "" }
        );
    }
    write_file(&opts.out, "verify.csv", &output::sweep_csv(&rows))?;
    Ok((summary, ok))
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    /// `(p, slope, lower, upper)` of `log d_H` against `log ε`.
    pub fits: Vec<(f64, f64, f64, f64)>,
}

pub fn sweep_rows(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<SweepOutcome, CliError> {
    let spec = cfg.sweep.as_ref().ok_or(CliError::NoSweep)?;
    let g = grid(cfg)?;
    let vc = verify_config(cfg);
    let mut work = Vec::new();
    for v in spec.values() {
        let family = spec.family_at(v)?;
        let body = family
            .build(&g)
            .map_err(|e| CliError::Build(format!("sweep {}={v}: {e}", spec.param)))?;
        for &p in &cfg.p_list {
            work.push((family.clone(), body.clone(), p));
        }
    }
    let results: Vec<_> = pool(jobs(cfg, opts))?.install(|| {
        work.par_iter()
            .map(|(_, body, p)| timed(opts.stamp, || run_verify(body, *p, &vc)))
            .collect()
    });
    let mut rows = Vec::with_capacity(work.len());
    for ((family, _, p), (rep, ms)) in work.iter().zip(results) {
        let rep = rep.map_err(|source| CliError::Body {
            body: format!("{} {} (p = {p})", family.name(), family.parameters()),
            source,
        })?;
        rows.push(SweepRow::from_report(
            family.name(),
            &family.parameters(),
            &rep,
            ms,
        ));
    }
    let mut fits = Vec::new();
    for &p in &cfg.p_list {
        let usable: Vec<&SweepRow> = rows
            .iter()
            .filter(|r| r.p == p && r.epsilon > TRIVIAL_EPSILON && r.d_h > 0.0)
            .collect();
        let eps = usable.iter().map(|r| r.epsilon);
        let (lo, hi) = eps.fold((f64::INFINITY, 0.0f64), |(a, b), e| (a.min(e), b.max(e)));
        let span = if usable.len() >= 2 { hi / lo } else { 1.0 };
        if !(span >= 5.0) {
            return Err(CliError::InsufficientRange { span });
        }
        let x: Vec<f64> = usable.iter().map(|r| r.epsilon.ln()).collect();
        let y: Vec<f64> = usable.iter().map(|r| r.d_h.ln()).collect();
        if let Some(fit) = bootstrap_slope(&x, &y, spec.bootstrap, cfg.seed) {
            fits.push((p, fit.slope, fit.lower, fit.upper));
        }
    }
    Ok(SweepOutcome { rows, fits })
}

pub fn sweep_plot(
    cfg: &ExperimentConfig,
    outcome: &SweepOutcome,
    stamp: Option<String>,
) -> Result<String, CliError> {
    let mut plot = Plot::new("d_H against deficit", "epsilon", "d_H");
    plot.log_x = true;
    plot.log_y = true;
    plot.stamp = stamp;
    for &p in &cfg.p_list {
        let rows: Vec<&SweepRow> = outcome
            .rows
            .iter()
            .filter(|r| r.p == p && r.epsilon > 0.0)
            .collect();
        let inside: Vec<[f64; 2]> = rows
            .iter()
            .filter(|r| r.in_theorem_range)
            .map(|r| [r.epsilon, r.d_h])
            .collect();
        let outside: Vec<[f64; 2]> = rows
            .iter()
            .filter(|r| !r.in_theorem_range)
            .map(|r| [r.epsilon, r.d_h])
            .collect();
        let c = constants(if p == 1.0 { 2.0 } else { p }, cfg.verify.c1, cfg.verify.c2)
            .map_err(|e| CliError::Build(e.to_string()))?;
        let (lo, hi) = rows.iter().fold((f64::INFINITY, 0.0f64), |(a, b), r| {
            (a.min(r.epsilon), b.max(r.epsilon))
        });
        let envelope: Vec<[f64; 2]> = (0..=40)
            .map(|i| {
                let e = lo * (hi / lo).powf(i as f64 / 40.0);
                [e, c.bound(e)]
            })
            .collect();
        plot.add(&format!("C_p eps^(3/10), p = {p}"), Mark::Line(envelope));
        plot.add(&format!("in range, p = {p}"), Mark::Points(inside));
        if !outside.is_empty() {
            plot.add(&format!("out of range, p = {p}"), Mark::Points(outside));
        }
    }
    Ok(plot.render())
}

pub fn sweep(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<(String, bool), CliError> {
    let outcome = sweep_rows(cfg, opts)?;
    write_file(&opts.out, "sweep.csv", &output::sweep_csv(&outcome.rows))?;
    write_file(
        &opts.out,
        "sweep.svg",
        &sweep_plot(cfg, &outcome, stamp(opts))?,
    )?;
    let mut summary = String::new();
    for (p, s, lo, hi) in &outcome.fits {
        let _ = writeln!(
            summary,
            "p={p}: fitted slope {s:.4} (95% bootstrap interval [{lo:.4}, {hi:.4}])"
        );
    }
    write_file(&opts.out, "sweep_slope.txt", &summary)?;
    let failures = outcome
        .rows
        .iter()
        .filter(|r| r.in_theorem_range && !r.pass)
        .count();
    let in_range = outcome.rows.iter().filter(|r| r.in_theorem_range).count();
    let _ = writeln!(
        summary,
        "rows={} in_theorem_range={in_range} below_envelope={}",
        outcome.rows.len(),
        in_range - failures
    );
    Ok((summary, failures == 0))
}
