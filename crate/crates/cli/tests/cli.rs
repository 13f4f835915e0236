use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = dir.join("exp.cfg");
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_affine-lab"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(args)
        .output()
        .unwrap()
}

fn table(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn disk_ratio_is_pi_squared_and_nondecreasing_in_p() {
    let dir = TempDir::new().unwrap();
    let cfg = "[run]\ngrid = 256\np = 1, 1.5, 2, 3, 5\n\
               [body]\nname = d\nfamily = disk\nradius = 0.7\n\
               [body]\nname = s\nfamily = superellipse\nq = 3\n";
    let out = run(dir.path(), cfg, &["functionals"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (h, rows) = table(&dir.path().join("out/functionals.csv"));
    for p in ["1", "1.5", "2", "3", "5"] {
        let r: f64 = rows[0][column(&h, &format!("ratio_{p}"))].parse().unwrap();
        assert!((r - PI * PI).abs() <= 1e-8 * PI * PI);
    }
    let ratios: Vec<f64> = ["1", "1.5", "2", "3", "5"]
        .iter()
        .map(|p| rows[1][column(&h, &format!("ratio_{p}"))].parse().unwrap())
        .collect();
    assert!(ratios.windows(2).all(|w| w[0] <= w[1] + 1e-9));
}

#[test]
fn unknown_family_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), "[body]\nfamily = trapezoid\n", &["functionals"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("trapezoid") && err.contains("line 2"), "{err}");
}

#[test]
fn circle_flow_table_follows_the_power_law() {
    let dir = TempDir::new().unwrap();
    let cfg = "[run]\ngrid = 64\n[body]\nname = c\nfamily = disk\n[flow]\nt_end = 0.5\n";
    let out = run(dir.path(), cfg, &["flow"]);
    assert!(
        out.status.success(),
        "{}{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    let (h, rows) = table(&dir.path().join("out/flow_c.csv"));
    let (t, a) = (column(&h, "t"), column(&h, "A"));
    for row in &rows {
        let time: f64 = row[t].parse().unwrap();
        let area: f64 = row[a].parse().unwrap();
        let r = (1.0 - 4.0 / 3.0 * time).powf(0.75);
        assert!((area - PI * r * r).abs() <= 1e-8);
    }
    let areas: Vec<f64> = rows.iter().map(|r| r[a].parse().unwrap()).collect();
    assert!(areas.windows(2).all(|w| w[1] < w[0]));
    let svg = std::fs::read_to_string(dir.path().join("out/flow_c_boundary.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polygon"));
}

#[test]
fn containment_pair_has_nonnegative_gaps() {
    let dir = TempDir::new().unwrap();
    let cfg = "[run]\ngrid = 128\n\
               [body]\nname = inner\nfamily = disk\nradius = 0.95\n\
               [body]\nname = outer\nfamily = cosine_perturbed\na = 0.04\nk = 2\n\
               [flow]\nt_end = 0.2\npair = inner, outer\n";
    let out = run(dir.path(), cfg, &["flow"]);
    assert!(
        out.status.success(),
        "{}{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    let (h, rows) = table(&dir.path().join("out/containment_inner_outer.csv"));
    assert_eq!(rows.len(), 64);
    let (lo, hi) = (column(&h, "min_gap"), column(&h, "max_gap"));
    for row in rows {
        assert!(row[lo].parse::<f64>().unwrap() >= -1e-8);
        assert!(row[hi].parse::<f64>().unwrap() >= 0.0);
    }
    assert!(dir.path().join("out/flow_inner.csv").exists());
    assert!(dir.path().join("out/flow_outer.csv").exists());
}

#[test]
fn verify_reports_and_routes_p_one() {
    let dir = TempDir::new().unwrap();
    let cfg = "[run]\ngrid = 256\np = 1, 2\n\
               [body]\nname = bump\nfamily = cosine_perturbed\na = 0.01\nk = 2\n\
               [body]\nname = wide\nfamily = cosine_perturbed\na = 0.05\nk = 2\n";
    let out = run(dir.path(), cfg, &["verify"]);
    // the wide body is out of range, which is not a failure
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = std::fs::read_to_string(dir.path().join("out/verify_bump_p2.txt")).unwrap();
    assert!(report.contains("pass=true") && report.contains("in_theorem_range=true"));
    let reduced = std::fs::read_to_string(dir.path().join("out/verify_bump_p1.txt")).unwrap();
    assert!(reduced.contains("C_1 = C_2") && reduced.contains("pipeline_p=2"));
    let wide = std::fs::read_to_string(dir.path().join("out/verify_wide_p2.txt")).unwrap();
    assert!(wide.contains("in_theorem_range=false"));
    let (h, rows) = table(&dir.path().join("out/verify.csv"));
    assert_eq!(h.join(","), "family,parameters,p,epsilon,delta,t_star,lambda,d_h,bound,pass,in_theorem_range,runtime_ms");
    assert_eq!(rows.len(), 4);
    for row in rows {
        let (d, b): (f64, f64) = (row[7].parse().unwrap(), row[8].parse().unwrap());
        assert_eq!(row[9] == "true", d < b);
        assert_eq!(row[11], "0");
    }
}

#[test]
fn file_bodies_load_relative_to_the_config() {
    let dir = TempDir::new().unwrap();
    let values: String = (0..64)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / 64.0;
            format!("{:.16e}\n", 1.0 + 0.02 * (4.0 * t).cos())
        })
        .collect();
    std::fs::write(dir.path().join("k.txt"), format!("n=64\n{values}")).unwrap();
    let cfg = "[run]\ngrid = 128\n[body]\nname = f\nfamily = file\npath = k.txt\n";
    let out = run(dir.path(), cfg, &["functionals"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

const SWEEP: &str = "[run]\ngrid = 128\nseed = 3\n\
                     [sweep]\nfamily = cosine_perturbed\nk = 2\nparam = a\nfrom = 0.001\nto = 0.02\ncount = 5\nbootstrap = 200\n";

#[test]
fn sweep_is_deterministic_and_below_the_envelope() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let out = run(a.path(), SWEEP, &["sweep", "--jobs", "2"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out2 = run(b.path(), SWEEP, &["sweep", "--jobs", "1"]);
    assert!(out2.status.success());
    for f in ["sweep.csv", "sweep.svg", "sweep_slope.txt"] {
        let x = std::fs::read(a.path().join("out").join(f)).unwrap();
        let y = std::fs::read(b.path().join("out").join(f)).unwrap();
        assert_eq!(x, y, "{f} differs between runs");
    }
    let (_, rows) = table(&a.path().join("out/sweep.csv"));
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r[9] == "true"));
    let slope = std::fs::read_to_string(a.path().join("out/sweep_slope.txt")).unwrap();
    assert!(slope.contains("95% bootstrap interval"));
    let svg = std::fs::read_to_string(a.path().join("out/sweep.svg")).unwrap();
    assert!(!svg.contains("generated"));
}

#[test]
fn narrow_sweep_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = "[run]\ngrid = 128\n[sweep]\nfamily = cosine_perturbed\nparam = a\nfrom = 0.010\nto = 0.011\ncount = 3\n";
    let out = run(dir.path(), cfg, &["sweep"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("factor"));
    let empty = "[run]\ngrid = 128\n[sweep]\nfamily = cosine_perturbed\nparam = a\nfrom = 0.02\nto = 0.01\n";
    assert_eq!(run(dir.path(), empty, &["sweep"]).status.code(), Some(2));
}

#[test]
fn selftest_is_repeatable_and_catches_injected_faults() {
    let bin = env!("CARGO_BIN_EXE_affine-lab");
    let first = Command::new(bin)
        .args(["selftest", "--grid", "128"])
        .output()
        .unwrap();
    let second = Command::new(bin)
        .args(["selftest", "--grid", "128"])
        .output()
        .unwrap();
    assert!(
        first.status.success(),
        "{}",
        String::from_utf8_lossy(&first.stdout)
    );
    assert_eq!(first.stdout, second.stdout);
    let faulty = Command::new(bin)
        .args(["selftest", "--grid", "128", "--inject-fault"])
        .output()
        .unwrap();
    assert_eq!(faulty.status.code(), Some(1));
    let text = String::from_utf8_lossy(&faulty.stdout);
    assert!(
        text.lines().any(|l| l.starts_with("FAIL area ODE")),
        "{text}"
    );
}
