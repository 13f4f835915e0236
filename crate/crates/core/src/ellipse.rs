//! Origin-centered ellipses, John and Löwner fits, and the SL(2)
//! normalization map.
//!
//! An ellipse is stored by its shape matrix `M` with support function
//! `s_E(u) = √(uᵀ M u)`. Both fits reduce to the same problem,
//!
//! ```text
//! maximize log det Q   subject to   vⱼᵀ Q vⱼ ≤ 1,
//! ```
//!
//! whose Lagrangian dual is the D-optimal design problem on the points `vⱼ`.
//! For the Löwner ellipse the points are boundary samples and `M = Q⁻¹`;
//! for the John ellipse they are the polar points `uⱼ / s(θⱼ)` and `M = Q`.
//! The design is optimized by Khachiyan's rank-one updates with
//! Todd–Yildirim away steps, which converge linearly.

use std::f64::consts::PI;

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::linear::LinearMap2;
use crate::spectral::AngularGrid;

type Sym2 = [[f64; 2]; 2];

/// Absolute tolerance on support values for containment tests.
pub const CONTAINMENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    shape: Sym2,
}

impl Ellipse {
    pub fn new(shape: Sym2) -> Result<Self> {
        let [[a, b], [c, d]] = shape;
        if (b - c).abs() > 1e-12 * (a.abs() + d.abs()) {
            return Err(Error::InvalidParameter(
                "shape matrix is not symmetric".into(),
            ));
        }
        let off = 0.5 * (b + c);
        let det = a * d - off * off;
        if !(a > 0.0 && d > 0.0 && det > 0.0) || !det.is_finite() {
            return Err(Error::InvalidParameter(
                "shape matrix is not positive definite".into(),
            ));
        }
        Ok(Self {
            shape: [[a, off], [off, d]],
        })
    }

    /// Semi-axis `a` along direction `phi`, `b` perpendicular to it.
    pub fn from_axes(a: f64, b: f64, phi: f64) -> Result<Self> {
        let (s, c) = phi.sin_cos();
        let (a2, b2) = (a * a, b * b);
        Self::new([
            [a2 * c * c + b2 * s * s, (a2 - b2) * c * s],
            [(a2 - b2) * c * s, a2 * s * s + b2 * c * c],
        ])
    }

    pub fn disk(radius: f64) -> Result<Self> {
        Self::new([[radius * radius, 0.0], [0.0, radius * radius]])
    }

    #[inline]
    pub fn shape(&self) -> Sym2 {
        self.shape
    }

    pub fn det(&self) -> f64 {
        self.shape[0][0] * self.shape[1][1] - self.shape[0][1] * self.shape[1][0]
    }

    /// Eigenvalues of the shape matrix, ascending.
    fn eigenvalues(&self) -> (f64, f64) {
        let [[p, q], [_, r]] = self.shape;
        let mean = 0.5 * (p + r);
        let dev = (0.25 * (p - r) * (p - r) + q * q).sqrt();
        let big = mean + dev;
        (self.det() / big, big)
    }

    /// `(minor, major)` semi-axes.
    pub fn semi_axes(&self) -> (f64, f64) {
        let (lo, hi) = self.eigenvalues();
        (lo.sqrt(), hi.sqrt())
    }

    /// Unit direction of the major axis, first component non-negative
    /// (second component non-negative when the first vanishes). A disk
    /// reports `(1, 0)`.
    pub fn major_direction(&self) -> [f64; 2] {
        let [[p, q], [_, r]] = self.shape;
        let (_, hi) = self.eigenvalues();
        let mut v = if q == 0.0 {
            if p >= r {
                [1.0, 0.0]
            } else {
                [0.0, 1.0]
            }
        } else if (hi - r).abs() >= (hi - p).abs() {
            [hi - r, q]
        } else {
            [q, hi - p]
        };
        let norm = v[0].hypot(v[1]);
        v = [v[0] / norm, v[1] / norm];
        if v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0) {
            v = [-v[0], -v[1]];
        }
        v
    }

    /// Angle of the major axis in `(-π/2, π/2]`.
    pub fn orientation(&self) -> f64 {
        let v = self.major_direction();
        v[1].atan2(v[0])
    }

    pub fn area(&self) -> f64 {
        PI * self.det().sqrt()
    }

    #[inline]
    pub fn support_dir(&self, u: [f64; 2]) -> f64 {
        let m = &self.shape;
        (m[0][0] * u[0] * u[0] + 2.0 * m[0][1] * u[0] * u[1] + m[1][1] * u[1] * u[1]).sqrt()
    }

    pub fn support(&self, theta: f64) -> f64 {
        self.support_dir([theta.cos(), theta.sin()])
    }

    pub fn support_samples(&self, grid: &AngularGrid) -> Vec<f64> {
        grid.angles().map(|t| self.support(t)).collect()
    }

    pub fn to_body(&self, grid: &AngularGrid) -> Result<ConvexBody> {
        ConvexBody::from_samples(grid, &self.support_samples(grid))
    }

    pub fn scaled(&self, k: f64) -> Ellipse {
        let k2 = k * k;
        Ellipse {
            shape: [
                [self.shape[0][0] * k2, self.shape[0][1] * k2],
                [self.shape[1][0] * k2, self.shape[1][1] * k2],
            ],
        }
    }

    /// Image under a linear map: `T M Tᵀ`.
    pub fn transformed(&self, map: &LinearMap2) -> Ellipse {
        let t = map.entries();
        let m = &self.shape;
        let tm = [
            [
                t[0][0] * m[0][0] + t[0][1] * m[1][0],
                t[0][0] * m[0][1] + t[0][1] * m[1][1],
            ],
            [
                t[1][0] * m[0][0] + t[1][1] * m[1][0],
                t[1][0] * m[0][1] + t[1][1] * m[1][1],
            ],
        ];
        let a = tm[0][0] * t[0][0] + tm[0][1] * t[0][1];
        let b = tm[0][0] * t[1][0] + tm[0][1] * t[1][1];
        let d = tm[1][0] * t[1][0] + tm[1][1] * t[1][1];
        Ellipse {
            shape: [[a, b], [b, d]],
        }
    }

    /// Distance between shape matrices (Frobenius).
    pub fn shape_distance(&self, other: &Ellipse) -> f64 {
        let mut acc = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                acc += (self.shape[i][j] - other.shape[i][j]).powi(2);
            }
        }
        acc.sqrt()
    }

    /// `E ⊆ K` by support dominance on the body's grid.
    pub fn is_inside(&self, body: &ConvexBody, tol: f64) -> bool {
        body.grid()
            .angles()
            .zip(body.support())
            .all(|(t, s)| self.support(t) <= s + tol)
    }

    /// `K ⊆ E` by support dominance on the body's grid.
    pub fn encloses(&self, body: &ConvexBody, tol: f64) -> bool {
        body.grid()
            .angles()
            .zip(body.support())
            .all(|(t, s)| *s <= self.support(t) + tol)
    }

    /// `max_θ |s_K − s_E|` on the body's grid.
    pub fn hausdorff_to(&self, body: &ConvexBody) -> f64 {
        body.grid()
            .angles()
            .zip(body.support())
            .map(|(t, s)| (s - self.support(t)).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Stop once the duality gap `2 ln(κ_max / 2)` is below this.
    pub gap_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100_000,
            gap_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverStats {
    pub iterations: usize,
    /// Gap between the feasible ellipse and the dual bound on `log det`.
    pub gap: f64,
}

fn inv2(m: &Sym2) -> Sym2 {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ]
}

#[inline]
fn quad(m: &Sym2, v: &[f64; 2]) -> f64 {
    m[0][0] * v[0] * v[0] + 2.0 * m[0][1] * v[0] * v[1] + m[1][1] * v[1] * v[1]
}

/// Maximizes `log det Q` subject to `vⱼᵀ Q vⱼ ≤ 1` for a point set whose
/// symmetric hull spans the plane. Returns a feasible `Q` (the largest
/// constraint is active) and the final duality gap.
pub fn max_det_quadratic(points: &[[f64; 2]], opts: &SolverOptions) -> Result<(Sym2, SolverStats)> {
    const D: f64 = 2.0;
    let m = points.len();
    if m < 2 {
        return Err(Error::InvalidParameter("need at least two points".into()));
    }
    let mut w = vec![1.0 / m as f64; m];
    let mut x = [[0.0; 2]; 2];
    for (v, &wj) in points.iter().zip(&w) {
        x[0][0] += wj * v[0] * v[0];
        x[0][1] += wj * v[0] * v[1];
        x[1][1] += wj * v[1] * v[1];
    }
    x[1][0] = x[0][1];
    let mut kappa = vec![0.0; m];

    let mut iterations = 0;
    loop {
        let xi = inv2(&x);
        for (k, v) in kappa.iter_mut().zip(points) {
            *k = quad(&xi, v);
        }
        let (jp, kp) =
            kappa
                .iter()
                .cloned()
                .enumerate()
                .fold(
                    (0, f64::NEG_INFINITY),
                    |acc, (j, k)| if k > acc.1 { (j, k) } else { acc },
                );
        let gap = D * (kp / D).ln();
        if gap <= opts.gap_tol {
            let q = [
                [xi[0][0] / kp, xi[0][1] / kp],
                [xi[1][0] / kp, xi[1][1] / kp],
            ];
            return Ok((
                q,
                SolverStats {
                    iterations,
                    gap: gap.max(0.0),
                },
            ));
        }
        if iterations >= opts.max_iterations || !gap.is_finite() {
            return Err(Error::SolverFailure { gap, iterations });
        }
        iterations += 1;

        let (jm, km) = kappa
            .iter()
            .cloned()
            .enumerate()
            .filter(|&(j, _)| w[j] > 0.0)
            .fold(
                (0, f64::INFINITY),
                |acc, (j, k)| if k < acc.1 { (j, k) } else { acc },
            );

        let (j, alpha) = if kp - D >= D - km {
            (jp, (kp - D) / (D * (kp - 1.0)))
        } else {
            let floor = -w[jm] / (1.0 - w[jm]);
            let alpha = if km > 1.0 {
                ((km - D) / (D * (km - 1.0))).max(floor)
            } else {
                floor
            };
            (jm, alpha)
        };
        let drop = alpha <= -w[j] / (1.0 - w[j]);
        for wk in w.iter_mut() {
            *wk *= 1.0 - alpha;
        }
        w[j] += alpha;
        if drop {
            w[j] = 0.0;
        }
        let v = points[j];
        for r in 0..2 {
            for c in 0..2 {
                x[r][c] = (1.0 - alpha) * x[r][c] + alpha * v[r] * v[c];
            }
        }

        // multiplicative update wⱼ ← wⱼ κⱼ/d: linear convergence when the
        // optimal design is dense (all points on the optimal ellipse)
        let xi = inv2(&x);
        let mut next = [[0.0; 2]; 2];
        let mut total = 0.0;
        for (wj, v) in w.iter_mut().zip(points) {
            *wj *= quad(&xi, v) / D;
            total += *wj;
        }
        for (wj, v) in w.iter_mut().zip(points) {
            *wj /= total;
            next[0][0] += *wj * v[0] * v[0];
            next[0][1] += *wj * v[0] * v[1];
            next[1][1] += *wj * v[1] * v[1];
        }
        next[1][0] = next[0][1];
        x = next;
    }
}

fn solve3(h: &[[f64; 3]; 3], g: &[f64; 3]) -> Option<[f64; 3]> {
    // symmetric positive definite: Cholesky
    let mut l = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..=i {
            let mut acc = h[i][j];
            for k in 0..j {
                acc -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(acc > 0.0) {
                    return None;
                }
                l[i][i] = acc.sqrt();
            } else {
                l[i][j] = acc / l[j][j];
            }
        }
    }
    let mut y = [0.0; 3];
    for i in 0..3 {
        let mut acc = g[i];
        for k in 0..i {
            acc -= l[i][k] * y[k];
        }
        y[i] = acc / l[i][i];
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let mut acc = y[i];
        for k in i + 1..3 {
            acc -= l[k][i] * x[k];
        }
        x[i] = acc / l[i][i];
    }
    Some(x)
}

/// Primal–dual interior-point method for the same problem as
/// [`max_det_quadratic`], in the three free entries of `Q`:
///
/// ```text
/// min −log det Q   s.t.   aⱼᵀq + sⱼ = 1,  s ≥ 0
/// ```
///
/// with `aⱼ = (xⱼ², 2xⱼyⱼ, yⱼ²)`. Starts from the interior point
/// `Q = I / (2 max|v|²)`. Slacks and multipliers are separate variables, so
/// complementarity does not degrade with cancellation in `1 − aⱼᵀq`. The
/// returned gap is certified by weak duality.
pub fn max_det_interior(points: &[[f64; 2]], opts: &SolverOptions) -> Result<(Sym2, SolverStats)> {
    let m = points.len();
    if m < 2 {
        return Err(Error::InvalidParameter("need at least two points".into()));
    }
    let rows: Vec<[f64; 3]> = points
        .iter()
        .map(|v| [v[0] * v[0], 2.0 * v[0] * v[1], v[1] * v[1]])
        .collect();
    let dot = |a: &[f64; 3], q: &[f64; 3]| a[0] * q[0] + a[1] * q[1] + a[2] * q[2];
    let det = |q: &[f64; 3]| q[0] * q[2] - q[1] * q[1];
    let max_norm = points
        .iter()
        .map(|v| v[0] * v[0] + v[1] * v[1])
        .fold(0.0, f64::max);

    let mut q = [0.5 / max_norm, 0.0, 0.5 / max_norm];
    let mut s: Vec<f64> = rows.iter().map(|a| 1.0 - dot(a, &q)).collect();
    let mut w: Vec<f64> = s.iter().map(|sj| 2.0 / (m as f64 * sj)).collect();
    let mut best = (q, f64::INFINITY);

    for iterations in 0..opts.max_iterations.min(500) {
        let gap = certified_gap(&rows, &q, &w);
        if gap < best.1 {
            best = (q, gap);
        }
        if gap <= opts.gap_tol {
            return finish(&rows, best.0, best.1, iterations);
        }

        let d = det(&q);
        let p = [q[2] / d, -q[1] / d, q[0] / d];
        // ∇(−log det) and its Hessian in (q₁₁, q₁₂, q₂₂)
        let grad = [-p[0], -2.0 * p[1], -p[2]];
        let mut h = [
            [p[0] * p[0], 2.0 * p[0] * p[1], p[1] * p[1]],
            [
                2.0 * p[0] * p[1],
                2.0 * (p[0] * p[2] + p[1] * p[1]),
                2.0 * p[1] * p[2],
            ],
            [p[1] * p[1], 2.0 * p[1] * p[2], p[2] * p[2]],
        ];
        let mu = s.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / m as f64;
        let target = 0.1 * mu;

        let mut rd = grad;
        let mut rhs = [0.0; 3];
        for (j, a) in rows.iter().enumerate() {
            let rp = dot(a, &q) + s[j] - 1.0;
            let rc = s[j] * w[j] - target;
            let ratio = w[j] / s[j];
            // Δw = (−rc + w rp + w aᵀΔq) / s
            let base = (-rc + w[j] * rp) / s[j];
            for r in 0..3 {
                rd[r] += a[r] * w[j];
                rhs[r] -= a[r] * base;
                for c in 0..3 {
                    h[r][c] += a[r] * a[c] * ratio;
                }
            }
        }
        for r in 0..3 {
            rhs[r] -= rd[r];
        }
        let dq = solve3(&h, &rhs).ok_or(Error::SolverFailure {
            gap: best.1,
            iterations,
        })?;
        let mut ds = vec![0.0; m];
        let mut dw = vec![0.0; m];
        for (j, a) in rows.iter().enumerate() {
            let rp = dot(a, &q) + s[j] - 1.0;
            let rc = s[j] * w[j] - target;
            ds[j] = -rp - dot(a, &dq);
            dw[j] = (-rc - w[j] * ds[j]) / s[j];
        }

        let mut alpha: f64 = 1.0;
        for j in 0..m {
            if ds[j] < 0.0 {
                alpha = alpha.min(-0.99 * s[j] / ds[j]);
            }
            if dw[j] < 0.0 {
                alpha = alpha.min(-0.99 * w[j] / dw[j]);
            }
        }
        loop {
            let trial = [
                q[0] + alpha * dq[0],
                q[1] + alpha * dq[1],
                q[2] + alpha * dq[2],
            ];
            if det(&trial) > 0.0 && trial[0] > 0.0 {
                q = trial;
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-20 {
                return Err(Error::SolverFailure {
                    gap: best.1,
                    iterations,
                });
            }
        }
        for j in 0..m {
            s[j] += alpha * ds[j];
            w[j] += alpha * dw[j];
        }
    }
    let gap = certified_gap(&rows, &q, &w);
    if gap < best.1 {
        best = (q, gap);
    }
    if best.1 <= opts.gap_tol {
        return finish(&rows, best.0, best.1, opts.max_iterations);
    }
    Err(Error::SolverFailure {
        gap: best.1,
        iterations: opts.max_iterations.min(500),
    })
}

/// Scales `q` onto the feasible set with its largest constraint active.
fn feasible(rows: &[[f64; 3]], q: &[f64; 3]) -> [f64; 3] {
    let worst = rows
        .iter()
        .map(|a| a[0] * q[0] + a[1] * q[1] + a[2] * q[2])
        .fold(f64::NEG_INFINITY, f64::max);
    [q[0] / worst, q[1] / worst, q[2] / worst]
}

fn finish(
    rows: &[[f64; 3]],
    q: [f64; 3],
    gap: f64,
    iterations: usize,
) -> Result<(Sym2, SolverStats)> {
    let q = feasible(rows, &q);
    Ok((
        [[q[0], q[1]], [q[1], q[2]]],
        SolverStats {
            iterations,
            gap: gap.max(0.0),
        },
    ))
}

/// `−log det Q_feasible − (log det Σ wⱼvⱼvⱼᵀ + 2 − Σ wⱼ)`: primal value at
/// the feasible rescaling of `q` minus the Lagrange dual value at `w ≥ 0`.
fn certified_gap(rows: &[[f64; 3]], q: &[f64; 3], w: &[f64]) -> f64 {
    let qf = feasible(rows, q);
    let mut x = [0.0; 3];
    let mut wsum = 0.0;
    for (a, &wj) in rows.iter().zip(w) {
        let wj = wj.max(0.0);
        wsum += wj;
        x[0] += wj * a[0];
        x[1] += wj * a[1] * 0.5;
        x[2] += wj * a[2];
    }
    let primal = -(qf[0] * qf[2] - qf[1] * qf[1]).ln();
    let dual = (x[0] * x[2] - x[1] * x[1]).ln() + 2.0 - wsum;
    primal - dual
}

/// Maximal-area origin-centered ellipse inside the grid polygon
/// `{x : |⟨uⱼ, x⟩| ≤ s(θⱼ)}`.
pub fn john_ellipse(body: &ConvexBody) -> Result<Ellipse> {
    john_ellipse_with(body, &SolverOptions::default()).map(|(e, _)| e)
}

pub fn john_ellipse_with(
    body: &ConvexBody,
    opts: &SolverOptions,
) -> Result<(Ellipse, SolverStats)> {
    let grid = body.grid();
    let polar: Vec<[f64; 2]> = (0..grid.half())
        .map(|j| {
            let t = grid.angle(j);
            let s = body.support()[j];
            [t.cos() / s, t.sin() / s]
        })
        .collect();
    let (q, stats) = max_det_interior(&polar, opts)?;
    Ok((Ellipse::new(q)?, stats))
}

/// Minimal-area origin-centered ellipse containing the sampled boundary.
pub fn lowner_ellipse(body: &ConvexBody) -> Result<Ellipse> {
    lowner_ellipse_with(body, &SolverOptions::default()).map(|(e, _)| e)
}

pub fn lowner_ellipse_with(
    body: &ConvexBody,
    opts: &SolverOptions,
) -> Result<(Ellipse, SolverStats)> {
    let half = body.grid().half();
    let points: Vec<[f64; 2]> = body.boundary_points().into_iter().take(half).collect();
    let (q, stats) = match max_det_quadratic(&points, opts) {
        Err(Error::SolverFailure { .. }) => max_det_interior(&points, opts)?,
        other => other?,
    };
    Ok((Ellipse::new(inv2(&q))?, stats))
}

/// Symmetric map `T = (det M)^{1/4} M^{-1/2}` with `det T = 1` sending the
/// ellipse to the disk of radius `√(ab)`.
pub fn normalizing_transform(e: &Ellipse) -> LinearMap2 {
    let m = e.shape();
    let root_det = e.det().sqrt();
    let tau = (m[0][0] + m[1][1] + 2.0 * root_det).sqrt();
    // √M = (M + √det I) / √(tr M + 2√det)
    let sq = [
        [(m[0][0] + root_det) / tau, m[0][1] / tau],
        [m[1][0] / tau, (m[1][1] + root_det) / tau],
    ];
    let sq_inv = inv2(&sq);
    let k = root_det.sqrt();
    LinearMap2::new([
        [k * sq_inv[0][0], k * sq_inv[0][1]],
        [k * sq_inv[1][0], k * sq_inv[1][1]],
    ])
    .expect("positive definite shape gives an invertible map")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskDistance {
    /// `(A(B_R) − A(E)) / (π (A(B_R)/π)^{1/2})`
    pub bound: f64,
    /// Exact distance `R − a` (semi-minor `a`).
    pub distance: f64,
}

/// Area-based upper bound on `d_H(E, B_R)` for `E ⊆ B_R`.
pub fn disk_distance_bound(e: &Ellipse, radius: f64) -> Result<DiskDistance> {
    let (minor, major) = e.semi_axes();
    if major > radius + 1e-12 {
        return Err(Error::NotContained { major, radius });
    }
    let disk_area = PI * radius * radius;
    let bound = (disk_area - e.area()) / (PI * (disk_area / PI).sqrt());
    Ok(DiskDistance {
        bound,
        distance: radius - minor,
    })
}

/// Constant affine support value of an ellipse, `(A/π)^{2/3}`.
pub fn sigma_of_ellipse(e: &Ellipse) -> f64 {
    (e.area() / PI).powf(2.0 / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cosine_perturbed, disk, ellipse_body};

    #[test]
    fn axes_and_orientation() {
        let e = Ellipse::from_axes(4.0, 1.0, 0.3).unwrap();
        let (a, b) = e.semi_axes();
        assert!((a - 1.0).abs() < 1e-14 && (b - 4.0).abs() < 1e-14);
        assert!((e.orientation() - 0.3).abs() < 1e-14);
        assert!((e.area() - 4.0 * PI).abs() < 1e-13);
        let vertical = Ellipse::from_axes(1.0, 2.0, 0.0).unwrap();
        assert_eq!(vertical.major_direction(), [0.0, 1.0]);
    }

    #[test]
    fn rejects_indefinite_shape() {
        assert!(Ellipse::new([[1.0, 2.0], [2.0, 1.0]]).is_err());
        assert!(Ellipse::new([[1.0, 0.1], [0.0, 1.0]]).is_err());
    }

    #[test]
    fn normalizing_transform_examples() {
        let t = normalizing_transform(&Ellipse::disk(1.7).unwrap());
        assert!(t.distance(&LinearMap2::IDENTITY) < 1e-15);
        let t = normalizing_transform(&Ellipse::from_axes(4.0, 1.0, 0.0).unwrap());
        assert!(t.distance(&LinearMap2::diagonal(0.5, 2.0).unwrap()) < 1e-15);
        let e = Ellipse::from_axes(3.0, 0.2, 1.1).unwrap();
        let t = normalizing_transform(&e);
        assert!((t.det() - 1.0).abs() < 1e-12);
        let img = e.transformed(&t);
        let r = (3.0f64 * 0.2).sqrt();
        assert!(img.shape_distance(&Ellipse::disk(r).unwrap()) < 1e-12);
    }

    #[test]
    fn disk_distance_examples() {
        let d = disk_distance_bound(&Ellipse::disk(1.0).unwrap(), 1.0).unwrap();
        assert!(d.bound.abs() < 1e-15 && d.distance.abs() < 1e-15);
        let d = disk_distance_bound(&Ellipse::from_axes(0.5, 1.0, 0.0).unwrap(), 1.0).unwrap();
        assert!((d.bound - 0.5).abs() < 1e-15 && (d.distance - 0.5).abs() < 1e-15);
        let d = disk_distance_bound(&Ellipse::disk(0.9).unwrap(), 1.0).unwrap();
        assert!((d.bound - 0.19).abs() < 1e-15 && (d.distance - 0.1).abs() < 1e-15);
        assert!(matches!(
            disk_distance_bound(&Ellipse::from_axes(1.2, 0.5, 0.0).unwrap(), 1.0),
            Err(Error::NotContained { .. })
        ));
    }

    #[test]
    fn sigma_of_ellipse_examples() {
        assert!((sigma_of_ellipse(&Ellipse::disk(1.0).unwrap()) - 1.0).abs() < 1e-15);
        assert!(
            (sigma_of_ellipse(&Ellipse::disk(2.0).unwrap()) - 4f64.powf(2.0 / 3.0)).abs() < 1e-14
        );
        assert!(
            (sigma_of_ellipse(&Ellipse::from_axes(5.0, 0.2, 0.7).unwrap()) - 1.0).abs() < 1e-14
        );
    }

    #[test]
    fn fits_of_disk_and_ellipse() {
        let g = AngularGrid::new(256).unwrap();
        let unit = disk(&g, 1.0).unwrap();
        let id = Ellipse::disk(1.0).unwrap();
        assert!(john_ellipse(&unit).unwrap().shape_distance(&id) < 1e-12);
        assert!(lowner_ellipse(&unit).unwrap().shape_distance(&id) < 1e-12);

        let body = ellipse_body(&g, 2.0, 0.5, 0.0).unwrap();
        let truth = Ellipse::from_axes(2.0, 0.5, 0.0).unwrap();
        assert!(john_ellipse(&body).unwrap().shape_distance(&truth) < 1e-8);
        assert!(lowner_ellipse(&body).unwrap().shape_distance(&truth) < 1e-8);
    }

    #[test]
    fn john_sandwich_on_perturbed_body() {
        let g = AngularGrid::new(256).unwrap();
        let body = cosine_perturbed(&g, 0.05, 2).unwrap();
        let (john, stats) = john_ellipse_with(&body, &SolverOptions::default()).unwrap();
        assert!(stats.gap <= 1e-10);
        assert!(john.is_inside(&body, CONTAINMENT_TOL));
        assert!(john.scaled(2f64.sqrt()).encloses(&body, 1e-8));
        let lowner = lowner_ellipse(&body).unwrap();
        assert!(lowner.encloses(&body, CONTAINMENT_TOL));
        assert!(john.area() <= body.area() && body.area() <= lowner.area());
    }

    #[test]
    fn solver_failure_is_reported() {
        let g = AngularGrid::new(256).unwrap();
        let body = cosine_perturbed(&g, 0.05, 2).unwrap();
        let opts = SolverOptions {
            max_iterations: 1,
            gap_tol: 1e-14,
        };
        let points: Vec<[f64; 2]> = body.boundary_points().into_iter().take(128).collect();
        assert!(matches!(
            max_det_quadratic(&points, &opts),
            Err(Error::SolverFailure { iterations: 1, .. })
        ));
        assert!(matches!(
            john_ellipse_with(&body, &opts),
            Err(Error::SolverFailure { .. })
        ));
    }

    #[test]
    fn barrier_and_design_solvers_agree() {
        let g = AngularGrid::new(256).unwrap();
        let body = cosine_perturbed(&g, 0.02, 3).unwrap();
        let points: Vec<[f64; 2]> = body.boundary_points().into_iter().take(128).collect();
        let opts = SolverOptions::default();
        let (a, _) = max_det_quadratic(&points, &opts).unwrap();
        let (b, stats) = max_det_interior(&points, &opts).unwrap();
        assert!(stats.gap <= 1e-10);
        let diff = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| (a[i][j] - b[i][j]).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-6, "diff {diff}");
    }

    #[test]
    fn eccentric_ellipse_fits_itself() {
        let g = AngularGrid::new(512).unwrap();
        let exact = Ellipse::from_axes(3.0, 1.0 / 3.0, 0.2).unwrap();
        let body = exact.to_body(&g).unwrap();
        let john = john_ellipse(&body).unwrap();
        let lowner = lowner_ellipse(&body).unwrap();
        assert!(john.shape_distance(&exact) < 1e-8);
        assert!(lowner.shape_distance(&exact) < 1e-8);
    }
}
