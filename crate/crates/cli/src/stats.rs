//! Log-log slope fits with a bootstrap interval.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Least-squares slope of `y` against `x`. `None` with fewer than two
/// distinct abscissae.
pub fn slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len().min(y.len());
    if n < 2 {
        return None;
    }
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for i in 0..n {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub lower: f64,
    pub upper: f64,
    pub resamples: usize,
}

/// Percentile 95% interval from `resamples` pair resamples. Degenerate
/// resamples (all abscissae equal) are skipped.
pub fn bootstrap_slope(x: &[f64], y: &[f64], resamples: usize, seed: u64) -> Option<SlopeFit> {
    let point = slope(x, y)?;
    let n = x.len().min(y.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut slopes = Vec::with_capacity(resamples);
    let (mut bx, mut by) = (vec![0.0; n], vec![0.0; n]);
    for _ in 0..resamples {
        for i in 0..n {
            let j = rng.gen_range(0..n);
            bx[i] = x[j];
            by[i] = y[j];
        }
        if let Some(s) = slope(&bx, &by) {
            slopes.push(s);
        }
    }
    if slopes.is_empty() {
        return Some(SlopeFit {
            slope: point,
            lower: point,
            upper: point,
            resamples: 0,
        });
    }
    slopes.sort_by(f64::total_cmp);
    let pick =
        |q: f64| slopes[((q * (slopes.len() - 1) as f64).round() as usize).min(slopes.len() - 1)];
    Some(SlopeFit {
        slope: point,
        lower: pick(0.025),
        upper: pick(0.975),
        resamples: slopes.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 0.3 * v - 1.0).collect();
        assert!((slope(&x, &y).unwrap() - 0.3).abs() < 1e-14);
        let fit = bootstrap_slope(&x, &y, 200, 7).unwrap();
        assert!((fit.lower - 0.3).abs() < 1e-12 && (fit.upper - 0.3).abs() < 1e-12);
        assert!(slope(&[1.0, 1.0], &[0.0, 2.0]).is_none());
    }

    #[test]
    fn bootstrap_is_seeded() {
        let x = [0.0, 1.0, 2.0, 3.0, 4.0];
        let y = [0.1, 0.9, 2.2, 2.8, 4.1];
        assert_eq!(
            bootstrap_slope(&x, &y, 500, 3),
            bootstrap_slope(&x, &y, 500, 3)
        );
        let fit = bootstrap_slope(&x, &y, 500, 3).unwrap();
        assert!(fit.lower <= fit.slope && fit.slope <= fit.upper);
    }
}
