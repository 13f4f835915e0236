//! Uniform angular grids on the circle and trigonometric (Fourier) calculus
//! on them.
//!
//! Samples are taken at `θ_j = 2πj/n`. Derivatives are computed by
//! multiplying the discrete Fourier coefficients by `ik` (first derivative,
//! Nyquist mode dropped) or `-k²` (second derivative, Nyquist mode kept), so
//! both stay real for real input. Off-grid evaluation uses the same
//! trigonometric interpolant, with the Nyquist term written as a cosine.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform sampling of `[0, 2π)` with a cached FFT plan pair.
#[derive(Clone)]
pub struct AngularGrid {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for AngularGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AngularGrid").field("n", &self.n).finish()
    }
}

impl PartialEq for AngularGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

impl Eq for AngularGrid {}

impl AngularGrid {
    /// Default resolution used throughout the crate.
    pub const DEFAULT_SAMPLES: usize = 512;

    pub fn new(n: usize) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(n));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Index offset of the antipodal sample.
    #[inline]
    pub fn half(&self) -> usize {
        self.n / 2
    }

    /// Grid spacing `Δθ`.
    #[inline]
    pub fn step(&self) -> f64 {
        TAU / self.n as f64
    }

    #[inline]
    pub fn angle(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n as f64
    }

    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.angle(j))
    }

    /// Largest resolved wavenumber (the Nyquist mode).
    #[inline]
    pub fn max_wavenumber(&self) -> usize {
        self.n / 2
    }

    /// Trapezoid rule over the full circle; spectrally accurate for smooth
    /// periodic integrands.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n);
        values.iter().sum::<f64>() * self.step()
    }

    fn spectrum(&self, values: &[f64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.n, "sample count does not match grid");
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        for c in &mut buf {
            *c *= scale;
        }
        buf
    }

    /// Signed wavenumber of FFT bin `j`.
    #[inline]
    fn wavenumber(&self, j: usize) -> f64 {
        if j <= self.n / 2 {
            j as f64
        } else {
            j as f64 - self.n as f64
        }
    }

    /// First and second derivatives of a periodic sample vector.
    ///
    /// Both are recovered from a single inverse transform: the first
    /// derivative lands in the real part and the second in the imaginary part.
    pub fn derivatives(&self, values: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut spec = self.spectrum(values);
        let nyquist = self.n / 2;
        for (j, c) in spec.iter_mut().enumerate() {
            let k = self.wavenumber(j);
            let d1 = if j == nyquist {
                Complex64::new(0.0, 0.0)
            } else {
                *c * Complex64::new(0.0, k)
            };
            let d2 = *c * (-k * k);
            *c = d1 + Complex64::new(0.0, 1.0) * d2;
        }
        self.inverse.process(&mut spec);
        let first = spec.iter().map(|c| c.re).collect();
        let second = spec.iter().map(|c| c.im).collect();
        (first, second)
    }

    pub fn first_derivative(&self, values: &[f64]) -> Vec<f64> {
        self.derivatives(values).0
    }

    pub fn second_derivative(&self, values: &[f64]) -> Vec<f64> {
        self.derivatives(values).1
    }

    /// Trigonometric interpolant through the samples.
    pub fn series(&self, values: &[f64]) -> TrigSeries {
        let spec = self.spectrum(values);
        TrigSeries {
            n: self.n,
            coeffs: spec[..=self.n / 2].to_vec(),
        }
    }
}

/// Real trigonometric polynomial of degree `n/2` stored by its
/// non-negative-frequency coefficients.
#[derive(Debug, Clone)]
pub struct TrigSeries {
    n: usize,
    coeffs: Vec<Complex64>,
}

impl TrigSeries {
    /// Value, first and second derivative at an arbitrary angle.
    pub fn eval_all(&self, theta: f64) -> (f64, f64, f64) {
        let half = self.n / 2;
        let step = Complex64::from_polar(1.0, theta);
        let mut rot = step;
        let mut value = self.coeffs[0].re;
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for (k, c) in self.coeffs.iter().enumerate().take(half).skip(1) {
            let kf = k as f64;
            let z = c * rot;
            value += 2.0 * z.re;
            // d/dθ Re(c e^{ikθ}) = -k Im(c e^{ikθ})
            d1 -= 2.0 * kf * z.im;
            d2 -= 2.0 * kf * kf * z.re;
            rot *= step;
            // re-anchor periodically to keep the recurrence from drifting
            if k % 64 == 63 {
                rot = Complex64::from_polar(1.0, (k + 1) as f64 * theta);
            }
        }
        let nyq = self.coeffs[half].re;
        let hf = half as f64;
        let c = (hf * theta).cos();
        value += nyq * c;
        d2 -= hf * hf * nyq * c;
        (value, d1, d2)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.eval_all(theta).0
    }

    pub fn eval_derivative(&self, theta: f64) -> f64 {
        self.eval_all(theta).1
    }

    /// Samples the interpolant on another grid.
    pub fn resample(&self, grid: &AngularGrid) -> Vec<f64> {
        grid.angles().map(|t| self.eval(t)).collect()
    }
}
