//! Discrete-time Fourier sums on a [`FrequencyGrid`] and periodic convolutions.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, Result};
use crate::grid::FrequencyGrid;

/// Evaluates `X(xi_i) = sum_t x_t exp(-2 pi i xi_i t)` at every node of a grid.
///
/// Because `xi_i = -1/2 + i/m`, the sum equals the length-`m` DFT of
/// `(-1)^t x_t` zero-padded to `m`, which is what the fast path computes.
#[derive(Clone)]
pub struct GridTransform {
    m: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for GridTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridTransform").field("m", &self.m).finish()
    }
}

impl GridTransform {
    pub fn new(grid: &FrequencyGrid) -> Self {
        let m = grid.len();
        let fft = FftPlanner::new().plan_fft_forward(m);
        Self { m, fft }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// Writes the Fourier sum of `x` into `out` (length `m`). Requires `x.len() <= m`.
    pub fn eval_into(&self, x: &[f64], out: &mut [Complex64]) -> Result<()> {
        if x.len() > self.m {
            return Err(crate::Error::GridTooCoarse {
                m: self.m,
                required: x.len(),
            });
        }
        assert_eq!(out.len(), self.m);
        for (t, slot) in out.iter_mut().enumerate() {
            *slot = match x.get(t) {
                Some(&v) if t % 2 == 0 => Complex64::new(v, 0.0),
                Some(&v) => Complex64::new(-v, 0.0),
                None => Complex64::new(0.0, 0.0),
            };
        }
        self.fft.process(out);
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.m];
        self.eval_into(x, &mut out)?;
        Ok(out)
    }

    /// `|X(xi_i)|^2` at every node.
    pub fn power(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.eval(x)?.iter().map(|z| z.norm_sqr()).collect())
    }
}

/// Reference evaluation of the Fourier sum by direct summation, `O(n m)`.
pub fn fourier_sum_direct(x: &[f64], grid: &FrequencyGrid) -> Vec<Complex64> {
    grid.points()
        .iter()
        .map(|&xi| {
            x.iter()
                .enumerate()
                .map(|(t, &v)| Complex64::from_polar(v, -2.0 * PI * xi * t as f64))
                .sum()
        })
        .collect()
}

/// Circular convolution `c_i = sum_j a_j b_{(i - j) mod m}` via FFT.
pub fn circular_convolve(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(crate::Error::DimensionMismatch {
            what: "convolution operands",
            expected: a.len(),
            found: b.len(),
        });
    }
    let m = a.len();
    if m == 0 {
        return Err(invalid("m", "empty convolution"));
    }
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let mut fa: Vec<Complex64> = a.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut fb: Vec<Complex64> = b.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inv.process(&mut fa);
    let scale = 1.0 / m as f64;
    Ok(fa.iter().map(|z| z.re * scale).collect())
}

/// Direct `O(m^2)` circular convolution; the reference for [`circular_convolve`].
pub fn circular_convolve_direct(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(crate::Error::DimensionMismatch {
            what: "convolution operands",
            expected: a.len(),
            found: b.len(),
        });
    }
    let m = a.len();
    Ok((0..m)
        .map(|i| (0..m).map(|j| a[j] * b[(i + m - j) % m]).sum())
        .collect())
}

/// Periodic convolution of two functions sampled on the grid,
/// `(f * g)(xi_i) = int_I f(y) g(xi_i - y) dy`, by the periodic trapezoid rule.
pub fn periodic_convolution(grid: &FrequencyGrid, f: &[f64], g: &[f64]) -> Result<Vec<f64>> {
    let m = grid.len();
    for (what, v) in [("convolution input", f), ("convolution kernel", g)] {
        if v.len() != m {
            return Err(crate::Error::DimensionMismatch {
                what,
                expected: m,
                found: v.len(),
            });
        }
    }
    // g sampled at offsets d/m, d = 0..m.
    let shifted: Vec<f64> = (0..m).map(|d| g[(d + m / 2) % m]).collect();
    let h = grid.spacing();
    Ok(circular_convolve(f, &shifted)?.into_iter().map(|v| v * h).collect())
}
