//! Slepian functions, the averaged spectral window and its distance to the
//! ideal band-pass kernel `1/(2W) 1_[-W, W]`.
//!
//! `U_j(xi) = sum_t v_t^(j) exp(-2 pi i xi (t - (n-1)/2))` uses the centered
//! time origin, so `D_n` is the reproducing kernel of the span of the `U_j`.
//! Squared magnitudes do not depend on the centering.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fourier::{circular_convolve, fourier_sum_direct, GridTransform};
use crate::grid::{FrequencyGrid, IntervalRule};
use crate::prolate::{build_concentration_matrix, concentration_eigenvalues, ProlateBasis, ProlateParams};

/// Grid points per unit of `n` required by [`verify_integral_equation`].
pub const INTEGRAL_EQUATION_OVERSAMPLING: usize = 16;

/// Rows summed together before results from parallel workers are combined.
const ROW_CHUNK: usize = 8;

/// Dirichlet kernel `sin(n pi x) / sin(pi x)`, continuous at the integers.
pub fn dirichlet_kernel(n: usize, x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-12 {
        let odd = (r as i64).rem_euclid(2) == 1 && n.is_multiple_of(2);
        let nf = n as f64;
        return if odd { -nf } else { nf };
    }
    (n as f64 * PI * x).sin() / (PI * x).sin()
}

/// `|U_j|^2` for every taper on the grid, `k x m`. Uses zero-padded FFTs.
pub fn evaluate_slepians(basis: &ProlateBasis, grid: &FrequencyGrid) -> Result<Vec<Vec<f64>>> {
    grid.require(basis.params().n())?;
    let transform = GridTransform::new(grid);
    (0..basis.len())
        .into_par_iter()
        .map(|j| transform.power(basis.sequence(j)))
        .collect()
}

/// Direct-summation reference for [`evaluate_slepians`].
pub fn evaluate_slepians_direct(basis: &ProlateBasis, grid: &FrequencyGrid) -> Vec<Vec<f64>> {
    basis
        .sequences()
        .map(|v| fourier_sum_direct(v, grid).iter().map(|z| z.norm_sqr()).collect())
        .collect()
}

/// Centered Slepian function `U(xi)` of a single sequence, by direct summation.
pub fn slepian_amplitude(sequence: &[f64], xi: f64) -> Complex64 {
    let c = (sequence.len() as f64 - 1.0) / 2.0;
    sequence
        .iter()
        .enumerate()
        .map(|(t, &v)| Complex64::from_polar(v, -2.0 * PI * xi * (t as f64 - c)))
        .sum()
}

/// Centered Slepian function of a sequence at every grid node.
pub fn slepian_amplitudes(sequence: &[f64], grid: &FrequencyGrid) -> Result<Vec<Complex64>> {
    let c = (sequence.len() as f64 - 1.0) / 2.0;
    let mut values = GridTransform::new(grid).eval(sequence)?;
    for (z, &xi) in values.iter_mut().zip(grid.points()) {
        *z *= Complex64::from_polar(1.0, 2.0 * PI * xi * c);
    }
    Ok(values)
}

/// Max over grid nodes of `|int_{-W}^{W} D_n(xi - y) U_j(y) dy - lambda_j U_j(xi)|`.
pub fn verify_integral_equation(basis: &ProlateBasis, grid: &FrequencyGrid, j: usize) -> Result<f64> {
    let params = basis.params();
    if j >= basis.len() {
        return Err(invalid("j", format!("need j < {}, got {j}", basis.len())));
    }
    grid.require(INTEGRAL_EQUATION_OVERSAMPLING * params.n())?;
    let sequence = basis.sequence(j);
    let lambda = basis.eigenvalues()[j];
    let n = params.n();

    let rule = IntervalRule::new(grid, -params.w(), params.w())?;
    let nodes: Vec<(f64, Complex64)> = rule
        .nodes()
        .map(|(c, weight)| {
            let y = grid.node_position(c);
            (y, slepian_amplitude(sequence, y) * weight)
        })
        .collect();
    let on_grid = slepian_amplitudes(sequence, grid)?;

    let residuals: Vec<f64> = grid
        .points()
        .par_iter()
        .zip(on_grid.par_iter())
        .map(|(&xi, &u)| {
            let integral: Complex64 = nodes
                .iter()
                .map(|&(y, wu)| wu * dirichlet_kernel(n, xi - y))
                .sum();
            (integral - u * lambda).norm()
        })
        .collect();
    Ok(residuals.into_iter().fold(0.0, f64::max))
}

/// The averaged squared-Slepian profile `rho_K / K` sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralWindow {
    grid: FrequencyGrid,
    values: Vec<f64>,
    params: ProlateParams,
    big_k: usize,
    mean_eigenvalue: f64,
}

impl SpectralWindow {
    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn params(&self) -> &ProlateParams {
        &self.params
    }

    pub fn big_k(&self) -> usize {
        self.big_k
    }

    /// `(1/K) sum_{k<K} lambda_k` of the tapers that were averaged.
    pub fn mean_eigenvalue(&self) -> f64 {
        self.mean_eigenvalue
    }

    /// Integral over the whole period; 1 for normalized tapers.
    pub fn integral(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    /// The ideal kernel `1/(2W) 1_[-W, W]` at the grid nodes, for plotting.
    pub fn ideal_values(&self) -> Vec<f64> {
        ideal_kernel(&self.grid, self.params.w())
    }
}

/// `1/(2W)` on `|xi| <= W`, zero elsewhere.
pub fn ideal_kernel(grid: &FrequencyGrid, w: f64) -> Vec<f64> {
    grid.points()
        .iter()
        .map(|xi| if xi.abs() <= w { 0.5 / w } else { 0.0 })
        .collect()
}

/// Average of the first `big_k` squared Slepians.
pub fn spectral_window(basis: &ProlateBasis, big_k: usize, grid: &FrequencyGrid) -> Result<SpectralWindow> {
    if big_k == 0 || big_k > basis.len() {
        return Err(invalid(
            "big_k",
            format!("need 1 <= K <= {}, got {big_k}", basis.len()),
        ));
    }
    let params = basis.params();
    grid.require(2 * params.n())?;
    let transform = GridTransform::new(grid);
    let m = grid.len();

    let chunk_sums: Vec<Vec<f64>> = (0..big_k)
        .collect::<Vec<_>>()
        .par_chunks(ROW_CHUNK)
        .map(|rows| -> Result<Vec<f64>> {
            let mut acc = vec![0.0; m];
            let mut buf = vec![Complex64::new(0.0, 0.0); m];
            for &j in rows {
                transform.eval_into(basis.sequence(j), &mut buf)?;
                for (a, z) in acc.iter_mut().zip(&buf) {
                    *a += z.norm_sqr();
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;

    let mut values = vec![0.0; m];
    for chunk in &chunk_sums {
        for (v, c) in values.iter_mut().zip(chunk) {
            *v += c;
        }
    }
    let scale = 1.0 / big_k as f64;
    values.iter_mut().for_each(|v| *v *= scale);

    Ok(SpectralWindow {
        grid: grid.clone(),
        values,
        params: *params,
        big_k,
        mean_eigenvalue: basis.eigenvalues()[..big_k].iter().sum::<f64>() * scale,
    })
}

/// The two parts of the L1 distance to the ideal kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitLeakage {
    /// `int_{-W}^{W} |window - 1/(2W)|`.
    pub narrow_band: f64,
    /// `int_{I \ [-W, W]} window`, by quadrature.
    pub broad_band: f64,
    /// `1 - (1/K) sum_{k<K} lambda_k`, which the broad-band part equals exactly.
    pub broad_band_from_eigenvalues: f64,
}

impl SplitLeakage {
    pub fn total(&self) -> f64 {
        self.narrow_band + self.broad_band
    }
}

pub fn split_leakage(window: &SpectralWindow) -> Result<SplitLeakage> {
    let w = window.params.w();
    let grid = &window.grid;
    let height = 0.5 / w;
    let inside = IntervalRule::new(grid, -w, w)?;
    let outside = IntervalRule::new(grid, w, 1.0 - w)?;
    let deviation: Vec<f64> = window.values.iter().map(|v| (v - height).abs()).collect();
    Ok(SplitLeakage {
        narrow_band: inside.integrate_periodic(&deviation),
        broad_band: outside.integrate_periodic(&window.values),
        broad_band_from_eigenvalues: 1.0 - window.mean_eigenvalue,
    })
}

/// `|| rho_K / K - 1/(2W) 1_[-W, W] ||_{L1(I)}`.
pub fn l1_distance_to_ideal(window: &SpectralWindow) -> Result<f64> {
    Ok(split_leakage(window)?.total())
}

/// `int_{xi - W}^{xi + W} f` at every node, via the FFT.
pub fn box_integral(values: &[f64], grid: &FrequencyGrid, w: f64) -> Result<Vec<f64>> {
    let stencil = box_stencil(values, grid, w)?;
    let m = grid.len();
    let reversed: Vec<f64> = (0..m).map(|d| stencil[(m - d) % m]).collect();
    circular_convolve(values, &reversed)
}

/// Direct `O(m * 2Wm)` reference for [`box_integral`].
pub fn box_integral_direct(values: &[f64], grid: &FrequencyGrid, w: f64) -> Result<Vec<f64>> {
    let m = grid.len();
    let stencil = box_stencil(values, grid, w)?;
    let support: Vec<(usize, f64)> = stencil
        .iter()
        .enumerate()
        .filter(|(_, s)| **s != 0.0)
        .map(|(o, s)| (o, *s))
        .collect();
    Ok((0..m)
        .map(|i| support.iter().map(|&(o, s)| s * values[(i + o) % m]).sum())
        .collect())
}

/// Weights `s_o` such that `int_{xi_i - W}^{xi_i + W} f = sum_o s_o f_{i + o}`.
fn box_stencil(values: &[f64], grid: &FrequencyGrid, w: f64) -> Result<Vec<f64>> {
    if values.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            what: "sampled function",
            expected: grid.len(),
            found: values.len(),
        });
    }
    if !(w > 0.0 && w < 0.5) {
        return Err(invalid("w", format!("need 0 < w < 1/2, got {w}")));
    }
    let origin = grid.points()[0];
    Ok(IntervalRule::new(grid, origin - w, origin + w)?.periodic_weights())
}

/// `f * (1/(2W)) 1_[-W, W]`, the ideal band-pass smoothing of a sampled function.
pub fn smooth_with_ideal(values: &[f64], grid: &FrequencyGrid, w: f64) -> Result<Vec<f64>> {
    let scale = 0.5 / w;
    Ok(box_integral(values, grid, w)?.into_iter().map(|v| v * scale).collect())
}

/// `|| 1_[-W, W] - (1/n) 1_[-W, W] * |D_n|^2 ||_{L1(I)}`, fast path.
pub fn fejer_defect(n: usize, w: f64, grid: &FrequencyGrid) -> Result<f64> {
    fejer_defect_impl(n, w, grid, box_integral)
}

/// Same as [`fejer_defect`] with the convolution evaluated by direct quadrature.
pub fn fejer_defect_direct(n: usize, w: f64, grid: &FrequencyGrid) -> Result<f64> {
    fejer_defect_impl(n, w, grid, box_integral_direct)
}

fn fejer_defect_impl(
    n: usize,
    w: f64,
    grid: &FrequencyGrid,
    conv: fn(&[f64], &FrequencyGrid, f64) -> Result<Vec<f64>>,
) -> Result<f64> {
    if n < 2 {
        return Err(invalid("n", format!("need n >= 2, got {n}")));
    }
    grid.require(2 * n)?;
    let kernel: Vec<f64> = grid.points().iter().map(|&x| dirichlet_kernel(n, x).powi(2)).collect();
    let scale = 1.0 / n as f64;
    let smoothed: Vec<f64> = conv(&kernel, grid, w)?.into_iter().map(|v| v * scale).collect();
    let inside = IntervalRule::new(grid, -w, w)?;
    let outside = IntervalRule::new(grid, w, 1.0 - w)?;
    let in_dev: Vec<f64> = smoothed.iter().map(|v| (v - 1.0).abs()).collect();
    let out_dev: Vec<f64> = smoothed.iter().map(|v| v.abs()).collect();
    Ok(inside.integrate_periodic(&in_dev) + outside.integrate_periodic(&out_dev))
}

/// Trace identities of the concentration operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceIdentities {
    /// Matrix trace, exactly `2nW`.
    pub trace: f64,
    /// `trace(A^2)`, exact from the Toeplitz symbol.
    pub trace_sq: f64,
    /// `trace - trace_sq = sum_k lambda_k (1 - lambda_k)`.
    pub defect: f64,
    /// Sum of the computed eigenvalues.
    pub eigenvalue_sum: f64,
    /// Sum of squares of the computed eigenvalues.
    pub eigenvalue_sq_sum: f64,
}

/// Computes the identities with a fresh eigenvalue solve.
pub fn trace_identities(n: usize, w: f64) -> Result<TraceIdentities> {
    let params = ProlateParams::new(n, w, 1)?;
    let spectrum = concentration_eigenvalues(&params)?;
    Ok(trace_identities_from_spectrum(&params, &spectrum))
}

/// Computes the identities from an already known full spectrum.
pub fn trace_identities_from_spectrum(params: &ProlateParams, spectrum: &[f64]) -> TraceIdentities {
    let a = build_concentration_matrix(params);
    let trace = a.trace();
    let trace_sq = a.trace_of_square();
    TraceIdentities {
        trace,
        trace_sq,
        defect: trace - trace_sq,
        eigenvalue_sum: spectrum.iter().sum(),
        eigenvalue_sq_sum: spectrum.iter().map(|l| l * l).sum(),
    }
}

/// `sum_k lambda_k (1 - lambda_k)` for an arbitrary list of eigenvalues.
pub fn eigenvalue_defect_sum(eigenvalues: &[f64]) -> f64 {
    eigenvalues.iter().map(|l| l * (1.0 - l)).sum()
}
