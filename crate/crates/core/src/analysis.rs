//! Scaling sweeps of the leakage quantities and Monte Carlo bias/variance
//! studies of the multitaper estimator.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::estimator::{expected_spectrum, MultitaperWorkspace};
use crate::grid::FrequencyGrid;
use crate::prolate::{compute_dpss, eigenvalue_sum_defect, ProlateParams};
use crate::synth::{generate_stream, true_spectrum, ProcessModel, RNG_ALGORITHM};
use crate::window::{
    fejer_defect, l1_distance_to_ideal, smooth_with_ideal, spectral_window, split_leakage,
    trace_identities_from_spectrum,
};

/// Default number of grid points per unit of `n`.
pub const DEFAULT_GRID_FACTOR: usize = 64;

/// Tolerance of the per-row trace check, relative to `2nW`.
pub const TRACE_TOLERANCE: f64 = 1e-8;

/// Number of batches the Monte Carlo trials are split into. Batches are the
/// unit of parallel work and of the batch-means standard error.
pub const MONTE_CARLO_BATCHES: usize = 20;

/// Minimum number of trials accepted by [`tradeoff_study`].
pub const MIN_TRIALS: usize = 100;

/// One `(n, w)` point of a scaling sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub w: f64,
    pub big_k: usize,
    pub grid_points: usize,
    pub l1_distance: f64,
    pub narrow_band: f64,
    pub broad_band: f64,
    pub broad_band_from_eigenvalues: f64,
    pub eigen_defect: f64,
    pub fejer_defect: f64,
    pub trace: f64,
    pub trace_sq: f64,
    /// `sum_k lambda_k (1 - lambda_k)` over the whole spectrum.
    pub spectrum_defect: f64,
    pub eigenvalue_sum: f64,
    /// Number of eigenvalues `>= 1/2`.
    pub count_above_half: usize,
}

impl SweepRow {
    /// `l1_distance * K / ln n`.
    pub fn l1_ratio(&self) -> f64 {
        self.l1_distance * self.big_k as f64 / (self.n as f64).ln()
    }

    /// `eigen_defect * K / ln n`.
    pub fn eigen_defect_ratio(&self) -> f64 {
        self.eigen_defect * self.big_k as f64 / (self.n as f64).ln()
    }

    /// `fejer_defect * n / ln n`.
    pub fn fejer_ratio(&self) -> f64 {
        self.fejer_defect * self.n as f64 / (self.n as f64).ln()
    }

    /// `spectrum_defect / ln n`.
    pub fn spectrum_defect_ratio(&self) -> f64 {
        self.spectrum_defect / (self.n as f64).ln()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub w: f64,
    pub grid_factor: usize,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// True if `f` strictly decreases down the rows.
    pub fn strictly_decreasing(&self, f: impl Fn(&SweepRow) -> f64) -> bool {
        self.rows.windows(2).all(|p| f(&p[1]) < f(&p[0]))
    }

    /// `max / min` of `f` over the rows.
    pub fn span(&self, f: impl Fn(&SweepRow) -> f64) -> f64 {
        let values: Vec<f64> = self.rows.iter().map(f).collect();
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        max / min
    }

    /// Every property the sweep is expected to satisfy, for reporting.
    pub fn checks(&self) -> Vec<Check> {
        let mut out = Vec::new();
        let worst_trace = self
            .rows
            .iter()
            .map(|r| (r.eigenvalue_sum - r.trace).abs() / r.trace)
            .fold(0.0, f64::max);
        out.push(Check::new(
            "trace identity: sum of eigenvalues = 2nW",
            worst_trace <= TRACE_TOLERANCE,
            format!("max relative error {worst_trace:.3e} (tolerance {TRACE_TOLERANCE:.0e})"),
        ));
        let worst_split = self
            .rows
            .iter()
            .map(|r| (r.narrow_band + r.broad_band - r.l1_distance).abs())
            .fold(0.0, f64::max);
        out.push(Check::new(
            "narrow + broad = L1 distance",
            worst_split <= 1e-12,
            format!("max deviation {worst_split:.3e}"),
        ));
        let worst_broad = self
            .rows
            .iter()
            .map(|r| (r.broad_band - r.broad_band_from_eigenvalues).abs())
            .fold(0.0, f64::max);
        out.push(Check::new(
            "broad-band leakage = 1 - mean eigenvalue",
            worst_broad <= 1e-6,
            format!("max deviation {worst_broad:.3e}"),
        ));
        if self.rows.len() >= 2 {
            for (name, decreasing, span) in [
                (
                    "L1 distance",
                    self.strictly_decreasing(|r| r.l1_distance),
                    self.span(SweepRow::l1_ratio),
                ),
                (
                    "Fejer defect",
                    self.strictly_decreasing(|r| r.fejer_defect),
                    self.span(SweepRow::fejer_ratio),
                ),
            ] {
                out.push(Check::new(
                    format!("{name} strictly decreasing in n"),
                    decreasing,
                    String::new(),
                ));
                out.push(Check::new(
                    format!("{name} normalized ratio spans < 3"),
                    span < 3.0,
                    format!("span {span:.4}"),
                ));
            }
            let span = self.span(SweepRow::spectrum_defect_ratio);
            out.push(Check::new(
                "sum lambda(1-lambda) / ln n spans < 3",
                span < 3.0,
                format!("span {span:.4}"),
            ));
        }
        out
    }
}

/// A named pass/fail property with a human-readable detail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        if self.detail.is_empty() {
            write!(f, "{tag}  {}", self.name)
        } else {
            write!(f, "{tag}  {}  ({})", self.name, self.detail)
        }
    }
}

/// Smallest even grid size that is at least `factor * n`.
pub fn grid_for(n: usize, factor: usize) -> Result<FrequencyGrid> {
    let m = factor * n;
    FrequencyGrid::new(m + m % 2)
}

/// Computes every window-level leakage quantity for one `(n, w)`.
pub fn sweep_row(n: usize, w: f64, grid_factor: usize) -> Result<SweepRow> {
    let probe = ProlateParams::new(n, w, 1)?;
    let big_k = probe.big_k();
    if big_k == 0 {
        return Err(invalid("w", format!("w = {w} <= 1/(2n) gives K = 0 for n = {n}")));
    }
    let params = ProlateParams::new(n, w, big_k)?;
    let basis = compute_dpss(&params)?;
    let grid = grid_for(n, grid_factor)?;
    let window = spectral_window(&basis, big_k, &grid)?;
    let split = split_leakage(&window)?;
    let spectrum = basis.all_eigenvalues().expect("solved basis carries its spectrum");
    let traces = trace_identities_from_spectrum(&params, spectrum);

    if ((traces.eigenvalue_sum - traces.trace) / traces.trace).abs() > TRACE_TOLERANCE {
        return Err(Error::InvariantViolated(format!(
            "eigenvalue sum {} differs from trace {} for n = {n}, w = {w}",
            traces.eigenvalue_sum, traces.trace
        )));
    }

    Ok(SweepRow {
        n,
        w,
        big_k,
        grid_points: grid.len(),
        l1_distance: split.total(),
        narrow_band: split.narrow_band,
        broad_band: split.broad_band,
        broad_band_from_eigenvalues: split.broad_band_from_eigenvalues,
        eigen_defect: eigenvalue_sum_defect(&basis, big_k)?,
        fejer_defect: fejer_defect(n, w, &grid)?,
        trace: traces.trace,
        trace_sq: traces.trace_sq,
        spectrum_defect: traces.defect,
        eigenvalue_sum: traces.eigenvalue_sum,
        count_above_half: spectrum.iter().filter(|l| **l >= 0.5).count(),
    })
}

/// Runs [`sweep_row`] for every `n` in the list.
pub fn theorem_sweep(n_list: &[usize], w: f64, grid_factor: usize) -> Result<SweepResult> {
    if n_list.is_empty() {
        return Err(invalid("n_list", "sweep needs at least one n"));
    }
    if grid_factor < 2 {
        return Err(invalid("grid_factor", format!("need grid_factor >= 2, got {grid_factor}")));
    }
    let rows = n_list
        .iter()
        .map(|&n| sweep_row(n, w, grid_factor))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { w, grid_factor, rows })
}

/// Parameters of a Monte Carlo trade-off study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffConfig {
    pub n: usize,
    pub w: f64,
    pub k_list: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub grid_points: usize,
}

/// Orders of magnitude named by the bias and MSE bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundTerms {
    pub w_squared: f64,
    pub log_n_over_k: f64,
    pub inv_k: f64,
    pub w_fourth: f64,
    pub log_n_over_k_squared: f64,
}

impl BoundTerms {
    pub fn new(n: usize, w: f64, big_k: usize) -> Self {
        let k = big_k as f64;
        let ln = (n as f64).ln();
        Self {
            w_squared: w * w,
            log_n_over_k: ln / k,
            inv_k: 1.0 / k,
            w_fourth: w.powi(4),
            log_n_over_k_squared: (ln / k).powi(2),
        }
    }
}

/// Empirical bias, variance and MSE of the multitaper estimate for one `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffReport {
    pub model: String,
    pub n: usize,
    pub w: f64,
    pub big_k: usize,
    pub trials: usize,
    pub seed: u64,
    pub rng: String,
    pub grid: FrequencyGrid,
    pub true_spectrum: Vec<f64>,
    /// `S * (rho_K / K)`.
    pub expected: Vec<f64>,
    /// Monte Carlo mean of the estimate.
    pub mean: Vec<f64>,
    /// `mean - true_spectrum`.
    pub pointwise_bias: Vec<f64>,
    /// `mean - expected`; zero up to Monte Carlo noise.
    pub leakage_residual: Vec<f64>,
    /// Sample variance with `1/trials` normalization.
    pub pointwise_variance: Vec<f64>,
    /// Standard error of the mean, `sqrt(s^2 / trials)` with `s^2` unbiased.
    pub standard_errors: Vec<f64>,
    /// `mean over trials of (estimate - S)^2`.
    pub pointwise_mse: Vec<f64>,
    /// Grid average of `pointwise_mse`.
    pub mse_summary: f64,
    /// Grid average of `bias^2 + variance`.
    pub bias_variance_summary: f64,
    /// Grid average of `pointwise_variance`.
    pub mean_variance: f64,
    /// Batch-means standard error of `mean_variance`.
    pub mean_variance_se: f64,
    /// L1 distance of the spectral window to the ideal kernel, on this grid.
    pub l1_distance: f64,
    pub bound_terms: BoundTerms,
}

impl TradeoffReport {
    /// Indices of grid points away from `0` and `+-1/2` by more than `2W`.
    pub fn interior_indices(&self) -> Vec<usize> {
        interior_indices(&self.grid, self.w)
    }

    /// Grid average of `|bias|`.
    pub fn mean_abs_bias(&self) -> f64 {
        mean(self.pointwise_bias.iter().map(|b| b.abs()))
    }

    pub fn mean_standard_error(&self) -> f64 {
        mean(self.standard_errors.iter().copied())
    }

    /// Fraction of grid points where `|mean - expected| <= sigmas * se`.
    pub fn fraction_within(&self, sigmas: f64) -> f64 {
        let hits = self
            .leakage_residual
            .iter()
            .zip(&self.standard_errors)
            .filter(|(r, se)| r.abs() <= sigmas * **se)
            .count();
        hits as f64 / self.grid.len() as f64
    }
}

/// `|xi| > 2W` and `|xi| < 1/2 - 2W`.
pub fn interior_indices(grid: &FrequencyGrid, w: f64) -> Vec<usize> {
    grid.points()
        .iter()
        .enumerate()
        .filter(|(_, xi)| xi.abs() > 2.0 * w && xi.abs() < 0.5 - 2.0 * w)
        .map(|(i, _)| i)
        .collect()
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    sum / count as f64
}

/// Pointwise Welford accumulator plus the running sum of squared errors.
#[derive(Debug, Clone)]
struct Moments {
    count: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
    sq_err: Vec<f64>,
}

impl Moments {
    fn new(m: usize) -> Self {
        Self {
            count: 0,
            mean: vec![0.0; m],
            m2: vec![0.0; m],
            sq_err: vec![0.0; m],
        }
    }

    fn push(&mut self, x: &[f64], truth: &[f64]) {
        self.count += 1;
        let c = self.count as f64;
        for i in 0..x.len() {
            let delta = x[i] - self.mean[i];
            self.mean[i] += delta / c;
            self.m2[i] += delta * (x[i] - self.mean[i]);
            self.sq_err[i] += (x[i] - truth[i]).powi(2);
        }
    }

    /// Chan et al. pairwise combination.
    fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let total = na + nb;
        for i in 0..self.mean.len() {
            let delta = other.mean[i] - self.mean[i];
            self.mean[i] += delta * nb / total;
            self.m2[i] += other.m2[i] + delta * delta * na * nb / total;
            self.sq_err[i] += other.sq_err[i];
        }
        self.count += other.count;
    }

    fn variance(&self) -> Vec<f64> {
        let c = self.count as f64;
        self.m2.iter().map(|v| v / c).collect()
    }
}

/// Monte Carlo study of the multitaper estimator for each `K` in `k_list`.
///
/// Every `K` sees the same records. Trial `t` draws its record from ChaCha
/// stream `t` of `seed`, and batches are combined in a fixed order, so the
/// output does not depend on the number of worker threads.
pub fn tradeoff_study(model: &ProcessModel, config: &TradeoffConfig) -> Result<Vec<TradeoffReport>> {
    let TradeoffConfig {
        n,
        w,
        ref k_list,
        trials,
        seed,
        grid_points,
    } = *config;
    if trials < MIN_TRIALS {
        return Err(invalid("trials", format!("need at least {MIN_TRIALS} trials, got {trials}")));
    }
    if k_list.is_empty() {
        return Err(invalid("k_list", "need at least one K"));
    }
    let max_k = *k_list.iter().max().expect("non-empty");
    if k_list.contains(&0) || max_k > n {
        return Err(invalid("k_list", format!("every K must lie in 1..={n}")));
    }
    let params = ProlateParams::new(n, w, max_k)?;
    let basis = compute_dpss(&params)?;
    let grid = FrequencyGrid::new(grid_points)?;
    grid.require(2 * n)?;
    let truth = true_spectrum(model, &grid);
    let m = grid.len();

    let batches = MONTE_CARLO_BATCHES.min(trials);
    let ranges: Vec<(usize, usize)> = (0..batches)
        .map(|b| (b * trials / batches, (b + 1) * trials / batches))
        .collect();

    let batch_moments: Vec<Vec<Moments>> = ranges
        .par_iter()
        .map(|&(start, end)| -> Result<Vec<Moments>> {
            let mut workspace = MultitaperWorkspace::new(&basis, &grid)?;
            let mut acc: Vec<Moments> = k_list.iter().map(|_| Moments::new(m)).collect();
            let mut single = vec![0.0; m];
            let mut running = vec![0.0; m];
            let mut average = vec![0.0; m];
            for trial in start..end {
                let record = generate_stream(model, n, seed, trial as u64)?;
                running.iter_mut().for_each(|v| *v = 0.0);
                for j in 0..max_k {
                    workspace.tapered_into(&record, j, &mut single)?;
                    for (r, s) in running.iter_mut().zip(&single) {
                        *r += s;
                    }
                    for (slot, &k) in k_list.iter().enumerate() {
                        if k == j + 1 {
                            let scale = 1.0 / k as f64;
                            for (a, r) in average.iter_mut().zip(&running) {
                                *a = r * scale;
                            }
                            acc[slot].push(&average, &truth);
                        }
                    }
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;

    k_list
        .iter()
        .enumerate()
        .map(|(slot, &big_k)| {
            let mut total = Moments::new(m);
            for batch in &batch_moments {
                total.merge(&batch[slot]);
            }
            let batch_variances: Vec<f64> = batch_moments
                .iter()
                .map(|b| mean(b[slot].variance().into_iter()))
                .collect();
            let window = spectral_window(&basis, big_k, &grid)?;
            let expected = expected_spectrum(&truth, &window)?;
            let variance = total.variance();
            let t = trials as f64;
            let pointwise_mse: Vec<f64> = total.sq_err.iter().map(|s| s / t).collect();
            let pointwise_bias: Vec<f64> = total.mean.iter().zip(&truth).map(|(a, b)| a - b).collect();
            let bias_variance_summary =
                mean(pointwise_bias.iter().zip(&variance).map(|(b, v)| b * b + v));
            Ok(TradeoffReport {
                model: model.description().to_string(),
                n,
                w,
                big_k,
                trials,
                seed,
                rng: RNG_ALGORITHM.to_string(),
                true_spectrum: truth.clone(),
                leakage_residual: total.mean.iter().zip(&expected).map(|(a, b)| a - b).collect(),
                expected,
                standard_errors: total.m2.iter().map(|v| (v / (t - 1.0) / t).sqrt()).collect(),
                mse_summary: mean(pointwise_mse.iter().copied()),
                bias_variance_summary,
                mean_variance: mean(variance.iter().copied()),
                mean_variance_se: batch_means_se(&batch_variances),
                l1_distance: l1_distance_to_ideal(&window)?,
                bound_terms: BoundTerms::new(n, w, big_k),
                pointwise_mse,
                pointwise_bias,
                pointwise_variance: variance,
                mean: total.mean,
                grid: grid.clone(),
            })
        })
        .collect()
}

/// Standard error of the overall mean from per-batch means.
fn batch_means_se(batch_values: &[f64]) -> f64 {
    let b = batch_values.len() as f64;
    if b < 2.0 {
        return f64::INFINITY;
    }
    let mu = batch_values.iter().sum::<f64>() / b;
    let s2 = batch_values.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (b - 1.0);
    (s2 / b).sqrt()
}

/// Pointwise `variance(a) / variance(b)` at interior frequencies.
pub fn interior_variance_ratios(a: &TradeoffReport, b: &TradeoffReport) -> Result<Vec<f64>> {
    if a.grid != b.grid {
        return Err(invalid("grid", "reports were computed on different grids"));
    }
    Ok(a.interior_indices()
        .into_iter()
        .map(|i| a.pointwise_variance[i] / b.pointwise_variance[i])
        .collect())
}

/// The two terms that bound the bias of the multitaper estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasBoundReport {
    /// `|| S * window - S * ideal ||_inf`.
    pub leakage_gap: f64,
    /// `|| S - S * ideal ||_inf`.
    pub smoothing_term: f64,
    pub max_spectrum: f64,
    pub l1_distance: f64,
    /// `max |S| * l1_distance`, the bound on `leakage_gap`.
    pub leakage_bound: f64,
    pub holds: bool,
    pub bound_terms: BoundTerms,
}

pub fn bias_bound_report(report: &TradeoffReport) -> Result<BiasBoundReport> {
    let m = report.grid.len();
    if report.true_spectrum.len() != m || report.expected.len() != m {
        return Err(Error::DimensionMismatch {
            what: "report vectors",
            expected: m,
            found: report.true_spectrum.len().min(report.expected.len()),
        });
    }
    let ideal = smooth_with_ideal(&report.true_spectrum, &report.grid, report.w)?;
    let sup = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let leakage_gap = sup(&report.expected, &ideal);
    let max_spectrum = report.true_spectrum.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let leakage_bound = max_spectrum * report.l1_distance;
    Ok(BiasBoundReport {
        leakage_gap,
        smoothing_term: sup(&report.true_spectrum, &ideal),
        max_spectrum,
        l1_distance: report.l1_distance,
        leakage_bound,
        holds: leakage_gap <= leakage_bound,
        bound_terms: report.bound_terms,
    })
}

/// `|| S - S * (1/(2W)) 1_[-W, W] ||_inf` on the grid.
pub fn smoothing_term(model: &ProcessModel, w: f64, grid: &FrequencyGrid) -> Result<f64> {
    let s = true_spectrum(model, grid);
    let smoothed = smooth_with_ideal(&s, grid, w)?;
    Ok(s.iter().zip(&smoothed).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_merge_matches_single_pass() {
        let truth = vec![0.0; 2];
        let data: Vec<[f64; 2]> = (0..17).map(|i| [i as f64 * 0.3, (i * i) as f64 * 0.01]).collect();
        let mut whole = Moments::new(2);
        data.iter().for_each(|x| whole.push(x, &truth));
        let mut a = Moments::new(2);
        let mut b = Moments::new(2);
        data[..6].iter().for_each(|x| a.push(x, &truth));
        data[6..].iter().for_each(|x| b.push(x, &truth));
        a.merge(&b);
        for i in 0..2 {
            assert!((a.mean[i] - whole.mean[i]).abs() < 1e-12);
            assert!((a.m2[i] - whole.m2[i]).abs() < 1e-10);
            assert!((a.sq_err[i] - whole.sq_err[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn study_rejects_bad_config() {
        let model = ProcessModel::white(1.0).unwrap();
        let base = TradeoffConfig {
            n: 32,
            w: 0.1,
            k_list: vec![2, 6],
            trials: 100,
            seed: 1,
            grid_points: 128,
        };
        assert!(tradeoff_study(&model, &TradeoffConfig { trials: 99, ..base.clone() }).is_err());
        assert!(tradeoff_study(&model, &TradeoffConfig { k_list: vec![], ..base.clone() }).is_err());
        assert!(tradeoff_study(&model, &TradeoffConfig { k_list: vec![0, 2], ..base.clone() }).is_err());
        assert!(tradeoff_study(&model, &TradeoffConfig { k_list: vec![33], ..base.clone() }).is_err());
        assert!(tradeoff_study(&model, &TradeoffConfig { grid_points: 32, ..base }).is_err());
    }

    #[test]
    fn mse_decomposes() {
        let model = ProcessModel::peaked_ar2();
        let config = TradeoffConfig {
            n: 32,
            w: 0.1,
            k_list: vec![1, 6],
            trials: 100,
            seed: 3,
            grid_points: 128,
        };
        for r in tradeoff_study(&model, &config).unwrap() {
            assert!(r.mse_summary >= 0.0);
            assert!(r.pointwise_variance.iter().all(|v| *v >= 0.0));
            assert!((r.mse_summary - r.bias_variance_summary).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_spectrum_has_no_bias_terms() {
        let model = ProcessModel::white(1.0).unwrap();
        let config = TradeoffConfig {
            n: 32,
            w: 0.1,
            k_list: vec![6],
            trials: 100,
            seed: 3,
            grid_points: 128,
        };
        let report = &tradeoff_study(&model, &config).unwrap()[0];
        let b = bias_bound_report(report).unwrap();
        assert!(b.leakage_gap < 1e-10);
        assert!(b.smoothing_term < 1e-10);
        assert!(b.holds);
    }

    #[test]
    fn sweep_rejects_bad_input() {
        assert!(theorem_sweep(&[], 0.1, 64).is_err());
        assert!(theorem_sweep(&[64], 0.1, 1).is_err());
        assert!(theorem_sweep(&[4], 0.1, 64).is_err()); // K = 0
    }

    #[test]
    fn interior_mask() {
        // |xi| = |k|/128 with 25.6 < |k| < 38.4
        let grid = FrequencyGrid::new(128).unwrap();
        let idx = interior_indices(&grid, 0.1);
        assert!(idx.iter().all(|&i| {
            let x = grid.points()[i].abs();
            x > 0.2 && x < 0.3
        }));
        assert_eq!(idx.len(), 26);
    }
}
