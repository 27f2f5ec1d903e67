//! Discrete prolate spheroidal sequences (DPSS).
//!
//! The DPSS `v^(k)(N, W)` are the eigenvectors of the `N x N` symmetric
//! Toeplitz matrix with entries `sin(2 pi W (t - m)) / (pi (t - m))` and
//! `2W` on the diagonal. Their eigenvalues `lambda_k` are the fractions of
//! energy that the corresponding Slepian functions keep inside `[-W, W]`.
//!
//! The reference path solves the dense Toeplitz eigenproblem directly. A
//! second path diagonalizes the commuting tridiagonal matrix instead; it
//! yields better separated eigenvalues and is kept as an independent route
//! for cross-checks.

use std::f64::consts::PI;

use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Version tag of the eigenvector sign rule, written into serialized output.
pub const SIGN_CONVENTION: &str = "max-abs-positive/v1";

/// Relative tolerance under which two entries count as tied for the sign rule.
const SIGN_TIE_TOLERANCE: f64 = 1e-9;

/// Record length, bandwidth and number of tapers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProlateParams {
    n: usize,
    w: f64,
    k: usize,
}

impl ProlateParams {
    /// Validates `n >= 2`, `0 < w < 1/2` and `1 <= k <= n`.
    pub fn new(n: usize, w: f64, k: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid("n", format!("need n >= 2, got {n}")));
        }
        if !(w.is_finite() && w > 0.0 && w < 0.5) {
            return Err(invalid("w", format!("need 0 < w < 1/2, got {w}")));
        }
        if k == 0 || k > n {
            return Err(invalid("k", format!("need 1 <= k <= n = {n}, got {k}")));
        }
        Ok(Self { n, w, k })
    }

    /// Parameters with the customary taper count `K = floor(2nW)` (at least 1).
    pub fn with_default_k(n: usize, w: f64) -> Result<Self> {
        let probe = Self::new(n, w, 1)?;
        Self::new(n, w, probe.big_k().clamp(1, n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The Shannon number `2nW`.
    pub fn shannon_number(&self) -> f64 {
        2.0 * self.n as f64 * self.w
    }

    /// `K = floor(2nW)`, guarding against `2nW` landing a hair below an integer.
    pub fn big_k(&self) -> usize {
        (self.shannon_number() + 1e-9).floor() as usize
    }

    /// True when `w <= 1/(2n)`, where `floor(2nW)` is zero and the bandwidth
    /// is below the resolution of the record.
    pub fn below_resolution(&self) -> bool {
        self.big_k() == 0
    }
}

/// Symmetric Toeplitz matrix stored by its first column.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzMatrix {
    symbol: Vec<f64>,
}

impl ToeplitzMatrix {
    pub fn from_symbol(symbol: Vec<f64>) -> Self {
        Self { symbol }
    }

    pub fn n(&self) -> usize {
        self.symbol.len()
    }

    /// First column, `a_d = A[t, t + d]`.
    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    pub fn entry(&self, t: usize, m: usize) -> f64 {
        self.symbol[t.abs_diff(m)]
    }

    pub fn to_dense(&self) -> Mat<f64> {
        Mat::from_fn(self.n(), self.n(), |t, m| self.entry(t, m))
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n())
            .map(|t| v.iter().enumerate().map(|(m, x)| self.entry(t, m) * x).sum())
            .collect()
    }

    pub fn trace(&self) -> f64 {
        self.n() as f64 * self.symbol[0]
    }

    /// `trace(A^2) = ||A||_F^2`, exact from the symbol.
    pub fn trace_of_square(&self) -> f64 {
        let n = self.n();
        let off: f64 = (1..n).map(|d| (n - d) as f64 * self.symbol[d] * self.symbol[d]).sum();
        n as f64 * self.symbol[0] * self.symbol[0] + 2.0 * off
    }
}

/// `sin(2 pi w d) / (pi d)`, with the `d = 0` limit `2w`.
pub fn sinc_kernel(w: f64, d: usize) -> f64 {
    if d == 0 {
        2.0 * w
    } else {
        let d = d as f64;
        (2.0 * PI * w * d).sin() / (PI * d)
    }
}

/// The time-concentration matrix whose eigenvectors are the DPSS.
pub fn build_concentration_matrix(params: &ProlateParams) -> ToeplitzMatrix {
    ToeplitzMatrix::from_symbol((0..params.n).map(|d| sinc_kernel(params.w, d)).collect())
}

/// Which matrix is diagonalized to obtain the sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DpssMethod {
    /// Eigenvectors of the commuting tridiagonal matrix, whose spectrum is
    /// well separated; eigenvalues by Rayleigh quotient.
    #[default]
    Tridiagonal,
    /// Dense eigendecomposition of the sinc Toeplitz matrix. Leading
    /// eigenvalues agree with 1 to machine precision once `2nW` is large, so
    /// individual vectors inside that cluster are an arbitrary rotation of
    /// the DPSS. Spans, and hence spectral windows and estimates that use the
    /// whole cluster, are unaffected.
    Dense,
}

/// Leading DPSS and eigenvalues for one `(n, w)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProlateBasis {
    params: ProlateParams,
    /// Row-major `k x n`.
    sequences: Vec<f64>,
    eigenvalues: Vec<f64>,
    full_eigenvalue_sum: f64,
    all_eigenvalues: Option<Vec<f64>>,
}

impl ProlateBasis {
    /// Assembles a basis from given rows and eigenvalues without solving
    /// anything; only shapes are checked. Useful for synthetic cases.
    pub fn from_parts(
        params: ProlateParams,
        sequences: Vec<Vec<f64>>,
        eigenvalues: Vec<f64>,
    ) -> Result<Self> {
        if sequences.len() != params.k {
            return Err(Error::DimensionMismatch {
                what: "number of sequences",
                expected: params.k,
                found: sequences.len(),
            });
        }
        if eigenvalues.len() != params.k {
            return Err(Error::DimensionMismatch {
                what: "number of eigenvalues",
                expected: params.k,
                found: eigenvalues.len(),
            });
        }
        if let Some(bad) = sequences.iter().find(|s| s.len() != params.n) {
            return Err(Error::DimensionMismatch {
                what: "sequence length",
                expected: params.n,
                found: bad.len(),
            });
        }
        Ok(Self {
            params,
            sequences: sequences.concat(),
            eigenvalues,
            full_eigenvalue_sum: build_concentration_matrix(&params).trace(),
            all_eigenvalues: None,
        })
    }

    pub fn params(&self) -> &ProlateParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.params.k
    }

    pub fn is_empty(&self) -> bool {
        self.params.k == 0
    }

    pub fn sequence(&self, j: usize) -> &[f64] {
        let n = self.params.n;
        &self.sequences[j * n..(j + 1) * n]
    }

    pub fn sequences(&self) -> impl Iterator<Item = &[f64]> {
        self.sequences.chunks_exact(self.params.n)
    }

    /// `lambda_0 >= ... >= lambda_{k-1}`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Sum of all `n` eigenvalues, taken as the matrix trace `2nW`.
    pub fn full_eigenvalue_sum(&self) -> f64 {
        self.full_eigenvalue_sum
    }

    /// The complete descending spectrum, when this basis came from a solve.
    pub fn all_eigenvalues(&self) -> Option<&[f64]> {
        self.all_eigenvalues.as_deref()
    }

    /// Max-norm deviation of the Gram matrix of the rows from the identity.
    pub fn gram_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.len() {
            for j in i..self.len() {
                let dot: f64 = self.sequence(i).iter().zip(self.sequence(j)).map(|(a, b)| a * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// `||A v_j - lambda_j v_j||_2` for every row.
    pub fn residuals(&self) -> Vec<f64> {
        let a = build_concentration_matrix(&self.params);
        (0..self.len())
            .map(|j| {
                let v = self.sequence(j);
                let av = a.apply(v);
                av.iter()
                    .zip(v)
                    .map(|(x, y)| (x - self.eigenvalues[j] * y).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }
}

/// Leading `k` DPSS with the default method.
pub fn compute_dpss(params: &ProlateParams) -> Result<ProlateBasis> {
    compute_dpss_with(params, DpssMethod::default())
}

pub fn compute_dpss_with(params: &ProlateParams, method: DpssMethod) -> Result<ProlateBasis> {
    let (n, k) = (params.n, params.k);
    let a = build_concentration_matrix(params);
    let fail = || Error::NoConvergence { n, w: params.w };

    let (all, vectors) = match method {
        DpssMethod::Dense => {
            let evd = a.to_dense().self_adjoint_eigen(Side::Lower).map_err(|_| fail())?;
            let s = evd.S().column_vector();
            let u = evd.U();
            // faer sorts ascending; take the top k from the end.
            let all: Vec<f64> = (0..n).rev().map(|i| s[i]).collect();
            let vectors: Vec<Vec<f64>> = (0..k)
                .map(|j| (0..n).map(|t| u[(t, n - 1 - j)]).collect())
                .collect();
            (all, vectors)
        }
        DpssMethod::Tridiagonal => {
            let evd = commuting_tridiagonal(params)
                .self_adjoint_eigen(Side::Lower)
                .map_err(|_| fail())?;
            let u = evd.U();
            let vectors: Vec<Vec<f64>> = (0..k)
                .map(|j| (0..n).map(|t| u[(t, n - 1 - j)]).collect())
                .collect();
            let mut all = concentration_eigenvalues(params)?;
            for (lambda, v) in all.iter_mut().zip(&vectors) {
                *lambda = rayleigh_quotient(&a, v);
            }
            (all, vectors)
        }
    };

    let mut sequences = Vec::with_capacity(k * n);
    for mut v in vectors {
        normalize(&mut v);
        apply_sign_convention(&mut v);
        sequences.extend_from_slice(&v);
    }
    Ok(ProlateBasis {
        params: *params,
        sequences,
        eigenvalues: all[..k].to_vec(),
        full_eigenvalue_sum: a.trace(),
        all_eigenvalues: Some(all),
    })
}

/// All `n` eigenvalues of the concentration matrix, descending, without vectors.
pub fn concentration_eigenvalues(params: &ProlateParams) -> Result<Vec<f64>> {
    let a = build_concentration_matrix(params);
    let mut values = a
        .to_dense()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::NoConvergence {
            n: params.n,
            w: params.w,
        })?;
    values.reverse();
    Ok(values)
}

/// `|1 - (1/K) sum_{k<K} lambda_k|`.
pub fn eigenvalue_sum_defect(basis: &ProlateBasis, big_k: usize) -> Result<f64> {
    if big_k == 0 || big_k > basis.len() {
        return Err(invalid(
            "big_k",
            format!("need 1 <= K <= {}, got {big_k}", basis.len()),
        ));
    }
    let mean = basis.eigenvalues[..big_k].iter().sum::<f64>() / big_k as f64;
    Ok((1.0 - mean).abs())
}

/// Tridiagonal matrix commuting with the sinc Toeplitz matrix.
fn commuting_tridiagonal(params: &ProlateParams) -> Mat<f64> {
    let n = params.n;
    let c = (2.0 * PI * params.w).cos();
    let half = (n as f64 - 1.0) / 2.0;
    Mat::from_fn(n, n, |i, j| {
        if i == j {
            (half - i as f64).powi(2) * c
        } else if i.abs_diff(j) == 1 {
            let t = i.min(j) + 1;
            (t * (n - t)) as f64 / 2.0
        } else {
            0.0
        }
    })
}

fn rayleigh_quotient(a: &ToeplitzMatrix, v: &[f64]) -> f64 {
    let av = a.apply(v);
    let num: f64 = av.iter().zip(v).map(|(x, y)| x * y).sum();
    let den: f64 = v.iter().map(|x| x * x).sum();
    num / den
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

/// Flips `v` so that its largest-magnitude entry is positive; among entries
/// tied in magnitude the earliest index decides.
pub fn apply_sign_convention(v: &mut [f64]) {
    let peak = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if peak == 0.0 {
        return;
    }
    let lead = v
        .iter()
        .find(|x| x.abs() >= peak * (1.0 - SIGN_TIE_TOLERANCE))
        .copied()
        .unwrap_or(0.0);
    if lead < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(ProlateParams::new(1, 0.1, 1).is_err());
        assert!(ProlateParams::new(8, 0.0, 1).is_err());
        assert!(ProlateParams::new(8, 0.5, 1).is_err());
        assert!(ProlateParams::new(8, -0.1, 1).is_err());
        assert!(ProlateParams::new(8, f64::NAN, 1).is_err());
        assert!(ProlateParams::new(8, 0.1, 0).is_err());
        assert!(ProlateParams::new(8, 0.1, 9).is_err());
        let err = ProlateParams::new(8, 0.6, 1).unwrap_err().to_string();
        assert!(err.contains("0 < w < 1/2"), "{err}");
    }

    #[test]
    fn default_taper_count() {
        let p = ProlateParams::with_default_k(256, 0.1).unwrap();
        assert_eq!(p.k(), 51);
        assert_eq!(ProlateParams::with_default_k(64, 0.125).unwrap().k(), 16);
        assert_eq!(ProlateParams::with_default_k(1000, 0.0125).unwrap().k(), 25);
        let narrow = ProlateParams::with_default_k(8, 0.05).unwrap();
        assert!(narrow.below_resolution());
        assert_eq!(narrow.k(), 1);
    }

    #[test]
    fn two_by_two_matrix() {
        let a = build_concentration_matrix(&ProlateParams::new(2, 0.25, 1).unwrap());
        assert_eq!(a.entry(0, 0), 0.5);
        assert_eq!(a.entry(1, 1), 0.5);
        assert!((a.entry(0, 1) - 1.0 / PI).abs() < 1e-15);
        assert_eq!(a.entry(0, 1), a.entry(1, 0));
    }

    #[test]
    fn diagonal_and_trace() {
        let a = build_concentration_matrix(&ProlateParams::new(3, 0.1, 1).unwrap());
        for t in 0..3 {
            assert_eq!(a.entry(t, t), 0.2);
        }
        let a = build_concentration_matrix(&ProlateParams::new(8, 0.1, 1).unwrap());
        assert!((a.trace() - 1.6).abs() < 1e-15);
    }

    #[test]
    fn matrix_is_exactly_symmetric_toeplitz() {
        let a = build_concentration_matrix(&ProlateParams::new(12, 0.17, 1).unwrap()).to_dense();
        for t in 0..12 {
            for m in 0..12 {
                assert_eq!(a[(t, m)], a[(m, t)]);
                if t > 0 && m > 0 {
                    assert_eq!(a[(t, m)], a[(t - 1, m - 1)]);
                }
            }
        }
    }

    #[test]
    fn two_by_two_eigenpairs() {
        let basis = compute_dpss(&ProlateParams::new(2, 0.2, 2).unwrap()).unwrap();
        let off = (0.4 * PI).sin() / PI;
        assert!((basis.eigenvalues()[0] - (0.4 + off)).abs() < 1e-14);
        assert!((basis.eigenvalues()[1] - (0.4 - off)).abs() < 1e-14);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for (got, want) in basis.sequence(0).iter().zip([r, r]) {
            assert!((got - want).abs() < 1e-14);
        }
        for (got, want) in basis.sequence(1).iter().zip([r, -r]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn sign_rule() {
        let mut v = vec![0.1, -0.9, 0.3];
        apply_sign_convention(&mut v);
        assert_eq!(v, vec![-0.1, 0.9, -0.3]);
        // Tie between |v_0| and |v_2|: earliest index decides.
        let mut v = vec![-0.5, 0.2, 0.5];
        apply_sign_convention(&mut v);
        assert_eq!(v, vec![0.5, -0.2, -0.5]);
    }

    #[test]
    fn trace_of_square_matches_dense() {
        let a = build_concentration_matrix(&ProlateParams::new(20, 0.13, 1).unwrap());
        let d = a.to_dense();
        let mut fro = 0.0;
        for t in 0..20 {
            for m in 0..20 {
                fro += d[(t, m)] * d[(t, m)];
            }
        }
        assert!((a.trace_of_square() - fro).abs() < 1e-13);
    }

    #[test]
    fn eigenvalue_defect() {
        let p = ProlateParams::new(4, 0.25, 2).unwrap();
        let rows = vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 0.0]];
        let basis = ProlateBasis::from_parts(p, rows, vec![1.0, 1.0]).unwrap();
        assert_eq!(eigenvalue_sum_defect(&basis, 2).unwrap(), 0.0);
        assert!(eigenvalue_sum_defect(&basis, 0).is_err());
        assert!(eigenvalue_sum_defect(&basis, 3).is_err());
    }

    #[test]
    fn from_parts_checks_shapes() {
        let p = ProlateParams::new(4, 0.25, 2).unwrap();
        assert!(ProlateBasis::from_parts(p, vec![vec![0.0; 4]], vec![1.0, 1.0]).is_err());
        assert!(ProlateBasis::from_parts(p, vec![vec![0.0; 4], vec![0.0; 3]], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn full_sum_is_the_trace() {
        let basis = compute_dpss(&ProlateParams::new(256, 0.1, 256).unwrap()).unwrap();
        assert!((basis.full_eigenvalue_sum() - 51.2).abs() < 1e-12);
        let summed: f64 = basis.all_eigenvalues().unwrap().iter().sum();
        assert!((summed - 51.2).abs() / 51.2 < 1e-8);
    }
}
