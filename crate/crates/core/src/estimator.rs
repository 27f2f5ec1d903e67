//! Periodogram, single-taper and multitaper power spectrum estimates.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fourier::{periodic_convolution, GridTransform};
use crate::grid::FrequencyGrid;
use crate::prolate::ProlateBasis;
use crate::window::SpectralWindow;

/// Tolerance on `||taper||_2 = 1`.
pub const TAPER_NORM_TOLERANCE: f64 = 1e-10;

/// A finite real sample record `x(0), ..., x(n-1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    values: Vec<f64>,
}

impl SampleRecord {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(invalid("record", format!("need n >= 2 samples, got {}", values.len())));
        }
        if let Some(t) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid("record", format!("sample {t} is not finite")));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    Periodogram,
    Tapered { index: Option<usize> },
    Multitaper { big_k: usize },
}

impl std::fmt::Display for EstimateMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Periodogram => write!(f, "periodogram"),
            Self::Tapered { index: Some(j) } => write!(f, "tapered(dpss {j})"),
            Self::Tapered { index: None } => write!(f, "tapered"),
            Self::Multitaper { big_k } => write!(f, "multitaper(K={big_k})"),
        }
    }
}

/// A power spectrum estimate on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimate {
    pub grid: FrequencyGrid,
    pub values: Vec<f64>,
    pub method: EstimateMethod,
    pub n: usize,
    pub w: Option<f64>,
}

/// `(1/n) |sum_t x(t) exp(-2 pi i xi t)|^2`.
pub fn periodogram(record: &SampleRecord, grid: &FrequencyGrid) -> Result<SpectrumEstimate> {
    let n = record.len();
    let scale = 1.0 / n as f64;
    let values = GridTransform::new(grid)
        .power(record.values())?
        .into_iter()
        .map(|p| p * scale)
        .collect();
    Ok(SpectrumEstimate {
        grid: grid.clone(),
        values,
        method: EstimateMethod::Periodogram,
        n,
        w: None,
    })
}

/// `|sum_t x(t) D_t exp(-2 pi i xi t)|^2` for an l2-normalized taper `D`.
pub fn tapered_periodogram(
    record: &SampleRecord,
    taper: &[f64],
    grid: &FrequencyGrid,
) -> Result<SpectrumEstimate> {
    check_taper(record, taper)?;
    let tapered: Vec<f64> = record.values().iter().zip(taper).map(|(x, d)| x * d).collect();
    Ok(SpectrumEstimate {
        grid: grid.clone(),
        values: GridTransform::new(grid).power(&tapered)?,
        method: EstimateMethod::Tapered { index: None },
        n: record.len(),
        w: None,
    })
}

fn check_taper(record: &SampleRecord, taper: &[f64]) -> Result<()> {
    if taper.len() != record.len() {
        return Err(Error::DimensionMismatch {
            what: "taper length",
            expected: record.len(),
            found: taper.len(),
        });
    }
    let norm = taper.iter().map(|d| d * d).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > TAPER_NORM_TOLERANCE {
        return Err(invalid("taper", format!("taper must have unit l2 norm, got {norm}")));
    }
    Ok(())
}

/// Average of the first `big_k` DPSS-tapered periodograms.
pub fn multitaper(
    record: &SampleRecord,
    basis: &ProlateBasis,
    big_k: usize,
    grid: &FrequencyGrid,
) -> Result<SpectrumEstimate> {
    let mut workspace = MultitaperWorkspace::new(basis, grid)?;
    let mut values = vec![0.0; grid.len()];
    workspace.estimate_into(record, big_k, &mut values)?;
    Ok(SpectrumEstimate {
        grid: grid.clone(),
        values,
        method: EstimateMethod::Multitaper { big_k },
        n: record.len(),
        w: Some(basis.params().w()),
    })
}

/// Reusable buffers for evaluating many multitaper estimates with one basis.
#[derive(Debug)]
pub struct MultitaperWorkspace<'a> {
    basis: &'a ProlateBasis,
    transform: GridTransform,
    tapered: Vec<f64>,
    spectrum: Vec<Complex64>,
}

impl<'a> MultitaperWorkspace<'a> {
    pub fn new(basis: &'a ProlateBasis, grid: &FrequencyGrid) -> Result<Self> {
        grid.require(basis.params().n())?;
        Ok(Self {
            basis,
            transform: GridTransform::new(grid),
            tapered: vec![0.0; basis.params().n()],
            spectrum: vec![Complex64::new(0.0, 0.0); grid.len()],
        })
    }

    fn check(&self, record: &SampleRecord, big_k: usize) -> Result<()> {
        if record.len() != self.basis.params().n() {
            return Err(Error::DimensionMismatch {
                what: "record length",
                expected: self.basis.params().n(),
                found: record.len(),
            });
        }
        if big_k == 0 || big_k > self.basis.len() {
            return Err(invalid(
                "big_k",
                format!("need 1 <= K <= {}, got {big_k}", self.basis.len()),
            ));
        }
        Ok(())
    }

    /// Tapered periodogram with DPSS `j` into `out`.
    pub fn tapered_into(&mut self, record: &SampleRecord, j: usize, out: &mut [f64]) -> Result<()> {
        self.check(record, j + 1)?;
        for ((t, x), d) in self.tapered.iter_mut().zip(record.values()).zip(self.basis.sequence(j)) {
            *t = x * d;
        }
        self.transform.eval_into(&self.tapered, &mut self.spectrum)?;
        for (o, z) in out.iter_mut().zip(&self.spectrum) {
            *o = z.norm_sqr();
        }
        Ok(())
    }

    /// Multitaper estimate with `big_k` tapers into `out`.
    pub fn estimate_into(&mut self, record: &SampleRecord, big_k: usize, out: &mut [f64]) -> Result<()> {
        self.check(record, big_k)?;
        out.iter_mut().for_each(|o| *o = 0.0);
        for j in 0..big_k {
            for ((t, x), d) in self.tapered.iter_mut().zip(record.values()).zip(self.basis.sequence(j)) {
                *t = x * d;
            }
            self.transform.eval_into(&self.tapered, &mut self.spectrum)?;
            for (o, z) in out.iter_mut().zip(&self.spectrum) {
                *o += z.norm_sqr();
            }
        }
        let scale = 1.0 / big_k as f64;
        out.iter_mut().for_each(|o| *o *= scale);
        Ok(())
    }
}

/// `S * (rho_K / K)`: the exact expectation of the multitaper estimate for a
/// process with spectrum `S`.
pub fn expected_spectrum(true_spectrum: &[f64], window: &SpectralWindow) -> Result<Vec<f64>> {
    periodic_convolution(window.grid(), true_spectrum, window.values())
}
