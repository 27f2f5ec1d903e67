//! Stationary Gaussian processes with known spectra.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::SampleRecord;
use crate::grid::FrequencyGrid;

/// Generator identification written into output metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng/rand_chacha-0.9 stream-per-trial; StandardNormal/rand_distr-0.5";

/// Minimum number of AR samples discarded before the record starts.
pub const MIN_BURN_IN: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    White,
    /// `x_t = sum_j a_j x_{t-j} + e_t`.
    Ar(Vec<f64>),
    /// `x_t = e_t + sum_j b_j e_{t-j}`.
    Ma(Vec<f64>),
}

/// A zero-mean stationary Gaussian process with Gaussian innovations of
/// variance `sigma2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessModel {
    kind: ProcessKind,
    sigma2: f64,
    description: String,
}

impl ProcessModel {
    pub fn white(sigma2: f64) -> Result<Self> {
        Self::build(ProcessKind::White, sigma2)
    }

    /// Autoregressive model; rejected unless all roots of
    /// `1 - sum_j a_j z^j` lie strictly outside the unit circle.
    pub fn ar(coefficients: Vec<f64>, sigma2: f64) -> Result<Self> {
        Self::build(ProcessKind::Ar(coefficients), sigma2)
    }

    pub fn ma(coefficients: Vec<f64>, sigma2: f64) -> Result<Self> {
        Self::build(ProcessKind::Ma(coefficients), sigma2)
    }

    /// The sharply peaked AR(2) benchmark, `a = (1.372, -0.7)`, unit innovations.
    pub fn peaked_ar2() -> Self {
        Self::ar(vec![1.372, -0.7], 1.0).expect("benchmark AR(2) is stationary")
    }

    fn build(kind: ProcessKind, sigma2: f64) -> Result<Self> {
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return Err(Error::InvalidModel(format!("innovation variance must be > 0, got {sigma2}")));
        }
        let coefficients = match &kind {
            ProcessKind::White => &[][..],
            ProcessKind::Ar(a) | ProcessKind::Ma(a) => &a[..],
        };
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidModel("coefficients must be finite".into()));
        }
        if let ProcessKind::Ar(a) = &kind {
            let radius = ar_spectral_radius(a)?;
            if radius >= 1.0 {
                return Err(Error::InvalidModel(format!(
                    "AR polynomial has a root on or inside the unit circle (inverse-root radius {radius})"
                )));
            }
        }
        let mut model = Self {
            kind,
            sigma2,
            description: String::new(),
        };
        model.description = model.to_string();
        Ok(model)
    }

    pub fn kind(&self) -> &ProcessKind {
        &self.kind
    }

    pub fn innovation_variance(&self) -> f64 {
        self.sigma2
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Power spectral density at frequency `xi`.
    pub fn spectral_density(&self, xi: f64) -> f64 {
        match &self.kind {
            ProcessKind::White => self.sigma2,
            ProcessKind::Ar(a) => self.sigma2 / transfer(a, -1.0, xi).norm_sqr(),
            ProcessKind::Ma(b) => self.sigma2 * transfer(b, 1.0, xi).norm_sqr(),
        }
    }

    /// Process variance `int_I S`.
    pub fn variance(&self) -> f64 {
        match &self.kind {
            ProcessKind::White => self.sigma2,
            ProcessKind::Ma(b) => self.sigma2 * (1.0 + b.iter().map(|c| c * c).sum::<f64>()),
            ProcessKind::Ar(_) => {
                let grid = FrequencyGrid::new(1 << 16).expect("valid grid size");
                grid.integrate(&true_spectrum(self, &grid))
            }
        }
    }

    /// Samples discarded before the record starts.
    pub fn burn_in(&self) -> usize {
        match &self.kind {
            ProcessKind::White => 0,
            ProcessKind::Ma(b) => b.len(),
            ProcessKind::Ar(a) if a.is_empty() => 0,
            ProcessKind::Ar(a) => {
                let radius = ar_spectral_radius(a).unwrap_or(0.0);
                let factor = (1.0 / (1.0 - radius)).ceil() as usize;
                MIN_BURN_IN.max(20 * a.len() * factor)
            }
        }
    }
}

/// `1 + sign * sum_j c_j exp(-2 pi i j xi)`, `j` from 1.
fn transfer(coefficients: &[f64], sign: f64, xi: f64) -> Complex64 {
    coefficients
        .iter()
        .enumerate()
        .fold(Complex64::new(1.0, 0.0), |acc, (j, &c)| {
            acc + Complex64::from_polar(sign * c, -2.0 * PI * (j + 1) as f64 * xi)
        })
}

/// Largest modulus among the inverse roots of `1 - sum_j a_j z^j`, i.e. the
/// spectral radius of the companion matrix.
pub fn ar_spectral_radius(a: &[f64]) -> Result<f64> {
    let p = a.len();
    if p == 0 {
        return Ok(0.0);
    }
    let companion = Mat::from_fn(p, p, |i, j| {
        if i == 0 {
            a[j]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let eigenvalues = companion
        .eigenvalues()
        .map_err(|_| Error::InvalidModel("companion eigenvalues did not converge".into()))?;
    Ok(eigenvalues
        .iter()
        .map(|z| z.re.hypot(z.im))
        .fold(0.0, f64::max))
}

/// True spectrum at every node of the grid.
pub fn true_spectrum(model: &ProcessModel, grid: &FrequencyGrid) -> Vec<f64> {
    grid.points().iter().map(|&xi| model.spectral_density(xi)).collect()
}

/// One record, stream 0 of `seed`.
pub fn generate(model: &ProcessModel, n: usize, seed: u64) -> Result<SampleRecord> {
    generate_stream(model, n, seed, 0)
}

/// One record from an independent ChaCha stream; `(seed, stream)` pairs
/// never share random numbers.
pub fn generate_stream(model: &ProcessModel, n: usize, seed: u64, stream: u64) -> Result<SampleRecord> {
    if n < 2 {
        return Err(crate::error::invalid("n", format!("need n >= 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let sigma = model.sigma2.sqrt();
    let burn_in = model.burn_in();
    let mut draw = || -> f64 {
        let z: f64 = StandardNormal.sample(&mut rng);
        sigma * z
    };
    let values = match &model.kind {
        ProcessKind::White => (0..n).map(|_| draw()).collect(),
        ProcessKind::Ma(b) => {
            let innovations: Vec<f64> = (0..n + burn_in).map(|_| draw()).collect();
            (burn_in..n + burn_in)
                .map(|t| {
                    innovations[t]
                        + b.iter().enumerate().map(|(j, c)| c * innovations[t - j - 1]).sum::<f64>()
                })
                .collect()
        }
        ProcessKind::Ar(a) => {
            let total = n + burn_in;
            let mut x = vec![0.0; total];
            for t in 0..total {
                let past: f64 = a
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| t > *j)
                    .map(|(j, c)| c * x[t - j - 1])
                    .sum();
                x[t] = past + draw();
            }
            x.split_off(burn_in)
        }
    };
    SampleRecord::new(values)
}

impl fmt::Display for ProcessModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |c: &[f64]| c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        match &self.kind {
            ProcessKind::White => write!(f, "white")?,
            ProcessKind::Ar(a) => write!(f, "ar:{}", list(a))?,
            ProcessKind::Ma(b) => write!(f, "ma:{}", list(b))?,
        }
        if self.sigma2 != 1.0 {
            write!(f, "@{}", self.sigma2)?;
        }
        Ok(())
    }
}

/// Parses `white`, `ar:a1,a2,...`, `ma:b1,...` with an optional
/// `@sigma2` suffix, or the alias `ar2-peaked`.
impl FromStr for ProcessModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "ar2-peaked" {
            return Ok(Self::peaked_ar2());
        }
        let (body, sigma2) = match s.split_once('@') {
            Some((body, v)) => (
                body,
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidModel(format!("bad innovation variance `{v}`")))?,
            ),
            None => (s, 1.0),
        };
        let (name, args) = body.split_once(':').unwrap_or((body, ""));
        let coefficients = || -> Result<Vec<f64>> {
            args.split(',')
                .filter(|a| !a.trim().is_empty())
                .map(|a| {
                    a.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidModel(format!("bad coefficient `{a}`")))
                })
                .collect()
        };
        match name.trim() {
            "white" => {
                if !args.trim().is_empty() {
                    return Err(Error::InvalidModel("white noise takes no coefficients".into()));
                }
                Self::white(sigma2)
            }
            "ar" => Self::ar(coefficients()?, sigma2),
            "ma" => Self::ma(coefficients()?, sigma2),
            other => Err(Error::InvalidModel(format!("unknown model `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn white_and_degenerate_ar_are_flat() {
        let grid = FrequencyGrid::new(32).unwrap();
        for model in [ProcessModel::white(1.0).unwrap(), ProcessModel::ar(vec![0.0], 1.0).unwrap()] {
            assert!(true_spectrum(&model, &grid).iter().all(|v| (v - 1.0).abs() < 1e-15));
        }
    }

    #[test]
    fn ar1_at_zero_frequency() {
        let model = ProcessModel::ar(vec![0.6], 2.0).unwrap();
        assert!((model.spectral_density(0.0) - 2.0 / (0.4f64 * 0.4)).abs() < 1e-12);
    }

    #[test]
    fn ma_spectrum() {
        let model = ProcessModel::ma(vec![0.5], 1.0).unwrap();
        assert!((model.spectral_density(0.0) - 2.25).abs() < 1e-12);
        assert!((model.spectral_density(0.5) - 0.25).abs() < 1e-12);
        assert!((model.variance() - 1.25).abs() < 1e-15);
    }

    #[test]
    fn ar_variance_matches_closed_form() {
        // AR(1): gamma(0) = sigma2 / (1 - a^2)
        let model = ProcessModel::ar(vec![0.9], 1.0).unwrap();
        assert!((model.variance() - 1.0 / (1.0 - 0.81)).abs() < 1e-10);
    }

    #[test]
    fn stationarity_check() {
        assert!(ProcessModel::ar(vec![1.0], 1.0).is_err());
        assert!(ProcessModel::ar(vec![0.5, 0.6], 1.0).is_err());
        assert!(ProcessModel::ar(vec![1.372, -0.7], 1.0).is_ok());
        assert!(ProcessModel::white(0.0).is_err());
        assert!(ProcessModel::white(-1.0).is_err());
        let r = ar_spectral_radius(&[1.372, -0.7]).unwrap();
        assert!((r - 0.7f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn burn_in_rule() {
        assert_eq!(ProcessModel::white(1.0).unwrap().burn_in(), 0);
        assert_eq!(ProcessModel::peaked_ar2().burn_in(), 1000);
        // radius 0.999 -> factor 1000 -> 20 * 1 * 1000
        assert_eq!(ProcessModel::ar(vec![0.999], 1.0).unwrap().burn_in(), 20_000);
    }

    #[test]
    fn parse_and_display() {
        let m: ProcessModel = "ar:1.372,-0.7".parse().unwrap();
        assert_eq!(m, ProcessModel::peaked_ar2());
        assert_eq!("ar2-peaked".parse::<ProcessModel>().unwrap(), m);
        let w: ProcessModel = "white@2.5".parse().unwrap();
        assert_eq!(w.innovation_variance(), 2.5);
        assert_eq!(w.to_string(), "white@2.5");
        let ma: ProcessModel = "ma:0.5, 0.25".parse().unwrap();
        assert_eq!(ma.to_string().parse::<ProcessModel>().unwrap(), ma);
        assert!("ar:1.1".parse::<ProcessModel>().is_err());
        assert!("pink".parse::<ProcessModel>().is_err());
        assert!("white:3".parse::<ProcessModel>().is_err());
        assert!("ar:x".parse::<ProcessModel>().is_err());
    }

    #[test]
    fn generation_is_deterministic() {
        let m = ProcessModel::peaked_ar2();
        let a = generate(&m, 100, 42).unwrap();
        let b = generate(&m, 100, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate(&m, 100, 43).unwrap());
        assert_ne!(a, generate_stream(&m, 100, 42, 1).unwrap());
    }

    #[test]
    fn rejects_short_records() {
        assert!(generate(&ProcessModel::white(1.0).unwrap(), 1, 0).is_err());
    }
}
