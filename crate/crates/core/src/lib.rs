//! Thomson multitaper spectral estimation built on discrete prolate
//! spheroidal sequences, with tools to measure how far the multitaper
//! spectral window is from the ideal band-limited kernel.
//!
//! ```
//! use mtlab::{compute_dpss, multitaper, generate, FrequencyGrid, ProcessModel, ProlateParams};
//!
//! let params = ProlateParams::new(64, 0.1, 12).unwrap();
//! let basis = compute_dpss(&params).unwrap();
//! let record = generate(&ProcessModel::white(1.0).unwrap(), 64, 7).unwrap();
//! let grid = FrequencyGrid::new(256).unwrap();
//! let estimate = multitaper(&record, &basis, 12, &grid).unwrap();
//! assert!(estimate.values.iter().all(|v| *v >= 0.0));
//! ```

pub mod analysis;
pub mod error;
pub mod estimator;
pub mod fourier;
pub mod grid;
pub mod prolate;
pub mod synth;
pub mod table;
pub mod window;

pub use analysis::{
    bias_bound_report, theorem_sweep, tradeoff_study, BiasBoundReport, Check, SweepResult, SweepRow,
    TradeoffConfig, TradeoffReport,
};
pub use error::{Error, Result};
pub use estimator::{
    expected_spectrum, multitaper, periodogram, tapered_periodogram, EstimateMethod, MultitaperWorkspace,
    SampleRecord, SpectrumEstimate,
};
pub use grid::{FrequencyGrid, IntervalRule};
pub use prolate::{
    build_concentration_matrix, compute_dpss, compute_dpss_with, DpssMethod, ProlateBasis, ProlateParams,
    ToeplitzMatrix,
};
pub use synth::{generate, generate_stream, true_spectrum, ProcessModel};
pub use table::{Format, Table};
pub use window::{
    evaluate_slepians, fejer_defect, l1_distance_to_ideal, spectral_window, split_leakage,
    verify_integral_equation, SpectralWindow, SplitLeakage,
};
