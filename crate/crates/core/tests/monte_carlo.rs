use mtlab::analysis::{bias_bound_report, smoothing_term, tradeoff_study, TradeoffConfig};
use mtlab::{FrequencyGrid, ProcessModel};

fn config(k_list: Vec<usize>, trials: usize, seed: u64) -> TradeoffConfig {
    TradeoffConfig {
        n: 256,
        w: 0.1,
        k_list,
        trials,
        seed,
        grid_points: 1024,
    }
}

#[test]
fn white_noise_estimate_is_unbiased() {
    // E[S_hat] = 1 exactly: the window integrates to one.
    let white = ProcessModel::white(1.0).unwrap();
    let report = &tradeoff_study(&white, &config(vec![51], 2000, 21)).unwrap()[0];
    assert!(report.mean_abs_bias() <= 3.0 * report.mean_standard_error());
    assert!(report.expected.iter().all(|e| (e - 1.0).abs() < 1e-12));
}

#[test]
fn peaked_model_separates_leakage_from_smoothing_bias() {
    let model = ProcessModel::peaked_ar2();
    let report = &tradeoff_study(&model, &config(vec![51], 2000, 22)).unwrap()[0];
    assert!(report.fraction_within(3.0) >= 0.99);
    // Against the true spectrum the bias near the peak is far outside the noise.
    let peak = (0..report.grid.len())
        .max_by(|&a, &b| report.true_spectrum[a].total_cmp(&report.true_spectrum[b]))
        .unwrap();
    assert!(report.pointwise_bias[peak].abs() > 10.0 * report.standard_errors[peak]);
    assert!(report.pointwise_bias[peak] < 0.0);
}

#[test]
fn identical_inputs_give_identical_reports() {
    let model = ProcessModel::peaked_ar2();
    let a = tradeoff_study(&model, &config(vec![3, 10], 150, 5)).unwrap();
    let b = tradeoff_study(&model, &config(vec![3, 10], 150, 5)).unwrap();
    assert_eq!(a, b);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let c = pool.install(|| tradeoff_study(&model, &config(vec![3, 10], 150, 5)).unwrap());
    assert_eq!(a, c);
}

#[test]
fn disjoint_seeds_agree_within_standard_errors() {
    let white = ProcessModel::white(1.0).unwrap();
    let a = &tradeoff_study(&white, &config(vec![10], 2000, 100)).unwrap()[0];
    let b = &tradeoff_study(&white, &config(vec![10], 2000, 200)).unwrap()[0];
    let combined = (a.mean_variance_se.powi(2) + b.mean_variance_se.powi(2)).sqrt();
    assert!((a.mean_variance - b.mean_variance).abs() <= 3.0 * combined);
    assert_ne!(a.mean, b.mean);
}

#[test]
fn mse_is_bias_squared_plus_variance() {
    for model in [ProcessModel::peaked_ar2(), "ma:0.5,0.25".parse().unwrap()] {
        for r in tradeoff_study(&model, &config(vec![1, 5, 51], 200, 9)).unwrap() {
            assert!((r.mse_summary - r.bias_variance_summary).abs() < 1e-10);
        }
    }
}

#[test]
fn variance_falls_like_one_over_k_on_white_noise() {
    let white = ProcessModel::white(1.0).unwrap();
    let reports = tradeoff_study(&white, &config(vec![5, 51], 2000, 23)).unwrap();
    let ratio = reports[0].mean_variance / reports[1].mean_variance;
    assert!((51.0 / 5.0 * 0.7..=51.0 / 5.0 * 1.3).contains(&ratio), "ratio {ratio}");
}

#[test]
fn leakage_gap_respects_young_bound() {
    for spec in ["white", "ar2-peaked", "ar:0.95", "ma:1,1,1"] {
        let model: ProcessModel = spec.parse().unwrap();
        for k in [2, 20, 51] {
            let r = &tradeoff_study(&model, &config(vec![k], 100, 1)).unwrap()[0];
            let b = bias_bound_report(r).unwrap();
            assert!(b.holds, "{spec}, K = {k}: {} > {}", b.leakage_gap, b.leakage_bound);
        }
    }
}

#[test]
fn smoothing_term_is_quadratic_in_w_for_a_broad_spectrum() {
    // ar:0.5 varies slowly, so the small-W expansion S'' W^2 / 6 applies.
    let model: ProcessModel = "ar:0.5".parse().unwrap();
    let grid = FrequencyGrid::new(16384).unwrap();
    let t: Vec<f64> = [0.0125, 0.025, 0.05]
        .iter()
        .map(|&w| smoothing_term(&model, w, &grid).unwrap())
        .collect();
    for pair in t.windows(2) {
        let r = pair[1] / pair[0];
        assert!((3.5..4.5).contains(&r), "ratio {r}");
    }
}
