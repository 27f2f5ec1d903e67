use std::path::PathBuf;
use std::process::{Command, Output};

use mtlab::table::{Format, Table};

fn mtlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtlab"))
        .args(args)
        .env_remove("MTLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout_table(out: &Output, format: Format) -> Table {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    Table::parse(std::str::from_utf8(&out.stdout).unwrap(), format).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mtlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn dpss_two_by_two() {
    let t = stdout_table(&mtlab(&["dpss", "--n", "2", "--w", "0.2", "--k", "2"]), Format::Csv);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    assert_eq!(t.columns, ["index", "eigenvalue", "t0", "t1"]);
    assert!((t.rows[0][2] - r).abs() < 1e-15 && (t.rows[0][3] - r).abs() < 1e-15);
    assert!((t.rows[1][2].abs() - r).abs() < 1e-15 && (t.rows[1][2] + t.rows[1][3]).abs() < 1e-15);
    assert_eq!(t.meta["sign_convention"], "max-abs-positive/v1");
}

#[test]
fn dpss_metadata_trace() {
    let t = stdout_table(&mtlab(&["dpss", "--n", "256", "--w", "0.1", "--k", "51"]), Format::Csv);
    assert_eq!(t.rows.len(), 51);
    assert_eq!(t.columns.len(), 2 + 256);
    let trace: f64 = t.meta["trace"].parse().unwrap();
    let sum: f64 = t.meta["eigenvalue_sum"].parse().unwrap();
    assert!((trace - 51.2).abs() < 1e-12);
    assert!((sum - 51.2).abs() < 1e-9);
}

#[test]
fn invalid_w_is_a_parameter_error() {
    let out = mtlab(&["dpss", "--n", "8", "--w", "0.6"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("0 < w < 1/2"));
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_arguments_exit_one() {
    assert_eq!(mtlab(&["dpss", "--n", "eight", "--w", "0.1"]).status.code(), Some(1));
    assert_eq!(mtlab(&["nonsense"]).status.code(), Some(1));
    assert_eq!(mtlab(&["tradeoff", "--n", "64", "--w", "0.1", "--k", "3", "--trials", "10"]).status.code(), Some(1));
    assert_eq!(mtlab(&["window", "--n", "64", "--w", "0.1", "--m", "64"]).status.code(), Some(1));
    assert_eq!(mtlab(&["dpss", "--n", "8", "--w", "0.1", "--threads", "0"]).status.code(), Some(1));
}

#[test]
fn io_failures_exit_two() {
    let out = mtlab(&["estimate", "--input", "/nonexistent/record.txt"]);
    assert_eq!(out.status.code(), Some(2));
    let out = mtlab(&["dpss", "--n", "4", "--w", "0.2", "--output", "/nonexistent/dir/out.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn window_integral_column_sums_to_one() {
    let t = stdout_table(
        &mtlab(&["window", "--n", "256", "--w", "0.1", "--k", "51", "--m", "16384"]),
        Format::Csv,
    );
    assert_eq!(t.columns, ["xi", "window", "ideal", "integral"]);
    assert_eq!(t.rows.len(), 16384);
    let total: f64 = t.column("integral").unwrap().iter().sum();
    assert!((total - 1.0).abs() < 1e-6);
}

#[test]
fn verify_sweep_passes() {
    let out = mtlab(&["verify", "--sweep", "64,128,256,512,1024", "--w", "0.1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.lines().all(|l| l.starts_with("PASS")));
    let t = stdout_table(&out, Format::Csv);
    let d = t.column("l1_distance").unwrap();
    assert!(d.windows(2).all(|p| p[1] < p[0]));
}

#[test]
fn verify_reports_failures_with_exit_three() {
    // A repeated n cannot be strictly decreasing.
    let out = mtlab(&["verify", "--sweep", "64,64", "--w", "0.1"]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.lines().any(|l| l.starts_with("FAIL  L1 distance strictly decreasing")));
    assert!(stderr.lines().any(|l| l.starts_with("PASS  trace identity")));
    assert!(!out.stdout.is_empty());
}

#[test]
fn tradeoff_variance_ratio_near_ten() {
    let t = stdout_table(
        &mtlab(&[
            "tradeoff", "--model", "white", "--n", "256", "--w", "0.1", "--k", "5,51", "--trials", "2000", "--seed", "7",
        ]),
        Format::Csv,
    );
    let ratio: f64 = t.meta["variance_ratio_k5_k51"].parse().unwrap();
    assert!((10.2 * 0.7..=10.2 * 1.3).contains(&ratio), "ratio {ratio}");
    assert_eq!(t.column("k").unwrap(), [5.0, 51.0]);
}

#[test]
fn estimate_from_file_and_model() {
    let path = scratch("record.csv");
    let values: Vec<String> = (0..64).map(|t| format!("{},{}", t, (0.8 * t as f64).cos())).collect();
    std::fs::write(&path, format!("# source=test\nt,x\n{}\n", values.join("\n"))).unwrap();
    let t = stdout_table(
        &mtlab(&["estimate", "--input", path.to_str().unwrap(), "--column", "x", "--w", "0.03"]),
        Format::Csv,
    );
    assert_eq!(t.rows.len(), 256);
    // cos(0.8 t) peaks at xi = 0.8 / 2 pi ~ 0.127
    let s = t.column("estimate").unwrap();
    let xi = t.column("xi").unwrap();
    let peak = (0..s.len()).max_by(|&a, &b| s[a].total_cmp(&s[b])).unwrap();
    assert!((xi[peak].abs() - 0.8 / (2.0 * std::f64::consts::PI)).abs() < 0.03);

    let t = stdout_table(
        &mtlab(&["estimate", "--model", "ar:0.5", "--n", "128", "--seed", "3", "--method", "periodogram"]),
        Format::Csv,
    );
    assert_eq!(t.columns, ["xi", "estimate", "true_spectrum"]);
    assert_eq!(t.meta["method"], "periodogram");
}

#[test]
fn csv_and_json_round_trip() {
    let args = ["window", "--n", "32", "--w", "0.15", "--m", "256"];
    let csv = stdout_table(&mtlab(&args), Format::Csv);
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let json = stdout_table(&mtlab(&json_args), Format::Json);
    assert_eq!(csv.columns, json.columns);
    assert_eq!(csv.meta, json.meta);
    for (a, b) in csv.rows.iter().zip(&json.rows) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }
    let path = scratch("window.json");
    let out = mtlab(&[&json_args[..], &["--output", path.to_str().unwrap()]].concat());
    assert!(out.status.success() && out.stdout.is_empty());
    let from_file = Table::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(from_file, json);
}

#[test]
fn thread_flag_and_environment_agree() {
    let args = ["tradeoff", "--model", "ar2-peaked", "--n", "64", "--w", "0.1", "--k", "2,12", "--trials", "200"];
    let one = mtlab(&[&args[..], &["--threads", "1"]].concat());
    let env = Command::new(env!("CARGO_BIN_EXE_mtlab"))
        .args(args)
        .env("MTLAB_THREADS", "3")
        .output()
        .unwrap();
    assert!(one.status.success() && env.status.success());
    assert_eq!(one.stdout, env.stdout);
}
