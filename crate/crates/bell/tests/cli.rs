use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("bell").chain(args.iter().copied());
    let code = bell::cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "stderr: {err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn chsh_reports_tsirelson_violation() {
    let v = json(&["chsh", "--angles", "pi/4,0,pi/8,-pi/8"]);
    assert_eq!(v["command"], "chsh");
    assert!(v["seed"].is_null());
    let s = v["result"]["s_value"].as_f64().unwrap();
    assert!((s + 2.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
    assert_eq!(v["result"]["verdict"], "violates_bound");
}

#[test]
fn predict_matches_closed_form() {
    let v = json(&["predict", "--theta-l", "pi/8", "--theta-r", "0"]);
    let p = v["result"]["p_pp"].as_f64().unwrap();
    let want = (std::f64::consts::PI / 8.0).sin().powi(2) / 2.0;
    assert!((p - want).abs() < 1e-15);
}

#[test]
fn curve_csv_has_header_and_endpoints() {
    let (code, out, _) = run(&["curve", "--points", "3"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "delta,E");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("0.0,-1.0"));
}

#[test]
fn frames_reverse_order() {
    let v = json(&["frames", "--distance", "1", "--beta", "0.6"]);
    let r = &v["result"];
    assert_eq!(r["gamma"].as_f64(), Some(1.25));
    assert_eq!(r["time_gap"].as_f64(), Some(1.5));
    assert_eq!(r["order_a"], "right_first");
    assert_eq!(r["order_b"], "left_first");
    assert_eq!(r["order_source"], "simultaneous");
    assert!(r["detection_interval"].as_f64().unwrap() < 0.0);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["simulate", "--trials", "2"][..],
        &["simulate", "--bogus"],
        &["teleport"],
        &["chsh", "--format", "xml"],
        &["chsh", "--angles", "0,1,2"],
        &["frames", "--beta", "1.0"],
        &["check", "coincidence", "--model", "bohm"],
        &["estimate", "--records", "/nonexistent/trials.csv"],
    ] {
        let (code, _, err) = run(args);
        assert_eq!(code, 1, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("simulate"));
}

#[test]
fn unwritable_output_is_internal_error() {
    let (code, _, err) = run(&["chsh", "--output", "/nonexistent/dir/out.json"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn config_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(
        &cfg,
        "# experiment\ntrials = 4000\nseed = 9\nsource = bell_sign\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();

    let v = json(&["--config", cfg, "simulate"]);
    assert_eq!(v["seed"], 9);
    assert_eq!(v["inputs"]["trials"], 4000);
    assert_eq!(v["result"]["source"], "bell_sign");

    let v = json(&[
        "--config", cfg, "simulate", "--seed", "10", "--source", "qm",
    ]);
    assert_eq!(v["seed"], 10);
    assert_eq!(v["result"]["source"], "qm");
    assert_eq!(v["inputs"]["trials"], 4000);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("frames.json");
    let (code, out, _) = run(&[
        "frames",
        "--beta",
        "0.6",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let (_, direct, _) = run(&["frames", "--beta", "0.6"]);
    assert_eq!(std::fs::read_to_string(path).unwrap(), direct);
}

#[test]
fn export_then_estimate_reproduces_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let csv = csv.to_str().unwrap();
    let sim = json(&[
        "simulate",
        "--source",
        "qm_mimic_nonlocal",
        "--trials",
        "30001",
        "--seed",
        "5",
        "--export-trials",
        csv,
    ]);
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("trial,pair,out_l,out_r\n"));
    assert_eq!(text.lines().count(), 30002);
    let est = json(&[
        "estimate",
        "--records",
        csv,
        "--source",
        "qm_mimic_nonlocal",
        "--seed",
        "5",
    ]);
    assert_eq!(sim["result"], est["result"]);

    let bare = json(&["estimate", "--records", csv]);
    assert_eq!(bare["result"]["source"], "records");
    assert!(bare["result"]["seed"].is_null());
    assert_eq!(bare["result"]["chsh"], sim["result"]["chsh"]);
}

#[test]
fn summary_csv_lists_four_pairs() {
    let (code, out, _) = run(&["simulate", "--trials", "1000", "--format", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "pair,theta_l,theta_r,n,E,se");
    let pairs: Vec<&str> = lines[1..5]
        .iter()
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(pairs, ["ab", "abp", "apb", "apbp"]);
}

#[test]
fn enumerate_csv_has_sixteen_strategies_at_bound() {
    let (code, out, _) = run(&["lhv", "enumerate"]);
    assert_eq!(code, 0);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 16);
    let v = json(&["lhv", "enumerate", "--format", "json", "--mixtures", "500"]);
    assert!(v["result"]["mixtures"]["max_abs_s"].as_f64().unwrap() <= 2.0 + 1e-12);
}

#[test]
fn checks_report_expected_outcomes() {
    let v = json(&[
        "check",
        "coincidence",
        "--model",
        "bell_sign",
        "--samples",
        "20000",
    ]);
    assert_eq!(v["result"]["statistic"].as_f64(), Some(0.0));
    assert_eq!(v["result"]["passed"], true);

    let v = json(&[
        "check",
        "coincidence",
        "--model",
        "bell_sign_detector_noise",
        "--epsilon",
        "0.2",
        "--samples",
        "20000",
    ]);
    assert_eq!(v["result"]["passed"], false);
    assert!((v["result"]["statistic"].as_f64().unwrap() - 0.2).abs() < 0.01);

    let v = json(&[
        "check",
        "no-signaling",
        "--model",
        "qm_mimic_nonlocal",
        "--samples",
        "20000",
    ]);
    assert_eq!(v["result"]["passed"], true);
    let details = v["result"]["details"].to_string();
    assert!(details.contains("does not certify locality"), "{details}");

    let v = json(&["check", "velocity", "--skew", "0.5", "--samples", "5000"]);
    assert_eq!(v["result"]["passed"], false);
    let v = json(&["check", "velocity", "--samples", "5000"]);
    assert_eq!(v["result"]["passed"], true);
}

#[test]
fn binary_runs_are_byte_identical() {
    let bell = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_bell"))
            .args(args)
            .output()
            .unwrap()
    };
    let args = [
        "simulate",
        "--source",
        "bell_sign",
        "--trials",
        "20000",
        "--seed",
        "42",
    ];
    let (a, b) = (bell(&args), bell(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let bad = bell(&["simulate", "--trials", "3"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn thread_count_does_not_change_results() {
    let go = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run(&["simulate", "--trials", "50000", "--seed", "3"]).1)
    };
    let one = go(1);
    assert_eq!(one, go(4));
    assert_eq!(one, go(7));
}
