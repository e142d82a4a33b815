use std::path::PathBuf;
use std::process::{Command, Output};

fn nclass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nclass"))
        .args(args)
        .output()
        .unwrap()
}

fn nclass_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nclass"))
        .args(args)
        .env(key, value)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// `key=value` pairs of the trailing `#` line.
fn summary(csv: &str) -> Vec<(String, String)> {
    let line = csv.lines().last().unwrap();
    assert!(line.starts_with("# "), "no summary line in {csv}");
    line[2..]
        .split(' ')
        .map(|kv| {
            let (k, v) = kv.split_once('=').unwrap();
            (k.to_string(), v.to_string())
        })
        .collect()
}

fn lookup<'a>(pairs: &'a [(String, String)], key: &str) -> &'a str {
    &pairs
        .iter()
        .find(|(k, _)| k == key)
        .unwrap_or_else(|| panic!("missing {key}"))
        .1
}

fn state_value(csv: &str, key: &str) -> String {
    csv.lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")))
        .unwrap_or_else(|| panic!("missing {key}"))
        .to_string()
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("nclass-test-{}-{name}", std::process::id()))
}

#[test]
fn fock_one_crossing_at_two() {
    let out = stdout(&nclass(&[
        "witness-scan",
        "--state",
        "fock:1",
        "--dim",
        "16",
        "--w-min",
        "0.5",
        "--w-max",
        "4",
    ]));
    assert!(out.starts_with("w,value,truncation_bound,certified\n"));
    let s = summary(&out);
    assert_eq!(lookup(&s, "detected"), "true");
    let w_star: f64 = lookup(&s, "w_star").parse().unwrap();
    assert!((w_star - 2.0).abs() < 1e-3);
}

#[test]
fn thermal_scan_detects_nothing() {
    let out = stdout(&nclass(&[
        "witness-scan",
        "--state",
        "thermal:1.0",
        "--w-min",
        "0.5",
        "--w-max",
        "6",
    ]));
    let s = summary(&out);
    assert_eq!(lookup(&s, "detected"), "false");
    assert_eq!(lookup(&s, "w_star"), "none");
}

#[test]
fn spats_scan_detects() {
    let out = stdout(&nclass(&[
        "witness-scan",
        "--state",
        "spats:0.8,0.5",
        "--dim",
        "128",
        "--w-min",
        "0.5",
        "--w-max",
        "6",
    ]));
    assert_eq!(lookup(&summary(&out), "detected"), "true");
}

#[test]
fn state_info_of_fock_one() {
    let out = stdout(&nclass(&[
        "state-info",
        "--state",
        "fock:1",
        "--dim",
        "12",
        "--grid",
        "5",
    ]));
    let q: f64 = state_value(&out, "mandel_q").parse().unwrap();
    assert!((q + 1.0).abs() < 1e-12);
    let wmin: f64 = state_value(&out, "wigner_min").parse().unwrap();
    assert!((wmin + 2.0 / std::f64::consts::PI).abs() < 1e-8);
}

#[test]
fn state_info_of_spats_is_blind() {
    let out = stdout(&nclass(&[
        "state-info",
        "--state",
        "spats:0.8,0.5",
        "--grid",
        "7",
    ]));
    assert!(state_value(&out, "mandel_q").parse::<f64>().unwrap() >= 0.0);
    assert!(
        state_value(&out, "quadrature_variance_min")
            .parse::<f64>()
            .unwrap()
            >= 1.0
    );
    assert!(state_value(&out, "char_max_modulus").parse::<f64>().unwrap() <= 1.0 + 1e-9);
    assert_eq!(state_value(&out, "first_order_witnessed"), "false");
    assert!(state_value(&out, "wigner_min").parse::<f64>().unwrap() >= -1e-6);
}

#[test]
fn vacuum_mandel_q_is_undefined() {
    let out = stdout(&nclass(&[
        "state-info",
        "--state",
        "vacuum",
        "--dim",
        "8",
        "--grid",
        "3",
    ]));
    assert_eq!(state_value(&out, "mandel_q"), "undefined");
}

#[test]
fn nfp_grids() {
    let vac = stdout(&nclass(&[
        "nfp-grid", "--state", "vacuum", "--dim", "8", "--w", "1", "--grid", "5",
    ]));
    assert!(vac.starts_with("re_alpha,im_alpha,value\n"));
    assert_eq!(vac.lines().filter(|l| !l.starts_with('#')).count(), 26);
    let min: f64 = lookup(&summary(&vac), "min").parse().unwrap();
    assert!(min >= -1e-7);

    let fock = stdout(&nclass(&[
        "nfp-grid", "--state", "fock:1", "--dim", "8", "--w", "3", "--grid", "5",
    ]));
    let s = summary(&fock);
    assert!(lookup(&s, "min").parse::<f64>().unwrap() < 0.0);
    assert_eq!(lookup(&s, "argmin_re").parse::<f64>().unwrap(), 0.0);
    assert_eq!(lookup(&s, "argmin_im").parse::<f64>().unwrap(), 0.0);
}

#[test]
fn fig2_series() {
    let out = stdout(&nclass(&["fig2", "--dim", "128", "--w-step", "0.25"]));
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "w,nbar_0.8,nbar_1,nbar_1.2");
    let first: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(first[0], 0.5);
    assert!(first[1..].iter().all(|v| *v > 0.0));
    let s = summary(&out);
    for label in ["nbar_0.8", "nbar_1", "nbar_1.2"] {
        assert_eq!(lookup(&s, &format!("{label}_detected")), "true");
    }
}

#[test]
fn verify_filter_rows() {
    let out = stdout(&nclass(&["verify-filter", "--widths", "1,2"]));
    assert_eq!(out.lines().filter(|l| !l.starts_with('#')).count(), 3);
    assert_eq!(lookup(&summary(&out), "all_pass"), "true");
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = [
        "nfp-grid",
        "--state",
        "spats:0.8,0.5",
        "--dim",
        "64",
        "--w",
        "4",
        "--grid",
        "4",
    ];
    let one = stdout(&nclass_env(&args, "NCLASS_THREADS", "1"));
    let four = stdout(&nclass_env(&args, "NCLASS_THREADS", "4"));
    let default = stdout(&nclass(&args));
    assert_eq!(one, four);
    assert_eq!(one, default);
}

#[test]
fn out_file_matches_stdout() {
    let path = temp_path("scan.csv");
    let args = [
        "witness-scan",
        "--state",
        "coherent:0.5,0.5",
        "--dim",
        "32",
        "--w-max",
        "3",
    ];
    let printed = stdout(&nclass(&args));
    let mut with_out = args.to_vec();
    let p = path.to_str().unwrap();
    with_out.extend(["--out", p]);
    let o = nclass(&with_out);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), printed);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn json_envelope() {
    let out = stdout(&nclass(&[
        "witness-scan",
        "--state",
        "fock:2",
        "--dim",
        "16",
        "--w-max",
        "3",
        "--format",
        "json",
    ]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["tool"], "nclass");
    assert_eq!(v["command"], "witness-scan");
    assert_eq!(v["config"]["dim"], 16);
    assert_eq!(v["columns"][0], "w");
    assert!(v["rows"].as_array().unwrap().len() > 10);
    assert!(v["summary"]["detected"].is_boolean());
}

#[test]
fn config_file_and_flag_override() {
    let path = temp_path("run.cfg");
    std::fs::write(
        &path,
        "# scan of one photon\nstate = fock:1\ndim = 16\nw_min = 1.5\nw_max = 2.5\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let from_file = stdout(&nclass(&["witness-scan", "--config", p]));
    assert!(from_file.lines().nth(1).unwrap().starts_with("1.50000000000e0,"));
    let overridden = stdout(&nclass(&["witness-scan", "--config", p, "--w-min", "1.0"]));
    assert!(overridden.lines().nth(1).unwrap().starts_with("1.00000000000e0,"));
    std::fs::remove_file(path).unwrap();
}

#[test]
fn config_errors_name_line_and_field() {
    let path = temp_path("bad.cfg");
    std::fs::write(&path, "state = fock:1\n\nw_step = fast\n").unwrap();
    let o = nclass(&["witness-scan", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains(":3") && err.contains("w_step"), "{err}");
    std::fs::remove_file(path).unwrap();
}

#[test]
fn configuration_errors_exit_with_two() {
    for args in [
        &["witness-scan"][..],
        &["witness-scan", "--state", "squeezed:1"],
        &[
            "witness-scan",
            "--state",
            "fock:1",
            "--w-min",
            "3",
            "--w-max",
            "1",
        ],
        &["witness-scan", "--state", "fock:1", "--format", "xml"],
        &["nfp-grid", "--state", "vacuum", "--grid", "0"],
        &["verify-filter", "--filter", "square"],
    ] {
        assert_eq!(nclass(args).status.code(), Some(2), "{args:?}");
    }
    let o = nclass_env(&["witness-scan", "--state", "fock:1"], "NCLASS_THREADS", "zero");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("NCLASS_THREADS"));
}

#[test]
fn truncation_rejection_exits_with_three() {
    let o = nclass(&["state-info", "--state", "coherent:4,0", "--dim", "10"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("truncation"));
    assert!(o.stdout.is_empty());
}
