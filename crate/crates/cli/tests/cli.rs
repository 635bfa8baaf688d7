use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn ves(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ves"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// Header and first data row of a CSV file, keyed by column.
fn first_row(path: &Path) -> Vec<(String, String)> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    let row: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    header.into_iter().zip(row).collect()
}

fn field(row: &[(String, String)], key: &str) -> f64 {
    row.iter()
        .find(|(k, _)| k == key)
        .unwrap()
        .1
        .parse()
        .unwrap()
}

fn run_with(text: &str, args: &[&str]) -> (TempDir, Output) {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "scenario.toml", text);
    let mut all = args.to_vec();
    let cfg_str = cfg.to_str().unwrap().to_string();
    all.extend(["--config", &cfg_str, "--out", "out"]);
    let o = ves(tmp.path(), &all);
    (tmp, o)
}

#[test]
fn baseline_reports_reference_plant() {
    let tmp = TempDir::new().unwrap();
    let o = ves(tmp.path(), &["baseline", "--out", "out"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("baseline power        11165.68"), "{text}");
    assert!(text.contains("a = 6421.543"), "{text}");
    assert!(text.contains("b = 0.000000  c = 0.000000"), "{text}");
    let row = first_row(&tmp.path().join("out/baseline.csv"));
    assert!((field(&row, "p_hvac_b_w") - 11165.68).abs() < 0.01);
    assert_eq!(field(&row, "b"), 0.0);
}

#[test]
fn baseline_without_airflow_or_heat_gain_is_a_config_error() {
    let (_tmp, o) = run_with("[ambient]\nt_oa_f = 80.0\n", &["baseline"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("m_a_b"), "{}", stderr(&o));
}

#[test]
fn unknown_keys_report_their_line() {
    let (_tmp, o) = run_with("[schedule]\nt_p = 600.0\nperiod = 3\n", &["rte"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("period") && err.contains("line 3"), "{err}");
}

#[test]
fn rte_above_critical_half_period_discharges_past_unity() {
    let (tmp, o) = run_with(
        "[schedule]\ndelta_p_fraction = 0.2\nt_p = 1444.05\nn = 1\nphase = \"down-up\"\n",
        &["rte"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let row = first_row(&tmp.path().join("out/rte.csv"));
    assert!(field(&row, "eta_rt") > 1.0);
    assert!((field(&row, "delta_p_w") - 2233.137).abs() < 1e-3);
    let trace = std::fs::read_to_string(tmp.path().join("out/trace.csv")).unwrap();
    assert!(trace.starts_with("t_s,t_zone_k,t_wall_k,w_zone,m_a_kg_s,p_hvac_w,p_tilde_w,soc\n"));
    assert!(trace.lines().count() > 10);
}

#[test]
fn many_cycles_approach_unity() {
    let (tmp, o) = run_with(
        "[schedule]\ndelta_p_fraction = 0.2\nt_p = 1800.0\nn = 100\n",
        &["rte"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let eta = field(&first_row(&tmp.path().join("out/rte.csv")), "eta_rt");
    assert!((eta - 1.0).abs() < 0.05, "{eta}");
}

#[test]
fn infeasible_amplitude_is_a_model_error() {
    let (_tmp, o) = run_with("[schedule]\ndelta_p_fraction = 1.5\n", &["rte"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn amplitude_given_twice_is_a_config_error() {
    let (_tmp, o) = run_with(
        "[schedule]\ndelta_p = 2000.0\ndelta_p_fraction = 0.2\n",
        &["rte"],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn default_sweep_crosses_unity_near_twelve_minutes() {
    let tmp = TempDir::new().unwrap();
    let o = ves(tmp.path(), &["sweep", "--out", "out"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let line = stdout(&o)
        .lines()
        .find(|l| l.starts_with("eta_rt crosses 1"))
        .map(String::from)
        .expect("crossing reported");
    let nums: Vec<f64> = line
        .split_whitespace()
        .filter_map(|w| w.parse().ok())
        .collect();
    let (lo, hi) = (nums[nums.len() - 2], nums[nums.len() - 1]);
    assert!(lo > 600.0 && hi < 900.0, "{line}");
    let csv = std::fs::read_to_string(tmp.path().join("out/curve.csv")).unwrap();
    assert_eq!(csv.lines().count(), 61);
    assert!(csv.starts_with("t_p_s,eta_rt,"));
    let svg = std::fs::read_to_string(tmp.path().join("out/curve.svg")).unwrap();
    assert!(
        svg.contains("<svg") && svg.contains(">eta_rt</text>") && svg.contains(">t_p_s</text>")
    );
    assert!(svg.contains("stroke-dasharray"));
}

#[test]
fn sweep_output_is_byte_identical_across_runs() {
    let cfg = "[hvac]\nr_oa = 0.5\n[sweep]\nvariable = \"t_p\"\ngrid = [300.0, 900.0, 1500.0]\n";
    let (a, oa) = run_with(cfg, &["sweep"]);
    let (b, ob) = run_with(cfg, &["sweep"]);
    assert!(oa.status.success() && ob.status.success());
    for f in ["out/curve.csv", "out/curve.svg"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn empty_grid_is_rejected() {
    let (_tmp, o) = run_with("[sweep]\nvariable = \"t_p\"\ngrid = []\n", &["sweep"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("empty"));
}

#[test]
fn extended_cycle_sweep_moves_toward_unity() {
    let cfg =
        "model = \"extended\"\n[schedule]\ndelta_p = 4500.0\nt_p = 1800.0\nphase = \"up-down\"\n\
               [sweep]\nvariable = \"n\"\ngrid = [1.0, 10.0, 30.0]\n";
    let (tmp, o) = run_with(cfg, &["sweep"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(tmp.path().join("out/curve.csv")).unwrap();
    let etas: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!((etas[2] - 1.0).abs() < (etas[0] - 1.0).abs());
    assert!((etas[2] - 1.0).abs() < 0.05);
}

#[test]
fn extended_run_writes_full_trace() {
    let tmp = TempDir::new().unwrap();
    let weather = tmp.path().join("wx.csv");
    let mut text = String::from("time_s,t_oa_f,w_oa\n");
    for h in 0..=24 {
        text.push_str(&format!("{},{},0.010\n", h * 3600, 75 + (h % 12)));
    }
    std::fs::write(&weather, text).unwrap();
    let cfg = write_config(
        tmp.path(),
        "s.toml",
        "[schedule]\ndelta_p = 3000.0\nt_p = 1800.0\nn = 2\n[weather]\nkind = \"csv\"\npath = \"wx.csv\"\n",
    );
    let o = ves(
        tmp.path(),
        &[
            "extended",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            "out",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let trace = std::fs::read_to_string(tmp.path().join("out/trace.csv")).unwrap();
    let second = trace.lines().nth(1).unwrap();
    assert_eq!(
        second.split(',').filter(|f| f.is_empty()).count(),
        0,
        "{second}"
    );
}

#[test]
fn extended_half_period_must_align_with_step() {
    let (_tmp, o) = run_with(
        "[schedule]\ndelta_p = 3000.0\nt_p = 1805.0\n",
        &["extended", "--dt", "10"],
    );
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let (_tmp, o) = run_with("[schedule]\ndelta_p = 3000.0\n", &["extended", "--dt", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_passes_and_catches_injected_fault() {
    let tmp = TempDir::new().unwrap();
    let ok = ves(tmp.path(), &["verify", "--seed", "11"]);
    assert!(ok.status.success(), "{}", stdout(&ok));
    let text = stdout(&ok);
    assert!(text.starts_with("seed = 11\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 14);

    let bad = ves(tmp.path(), &["verify", "--inject-fault", "negate-a"]);
    assert_eq!(bad.status.code(), Some(4));
    assert!(stdout(&bad)
        .lines()
        .any(|l| l.starts_with("FAIL a-positive")));
    assert!(stderr(&bad).contains("a-positive"));
}
