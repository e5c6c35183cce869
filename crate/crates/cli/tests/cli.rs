use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qklyst"));
    cmd.env_remove("QKLYST_CONFIG");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn qklyst")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn gain_curve_default_grid() {
    let o = run(&["gain-curve"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("gamma,g\n"));
    assert!(!text.contains('\r'));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 2000);
    assert!((rows[1999][0] - 4.0 * PI).abs() < 1e-12);
    // Largest row within the first period sits on the 4.09 peak.
    let first_period = rows
        .iter()
        .filter(|r| r[0] <= 2.0 * PI)
        .max_by(|a, b| a[1].total_cmp(&b[1]))
        .unwrap();
    assert!((first_period[0] - 4.0935).abs() < 2.0 * PI / 1000.0);
    assert!((first_period[1] - 0.843).abs() < 1e-3);
}

#[test]
fn gain_curve_json_and_usage_errors() {
    let v = json(&run(&[
        "gain-curve",
        "--gamma-min",
        "1",
        "--gamma-max",
        "2",
        "--steps",
        "4",
        "--out",
        "json",
    ]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    assert_eq!(v["rows"][3]["gamma"], 2.0);
    assert_eq!(run(&["gain-curve", "--steps", "1"]).status.code(), Some(2));
    assert_eq!(
        run(&["gain-curve", "--gamma-min", "3", "--gamma-max", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["gain-curve", "--out", "xml"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("curve.csv");
    let o = run(&["gain-curve", "-o", target.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot write"));
}

#[test]
fn design_one_gigahertz() {
    let v = json(&run(&["design", "--frequency", "1e9", "--gap-width", "1e-3"]));
    let u0 = v["U0_volts"].as_f64().unwrap();
    let beta = v["v_over_c"].as_f64().unwrap();
    assert!((u0 - 1.72).abs() / 1.72 < 0.03);
    assert!((beta - 2.56e-3).abs() / 2.56e-3 < 0.01);
    for key in ["gamma_star", "g_star", "v_m_per_s", "alpha", "warnings"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn design_relativity_guard() {
    let o = run(&["design", "--frequency", "1e12", "--gap-width", "10"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(
        run(&["design", "--frequency", "-1", "--gap-width", "1e-3"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn design_with_explicit_gamma_warns_when_mildly_relativistic() {
    let v = json(&run(&[
        "design",
        "--frequency",
        "1e10",
        "--gap-width",
        "1.3e-3",
        "--gamma",
        "4.0",
    ]));
    assert!(v["v_over_c"].as_f64().unwrap() > 0.01);
    assert_eq!(v["warnings"].as_array().unwrap().len(), 1);
}

#[test]
fn rates_reference_config_matches_fixture() {
    let o = run(&["rates", "--config", fixture("reference.conf").to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("axis,stimulated,spontaneous,total\n"));
    let expected = csv_rows(&std::fs::read_to_string(fixture("reference_rates.csv")).unwrap());
    let got = csv_rows(&text);
    assert_eq!(got.len(), expected.len());
    for (g, e) in got[0].iter().zip(&expected[0]) {
        assert!(((g - e) / e).abs() < 1e-12, "{g} vs {e}");
    }
}

#[test]
fn rates_without_photons_has_no_stimulated_output() {
    let o = run(&[
        "rates",
        "--config",
        fixture("reference.conf").to_str().unwrap(),
        "--sweep-axis",
        "v",
        "--sweep-start",
        "5e5",
        "--sweep-stop",
        "9e5",
        "--sweep-steps",
        "5",
        "--photons",
        "0",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 5);
    for r in rows {
        assert_eq!(r[1], 0.0);
        assert!(((r[3] - (r[1] + r[2])) / r[3]).abs() < 1e-12);
    }
}

#[test]
fn rates_sweep_identity_in_every_row() {
    let v = json(&run(&[
        "rates",
        "--config",
        fixture("reference.conf").to_str().unwrap(),
        "--sweep-axis",
        "omega",
        "--sweep-start",
        "1e9",
        "--sweep-stop",
        "2e10",
        "--sweep-steps",
        "7",
        "--out",
        "json",
    ]));
    assert_eq!(v["axis"], "omega");
    assert_eq!(v["axis_unit"], "rad/s");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    for r in rows {
        let s = r["stimulated_per_s"].as_f64().unwrap();
        let p = r["spontaneous_per_s"].as_f64().unwrap();
        let t = r["total_per_s"].as_f64().unwrap();
        assert!(((t - (s + p)) / t).abs() < 1e-12);
    }
}

#[test]
fn rates_config_from_environment_and_flag_override() {
    let o = bin()
        .env("QKLYST_CONFIG", fixture("reference.conf"))
        .args(["rates", "--photons", "0", "--out", "json"])
        .output()
        .unwrap();
    let v = json(&o);
    assert_eq!(v["rows"][0]["stimulated_per_s"], 0.0);
    // Without a config most parameters are missing.
    let o = run(&["rates", "--omega", "1e9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("beam.velocity"));
}

#[test]
fn rates_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let base = std::fs::read_to_string(fixture("reference.conf")).unwrap();
    let cases = [
        (
            base.replace("volume = 1e-6 m^3", "volume = 1e-6 m^3\ncolour = 3 m"),
            "device.colour",
        ),
        (
            base.replace("gap_width = 1.0e-3 m", "gap_width = 1.0e-3"),
            "missing unit",
        ),
        (
            base.replace(
                "velocity = 7.674640624710513e5 m/s",
                "velocity = 7.674640624710513e5 km/s",
            ),
            "m/s",
        ),
    ];
    for (i, (text, needle)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("bad{i}.conf"));
        std::fs::write(&path, text).unwrap();
        let o = run(&["rates", "--config", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2));
        assert!(
            String::from_utf8_lossy(&o.stderr).contains(needle),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let o = run(&["rates", "--config", dir.path().join("absent.conf").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn rates_relativistic_beam_is_rejected() {
    let o = run(&[
        "rates",
        "--config",
        fixture("reference.conf").to_str().unwrap(),
        "--velocity",
        "1e8",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn amplify_concurrences() {
    let c = |bell: &str, eta: &str| {
        json(&run(&["amplify", "--bell", bell, "--eta", eta]))["concurrence"]
            .as_f64()
            .unwrap()
    };
    assert!((c("PhiPlus", "0") - 1.0).abs() < 1e-12);
    assert!(c("PsiPlus", "0").abs() < 1e-12);
    assert!((c("PsiPlus", "0.5") - 0.5).abs() < 1e-12);
    let v = json(&run(&["amplify", "--bell", "PhiMinus", "--n", "3"]));
    let m = v["density_matrix"].as_array().unwrap();
    assert_eq!(m.len(), 4);
    assert!(m.iter().all(|row| row.as_array().unwrap().len() == 4));
    assert!((m[1][2][0].as_f64().unwrap() + 0.5).abs() < 1e-12);
    assert_eq!(run(&["amplify", "--bell", "Chi"]).status.code(), Some(2));
    assert_eq!(
        run(&["amplify", "--bell", "PhiPlus", "--n", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn werner_outputs() {
    let v = json(&run(&["werner", "--si", "0", "--sm", "0.5", "--sf", "0"]));
    assert_eq!(v["p"], 1.0);
    assert!((v["concurrence"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["entangled"], true);
    assert!(v.get("note").is_none());

    let v = json(&run(&["werner", "--p", "0"]));
    assert_eq!(v["concurrence"], 0.0);
    assert_eq!(v["entangled"], false);

    let v = json(&run(&[
        "werner",
        "--si",
        "0",
        "--sm",
        "0.5",
        "--sf",
        "0",
        "--convention",
        "as-printed",
    ]));
    assert_eq!(v["p"], 0.0);
    assert!(v["note"].as_str().unwrap().contains("as-printed"));
}

#[test]
fn werner_out_of_range_exit_code() {
    let o = run(&["werner", "--si", "0", "--sm", "1.5", "--sf", "0"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1.8"));
    assert_eq!(run(&["werner", "--p", "1.5"]).status.code(), Some(4));
    assert_eq!(
        run(&["werner", "--si", "0", "--sm", "0.5", "--sf", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["werner", "--si", "0", "--sm", "0.5", "--sf", "0", "--p", "0.5"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_identity_suite_passes() {
    let o = run(&["verify", "--suite", "identity"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.as_array().unwrap().iter().all(|r| r["passed"] == true));
}

#[test]
fn verify_expansion_reports_slope() {
    let v = json(&run(&["verify", "--suite", "expansion"]));
    let order = v
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == "expansion_order")
        .unwrap();
    assert!((order["oracle"].as_f64().unwrap() - 3.0).abs() <= 0.05);
}

#[test]
fn verify_with_corrupted_tolerance_fails() {
    let o = run(&["verify", "--suite", "all", "--force-tolerance", "-1"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.as_array().unwrap().iter().all(|r| r["passed"] == false));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let conf = fixture("reference.conf");
    let conf = conf.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["gain-curve"],
        vec!["gain-curve", "--out", "json", "--steps", "50"],
        vec!["design", "--frequency", "1e9", "--gap-width", "1e-3"],
        vec![
            "rates",
            "--config",
            conf,
            "--sweep-axis",
            "N",
            "--sweep-start",
            "1",
            "--sweep-stop",
            "1e6",
            "--sweep-steps",
            "9",
        ],
        vec!["amplify", "--bell", "PsiMinus", "--eta", "0.3", "--n", "4"],
        vec!["werner", "--p", "0.6"],
        vec!["verify", "--suite", "ppt"],
    ];
    for (i, args) in commands.iter().enumerate() {
        let mut outputs = Vec::new();
        for round in 0..2 {
            let path = dir.path().join(format!("{i}-{round}.out"));
            let mut full = args.clone();
            full.extend(["-o", path.to_str().unwrap()]);
            assert!(run(&full).status.success(), "{args:?}");
            outputs.push(std::fs::read(&path).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "{args:?}");
    }
}
