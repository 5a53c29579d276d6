use std::f64::consts::PI;
use std::process::{Command, Output};

fn isoest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isoest"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn cb_closed(g: f64) -> f64 {
    PI * PI / 48.0 - g * (1.0 - g) * (PI - 4.0).powi(2) / (PI * PI - 4.0)
}

#[test]
fn validate_passes_by_default_and_fails_with_coarse_quadrature() {
    let ok = isoest(&["validate"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).contains("0 failed"));
    let bad = isoest(&["validate", "--nodes", "2"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("FAIL"));
}

#[test]
fn invalid_arguments_exit_with_two() {
    for args in [
        vec!["curve", "--bogus"],
        vec!["curve", "--tol", "-1"],
        vec!["curve", "--gammas", "0.2,1.5"],
        vec!["curve", "--parallelism", "0"],
        vec![
            "sweep",
            "--family",
            "pdamp",
            "--estimated",
            "s_x",
            "--quantity",
            "delta",
        ],
        vec!["sweep", "--estimated", "s_w", "--quantity", "delta"],
        vec!["sweep", "--estimated", "s_x"],
        vec!["estimate", "--mode", "Q"],
        vec![
            "estimate",
            "--family",
            "core",
            "--estimated",
            "s_z",
            "--fixed",
            "0.3,0.9",
        ],
        vec!["validate", "--config", "/nonexistent/isoest.conf"],
    ] {
        let o = isoest(&args);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn curve_csv_format() {
    let o = isoest(&["curve", "--gammas", "0,0.5,1", "--restarts", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "gamma,cB_min,cF_min,cBF_min");
    assert_eq!(lines.len(), 4);
    for (line, g) in lines[1..].iter().zip([0.0, 0.5, 1.0]) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4);
        for f in &fields {
            let mantissa = f.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
            assert_eq!(mantissa.len(), 17, "{f}");
        }
        let cb: f64 = fields[1].parse().unwrap();
        assert!((cb - cb_closed(g)).abs() < 1e-9);
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    let out = dir.path().join("curve.csv");
    std::fs::write(
        &conf,
        format!(
            "# curve settings\ngammas = 0.25, 0.75\nnodes = 2\nrestarts = 2\noutput = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let coarse = isoest(&["curve", "--config", conf.to_str().unwrap()]);
    assert_eq!(coarse.status.code(), Some(0));
    assert!(coarse.stdout.is_empty());
    let coarse_text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(coarse_text.lines().count(), 3);

    let fine = isoest(&["curve", "--config", conf.to_str().unwrap(), "--nodes", "64"]);
    assert_eq!(fine.status.code(), Some(0));
    let fine_text = std::fs::read_to_string(&out).unwrap();
    let cb: f64 = fine_text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((cb - cb_closed(0.25)).abs() < 1e-9);
    assert_ne!(coarse_text, fine_text);

    std::fs::write(&conf, "colour = blue\n").unwrap();
    assert_eq!(
        isoest(&["curve", "--config", conf.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn estimate_emits_json() {
    let o = isoest(&[
        "estimate", "--family", "pdamp", "--gamma", "0.5", "--mode", "B", "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["cost"].as_f64().unwrap() - cb_closed(0.5)).abs() < 1e-9);

    let o = isoest(&[
        "estimate",
        "--family",
        "core",
        "--estimated",
        "s_y",
        "--fixed",
        "1.2,0.3",
        "--gamma",
        "0.4",
        "--phi",
        "pi/4",
        "--mode",
        "coop",
        "--restarts",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["cost"].as_f64().unwrap() > 0.0);
    assert!(v["s_b"].is_object() || v["s_b"].is_array());
}

#[test]
fn validate_json_lists_checks() {
    let o = isoest(&["validate", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], serde_json::Value::Bool(true));
    assert!(!v["checks"].as_array().unwrap().is_empty());
}

#[test]
fn sweep_is_deterministic_across_parallelism() {
    let base = [
        "sweep",
        "--estimated",
        "s_z",
        "--quantity",
        "delta",
        "--grid-points",
        "5",
        "--probe-gammas",
        "0.3,0.7",
        "--probe-phis",
        "0",
        "--seed",
        "9",
    ];
    let run = |threads: &str| {
        let mut args = base.to_vec();
        args.extend(["--parallelism", threads]);
        let o = isoest(&args);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        o.stdout
    };
    let one = run("1");
    assert_eq!(one, run("8"));
    let text = String::from_utf8(one).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "axis1,axis2,best_gamma,best_phi,cB_min,cBF_min,value,skip_flag"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 15);
    assert!(rows.iter().any(|r| r.ends_with(",1") && r.contains("nan")));
}
