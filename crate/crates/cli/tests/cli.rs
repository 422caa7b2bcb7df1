use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn accelflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_accelflow"))
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

fn small_config(dir: &Path) -> String {
    format!(
        r#"{{
  "design": [
    {{"family": {{"kind": "power_law", "c": 1.0, "nu": 1.0}}, "n": 50, "p": 8, "seed": 3}},
    {{"family": {{"kind": "orthogonal", "s": 0.1}}, "n": 50, "p": 8, "seed": 3}}
  ],
  "snr": 1.0,
  "t_grid": {{"lo": 0.01, "hi": 100.0, "count": 30, "log": true}},
  "ridge_grid": {{"lo": 1e-4, "hi": 10.0, "count": 30, "log": true}},
  "output_dir": "{}"
}}"#,
        dir.join("curves").display()
    )
}

#[test]
fn verify_constants_passes() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = accelflow(&["verify-constants", "--out", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let checks = v["checks"].as_array().unwrap();
    let find = |name: &str| {
        checks
            .iter()
            .find(|c| c["name"] == name)
            .unwrap_or_else(|| panic!("{name}"))
    };
    for (name, reference) in [
        ("gf_inflation_constant", 1.0786),
        ("nest_inflation_constant", 1.5991),
        ("nest_param_error_constant", 0.765625),
        ("hb_param_error_max_fm1_sq", 25.0),
        ("tilde_h_crossover_z_star", 0.907),
    ] {
        let c = find(name);
        assert_eq!(c["paper_value"].as_f64().unwrap(), reference);
        assert_eq!(c["pass"], true);
        for key in ["value", "tolerance", "runtime_ms"] {
            assert!(c[key].is_number(), "{name}.{key}");
        }
    }
    assert_eq!(find("h_kappa_recomposition_error")["pass"], true);
}

#[test]
fn impossible_tolerance_fails_verification() {
    let o = accelflow(&["verify-constants", "--tol", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("FAIL gf_inflation_constant"));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["checks"].as_array().unwrap().iter().any(|c| c["pass"] == false));
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, small_config(dir.path())).unwrap();
    let o = accelflow(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = dir.path().join("curves");
    let mut names: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names.len(), 9);
    assert!(names.contains(&"powerlaw-c1-nu1_nest.csv".to_string()));
    assert!(names.contains(&"orthogonal-s0.1_ridge.csv".to_string()));
    let header = fs::read_to_string(out.join("powerlaw-c1-nu1_gf.csv")).unwrap();
    assert!(header.starts_with("kind,param,bias_sq,variance,risk\ngf,"));

    let again = dir.path().join("again");
    let o = accelflow(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    for name in names.iter().filter(|n| n.ends_with(".csv")) {
        assert_eq!(
            fs::read(out.join(name)).unwrap(),
            fs::read(again.join(name)).unwrap(),
            "{name}"
        );
    }
    let files = |dir: &Path| -> serde_json::Value {
        let m: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
        m["files"].clone()
    };
    assert_eq!(files(&out), files(&again));

    let before = fs::read(out.join("manifest.json")).unwrap();
    accelflow(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(before, fs::read(out.join("manifest.json")).unwrap());

    let reseeded = dir.path().join("reseeded");
    accelflow(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        reseeded.to_str().unwrap(),
        "--seed",
        "9",
    ]);
    assert_ne!(
        fs::read(out.join("powerlaw-c1-nu1_gf.csv")).unwrap(),
        fs::read(reseeded.join("powerlaw-c1-nu1_gf.csv")).unwrap()
    );
}

#[test]
fn bad_configs_exit_two_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, small_config(dir.path()).replace("\"snr\"", "\"signal_to_noise\"")).unwrap();
    let o = accelflow(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("signal_to_noise"), "{}", stderr(&o));

    fs::write(&cfg, small_config(dir.path()).replace("\"nu\": 1.0", "\"nu\": -1.0")).unwrap();
    let o = accelflow(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nu"), "{}", stderr(&o));

    assert_eq!(
        accelflow(&["simulate", "--config", "/nonexistent.json"]).status.code(),
        Some(2)
    );
    assert_eq!(
        accelflow(&["shrink", "--kind", "gf", "--s", "1", "--param", "1", "--bogus"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(accelflow(&[]).status.code(), Some(2));
}

#[test]
fn shrink_and_special_values() {
    let o = accelflow(&["shrink", "--kind", "hb", "--s", "2", "--mu", "1", "--param", "1"]);
    let line = stdout(&o).lines().nth(1).unwrap().to_string();
    let factor: f64 = line.split(',').next().unwrap().parse().unwrap();
    let e = (-1.0f64).exp();
    assert!((factor - e * (1f64.cos() + 1f64.sin())).abs() < 1e-15);
    assert_eq!(line.split(',').next().unwrap().len(), "5.0832598599952517e-1".len());

    assert_eq!(
        accelflow(&["shrink", "--kind", "hb", "--s", "2", "--param", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        accelflow(&["shrink", "--kind", "gf", "--s", "-1", "--param", "1"])
            .status
            .code(),
        Some(2)
    );

    let o = accelflow(&["special-eval", "--fn", "h-kappa", "--x", "1"]);
    let h: f64 = stdout(&o).trim().parse().unwrap();
    assert!((h - (8.0 + 8.0 * (-2.0f64).exp())).abs() < 1e-12);

    let o = accelflow(&["special-eval", "--fn", "h-kappa", "--count", "100"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,h_kappa"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 100);
    assert_eq!((rows[0].0, rows[99].0), (1.0, 100.0));
    assert!(rows.windows(2).all(|w| w[1].1 >= w[0].1));
}

#[test]
fn risk_curve_from_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let eig = dir.path().join("eig.csv");
    let beta = dir.path().join("beta.csv");
    fs::write(&eig, "1\n").unwrap();
    fs::write(&beta, "1\n").unwrap();
    let args = [
        "risk-curve",
        "--kind",
        "gf",
        "--eigenvalues",
        eig.to_str().unwrap(),
        "--n",
        "1",
        "--beta0",
        beta.to_str().unwrap(),
        "--lo",
        "1",
        "--hi",
        "2",
        "--count",
        "2",
        "--scale",
        "linear",
    ];
    let o = accelflow(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let row: Vec<f64> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .skip(1)
        .map(|v| v.parse().unwrap())
        .collect();
    let e = (-1.0f64).exp();
    assert_eq!(row[0], 1.0);
    assert!((row[1] - e * e).abs() < 1e-15);
    assert!((row[2] - (1.0 - e).powi(2)).abs() < 1e-15);

    assert_eq!(
        accelflow(&["risk-curve", "--kind", "gf", "--eigenvalues", eig.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn estimate_matches_least_squares_in_the_limit() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.csv");
    let y = dir.path().join("y.csv");
    fs::write(&x, "1,0\n0,2\n1,1\n").unwrap();
    fs::write(&y, "1\n2\n3\n").unwrap();
    let read = |o: Output| -> Vec<f64> { stdout(&o).lines().map(|l| l.parse().unwrap()).collect() };
    let ols = read(accelflow(&[
        "estimate",
        "--kind",
        "ridge",
        "--design",
        x.to_str().unwrap(),
        "--response",
        y.to_str().unwrap(),
        "--param",
        "0",
    ]));
    let gf = read(accelflow(&[
        "estimate",
        "--kind",
        "gf",
        "--design",
        x.to_str().unwrap(),
        "--response",
        y.to_str().unwrap(),
        "--param",
        "1e4",
    ]));
    // normal equations: [[2,1],[1,5]] b = [4,7]
    let expect = [13.0 / 9.0, 10.0 / 9.0];
    for i in 0..2 {
        assert!((ols[i] - expect[i]).abs() < 1e-12);
        assert!((gf[i] - expect[i]).abs() < 1e-9);
    }
    let o = accelflow(&[
        "estimate",
        "--kind",
        "nest",
        "--design",
        x.to_str().unwrap(),
        "--response",
        y.to_str().unwrap(),
        "--param",
        "2",
        "--coupling",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["ratio"].as_f64().unwrap() <= 0.765625);
}

#[test]
fn oracle_check_passes() {
    let o = accelflow(&["oracle-check", "--instances", "5", "--t-end", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 3);
}

#[test]
fn plot_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.csv");
    let o = accelflow(&["special-eval", "--fn", "h-kappa", "--out", h.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    for out in [&a, &b] {
        let o = accelflow(&[
            "plot",
            "--in",
            h.to_str().unwrap(),
            h.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--logx",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let svg = fs::read_to_string(&a).unwrap();
    assert_eq!(svg, fs::read_to_string(&b).unwrap());
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert!(svg.contains(">h_kappa</text>"));

    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    assert_eq!(
        accelflow(&["plot", "--in", empty.to_str().unwrap(), "--out", a.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let three = dir.path().join("three.csv");
    fs::write(&three, "a,b,c\n1,2,3\n").unwrap();
    assert_eq!(
        accelflow(&["plot", "--in", three.to_str().unwrap(), "--out", a.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}
