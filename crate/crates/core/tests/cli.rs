use std::fs;
use std::process::{Command, Output};

fn fdnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Header and data rows of a CSV document, skipping the metadata line.
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let meta = lines.next().expect("metadata line");
    assert!(meta.starts_with("# metadata config_hash="), "{meta}");
    let body: String = lines.map(|l| format!("{l}\n")).collect();
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn analyze_hd_baseline_rate() {
    let o = fdnet(&["analyze", "--scheme", "hd"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = parse_csv(&stdout(&o));
    let rate: f64 = rows[0][column(&h, "rate_dl")].parse().unwrap();
    assert!((rate - 1.9555e6).abs() < 1e3, "{rate}");
}

#[test]
fn analyze_bounds_bracket_in_order() {
    let o = fdnet(&["analyze", "--kind", "lower,upper"]);
    assert!(o.status.success());
    let (h, rows) = parse_csv(&stdout(&o));
    let p = column(&h, "p_dl");
    assert_eq!(rows[0][column(&h, "kind")], "lower");
    let lo: f64 = rows[0][p].parse().unwrap();
    let hi: f64 = rows[1][p].parse().unwrap();
    assert!(lo <= hi);
}

#[test]
fn missing_scheme_parameter_is_named() {
    let o = fdnet(&["analyze", "--scheme", "fpc"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("fpc_p_bar"), "{}", stderr(&o));
}

#[test]
fn alpha_two_is_a_usage_error() {
    for cmd in ["analyze", "validate"] {
        let o = fdnet(&[cmd, "--alpha", "2"]);
        assert_eq!(o.status.code(), Some(1));
        assert!(stderr(&o).contains("path-loss"));
    }
}

#[test]
fn config_file_layers_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# values with units\nbeta = -80 dB\np_max = 33 dBm # about 2 W\nscheme = cpc\n").unwrap();
    let path = cfg.to_str().unwrap();
    let from_file = stdout(&fdnet(&["analyze", "--config", path]));
    let direct = stdout(&fdnet(&["analyze", "--beta=-80dB", "--p-max", "33 dBm"]));
    assert_eq!(from_file, direct);
    let overridden = stdout(&fdnet(&["analyze", "--config", path, "--beta=-100dB", "--p-max", "33dBm"]));
    let defaults = stdout(&fdnet(&["analyze", "--p-max", "33dBm"]));
    assert_eq!(overridden, defaults);

    fs::write(&cfg, "beta = -80 dB\nshiny = 3\n").unwrap();
    let o = fdnet(&["analyze", "--config", path]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("shiny") && stderr(&o).contains(":2"), "{}", stderr(&o));
}

#[test]
fn sweep_keys_are_rejected_elsewhere() {
    let o = fdnet(&["analyze", "--set", "axis=beta"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("sweep"));
}

#[test]
fn single_point_sweep_has_one_row() {
    let o = fdnet(&["sweep", "--axis", "beta", "--from=-100dB", "--to=-60dB", "--points", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = parse_csv(&stdout(&o));
    assert_eq!(h, ["beta", "p_ul:cpc:lower", "p_dl:cpc:lower"]);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "1e-10");
}

#[test]
fn distance_sweep_matches_rate_given_distance() {
    let o = fdnet(&[
        "sweep", "--axis", "distance", "--from", "10", "--to", "1 km", "--points", "50", "--scale", "log",
        "--metrics", "fd_rate,hd_rate", "--kind", "upper",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = parse_csv(&stdout(&o));
    assert_eq!(rows.len(), 50);
    assert_eq!(rows[49][0], "1000");
    let cfg = fdnet::NetworkConfig::default();
    let a = fdnet::analytic::Analyzer::new(&cfg, &fdnet::PowerControlScheme::Cpc).unwrap();
    for row in &rows {
        let r: f64 = row[0].parse().unwrap();
        let fd: f64 = row[column(&h, "fd_rate:cpc:upper")].parse().unwrap();
        let hd: f64 = row[column(&h, "hd_rate:cpc:upper")].parse().unwrap();
        let want_fd = a
            .rate_given_distance(r, fdnet::analytic::BoundKind::Upper, fdnet::analytic::DuplexMode::Full)
            .unwrap();
        let want_hd = a
            .rate_given_distance(r, fdnet::analytic::BoundKind::Upper, fdnet::analytic::DuplexMode::Half)
            .unwrap();
        assert!((fd - want_fd).abs() <= 1e-6 * want_fd.abs().max(1.0), "{r}: {fd} vs {want_fd}");
        assert!((hd - want_hd).abs() <= 1e-6 * want_hd.abs().max(1.0), "{r}: {hd} vs {want_hd}");
    }
}

#[test]
fn rate_metrics_need_a_distance() {
    let o = fdnet(&["sweep", "--axis", "beta", "--from", "1e-12", "--to", "1e-8", "--metrics", "fd_rate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("distance"));
}

#[test]
fn unsweepable_axis_is_rejected() {
    let o = fdnet(&["sweep", "--axis", "scheme", "--from", "1", "--to", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cannot be swept"));
}

#[test]
fn monte_carlo_csv_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str| {
        vec![
            "sweep".to_string(),
            "--axis=beta".into(),
            "--from=1e-12".into(),
            "--to=1e-8".into(),
            "--points=2".into(),
            "--scale=log".into(),
            "--kind=mc".into(),
            "--scheme=cpc,hd".into(),
            "--n-trials=2000".into(),
            "--target-ci=0".into(),
            "--seed=42".into(),
            "--metrics=p_ul,p_dl,ee".into(),
            format!("--output={out}"),
        ]
    };
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = Command::new(env!("CARGO_BIN_EXE_fdnet"))
            .args(args(p.to_str().unwrap()))
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let (ta, tb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    assert!(String::from_utf8(ta).unwrap().lines().next().unwrap().contains("seed=42"));
}

#[test]
fn optimize_writes_deterministic_trace() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = fdnet(&["optimize", "--scheme", "cpc", "--dl-demand", "2", "--output", p.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).contains("cpc (best)"));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let (h, rows) = parse_csv(&text);
    assert_eq!(h[..2], ["step".to_string(), "power".to_string()]);
    assert!(rows.len() >= 32);
}

#[test]
fn optimize_rejects_several_schemes() {
    let o = fdnet(&["optimize", "--scheme", "cpc,upc"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn validate_passes_at_defaults() {
    let o = fdnet(&["validate", "--validate-points", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 failed"));
}

#[test]
fn validate_passes_near_alpha_two() {
    let o = fdnet(&["validate", "--alpha", "2.05"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("window truncation bias"), "{out}");
}

#[test]
fn validate_failure_exits_three() {
    let o = fdnet(&["validate", "--n-trials", "3", "--target-ci", "0", "--validate-points", "2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("validation checks failed"));
}
