//! End-to-end tests of the `linc` binary: table contents, determinism,
//! comparison tolerances, exit codes, and config/flag precedence.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;

/// Run the binary and capture (exit code, stdout, stderr).
fn linc(args: &[&str]) -> (i32, String, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_linc"))
        .args(args)
        .output()
        .expect("binary should run");
    (
        output.status.code().expect("no exit code"),
        String::from_utf8(output.stdout).expect("stdout is UTF-8"),
        String::from_utf8(output.stderr).expect("stderr is UTF-8"),
    )
}

fn expect_success(args: &[&str]) -> String {
    let (code, stdout, stderr) = linc(args);
    assert_eq!(code, 0, "linc {args:?} failed: {stderr}");
    stdout
}

/// Parse unquoted CSV into (header, rows).
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<String> = lines
        .next()
        .expect("header")
        .split(',')
        .map(String::from)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect::<Vec<_>>())
        .collect();
    (header, rows)
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    parse_csv(&std::fs::read_to_string(path).expect("csv readable"))
}

fn col(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("missing column {name}"))
}

#[test]
fn model_tables_satisfy_the_analytic_identities() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("model.csv");
    expect_success(&[
        "model",
        "--n",
        "50,53,55",
        "--epsilon",
        "0.05,0.1",
        "--out",
        out.to_str().unwrap(),
    ]);
    let (header, rows) = read_csv(&out);
    let (c_eps, c_k, c_n) = (
        col(&header, "epsilon"),
        col(&header, "k"),
        col(&header, "n"),
    );
    let c_r = col(&header, "retrans_rate_coded");
    let c_delta = col(&header, "goodput_ratio");
    assert_eq!(rows.len(), 6, "two epsilons, three block lengths");

    for eps_cell in ["5.00000000e-2", "1.00000000e-1"] {
        let block: Vec<&Vec<String>> = rows.iter().filter(|r| r[c_eps] == eps_cell).collect();
        assert_eq!(block.len(), 3);
        // Degenerate n = k: no parity, so the residual loss rate is the raw
        // loss probability and the goodput ratio is exactly one.
        let degenerate = block.iter().find(|r| r[c_n] == r[c_k]).expect("n=k row");
        let eps: f64 = eps_cell.parse().unwrap();
        let r0: f64 = degenerate[c_r].parse().unwrap();
        let delta0: f64 = degenerate[c_delta].parse().unwrap();
        assert!(
            (r0 - eps).abs() < 1e-12,
            "retrans rate at n=k: {r0} vs {eps}"
        );
        assert!(
            (delta0 - 1.0).abs() < 1e-12,
            "goodput ratio at n=k: {delta0}"
        );
        // More parity can only reduce the residual loss rate.
        let rates: Vec<f64> = block.iter().map(|r| r[c_r].parse().unwrap()).collect();
        assert!(
            rates.windows(2).all(|w| w[1] <= w[0] + 1e-15),
            "retrans rate must be non-increasing in n: {rates:?}"
        );
    }
}

#[test]
fn sim_sweeps_are_byte_identical_and_fully_structured() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    let args = |out: &Path| {
        vec![
            "sim".to_string(),
            "--n".into(),
            "52".into(),
            "--seeds".into(),
            "2".into(),
            "--duration".into(),
            "2".into(),
            "--out".into(),
            out.to_str().unwrap().into(),
        ]
    };
    fn to_refs(v: &[String]) -> Vec<&str> {
        v.iter().map(String::as_str).collect()
    }
    expect_success(&to_refs(&args(&first)));
    expect_success(&to_refs(&args(&second)));
    let bytes_a = std::fs::read(&first).unwrap();
    let bytes_b = std::fs::read(&second).unwrap();
    assert_eq!(
        bytes_a, bytes_b,
        "same arguments must serialize identically"
    );

    let (header, rows) = read_csv(&first);
    let c_seed = col(&header, "seed");
    let c_link = col(&header, "link_id");
    // Six-node chain: five links plus the aggregate, for each of two seeds
    // plus the mean and stderr rows.
    assert_eq!(rows.len(), 6 * 4);
    let seeds: BTreeSet<&str> = rows.iter().map(|r| r[c_seed].as_str()).collect();
    assert_eq!(seeds, BTreeSet::from(["1", "2", "mean", "stderr"]));
    let links: BTreeSet<&str> = rows.iter().map(|r| r[c_link].as_str()).collect();
    assert_eq!(links, BTreeSet::from(["0", "1", "2", "3", "4", "all"]));
}

#[test]
fn compare_passes_matched_tables_and_flags_violations() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.csv");
    let sim = dir.path().join("sim.csv");
    expect_success(&["model", "--n", "55", "--out", model.to_str().unwrap()]);
    expect_success(&[
        "sim",
        "--n",
        "55",
        "--seeds",
        "3",
        "--duration",
        "8",
        "--out",
        sim.to_str().unwrap(),
    ]);

    let (code, stdout, _) = linc(&[
        "compare",
        "--model",
        model.to_str().unwrap(),
        "--sim",
        sim.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "matched tables should agree: {stdout}");
    assert!(stdout.contains("within tolerance"));

    // An absurdly tight rate tolerance must trip the violation path.
    let (code, stdout, stderr) = linc(&[
        "compare",
        "--model",
        model.to_str().unwrap(),
        "--sim",
        sim.to_str().unwrap(),
        "--rate-tol",
        "1e-9",
        "--retrans-tol",
        "1e-12",
    ]);
    assert_eq!(code, 2, "tolerance violations exit 2");
    assert!(stdout.contains("EXCEEDS TOLERANCE"));
    assert!(stderr.contains("exceed tolerance"));

    // A model table keyed at a different n cannot be compared at all.
    let mismatched = dir.path().join("mismatched.csv");
    expect_success(&["model", "--n", "61", "--out", mismatched.to_str().unwrap()]);
    let (code, _, stderr) = linc(&[
        "compare",
        "--model",
        mismatched.to_str().unwrap(),
        "--sim",
        sim.to_str().unwrap(),
    ]);
    assert_eq!(code, 1, "key mismatch is a usage error");
    assert!(stderr.contains("no matching model row"));
}

#[test]
fn exit_codes_follow_the_documented_contract() {
    let (code, stdout, _) = linc(&["--help"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("model") && stdout.contains("compare"));

    let (code, _, _) = linc(&["model", "--bogus-flag"]);
    assert_eq!(code, 1, "unknown flags are usage errors");

    let (code, _, stderr) = linc(&["sim", "--seeds", "0"]);
    assert_eq!(code, 1, "zero seeds is a usage error: {stderr}");

    let (code, _, stderr) = linc(&["model", "--rate", "0.9"]);
    assert_eq!(code, 1, "rates below one are usage errors: {stderr}");

    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    std::fs::write(&conf, "pacekt_size = 1500\n").unwrap();
    let (code, _, stderr) = linc(&["model", "--config", conf.to_str().unwrap()]);
    assert_eq!(code, 1, "unknown config keys are usage errors");
    assert!(stderr.contains("unknown config key"));

    let (code, _, stderr) = linc(&[
        "model",
        "--scenario",
        "scenario2",
        "--graphml",
        "/nonexistent/net.graphml",
    ]);
    assert_eq!(
        code, 3,
        "unreadable topology files are ingestion errors: {stderr}"
    );
}

#[test]
fn flags_override_config_files_which_override_presets() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("exp.conf");
    std::fs::write(&conf, "epsilon = 0.08\nk = 20\nn = 24\nseed = 3\n").unwrap();
    let out = dir.path().join("model.csv");

    expect_success(&[
        "model",
        "--config",
        conf.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let (header, rows) = read_csv(&out);
    assert_eq!(rows.len(), 1, "config pins a single (epsilon, k, n) point");
    let row = &rows[0];
    assert_eq!(row[col(&header, "epsilon")], "8.00000000e-2");
    assert_eq!(row[col(&header, "k")], "20");
    assert_eq!(row[col(&header, "n")], "24");

    expect_success(&[
        "model",
        "--config",
        conf.to_str().unwrap(),
        "--epsilon",
        "0.1",
        "--out",
        out.to_str().unwrap(),
    ]);
    let (header, rows) = read_csv(&out);
    assert_eq!(rows[0][col(&header, "epsilon")], "1.00000000e-1");
    assert_eq!(
        rows[0][col(&header, "k")],
        "20",
        "config keys not overridden stay"
    );
}

#[test]
fn bundled_wide_area_preset_resolves_from_any_working_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("model.csv");
    expect_success(&[
        "model",
        "--scenario",
        "scenario2",
        "--out",
        out.to_str().unwrap(),
    ]);
    let (header, rows) = read_csv(&out);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][col(&header, "k")], "50");
    assert_eq!(rows[0][col(&header, "n")], "60");
}

#[test]
fn optimizer_report_matches_the_exported_surface() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("surface.csv");
    let stdout = expect_success(&[
        "optimize",
        "--epsilon",
        "0.1",
        "--k-max",
        "12",
        "--n-max",
        "12",
        "--out",
        out.to_str().unwrap(),
    ]);

    let tokens: Vec<&str> = stdout.split_whitespace().collect();
    let grab = |prefix: &str| -> String {
        tokens
            .iter()
            .find_map(|t| t.strip_prefix(prefix))
            .unwrap_or_else(|| panic!("no `{prefix}` in {stdout:?}"))
            .to_string()
    };
    let best_k: usize = grab("k=").parse().unwrap();
    let best_n: usize = grab("n=").parse().unwrap();
    let best_delta: f64 = grab("goodput_ratio=").parse().unwrap();

    let (header, rows) = read_csv(&out);
    let (c_k, c_n) = (col(&header, "k"), col(&header, "n"));
    let c_delta = col(&header, "goodput_ratio");
    let argmax = rows
        .iter()
        .max_by(|a, b| {
            let da: f64 = a[c_delta].parse().unwrap();
            let db: f64 = b[c_delta].parse().unwrap();
            da.total_cmp(&db)
        })
        .unwrap();
    assert_eq!(argmax[c_k].parse::<usize>().unwrap(), best_k);
    assert_eq!(argmax[c_n].parse::<usize>().unwrap(), best_n);
    let surface_best: f64 = argmax[c_delta].parse().unwrap();
    assert!((surface_best - best_delta).abs() < 1e-8);

    // Lossless link: parity can only cost, so the optimum is uncoded.
    let stdout = expect_success(&["optimize", "--epsilon", "0", "--k-max", "6", "--n-max", "6"]);
    let tokens: Vec<&str> = stdout.split_whitespace().collect();
    let k: usize = tokens
        .iter()
        .find_map(|t| t.strip_prefix("k="))
        .unwrap()
        .parse()
        .unwrap();
    let n: usize = tokens
        .iter()
        .find_map(|t| t.strip_prefix("n="))
        .unwrap()
        .parse()
        .unwrap();
    let delta: f64 = tokens
        .iter()
        .find_map(|t| t.strip_prefix("goodput_ratio="))
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(k, n, "with no loss the best block carries no parity");
    assert!((delta - 1.0).abs() < 1e-12);
}
