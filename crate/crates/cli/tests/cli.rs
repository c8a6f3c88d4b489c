use std::io::Write;
use std::process::Command;

use qsamp_core::report::{emit_trial, parse_trial, Format};
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn qsamp(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_qsamp")).args(args).output().expect("binary runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn ok(args: &[&str]) -> String {
    let r = qsamp(args);
    assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
    r.stdout
}

/// `(quantity, vertex) -> value` rows of an `analyze` CSV.
fn analysis_rows(csv: &str) -> Vec<(String, String, f64)> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("schema,quantity,vertex,value"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f[0], "QSR1");
            (f[1].to_string(), f[2].to_string(), f[3].parse().unwrap_or(f64::NAN))
        })
        .collect()
}

fn values(rows: &[(String, String, f64)], quantity: &str) -> Vec<f64> {
    rows.iter().filter(|r| r.0 == quantity).map(|r| r.2).collect()
}

#[test]
fn analyze_triangle() {
    // From either other vertex, each step hits x with probability 1/2.
    let rows = analysis_rows(&ok(&["analyze", "--graph", "complete:3"]));
    assert_eq!(values(&rows, "n"), vec![3.0]);
    for p in values(&rows, "pi") {
        assert!((p - 1.0 / 3.0).abs() < 1e-11);
    }
    for h in values(&rows, "ht") {
        assert!((h - 2.0).abs() < 1e-10, "{h}");
    }
    // Eigenvalues 1, -1/2, -1/2.
    assert!((values(&rows, "delta")[0] - 1.5).abs() < 1e-10);
    assert!((values(&rows, "absolute_gap")[0] - 0.5).abs() < 1e-10);

    // Lazy: one step in two moves, so hitting times double.
    let rows = analysis_rows(&ok(&["analyze", "--graph", "complete:3", "--lazy"]));
    for h in values(&rows, "ht") {
        assert!((h - 4.0).abs() < 1e-10, "{h}");
    }
}

#[test]
fn analyze_marked_set_on_lazy_cycle() {
    // Non-lazy cycle: k(n-k) from distance k, averaged over k ≠ 0 gives n(n+1)/6.
    let rows = analysis_rows(&ok(&["analyze", "--graph", "cycle:8", "--lazy", "--marked", "0"]));
    let ht = values(&rows, "ht_marked");
    assert_eq!(ht.len(), 1);
    assert!((ht[0] - 2.0 * 8.0 * 9.0 / 6.0).abs() < 1e-9, "{}", ht[0]);
    assert!(values(&rows, "mixing")[0] >= 1.0);
}

#[test]
fn analyze_reads_edge_list_files() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# path on three vertices\n0 1\n1 2").unwrap();
    let path = file.path().to_str().unwrap();
    let rows = analysis_rows(&ok(&["analyze", "--graph", path, "--lazy"]));
    let pi = values(&rows, "pi");
    let expect = [0.25, 0.5, 0.25];
    for (p, e) in pi.iter().zip(expect) {
        assert!((p - e).abs() < 1e-11);
    }

    let json: Value = serde_json::from_str(&ok(&["analyze", "--graph", path, "--lazy", "--format", "json"])).unwrap();
    assert_eq!(json["schema"], "QSR1");
    assert_eq!(json["kind"], "analysis");
    assert_eq!(json["rows"][0]["quantity"], "n");
    assert_eq!(json["rows"][0]["value"], 3);
}

#[test]
fn qff_prints_plan_and_residual() {
    let text = ok(&["qff", "--graph", "complete:3", "--t", "4", "--eps1", "0.1"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
    assert_eq!(keys, vec!["schema", "t", "eps1", "gamma", "tau", "residual"]);
    assert_eq!(v["t"], 4);
    let gamma = v["gamma"].as_u64().unwrap();
    let tau = v["tau"].as_u64().unwrap();
    assert_eq!(tau, u64::from(64 - gamma.leading_zeros()));
    assert!(v["residual"].as_f64().unwrap() <= 0.1);

    // √π is fixed by D.
    let v: Value = serde_json::from_str(&ok(&[
        "qff", "--graph", "cycle:8", "--lazy", "--t", "30", "--eps1", "0.03", "--psi", "pi",
    ]))
    .unwrap();
    assert!(v["residual"].as_f64().unwrap() <= 1e-9);

    let csv = ok(&["qff", "--graph", "complete:3", "--t", "4", "--eps1", "0.1", "--format", "csv"]);
    assert!(csv.starts_with("schema,t,eps1,gamma,tau,residual\nQSR1,4,0.1,"));
}

#[test]
fn reflect_rows_per_eigenvector() {
    let csv = ok(&["reflect", "--graph", "cycle:5", "--lazy", "--eps2", "0.1"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("schema,j,lambda,norm"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').skip(1).map(|f| f.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][0], 0.0);
    assert!((rows[0][1] - 1.0).abs() < 1e-12);
    assert!(rows[0][2] <= 1e-9);
    for r in &rows {
        assert!(r[2] <= 0.1, "{r:?}");
    }
}

#[test]
fn periodic_chains_are_rejected() {
    let r = qsamp(&["reflect", "--graph", "cycle:4"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("lazy"), "{}", r.stderr);
    assert_eq!(qsamp(&["reflect", "--graph", "cycle:4", "--lazy"]).code, 0);
}

#[test]
fn sample_is_deterministic_and_round_trips() {
    let args = ["sample", "--graph", "cycle:8", "--lazy", "--g", "random", "--seed", "11", "--copies", "20", "--json"];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    let report = parse_trial(&a).unwrap();
    assert_eq!(emit_trial(&report, Format::Json).unwrap(), a);
    assert_eq!(report.n, 8);
    assert_eq!(report.seed, 11);
    assert!(report.succeeded());
    assert!(report.fidelity >= 1.0 - 0.05);

    let csv = ok(&["sample", "--graph", "cycle:8", "--lazy", "--g", "random", "--seed", "11", "--copies", "20"]);
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1], "unknown");
    assert_eq!(row[3], report.g.to_string());
    assert_eq!(row[11], "success");
}

#[test]
fn sample_known_pig_in_exact_mode() {
    let text =
        ok(&["sample", "--graph", "complete:3", "--g", "0", "--pig", "0.3333333333", "--mode", "exact", "--json"]);
    let report = parse_trial(&text).unwrap();
    assert_eq!(report.pi_star, Some(0.3333333333));
    assert!(report.fidelity >= 0.95);
    assert!(report.walk_calls > 0);
}

#[test]
fn out_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let p = path.to_str().unwrap();
    let r = qsamp(&["sample", "--graph", "complete:4", "--g", "1", "--mode", "exact", "--out", p, "--format", "json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.is_empty());
    let report = parse_trial(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report.g, 1);
}

#[test]
fn fail_verdict_exits_three() {
    // A lower bound far above π_g = 1/16 takes the direct path with a
    // schedule for the wrong amplitude; the exact check then rejects.
    let r =
        qsamp(&["sample", "--graph", "cycle:16", "--lazy", "--g", "0", "--pi-lb", "0.45", "--mode", "exact", "--json"]);
    assert_eq!(r.code, 3, "{}", r.stderr);
    let report = parse_trial(&r.stdout).unwrap();
    assert!(!report.succeeded());
}

#[test]
fn bad_input_exits_two() {
    let cases: [&[&str]; 8] = [
        &["sample", "--graph", "complete:3", "--eps", "2"],
        &["sample", "--graph", "complete:1"],
        &["sample", "--graph", "/nonexistent/graph.txt"],
        &["sample", "--graph", "complete:3", "--g", "seven"],
        &["sample", "--graph", "complete:3", "--pig", "0.3"],
        &["sample", "--graph", "complete:3", "--g", "5", "--pig", "0.3"],
        &["bench", "--family", "cycle", "--sizes", "16,8"],
        &["analyze", "--graph", "complete:3", "--format", "xml"],
    ];
    for args in cases {
        let r = qsamp(args);
        assert_eq!(r.code, 2, "{args:?}: {}", r.stderr);
        assert!(r.stdout.is_empty());
    }
}

#[test]
fn bench_cycle_hitting_time_slope() {
    let csv = ok(&["bench", "--family", "cycle", "--sizes", "8,16,32,64", "--lazy", "--quantities", "ht"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "schema,family,size,n,ht,sqrt_ht,error");
    assert_eq!(lines.len(), 6);
    let slope: Vec<&str> = lines[5].split(',').collect();
    assert_eq!(slope[2], "slope");
    let s: f64 = slope[4].parse().unwrap();
    assert!((1.8..=2.2).contains(&s), "{s}");

    let json: Value = serde_json::from_str(&ok(&[
        "bench",
        "--family",
        "gnp,p=0.2",
        "--sizes",
        "12,24",
        "--seeds",
        "2",
        "--quantities",
        "delta",
        "--format",
        "json",
    ]))
    .unwrap();
    assert_eq!(json["kind"], "scaling");
    assert_eq!(json["rows"].as_array().unwrap().len(), 3);
    assert!(json["rows"][0]["delta"].as_f64().unwrap() > 0.0);
}
