use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vnentropy")).args(args).current_dir(dir).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(dir: &Path, args: &[&str]) -> Value {
    let text = ok(dir, args);
    assert_eq!(text.lines().count(), 1, "{text}");
    serde_json::from_str(&text).unwrap()
}

fn write_mtx(dir: &Path, name: &str, body: &str) {
    std::fs::write(dir.join(name), format!("%%MatrixMarket matrix coordinate real symmetric\n{body}")).unwrap();
}

fn spectrum(dir: &Path, name: &str) -> Vec<f64> {
    std::fs::read_to_string(dir.join(name)).unwrap().lines().map(|l| l.parse().unwrap()).collect()
}

#[test]
fn generate_tridiagonal_writes_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let summary: Value = serde_json::from_str(&ok(dir.path(), &["generate", "--family", "tridiagonal", "--n", "8", "--out", "t.mtx"])).unwrap();
    assert_eq!(summary["n"], 8);
    let p = spectrum(dir.path(), "t.mtx.spectrum");
    assert_eq!(p.len(), 8);
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    let text = std::fs::read_to_string(dir.path().join("t.mtx.spectrum")).unwrap();
    // 17 significant digits
    assert!(text.lines().all(|l| l.split('e').next().unwrap().replace(['.', '-'], "").len() == 17));
}

#[test]
fn generate_lowrank_linear_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["generate", "--family", "lowrank", "--decay", "linear", "--k", "4", "--n", "64", "--out", "l.mtx"]);
    let p = spectrum(dir.path(), "l.mtx.spectrum");
    for (got, want) in p.iter().zip([0.4, 0.3, 0.2, 0.1]) {
        assert!((got - want).abs() < 1e-15);
    }
}

#[test]
fn generate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for out in ["a.mtx", "b.mtx"] {
        ok(d, &["generate", "--family", "haar", "--n", "20", "--seed", "0x10", "--out", out]);
    }
    assert_eq!(std::fs::read(d.join("a.mtx")).unwrap(), std::fs::read(d.join("b.mtx")).unwrap());
    assert_eq!(std::fs::read(d.join("a.mtx.spectrum")).unwrap(), std::fs::read(d.join("b.mtx.spectrum")).unwrap());
    ok(d, &["generate", "--family", "haar", "--n", "20", "--seed", "17", "--out", "c.mtx"]);
    assert_ne!(std::fs::read(d.join("a.mtx")).unwrap(), std::fs::read(d.join("c.mtx")).unwrap());
}

#[test]
fn exact_on_quarter_identity() {
    let dir = tempfile::tempdir().unwrap();
    write_mtx(dir.path(), "q.mtx", "4 4 4\n1 1 0.25\n2 2 0.25\n3 3 0.25\n4 4 0.25\n");
    let rec = json(dir.path(), &["estimate", "q.mtx", "--method", "exact"]);
    assert!((rec["estimate"].as_f64().unwrap() - 1.386294).abs() < 1e-6);
    assert_eq!(rec["rel_err"].as_f64().unwrap(), 0.0);
    assert_eq!(rec["n"], 4);
    assert_eq!(rec["nnz"], 4);
    assert!(rec["wall_ms"].as_f64().is_some());
}

#[test]
fn chebyshev_nte_on_half_identity() {
    let dir = tempfile::tempdir().unwrap();
    write_mtx(dir.path(), "h.mtx", "2 2 2\n1 1 0.5\n2 2 0.5\n");
    let rec = json(dir.path(), &["estimate", "h.mtx", "--method", "chebyshev", "--m", "30", "--s", "0", "--nte"]);
    assert!((rec["estimate"].as_f64().unwrap() - 0.693147).abs() <= 1.1e-3);
    assert_eq!(rec["m"], 30);
    assert!(rec.get("s").is_none());
    assert_eq!(rec["nte"], true);
    // nte without a sidecar falls back to the oracle, so the error is known
    assert!(rec["rel_err"].as_f64().is_some());
}

#[test]
fn countsketch_on_linear_rank_four() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["generate", "--family", "lowrank", "--decay", "linear", "--k", "4", "--n", "64", "--out", "l.mtx"]);
    let rec = json(d, &["estimate", "l.mtx", "--method", "sketch", "--proj", "countsketch", "--rank", "4", "--s", "64"]);
    assert_eq!(rec["probs"].as_array().unwrap().len(), 4);
    assert_eq!(rec["proj"], "countsketch");
    assert_eq!(rec["rank"], 4);
    assert_eq!(rec["s"], 64);
    assert!((rec["estimate"].as_f64().unwrap() - 1.2798542258336674).abs() < 0.15);
    assert!((rec["exact"].as_f64().unwrap() - 1.2798542258336674).abs() < 1e-12);
    assert_eq!(rec["assumptions"]["rank_le_k"], "true");
}

#[test]
fn taylor_record_fields_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["generate", "--family", "tridiagonal", "--n", "32", "--out", "t.mtx"]);
    let rec = json(d, &["estimate", "t.mtx", "--method", "taylor", "--m", "40", "--s", "30", "--seed", "0x2a", "--no-timing"]);
    for key in ["method", "n", "nnz", "m", "s", "u", "seed", "estimate", "exact", "rel_err", "warnings"] {
        assert!(rec.get(key).is_some(), "missing {key}");
    }
    assert_eq!(rec["seed"], 42);
    assert!(rec["wall_ms"].is_null());
    assert!(rec["estimate"].as_f64().unwrap().is_finite());
    // without the sidecar there is nothing to compare against
    std::fs::remove_file(d.join("t.mtx.spectrum")).unwrap();
    let rec = json(d, &["estimate", "t.mtx", "--method", "taylor", "--m", "40", "--s", "30"]);
    assert!(rec.get("rel_err").is_none());
    assert_eq!(rec["assumptions"]["u_ge_p1"], "unknown");
}

#[test]
fn assumption_violations_are_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["generate", "--family", "lowrank", "--decay", "linear", "--k", "4", "--n", "16", "--out", "l.mtx"]);
    let rec = json(d, &["estimate", "l.mtx", "--method", "taylor", "--eps", "0.5", "--ell", "0.2", "--s", "10"]);
    let warnings: Vec<&str> = rec["warnings"].as_array().unwrap().iter().map(|w| w.as_str().unwrap()).collect();
    assert!(warnings.iter().any(|w| w.contains("ell")), "{warnings:?}");
    assert_eq!(rec["assumptions"]["ell_le_pmin"], "false");
    let rec = json(d, &["estimate", "l.mtx", "--method", "sketch", "--proj", "srht", "--rank", "2"]);
    assert_eq!(rec["assumptions"]["rank_le_k"], "false");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_mtx(d, "h.mtx", "2 2 2\n1 1 0.5\n2 2 0.5\n");
    write_mtx(d, "neg.mtx", "2 2 2\n1 1 1.5\n2 2 -0.5\n");
    write_mtx(d, "bad.mtx", "2 2 2\n1 1 0.5\n2 x 0.5\n");
    let code = |args: &[&str]| run(d, args).status.code().unwrap();
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["estimate", "h.mtx"]), 1);
    assert_eq!(code(&["estimate", "h.mtx", "--method", "newton"]), 1);
    assert_eq!(code(&["estimate", "missing.mtx", "--method", "exact"]), 1);
    assert_eq!(code(&["estimate", "bad.mtx", "--method", "exact"]), 1);
    assert_eq!(code(&["estimate", "h.mtx", "--method", "taylor"]), 1);
    assert_eq!(code(&["estimate", "h.mtx", "--method", "sketch", "--rank", "1"]), 1);
    assert_eq!(code(&["estimate", "h.mtx", "--method", "taylor", "--m", "5", "--u-mode", "manual:2"]), 1);
    assert_eq!(code(&["estimate", "h.mtx", "--method", "exact", "--seed", "0xzz"]), 1);
    assert_eq!(code(&["generate", "--family", "lowrank", "--n", "8", "--out", "x.mtx"]), 1);
    assert_eq!(code(&["estimate", "neg.mtx", "--method", "exact"]), 2);
    let out = run(d, &["estimate", "bad.mtx", "--method", "exact"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"), "{}", String::from_utf8_lossy(&out.stderr));
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .take_while(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn bench_exact_only_has_zero_error() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["generate", "--family", "lowrank", "--k", "3", "--n", "24", "--out", "l.mtx"]);
    std::fs::write(d.join("g.toml"), "methods = [\"exact\"]\nseeds = [1, 2, 3]\n[matrix]\npath = \"l.mtx\"\n").unwrap();
    let text = ok(d, &["bench", "g.toml", "--out", "out.csv"]);
    assert!(text.is_empty());
    let csv = std::fs::read_to_string(d.join("out.csv")).unwrap();
    assert!(csv.starts_with("method,m,s,u_mode,seed,rep,"));
    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[10] == "0"));
    assert!(csv.contains("# summary"));
}

#[test]
fn bench_records_failures_in_row() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let grid = "methods = [\"taylor\", \"exact\"]\nm = [0, 4]\ns = [8]\n[matrix]\nfamily = \"tridiagonal\"\nn = 16\n";
    std::fs::write(d.join("g.toml"), grid).unwrap();
    let csv = ok(d, &["bench", "g.toml", "--no-timing"]);
    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), 3);
    assert!(rows[0][12].starts_with("usage:"), "{:?}", rows[0]);
    assert!(rows[1][12].is_empty() && !rows[1][8].is_empty());
    assert_eq!(csv, ok(d, &["bench", "g.toml", "--no-timing"]));
}

#[test]
fn bench_nte_error_decreases_in_m() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let grid = r#"
methods = ["taylor-nte", "chebyshev-nte"]
m = [5, 10, 15, 20, 25, 30]
s = [50, 100, 200, 300]
seeds = [0, 1, 2]

[matrix]
family = "tridiagonal"
n = 1024
"#;
    std::fs::write(d.join("g.toml"), grid).unwrap();
    let csv = ok(d, &["bench", "g.toml", "--no-timing"]);
    let summary: Vec<Vec<&str>> =
        csv.lines().skip_while(|l| *l != "# summary").skip(2).map(|l| l.split(',').collect()).collect();
    let means = |method: &str| -> Vec<f64> {
        summary.iter().filter(|r| r[0] == method).map(|r| r[6].parse().unwrap()).collect()
    };
    // Taylor terms are all nonnegative, so truncation error only shrinks.
    let taylor = means("taylor-nte");
    assert_eq!(taylor.len(), 6);
    assert!(taylor.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{taylor:?}");
    // Chebyshev error changes sign across the spectrum and is not monotone
    // step by step; it stays under n·u/(2m(m+1)) and shrinks overall.
    let cheb = means("chebyshev-nte");
    assert_eq!(cheb.len(), 6);
    let (n, h) = (1024.0, 6.5);
    for (i, e) in cheb.iter().enumerate() {
        let m = 5.0 * (i + 1) as f64;
        assert!(e * h <= n * (6.0 / n) / (2.0 * m * (m + 1.0)), "m={m}: {e}");
    }
    assert!(cheb[5] < cheb[0] / 10.0, "{cheb:?}");
}
