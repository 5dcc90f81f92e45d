use std::path::Path;
use std::process::Command as Process;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("holonomy").chain(args.iter().copied());
    let code = holonomy_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    out
}

fn rows(csv_text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let body = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, body)
}

fn column(csv_text: &str, name: &str) -> Vec<String> {
    let (h, body) = rows(csv_text);
    let idx = h.iter().position(|c| c == name).unwrap();
    body.into_iter().map(|r| r[idx].clone()).collect()
}

fn floats(v: &[String]) -> Vec<f64> {
    v.iter().map(|s| s.parse().unwrap()).collect()
}

#[test]
fn schemas_are_fixed() {
    let cases: [(&[&str], &str); 5] = [
        (&["chern"], "mu,trial,C,admissible,residual"),
        (&["mistake-ratio", "--eps1", "0", "--trials", "2"], "eps1,mistakes,trials,ratio"),
        (&["nfield"], "i,j,n"),
        (&["zak"], "ky,trial,phi,winding"),
        (&["egp"], "ky,trial,phiE,winding"),
    ];
    for (args, header) in cases {
        let out = ok(args);
        assert_eq!(out.lines().next().unwrap(), header);
        assert!(!out.contains('\r'));
        assert!(out.ends_with('\n'));
    }
}

#[test]
fn chern_phase_diagram() {
    let out = ok(&["chern", "--mu-list=1.9,2.1,-1,-3"]);
    assert_eq!(column(&out, "C"), ["1", "0", "-1", "0"]);
    assert!(column(&out, "admissible").iter().all(|a| a == "true"));
    assert!(floats(&column(&out, "residual")).iter().all(|&r| r < 1e-9));
}

#[test]
fn rows_follow_mu_then_trial() {
    let out = ok(&["chern", "--mu-list=2.1,1.9", "--trials", "3", "--mode", "noise-free-circuit"]);
    let (_, body) = rows(&out);
    let keys: Vec<(String, String)> = body.iter().map(|r| (r[0].clone(), r[1].clone())).collect();
    let want: Vec<(String, String)> = ["2.1", "1.9"]
        .iter()
        .flat_map(|m| (0..3).map(move |t| (m.to_string(), t.to_string())))
        .collect();
    assert_eq!(keys, want);
}

#[test]
fn noisy_chern_at_low_noise() {
    // The raw link moduli at eps1 = 0.005 dip just under the default floor of 0.05.
    let out = ok(&[
        "chern", "--mu=-1", "--mode", "noisy-circuit", "--eps1", "0.005", "--trials", "10",
        "--modulus-floor", "0", "--seed", "11",
    ]);
    let c = column(&out, "C");
    assert_eq!(c.len(), 10);
    assert!(c.iter().all(|v| v == "-1"));
}

#[test]
fn nfield_sums_to_chern() {
    for (mu, want) in [("1.9", 1), ("2.1", 0), ("-1", -1)] {
        let out = ok(&["nfield", &format!("--mu={mu}")]);
        let (_, body) = rows(&out);
        let (sum_row, cells) = body.split_last().unwrap();
        assert_eq!(sum_row[0], "sum");
        assert_eq!(cells.len(), 64);
        let n: Vec<i64> = cells.iter().map(|r| r[2].parse().unwrap()).collect();
        assert_eq!(n.iter().sum::<i64>(), want);
        assert_eq!(sum_row[2].parse::<i64>().unwrap(), want);
        assert!(n.iter().all(|v| v.abs() <= 2));
        // Canonical (i, j) order with j outermost.
        assert_eq!(cells[1][..2], ["1".to_string(), "0".to_string()]);
    }
}

#[test]
fn zak_and_egp_windings() {
    for (mu, want) in [("1.9", "1"), ("2.1", "0")] {
        let zak = ok(&["zak", "--mu", mu]);
        assert!(column(&zak, "winding").iter().all(|w| w == want));
        let egp = ok(&["egp", "--mu", mu, "--beta", "2.1", "--nl", "8"]);
        assert!(column(&egp, "winding").iter().all(|w| w == want));
    }
}

#[test]
fn egp_at_large_beta_matches_zak() {
    for mu in ["1.9", "2.1", "-1"] {
        let mu = format!("--mu={mu}");
        let zak = floats(&column(&ok(&["zak", &mu]), "phi"));
        let egp = floats(&column(&ok(&["egp", &mu, "--beta", "50"]), "phiE"));
        for (a, b) in zak.iter().zip(&egp) {
            let d = (a - b + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI) - std::f64::consts::PI;
            assert!(d.abs() < 1e-3);
        }
    }
}

#[test]
fn oracle_and_noise_free_circuit_agree() {
    for mu in ["-1", "1.9", "2.1", "-3", "0.5"] {
        let mu = format!("--mu={mu}");
        for cmd in ["chern", "zak", "egp", "nfield"] {
            let col = match cmd {
                "chern" => "C",
                "nfield" => "n",
                _ => "winding",
            };
            let a = column(&ok(&[cmd, &mu]), col);
            let b = column(&ok(&[cmd, &mu, "--mode", "noise-free-circuit"]), col);
            assert_eq!(a, b, "{cmd} {mu}");
        }
    }
}

#[test]
fn mistake_ratio_without_noise_is_zero() {
    let out = ok(&["mistake-ratio", "--eps1-list", "0,0.001", "--trials", "4", "--seed", "5"]);
    assert_eq!(column(&out, "mistakes"), ["0", "0"]);
    assert_eq!(column(&out, "ratio"), ["0.0", "0.0"]);
    assert_eq!(column(&out, "trials"), ["4", "4"]);
}

#[test]
fn mistake_ratio_counts_failures() {
    let (code, out, err) = run(&["mistake-ratio", "--eps1", "0.015", "--trials", "3"]);
    assert_eq!(code, 0);
    let r = floats(&column(&out, "ratio"))[0];
    assert!((0.0..=1.0).contains(&r));
    assert_eq!(r, 1.0);
    assert!(err.contains("below the floor"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = |name: &str, fmt: &str| -> Vec<String> {
        [
            "chern", "--mu-list=1.9,-1", "--mode", "noisy-circuit", "--eps1", "0.006", "--trials", "3",
            "--shots", "512", "--seed", "42", "--modulus-floor", "0", "--format", fmt, "--out",
        ]
        .iter()
        .map(|s| s.to_string())
        .chain(std::iter::once(dir.path().join(name).display().to_string()))
        .collect()
    };
    for fmt in ["csv", "json"] {
        let a = args(&format!("a.{fmt}"), fmt);
        let b = args(&format!("b.{fmt}"), fmt);
        assert_eq!(run(&a.iter().map(String::as_str).collect::<Vec<_>>()).0, 0);
        assert_eq!(run(&b.iter().map(String::as_str).collect::<Vec<_>>()).0, 0);
        let fa = std::fs::read(dir.path().join(format!("a.{fmt}"))).unwrap();
        let fb = std::fs::read(dir.path().join(format!("b.{fmt}"))).unwrap();
        assert!(!fa.is_empty());
        assert_eq!(fa, fb);
    }
    let zak = |seed: &str| {
        ok(&["zak", "--mode", "noisy-circuit", "--eps1", "0.002", "--trials", "2", "--seed", seed])
    };
    assert_eq!(zak("1"), zak("1"));
    assert_ne!(zak("1"), zak("2"));
}

#[test]
fn csv_and_json_carry_the_same_values() {
    let cases: [&[&str]; 5] = [
        &["chern", "--mu-list=1.9,2.1", "--mode", "noisy-circuit", "--eps1", "0.004", "--trials", "2"],
        &["mistake-ratio", "--eps1-list", "0,0.002", "--trials", "2"],
        &["nfield", "--mu", "1.9"],
        &["zak", "--mu", "2.1", "--mode", "noisy-circuit", "--eps1", "0.003", "--trials", "2"],
        &["egp", "--mu", "1.9", "--beta", "4.2"],
    ];
    for args in cases {
        let csv_out = ok(args);
        let mut jargs = args.to_vec();
        jargs.extend(["--format", "json"]);
        let json: Value = serde_json::from_str(&ok(&jargs)).unwrap();
        let (header, body) = rows(&csv_out);
        let meta = &json["meta"];
        assert_eq!(meta["artifact_version"], env!("CARGO_PKG_VERSION"));
        assert_eq!(meta["config"]["command"], args[0]);
        let cols: Vec<&str> = meta["columns"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
        assert_eq!(cols, header);
        let records = json["records"].as_array().unwrap();
        let body: Vec<_> = body.into_iter().filter(|r| r[0] != "sum").collect();
        assert_eq!(records.len(), body.len());
        for (rec, row) in records.iter().zip(&body) {
            for (k, cell) in header.iter().zip(row) {
                let v = &rec[k.as_str()];
                let text = if v.is_null() { String::new() } else { v.to_string() };
                assert_eq!(&text, cell, "{args:?} column {k}");
            }
        }
        if args[0] == "nfield" {
            assert_eq!(json["sum"], 1);
        }
    }
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "mu_list = [2.1, 1.9]\ntrials = 2\nformat = \"json\"\n").unwrap();
    let p = path.to_str().unwrap();
    let json: Value = serde_json::from_str(&ok(&["chern", "--config", p])).unwrap();
    assert_eq!(json["records"].as_array().unwrap().len(), 4);
    assert_eq!(json["meta"]["config"]["mu_list"], serde_json::json!([2.1, 1.9]));
    let out = ok(&["chern", "--config", p, "--mu", "-1", "--format", "csv"]);
    assert_eq!(column(&out, "C"), ["-1", "-1"]);
}

#[test]
fn config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.toml");
    std::fs::write(&empty, "mu_list = []\n").unwrap();
    let unknown = dir.path().join("unknown.toml");
    std::fs::write(&unknown, "shots = 10\nnoise = 0.1\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["chern", "--config", empty.to_str().unwrap()],
        vec!["chern", "--config", unknown.to_str().unwrap()],
        vec!["chern", "--config", "/nonexistent/run.toml"],
        vec!["chern", "--trials", "0"],
        vec!["chern", "--shots", "0"],
        vec!["chern", "--mode", "hardware"],
        vec!["chern", "--format", "xml"],
        vec!["chern", "--eps1", "1.5"],
        vec!["chern", "--mu", "2.0"],
        vec!["zak", "--mu-list=1,2.1"],
        vec!["nfield", "--trials", "3"],
        vec!["egp", "--beta", "0"],
        vec!["egp", "--mesh", "8x8", "--nl", "6"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let (code, out, err) = run(&args);
        assert_eq!(code, 1, "{args:?}");
        assert!(out.is_empty(), "{args:?}");
        assert!(!err.is_empty());
    }
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn measurement_failure_exits_2() {
    let (code, out, err) = run(&["chern", "--mode", "noisy-circuit", "--eps1", "0.02", "--trials", "2"]);
    assert_eq!(code, 2);
    assert_eq!(rows(&out).1.len(), 2);
    assert!(err.contains("measurement failed"));
    let (code, _, _) = run(&["zak", "--mode", "noisy-circuit", "--eps1", "0.02", "--trials", "2"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["nfield", "--mode", "noisy-circuit", "--eps1", "0.02"]);
    assert_eq!(code, 2);
}

#[test]
fn binary_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let status = Process::new(env!("CARGO_BIN_EXE_holonomy"))
        .args(["chern", "--mu=-1", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(Path::new(&out)).unwrap();
    assert_eq!(column(&text, "C"), ["-1"]);
    let status = Process::new(env!("CARGO_BIN_EXE_holonomy"))
        .args(["chern", "--trials", "0"])
        .stderr(std::process::Stdio::null())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}
