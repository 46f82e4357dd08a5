use std::path::Path;
use std::process::{Command, Output};

fn hofj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hofj")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

/// Two triangles joined by a bridge, plus a detached pair.
const SMALL: &str = "% toy\n1 2\n2 3\n3 1\n3 4\n4 5\n5 6\n6 4\n10 11\n";

#[test]
fn prepare_reports_largest_component() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "g.txt", SMALL);
    let ids = dir.path().join("ids.txt");
    let lcc = dir.path().join("lcc.txt");
    let o = hofj(&["prepare", &f, "--id-map", ids.to_str().unwrap(), "--out", lcc.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("n'=6 m'=7"));
    assert_eq!(std::fs::read_to_string(&ids).unwrap().lines().next(), Some("0 1"));

    // Preparing the already-connected output changes nothing.
    let o = hofj(&["prepare", lcc.to_str().unwrap()]);
    assert!(stdout(&o).contains("n'=6 m'=7"));
}

#[test]
fn malformed_input_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.txt", "0 1\n1\n");
    let o = hofj(&["prepare", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn example_tree_passes() {
    let o = hofj(&["example-tree"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(!text.contains("FAIL"));
    assert!(text.contains("3.532"));
}

#[test]
fn gen_opinions_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.json");
    for (out, extra) in [(&a, None), (&b, Some("--json"))] {
        let mut args = vec!["gen-opinions", "--n", "50", "--distribution", "exponential", "--seed", "3", "--out", out.to_str().unwrap()];
        args.extend(extra);
        assert!(hofj(&args).status.success());
    }
    let text = hofj::io::read_vector(&a).unwrap();
    let json = hofj::io::read_vector(&b).unwrap();
    assert_eq!(text, json);
    assert_eq!(text.iter().copied().fold(0.0, f64::max), 1.0);
    let res = hofj::io::read_vector(&a.with_extension("resistance")).unwrap();
    assert!(res.iter().all(|&x| x > 0.0 && x < 1.0));
}

#[test]
fn sparsify_exports_edges_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "g.txt", SMALL);
    let prefix = dir.path().join("sp");
    let o = hofj(&["sparsify", &f, "--seed", "9", "--diagnostics", "--trace", "--out", prefix.to_str().unwrap()]);
    assert!(o.status.success());
    let edges = std::fs::read_to_string(prefix.with_extension("edges")).unwrap();
    let pairs: Vec<(usize, usize)> = edges
        .lines()
        .map(|l| {
            let mut it = l.split_whitespace().map(|t| t.parse::<f64>().unwrap());
            (it.next().unwrap() as usize, it.next().unwrap() as usize)
        })
        .collect();
    assert!(pairs.windows(2).all(|w| w[0] < w[1]));
    let side: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(prefix.with_extension("json")).unwrap()).unwrap();
    assert_eq!(side["budget"], 10 * 2 * 7);
    assert_eq!(side["mode"], "literal-uniform");
    assert!(side["epsilon_estimate"].is_f64());
    let trace = std::fs::read_to_string(prefix.with_extension("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 101);
}

#[test]
fn compare_writes_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "g.txt", SMALL);
    let out = dir.path().join("r.jsonl");
    let o = hofj(&["compare", &f, "--seeds", "2", "--single-thread", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let lines: Vec<serde_json::Value> = std::fs::read_to_string(&out)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0]["solver"], "exact");
    assert_eq!(lines[1]["solver"], "approx");
    assert_eq!(lines[1]["mae_sigma"], lines[0]["mae_sigma"]);
    assert_eq!(lines[1]["n"], 6);
    assert_eq!(lines[1]["ingest"]["input_edges"], 8);

    let again = dir.path().join("r2.jsonl");
    hofj(&["compare", &f, "--seeds", "2", "--single-thread", "--out", again.to_str().unwrap()]);
    let strip = |p: &Path| -> Vec<serde_json::Value> {
        std::fs::read_to_string(p)
            .unwrap()
            .lines()
            .map(|l| {
                let mut v: serde_json::Value = serde_json::from_str(l).unwrap();
                v["wall_time_seconds"] = 0.into();
                v["setup_seconds"] = 0.into();
                v
            })
            .collect()
    };
    assert_eq!(strip(&out), strip(&again));
}

#[test]
fn failing_trend_check_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "g.txt", SMALL);
    // Listing the budgets in decreasing order makes MAE rise along the sweep.
    let o = hofj(&["sweep-m", &f, "--ks", "200,1", "--seeds", "3", "--out", dir.path().join("s.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL median MAE non-increasing"));
}

#[test]
fn sweep_iters_plateaus() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "g.txt", SMALL);
    let o = hofj(&["sweep-iters", &f, "--grid", "0,50,100", "--out", dir.path().join("i.csv").to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS plateau"));
}

#[test]
fn bad_beta_is_rejected() {
    let o = hofj(&["sparsify", "x", "--beta", "0.5,0.6", "--out", "y"]);
    assert_eq!(o.status.code(), Some(2));
}
