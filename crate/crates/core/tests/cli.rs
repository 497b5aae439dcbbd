use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const THREE_SLICES: &str = include_str!("data/three_slices.scc");

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphcode"))
        .args(args)
        .env_remove("GRAPHCODE_JOBS")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Orbit cloud, density-Rips complex, returns the complex path.
fn small_complex(dir: &Path, seed: &str) -> std::path::PathBuf {
    let csv = dir.join(format!("cloud{seed}.csv"));
    let txt = dir.join(format!("cloud{seed}.txt"));
    ok(&[
        "gen-orbit",
        "--r",
        "4.1",
        "--points",
        "60",
        "--seed",
        seed,
        "--out",
        p(&csv),
    ]);
    ok(&[
        "build-filtration",
        "--input",
        p(&csv),
        "--out",
        p(&txt),
        "--r-max",
        "0.25",
        "--density-radius",
        "0.2",
    ]);
    txt
}

#[test]
fn three_slices_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("d.scc");
    fs::write(&input, THREE_SLICES).unwrap();
    ok(&["compute", p(&input), "--slices", "3", "--threshold", "0"]);
    let json = fs::read_to_string(dir.path().join("d.graphcode.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["nodes"].as_array().unwrap().len(), 4);
    assert_eq!(v["edges"].as_array().unwrap().len(), 4);
    assert_eq!(v["ratio_suppressed"], false);
}

#[test]
fn compute_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let txt = small_complex(dir.path(), "3");
    ok(&[
        "compute",
        p(&txt),
        "--degree",
        "1",
        "--slices",
        "4",
        "--threshold",
        "0.01",
        "--keep-representatives",
    ]);
    let full = dir.path().join("cloud3.full.graphcode.json");
    let report = ok(&["verify", "--input", p(&txt), "--graphcode", p(&full)]);
    let v: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(v["ok"], true);

    // Break the file: drop all edges.
    let mut gc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&full).unwrap()).unwrap();
    let had_edges = !gc["edges"].as_array().unwrap().is_empty();
    gc["edges"] = serde_json::json!([]);
    fs::write(&full, gc.to_string()).unwrap();
    let out = run(&["verify", "--input", p(&txt), "--graphcode", p(&full)]);
    if had_edges {
        assert_eq!(out.status.code(), Some(1));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["edge_identity_ok"], false);
    }
}

#[test]
fn jobs_do_not_change_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let inputs: Vec<_> = ["1", "2", "3", "4"]
        .iter()
        .map(|s| small_complex(dir.path(), s))
        .collect();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let mut args = vec!["compute", "--slices", "5", "--out-dir"];
    let mut one = args.clone();
    one.push(p(&a));
    one.extend(["--jobs", "1"]);
    one.extend(inputs.iter().map(|i| p(i)));
    ok(&one);
    args.push(p(&b));
    args.extend(["--jobs", "4"]);
    args.extend(inputs.iter().map(|i| p(i)));
    ok(&args);
    for i in 1..=4 {
        let name = format!("cloud{i}.graphcode.json");
        assert_eq!(
            fs::read(a.join(&name)).unwrap(),
            fs::read(b.join(&name)).unwrap()
        );
    }
}

#[test]
fn generators_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for (sub, extra) in [
        ("gen-shapes", vec!["--class", "2", "--points", "300"]),
        ("gen-orbit", vec!["--r", "2.5", "--points", "200"]),
        ("gen-process", vec!["--kind", "strauss"]),
    ] {
        for out in ["x.csv", "y.csv"] {
            let mut args = vec![sub, "--seed", "9", "--out"];
            let path = d.join(out);
            args.push(p(&path));
            args.extend(extra.iter());
            ok(&args);
        }
        assert_eq!(
            fs::read(d.join("x.csv")).unwrap(),
            fs::read(d.join("y.csv")).unwrap(),
            "{sub}"
        );
        let manifest: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(d.join("x.manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["seed"], 9);
    }
    ok(&[
        "gen-process",
        "--kind",
        "poisson",
        "--count",
        "3",
        "--out-dir",
        p(&d.join("many")),
    ]);
    assert!(d.join("many/poisson_2.csv").exists());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["compute"]).status.code(), Some(2));
    assert_eq!(
        run(&["compute", "x", "--slices", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["compute", "x", "--primary-parameter", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["gen-process", "--kind", "gibbs", "--out", "x"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn bad_inputs_exit_1_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.scc");
    fs::write(&bad, "scc2020\n2\n1 1\n1 1 ; 0\n2 0 ;\n").unwrap();
    let out = run(&["compute", p(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "{err}");

    let missing = dir.path().join("missing.txt");
    assert_eq!(run(&["compute", p(&missing)]).status.code(), Some(1));
    assert_eq!(
        run(&["compute", p(&bad), "--threshold=-1"]).status.code(),
        Some(2)
    );
}

#[test]
fn betti_and_bench_emit_json() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("d.scc");
    fs::write(&input, THREE_SLICES).unwrap();
    let v: serde_json::Value = serde_json::from_str(&ok(&[
        "betti",
        "--input",
        p(&input),
        "--x",
        "2",
        "--y",
        "2",
    ]))
    .unwrap();
    assert_eq!(v["betti"], 2);
    let v: serde_json::Value = serde_json::from_str(&ok(&[
        "bench",
        "--input",
        p(&input),
        "--slices",
        "3",
        "--runs",
        "5",
    ]))
    .unwrap();
    assert_eq!(v["runs"], 5);
    assert!(v["batched_seconds"].as_f64().unwrap() >= 0.0);
    assert!(v["naive_seconds"].as_f64().unwrap() >= 0.0);
}
