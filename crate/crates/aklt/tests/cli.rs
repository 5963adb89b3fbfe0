use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use aklt::formats::{read_curves, OracleDoc, PercolationDoc, ReduceDoc, StatsDoc};

fn aklt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aklt"))
        .args(args)
        .env_remove(aklt::cli::OUTPUT_DIR_ENV)
        .output()
        .unwrap()
}

struct TempDir(PathBuf);

impl TempDir {
    fn new(tag: &str) -> Self {
        let p = std::env::temp_dir().join(format!("aklt-cli-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&p);
        fs::create_dir_all(&p).unwrap();
        TempDir(p)
    }

    fn path(&self) -> &Path {
        &self.0
    }

    fn str(&self) -> &str {
        self.0.to_str().unwrap()
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

const SMALL_CHAIN: [&str; 8] = ["--chains", "2", "--burn-in", "20", "--sweeps", "40", "--interval", "10"];

#[test]
fn help_and_version_succeed() {
    for args in [&["--help"][..], &["--version"], &["stats", "--help"]] {
        let out = aklt(args);
        assert!(out.status.success(), "{args:?}");
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn bad_arguments_exit_with_usage_code() {
    for args in [
        &["stats", "--lattice", "honeycomb", "--L", "7"][..],
        &["stats", "--lattice", "cross", "--L", "8"],
        &["stats", "--lattice", "nonsense", "--L", "8"],
        &["percolation", "--lattice", "star", "--L", "6", "--grid", "0.5,0.1"],
        &["oracle", "--graph", "dodecahedron"],
        &["frobnicate"],
    ] {
        let out = aklt(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("aklt:"));
    }
}

#[test]
fn runtime_failures_exit_with_runtime_code() {
    let dir = TempDir::new("runtime");
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = aklt(&[
        "reduce",
        "--lattice",
        "star",
        "--L",
        "6",
        "--pattern",
        dir.path().join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let target = blocker.join("out.json");
    let out = aklt(&[
        "lattice",
        "--lattice",
        "honeycomb",
        "--L",
        "4",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn stats_document_describes_the_run() {
    let mut args = vec![
        "-q",
        "stats",
        "--lattice",
        "square-octagon",
        "--L",
        "8,16",
        "--seed",
        "3",
    ];
    args.extend(SMALL_CHAIN);
    let out = aklt(&args);
    assert!(out.status.success());
    let doc: StatsDoc = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc.sizes.iter().map(|s| s.size).collect::<Vec<_>>(), vec![8, 16]);
    assert_eq!(doc.config["chain"]["seed"], 3);
    assert_eq!(doc.config["command"], "stats");
    for s in &doc.sizes {
        assert_eq!(s.stats.n_samples, 8);
        assert!(s.stats.avg_domain_size.mean >= 1.0);
    }
    assert_eq!(doc.extrapolation.len(), 4);
}

#[test]
fn output_directory_from_flag_or_environment() {
    let dir = TempDir::new("outdir");
    let out = aklt(&[
        "-q",
        "--out-dir",
        dir.str(),
        "lattice",
        "--lattice",
        "star",
        "--L",
        "6",
        "--out",
        "a.json",
    ]);
    assert!(out.status.success());
    assert!(dir.path().join("a.json").exists());

    let out = Command::new(env!("CARGO_BIN_EXE_aklt"))
        .args([
            "-q",
            "lattice",
            "--lattice",
            "star",
            "--L",
            "6",
            "--out",
            "nested/b.json",
        ])
        .env(aklt::cli::OUTPUT_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        fs::read(dir.path().join("a.json")).unwrap(),
        fs::read(dir.path().join("nested/b.json")).unwrap()
    );
}

#[test]
fn percolation_files_are_independent_of_worker_count() {
    let dir = TempDir::new("threads");
    let mut runs = Vec::new();
    for (threads, name) in [("1", "one"), ("4", "four")] {
        let mut args = vec![
            "-q",
            "--threads",
            threads,
            "--out-dir",
            dir.str(),
            "percolation",
            "--lattice",
            "honeycomb",
            "--L",
            "8,16",
            "--trials",
            "3",
            "--seed",
            "9",
            "--out",
            name,
        ];
        args.extend(SMALL_CHAIN);
        assert!(aklt(&args).status.success());
        let json = fs::read(dir.path().join(format!("{name}.json"))).unwrap();
        let csv = fs::read(dir.path().join(format!("{name}.csv"))).unwrap();
        runs.push((json, csv));
    }
    assert_eq!(runs[0], runs[1]);

    let doc: PercolationDoc = serde_json::from_slice(&runs[0].0).unwrap();
    let rows = read_curves(&runs[0].1[..]).unwrap();
    assert_eq!(rows, doc.curves);
    assert_eq!(doc.thresholds.len(), 2);
    for r in &rows {
        assert!((0.0..=1.0).contains(&r.p_span));
        assert_eq!(r.n_samples, 8);
        assert_eq!(r.n_trials, 3);
    }
}

#[test]
fn csv_to_stdout_matches_curve_rows() {
    let args = [
        "-q",
        "bare",
        "--lattice",
        "kagome",
        "--L",
        "12,24",
        "--trials",
        "50",
        "--chunks",
        "4",
        "--format",
        "csv",
    ];
    let out = aklt(&args);
    assert!(out.status.success());
    let rows = read_curves(&out.stdout[..]).unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.lattice == "kagome" && r.mode == "bond"));
}

#[test]
fn star_reduction_from_the_command_line() {
    let dir = TempDir::new("reduce");
    let graph = dir.path().join("g.json");
    let out = aklt(&[
        "-q",
        "reduce",
        "--lattice",
        "star",
        "--L",
        "6",
        "--graph-out",
        graph.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc: ReduceDoc = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc.isomorphic_to_honeycomb);
    assert!(doc.check.cubic && doc.check.bipartite);
    let g: aklt::formats::GraphDoc = serde_json::from_slice(&fs::read(graph).unwrap()).unwrap();
    assert_eq!(g.to_graph().unwrap().n_vertices(), doc.check.n_vertices);
}

#[test]
fn oracle_on_k4_is_within_tolerance() {
    let out = aklt(&["-q", "oracle", "--graph", "k4", "--seed", "4"]);
    assert!(out.status.success());
    let doc: OracleDoc = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc.n_states, 81);
    assert_eq!(doc.n_samples, 1_000_000);
    assert_eq!(doc.local_global_mismatches, 0);
    assert!(doc.tv_distance < 0.01, "{}", doc.tv_distance);
}
