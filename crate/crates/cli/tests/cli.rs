//! End-to-end checks of the binary: reproducibility and table content.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quickxsort"))
}

fn run_ok(args: &[&str]) -> String {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 output")
}

#[test]
fn bench_csv_is_byte_identical_for_same_seed() {
    let args = [
        "bench",
        "--alg",
        "quickheapsort",
        "--n",
        "2000",
        "--t",
        "1",
        "--trials",
        "16",
        "--seed",
        "9",
        "--format",
        "csv",
    ];
    let a = run_ok(&args);
    let b = run_ok(&args);
    assert_eq!(a, b);
    assert!(a.starts_with(
        "algorithm,n,t,trials,mean,stddev,linear_coeff,predicted,delta\n"
    ));

    let mut different = args;
    different[10] = "10";
    assert_ne!(run_ok(&different), a);
}

#[test]
fn table1_prints_known_entries() {
    let out = run_ok(&["table1"]);
    assert!(out.contains("0.32098"), "{out}");
    assert!(out.contains("0.18149"), "{out}");
    assert!(out.contains("0 (limit)"), "{out}");
}

#[test]
fn predict_matches_published_estimate() {
    let out = run_ok(&[
        "predict",
        "--alg",
        "quickheapsort",
        "--n",
        "1000000",
        "--t",
        "0",
        "--format",
        "csv",
    ]);
    assert!(out.contains("22013622") || out.contains("22013623"), "{out}");
}

#[test]
fn oracle_reports_pass() {
    let out = run_ok(&["oracle", "--n-max", "6", "--t", "0", "--alg", "quickmergesort-td"]);
    assert!(out.contains("8/3"), "{out}");
    assert!(!out.contains("FAIL"), "{out}");
}

#[test]
fn unknown_algorithm_fails() {
    let out = bin()
        .args(["bench", "--alg", "bogosort", "--n", "10"])
        .output()
        .expect("binary runs");
    assert!(!out.status.success());
}
