use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn osb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_osb"))
        .args(args)
        .output()
        .unwrap()
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn default_run_streams_csv() {
    let out = osb(&["--max-iters", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("method,strategy,seed,normalized_iteration,error")
    );
    assert_eq!(
        csv.lines()
            .filter(|l| l.starts_with("osb,greedy,,"))
            .count(),
        6
    );
    assert_eq!(csv.lines().filter(|l| l.starts_with("jacobi,")).count(), 6);
    assert_eq!(
        csv.lines()
            .filter(|l| l.starts_with("gauss-seidel,"))
            .count(),
        6
    );
    let summary = String::from_utf8(out.stderr).unwrap();
    assert_eq!(summary.lines().count(), 3, "{summary}");
}

#[test]
fn summary_goes_to_stdout_with_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let out = osb(&["--methods", "osb", "--out", path_arg(&csv)]);
    assert_eq!(out.status.code(), Some(0));
    let summary = String::from_utf8(out.stdout).unwrap();
    assert!(summary.starts_with("osb"), "{summary}");
    assert!(summary.contains("converged"), "{summary}");
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.lines().count() > 2);
}

#[test]
fn fixed_point_start_converges_at_once() {
    let out = osb(&["--x0", "fixed-point", "--methods", "osb"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 1, "{csv}");
    assert!(rows[0].starts_with("osb,greedy,,0,"));
}

#[test]
fn identity_matrix_is_fixed_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let mtx = dir.path().join("id.mtx");
    fs::write(
        &mtx,
        "%%MatrixMarket matrix coordinate real general\n3 3 3\n1 1 1\n2 2 1\n3 3 1\n",
    )
    .unwrap();
    let x0 = dir.path().join("x0.txt");
    fs::write(&x0, "# start\n1.5\n-2\n0.25\n").unwrap();
    let out = osb(&["--matrix", path_arg(&mtx), "--x0", path_arg(&x0)]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = String::from_utf8(out.stdout).unwrap();
    // Residual metric; every method starts (and stays) at zero error.
    for row in csv.lines().skip(1) {
        assert!(row.ends_with(",0"), "{row}");
    }
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["--strategy", "greedy", "--strategy", "cyclic"][..],
        &["--bogus"],
        &["--problem", "example4"],
        &["--tol", "0"],
        &["--matrix", "m.mtx"],
        &["--methods", "sor"],
        &["--x0", "1,2"],
    ] {
        let out = osb(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn io_errors_exit_4() {
    let out = osb(&["--matrix", "/nonexistent/m.mtx", "--x0", "zeros"]);
    assert_eq!(out.status.code(), Some(4));
    let out = osb(&["--out", "/nonexistent/dir/t.csv"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn divergence_exits_3_after_writing_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mtx = dir.path().join("grow.mtx");
    fs::write(
        &mtx,
        "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.5\n2 2 0.5\n",
    )
    .unwrap();
    let csv = dir.path().join("t.csv");
    let out = osb(&[
        "--matrix",
        path_arg(&mtx),
        "--x0",
        "1,1",
        "--max-iters",
        "5000",
        "--out",
        path_arg(&csv),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stdout).unwrap().contains("diverged"));
    assert!(fs::read_to_string(&csv).unwrap().lines().count() > 1);
}

#[test]
fn random_strategy_records_seed_and_is_deterministic() {
    let a = osb(&["--strategy", "random", "--seed", "11", "--methods", "osb"]);
    let b = osb(&["--strategy", "random", "--seed", "11", "--methods", "osb"]);
    let c = osb(&["--strategy", "random", "--seed", "12", "--methods", "osb"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let csv = String::from_utf8(a.stdout).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("osb,random,11,0,"));
}

#[test]
fn help_exits_0() {
    let out = osb(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("--max-iters"));
}
