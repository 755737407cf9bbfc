use std::path::Path;
use std::process::{Command, Output};

fn nonlocal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonlocal")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = nonlocal(&["solve", "--t", "10", "--out", arg(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["solution.csv", "cloud.csv", "summary.txt"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains("converged = true"));
    let rows = std::fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    assert_eq!(rows.lines().next().unwrap(), "index,x0,x1,x2,weight,u,exact");
    assert_eq!(rows.lines().count(), 1 + 130);
}

#[test]
fn matrix_export_from_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("s.coo");
    let out = nonlocal(&["solve", "--t", "5", "--out", arg(dir.path()), "--export-matrix", arg(&m)]);
    assert_eq!(code(&out), 0);
    assert!(std::fs::read_to_string(dir.path().join("s.coo.header")).unwrap().contains("n0 = 40"));
}

#[test]
fn bad_parameters_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = arg(dir.path());
    assert_eq!(code(&nonlocal(&["solve", "--case", "torus", "--out", d])), 2);
    assert_eq!(code(&nonlocal(&["solve", "--variant", "lambda", "--lambda", "-1", "--out", d])), 2);
    assert_eq!(code(&nonlocal(&["converge", "--t", "5,10", "--out", d])), 2);
    assert_eq!(code(&nonlocal(&["converge", "--t", "5,x,10,20", "--out", d])), 2);
    assert_eq!(code(&nonlocal(&["solve", "--bogus"])), 2);
    assert_eq!(code(&nonlocal(&["lemmas", "--case", "hemisphere3", "--out", d])), 2);
}

#[test]
fn unreachable_tolerance_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = nonlocal(&["solve", "--t", "5", "--tol", "1e-40", "--out", arg(dir.path())]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains("converged = false"));
}

#[test]
fn io_failures_exit_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let inside = blocker.join("sub");
    assert_eq!(code(&nonlocal(&["solve", "--t", "5", "--out", arg(&inside)])), 4);
    assert_eq!(code(&nonlocal(&["lemmas", "--out", arg(&inside)])), 4);
    assert_eq!(code(&nonlocal(&["solve", "--config", "/no/such/config", "--out", arg(dir.path())])), 4);
    let missing = dir.path().join("none.tab");
    assert_eq!(
        code(&nonlocal(&["solve", "--kernel-table", arg(&missing), "--out", arg(dir.path())])),
        4
    );
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    std::fs::write(&cfg, "# small sweep\ncase = hemisphere3\nt = 5,10,15,20\nseeds = 1\nno_timing = true\n").unwrap();
    let out = nonlocal(&["converge", "--config", arg(&cfg), "--case", "hemisphere2", "--out", arg(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = dir.path().join("converge_hemisphere2_full_none.csv");
    let text = std::fs::read_to_string(csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "case,mode,variant,t,delta,n0,m0,seed,e2,iters,wall_ms");
    assert_eq!(lines.len(), 6);
    assert!(lines[1..5].iter().all(|l| l.starts_with("hemisphere2,full,none,") && l.ends_with(",0")));
    assert!(lines[5].starts_with("#slope="));
    assert!(!dir.path().join("converge_hemisphere3_full_none.csv").exists());
}

#[test]
fn untimed_sweeps_are_byte_identical() {
    let run = |d: &Path| {
        let out = nonlocal(&["converge", "--t", "5,10,15,20", "--seeds", "2", "--mode", "reduced", "--no-timing", "--out", arg(d)]);
        assert_eq!(code(&out), 0);
        std::fs::read(d.join("converge_hemisphere2_reduced_none.csv")).unwrap()
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = run(a.path());
    assert_eq!(first, run(b.path()));
    let text = String::from_utf8(first).unwrap();
    let first_row = text.lines().nth(1).unwrap();
    assert!(first_row.starts_with("hemisphere2,reduced,none,5,4.472135955000e-1,40,15,1,"), "{first_row}");
}

#[test]
fn lemmas_report_orders() {
    let dir = tempfile::tempdir().unwrap();
    let out = nonlocal(&["lemmas", "--out", arg(dir.path())]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("C_R = 0.04056958"));
    let csv = std::fs::read_to_string(dir.path().join("lemmas.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("#boundary_order=")));
}
