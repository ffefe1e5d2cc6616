use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hweno-sn"))
}

#[test]
fn refine_writes_table_and_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["refine", "--problem", "1", "--mesh", "10,20", "--tol", "1e-12", "--no-timing", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let table = fs::read_to_string(dir.path().join("table.csv")).unwrap();
    assert_eq!(stdout, table);
    assert!(table.starts_with("N,epsilon,L1,L1_order,Linf,Linf_order,iters,seconds,converged\n"));
    for f in ["report.json", "phi_avg.csv", "phi_edge.csv", "history.csv", "runs/N20_eps1/history.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let status = bin()
            .args(["solve", "--problem", "3", "--tol", "1e-12", "--no-timing", "--out"])
            .arg(d.path())
            .status()
            .unwrap();
        assert!(status.success());
    }
    for f in ["table.csv", "report.json", "phi_avg.csv", "phi_edge.csv", "history.csv"] {
        assert_eq!(
            fs::read(dirs[0].path().join(f)).unwrap(),
            fs::read(dirs[1].path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "problem = 2\nmesh = [10]\ntol = 1e-10\nepsilon = 0.5\n").unwrap();
    let out = bin()
        .args(["solve", "--mesh", "12", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().nth(1).unwrap().starts_with("12,0.5,"), "{stdout}");
}

#[test]
fn unconverged_run_exits_with_one() {
    let out = bin()
        .args(["solve", "--problem", "2", "--max-iter", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("iteration cap"));
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "problem = 1\nmesh = [10]\nomgea = 0.5\n").unwrap();
    let out = bin().args(["solve", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("omgea") && err.contains("line 3"), "{err}");
    let out = bin().args(["solve", "--problem", "11"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["refine", "--problem", "1", "--mesh", "20,10"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_check_passes() {
    let out = bin().args(["oracle-check", "--problem", "7", "--mesh", "5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("N,unknowns,residual,max_difference,iters,pass"));
    assert!(stdout.trim_end().ends_with("true"), "{stdout}");
}
