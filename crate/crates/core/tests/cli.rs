use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pointtrack"))
}

#[test]
fn mesh_dump_writes_the_requested_level() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mesh.txt");
    let status = bin().args(["mesh-dump", "--level", "2", "--out"]).arg(&out).status().unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), "81 128");
    assert_eq!(text.lines().count(), 1 + 81 + 128);
}

#[test]
fn study_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        let output = bin()
            .args(["study", "--variant", "postproc", "--levels", "1..3", "--bounds", "-0.2,0.2", "--out"])
            .arg(&out)
            .args(extra)
            .output()
            .unwrap();
        assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
        std::fs::read(&out).unwrap()
    };
    let a = run("a.csv", &[]);
    let b = run("b.csv", &[]);
    let c = run("c.csv", &["--parallel-levels"]);
    assert_eq!(a, b);
    assert_eq!(a, c);
    let text = String::from_utf8(a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "level,h,n_vertices,n_cells,error,eoc");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("1,") && lines[1].ends_with(','));
}

#[test]
fn configuration_errors_exit_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "levels = 5..2\n").unwrap();
    let status = bin().args(["study", "--config"]).arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(3));
    let status = bin().args(["study", "--levels", "2..9"]).status().unwrap();
    assert_eq!(status.code(), Some(3));
    let status = bin().args(["study", "--config"]).arg(dir.path().join("missing.cfg")).status().unwrap();
    assert_eq!(status.code(), Some(3));
    let out = dir.path().join("never.csv");
    let status = bin()
        .args(["study", "--variant", "cellwise", "--levels", "1..2", "--tol", "1e-20", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
    assert!(!out.exists());
}

#[test]
fn oracle_command_passes_on_coarse_levels() {
    for bounds in ["-1,1", "-0.2,0.2", "-inf,inf"] {
        let output = bin().args(["oracle", "--levels", "0..2", "--bounds", bounds]).output().unwrap();
        let stdout = String::from_utf8_lossy(&output.stdout);
        assert!(output.status.success(), "{bounds}: {stdout}");
        assert_eq!(stdout.lines().filter(|l| l.ends_with("PASS")).count(), 3);
    }
    let status = bin().args(["oracle", "--levels", "0..3"]).status().unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn solve_writes_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fields.csv");
    let output = bin()
        .args(["solve", "--level", "2", "--variant", "variational", "--bounds", "-0.2,0.2", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(String::from_utf8_lossy(&output.stdout).contains("L2 control error"));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 2 + 81 + 128);
}
