use std::path::Path;
use std::process::{Command, Output};

fn biotvem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biotvem"))
        .args(args)
        .env_remove("BIOTVEM_THREADS")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const SMALL: &str = r#"
[mesh]
structured = 2

[material]
lambda = 1
mu = 1
alpha = 1
s0 = 0.1
permeability = 1

[time]
tf = 0.2
dt = 0.1
initial = "zero"

[output]
vtk_every = 1

[bc.zmax]
traction = [0, 0, "-t"]
pressure = 0
"#;

fn write_config(dir: &Path, text: &str) -> String {
    let mut body = text.to_string();
    for side in ["xmin", "xmax", "ymin", "ymax", "zmin"] {
        body += &format!("[bc.{side}]\ndisplacement = [0, 0, 0]\npressure = 0\n");
    }
    let path = dir.join("run.toml");
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn mesh_info_reports_counts() {
    let out = biotvem(&["mesh-info", "structured:2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("cells    8"));
    assert!(text.contains("faces    36"));
    assert!(text.contains("h        0.866025"));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(biotvem(&["bogus"]).status.code(), Some(1));
    assert_eq!(biotvem(&["mesh-info", "structured:x"]).status.code(), Some(1));
    assert_eq!(biotvem(&["mesh-info", "missing.polymesh"]).status.code(), Some(1));
    assert_eq!(biotvem(&["--help"]).status.code(), Some(0));
}

#[test]
fn convergence_writes_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = biotvem(&[
        "convergence",
        "--case",
        "test1",
        "--meshes",
        "structured:1,2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("test1.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "h,E_u,E_sigma,E_p,E_w,rate_u,rate_sigma,rate_p,rate_w");
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[2].split(',').count(), 9);
}

#[test]
fn solve_writes_vtk_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out_dir = dir.path().join("vtk");
    let out = biotvem(&["solve", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["state_0000.vtk", "state_0001.vtk", "state_0002.vtk", "final_deformed.vtk"] {
        let text = std::fs::read_to_string(out_dir.join(name)).unwrap();
        assert!(text.contains("SCALARS pressure double 1"), "{name}");
    }
    assert!(stdout(&out).contains("max pressure"));
}

#[test]
fn singular_problem_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    // traction on every side leaves rigid motions undetermined
    let mut text = SMALL.to_string();
    for side in ["xmin", "xmax", "ymin", "ymax", "zmin"] {
        text += &format!("[bc.{side}]\ntraction = [0, 0, 0]\npressure = 0\n");
    }
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, text).unwrap();
    let cfg = cfg.display().to_string();
    let out = biotvem(&["solve", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bad_config_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("[time]", "[time]\nbogus = 1"));
    let out = biotvem(&["solve", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let cfg = write_config(dir.path(), &SMALL.replace("traction = [0, 0, \"-t\"]", "traction = [0, 0, \"-t*\"]"));
    let out = biotvem(&["solve", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
