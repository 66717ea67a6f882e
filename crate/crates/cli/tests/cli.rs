use std::process::{Command, Output};

fn wf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wf")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn gen_meshes_then_convergence_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let meshes = dir.path().join("m");
    let o = wf(&["gen-meshes", "--grids", "1", "--out", meshes.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("source,1,192,"), "{text}");
    assert!(text.contains("target,1,192,"), "{text}");
    assert!(meshes.join("source_1.msh").exists());

    let out = dir.path().join("csv");
    let o = wf(&[
        "--mesh-dir",
        meshes.to_str().unwrap(),
        "convergence",
        "--grids",
        "1",
        "--method",
        "l2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 2);
    assert!(out.join("convergence_u1_l2_k1.csv").exists());
}

#[test]
fn sample_writes_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let o = wf(&["sample", "--n", "5", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "125");
    let csv = std::fs::read_to_string(dir.path().join("samples.csv")).unwrap();
    assert_eq!(csv.lines().count(), 126);
    let vtk = std::fs::read_to_string(dir.path().join("samples.vtk")).unwrap();
    assert!(vtk.contains("POINT_DATA 125"));
}

#[test]
fn coeffs_prints_91_rows() {
    let o = wf(&["coeffs", "--elem", "3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 92);
}

#[test]
fn split_inspect_lists_twelve_subtets() {
    let o = wf(&["split-inspect", "--elem", "0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("subtet")).count(), 12);
}

#[test]
fn bad_input_exits_with_one() {
    let o = wf(&["split-inspect", "--elem", "100000"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));

    let dir = tempfile::tempdir().unwrap();
    let o = wf(&["--mesh-dir", dir.path().to_str().unwrap(), "coeffs"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn every_verb_has_help() {
    for verb in ["gen-meshes", "convergence", "conserve", "sample", "split-inspect", "coeffs"] {
        let o = wf(&[verb, "--help"]);
        assert!(o.status.success(), "{verb}");
    }
}
