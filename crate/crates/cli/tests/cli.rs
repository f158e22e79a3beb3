use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use loewner_cli::main_with;

const LINEAR: &str = r#"
name = "linear"
dimension = 1

[field]
pieces = [{ kind = "linear_radial" }]

[functional]
atoms = [{ kind = "coefficient", index = [2], component = 1 }]

[flow]
times = [0.5, 1.0]
points = [[[0.5, 0.0]], [[0.1, -0.3]]]
degree = 3

[screen]
time = 0.5

[pontryagin]
t_grid = [0.0, 1.0]
"#;

const KOEBE: &str = r#"
name = "koebe"
dimension = 1

[field]
pieces = [{ kind = "koebe" }]

[functional]
atoms = [{ kind = "coefficient", index = [2], component = 1 }]

[pontryagin]
t_grid = [0.0, 0.5, 1.0, 2.0]

[hamiltonian]
t_grid = [0.0, 1.0, 3.0]
constancy_tol = 1e-6

[pommerenke]
initial_tol = 1e-4
"#;

fn scenario(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(task: &str, sc: &Path, out: &Path) -> i32 {
    main_with([
        "loewner-control",
        task,
        "--scenario",
        sc.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--threads",
        "2",
    ])
}

fn field(report: &str, key: &str) -> String {
    let doc: toml::Table = report.parse().unwrap();
    doc[key].to_string()
}

#[test]
fn flow_writes_the_radial_value() {
    let dir = tempfile::tempdir().unwrap();
    let sc = scenario(dir.path(), "lin.toml", LINEAR);
    assert_eq!(run("flow", &sc, dir.path()), 0);
    let csv = fs::read_to_string(dir.path().join("linear.flow.values.csv")).unwrap();
    let mut rows = csv.lines();
    assert_eq!(rows.next().unwrap(), "t,point,z1_re,z1_im,w1_re,w1_im");
    let row = rows.find(|r| r.starts_with("1.0000000000000000e0,1,")).unwrap();
    let w: f64 = row.split(',').nth(4).unwrap().parse().unwrap();
    assert!((w - 0.5 * (-1.0f64).exp()).abs() < 1e-9, "{w}");
    assert!(!csv.contains('\r'));
    assert!(dir.path().join("linear.flow.jet.csv").exists());
    assert!(dir.path().join("linear.flow.jacobians.csv").exists());
}

#[test]
fn koebe_passes_the_control_checks() {
    let dir = tempfile::tempdir().unwrap();
    let sc = scenario(dir.path(), "koebe.toml", KOEBE);
    for task in ["pontryagin", "hamiltonian", "pommerenke"] {
        assert_eq!(run(task, &sc, dir.path()), 0, "{task}");
    }
    let rep = fs::read_to_string(dir.path().join("koebe.pontryagin.report.toml")).unwrap();
    let worst: f64 = field(&rep, "worst_violation").parse().unwrap();
    assert!(worst <= 1e-3);
    assert_eq!(field(&rep, "status"), "\"pass\"");
}

#[test]
fn screen_fires_for_the_radial_field() {
    let dir = tempfile::tempdir().unwrap();
    let sc = scenario(dir.path(), "lin.toml", LINEAR);
    assert_eq!(run("screen", &sc, dir.path()), 0);
    let rep = fs::read_to_string(dir.path().join("linear.screen.report.toml")).unwrap();
    assert_eq!(field(&rep, "verdict"), "\"fires: not extremal beyond T\"");
}

#[test]
fn failed_check_exits_one() {
    // the radial field does not maximize Re a₂
    let dir = tempfile::tempdir().unwrap();
    let sc = scenario(dir.path(), "lin.toml", LINEAR);
    assert_eq!(run("pontryagin", &sc, dir.path()), 1);
    let rep = fs::read_to_string(dir.path().join("linear.pontryagin.report.toml")).unwrap();
    assert_eq!(field(&rep, "status"), "\"fail\"");
    assert!(rep.contains("[witness]"));
}

#[test]
fn invalid_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        "name = \"x\"\n",
        "name = \"x\"\ndimension = 1\nbogus = 3\n[field]\npieces = [{ kind = \"linear_radial\" }]\n",
        "name = \"x\"\ndimension = 1\n[field]\npieces = [{ kind = \"slice_moebius\", zeta = [2.0, 0.0] }]\n[screen]\ntime = 0.5\n",
        "name = \"x\"\ndimension = 1\ntask = \"flow\"\n[field]\npieces = [{ kind = \"linear_radial\" }]\n[screen]\ntime = 0.5\n",
    ];
    for (i, text) in cases.iter().enumerate() {
        let sc = scenario(dir.path(), &format!("bad{i}.toml"), text);
        assert_eq!(run("screen", &sc, dir.path()), 2, "case {i}");
    }
    assert_eq!(run("screen", &dir.path().join("missing.toml"), dir.path()), 2);
    assert_eq!(main_with(["loewner-control", "nonsense", "--scenario", "x"]), 2);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let sc = scenario(dir.path(), "lin.toml", LINEAR);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run("flow", &sc, &a), 0);
    assert_eq!(
        main_with(["loewner-control", "flow", "--scenario", sc.to_str().unwrap(), "--out", b.to_str().unwrap(), "--threads", "1"]),
        0
    );
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 4);
    for name in names {
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name:?}");
    }
}

#[test]
fn reports_default_to_the_scenario_directory() {
    let dir = tempfile::tempdir().unwrap();
    let sc = scenario(dir.path(), "lin.toml", LINEAR);
    assert_eq!(main_with(["loewner-control", "screen", "--scenario", sc.to_str().unwrap()]), 0);
    assert!(dir.path().join("linear.screen.report.toml").exists());
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let sc = scenario(dir.path(), "lin.toml", LINEAR);
    let bin = env!("CARGO_BIN_EXE_loewner-control");
    let code = |task: &str| {
        Command::new(bin)
            .args([task, "--scenario", sc.to_str().unwrap()])
            .status()
            .unwrap()
            .code()
    };
    assert_eq!(code("screen"), Some(0));
    assert_eq!(code("pontryagin"), Some(1));
    assert_eq!(code("map"), Some(2));
}
