use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_entropylab"));
    cmd.env_remove("ENTROPYLAB_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SCALAR_PHI: &str = r#"{
  "A": {"rows": 1, "cols": 1, "data": [[4.0, 0.0]]},
  "L": {"rows": 1, "cols": 1, "data": [[0.0, 0.0]]},
  "H": {"rows": 1, "cols": 1, "data": [[0.5, 0.0]]}
}"#;

#[test]
fn eval_scalar_phi() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "phi.json", SCALAR_PHI);
    let out = dir.path().join("rec.json");
    let o = run(&["eval", "phi", &f, "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let printed = stdout(&o);
    assert!((printed.trim().parse::<f64>().unwrap() - std::f64::consts::SQRT_2).abs() < 1e-14);
    assert!(printed.trim().chars().filter(char::is_ascii_digit).count() <= 15);
    let rec: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(rec["functional"], "phi");
    assert!((rec["value"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-15);
    assert!(rec["inputs"]["instance"]["A"].is_object());
}

#[test]
fn eval_multi_phi_scalar_pair() {
    let dir = tempfile::tempdir().unwrap();
    let h = r#"{"rows": 1, "cols": 1, "data": [[0.7071067811865476, 0.0]]}"#;
    let f = write(
        dir.path(),
        "multi.json",
        &format!(
            r#"{{"L": {{"rows": 1, "cols": 1, "data": [[0.0, 0.0]]}},
                "H": [{h}, {h}],
                "A": [{{"rows": 1, "cols": 1, "data": [[4.0, 0.0]]}},
                      {{"rows": 1, "cols": 1, "data": [[9.0, 0.0]]}}],
                "sum_is_identity": true}}"#
        ),
    );
    let o = run(&["eval", "multi_phi", &f]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "6");
}

#[test]
fn eval_relative_entropy_at_equal_arguments() {
    let dir = tempfile::tempdir().unwrap();
    let a = r#"{"rows": 2, "cols": 2, "data": [[2.0, 0.0], [0.5, 0.5], [0.5, -0.5], [3.0, 0.0]]}"#;
    let f = write(dir.path(), "ab.json", &format!(r#"{{"A": {a}, "B": {a}}}"#));
    let o = run(&["eval", "relative_entropy", &f]);
    assert!(o.status.success());
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!(v.abs() <= 1e-12);
}

#[test]
fn bad_input_exits_two_with_context() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.json", "{\n  \"A\": 3\n}");
    let o = run(&["eval", "phi", &f]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.json") && err.contains("line 3"), "{err}");

    let not_contraction = write(
        dir.path(),
        "h.json",
        r#"{"A": {"rows": 1, "cols": 1, "data": [[4.0, 0.0]]},
            "L": {"rows": 1, "cols": 1, "data": [[0.0, 0.0]]},
            "H": {"rows": 1, "cols": 1, "data": [[2.0, 0.0]]}}"#,
    );
    assert_eq!(run(&["eval", "phi", &not_contraction]).status.code(), Some(2));
    assert_eq!(run(&["check", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "nope", &f]).status.code(), Some(2));
    assert_eq!(run(&["check", "gt_jensen", "--dims", "1,1,3"]).status.code(), Some(2));
}

#[test]
fn optimize_matches_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let b = write(
        dir.path(),
        "b.json",
        r#"{"B": {"rows": 2, "cols": 2, "data": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [2.0, 0.0]]}}"#,
    );
    let o = run(&["optimize", "gibbs", &b]);
    assert!(o.status.success());
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((r["value"].as_f64().unwrap() - 3.0).abs() <= 1e-6);
    assert_eq!(r["converged"], true);

    let f = write(dir.path(), "phi.json", SCALAR_PHI);
    let o = run(&["optimize", "phi", &f, "--initial-step", "0.5"]);
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let opt = r["value"].as_f64().unwrap();
    assert!((opt - 2f64.sqrt()).abs() <= 1e-6);
    let evaluated: f64 = stdout(&run(&["eval", "phi", &f])).trim().parse().unwrap();
    assert!((opt - evaluated).abs() <= 1e-6);
}

#[test]
fn gen_outputs_load_and_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let pd = dir.path().join("pd.json");
    assert!(
        run(&["gen", "pd", "--dim", "4", "--seed", "1", "--out", pd.to_str().unwrap()])
            .status
            .success()
    );
    let m = entropylab::MatrixJson::from_json_str(&fs::read_to_string(&pd).unwrap()).unwrap();
    assert_eq!(m.to_pd::<f64>().unwrap().dim(), 4);

    let o = run(&[
        "gen",
        "contraction_tuple",
        "--k",
        "3",
        "--m",
        "2",
        "--n",
        "2",
        "--sum-identity",
    ]);
    let inst = entropylab::functionals::InstanceFile::from_json_str(&stdout(&o)).unwrap();
    let h = inst.contraction_tuple::<f64>().unwrap();
    assert!(h.sum_is_identity());
    assert_eq!(h.k(), 3);

    let mi = dir.path().join("mi.json");
    let args = [
        "gen",
        "multi_instance",
        "--k",
        "2",
        "--m",
        "2",
        "--n",
        "3",
        "--seed",
        "5",
        "--out",
        mi.to_str().unwrap(),
    ];
    assert!(run(&args).status.success());
    let first = fs::read(&mi).unwrap();
    assert!(run(&args).status.success());
    assert_eq!(first, fs::read(&mi).unwrap());
    let v: f64 = stdout(&run(&["eval", "multi_phi", mi.to_str().unwrap()]))
        .trim()
        .parse()
        .unwrap();
    assert!(v.is_finite() && v > 0.0);

    // environment seed is honoured
    let a = bin()
        .args(["gen", "hermitian", "--dim", "2"])
        .env("ENTROPYLAB_SEED", "0x10")
        .output()
        .unwrap();
    let b = run(&["gen", "hermitian", "--dim", "2", "--seed", "16"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn check_all_seed_seven() {
    let dir = tempfile::tempdir().unwrap();
    let (d1, d2) = (dir.path().join("r1"), dir.path().join("r2"));
    for d in [&d1, &d2] {
        let o = run(&[
            "check",
            "all",
            "--trials",
            "200",
            "--seed",
            "7",
            "--out-dir",
            d.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d1.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], 8);
    assert_eq!(summary["failed"], 0);
    let mut names: Vec<_> = fs::read_dir(&d1).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 9);
    for name in names {
        assert_eq!(
            fs::read(d1.join(&name)).unwrap(),
            fs::read(d2.join(&name)).unwrap(),
            "{name:?} differs"
        );
    }
}

#[test]
fn check_all_default_trials_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (d1, d2) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&d1, &d2] {
        let o = run(&["check", "all", "--seed", "7", "--out-dir", d.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    for e in fs::read_dir(&d1).unwrap() {
        let name = e.unwrap().file_name();
        assert_eq!(fs::read(d1.join(&name)).unwrap(), fs::read(d2.join(&name)).unwrap());
    }
}

#[test]
fn single_check_and_corrupting_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "check",
        "sh_convexity",
        "--trials",
        "20",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let r: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("sh_convexity.json")).unwrap()).unwrap();
    assert_eq!(r["passed"], true);
    assert_eq!(r["config"]["seed"], 0xC0FFEE);
    assert_eq!(r["trials_run"], 20);
}
