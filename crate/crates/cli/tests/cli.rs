use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gmm-modes"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn construct_then_modes_on_cross() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["construct", "cross"], dir.path());
    assert!(o.status.success(), "{o:?}");
    assert!(dir.path().join("cross.json").exists());
    assert!(dir.path().join("cross.meta.json").exists());
    let o = run(&["modes", "cross.json"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("modes=3 saddles=0 minima=0 degenerate=0 upper_bound=968\n"));
}

#[test]
fn duistermaat_and_single_gaussian() {
    let dir = tempfile::tempdir().unwrap();
    run(&["construct", "duistermaat", "--sigma", "0.72", "-o", "d.json"], dir.path());
    let o = run(&["modes", "d.json"], dir.path());
    assert!(stdout(&o).starts_with("modes=4 "));
    run(&["construct", "single-gaussian", "-o", "s.json"], dir.path());
    let o = run(&["modes", "s.json"], dir.path());
    assert!(stdout(&o).starts_with("modes=1 "));
}

#[test]
fn arrangement_metadata_lists_vertices() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["construct", "arrangement", "--d", "2", "--k", "4", "--seed", "7", "-o", "a.json"], dir.path());
    assert!(o.status.success(), "{o:?}");
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["arrangement"]["vertices"].as_array().unwrap().len(), 6);
    assert_eq!(meta["run"]["seed"], 7);
    let mix: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.json")).unwrap()).unwrap();
    assert_eq!(mix["components"].as_array().unwrap().len(), 4);
}

#[test]
fn unknown_scenario_lists_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["construct", "nope"], dir.path());
    assert!(!o.status.success());
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("unknown scenario") && err.contains("duistermaat-0.72"));
}

#[test]
fn bounds_single_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["bounds", "--d", "2", "--k", "3", "--format", "csv"], dir.path());
    assert_eq!(stdout(&o), "d,k,lower,conjecture,upper\n2,3,6,6,42592\n");
    let o = run(&["bounds", "--d", "2", "--k", "2", "--format", "json"], dir.path());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rows"][0][0]["lower"], "3");
    let o = run(&["bounds", "--table", "4", "4", "--format", "csv"], dir.path());
    assert_eq!(stdout(&o).lines().count(), 17);
}

#[test]
fn json_report_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    run(&["construct", "cross"], dir.path());
    run(&["modes", "cross.json", "--format", "json", "-o", "a.json"], dir.path());
    run(&["modes", "cross.json", "--format", "json", "-o", "b.json", "--sequential"], dir.path());
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["run"]["seed"], 1);
    assert_eq!(v["run"]["options"]["gradient_tolerance"], 1e-10);
    assert_eq!(v["report"]["mode_count"], 3);
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    run(&["construct", "duistermaat"], dir.path());
    let one = bin()
        .args(["modes", "duistermaat-0.72.json", "--format", "csv"])
        .env("GMM_MODES_THREADS", "1")
        .current_dir(dir.path())
        .output()
        .unwrap();
    let four = bin()
        .args(["modes", "duistermaat-0.72.json", "--format", "csv"])
        .env("GMM_MODES_THREADS", "4")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    let csv = stdout(&one);
    assert!(csv.lines().nth(1).unwrap() == "x_1,x_2,log_density,kind,min_eigenvalue,converged_from");
}

#[test]
fn scan_grid_size_and_dimension_limit() {
    let dir = tempfile::tempdir().unwrap();
    run(&["construct", "cross"], dir.path());
    let o = run(
        &["scan", "cross.json", "--box", "-0.5,1.5,-0.5,1.5", "--resolution", "50", "-o", "g.csv"],
        dir.path(),
    );
    assert!(o.status.success(), "{o:?}");
    let text = std::fs::read_to_string(dir.path().join("g.csv")).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "x,y,log_density");
    assert_eq!(rows.len(), 1 + 2500);

    run(&["construct", "product", "-o", "p.json"], dir.path());
    let o = run(&["scan", "p.json"], dir.path());
    assert!(!o.status.success());
    assert!(String::from_utf8(o.stderr).unwrap().contains("dimension"));
    let o = run(&["scan", "cross.json", "--resolution", "2001"], dir.path());
    assert!(!o.status.success());
}

#[test]
fn univariate_scan_profile() {
    let dir = tempfile::tempdir().unwrap();
    run(&["construct", "univariate-pair", "--mu2", "4", "-o", "u.json"], dir.path());
    let o = run(&["scan", "u.json", "--box", "-3,7", "--resolution", "1001"], dir.path());
    let values: Vec<f64> = stdout(&o)
        .lines()
        .skip(2)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let peaks = (1..values.len() - 1)
        .filter(|&i| values[i] > values[i - 1] && values[i] > values[i + 1])
        .count();
    assert_eq!(peaks, 2);
}

#[test]
fn ridgeline_csv() {
    let dir = tempfile::tempdir().unwrap();
    run(&["construct", "cross"], dir.path());
    let o = run(&["ridgeline", "cross.json", "--samples", "3"], dir.path());
    let body: Vec<&str> = std::str::from_utf8(&o.stdout).unwrap().lines().skip(1).collect();
    assert_eq!(body[0], "alpha,x_1,x_2,log_density");
    assert!(body[1].starts_with("0,0,1,"));
    assert!(body[3].starts_with("1,1,0,"));
    run(&["construct", "duistermaat"], dir.path());
    assert!(!run(&["ridgeline", "duistermaat-0.72.json"], dir.path()).status.success());
}

#[test]
fn verify_only_and_seed_independence() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--only", "cross"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("PASS cross") && stdout(&o).contains("1/1 scenarios passed"));
    let a = run(&["verify", "--format", "csv"], dir.path());
    let b = run(&["verify", "--format", "csv", "--seed", "99"], dir.path());
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn malformed_mixture_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\n  \"dim\": 1,\n  \"components\": [\n    {\"weight\": 1.0, \"mean\": [0.0], \"cov\": [[-1.0]]}\n  ]\n}\n").unwrap();
    let o = run(&["modes", "bad.json"], dir.path());
    assert!(!o.status.success());
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("bad.json"), "{err}");
    std::fs::write(dir.path().join("broken.json"), "{\n  \"dim\": 1,\n  \"components\": [\n").unwrap();
    let err = String::from_utf8(run(&["modes", "broken.json"], dir.path()).stderr).unwrap();
    assert!(err.contains("line"), "{err}");
}
