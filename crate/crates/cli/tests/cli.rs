use std::path::PathBuf;
use std::process::{Command, Output};

fn curve(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../curves")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heightlab"))
        .args(args)
        .output()
        .expect("run heightlab")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout))
    })
}

#[test]
fn classify_agreement_exits_zero() {
    let out = run(&["classify", "--model", "p1xp1", "--divisor", "1,1", "--ample", "1,1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["verdict"], "ample");
    assert_eq!(r["exact"]["label"], "ample");
    assert_eq!(r["agreement"], true);
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(r["config"]["bound"], 200);
}

#[test]
fn zero_class_has_identically_zero_ratio() {
    let out = run(&["classify", "--model", "p1xp1", "--divisor", "0,0", "--ample", "1,1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["exact"]["nef"], true);
    assert_eq!(r["exact"]["ample"], false);
    for v in r["per_window_min"].as_array().unwrap().iter().chain(r["per_window_max"].as_array().unwrap()) {
        assert_eq!(v.as_f64(), Some(0.0));
    }
}

#[test]
fn exceptional_curve_on_punctured_region() {
    let out = run(&["classify", "--model", "blowup_p2", "--divisor", "0,1", "--ample", "3,-1", "--exclude", "E"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["exact"]["effective"], true);
    assert_eq!(r["exact"]["nef"], false);
    assert_eq!(r["comparison"], "pseudo_effective_on_region");
    assert!(r["estimate"].as_f64().unwrap() >= 0.0);
}

/// The degree-zero class (0,G) is nef, but along nG its ratio is -2/|n|,
/// which stays below -tol at a small radius.
#[test]
fn classify_disagreement_exits_three() {
    let cfg = curve("x3m2.cfg");
    let out = run(&["classify", "--curve", &cfg, "--divisor", "0,3,5", "--ample", "1,O"]);
    assert_eq!(out.status.code(), Some(3));
    let r = json(&out);
    assert_eq!(r["agreement"], false);
    assert_eq!(r["verdict"], "not_nef");
}

#[test]
fn classify_indeterminate_exits_two() {
    // At radius 20 the last window holds n = ±20 (ratio -0.1) and the one
    // before reaches n = 19 (ratio -0.105); tol 0.102 separates them.
    let cfg = curve("x3m2.cfg");
    let out = run(&["classify", "--curve", &cfg, "--divisor", "0,3,5", "--bound", "20", "--tol", "0.102"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["verdict"], "indeterminate");
}

#[test]
fn empty_window_exits_two() {
    let out = run(&["flim", "--model", "p1xp1", "--divisor", "1,0", "--bound", "5", "--height-bound", "50"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn config_errors_exit_one() {
    for args in [
        vec!["flim", "--model", "p7", "--divisor", "1"],
        vec!["flim", "--model", "p1xp1", "--divisor", "1,1", "--ample", "1,0"],
        vec!["flim", "--model", "p1xp1"],
        vec!["flim", "--model", "p1xp1", "--divisor", "1,1", "--exclude", "E"],
        vec!["canonical", "--curve", "/nonexistent.cfg", "--point", "1,1"],
        vec!["flim", "--frobnicate"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn convergence_failure_exits_four() {
    let out = run(&["canonical", "--curve", &curve("x3m2.cfg"), "--point", "3,5", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn canonical_meets_tolerance() {
    let out = run(&["canonical", "--curve", &curve("x3m2.cfg"), "--point", "3,5", "--tol", "1e-8"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!(r["error_radius"].as_f64().unwrap() <= 1e-8);
    assert!((r["value"].as_f64().unwrap() - 0.674788417305).abs() < 1e-9);
}

#[test]
fn enumerate_count_matches_farey_sum() {
    let out = run(&["enumerate", "--model", "p1", "--bound", "5", "--count-only"]);
    assert_eq!(out.status.code(), Some(0));
    // 4·(φ(1)+…+φ(5)) = 4·10.
    assert_eq!(json(&out)["count"], 40);
    let listed = run(&["enumerate", "--model", "p1", "--bound", "1", "--format", "csv"]);
    assert_eq!(String::from_utf8_lossy(&listed.stdout), "point\n0:1\n1:-1\n1:0\n1:1\n");
}

#[test]
fn torsion_probe_is_bounded() {
    let out = run(&["probe", "--curve", &curve("x3p1.cfg"), "--divisor", "0", "--point", "2,3", "--ample", "1,O"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["verdict"], "bounded");
    assert_eq!(r["range"].as_f64(), Some(0.0));
}

#[test]
fn config_file_and_flags_give_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        "model = \"blowup_p2\"\ndivisor = \"1,1\"\nexclude = [\"E\"]\nbound = 60\nwindows = 5\n",
    )
    .unwrap();
    let from_file = run(&["flim", "--config", path.to_str().unwrap()]);
    let from_flags = run(&["flim", "--model", "blowup_p2", "--divisor", "1,1", "--exclude", "E", "--bound", "60", "--windows", "5"]);
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(from_file.stdout, from_flags.stdout);
    let overridden = run(&["flim", "--config", path.to_str().unwrap(), "--bound", "40"]);
    assert_eq!(json(&overridden)["config"]["bound"], 40);
}

#[test]
fn output_and_plot_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.csv");
    let plot = dir.path().join("plot.csv");
    let r = run(&[
        "flim", "--model", "p1xp1", "--divisor", "2,-1", "--bound", "20", "--format", "csv",
        "--out", out.to_str().unwrap(), "--emit-plot-data", plot.to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(0));
    assert!(r.stdout.is_empty());
    let trace = std::fs::read_to_string(&out).unwrap();
    assert!(trace.starts_with("window,threshold,min_ratio,max_ratio,samples\n"));
    assert_eq!(trace.lines().count(), 9);
    let plot = std::fs::read_to_string(&plot).unwrap();
    assert!(plot.starts_with("h_d,ratio,count,point\n"));
    assert!(plot.lines().count() > 10);
}

#[test]
fn mu_reports_exact_bound() {
    let out = run(&["mu", "--map", "segre", "--bound", "40"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["value"].as_f64(), Some(1.0));
    assert_eq!(r["exact_upper_bound"], "1");
    assert_eq!(r["within_bound"], true);
    let unknown = run(&["mu", "--map", "veronese", "--model", "p2"]);
    assert_eq!(unknown.status.code(), Some(1));
}

#[test]
fn noise_keeps_classification() {
    let out = run(&["classify", "--model", "p1xp1", "--divisor", "1,2", "--noise", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "ample");
    let too_loud = run(&["flim", "--model", "p1xp1", "--divisor", "1,2", "--noise", "2"]);
    assert_eq!(too_loud.status.code(), Some(1));
}

#[test]
fn equiv_on_product_is_not_equivalent() {
    let out = run(&["equiv", "--model", "p1xp1", "--divisor", "1,0", "--versus", "0,1", "--bound", "60"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["verdict"], "not_equivalent");
    assert_eq!(r["exact_equivalent"], false);
    assert_eq!(r["agreement"], true);
}
