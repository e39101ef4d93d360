use std::path::PathBuf;

use kenmotsu::{run, Outcome};
use serde_json::Value;

fn kenmotsu(args: &[&str]) -> Outcome {
    let mut argv = vec!["kenmotsu"];
    argv.extend_from_slice(args);
    run(argv, None)
}

fn structured(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--format", "structured"]);
    let out = kenmotsu(&full);
    assert!(out.stderr.is_empty(), "{}", out.stderr);
    (out.code, serde_json::from_str(&out.stdout).unwrap())
}

fn temp_file(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("kenmotsu-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

#[test]
fn check_passes_on_the_example() {
    let (code, v) = structured(&["check", "--builtin", "kenmotsu5"]);
    assert_eq!(code, 0);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() >= 27);
    assert!(checks.iter().all(|c| c["status"] == "pass"));
    assert_eq!(v["manifold"]["dim"], 5);
    assert_eq!(v["manifold"]["n"], 2);
    assert_eq!(v["manifold"]["kenmotsu"], true);
}

#[test]
fn full_pipeline_reports_scalar_curvature() {
    let (code, v) = structured(&["example"]);
    assert_eq!(code, 0);
    assert_eq!(v["scalar_curvature"], "-20");
    assert_eq!(v["star_scalar_curvature"], "-4");
    assert_eq!(v["riemann"].as_object().unwrap().len(), 40);
    assert_eq!(v["brackets"].as_object().unwrap().len(), 4);
    assert_eq!(v["brackets"]["[e1,e5]"], "e1");
    assert_eq!(v["connection"]["nabla_e3 e3"], "-e5");
}

#[test]
fn trace_fit_for_the_first_special_case() {
    let (code, v) = structured(&[
        "soliton", "--builtin", "kenmotsu5", "--vector", "V", "--alpha", "1", "--beta", "0", "--k", "1",
        "--mode", "trace",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["soliton"]["fitted_lambda"], "-4/5");
    assert_eq!(v["soliton"]["classification"], "shrinking");
    assert_eq!(v["soliton"]["residual_zero"], false);
}

#[test]
fn nonzero_exact_residual_exits_one_with_a_report() {
    let (code, v) = structured(&[
        "soliton", "--builtin", "kenmotsu5", "--vector", "V", "--alpha", "1", "--beta", "0", "--k", "1",
        "--lambda", "-4/5",
    ]);
    assert_eq!(code, 1);
    assert_eq!(v["soliton"]["mode"], "exact");
    assert_eq!(v["soliton"]["residual"]["(e5,e5)"], "-8/5");
}

#[test]
fn reeb_soliton_holds_exactly() {
    let (code, v) = structured(&[
        "soliton", "--builtin", "kenmotsu5", "--vector", "xi", "--k", "alpha", "--lambda", "-2*beta",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["soliton"]["residual_zero"], true);
}

#[test]
fn gradient_potential_from_an_inline_function() {
    let (code, v) = structured(&[
        "soliton", "--builtin", "kenmotsu5", "--function", "v", "--k", "alpha", "--lambda", "-2*beta",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["soliton"]["potential"]["gradient"], "e5");
    assert_eq!(v["soliton"]["laplacian"], "4");
}

#[test]
fn classify_reeb_field() {
    let (code, v) = structured(&["classify-vector", "--builtin", "kenmotsu5", "--vector", "xi"]);
    assert_eq!(code, 0);
    let t = &v["classification"]["torse_forming"];
    assert_eq!(t["psi"], "1");
    assert_eq!(t["omega_tau"], "-1");
    assert_eq!(v["classification"]["killing"], false);
}

#[test]
fn classify_coordinate_field_and_potential() {
    let (_, v) = structured(&["classify-vector", "--builtin", "kenmotsu5", "--vector", "d x"]);
    assert_eq!(v["classification"]["killing"], true);
    assert_eq!(v["classification"]["conformal_killing"]["omega"], "0");
    let (_, v) = structured(&["classify-vector", "--builtin", "kenmotsu5", "--vector", "V"]);
    assert_eq!(v["classification"]["conformal_killing"], false);
    assert_eq!(v["classification"]["divergence"], "8");
    let (_, v) = structured(&["classify-vector", "--builtin", "kenmotsu5", "--vector", "e1"]);
    assert_eq!(v["classification"]["torse_forming"], false);
}

#[test]
fn theorems_agree_on_the_example() {
    let (code, v) = structured(&["theorems", "--builtin", "kenmotsu5", "--vector", "V"]);
    assert_eq!(code, 0);
    assert_eq!(v["theorems"]["xi_trace_lambda"], "-2*beta");
    assert_eq!(v["theorems"]["laplacian_check"]["predicted"], "8");
    assert!(v["checks"].as_array().unwrap().len() >= 6);
}

#[test]
fn non_kenmotsu_input_fails_checks_with_witnesses() {
    let (code, v) = structured(&["check", "--builtin", "abelian5"]);
    assert_eq!(code, 1);
    let fail = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "kenmotsu.nabla_xi")
        .unwrap();
    assert_eq!(fail["status"], "fail");
    assert!(fail["witness"]["residual"].is_string());
    let (code, _) = structured(&["theorems", "--builtin", "abelian5"]);
    assert_eq!(code, 1);
}

#[test]
fn rescaled_reeb_field_is_a_failing_check() {
    let text = dsl_text().replace("xi e5", "xi 2*e5");
    let path = temp_file("rescaled.mf", &text);
    let (code, v) = structured(&["check", "--file", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    let eta = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "almost_contact.eta_of_xi")
        .unwrap();
    assert_eq!(eta["status"], "fail");
    let out = kenmotsu(&["curvature", "--file", path.to_str().unwrap()]);
    assert_eq!(out.code, 2);
}

fn dsl_text() -> String {
    kenmotsu::dsl::builtin("kenmotsu5").unwrap().to_string()
}

#[test]
fn usage_and_input_errors_exit_two() {
    for args in [
        vec![],
        vec!["bogus"],
        vec!["check"],
        vec!["check", "--builtin", "nowhere"],
        vec!["check", "--builtin", "kenmotsu5", "--file", "x.mf"],
        vec!["soliton", "--builtin", "kenmotsu5"],
        vec!["soliton", "--builtin", "kenmotsu5", "--vector", "V", "--mode", "sideways"],
        vec!["soliton", "--builtin", "kenmotsu5", "--vector", "V", "--star", "maybe"],
        vec!["soliton", "--builtin", "kenmotsu5", "--vector", "V", "--alpha", "1/"],
        vec!["soliton", "--builtin", "kenmotsu5", "--vector", "W"],
        vec!["soliton", "--builtin", "kenmotsu5", "--vector", "V", "--k", "0"],
        vec!["soliton", "--builtin", "kenmotsu5", "--vector", "V", "--k", "x", "--mode", "trace"],
        vec!["check", "--file", "/nonexistent/manifold.mf"],
    ] {
        let out = kenmotsu(&args);
        assert_eq!(out.code, 2, "{args:?}: {}", out.stdout);
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn dsl_errors_carry_positions() {
    let path = temp_file("bad.mf", "dim 5\ncoords x y z u v\nframe e1 = exp(-1*w) d x\n");
    let out = kenmotsu(&["check", "--file", path.to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 3, column 19"), "{}", out.stderr);
    assert!(out.stderr.contains("undeclared coordinate `w`"));
}

#[test]
fn help_and_version_exit_zero() {
    let out = kenmotsu(&["--help"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("classify-vector"));
    assert_eq!(kenmotsu(&["--version"]).code, 0);
}

#[test]
fn output_is_byte_deterministic() {
    for format in ["text", "structured"] {
        let a = kenmotsu(&["example", "--format", format]);
        let b = kenmotsu(&["example", "--format", format]);
        assert_eq!(a, b);
    }
}

fn strip_spot_values(v: &mut Value) {
    match v {
        Value::Object(o) => {
            o.remove("spot_evaluation");
            o.remove("field_at_point");
            o.remove("residual_at_point");
            o.values_mut().for_each(strip_spot_values);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_spot_values),
        _ => {}
    }
}

#[test]
fn precision_only_changes_numeric_display() {
    let args = ["kenmotsu", "classify-vector", "--builtin", "kenmotsu5", "--vector", "V", "--format", "structured"];
    let low = run(args, Some("5"));
    let high = run(args, Some("40"));
    assert_eq!(low.code, 0);
    let mut a: Value = serde_json::from_str(&low.stdout).unwrap();
    let mut b: Value = serde_json::from_str(&high.stdout).unwrap();
    assert_eq!(a["classification"]["field_at_point"][0], "2.71828");
    assert_eq!(
        b["classification"]["field_at_point"][0],
        "2.7182818284590452353602874713526624977572"
    );
    strip_spot_values(&mut a);
    strip_spot_values(&mut b);
    assert_eq!(a, b);
    assert_eq!(run(args, Some("many")).code, 2);
}

#[test]
fn structured_reports_match_golden_files() {
    let cases: [(&str, &[&str]); 3] = [
        ("example.json", &["example", "--format", "structured"]),
        ("check.txt", &["check", "--builtin", "kenmotsu5"]),
        ("curvature.json", &["curvature", "--builtin", "kenmotsu5", "--format", "structured"]),
    ];
    for (name, args) in cases {
        let out = kenmotsu(args);
        assert_eq!(out.code, 0);
        let path = golden(name);
        if std::env::var_os("UPDATE_GOLDEN").is_some() {
            std::fs::create_dir_all(path.parent().unwrap()).unwrap();
            std::fs::write(&path, &out.stdout).unwrap();
        }
        let expected = std::fs::read_to_string(&path).unwrap();
        assert_eq!(out.stdout, expected, "{name} differs; rerun with UPDATE_GOLDEN=1 after review");
    }
}
