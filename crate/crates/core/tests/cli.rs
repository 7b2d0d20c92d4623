use cfk::cli::{run, EXIT_OBSTRUCTION, EXIT_OK, EXIT_USAGE};
use serde_json::Value;
use std::path::PathBuf;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("cfk").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(name: &str, body: &str) -> String {
    let dir: PathBuf = std::env::temp_dir().join(format!("cfk-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn reparses(text: &str) -> Value {
    let v: Value = serde_json::from_str(text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text, "output is not canonical");
    v
}

#[test]
fn verify_named_suite_and_all() {
    let (code, out, _) = call(&["verify", "--suite", "schouten-jacobi", "--seed", "7"]);
    assert_eq!(code, EXIT_OK);
    let v = reparses(&out);
    assert_eq!(v["failures"], 0);
    assert_eq!(v["suites"][0]["cases"], 50);

    let (code, out, _) = call(&["verify", "--suite", "all", "--cases", "3"]);
    assert_eq!(code, EXIT_OK);
    let names: Vec<String> =
        reparses(&out)["suites"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap().to_string()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert_eq!(names.len(), cfk::cli::SUITES.len());
}

#[test]
fn unknown_suite_is_usage_error() {
    let (code, out, err) = call(&["verify", "--suite", "nope"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(out.is_empty());
    assert!(err.contains("unknown suite"));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let a = call(&["verify", "--suite", "hkr", "--seed", "3", "--cases", "5"]);
    let b = call(&["verify", "--suite", "hkr", "--seed", "3", "--cases", "5"]);
    assert_eq!(a, b);
    let c = call(&["cohomology", "--bimodule", "DIB", "--degree", "0", "--n", "3", "--l", "2"]);
    let d = call(&["cohomology", "--bimodule", "DIB", "--degree", "0", "--n", "3", "--l", "2"]);
    assert_eq!(c, d);
}

#[test]
fn cohomology_reports_dims() {
    let (code, out, _) = call(&["cohomology", "--bimodule", "DBB", "--degree", "1"]);
    assert_eq!(code, EXIT_OK);
    let v = reparses(&out);
    assert_eq!(v["dims"]["cohomology"], v["dims"]["predicted"]);
    assert_eq!(v["basisRepresentatives"].as_array().unwrap().len(), v["dims"]["cohomology"].as_u64().unwrap() as usize);
    assert_eq!(call(&["cohomology", "--bimodule", "XYZ", "--degree", "1"]).0, EXIT_USAGE);
}

#[test]
fn star_build_and_verify_round_trip() {
    let p = write("std.json", r#"{"n": 2, "l": 1, "terms": [{"indices": [2, 1], "coeff": "1"}]}"#);
    let (code, out, _) = call(&["star", "build", "--poisson", &p, "--order", "3", "--require-adapted"]);
    assert_eq!(code, EXIT_OK);
    let v = reparses(&out);
    assert_eq!(v["order"], 3);
    let prod = write("prod.json", &out);
    let (code, out, _) = call(&["star", "verify", "--product", &prod, "--poisson", &p]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(reparses(&out)["ok"], true);
}

#[test]
fn star_build_rejects_non_poisson() {
    let p = write("bad.json", r#"{"n": 3, "l": 1, "terms": [{"indices": [2, 3], "coeff": "x2"}, {"indices": [1, 2], "coeff": "1"}]}"#);
    let (code, out, err) = call(&["star", "build", "--poisson", &p, "--order", "2"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(out.is_empty());
    assert!(err.contains("Poisson"), "{err}");
}

#[test]
fn star_build_reports_obstruction() {
    // ε_ijk ∂_k(xy + yz²) ∂_i∧∂_j, adapted to z = 0.
    let p = write(
        "obs.json",
        r#"{"n": 3, "l": 1, "terms": [
            {"indices": [2, 3], "coeff": "y"},
            {"indices": [3, 1], "coeff": "x + z^2"},
            {"indices": [1, 2], "coeff": "2*y*z"}]}"#,
    );
    let (code, out, _) = call(&["star", "build", "--poisson", &p, "--order", "3", "--require-adapted"]);
    assert_eq!(code, EXIT_OBSTRUCTION);
    let v = reparses(&out);
    assert_eq!(v["order"], 3);
    assert_eq!(v["class"]["rank"], 3);
    let (code, _, _) = call(&["star", "build", "--poisson", &p, "--order", "2"]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn hkr_and_brackets() {
    let x = write("x.json", r#"{"n": 2, "l": 1, "terms": [{"indices": [1], "coeff": "x"}]}"#);
    let y = write("y.json", r#"{"n": 2, "l": 1, "terms": [{"indices": [1, 2], "coeff": "y"}]}"#);
    let (code, out, _) = call(&["bracket", "--kind", "schouten", "--left", &x, "--right", &y]);
    assert_eq!(code, EXIT_OK);
    let br = cfk::geometry::MultiVec::from_json(&reparses(&out)).unwrap();
    assert_eq!(br.rank(), Some(2));

    let (code, out, _) = call(&["hkr", "psi1", "--input", &y]);
    assert_eq!(code, EXIT_OK);
    let op = write("op.json", &out);
    let (code, out, _) = call(&["hkr", "pi", "--input", &op]);
    assert_eq!(code, EXIT_OK);
    let back = cfk::geometry::MultiVec::from_json(&reparses(&out)).unwrap();
    assert_eq!(back.to_json(), cfk::geometry::MultiVec::from_json(&serde_json::from_str(&std::fs::read_to_string(&y).unwrap()).unwrap()).unwrap().to_json());

    let (code, out, _) = call(&["hkr", "decompose", "--input", &op]);
    assert_eq!(code, EXIT_OK);
    assert!(reparses(&out)["harmonic"]["terms"].as_array().unwrap().len() == 1);
    let (code, _, _) = call(&["bracket", "--kind", "gerstenhaber", "--left", &op, "--right", &op]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(call(&["hkr", "pi", "--input", "/nonexistent.json"]).0, EXIT_USAGE);
}

#[test]
fn help_lists_every_command() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, EXIT_OK);
    for cmd in ["verify", "cohomology", "hkr", "star", "bracket"] {
        assert!(out.contains(cmd));
    }
}
