//! Driving the command-line front end in-process.

use cfk::cli::run;

fn main() {
    let dir = std::env::temp_dir().join("cfk-example");
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("p.json");
    std::fs::write(&p, r#"{"n": 2, "l": 1, "terms": [{"indices": [2, 1], "coeff": "1"}]}"#).unwrap();
    let p = p.to_str().unwrap();

    let mut out = Vec::new();
    let mut err = Vec::new();
    let calls: [&[&str]; 4] = [
        &["cfk", "verify", "--suite", "schouten-jacobi", "--seed", "7", "--cases", "10"],
        &["cfk", "cohomology", "--bimodule", "DBB", "--degree", "1"],
        &["cfk", "star", "build", "--poisson", p, "--order", "2"],
        &["cfk", "verify", "--suite", "nope"],
    ];
    for args in calls {
        out.clear();
        err.clear();
        let code = run(args.iter(), &mut out, &mut err);
        let text = String::from_utf8_lossy(&out);
        let head: String = text.lines().take(6).collect::<Vec<_>>().join("\n");
        println!("$ {}\nexit {code}\n{head}\n{}", args[1..].join(" "), String::from_utf8_lossy(&err));
    }
}
