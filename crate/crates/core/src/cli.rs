//! Command-line driver. Data goes to stdout as key-sorted JSON, diagnostics to
//! stderr. Exit codes: 0 ok, 1 verification failure, 2 obstruction, 3 bad input.

use crate::coalg::{
    b_k, bullet_k, bullet_k_coinduced, circ_g, circ_h, circ_nr, circ_t, eulerian, gerstenhaber_defect, gharrison_part,
    obstruction_diff, odd_truncated, random_gcochain, random_sym, shuffle, CochainTable, CochainTensor, GerstAlgebra,
    GradedSpace, Obstruction, Tens,
};
use crate::formality::{mc_build, perturb, verify_star, BuildOutcome, FormalityError, StarProduct};
use crate::gen::Gen;
use crate::geometry::{interior, is_adapted_mv, lie_derivative, schouten, wedge, DiffForm, MultiVec, SpaceConfig};
use crate::hkr::{decompose, pi_hkr, primitive, psi1, psi_hkr, HkrError};
use crate::hochschild::{btilde, cup, gerst_bracket, gerst_product, hochschild_b, is_adapted_op, xi_project, PolyDiffOp};
use crate::koszulbar::{
    del_h, del_k, dual_del_h, epsilon, epsilon_k, f_map, g_map, h_h, h_h_minus1, h_k, h_k_minus1, predicted_dim,
    s_h, theta, truncated_cohomology, BimoduleTag,
};
use crate::ratpoly::{sign, Poly, Var};
use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde_json::{json, Value};
use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_OBSTRUCTION: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "cfk", version, about = "Exact calculus for adapted star products on R^n along R^(n-l)")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Run randomized invariant suites and report failures.
    Verify {
        /// Suite name, or `all`.
        #[arg(long, env = "CFK_SUITE", default_value = "all")]
        suite: String,
        #[arg(long, env = "CFK_SEED", default_value_t = 0)]
        seed: u64,
        /// Random cases per invariant (expensive suites clamp this).
        #[arg(long, env = "CFK_CASES", default_value_t = 50)]
        cases: usize,
        /// Print the suite names and exit.
        #[arg(long)]
        list: bool,
    },
    /// Truncated cohomology of a Koszul cochain complex M ⊗ ΛR^n.
    Cohomology {
        /// Coefficient module: A, B, DAB, DBB or DIB.
        #[arg(long)]
        bimodule: String,
        #[arg(long)]
        degree: usize,
        #[arg(long, env = "CFK_POLY_DEG", default_value_t = 1)]
        poly_deg: u32,
        #[arg(long, env = "CFK_OP_ORDER", default_value_t = 2)]
        op_order: u32,
        #[arg(long, env = "CFK_N", default_value_t = 2)]
        n: usize,
        #[arg(long, env = "CFK_L", default_value_t = 1)]
        l: usize,
    },
    /// HKR maps and constructive primitives.
    Hkr {
        #[command(subcommand)]
        op: HkrCmd,
    },
    /// Build or check star products.
    Star {
        #[command(subcommand)]
        op: StarCmd,
    },
    /// Schouten bracket of multivectors or Gerstenhaber bracket of cochains.
    Bracket {
        #[arg(long, value_enum)]
        kind: BracketKind,
        /// JSON file (`-` for stdin).
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum HkrCmd {
    /// Antisymmetrization ψ_HKR of a multivector.
    Psi {
        #[arg(long)]
        input: PathBuf,
        /// Rank to map; defaults to the rank of a homogeneous input.
        #[arg(long)]
        rank: Option<usize>,
    },
    /// Adapted map ψ^[1] (transversal block first).
    Psi1 {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        rank: Option<usize>,
    },
    /// π_HKR of a cochain: first-order part, wedged.
    Pi {
        #[arg(long)]
        input: PathBuf,
    },
    /// ξ with bξ = φ for an exact cocycle φ.
    Primitive {
        #[arg(long)]
        input: PathBuf,
    },
    /// φ = ψ^[1](h) + bξ.
    Decompose {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum StarCmd {
    /// Solve the Maurer–Cartan equation order by order.
    Build {
        #[arg(long)]
        poisson: PathBuf,
        #[arg(long, env = "CFK_ORDER")]
        order: usize,
        /// Reject P that is not adapted to C.
        #[arg(long)]
        require_adapted: bool,
    },
    /// Check axioms (i)–(iv) and adaptedness of a product.
    Verify {
        #[arg(long)]
        product: PathBuf,
        #[arg(long)]
        poisson: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum BracketKind {
    Schouten,
    Gerstenhaber,
}

struct Out {
    code: i32,
    data: Option<Value>,
    log: Option<String>,
}

impl Out {
    fn ok(v: Value) -> Out {
        Out { code: EXIT_OK, data: Some(v), log: None }
    }
    fn with(code: i32, v: Value) -> Out {
        Out { code, data: Some(v), log: None }
    }
    fn usage(msg: impl Into<String>) -> Out {
        Out { code: EXIT_USAGE, data: None, log: Some(msg.into()) }
    }
    fn failed(msg: impl Into<String>) -> Out {
        Out { code: EXIT_FAILED, data: None, log: Some(msg.into()) }
    }
}

/// Parses `args` (including the program name), runs, and writes to the sinks.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return code;
        }
    };
    let out = dispatch(cli.cmd);
    if let Some(v) = out.data {
        let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&v).unwrap());
    }
    if let Some(m) = out.log {
        let _ = writeln!(stderr, "error: {m}");
    }
    out.code
}

fn dispatch(cmd: Cmd) -> Out {
    match cmd {
        Cmd::Verify { list: true, .. } => Out::ok(json!(SUITES.iter().map(|s| s.0).collect::<Vec<_>>())),
        Cmd::Verify { suite, seed, cases, .. } => match cmd_verify(&suite, seed, cases) {
            Some(v) => {
                let code = if v["failures"] == json!(0) { EXIT_OK } else { EXIT_FAILED };
                Out::with(code, v)
            }
            None => Out::usage(format!("unknown suite {suite:?}; try --list")),
        },
        Cmd::Cohomology { bimodule, degree, poly_deg, op_order, n, l } => {
            cmd_cohomology(&bimodule, degree, poly_deg, op_order, n, l)
        }
        Cmd::Hkr { op } => or_usage(cmd_hkr(op)),
        Cmd::Star { op } => or_usage(cmd_star(op)),
        Cmd::Bracket { kind, left, right } => or_usage(cmd_bracket(kind, &left, &right)),
    }
}

fn or_usage(r: Result<Out, String>) -> Out {
    r.unwrap_or_else(Out::usage)
}

fn read_json(path: &PathBuf) -> Result<Value, String> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map_err(|e| e.to_string())?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_mv(path: &PathBuf) -> Result<MultiVec, String> {
    MultiVec::from_json(&read_json(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_op(path: &PathBuf) -> Result<PolyDiffOp, String> {
    PolyDiffOp::from_json(&read_json(path)?, None).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_cohomology(bimodule: &str, degree: usize, poly_deg: u32, op_order: u32, n: usize, l: usize) -> Out {
    let Some(tag) = BimoduleTag::parse(bimodule) else {
        return Out::usage(format!("unknown bimodule {bimodule:?}; expected A, B, DAB, DBB or DIB"));
    };
    if l > n || n == 0 {
        return Out::usage("need 0 ≤ l ≤ n and n ≥ 1");
    }
    let c = SpaceConfig::new(n, l);
    match truncated_cohomology(tag, c, degree, poly_deg, op_order) {
        Ok(r) => Out::ok(json!({
            "bimodule": tag.name(),
            "n": n,
            "l": l,
            "degree": degree,
            "polyDeg": poly_deg,
            "opOrder": op_order,
            "dims": {
                "cohomology": r.dim,
                "cochains": r.dim_cochains,
                "rankIn": r.rank_in,
                "rankOut": r.rank_out,
                "predicted": predicted_dim(tag, c, degree, poly_deg, op_order),
            },
            "basisRepresentatives": r.representatives.iter().map(|x| x.to_json()).collect::<Vec<_>>(),
        })),
        Err(e) => Out::failed(e.to_string()),
    }
}

fn rank_or(x: &MultiVec, rank: Option<usize>) -> Result<usize, String> {
    rank.or_else(|| x.rank()).or(x.is_zero().then_some(0)).ok_or_else(|| "mixed-rank input needs --rank".into())
}

fn hkr_failure(e: HkrError) -> Out {
    match e {
        HkrError::NotExact(class) => {
            Out { code: EXIT_FAILED, data: Some(json!({"class": class.to_json()})), log: Some("cocycle is not exact".into()) }
        }
        e => Out::failed(e.to_string()),
    }
}

fn cmd_hkr(op: HkrCmd) -> Result<Out, String> {
    Ok(match op {
        HkrCmd::Psi { input, rank } => {
            let x = read_mv(&input)?;
            Out::ok(psi_hkr(&x, rank_or(&x, rank)?).to_json())
        }
        HkrCmd::Psi1 { input, rank } => {
            let x = read_mv(&input)?;
            Out::ok(psi1(&x, rank_or(&x, rank)?).to_json())
        }
        HkrCmd::Pi { input } => Out::ok(pi_hkr(&read_op(&input)?).to_json()),
        HkrCmd::Primitive { input } => match primitive(&read_op(&input)?) {
            Ok(xi) => Out::ok(xi.to_json()),
            Err(e) => hkr_failure(e),
        },
        HkrCmd::Decompose { input } => match decompose(&read_op(&input)?) {
            Ok(d) => Out::ok(json!({"harmonic": d.harmonic.to_json(), "primitive": d.primitive.to_json()})),
            Err(e) => hkr_failure(e),
        },
    })
}

fn cmd_star(op: StarCmd) -> Result<Out, String> {
    Ok(match op {
        StarCmd::Build { poisson, order, require_adapted } => {
            if order == 0 {
                return Err("--order must be at least 1".into());
            }
            let p = read_mv(&poisson)?;
            match mc_build(&p, order, require_adapted) {
                Ok(BuildOutcome::Product(s)) => Out::ok(s.to_json()),
                Ok(BuildOutcome::Obstruction(r)) => Out::with(EXIT_OBSTRUCTION, r.to_json()),
                Err(e @ (FormalityError::NotPoisson(_) | FormalityError::NotAdapted | FormalityError::NotBivector)) => {
                    Out::usage(e.to_string())
                }
                Err(e) => Out::failed(e.to_string()),
            }
        }
        StarCmd::Verify { product, poisson } => {
            let p = read_mv(&poisson)?;
            let s = StarProduct::from_json(&read_json(&product)?, Some(p.config))?;
            if s.config != p.config {
                return Err("product and Poisson structure live on different spaces".into());
            }
            let r = verify_star(&s, &p);
            let code = if r.passes() { EXIT_OK } else { EXIT_FAILED };
            Out::with(code, r.to_json())
        }
    })
}

fn cmd_bracket(kind: BracketKind, left: &PathBuf, right: &PathBuf) -> Result<Out, String> {
    Ok(match kind {
        BracketKind::Schouten => {
            let (x, y) = (read_mv(left)?, read_mv(right)?);
            if x.config != y.config {
                return Err("operands live on different spaces".into());
            }
            Out::ok(schouten(&x, &y).to_json())
        }
        BracketKind::Gerstenhaber => {
            let (x, y) = (read_op(left)?, read_op(right)?);
            if x.config != y.config {
                return Err("operands live on different spaces".into());
            }
            Out::ok(gerst_bracket(&x, &y).to_json())
        }
    })
}

/// One failed invariant with the input that broke it.
pub struct Failure {
    pub module: &'static str,
    pub invariant: &'static str,
    pub counterexample: Value,
}

type Suite = fn(&mut Gen, usize, &mut Vec<Failure>);

/// Sorted by name.
pub const SUITES: &[(&str, Suite)] = &[
    ("bar-koszul", suite_bar_koszul),
    ("braces", suite_braces),
    ("compositions", suite_compositions),
    ("gerstenhaber", suite_gerstenhaber),
    ("hkr", suite_hkr),
    ("obstruction", suite_obstruction),
    ("poly-ring", suite_poly_ring),
    ("schouten-jacobi", suite_schouten),
    ("shuffle", suite_shuffle),
    ("star-product", suite_star),
];

fn suite_seed(seed: u64, name: &str) -> u64 {
    // FNV-1a, so each suite draws the same cases alone or under `all`.
    let mut h: u64 = 0xcbf29ce484222325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    seed ^ h
}

pub fn cmd_verify(suite: &str, seed: u64, cases: usize) -> Option<Value> {
    let chosen: Vec<&(&str, Suite)> = if suite == "all" {
        SUITES.iter().collect()
    } else {
        vec![SUITES.iter().find(|s| s.0 == suite)?]
    };
    let mut reports = Vec::new();
    let mut total = 0;
    for (name, f) in chosen {
        let mut g = Gen::new(suite_seed(seed, name));
        let mut fails = Vec::new();
        f(&mut g, cases, &mut fails);
        total += fails.len();
        let fails: Vec<Value> = fails
            .into_iter()
            .map(|x| json!({"module": x.module, "invariant": x.invariant, "counterexample": x.counterexample}))
            .collect();
        reports.push(json!({"name": name, "cases": cases, "failures": fails}));
    }
    Some(json!({
        "generator": "ChaCha8, seeded per suite with seed XOR fnv1a(suite name)",
        "seed": seed,
        "cases": cases,
        "suites": reports,
        "failures": total,
    }))
}

fn check(out: &mut Vec<Failure>, ok: bool, module: &'static str, invariant: &'static str, ce: impl FnOnce() -> Value) {
    if !ok {
        out.push(Failure { module, invariant, counterexample: ce() });
    }
}

fn suite_poly_ring(g: &mut Gen, cases: usize, out: &mut Vec<Failure>) {
    for _ in 0..cases {
        let (p, q, r) = (g.base_poly(3, 3), g.base_poly(3, 3), g.base_poly(3, 2));
        let ce = || json!([p.to_json(), q.to_json(), r.to_json()]);
        check(out, p.mul(&q).mul(&r) == p.mul(&q.mul(&r)), "ratpoly", "mul-assoc", ce);
        check(out, p.mul(&q.add(&r)) == p.mul(&q).add(&p.mul(&r)), "ratpoly", "distributive", ce);
        check(out, p.mul(&q) == q.mul(&p), "ratpoly", "mul-comm", ce);
        let v = Var::base(g.rng.gen_range(1..=3));
        let leibniz = p.mul(&q).derive(v) == p.derive(v).mul(&q).add(&p.mul(&q.derive(v)));
        check(out, leibniz, "ratpoly", "leibniz", ce);
        check(out, Poly::from_json(&p.to_json()).as_ref() == Ok(&p), "ratpoly", "json-round-trip", ce);
    }
}

fn suite_schouten(g: &mut Gen, cases: usize, out: &mut Vec<Failure>) {
    let c = SpaceConfig::new(3, 1);
    for _ in 0..cases {
        let (a, b, d) = (g.rng.gen_range(0..=2), g.rng.gen_range(0..=2), g.rng.gen_range(0..=2));
        let (x, y, z) = (g.multivec(c, a, 2), g.multivec(c, b, 2), g.multivec(c, d, 1));
        let (a, b) = (a as i64, b as i64);
        let ce = || json!([x.to_json(), y.to_json(), z.to_json()]);
        let anti = schouten(&x, &y).add(&schouten(&y, &x).scale(&sign((a - 1) * (b - 1))));
        check(out, anti.is_zero(), "geometry", "graded-antisymmetry", ce);
        let jac = schouten(&x, &schouten(&y, &z))
            .sub(&schouten(&schouten(&x, &y), &z))
            .sub(&schouten(&y, &schouten(&x, &z)).scale(&sign((a - 1) * (b - 1))));
        check(out, jac.is_zero(), "geometry", "graded-jacobi", ce);
        let leib = schouten(&x, &wedge(&y, &z))
            .sub(&wedge(&schouten(&x, &y), &z))
            .sub(&wedge(&y, &schouten(&x, &z)).scale(&sign((a - 1) * b)));
        check(out, leib.is_zero(), "geometry", "poisson-leibniz", ce);
        let alpha = random_form(g, c);
        let (lx, iy) = (|f: &DiffForm| lie_derivative(&x, f), |f: &DiffForm| interior(&y, f));
        let comm = lx(&iy(&alpha)).sub(&iy(&lx(&alpha)).scale(&sign((a - 1) * b)));
        check(out, comm == interior(&schouten(&x, &y), &alpha), "geometry", "lie-interior", || {
            json!([x.to_json(), y.to_json()])
        });
        let ax = g.adapted_multivec(c, a as usize, 2);
        let ay = g.adapted_multivec(c, b as usize, 2);
        let closed = is_adapted_mv(&schouten(&ax, &ay)) && is_adapted_mv(&wedge(&ax, &ay));
        check(out, closed, "geometry", "adapted-subalgebra", || json!([ax.to_json(), ay.to_json()]));
    }
}

fn random_form(g: &mut Gen, c: SpaceConfig) -> DiffForm {
    let mut a = DiffForm::zero(c);
    for _ in 0..3 {
        let k = g.rng.gen_range(0..=c.n);
        let s = g.subset(c.n, k);
        let f = g.base_poly(c.n, 2);
        a = a.add(&DiffForm::term(c, s, f));
    }
    a
}

fn suite_gerstenhaber(g: &mut Gen, cases: usize, out: &mut Vec<Failure>) {
    let c = SpaceConfig::new(2, 1);
    for _ in 0..cases.min(20) {
        let (a, b, d) = (g.rng.gen_range(0..=2), g.rng.gen_range(1..=2), g.rng.gen_range(1..=2));
        let (x, y, z) = (g.op(c, a, 2, 2), g.op(c, b, 2, 2), g.op(c, d, 1, 1));
        let (da, db) = (a as i64 - 1, b as i64 - 1);
        let ce = || json!([x.to_json(), y.to_json(), z.to_json()]);
        check(out, hochschild_b(&hochschild_b(&x)).is_zero(), "hochschild", "b-squared", ce);
        check(out, dual_del_h(&x) == hochschild_b(&x), "koszulbar", "dual-bar-differential", ce);
        let anti = gerst_bracket(&x, &y).add(&gerst_bracket(&y, &x).scale(&sign(da * db)));
        check(out, anti.is_zero(), "hochschild", "graded-antisymmetry", ce);
        let jac = gerst_bracket(&x, &gerst_bracket(&y, &z))
            .sub(&gerst_bracket(&gerst_bracket(&x, &y), &z))
            .sub(&gerst_bracket(&y, &gerst_bracket(&x, &z)).scale(&sign(da * db)));
        check(out, jac.is_zero(), "hochschild", "graded-jacobi", ce);
        let assoc = |p: &PolyDiffOp, q: &PolyDiffOp| gerst_product(&gerst_product(&x, p), q).sub(&gerst_product(&x, &gerst_product(p, q)));
        let pre_lie = assoc(&y, &z).sub(&assoc(&z, &y).scale(&sign(db * (d as i64 - 1))));
        check(out, pre_lie.is_zero(), "hochschild", "gerstenhaber-identity", ce);
        check(out, xi_project(&hochschild_b(&x)) == btilde(&xi_project(&x)), "hochschild", "xi-intertwines-b", ce);
        let lhs = hochschild_b(&cup(&x, &y));
        let rhs = cup(&hochschild_b(&x), &y).add(&cup(&x, &hochschild_b(&y)).scale(&sign(a as i64)));
        check(out, lhs == rhs, "hochschild", "cup-derivation", ce);
        let ax = g.adapted_op(c, a, 2, 2);
        let ay = g.adapted_op(c, b, 2, 2);
        let closed = is_adapted_op(&gerst_bracket(&ax, &ay)) && is_adapted_op(&hochschild_b(&ax));
        check(out, closed, "hochschild", "adapted-subcomplex", || json!([ax.to_json(), ay.to_json()]));
    }
}

fn suite_hkr(g: &mut Gen, cases: usize, out: &mut Vec<Failure>) {
    let configs = [SpaceConfig::new(2, 1), SpaceConfig::new(3, 1), SpaceConfig::new(2, 2)];
    for i in 0..cases.min(20) {
        let c = configs[i % configs.len()];
        let k = g.rng.gen_range(0..=2);
        let x = g.adapted_multivec(c, k, 2);
        let ce = || x.to_json();
        check(out, pi_hkr(&psi_hkr(&x, k)) == x, "hkr", "pi-psi", ce);
        check(out, pi_hkr(&psi1(&x, k)) == x, "hkr", "pi-psi1", ce);
        check(out, hochschild_b(&psi1(&x, k)).is_zero(), "hkr", "psi1-cocycle", ce);
        check(out, is_adapted_op(&psi1(&x, k)), "hkr", "psi1-adapted", ce);
        let ry = g.rng.gen_range(1..=2);
        let y = g.adapted_multivec(c, ry, 2);
        let ky = y.rank().unwrap_or(0);
        let br = pi_hkr(&gerst_bracket(&psi1(&x, k), &psi1(&y, ky)));
        let opposite = schouten(&y, &x).scale(&-crate::ratpoly::rint(1));
        check(out, br == opposite, "hkr", "bracket-to-opposite-schouten", || json!([x.to_json(), y.to_json()]));
        let reta = g.rng.gen_range(0..=2);
        let eta = g.adapted_op(c, reta, 2, 1);
        let phi = hochschild_b(&eta);
        let ok = match primitive(&phi) {
            Ok(xi) => hochschild_b(&xi) == phi && is_adapted_op(&xi),
            Err(_) => false,
        };
        check(out, ok, "hkr", "adapted-primitive", || eta.to_json());
    }
}

fn suite_bar_koszul(g: &mut Gen, cases: usize, out: &mut Vec<Failure>) {
    let n = 2;
    for i in 0..cases.min(25) {
        let k = i % 4;
        let phi = g.bar_chain(n, k, 2);
        let w = g.koszul_chain(n, k, 2);
        let ce = || json!({"k": k, "bar": phi.value.to_json(), "koszul": format!("{w:?}")});
        let hb = if k == 0 {
            h_h_minus1(n, &epsilon(&phi)).add(&del_h(&h_h(&phi)))
        } else {
            h_h(&del_h(&phi)).add(&del_h(&h_h(&phi)))
        };
        check(out, hb == phi, "koszulbar", "bar-homotopy", ce);
        let hk = if k == 0 {
            h_k_minus1(n, &epsilon_k(&w)).add(&del_k(&h_k(&w)))
        } else {
            h_k(&del_k(&w)).add(&del_k(&h_k(&w)))
        };
        check(out, hk == w, "koszulbar", "koszul-homotopy", ce);
        check(out, g_map(&f_map(&w)) == w, "koszulbar", "GF-identity", ce);
        if k >= 1 {
            check(out, f_map(&del_k(&w)) == del_h(&f_map(&w)), "koszulbar", "F-chain-map", ce);
            check(out, g_map(&del_h(&phi)) == del_k(&g_map(&phi)), "koszulbar", "G-chain-map", ce);
        }
        if k >= 2 {
            check(out, del_h(&del_h(&phi)).is_zero(), "koszulbar", "bar-d-squared", ce);
        }
        let th = theta(&phi);
        let mut rhs = del_h(&s_h(&phi));
        if k >= 1 {
            rhs = rhs.add(&s_h(&del_h(&phi)));
        }
        check(out, phi.sub(&th) == rhs, "koszulbar", "theta-homotopy", ce);
    }
}

fn tens(w: &[usize]) -> Tens {
    Tens::from([(w.to_vec(), crate::ratpoly::rint(1))])
}

fn random_word(g: &mut Gen, dim: usize, max: usize) -> Vec<usize> {
    let len = g.rng.gen_range(1..=max);
    (0..len).map(|_| g.rng.gen_range(0..dim)).collect()
}

fn suite_shuffle(g: &mut Gen, cases: usize, out: &mut Vec<Failure>) {
    let s = GradedSpace::from_degrees(&[0, 1, 1, 2]);
    for _ in 0..cases {
        let (u, v, w) = (random_word(g, 4, 2), random_word(g, 4, 2), random_word(g, 4, 1));
        let ce = || json!([u, v, w]);
        let l = crate::coalg::shuffle_t(&s, &shuffle(&s, &u, &v), &tens(&w));
        let r = crate::coalg::shuffle_t(&s, &tens(&u), &shuffle(&s, &v, &w));
        check(out, l == r, "coalg", "shuffle-assoc", ce);
        let mut swapped = shuffle(&s, &v, &u);
        let e = sign(s.word_deg(&u) * s.word_deg(&v));
        swapped.values_mut().for_each(|c| *c *= &e);
        check(out, shuffle(&s, &u, &v) == swapped, "coalg", "shuffle-graded-comm", ce);
        let mut killed = Tens::new();
        for (x, c) in shuffle(&s, &u, &v) {
            for (y, d) in eulerian(&s, &x) {
                let e = killed.entry(y).or_default();
                *e += &c * d;
            }
        }
        killed.retain(|_, c| !num::Zero::is_zero(c));
        check(out, killed.is_empty(), "coalg", "eulerian-kills-shuffles", ce);
    }
}

fn suite_braces(g: &mut Gen, cases: usize, out: &mut Vec<Failure>) {
    let (h, m1) = odd_truncated();
    let cap = 4;
    for _ in 0..cases.min(4) {
        let pal = [
            CochainTable::random(&h, 0, &[1, 2], g, 0.5),
            CochainTable::random(&h, 1, &[1, 2], g, 0.5),
            CochainTable::random(&h, -1, &[2, 3], g, 0.5),
        ];
        let pick = |g: &mut Gen| {
            let len = g.rng.gen_range(0..=2);
            CochainTensor::word((0..len).map(|_| pal[g.rng.gen_range(0..3)].clone()).collect())
        };
        let (x, y) = (pick(g), pick(g));
        let ce = || json!(format!("{:?} {:?}", x.terms.len(), y.terms.len()));
        let f = bullet_k(&h, &x, &y, cap);
        check(out, f.eq_at(&bullet_k_coinduced(&h, &x, &y, cap), &h, cap), "coalg", "bullet-vs-coinduction", ce);
        if let Ok(b) = b_k(&h, &m1, &x, cap) {
            let sq = b_k(&h, &m1, &b, cap).map(|t| t.expand(&h, cap).is_empty()).unwrap_or(false);
            check(out, sq, "coalg", "bK-squared", ce);
        }
    }
}

fn suite_compositions(g: &mut Gen, cases: usize, out: &mut Vec<Failure>) {
    let s = GradedSpace::from_degrees(&[0, 1, 2]);
    let cap = 4;
    for _ in 0..cases.min(3) {
        let ce = || json!("random tables over degrees [0,1,2]");
        let (a, b, c) = (
            CochainTable::random(&s, 1, &[1, 2], g, 0.4),
            CochainTable::random(&s, 0, &[2], g, 0.4),
            CochainTable::random(&s, -1, &[1, 2], g, 0.4),
        );
        let zero = |r: Result<CochainTable, _>| r.map(|t| t.is_zero()).unwrap_or(false);
        check(out, zero(gerstenhaber_defect(|x, y| circ_g(&s, x, y, cap), &a, &b, &c)), "coalg", "G-identity", ce);
        let (h1, h2, h3) = (a.harrison_part(&s, cap), b.harrison_part(&s, cap), c.harrison_part(&s, cap));
        check(out, zero(gerstenhaber_defect(|x, y| circ_h(&s, x, y, cap), &h1, &h2, &h3)), "coalg", "H-identity", ce);
        let (a, b, c) = (
            random_sym(&s, 1, &[1, 2], g, 0.4),
            random_sym(&s, 0, &[2], g, 0.4),
            random_sym(&s, -1, &[1, 2], g, 0.4),
        );
        check(out, zero(gerstenhaber_defect(|x, y| circ_nr(&s, x, y, cap), &a, &b, &c)), "coalg", "NR-identity", ce);
    }
    let alg = GerstAlgebra::example();
    let l = &alg.letters;
    let cap = 3;
    for _ in 0..cases.min(2) {
        let mut pick = |deg| gharrison_part(l, &random_gcochain(l, deg, cap, &[1, 2], g, 0.05), cap);
        let (a, b, c) = (pick(1), pick(0), pick(-1));
        let ok = gerstenhaber_defect(|x, y| circ_t(l, x, y, cap), &a, &b, &c).map(|t| t.is_zero()).unwrap_or(false);
        check(out, ok, "coalg", "T-identity", || json!("Harrison cochains on the 5-dim example"));
    }
}

fn suite_obstruction(g: &mut Gen, cases: usize, out: &mut Vec<Failure>) {
    let alg = GerstAlgebra::example();
    let l = &alg.letters;
    let cap = 3;
    for i in 0..cases.min(3) {
        let deg = [-1i64, 0, 1][i % 3];
        let c = gharrison_part(l, &random_gcochain(l, deg, cap, &[1, 2], g, 0.05), cap);
        let ce = || json!({"degree": deg, "entries": c.table.len()});
        let d = |x: &crate::coalg::GCochain, w| obstruction_diff(&alg, x, w, cap).unwrap();
        let (ce1, ha) = (d(&c, Obstruction::CE), d(&c, Obstruction::Har));
        check(out, d(&ce1, Obstruction::CE).is_zero(), "coalg", "D_CE-squared", ce);
        check(out, d(&ha, Obstruction::Har).is_zero(), "coalg", "D_Har-squared", ce);
        check(out, d(&ce1, Obstruction::Har).add(&d(&ha, Obstruction::CE)).is_zero(), "coalg", "anticommute", ce);
    }
}

fn suite_star(g: &mut Gen, cases: usize, out: &mut Vec<Failure>) {
    let c = SpaceConfig::new(2, 1);
    let p = MultiVec::term(c, vec![2, 1], Poly::one());
    let s = StarProduct::standard_ordered(c, 3);
    check(out, verify_star(&s, &p).passes(), "formality", "standard-ordered", || s.to_json());
    let t = perturb(c, 2).expect("rank cap 2");
    for _ in 0..cases.min(20) {
        let rx = g.rng.gen_range(0..=2);
        let x = g.adapted_multivec(c, rx, 2);
        let ry = g.rng.gen_range(0..=2);
        let y = g.adapted_multivec(c, ry, 2);
        if x.is_zero() || y.is_zero() {
            continue;
        }
        let ok = t.bracket2(&x, &y).map(|b| b == schouten(&y, &x).scale(&-crate::ratpoly::rint(1))).unwrap_or(false);
        check(out, ok, "formality", "rank-two-is-opposite-schouten", || json!([x.to_json(), y.to_json()]));
    }
    match mc_build(&p, 2, true) {
        Ok(BuildOutcome::Product(s)) => {
            check(out, verify_star(&s, &p).passes(), "formality", "mc-build", || s.to_json())
        }
        _ => check(out, false, "formality", "mc-build", || p.to_json()),
    }
}
