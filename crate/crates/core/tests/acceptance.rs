//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use cfk::cli::cmd_verify;
use cfk::coalg::{
    b_k, bullet_k, bullet_k_coinduced, gharrison_part, obstruction_diff, odd_truncated, random_gcochain, CochainTable,
    CochainTensor, GerstAlgebra, Obstruction,
};
use cfk::formality::{mc_build, perturb, verify_star, BuildOutcome, StarProduct};
use cfk::gen::Gen;
use cfk::geometry::{schouten, wedge, MultiVec, SpaceConfig};
use cfk::hkr::{decompose, primitive, psi1};
use cfk::hochschild::{cup, gerst_bracket, hochschild_b, is_adapted_op};
use cfk::koszulbar::{
    hochschild_truncated_cohomology, predicted_dim, predicted_hochschild_dim, theta, truncated_cohomology,
    BimoduleTag, HochschildComplex,
};
use cfk::ratpoly::{rint, sign, Poly};
use std::time::{Duration, Instant};

const SEED: u64 = 0;
const CASES: usize = 50;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn suites(names: &[&str]) -> (usize, Vec<String>) {
    let mut fails = 0;
    let mut notes = Vec::new();
    for name in names {
        let v = cmd_verify(name, SEED, CASES).expect("known suite");
        let f = v["failures"].as_u64().unwrap() as usize;
        fails += f;
        notes.push(format!("{name}:{f}"));
    }
    (fails, notes)
}

fn identity_suites() -> Outcome {
    let (f, notes) = suites(&["schouten-jacobi", "gerstenhaber", "compositions"]);
    outcome(f == 0, format!("failures {}", notes.join(" ")))
}

fn koszul_bar() -> Outcome {
    let (f, notes) = suites(&["bar-koszul"]);
    let mut g = Gen::new(SEED);
    let mut idem = 0;
    for k in 0..=3 {
        for _ in 0..5 {
            let phi = g.bar_chain(2, k, 2);
            let t = theta(&phi);
            if theta(&t) != t {
                idem += 1;
            }
        }
    }
    outcome(f == 0 && idem == 0, format!("failures {}, theta-idempotent:{idem}", notes.join(" ")))
}

fn cohomology() -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for c in [SpaceConfig::new(2, 1), SpaceConfig::new(3, 2)] {
        for d in 0..=2 {
            for o in 1..=2 {
                for tag in BimoduleTag::ALL {
                    for k in 0..=c.n {
                        let r = truncated_cohomology(tag, c, k, d, o).unwrap();
                        checked += 1;
                        if r.dim != predicted_dim(tag, c, k, d, o) {
                            bad.push(format!("{} n{} l{} d{d} o{o} k{k}: {}", tag.name(), c.n, c.l, r.dim));
                        }
                        let forced_zero = match tag {
                            BimoduleTag::MDAB => k == 1 || k == 2,
                            BimoduleTag::MDBB => k == 2 && c.l == 1,
                            _ => false,
                        };
                        if forced_zero && r.dim != 0 {
                            bad.push(format!("{} k{k} should vanish", tag.name()));
                        }
                    }
                }
                for which in [HochschildComplex::G, HochschildComplex::GI, HochschildComplex::GTilde] {
                    for k in 0..=2 {
                        let r = hochschild_truncated_cohomology(which, c, k, d, o).unwrap();
                        checked += 1;
                        if r.dim != predicted_hochschild_dim(which, c, k, d, o) {
                            bad.push(format!("{which:?} n{} l{} d{d} o{o} k{k}: {}", c.n, c.l, r.dim));
                        }
                    }
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{checked} groups checked; mismatches: {bad:?}"))
}

fn hkr() -> Outcome {
    let (f, notes) = suites(&["hkr"]);
    let mut g = Gen::new(SEED ^ 4);
    let mut bad = 0;
    let mut tried = 0;
    for c in [SpaceConfig::new(2, 1), SpaceConfig::new(3, 2)] {
        for _ in 0..10 {
            let (a, b) = (g.rng_range(1, 2), g.rng_range(1, 2));
            let x = g.adapted_multivec(c, a, 2);
            let y = g.adapted_multivec(c, b, 2);
            let (px, py) = (psi1(&x, a), psi1(&y, b));
            tried += 1;
            // Bracket defect against the convention HKR actually intertwines.
            let opposite = schouten(&y, &x).scale(&-rint(1));
            let d4 = gerst_bracket(&px, &py).sub(&psi1(&opposite, a + b - 1));
            match decompose(&d4) {
                Ok(d) if d.harmonic.is_zero() && is_adapted_op(&d.primitive) && hochschild_b(&d.primitive) == d4 => {}
                _ => bad += 1,
            }
            let d5 = cup(&px, &py).sub(&psi1(&wedge(&x, &y), a + b));
            match decompose(&d5) {
                Ok(d) if d.harmonic.is_zero() && hochschild_b(&d.primitive) == d5 => {}
                _ => bad += 1,
            }
            let eta = g.adapted_op(c, a, 2, 2);
            let phi = hochschild_b(&eta);
            if !primitive(&phi).map(|xi| hochschild_b(&xi) == phi).unwrap_or(false) {
                bad += 1;
            }
        }
    }
    outcome(f == 0 && bad == 0, format!("failures {}, defect decompositions {tried} pairs, bad {bad}", notes.join(" ")))
}

trait Range {
    fn rng_range(&mut self, lo: usize, hi: usize) -> usize;
}

impl Range for Gen {
    fn rng_range(&mut self, lo: usize, hi: usize) -> usize {
        use rand::Rng;
        self.rng.gen_range(lo..=hi)
    }
}

fn perturbation_rank_two() -> Outcome {
    let c = SpaceConfig::new(2, 1);
    let t = perturb(c, 2).unwrap();
    let mut g = Gen::new(SEED ^ 5);
    let (mut pairs, mut opposite, mut literal, mut with_odd, mut odd_pairs) = (0, 0, 0, 0, 0);
    while pairs < CASES {
        let (a, b) = (g.rng_range(0, 2), g.rng_range(0, 2));
        let (x, y) = (g.adapted_multivec(c, a, 2), g.adapted_multivec(c, b, 2));
        if x.is_zero() || y.is_zero() {
            continue;
        }
        pairs += 1;
        let b2 = t.bracket2(&x, &y).unwrap();
        if b2 == schouten(&y, &x).scale(&-rint(1)) {
            opposite += 1;
        }
        let same = b2 == schouten(&x, &y);
        literal += same as usize;
        if a % 2 == 1 || b % 2 == 1 {
            odd_pairs += 1;
            with_odd += same as usize;
        }
    }
    outcome(
        opposite == pairs && with_odd == odd_pairs,
        format!(
            "{pairs} adapted pairs: d'2(x,y) = -[y,x]_S on {opposite}; literal [x,y]_S on {literal} \
             ({with_odd}/{odd_pairs} pairs with an odd rank; both-even pairs differ by the sign convention)"
        ),
    )
}

fn words(max_len: usize, letters: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for a in 0..letters {
                let mut v: Vec<usize> = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn braces() -> Outcome {
    let (h, m1) = odd_truncated();
    let cap = 3;
    let mut g = Gen::new(SEED ^ 6);
    let pal = [
        CochainTable::random(&h, 0, &[1, 2], &mut g, 0.5),
        CochainTable::random(&h, 1, &[1, 2], &mut g, 0.5),
        CochainTable::random(&h, -1, &[1, 2], &mut g, 0.5),
    ];
    let mk = |w: &Vec<usize>| CochainTensor::word(w.iter().map(|&i| pal[i].clone()).collect());
    let deg = |w: &Vec<usize>| w.iter().map(|&i| pal[i].degree).sum::<i64>();
    let ws = words(3, 3);
    let (mut pairs, mut bad_oracle, mut bad_sq, mut bad_der) = (0, 0, 0, 0);
    let mut bks = Vec::new();
    for u in &ws {
        let b = b_k(&h, &m1, &mk(u), cap).unwrap();
        if !b_k(&h, &m1, &b, cap).unwrap().expand(&h, cap).is_empty() {
            bad_sq += 1;
        }
        bks.push(b);
    }
    for (i, u) in ws.iter().enumerate() {
        for (j, v) in ws.iter().enumerate() {
            if u.len() + v.len() > 3 {
                continue;
            }
            pairs += 1;
            let (x, y) = (mk(u), mk(v));
            let prod = bullet_k(&h, &x, &y, cap);
            if !prod.eq_at(&bullet_k_coinduced(&h, &x, &y, cap), &h, cap) {
                bad_oracle += 1;
            }
            let lhs = b_k(&h, &m1, &prod, cap).unwrap();
            let rhs = bullet_k(&h, &bks[i], &y, cap).add(&bullet_k(&h, &x, &bks[j], cap).scale(&sign(deg(u))));
            if !lhs.eq_at(&rhs, &h, cap) {
                bad_der += 1;
            }
        }
    }
    outcome(
        bad_oracle + bad_sq + bad_der == 0,
        format!(
            "{pairs} word pairs over degrees {:?}: oracle mismatches {bad_oracle}, b_K² {bad_sq}, derivation {bad_der}",
            h.degrees
        ),
    )
}

fn star_products() -> Outcome {
    let c = SpaceConfig::new(2, 1);
    let p = MultiVec::term(c, vec![2, 1], Poly::one());
    let a = verify_star(&StarProduct::standard_ordered(c, 4), &p).passes();
    let b = match mc_build(&p, 3, true) {
        Ok(BuildOutcome::Product(s)) => s.order() == 3 && verify_star(&s, &p).passes(),
        _ => false,
    };
    let c2 = SpaceConfig::new(2, 2);
    let q = MultiVec::term(c2, vec![1, 2], c2.parse_poly("x").unwrap());
    let cc = match mc_build(&q, 2, true) {
        Ok(BuildOutcome::Product(s)) => s.c.iter().all(is_adapted_op) && verify_star(&s, &q).passes(),
        _ => false,
    };
    let weyl = verify_star(&StarProduct::moyal(c, 1), &p);
    let d = weyl.passes_except_adapted() && !weyl.passes();
    outcome(a && b && cc && d, format!("(a) {a} (b) {b} (c) {cc} (d) {d}"))
}

fn obstruction_differentials() -> Outcome {
    let alg = GerstAlgebra::example();
    let l = &alg.letters;
    let cap = 4;
    let mut g = Gen::new(SEED ^ 8);
    let mut bad = 0;
    let mut tried = 0;
    for deg in [-1i64, 0, 1] {
        for _ in 0..2 {
            let c = gharrison_part(l, &random_gcochain(l, deg, cap, &[1, 2], &mut g, 0.05), cap);
            let d = |x, w| obstruction_diff(&alg, x, w, cap).unwrap();
            let (ce, har) = (d(&c, Obstruction::CE), d(&c, Obstruction::Har));
            tried += 1;
            let ok = d(&ce, Obstruction::CE).is_zero()
                && d(&har, Obstruction::Har).is_zero()
                && d(&ce, Obstruction::Har).add(&d(&har, Obstruction::CE)).is_zero()
                && !(ce.is_zero() && har.is_zero());
            if !ok {
                bad += 1;
            }
        }
    }
    outcome(bad == 0, format!("{tried} Harrison cochains at cap {cap}, failures {bad}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 8] = [
        ("exact identity suites", identity_suites, 60),
        ("koszul/bar comparison and homotopies", koszul_bar, 120),
        ("truncated cohomology dimensions", cohomology, 300),
        ("HKR maps and defect decompositions", hkr, 120),
        ("rank-two perturbation bracket", perturbation_rank_two, 300),
        ("braces oracle and b_K", braces, 300),
        ("star products", star_products, 300),
        ("obstruction differentials", obstruction_differentials, 300),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = f();
        let el = t.elapsed();
        let ok = o.ok && el <= Duration::from_secs(*budget);
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {} {}: {name} [{:.1}s] {}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            el.as_secs_f64(),
            o.detail
        );
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
