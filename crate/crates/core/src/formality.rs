//! Truncated homotopy transfer along the adapted HKR splitting, and the
//! order-by-order construction of adapted star products.
//!
//! Both sides use the shifted symmetric picture. A multivector of rank `k`
//! sits in degree `k − 2`, a cochain of arity `a` in degree `a − 2`. On the
//! cochain side `Q₁φ = −δφ` with `δ = [μ, ·]_G`, and
//! `Q₂(φ·χ) = (−1)^{a(φ)−1} [φ, χ]_G`.

use crate::coalg::reorder_sign;
use crate::geometry::{is_adapted_mv, schouten, MultiVec, SpaceConfig};
use crate::hkr::{decompose, psi1, HkrError};
use crate::hochschild::{circ_i, gerst_bracket, gerst_product, hochschild_b, is_adapted_op, PolyDiffOp};
use crate::ratpoly::{binomial, factorial, rat, rint, sign, Poly, Rat};
use num::One;
use serde_json::{json, Value};
use std::cell::RefCell;
use std::collections::BTreeMap;

/// Resource guard for `perturb`.
pub const MAX_RANK: usize = 3;

#[derive(Debug, thiserror::Error)]
pub enum FormalityError {
    #[error("P is not a Poisson bivector: [P,P]_S = {}", .0.to_json())]
    NotPoisson(Box<MultiVec>),
    #[error("P is not adapted to C")]
    NotAdapted,
    #[error("P must be a bivector")]
    NotBivector,
    #[error("rank cap {0} outside 1..={MAX_RANK}")]
    RankCap(usize),
    #[error("inputs must be nonzero multivectors of a single rank")]
    Inhomogeneous,
    #[error("decomposition failed at rank {rank}: {source}; cocycle {cocycle}")]
    Decompose { rank: usize, source: HkrError, cocycle: String },
    #[error("postcondition violated: {0}")]
    Postcondition(String),
}

fn rank_of(x: &MultiVec) -> Result<usize, FormalityError> {
    x.rank().ok_or(FormalityError::Inhomogeneous)
}

/// Shifted degrees of a word of multivectors.
fn sdegs(xs: &[MultiVec]) -> Result<Vec<i64>, FormalityError> {
    xs.iter().map(|x| rank_of(x).map(|k| k as i64 - 2)).collect()
}

/// Ordered splittings `x ↦ (x_I, x_J)` with their Koszul signs.
fn unshuffles(degs: &[i64]) -> Vec<(Vec<usize>, Vec<usize>, Rat)> {
    let n = degs.len();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let (i, j): (Vec<usize>, Vec<usize>) = (0..n).partition(|&p| mask >> p & 1 == 1);
        let order: Vec<usize> = i.iter().chain(j.iter()).copied().collect();
        let s = rint(reorder_sign(degs, &order));
        out.push((i, j, s));
    }
    out
}

fn pick(xs: &[MultiVec], idx: &[usize]) -> Vec<MultiVec> {
    idx.iter().map(|&p| xs[p].clone()).collect()
}

fn key(xs: &[MultiVec]) -> String {
    serde_json::to_string(&xs.iter().map(MultiVec::to_json).collect::<Vec<_>>()).unwrap()
}

/// `d'` and `ψ` up to rank `N`, evaluated lazily on words of adapted
/// multivectors and memoized.
pub struct Perturbation {
    pub config: SpaceConfig,
    pub rank_cap: usize,
    cache: RefCell<BTreeMap<String, (MultiVec, Option<PolyDiffOp>)>>,
}

pub fn perturb(config: SpaceConfig, n: usize) -> Result<Perturbation, FormalityError> {
    if n == 0 || n > MAX_RANK {
        return Err(FormalityError::RankCap(n));
    }
    Ok(Perturbation { config, rank_cap: n, cache: RefCell::new(BTreeMap::new()) })
}

impl Perturbation {
    fn arity(xs: &[MultiVec]) -> Result<i64, FormalityError> {
        let r: i64 = sdegs(xs)?.iter().sum();
        Ok(r + 2)
    }

    fn check_len(&self, n: usize, lo: usize) -> Result<(), FormalityError> {
        if n < lo || n > self.rank_cap {
            return Err(FormalityError::RankCap(n));
        }
        Ok(())
    }

    /// `ψ^{[n]}(x₁⋯x_n)`; `None` when the output arity is negative.
    pub fn psi(&self, xs: &[MultiVec]) -> Result<Option<PolyDiffOp>, FormalityError> {
        self.check_len(xs.len(), 1)?;
        if xs.len() == 1 {
            let k = rank_of(&xs[0])?;
            return Ok(Some(psi1(&xs[0], k)));
        }
        Ok(self.solve(xs)?.1)
    }

    /// `d'^{[n]}(x₁⋯x_n)`, `n ≥ 2`.
    pub fn d_prime(&self, xs: &[MultiVec]) -> Result<MultiVec, FormalityError> {
        self.check_len(xs.len(), 2)?;
        Ok(self.solve(xs)?.0)
    }

    /// Unshifted binary bracket `(−1)^{k_x−1} d'^{[2]}(x·y) = π[ψ^{[1]}x, ψ^{[1]}y]_G`.
    /// This is `−[y,x]_S`, which agrees with `[x,y]_S` unless both ranks are even.
    pub fn bracket2(&self, x: &MultiVec, y: &MultiVec) -> Result<MultiVec, FormalityError> {
        let k = rank_of(x)? as i64;
        Ok(self.d_prime(&[x.clone(), y.clone()])?.scale(&sign(k - 1)))
    }

    /// Right-hand side of `ψ^{[1]}d'^{[n]} + δψ^{[n]} = R_n`.
    pub fn residual(&self, xs: &[MultiVec]) -> Result<Option<PolyDiffOp>, FormalityError> {
        let n = xs.len();
        let degs = sdegs(xs)?;
        let a = Self::arity(xs)?;
        if a + 1 < 0 {
            return Ok(None);
        }
        let mut r = PolyDiffOp::zero(self.config, (a + 1) as usize);
        let half = rat(1, 2);
        for (i, j, e) in unshuffles(&degs) {
            if i.is_empty() || j.is_empty() {
                continue;
            }
            let (Some(pi), Some(pj)) = (self.psi(&pick(xs, &i))?, self.psi(&pick(xs, &j))?) else {
                continue;
            };
            if pi.is_zero() || pj.is_zero() {
                continue;
            }
            let q2 = gerst_bracket(&pi, &pj).scale(&sign(pi.arity as i64 - 1));
            r = r.add(&q2.scale(&(&e * &half)));
        }
        for (i, j, e) in unshuffles(&degs) {
            if i.len() < 2 || i.len() == n {
                continue;
            }
            let inner = self.d_prime(&pick(xs, &i))?;
            if inner.is_zero() {
                continue;
            }
            let mut word = vec![inner];
            word.extend(pick(xs, &j));
            if let Some(p) = self.psi(&word)? {
                r = r.sub(&p.scale(&e));
            }
        }
        Ok(Some(r))
    }

    fn solve(&self, xs: &[MultiVec]) -> Result<(MultiVec, Option<PolyDiffOp>), FormalityError> {
        let k = key(xs);
        if let Some(v) = self.cache.borrow().get(&k) {
            return Ok(v.clone());
        }
        let a = Self::arity(xs)?;
        let out = match self.residual(xs)? {
            None => (MultiVec::zero(self.config), None),
            Some(r) => {
                let dec = decompose(&r).map_err(|source| FormalityError::Decompose {
                    rank: xs.len(),
                    source,
                    cocycle: r.to_json().to_string(),
                })?;
                // δ = (−1)^{a−1} b on arity-a cochains.
                let psi = (a >= 0).then(|| dec.primitive.scale(&sign(a - 1)));
                (dec.harmonic, psi)
            }
        };
        self.cache.borrow_mut().insert(k, out.clone());
        Ok(out)
    }

    /// `ψ^{[1]}d'^{[n]} + δψ^{[n]} − R_n`, zero by construction.
    pub fn morphism_defect(&self, xs: &[MultiVec]) -> Result<PolyDiffOp, FormalityError> {
        let Some(r) = self.residual(xs)? else {
            return Ok(PolyDiffOp::zero(self.config, 0));
        };
        let d = self.d_prime(xs)?;
        let mut lhs = psi1(&d, r.arity);
        if let Some(p) = self.psi(xs)? {
            let mu = PolyDiffOp::mu(self.config);
            lhs = lhs.add(&gerst_bracket(&mu, &p));
        }
        Ok(lhs.sub(&r))
    }

    /// Rank-`n` component of `d'∘d'` for `3 ≤ n ≤ N+1`.
    pub fn linf_defect(&self, xs: &[MultiVec]) -> Result<MultiVec, FormalityError> {
        let n = xs.len();
        if n < 3 || n > self.rank_cap + 1 {
            return Err(FormalityError::RankCap(n));
        }
        let degs = sdegs(xs)?;
        let mut out = MultiVec::zero(self.config);
        for (i, j, e) in unshuffles(&degs) {
            if i.len() < 2 || j.is_empty() {
                continue;
            }
            let inner = self.d_prime(&pick(xs, &i))?;
            if inner.is_zero() {
                continue;
            }
            let mut word = vec![inner];
            word.extend(pick(xs, &j));
            out = out.add(&self.d_prime(&word)?.scale(&e));
        }
        Ok(out)
    }
}

/// Bidifferential coefficients `C₁ … C_N` of `μ + Σ h^r C_r`.
#[derive(Clone, Debug, PartialEq)]
pub struct StarProduct {
    pub config: SpaceConfig,
    pub c: Vec<PolyDiffOp>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObstructionReport {
    pub order: usize,
    pub class: MultiVec,
}

#[derive(Clone, Debug)]
pub enum BuildOutcome {
    Product(StarProduct),
    Obstruction(ObstructionReport),
}

impl StarProduct {
    pub fn order(&self) -> usize {
        self.c.len()
    }

    /// `C_0 = μ`, then `C_1 … C_N`.
    fn coeff(&self, r: usize) -> PolyDiffOp {
        if r == 0 {
            PolyDiffOp::mu(self.config)
        } else {
            self.c[r - 1].clone()
        }
    }

    pub fn truncate(&self, n: usize) -> StarProduct {
        StarProduct { config: self.config, c: self.c[..n.min(self.c.len())].to_vec() }
    }

    pub fn to_json(&self) -> Value {
        json!({"order": self.order(), "C": self.c.iter().map(PolyDiffOp::to_json).collect::<Vec<_>>()})
    }

    pub fn from_json(v: &Value, fallback: Option<SpaceConfig>) -> Result<StarProduct, String> {
        let cs = v.get("C").and_then(Value::as_array).ok_or("missing \"C\"")?;
        let c = cs.iter().map(|x| PolyDiffOp::from_json(x, fallback)).collect::<Result<Vec<_>, _>>()?;
        let config = c.first().map(|p| p.config).or(fallback).ok_or("empty product needs n, l")?;
        if c.iter().any(|p| p.arity != 2 || p.config != config) {
            return Err("every C_r must be a bidifferential operator on one space".into());
        }
        if let Some(o) = v.get("order").and_then(Value::as_u64) {
            if o as usize != c.len() {
                return Err(format!("order {o} but {} coefficients", c.len()));
            }
        }
        Ok(StarProduct { config, c })
    }

    /// `f ∂_y^r ⊗ ∂_x^r / r!`: the standard-ordered product for `P = ∂_y∧∂_x`
    /// with `x = x₁`, `y = x₂`.
    pub fn standard_ordered(config: SpaceConfig, n: usize) -> StarProduct {
        let c = (1..=n)
            .map(|r| {
                let r32 = r as u32;
                let mut p = PolyDiffOp::zero(config, 2);
                let mut a = vec![0; config.n];
                let mut b = vec![0; config.n];
                a[1] = r32;
                b[0] = r32;
                p.add_term(vec![a, b], Poly::constant(Rat::one() / factorial(r32)));
                p
            })
            .collect();
        StarProduct { config, c }
    }

    /// Moyal product for the same `P`:
    /// `C_r = (1/r!)(1/2)^r (∂_y⊗∂_x − ∂_x⊗∂_y)^r`.
    pub fn moyal(config: SpaceConfig, n: usize) -> StarProduct {
        let c = (1..=n)
            .map(|r| {
                let r32 = r as u32;
                let w = Rat::one() / factorial(r32) / rint(1 << r);
                let mut p = PolyDiffOp::zero(config, 2);
                for j in 0..=r32 {
                    let mut a = vec![0; config.n];
                    let mut b = vec![0; config.n];
                    a[1] = r32 - j;
                    a[0] = j;
                    b[0] = r32 - j;
                    b[1] = j;
                    let coeff = &w * binomial(r32, j) * sign(j as i64);
                    p.add_term(vec![a, b], Poly::constant(coeff));
                }
                p
            })
            .collect();
        StarProduct { config, c }
    }
}

impl ObstructionReport {
    pub fn to_json(&self) -> Value {
        json!({"order": self.order, "class": self.class.to_json()})
    }
}

fn check_poisson(p: &MultiVec, require_adapted: bool) -> Result<(), FormalityError> {
    if !p.is_zero() && p.rank() != Some(2) {
        return Err(FormalityError::NotBivector);
    }
    let pp = schouten(p, p);
    if !pp.is_zero() {
        return Err(FormalityError::NotPoisson(Box::new(pp)));
    }
    if require_adapted && !is_adapted_mv(p) {
        return Err(FormalityError::NotAdapted);
    }
    Ok(())
}

/// `Σ_{i+j=k, i,j≥1} C_i ∘_G C_j`.
fn mc_defect(c: &[PolyDiffOp], k: usize) -> PolyDiffOp {
    let mut o = PolyDiffOp::zero(c[0].config, 3);
    for i in 1..k {
        o = o.add(&gerst_product(&c[i - 1], &c[k - i - 1]));
    }
    o
}

/// Solves `b(C_k) = Σ_{i+j=k} C_i ∘_G C_j` order by order, starting from
/// `C₁ = ψ^{[1]}(P)`, and normalizes each `C_k` by subtracting `b(u·id) = u·μ`
/// with `u = C_k(1,1)`.
pub fn mc_build(p: &MultiVec, n: usize, require_adapted: bool) -> Result<BuildOutcome, FormalityError> {
    check_poisson(p, require_adapted)?;
    let config = p.config;
    let mut c = vec![psi1(p, 2)];
    for k in 2..=n {
        let o = mc_defect(&c, k);
        if !hochschild_b(&o).is_zero() {
            return Err(FormalityError::Postcondition(format!("defect at order {k} is not a cocycle")));
        }
        let dec = decompose(&o).map_err(|source| FormalityError::Decompose {
            rank: k,
            source,
            cocycle: o.to_json().to_string(),
        })?;
        if !dec.harmonic.is_zero() {
            return Ok(BuildOutcome::Obstruction(ObstructionReport { order: k, class: dec.harmonic }));
        }
        let mut ck = dec.primitive;
        let u = ck.apply(&[Poly::one(), Poly::one()]);
        if !u.is_zero() {
            ck = ck.sub(&PolyDiffOp::mu(config).mul_poly(&u));
        }
        c.push(ck);
    }
    let s = StarProduct { config, c };
    let report = verify_star(&s, p);
    let ok = if is_adapted_mv(p) { report.passes() } else { report.passes_except_adapted() };
    if !ok {
        return Err(FormalityError::Postcondition(report.failures.join("; ")));
    }
    if mc_identity_defect(&s).is_some() {
        return Err(FormalityError::Postcondition("Maurer-Cartan identity".into()));
    }
    Ok(BuildOutcome::Product(s))
}

/// First order at which `b(C_k) − ½Σ_{i+j=k}[C_i,C_j]_G ≠ 0`.
pub fn mc_identity_defect(s: &StarProduct) -> Option<usize> {
    let half = rat(1, 2);
    (1..=s.order()).find(|&k| {
        let mut lhs = hochschild_b(&s.c[k - 1]);
        for i in 1..k {
            lhs = lhs.sub(&gerst_bracket(&s.c[i - 1], &s.c[k - i - 1]).scale(&half));
        }
        !lhs.is_zero()
    })
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StarReport {
    pub bidifferential: bool,
    pub poisson_term: bool,
    pub associative: bool,
    pub unital: bool,
    pub adapted: Vec<bool>,
    pub failures: Vec<String>,
}

impl StarReport {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn passes_except_adapted(&self) -> bool {
        self.bidifferential && self.poisson_term && self.associative && self.unital
    }

    pub fn to_json(&self) -> Value {
        json!({
            "bidifferential": self.bidifferential,
            "poisson_term": self.poisson_term,
            "associative": self.associative,
            "unital": self.unital,
            "adapted": self.adapted,
            "failures": self.failures,
            "ok": self.passes(),
        })
    }
}

/// `C₁(f,g) − C₁(g,f) = P(df,dg)` as operators: `P = Σ f_{ij} ∂_i∧∂_j`
/// gives `f_{ij}(∂_i⊗∂_j − ∂_j⊗∂_i)`.
fn poisson_op(p: &MultiVec) -> PolyDiffOp {
    let c = p.config;
    let mut out = PolyDiffOp::zero(c, 2);
    for (s, f) in &p.terms {
        if s.len() != 2 {
            continue;
        }
        out = out.add(&PolyDiffOp::from_coords(c, &[vec![s[0]], vec![s[1]]], f.clone()));
        out = out.sub(&PolyDiffOp::from_coords(c, &[vec![s[1]], vec![s[0]]], f.clone()));
    }
    out
}

/// Axioms (i)–(iv) and adaptedness, mod `h^{N+1}`.
pub fn verify_star(s: &StarProduct, p: &MultiVec) -> StarReport {
    let mut r = StarReport::default();
    r.bidifferential = s.c.iter().all(|c| c.arity == 2 && c.config == s.config);
    if !r.bidifferential {
        r.failures.push("(i) some C_r is not bidifferential on the configured space".into());
        return r;
    }
    r.poisson_term = match s.c.first() {
        Some(c1) => c1.sub(&c1.opposite()) == poisson_op(p),
        None => true,
    };
    if !r.poisson_term {
        r.failures.push("(ii) C_1(f,g) - C_1(g,f) differs from P(df,dg)".into());
    }
    r.associative = true;
    for k in 1..=s.order() {
        let mut d = PolyDiffOp::zero(s.config, 3);
        for i in 0..=k {
            let (a, b) = (s.coeff(i), s.coeff(k - i));
            d = d.add(&circ_i(&a, &b, 1).unwrap()).sub(&circ_i(&a, &b, 2).unwrap());
        }
        if !d.is_zero() {
            r.associative = false;
            r.failures.push(format!("(iii) associativity fails at order {k}"));
            break;
        }
    }
    r.unital = s.c.iter().all(|c| c.terms.keys().all(|k| k.iter().all(|m| m.iter().any(|&e| e > 0))));
    if !r.unital {
        r.failures.push("(iv) some C_r does not vanish on constants".into());
    }
    r.adapted = s.c.iter().map(is_adapted_op).collect();
    for (i, ok) in r.adapted.iter().enumerate() {
        if !ok {
            r.failures.push(format!("C_{} is not adapted", i + 1));
        }
    }
    r
}

/// `P(df, dg)` for polynomial arguments; handy for spot checks.
pub fn poisson_pairing(p: &MultiVec, f: &Poly, g: &Poly) -> Poly {
    poisson_op(p).apply(&[f.clone(), g.clone()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::Gen;
    use crate::ratpoly::Var;
    use rand::Rng;

    fn c21() -> SpaceConfig {
        SpaceConfig::new(2, 1)
    }

    fn x(i: usize) -> Poly {
        Poly::var(Var::base(i))
    }

    #[test]
    fn rank_two_is_schouten() {
        let c = c21();
        let t = perturb(c, 2).unwrap();
        let mut g = Gen::new(3);
        for _ in 0..12 {
            let (kx, ky) = (g.rng.gen_range(0..=2), g.rng.gen_range(0..=2));
            let a = g.adapted_multivec(c, kx, 2);
            let b = g.adapted_multivec(c, ky, 2);
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let b2 = t.bracket2(&a, &b).unwrap();
            assert_eq!(b2, schouten(&b, &a).scale(&rat(-1, 1)));
            if kx % 2 == 1 || ky % 2 == 1 {
                assert_eq!(b2, schouten(&a, &b));
            }
            assert!(t.morphism_defect(&[a, b]).unwrap().is_zero());
        }
    }

    fn word(g: &mut Gen, c: SpaceConfig, ranks: &[usize]) -> Vec<MultiVec> {
        ranks
            .iter()
            .map(|&k| loop {
                let x = g.adapted_multivec(c, k, 1);
                if !x.is_zero() {
                    break x;
                }
            })
            .collect()
    }

    #[test]
    fn rank_three_relations() {
        let c = c21();
        let t = perturb(c, 3).unwrap();
        let mut g = Gen::new(11);
        for ranks in [[1, 1, 1], [1, 2, 1], [2, 2, 1], [2, 2, 2], [0, 1, 2]] {
            let xs = word(&mut g, c, &ranks);
            assert!(t.linf_defect(&xs).unwrap().is_zero());
            assert!(t.morphism_defect(&xs).unwrap().is_zero());
        }
        for ranks in [[1, 1, 2, 1], [2, 1, 2, 2]] {
            let xs = word(&mut g, c, &ranks);
            assert!(t.linf_defect(&xs).unwrap().is_zero());
        }
    }

    #[test]
    fn standard_ordered_and_moyal() {
        let c = c21();
        let p = MultiVec::term(c, vec![2, 1], Poly::one());
        let s = StarProduct::standard_ordered(c, 4);
        let r = verify_star(&s, &p);
        assert!(r.passes(), "{:?}", r.failures);
        assert_eq!(mc_identity_defect(&s), None);
        let w = verify_star(&StarProduct::moyal(c, 3), &p);
        assert!(w.passes_except_adapted() && !w.passes());
        let c1 = &StarProduct::moyal(c, 1).c[0];
        assert_eq!(c1.apply(&[x(1), x(2)]), Poly::constant(rat(-1, 2)));
    }

    #[test]
    fn builds_to_order_three() {
        let c = c21();
        let p = MultiVec::term(c, vec![2, 1], Poly::one());
        let BuildOutcome::Product(s) = mc_build(&p, 3, true).unwrap() else { panic!("obstruction") };
        assert!(verify_star(&s, &p).passes());
        assert_eq!(s.c[0].sub(&s.c[0].opposite()), poisson_op(&p));
    }

    #[test]
    fn builds_on_a_point() {
        let c = SpaceConfig::new(2, 2);
        let p = MultiVec::term(c, vec![1, 2], x(1));
        let BuildOutcome::Product(s) = mc_build(&p, 2, true).unwrap() else { panic!("obstruction") };
        assert!(s.c.iter().all(is_adapted_op));
    }

    #[test]
    fn zero_and_bad_inputs() {
        let c = c21();
        let BuildOutcome::Product(s) = mc_build(&MultiVec::zero(c), 3, true).unwrap() else { panic!() };
        assert!(s.c.iter().all(PolyDiffOp::is_zero));
        let c3 = SpaceConfig::new(3, 1);
        let bad = MultiVec::term(c3, vec![2, 3], x(2)).add(&MultiVec::term(c3, vec![1, 2], Poly::one()));
        assert!(matches!(mc_build(&bad, 2, false), Err(FormalityError::NotPoisson(_))));
        let c32 = SpaceConfig::new(3, 2);
        let off = MultiVec::term(c32, vec![2, 3], Poly::one());
        assert!(matches!(mc_build(&off, 1, true), Err(FormalityError::NotAdapted)));
    }

    #[test]
    fn json_round_trip() {
        let c = c21();
        let s = StarProduct::standard_ordered(c, 2);
        assert_eq!(StarProduct::from_json(&s.to_json(), None).unwrap(), s);
    }
}
