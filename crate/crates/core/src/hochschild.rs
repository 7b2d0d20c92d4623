//! Multidifferential operators on polynomial functions: Gerstenhaber
//! compositions, Hochschild differential, cup product, adaptedness, and the
//! quotient complex `G~ = G / G_I` in normal form.

use crate::geometry::SpaceConfig;
use crate::linalg::SVec;
use crate::ratpoly::{binomial, factorial, sign, Mono, Poly, Rat, Var};
use num::{One, Zero};
use serde_json::{json, Value};
use std::collections::BTreeMap;

/// Exponent vector of a partial derivative `∂^I`, length `n`.
pub type MIdx = Vec<u32>;

pub type OpTerms = BTreeMap<Vec<MIdx>, Poly>;

/// `φ(f₁,…,f_k) = Σ c_{I₁…I_k} ∂^{I₁}f₁ ⋯ ∂^{I_k}f_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyDiffOp {
    pub config: SpaceConfig,
    pub arity: usize,
    pub terms: OpTerms,
}

pub fn unit_midx(n: usize, i: usize) -> MIdx {
    let mut m = vec![0; n];
    m[i - 1] = 1;
    m
}

fn midx_order(m: &MIdx) -> u32 {
    m.iter().sum()
}

fn midx_fact(m: &MIdx) -> Rat {
    m.iter().fold(Rat::one(), |a, &e| a * factorial(e))
}

fn add_into(terms: &mut OpTerms, key: Vec<MIdx>, p: Poly) {
    if p.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match terms.entry(key) {
        Entry::Vacant(e) => {
            e.insert(p);
        }
        Entry::Occupied(mut e) => {
            let v = e.get().add(&p);
            if v.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = v;
            }
        }
    }
}

/// All ways to write `m = K₀ + … + K_{parts−1}`, with multinomial weights.
pub fn splits(m: &MIdx, parts: usize) -> Vec<(Vec<MIdx>, Rat)> {
    let n = m.len();
    let mut out: Vec<(Vec<MIdx>, Rat)> = vec![(vec![vec![0; n]; parts], Rat::one())];
    for c in 0..n {
        let total = m[c];
        let comps = compositions(total, parts);
        let mut next = Vec::with_capacity(out.len() * comps.len());
        for (ks, w) in &out {
            for comp in &comps {
                let mut ks2 = ks.clone();
                let mut denom = Rat::one();
                for (j, &e) in comp.iter().enumerate() {
                    ks2[j][c] = e;
                    denom *= factorial(e);
                }
                next.push((ks2, w * factorial(total) / denom));
            }
        }
        out = next;
    }
    out
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `∂^I p`.
pub fn apply_midx(p: &Poly, m: &MIdx) -> Poly {
    let mut q = p.clone();
    for (i, &e) in m.iter().enumerate() {
        if e > 0 {
            q = q.derive_n(Var::base(i + 1), e);
        }
    }
    q
}

impl PolyDiffOp {
    pub fn zero(config: SpaceConfig, arity: usize) -> PolyDiffOp {
        PolyDiffOp { config, arity, terms: OpTerms::new() }
    }

    /// Arity-0 cochain: a function.
    pub fn function(config: SpaceConfig, f: Poly) -> PolyDiffOp {
        let mut p = PolyDiffOp::zero(config, 0);
        add_into(&mut p.terms, vec![], f);
        p
    }

    /// Pointwise multiplication `μ(f,g) = fg`.
    pub fn mu(config: SpaceConfig) -> PolyDiffOp {
        let z = vec![0; config.n];
        let mut p = PolyDiffOp::zero(config, 2);
        add_into(&mut p.terms, vec![z.clone(), z], Poly::one());
        p
    }

    /// `f ∂_{i}` as a 1-cochain (1-based coordinate).
    pub fn vector_field(config: SpaceConfig, i: usize, f: Poly) -> PolyDiffOp {
        let mut p = PolyDiffOp::zero(config, 1);
        add_into(&mut p.terms, vec![unit_midx(config.n, i)], f);
        p
    }

    /// Single term from coordinate lists with repetition, e.g. `[[1],[2,2]]`.
    pub fn from_coords(config: SpaceConfig, coords: &[Vec<usize>], f: Poly) -> PolyDiffOp {
        let idx: Vec<MIdx> = coords
            .iter()
            .map(|cs| {
                let mut m = vec![0; config.n];
                for &c in cs {
                    m[c - 1] += 1;
                }
                m
            })
            .collect();
        let mut p = PolyDiffOp::zero(config, coords.len());
        add_into(&mut p.terms, idx, f);
        p
    }

    pub fn add_term(&mut self, idx: Vec<MIdx>, f: Poly) {
        assert_eq!(idx.len(), self.arity);
        add_into(&mut self.terms, idx, f);
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &PolyDiffOp) -> PolyDiffOp {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        assert_eq!(self.arity, o.arity, "arity mismatch");
        let mut out = self.clone();
        for (k, p) in &o.terms {
            add_into(&mut out.terms, k.clone(), p.clone());
        }
        out
    }

    pub fn sub(&self, o: &PolyDiffOp) -> PolyDiffOp {
        self.add(&o.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> PolyDiffOp {
        let mut out = PolyDiffOp::zero(self.config, self.arity);
        if c.is_zero() {
            return out;
        }
        for (k, p) in &self.terms {
            out.terms.insert(k.clone(), p.scale(c));
        }
        out
    }

    pub fn mul_poly(&self, f: &Poly) -> PolyDiffOp {
        let mut out = PolyDiffOp::zero(self.config, self.arity);
        for (k, p) in &self.terms {
            add_into(&mut out.terms, k.clone(), p.mul(f));
        }
        out
    }

    /// Maximal total operator order.
    pub fn order(&self) -> u32 {
        self.terms.keys().map(|k| k.iter().map(midx_order).sum()).max().unwrap_or(0)
    }

    pub fn coeff_degree(&self) -> u32 {
        self.terms.values().map(|p| p.total_degree()).max().unwrap_or(0)
    }

    /// Evaluates on polynomial arguments.
    pub fn apply(&self, fs: &[Poly]) -> Poly {
        assert_eq!(fs.len(), self.arity);
        let mut out = Poly::zero();
        for (k, c) in &self.terms {
            let mut acc = c.clone();
            for (m, f) in k.iter().zip(fs) {
                acc = acc.mul(&apply_midx(f, m));
                if acc.is_zero() {
                    break;
                }
            }
            out = out.add(&acc);
        }
        out
    }

    /// Swaps the two slots of a bidifferential operator.
    pub fn opposite(&self) -> PolyDiffOp {
        assert_eq!(self.arity, 2);
        let mut out = PolyDiffOp::zero(self.config, 2);
        for (k, p) in &self.terms {
            add_into(&mut out.terms, vec![k[1].clone(), k[0].clone()], p.clone());
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(k, p)| {
                let idx: Vec<Vec<usize>> = k
                    .iter()
                    .map(|m| m.iter().enumerate().flat_map(|(i, &e)| std::iter::repeat(i + 1).take(e as usize)).collect())
                    .collect();
                json!({"I": idx, "coeff": p.to_json()})
            })
            .collect();
        json!({"n": self.config.n, "l": self.config.l, "arity": self.arity, "terms": terms})
    }

    /// Parses the JSON form; `fallback` supplies `n`, `l` when absent.
    pub fn from_json(v: &Value, fallback: Option<SpaceConfig>) -> Result<PolyDiffOp, String> {
        let arity = v.get("arity").and_then(|a| a.as_u64()).ok_or("missing \"arity\"")? as usize;
        let config = match (v.get("n").and_then(|x| x.as_u64()), fallback) {
            (Some(n), _) => {
                let l = v.get("l").and_then(|x| x.as_u64()).unwrap_or(0) as usize;
                if l as u64 > n {
                    return Err("l exceeds n".into());
                }
                SpaceConfig::new(n as usize, l)
            }
            (None, Some(c)) => c,
            (None, None) => return Err("missing \"n\"".into()),
        };
        let mut out = PolyDiffOp::zero(config, arity);
        for t in v.get("terms").and_then(|t| t.as_array()).ok_or("missing \"terms\"")? {
            let idx = t.get("I").and_then(|i| i.as_array()).ok_or("term: missing \"I\"")?;
            if idx.len() != arity {
                return Err("multi-index count differs from arity".into());
            }
            let mut coords = Vec::new();
            for slot in idx {
                let cs: Vec<usize> = slot
                    .as_array()
                    .ok_or("multi-index must be a list")?
                    .iter()
                    .map(|c| c.as_u64().map(|u| u as usize).filter(|&u| u >= 1 && u <= config.n).ok_or("coordinate out of range"))
                    .collect::<Result<_, _>>()?;
                coords.push(cs);
            }
            let f = crate::geometry::coeff_from_json(&config, t.get("coeff").ok_or("term: missing \"coeff\"")?)?;
            out = out.add(&PolyDiffOp::from_coords(config, &coords, f));
        }
        Ok(out)
    }
}

/// `φ ∘_i ψ`, `1 ≤ i ≤ arity(φ)`, by Leibniz expansion of `∂^{I_i}` over `ψ`.
pub fn circ_i(phi: &PolyDiffOp, psi: &PolyDiffOp, i: usize) -> Result<PolyDiffOp, String> {
    let (k, l) = (phi.arity, psi.arity);
    if i == 0 || i > k {
        return Err(format!("composition slot {i} out of range 1..={k}"));
    }
    let mut out = PolyDiffOp::zero(phi.config, k + l - 1);
    let mut split_cache: BTreeMap<MIdx, Vec<(Vec<MIdx>, Rat)>> = BTreeMap::new();
    for (ki, c) in &phi.terms {
        let ii = &ki[i - 1];
        let sp = split_cache.entry(ii.clone()).or_insert_with(|| splits(ii, l + 1));
        for (kj, d) in &psi.terms {
            for (parts, w) in sp.iter() {
                let dd = apply_midx(d, &parts[0]);
                if dd.is_zero() {
                    continue;
                }
                let mut key: Vec<MIdx> = Vec::with_capacity(k + l - 1);
                key.extend_from_slice(&ki[..i - 1]);
                for j in 0..l {
                    key.push(kj[j].iter().zip(&parts[j + 1]).map(|(a, b)| a + b).collect());
                }
                key.extend_from_slice(&ki[i..]);
                add_into(&mut out.terms, key, c.mul(&dd).scale(w));
            }
        }
    }
    Ok(out)
}

/// `φ ∘_G ψ = Σ_i (−1)^{(i−1)(l−1)} φ ∘_i ψ`.
pub fn gerst_product(phi: &PolyDiffOp, psi: &PolyDiffOp) -> PolyDiffOp {
    let l = psi.arity as i64;
    let mut out = PolyDiffOp::zero(phi.config, (phi.arity + psi.arity).saturating_sub(1));
    for i in 1..=phi.arity {
        let t = circ_i(phi, psi, i).expect("slot in range");
        out = out.add(&t.scale(&sign((i as i64 - 1) * (l - 1))));
    }
    out
}

pub fn gerst_bracket(phi: &PolyDiffOp, psi: &PolyDiffOp) -> PolyDiffOp {
    let (k, l) = (phi.arity as i64, psi.arity as i64);
    let a = gerst_product(phi, psi);
    let b = gerst_product(psi, phi);
    if phi.arity + psi.arity == 0 {
        return PolyDiffOp::zero(phi.config, 0);
    }
    a.sub(&b.scale(&sign((k - 1) * (l - 1))))
}

/// `bφ = −[φ, μ]_G`; equals `f₁φ(…) − φ(f₁f₂,…) + … ± φ(…)f_{k+1}`.
pub fn hochschild_b(phi: &PolyDiffOp) -> PolyDiffOp {
    if phi.arity == 0 {
        return PolyDiffOp::zero(phi.config, 1);
    }
    gerst_bracket(phi, &PolyDiffOp::mu(phi.config)).scale(&-Rat::one())
}

pub fn cup(phi: &PolyDiffOp, psi: &PolyDiffOp) -> PolyDiffOp {
    let mut out = PolyDiffOp::zero(phi.config, phi.arity + psi.arity);
    for (a, c) in &phi.terms {
        for (b, d) in &psi.terms {
            let mut key = a.clone();
            key.extend(b.iter().cloned());
            add_into(&mut out.terms, key, c.mul(d));
        }
    }
    out
}

pub(crate) fn has_transversal(c: &SpaceConfig, m: &MIdx) -> bool {
    c.transversal().any(|i| m[i - 1] > 0)
}

/// Adaptedness: terms whose last slot differentiates transversally have
/// coefficients in `I`; arity 0 means membership in `I`.
pub fn is_adapted_op(phi: &PolyDiffOp) -> bool {
    let c = phi.config;
    if phi.arity == 0 {
        return phi.terms.values().all(|p| c.in_ideal(p));
    }
    phi.terms
        .iter()
        .all(|(k, p)| !has_transversal(&c, k.last().unwrap()) || c.in_ideal(p))
}

/// Adaptedness decided on test functions: `φ(m₁,…,m_{k−1}, g) ∈ I` for
/// monomials `m_j` and ideal generators `g` up to degree `cap`.
pub fn is_adapted_by_generators(phi: &PolyDiffOp, cap: u32) -> bool {
    let c = phi.config;
    if phi.arity == 0 {
        return is_adapted_op(phi);
    }
    let monos = monomials_upto(c.n, cap);
    let gens = crate::geometry::ideal_generators(c, cap);
    let k = phi.arity;
    let mut idx = vec![0usize; k - 1];
    loop {
        for g in &gens {
            let mut args: Vec<Poly> = idx.iter().map(|&j| monos[j].clone()).collect();
            args.push(g.clone());
            if !c.in_ideal(&phi.apply(&args)) {
                return false;
            }
        }
        let mut pos = 0;
        while pos < k - 1 {
            idx[pos] += 1;
            if idx[pos] < monos.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == k - 1 {
            return true;
        }
    }
}

/// Monomials in the base variables of degree ≤ `d`.
pub fn monomials_upto(n: usize, d: u32) -> Vec<Poly> {
    base_monomials(n, d).into_iter().map(|m| Poly::term(m, Rat::one())).collect()
}

pub fn base_monomials(n: usize, d: u32) -> Vec<Mono> {
    let mut out = Vec::new();
    for e in exponent_vectors(n, d) {
        out.push(Mono::from_pairs(e.iter().enumerate().map(|(i, &x)| (Var::base(i + 1), x)).collect()));
    }
    out
}

/// Exponent vectors of length `n` with total ≤ `d`, in a fixed order.
pub fn exponent_vectors(n: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for total in 0..=d {
        out.extend(compositions_exact(total, n));
    }
    out
}

pub(crate) fn compositions_exact(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    compositions(total, parts).into_iter().rev().collect()
}

/// Normal form of `Ξφ ∈ G~`: terms whose last slot differentiates
/// transversally, coefficients restricted to `C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GTildeOp {
    pub config: SpaceConfig,
    pub arity: usize,
    pub terms: OpTerms,
}

impl GTildeOp {
    pub fn zero(config: SpaceConfig, arity: usize) -> GTildeOp {
        GTildeOp { config, arity, terms: OpTerms::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient-wise section of `Ξ`.
    pub fn lift(&self) -> PolyDiffOp {
        PolyDiffOp { config: self.config, arity: self.arity, terms: self.terms.clone() }
    }

    pub fn add(&self, o: &GTildeOp) -> GTildeOp {
        xi_project(&self.lift().add(&o.lift()))
    }

    /// `η(f₁,…,f_{k−1})(g)` restricted to `C`, for `g ∈ I`.
    pub fn apply(&self, fs: &[Poly], g: &Poly) -> Poly {
        let mut args = fs.to_vec();
        args.push(g.clone());
        self.config.restrict(&self.lift().apply(&args))
    }
}

pub fn xi_project(phi: &PolyDiffOp) -> GTildeOp {
    let c = phi.config;
    let mut out = GTildeOp::zero(c, phi.arity);
    for (k, p) in &phi.terms {
        let keep = if phi.arity == 0 { true } else { has_transversal(&c, k.last().unwrap()) };
        if keep {
            add_into(&mut out.terms, k.clone(), c.restrict(p));
        }
    }
    out
}

/// Hochschild differential of `G~` on normal forms:
/// `(b~η)(f₁…f_k)(g) = f₁η(f₂…)(g) + Σ(−1)^r η(…f_r f_{r+1}…)(g) + (−1)^k η(…f_{k−1})(f_k g)`.
pub fn btilde(eta: &GTildeOp) -> GTildeOp {
    let c = eta.config;
    let k = eta.arity;
    let mut out = GTildeOp::zero(c, k + 1);
    if k == 0 {
        return out;
    }
    let zero = vec![0u32; c.n];
    for (key, p) in &eta.terms {
        let mut first = vec![zero.clone()];
        first.extend(key.iter().cloned());
        add_into(&mut out.terms, first, p.clone());
        for r in 1..k {
            for (parts, w) in splits(&key[r - 1], 2) {
                let mut nk: Vec<MIdx> = key[..r - 1].to_vec();
                nk.push(parts[0].clone());
                nk.push(parts[1].clone());
                nk.extend_from_slice(&key[r..]);
                add_into(&mut out.terms, nk, p.scale(&(w * sign(r as i64))));
            }
        }
        for (parts, w) in splits(&key[k - 1], 2) {
            if !has_transversal(&c, &parts[1]) {
                continue;
            }
            let mut nk: Vec<MIdx> = key[..k - 1].to_vec();
            nk.push(parts[0].clone());
            nk.push(parts[1].clone());
            add_into(&mut out.terms, nk, p.scale(&(w * sign(k as i64))));
        }
    }
    out
}

/// Multi-index dual pairing used by dualization formulas: `I!`.
pub fn midx_factorial(m: &MIdx) -> Rat {
    midx_fact(m)
}

pub fn binom_midx(j: &MIdx, k: &MIdx) -> Rat {
    j.iter().zip(k).fold(Rat::one(), |a, (&x, &y)| a * binomial(x, y))
}

/// Finite-dimensional graded associative algebra given by structure constants.
#[derive(Clone, Debug)]
pub struct GradedAlgebra {
    pub degrees: Vec<i64>,
    /// `mult[i][j]` = `e_i e_j` in the basis.
    pub mult: Vec<Vec<SVec>>,
}

#[derive(Debug, thiserror::Error)]
pub enum AlgebraError {
    #[error("structure constants are not associative at ({0},{1},{2})")]
    NonAssociative(usize, usize, usize),
    #[error("structure constants are not degree-preserving at ({0},{1})")]
    Inhomogeneous(usize, usize),
}

/// Graded cochain `G^{⊗k} → G`, homogeneous of degree `degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedCochain {
    pub arity: usize,
    pub degree: i64,
    pub table: BTreeMap<Vec<usize>, SVec>,
}

fn svec_add(dst: &mut SVec, c: &Rat, src: &SVec) {
    for (k, v) in src {
        let e = dst.entry(*k).or_insert_with(Rat::zero);
        *e += c * v;
        if e.is_zero() {
            dst.remove(k);
        }
    }
}

impl GradedAlgebra {
    pub fn new(degrees: Vec<i64>, mult: Vec<Vec<SVec>>) -> Result<GradedAlgebra, AlgebraError> {
        let a = GradedAlgebra { degrees, mult };
        let d = a.dim();
        for i in 0..d {
            for j in 0..d {
                if a.mult[i][j].keys().any(|&k| a.degrees[k] != a.degrees[i] + a.degrees[j]) {
                    return Err(AlgebraError::Inhomogeneous(i, j));
                }
                for k in 0..d {
                    let l = a.mul_vec(&a.mult[i][j], &a.basis(k));
                    let r = a.mul_vec(&a.basis(i), &a.mult[j][k]);
                    if l != r {
                        return Err(AlgebraError::NonAssociative(i, j, k));
                    }
                }
            }
        }
        Ok(a)
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn basis(&self, i: usize) -> SVec {
        [(i, Rat::one())].into_iter().collect()
    }

    pub fn mul_vec(&self, x: &SVec, y: &SVec) -> SVec {
        let mut out = SVec::new();
        for (i, a) in x {
            for (j, b) in y {
                svec_add(&mut out, &(a * b), &self.mult[*i][*j]);
            }
        }
        out
    }

    /// Exterior algebra on one odd generator: basis `1`, `θ`.
    pub fn exterior_one() -> GradedAlgebra {
        let e = |i: usize| -> SVec { [(i, Rat::one())].into_iter().collect() };
        GradedAlgebra::new(vec![0, 1], vec![vec![e(0), e(1)], vec![e(1), SVec::new()]]).unwrap()
    }

    /// Evaluates a cochain on basis-expanded arguments.
    pub fn eval(&self, phi: &GradedCochain, args: &[SVec]) -> SVec {
        let mut out = SVec::new();
        let mut stack: Vec<(Vec<usize>, Rat)> = vec![(vec![], Rat::one())];
        for a in args {
            let mut next = Vec::new();
            for (w, c) in &stack {
                for (i, x) in a {
                    let mut w2 = w.clone();
                    w2.push(*i);
                    next.push((w2, c * x));
                }
            }
            stack = next;
        }
        for (w, c) in stack {
            if let Some(v) = phi.table.get(&w) {
                svec_add(&mut out, &c, v);
            }
        }
        out
    }

    /// `(bφ)(f₁…f_{k+1}) = (−1)^{|f₁||φ|} f₁φ(f₂…) + Σ_r (−1)^r φ(…f_r f_{r+1}…) + (−1)^{k+1} φ(f₁…f_k)f_{k+1}`.
    pub fn graded_b(&self, phi: &GradedCochain) -> GradedCochain {
        let k = phi.arity;
        let d = self.dim();
        let mut table = BTreeMap::new();
        for w in all_words(d, k + 1) {
            let mut v = SVec::new();
            let e = |i: usize| self.basis(i);
            let tail: Vec<SVec> = w[1..].iter().map(|&i| e(i)).collect();
            let first = self.mul_vec(&e(w[0]), &self.eval(phi, &tail));
            svec_add(&mut v, &sign(self.degrees[w[0]] * phi.degree), &first);
            for r in 1..=k {
                let mut args: Vec<SVec> = w[..r - 1].iter().map(|&i| e(i)).collect();
                args.push(self.mult[w[r - 1]][w[r]].clone());
                args.extend(w[r + 1..].iter().map(|&i| e(i)));
                svec_add(&mut v, &sign(r as i64), &self.eval(phi, &args));
            }
            let head: Vec<SVec> = w[..k].iter().map(|&i| e(i)).collect();
            let last = self.mul_vec(&self.eval(phi, &head), &e(w[k]));
            svec_add(&mut v, &sign(k as i64 + 1), &last);
            if !v.is_empty() {
                table.insert(w, v);
            }
        }
        GradedCochain { arity: k + 1, degree: phi.degree, table }
    }
}

pub fn all_words(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for w in &out {
            for i in 0..d {
                let mut w2 = w.clone();
                w2.push(i);
                next.push(w2);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2() -> SpaceConfig {
        SpaceConfig::new(2, 1)
    }
    fn p(s: &str) -> Poly {
        c2().parse_poly(s).unwrap()
    }
    fn op(coords: &[Vec<usize>], s: &str) -> PolyDiffOp {
        PolyDiffOp::from_coords(c2(), coords, p(s))
    }

    #[test]
    fn compositions_examples() {
        let mu = PolyDiffOp::mu(c2());
        let mm = circ_i(&mu, &mu, 1).unwrap();
        assert_eq!(mm.apply(&[p("x"), p("y"), p("x+1")]), p("x^2*y + x*y"));
        assert_eq!(circ_i(&op(&[vec![1]], "1"), &op(&[vec![1]], "1"), 1).unwrap(), op(&[vec![1, 1]], "1"));
        let r = circ_i(&mu, &op(&[vec![2]], "y"), 2).unwrap();
        assert_eq!(r, op(&[vec![], vec![2]], "y"));
        assert!(circ_i(&mu, &mu, 3).is_err());
    }

    #[test]
    fn bracket_examples() {
        let mu = PolyDiffOp::mu(c2());
        assert!(gerst_bracket(&mu, &mu).is_zero());
        assert!(gerst_bracket(&op(&[vec![1]], "1"), &op(&[vec![2]], "1")).is_zero());
    }

    #[test]
    fn b_examples() {
        assert!(hochschild_b(&PolyDiffOp::mu(c2())).is_zero());
        assert!(hochschild_b(&op(&[vec![2]], "1")).is_zero());
        let d = op(&[vec![1, 2]], "x");
        let bd = hochschild_b(&d);
        let (f, g) = (p("x^2*y+y"), p("x*y^2"));
        let classical = f.mul(&d.apply(&[g.clone()])).sub(&d.apply(&[f.mul(&g)])).add(&d.apply(&[f.clone()]).mul(&g));
        assert_eq!(bd.apply(&[f, g]), classical);
    }

    #[test]
    fn cup_examples() {
        assert_eq!(cup(&op(&[vec![1]], "1"), &op(&[vec![2]], "1")), op(&[vec![1], vec![2]], "1"));
        let one = PolyDiffOp::function(c2(), Poly::one());
        let psi = op(&[vec![1], vec![2, 2]], "x*y");
        assert_eq!(cup(&one, &psi), psi);
    }

    #[test]
    fn adapted_examples() {
        assert!(!is_adapted_op(&op(&[vec![2]], "1")));
        assert!(is_adapted_op(&op(&[vec![2]], "y")));
        assert!(is_adapted_op(&op(&[vec![1]], "1")));
        assert!(!is_adapted_by_generators(&op(&[vec![2]], "1"), 1));
        assert!(is_adapted_by_generators(&op(&[vec![2]], "y"), 1));
    }

    #[test]
    fn xi_examples() {
        assert!(xi_project(&op(&[vec![2]], "y")).is_zero());
        let x = xi_project(&op(&[vec![2]], "1"));
        assert_eq!(x.apply(&[], &p("y")), Poly::one());
        assert!(btilde(&x).is_zero());
        assert!(btilde(&xi_project(&PolyDiffOp::mu(c2()))).is_zero());
    }

    #[test]
    fn graded_b_squares_to_zero() {
        let a = GradedAlgebra::exterior_one();
        // θ ↦ 1 derivative, degree −1: a graded derivation
        let mut t = BTreeMap::new();
        t.insert(vec![1], a.basis(0));
        let d = GradedCochain { arity: 1, degree: -1, table: t };
        assert!(a.graded_b(&d).table.is_empty());
        let mut t = BTreeMap::new();
        t.insert(vec![1, 1], a.basis(0));
        t.insert(vec![0, 1], a.basis(0));
        let phi = GradedCochain { arity: 2, degree: -1, table: t };
        assert!(a.graded_b(&a.graded_b(&phi)).table.is_empty());
    }
}
