//! Polynomial multivector fields and differential forms on `R^n`, with the
//! coisotropic model `C = {x'' = 0}` where the last `l` coordinates are
//! transversal.

use crate::ratpoly::{sign, Poly, Rat, Var};
use num::One;
use serde_json::{json, Value};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpaceConfig {
    pub n: usize,
    pub l: usize,
}

impl SpaceConfig {
    pub fn new(n: usize, l: usize) -> SpaceConfig {
        assert!(l <= n, "codimension exceeds dimension");
        SpaceConfig { n, l }
    }

    /// Coordinates are 1-based; the last `l` are transversal.
    pub fn is_transversal(&self, i: usize) -> bool {
        i > self.n - self.l
    }

    pub fn tangential(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.n - self.l
    }

    pub fn transversal(&self) -> std::ops::RangeInclusive<usize> {
        self.n - self.l + 1..=self.n
    }

    pub fn is_transversal_var(&self, v: Var) -> bool {
        v.slot == crate::ratpoly::Slot::Base && self.is_transversal(v.coord as usize)
    }

    /// Restriction to `C`: sets `x''` to zero.
    pub fn restrict(&self, p: &Poly) -> Poly {
        p.restrict_zero(|v| self.is_transversal_var(v))
    }

    /// Membership in the vanishing ideal `I = ⟨x''⟩`.
    pub fn in_ideal(&self, p: &Poly) -> bool {
        self.restrict(p).is_zero()
    }

    /// Name resolver accepting `x{i}`, plus `y{μ}` for the μ-th transversal
    /// coordinate and the single letters `x`, `y`, `z`.
    pub fn resolve(&self, name: &str) -> Option<Var> {
        match name {
            "x" => return Some(Var::base(1)),
            "y" => return Some(Var::base(2)),
            "z" => return Some(Var::base(3)),
            _ => {}
        }
        if let Some(rest) = name.strip_prefix('y') {
            let mu: usize = rest.parse().ok()?;
            if mu >= 1 && mu <= self.l {
                return Some(Var::base(self.n - self.l + mu));
            }
            return None;
        }
        Var::from_name(name)
    }

    pub fn parse_poly(&self, s: &str) -> Result<Poly, String> {
        Poly::parse_with(s, |n| self.resolve(n))
    }
}

/// Merges sorted index set `s` in front of sorted `t`: `e_s ∧ e_t = sign · e_u`.
pub fn wedge_sets(s: &[usize], t: &[usize]) -> Option<(Rat, Vec<usize>)> {
    let mut inversions = 0i64;
    for a in s {
        for b in t {
            if a == b {
                return None;
            }
            if a > b {
                inversions += 1;
            }
        }
    }
    let mut u: Vec<usize> = s.iter().chain(t.iter()).copied().collect();
    u.sort_unstable();
    Some((sign(inversions), u))
}

/// Sorts an arbitrary index list, returning the permutation sign.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Rat, Vec<usize>)> {
    let mut v = idx.to_vec();
    let mut inv = 0i64;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] == v[j] {
                return None;
            }
            if v[i] > v[j] {
                inv += 1;
            }
        }
    }
    v.sort_unstable();
    Some((sign(inv), v))
}

pub type ExtTerms = BTreeMap<Vec<usize>, Poly>;

fn ext_add(terms: &mut ExtTerms, s: Vec<usize>, p: &Poly) {
    if p.is_zero() {
        return;
    }
    let e = terms.entry(s).or_default();
    *e = e.add(p);
    terms.retain(|_, v| !v.is_zero());
}

pub(crate) fn ext_add_owned(terms: &mut ExtTerms, s: Vec<usize>, p: Poly) {
    if p.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match terms.entry(s) {
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

fn terms_to_json(terms: &ExtTerms) -> Value {
    Value::Array(
        terms
            .iter()
            .map(|(s, p)| json!({"indices": s, "coeff": p.to_json()}))
            .collect(),
    )
}

/// Coefficient as polynomial JSON or a string such as `"x*y - 1/2"`.
pub fn coeff_from_json(c: &SpaceConfig, v: &Value) -> Result<Poly, String> {
    match v.as_str() {
        Some(s) => c.parse_poly(s),
        None => Poly::from_json(v),
    }
}

fn terms_from_json(v: &Value, c: &SpaceConfig) -> Result<ExtTerms, String> {
    let n = c.n;
    let arr = v.get("terms").and_then(|t| t.as_array()).ok_or("missing \"terms\" array")?;
    let mut terms = ExtTerms::new();
    for t in arr {
        let idx: Vec<usize> = t
            .get("indices")
            .and_then(|i| i.as_array())
            .ok_or("term: missing \"indices\"")?
            .iter()
            .map(|x| x.as_u64().map(|u| u as usize).ok_or("index must be a positive integer"))
            .collect::<Result<_, _>>()?;
        if idx.iter().any(|&i| i == 0 || i > n) {
            return Err(format!("index out of range 1..={n}"));
        }
        let coeff = coeff_from_json(c, t.get("coeff").ok_or("term: missing \"coeff\"")?)?;
        match sort_with_sign(&idx) {
            Some((s, u)) => ext_add_owned(&mut terms, u, coeff.scale(&s)),
            None => {}
        }
    }
    Ok(terms)
}

fn config_from_json(v: &Value) -> Result<SpaceConfig, String> {
    let n = v.get("n").and_then(|x| x.as_u64()).ok_or("missing \"n\"")? as usize;
    let l = v.get("l").and_then(|x| x.as_u64()).unwrap_or(0) as usize;
    if l > n {
        return Err("l exceeds n".into());
    }
    Ok(SpaceConfig::new(n, l))
}

/// Element of `g = Poly ⊗ ΛE`, stored as `S ↦ f_S` for `Σ f_S ∂_S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiVec {
    pub config: SpaceConfig,
    pub terms: ExtTerms,
}

impl MultiVec {
    pub fn zero(config: SpaceConfig) -> MultiVec {
        MultiVec { config, terms: ExtTerms::new() }
    }

    pub fn function(config: SpaceConfig, f: Poly) -> MultiVec {
        MultiVec::term(config, vec![], f)
    }

    /// `f ∂_{i1} ∧ … ∧ ∂_{ik}` for an arbitrary index list.
    pub fn term(config: SpaceConfig, idx: Vec<usize>, f: Poly) -> MultiVec {
        let mut m = MultiVec::zero(config);
        if let Some((s, u)) = sort_with_sign(&idx) {
            ext_add_owned(&mut m.terms, u, f.scale(&s));
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Rank if homogeneous (zero reports `None`).
    pub fn rank(&self) -> Option<usize> {
        let mut ks = self.terms.keys().map(|s| s.len());
        let k = ks.next()?;
        ks.all(|j| j == k).then_some(k)
    }

    pub fn component(&self, k: usize) -> MultiVec {
        MultiVec {
            config: self.config,
            terms: self.terms.iter().filter(|(s, _)| s.len() == k).map(|(s, p)| (s.clone(), p.clone())).collect(),
        }
    }

    pub fn add(&self, o: &MultiVec) -> MultiVec {
        let mut terms = self.terms.clone();
        for (s, p) in &o.terms {
            ext_add(&mut terms, s.clone(), p);
        }
        MultiVec { config: self.config, terms }
    }

    pub fn sub(&self, o: &MultiVec) -> MultiVec {
        self.add(&o.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> MultiVec {
        MultiVec {
            config: self.config,
            terms: self.terms.iter().map(|(s, p)| (s.clone(), p.scale(c))).filter(|(_, p)| !p.is_zero()).collect(),
        }
    }

    pub fn mul_poly(&self, f: &Poly) -> MultiVec {
        let mut terms = ExtTerms::new();
        for (s, p) in &self.terms {
            ext_add_owned(&mut terms, s.clone(), p.mul(f));
        }
        MultiVec { config: self.config, terms }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({"n": self.config.n, "l": self.config.l, "terms": terms_to_json(&self.terms)});
        if let Some(k) = self.rank() {
            v["rank"] = json!(k);
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<MultiVec, String> {
        let config = config_from_json(v)?;
        let terms = terms_from_json(v, &config)?;
        let m = MultiVec { config, terms };
        if let Some(r) = v.get("rank").and_then(|r| r.as_u64()) {
            if m.terms.keys().any(|s| s.len() != r as usize) {
                return Err("declared rank does not match index sets".into());
            }
        }
        Ok(m)
    }
}

/// Differential form `Σ f_S dx_S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffForm {
    pub config: SpaceConfig,
    pub terms: ExtTerms,
}

impl DiffForm {
    pub fn zero(config: SpaceConfig) -> DiffForm {
        DiffForm { config, terms: ExtTerms::new() }
    }

    pub fn term(config: SpaceConfig, idx: Vec<usize>, f: Poly) -> DiffForm {
        let mut m = DiffForm::zero(config);
        if let Some((s, u)) = sort_with_sign(&idx) {
            ext_add_owned(&mut m.terms, u, f.scale(&s));
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &DiffForm) -> DiffForm {
        let mut terms = self.terms.clone();
        for (s, p) in &o.terms {
            ext_add(&mut terms, s.clone(), p);
        }
        DiffForm { config: self.config, terms }
    }

    pub fn scale(&self, c: &Rat) -> DiffForm {
        DiffForm {
            config: self.config,
            terms: self.terms.iter().map(|(s, p)| (s.clone(), p.scale(c))).filter(|(_, p)| !p.is_zero()).collect(),
        }
    }

    pub fn sub(&self, o: &DiffForm) -> DiffForm {
        self.add(&o.scale(&-Rat::one()))
    }

    pub fn wedge(&self, o: &DiffForm) -> DiffForm {
        DiffForm { config: self.config, terms: wedge_terms(&self.terms, &o.terms) }
    }

    /// Exact differential `dg` of a function.
    pub fn exact(config: SpaceConfig, g: &Poly) -> DiffForm {
        let mut f = DiffForm::zero(config);
        for i in 1..=config.n {
            ext_add_owned(&mut f.terms, vec![i], g.derive(Var::base(i)));
        }
        f
    }

    /// de Rham differential: `d(f dx_S) = Σ_j ∂_j f dx_j ∧ dx_S`.
    pub fn d(&self) -> DiffForm {
        let mut terms = ExtTerms::new();
        for (s, p) in &self.terms {
            for j in 1..=self.config.n {
                let dp = p.derive(Var::base(j));
                if dp.is_zero() {
                    continue;
                }
                if let Some((sg, u)) = wedge_sets(&[j], s) {
                    ext_add_owned(&mut terms, u, dp.scale(&sg));
                }
            }
        }
        DiffForm { config: self.config, terms }
    }
}

fn wedge_terms(a: &ExtTerms, b: &ExtTerms) -> ExtTerms {
    let mut terms = ExtTerms::new();
    for (s, p) in a {
        for (t, q) in b {
            if let Some((sg, u)) = wedge_sets(s, t) {
                ext_add_owned(&mut terms, u, p.mul(q).scale(&sg));
            }
        }
    }
    terms
}

pub fn wedge(x: &MultiVec, y: &MultiVec) -> MultiVec {
    MultiVec { config: x.config, terms: wedge_terms(&x.terms, &y.terms) }
}

/// Right derivative `ξ_S ←∂/∂ξ_i`: removes `i` at 1-based position `p` with sign `(-1)^{k-p}`.
fn right_derive(s: &[usize], i: usize) -> Option<(Rat, Vec<usize>)> {
    let p = s.iter().position(|&j| j == i)?;
    let k = s.len();
    let mut rest = s.to_vec();
    rest.remove(p);
    Some((sign((k - (p + 1)) as i64), rest))
}

/// Schouten bracket, via the odd-symbol formula
/// `[X,Y] = Σ_i (X ←∂_{ξ_i}) ∂_i Y − (−1)^{(k−1)(l−1)} (Y ←∂_{ξ_i}) ∂_i X`.
pub fn schouten(x: &MultiVec, y: &MultiVec) -> MultiVec {
    let n = x.config.n;
    let mut terms = ExtTerms::new();
    for (s, f) in &x.terms {
        for (t, g) in &y.terms {
            let (k, l) = (s.len() as i64, t.len() as i64);
            let swap = -sign((k - 1) * (l - 1));
            for i in 1..=n {
                if let Some((sg, rest)) = right_derive(s, i) {
                    let dg = g.derive(Var::base(i));
                    if !dg.is_zero() {
                        if let Some((sg2, u)) = wedge_sets(&rest, t) {
                            ext_add_owned(&mut terms, u, f.mul(&dg).scale(&(sg * sg2)));
                        }
                    }
                }
                if let Some((sg, rest)) = right_derive(t, i) {
                    let df = f.derive(Var::base(i));
                    if !df.is_zero() {
                        if let Some((sg2, u)) = wedge_sets(&rest, s) {
                            ext_add_owned(&mut terms, u, g.mul(&df).scale(&(sg * sg2 * swap.clone())));
                        }
                    }
                }
            }
        }
    }
    MultiVec { config: x.config, terms }
}

/// Contraction `i(∂_v)` on a basis form: removes `v` at 1-based position `p`, sign `(-1)^{p-1}`.
fn contract_one(s: &[usize], v: usize) -> Option<(Rat, Vec<usize>)> {
    let p = s.iter().position(|&j| j == v)?;
    let mut rest = s.to_vec();
    rest.remove(p);
    Some((sign(p as i64), rest))
}

/// `i(x₁∧…∧x_k)α = i(x₁)…i(x_k)α`.
pub fn interior(x: &MultiVec, alpha: &DiffForm) -> DiffForm {
    let mut terms = ExtTerms::new();
    for (s, f) in &x.terms {
        for (t, g) in &alpha.terms {
            let mut cur = Some((Rat::one(), t.clone()));
            for &v in s.iter().rev() {
                cur = cur.and_then(|(c, u)| contract_one(&u, v).map(|(c2, u2)| (c * c2, u2)));
            }
            if let Some((c, u)) = cur {
                ext_add_owned(&mut terms, u, f.mul(g).scale(&c));
            }
        }
    }
    DiffForm { config: x.config, terms }
}

/// `L(X) = i(X)d − (−1)^k d i(X)`, extended over rank components.
pub fn lie_derivative(x: &MultiVec, alpha: &DiffForm) -> DiffForm {
    let mut out = DiffForm::zero(alpha.config);
    let ranks: std::collections::BTreeSet<usize> = x.terms.keys().map(|s| s.len()).collect();
    for k in ranks {
        let xk = x.component(k);
        let a = interior(&xk, &alpha.d());
        let b = interior(&xk, alpha).d().scale(&sign(k as i64));
        out = out.add(&a.sub(&b));
    }
    out
}

/// Adaptedness: every all-transversal index set carries a coefficient in `I`.
pub fn is_adapted_mv(x: &MultiVec) -> bool {
    let c = x.config;
    x.terms
        .iter()
        .all(|(s, p)| !s.iter().all(|&i| c.is_transversal(i)) || c.in_ideal(p))
}

/// Element of `g~`: transversal index sets with `x''`-free coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GTildeVec {
    pub config: SpaceConfig,
    pub terms: ExtTerms,
}

impl GTildeVec {
    pub fn zero(config: SpaceConfig) -> GTildeVec {
        GTildeVec { config, terms: ExtTerms::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn wedge(&self, o: &GTildeVec) -> GTildeVec {
        GTildeVec { config: self.config, terms: wedge_terms(&self.terms, &o.terms) }
    }

    pub fn is_valid(&self) -> bool {
        let c = self.config;
        self.terms.iter().all(|(s, p)| {
            s.iter().all(|&i| c.is_transversal(i)) && !p.uses(|v| c.is_transversal_var(v))
        })
    }
}

/// `Ψ`: keep all-transversal index sets, restricted to `C`. Kernel is `g_I`.
pub fn psi_project(x: &MultiVec) -> GTildeVec {
    let c = x.config;
    let mut terms = ExtTerms::new();
    for (s, p) in &x.terms {
        if s.iter().all(|&i| c.is_transversal(i)) {
            ext_add_owned(&mut terms, s.clone(), c.restrict(p));
        }
    }
    GTildeVec { config: c, terms }
}

pub fn embed_gtilde(xi: &GTildeVec) -> MultiVec {
    MultiVec { config: xi.config, terms: xi.terms.clone() }
}

/// Generators `x''_μ · m` of `I` with `deg m ≤ cap`.
pub fn ideal_generators(config: SpaceConfig, cap: u32) -> Vec<Poly> {
    let mut monos = vec![Poly::one()];
    let mut frontier = vec![Poly::one()];
    for _ in 0..cap {
        let mut next = Vec::new();
        for m in &frontier {
            for i in 1..=config.n {
                let q = m.mul(&Poly::var(Var::base(i)));
                if !monos.contains(&q) && !next.contains(&q) {
                    next.push(q);
                }
            }
        }
        monos.extend(next.iter().cloned());
        frontier = next;
    }
    let mut gens = Vec::new();
    for mu in config.transversal() {
        for m in &monos {
            gens.push(m.mul(&Poly::var(Var::base(mu))));
        }
    }
    gens
}

/// Adaptedness decided by `i(X)(dg₁∧…∧dg_k) ∈ I` over ideal generators.
pub fn is_adapted_by_generators(x: &MultiVec, cap: u32) -> bool {
    let c = x.config;
    let gens = ideal_generators(c, cap);
    let ranks: std::collections::BTreeSet<usize> = x.terms.keys().map(|s| s.len()).collect();
    for k in ranks {
        let xk = x.component(k);
        if k == 0 {
            if !c.in_ideal(&xk.terms[&vec![]]) {
                return false;
            }
            continue;
        }
        let mut idx = vec![0usize; k];
        loop {
            let mut form = DiffForm::term(c, vec![], Poly::one());
            for &g in &idx {
                form = form.wedge(&DiffForm::exact(c, &gens[g]));
            }
            let r = interior(&xk, &form);
            if let Some(p) = r.terms.get(&vec![]) {
                if !c.in_ideal(p) {
                    return false;
                }
            }
            let mut pos = 0;
            loop {
                if pos == k {
                    break;
                }
                idx[pos] += 1;
                if idx[pos] < gens.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == k {
                break;
            }
        }
    }
    true
}
