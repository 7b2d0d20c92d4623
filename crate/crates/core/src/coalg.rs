//! Graded coalgebra machinery on finite graded spaces.
//!
//! Words are index lists into a [`GradedSpace`]. All signs come from the
//! Koszul rule `(f⊗g)(x⊗y) = (-1)^{|g||x|} f(x)⊗g(y)` and the graded
//! transposition, both funnelled through [`reorder_sign`].

use crate::gen::Gen;
use crate::geometry::{schouten, wedge, MultiVec};
use crate::linalg::{self, SVec};
use crate::ratpoly::{rint, sign, Mono, Rat};
use num::{One, Zero};
use rand::Rng;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoalgError {
    #[error("input word of length {len} exceeds cap {cap}")]
    CapExceeded { len: usize, cap: usize },
    #[error("cochain does not vanish on shuffle products")]
    NotHarrison,
    #[error("multiplication is not associative")]
    NotAssociative,
    #[error("bad graded space: {0}")]
    BadSpace(String),
    #[error("inhomogeneous result: {0}")]
    Degree(String),
}

pub type Word = Vec<usize>;
pub type Vect = BTreeMap<usize, Rat>;
pub type Tens = BTreeMap<Word, Rat>;

fn add_to<K: Ord>(m: &mut BTreeMap<K, Rat>, k: K, c: Rat) {
    if c.is_zero() {
        return;
    }
    match m.entry(k) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

fn odd(e: i64) -> bool {
    e.rem_euclid(2) == 1
}

/// Sign of rearranging items of the given degrees into `order`
/// (`order[p]` = original position of the item now at `p`).
pub fn reorder_sign(degs: &[i64], order: &[usize]) -> i64 {
    let mut s = 1;
    for p in 0..order.len() {
        for q in p + 1..order.len() {
            if order[p] > order[q] && odd(degs[order[p]] * degs[order[q]]) {
                s = -s;
            }
        }
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSpace {
    pub names: Vec<String>,
    pub degrees: Vec<i64>,
}

impl GradedSpace {
    pub fn new(basis: &[(&str, i64)]) -> Result<GradedSpace, CoalgError> {
        let names: Vec<String> = basis.iter().map(|(n, _)| n.to_string()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != names.len() {
            return Err(CoalgError::BadSpace("duplicate basis name".into()));
        }
        Ok(GradedSpace { names, degrees: basis.iter().map(|(_, d)| *d).collect() })
    }

    pub fn from_degrees(degs: &[i64]) -> GradedSpace {
        GradedSpace { names: (0..degs.len()).map(|i| format!("e{i}")).collect(), degrees: degs.to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn deg(&self, a: usize) -> i64 {
        self.degrees[a]
    }

    pub fn word_deg(&self, w: &[usize]) -> i64 {
        w.iter().map(|&a| self.degrees[a]).sum()
    }

    /// `h[j]`, with `h[j]^k = h^{k+j}`.
    pub fn shifted(&self, j: i64) -> GradedSpace {
        GradedSpace { names: self.names.clone(), degrees: self.degrees.iter().map(|d| d - j).collect() }
    }

    pub fn words(&self, len: usize) -> Vec<Word> {
        let mut out = vec![vec![]];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..self.dim()).map(move |a| {
                        let mut v = w.clone();
                        v.push(a);
                        v
                    })
                })
                .collect();
        }
        out
    }

    /// All nonempty words of length ≤ cap.
    pub fn words_upto(&self, cap: usize) -> Vec<Word> {
        (1..=cap).flat_map(|k| self.words(k)).collect()
    }

    pub fn to_json(&self) -> Value {
        let basis: Vec<Value> =
            self.names.iter().zip(&self.degrees).map(|(n, d)| json!({"name": n, "degree": d})).collect();
        json!({ "basis": basis })
    }

    pub fn from_json(v: &Value) -> Result<GradedSpace, CoalgError> {
        let bad = |m: &str| CoalgError::BadSpace(m.to_string());
        let arr = v.get("basis").and_then(Value::as_array).ok_or_else(|| bad("missing basis"))?;
        let mut basis = Vec::new();
        for e in arr {
            let n = e.get("name").and_then(Value::as_str).ok_or_else(|| bad("missing name"))?;
            let d = e.get("degree").and_then(Value::as_i64).ok_or_else(|| bad("missing degree"))?;
            basis.push((n, d));
        }
        GradedSpace::new(&basis)
    }
}

/// Graded signature `e(ξ,σ)`; the permuted word is `ξ^σ = x_σ(1)…x_σ(n)`.
pub fn signature(space: &GradedSpace, word: &[usize], sigma: &[usize]) -> Rat {
    let degs: Vec<i64> = word.iter().map(|&a| space.deg(a)).collect();
    rint(reorder_sign(&degs, sigma))
}

pub fn permute(word: &[usize], sigma: &[usize]) -> Word {
    sigma.iter().map(|&i| word[i]).collect()
}

fn shuffle_rec(space: &GradedSpace, u: &[usize], v: &[usize], pre: &mut Word, s: i64, out: &mut Tens) {
    if u.is_empty() || v.is_empty() {
        let mut w = pre.clone();
        w.extend_from_slice(u);
        w.extend_from_slice(v);
        add_to(out, w, rint(s));
        return;
    }
    pre.push(u[0]);
    shuffle_rec(space, &u[1..], v, pre, s, out);
    pre.pop();
    // v[0] jumps over all of u.
    let s2 = if odd(space.deg(v[0]) * space.word_deg(u)) { -s } else { s };
    pre.push(v[0]);
    shuffle_rec(space, u, &v[1..], pre, s2, out);
    pre.pop();
}

/// Signed shuffle product `u•v`.
pub fn shuffle(space: &GradedSpace, u: &[usize], v: &[usize]) -> Tens {
    let mut out = Tens::new();
    shuffle_rec(space, u, v, &mut vec![], 1, &mut out);
    out
}

pub fn shuffle_t(space: &GradedSpace, a: &Tens, b: &Tens) -> Tens {
    let mut out = Tens::new();
    for (u, cu) in a {
        for (v, cv) in b {
            for (w, c) in shuffle(space, u, v) {
                add_to(&mut out, w, c * cu * cv);
            }
        }
    }
    out
}

pub fn unit_t() -> Tens {
    Tens::from([(vec![], Rat::one())])
}

pub fn deconcat(w: &[usize]) -> Vec<(Word, Word)> {
    (0..=w.len()).map(|i| (w[..i].to_vec(), w[i..].to_vec())).collect()
}

pub fn deconcat_t(t: &Tens) -> BTreeMap<(Word, Word), Rat> {
    let mut out = BTreeMap::new();
    for (w, c) in t {
        for p in deconcat(w) {
            add_to(&mut out, p, c.clone());
        }
    }
    out
}

/// Splittings of `w` into `n` nonempty consecutive blocks.
fn compositions(w: &[usize], n: usize) -> Vec<Vec<Word>> {
    if n == 0 {
        return if w.is_empty() { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for i in 1..=w.len() {
        for mut rest in compositions(&w[i..], n - 1) {
            rest.insert(0, w[..i].to_vec());
            out.push(rest);
        }
    }
    out
}

/// First Eulerian idempotent `log⋆(id)`: a projection killing nontrivial
/// shuffle products, used to manufacture Harrison cochains.
pub fn eulerian(space: &GradedSpace, w: &[usize]) -> Tens {
    let mut out = Tens::new();
    for n in 1..=w.len() {
        let c = sign(n as i64 + 1) / rint(n as i64);
        for blocks in compositions(w, n) {
            let mut acc = unit_t();
            for b in &blocks {
                acc = shuffle_t(space, &acc, &Tens::from([(b.clone(), Rat::one())]));
            }
            for (v, x) in acc {
                add_to(&mut out, v, x * &c);
            }
        }
    }
    out
}

/// Finite table of a homogeneous multilinear map, keyed by input words
/// (`K = Word`) or symmetric words of columns (`K = GWord`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain<K: Ord> {
    pub degree: i64,
    pub table: BTreeMap<K, Vect>,
}

pub type CochainTable = Cochain<Word>;

impl<K: Ord + Clone> Cochain<K> {
    pub fn zero(degree: i64) -> Self {
        Cochain { degree, table: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }

    pub fn add_term(&mut self, k: K, a: usize, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.table.entry(k.clone()).or_default();
        add_to(e, a, c);
        if e.is_empty() {
            self.table.remove(&k);
        }
    }

    pub fn value(&self, k: &K) -> Option<&Vect> {
        self.table.get(k)
    }

    pub fn eval(&self, t: &BTreeMap<K, Rat>) -> Vect {
        let mut out = Vect::new();
        for (k, c) in t {
            if let Some(v) = self.table.get(k) {
                for (a, x) in v {
                    add_to(&mut out, *a, x * c);
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (k, v) in &o.table {
            for (a, x) in v {
                r.add_term(k.clone(), *a, x.clone());
            }
        }
        r
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mut r = Self::zero(self.degree);
        for (k, v) in &self.table {
            for (a, x) in v {
                r.add_term(k.clone(), *a, x * c);
            }
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-Rat::one()))
    }
}

impl CochainTable {
    pub fn max_len(&self) -> usize {
        self.table.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Every entry has output degree minus input degree equal to `degree`.
    pub fn is_homogeneous(&self, space: &GradedSpace) -> bool {
        self.table.iter().all(|(w, v)| v.keys().all(|&a| space.deg(a) - space.word_deg(w) == self.degree))
    }

    /// Projection `h^⊗ → h` onto length-one words.
    pub fn projection(space: &GradedSpace) -> CochainTable {
        let mut c = CochainTable::zero(0);
        for a in 0..space.dim() {
            c.add_term(vec![a], a, Rat::one());
        }
        c
    }

    /// Random homogeneous cochain on words of length `arities`.
    pub fn random(space: &GradedSpace, degree: i64, arities: &[usize], g: &mut Gen, density: f64) -> CochainTable {
        let mut c = CochainTable::zero(degree);
        for &k in arities {
            for w in space.words(k) {
                for a in 0..space.dim() {
                    if space.deg(a) - space.word_deg(&w) == degree && g.rng.gen_bool(density) {
                        let x = g.coeff();
                        c.add_term(w.clone(), a, x);
                    }
                }
            }
        }
        c
    }

    /// `c∘e₁` on all words up to `cap`: the Harrison part.
    pub fn harrison_part(&self, space: &GradedSpace, cap: usize) -> CochainTable {
        let mut out = CochainTable::zero(self.degree);
        for w in space.words_upto(cap) {
            for (a, x) in self.eval(&eulerian(space, &w)) {
                out.add_term(w.clone(), a, x);
            }
        }
        out
    }

    /// Vanishes on every `u•v` with `u, v` nonempty and `|u|+|v| ≤ cap`.
    pub fn is_harrison(&self, space: &GradedSpace, cap: usize) -> bool {
        for w in space.words_upto(cap) {
            for i in 1..w.len() {
                if !self.eval(&shuffle(space, &w[..i], &w[i..])).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

fn check_cap(cs: &[&CochainTable], cap: usize) -> Result<(), CoalgError> {
    for c in cs {
        let len = c.max_len();
        if len > cap {
            return Err(CoalgError::CapExceeded { len, cap });
        }
    }
    Ok(())
}

fn tens_times_vect(t: &Tens, v: &Vect) -> Tens {
    let mut out = Tens::new();
    for (w, c) in t {
        for (a, x) in v {
            let mut u = w.clone();
            u.push(*a);
            add_to(&mut out, u, c * x);
        }
    }
    out
}

fn concat_t(a: &Tens, b: &Tens) -> Tens {
    let mut out = Tens::new();
    for (u, cu) in a {
        for (v, cv) in b {
            let mut w = u.clone();
            w.extend_from_slice(v);
            add_to(&mut out, w, cu * cv);
        }
    }
    out
}

/// The coalgebra morphism `φ̄ = Σ_r φ^{⊗r}∘Δ^{(r)}` (geometric series in the
/// convolution algebra) evaluated on `w`.
pub fn coinduce_morphism(phi: &CochainTable, w: &[usize]) -> Result<Tens, CoalgError> {
    if phi.degree != 0 {
        return Err(CoalgError::Degree("coinduced morphisms need degree 0".into()));
    }
    if phi.value(&vec![]).is_some() {
        return Err(CoalgError::Degree("φ must vanish on the group-like element".into()));
    }
    let mut out = Tens::new();
    for n in 0..=w.len() {
        for blocks in compositions(w, n) {
            let mut acc = unit_t();
            for b in &blocks {
                acc = tens_times_vect(&acc, phi.value(b).unwrap_or(&Vect::new()));
            }
            for (v, c) in acc {
                add_to(&mut out, v, c);
            }
        }
    }
    Ok(out)
}

/// The coderivation `φ̄ ⋆ d ⋆ φ̄` along the morphism coinduced by `phi`.
pub fn coinduce_coderivation(
    space: &GradedSpace,
    d: &CochainTable,
    phi: &CochainTable,
    w: &[usize],
) -> Result<Tens, CoalgError> {
    let mut out = Tens::new();
    for i in 0..w.len() {
        for j in i + 1..=w.len() {
            let Some(dv) = d.value(&w[i..j].to_vec()) else { continue };
            let s = sign(d.degree * space.word_deg(&w[..i]));
            let left = coinduce_morphism(phi, &w[..i])?;
            let right = coinduce_morphism(phi, &w[j..])?;
            for (v, c) in concat_t(&tens_times_vect(&left, dv), &right) {
                add_to(&mut out, v, c * &s);
            }
        }
    }
    Ok(out)
}

/// `Σ (-1)^{|d||x₁…x_i|} x₁…x_i d(x_{i+1}…x_j) x_{j+1}…`: the coderivation
/// along the identity.
pub fn sandwich(space: &GradedSpace, d: &CochainTable, w: &[usize]) -> Tens {
    let mut out = Tens::new();
    for i in 0..w.len() {
        let s = sign(d.degree * space.word_deg(&w[..i]));
        for j in i + 1..=w.len() {
            let Some(dv) = d.value(&w[i..j].to_vec()) else { continue };
            for (a, x) in dv {
                let mut u = w[..i].to_vec();
                u.push(*a);
                u.extend_from_slice(&w[j..]);
                add_to(&mut out, u, x * &s);
            }
        }
    }
    out
}

/// `d₁ ∘_G d₂ = d₁ ∘ d̄₂` on all words up to `cap`.
pub fn circ_g(space: &GradedSpace, d1: &CochainTable, d2: &CochainTable, cap: usize) -> Result<CochainTable, CoalgError> {
    check_cap(&[d1, d2], cap)?;
    let mut out = CochainTable::zero(d1.degree + d2.degree);
    for w in space.words_upto(cap) {
        for (a, x) in d1.eval(&sandwich(space, d2, &w)) {
            out.add_term(w.clone(), a, x);
        }
    }
    Ok(out)
}

/// `∘_G` restricted to Harrison cochains.
pub fn circ_h(space: &GradedSpace, d1: &CochainTable, d2: &CochainTable, cap: usize) -> Result<CochainTable, CoalgError> {
    if !d1.is_harrison(space, cap) || !d2.is_harrison(space, cap) {
        return Err(CoalgError::NotHarrison);
    }
    circ_g(space, d1, d2, cap)
}

/// Graded commutator `a∘b − (-1)^{|a||b|} b∘a` for any of the compositions.
pub fn bracket<K: Ord + Clone, F>(circ: F, a: &Cochain<K>, b: &Cochain<K>) -> Result<Cochain<K>, CoalgError>
where
    F: Fn(&Cochain<K>, &Cochain<K>) -> Result<Cochain<K>, CoalgError>,
{
    Ok(circ(a, b)?.sub(&circ(b, a)?.scale(&sign(a.degree * b.degree))))
}

/// `(a∘b)∘c − (-1)^{|b||c|}(a∘c)∘b − a∘[b,c]`; zero for a pre-Lie product.
pub fn gerstenhaber_defect<K: Ord + Clone, F>(
    circ: F,
    a: &Cochain<K>,
    b: &Cochain<K>,
    c: &Cochain<K>,
) -> Result<Cochain<K>, CoalgError>
where
    F: Fn(&Cochain<K>, &Cochain<K>) -> Result<Cochain<K>, CoalgError>,
{
    let s = sign(b.degree * c.degree);
    let lhs = circ(&circ(a, b)?, c)?.sub(&circ(&circ(a, c)?, b)?.scale(&s));
    let bc = bracket(&circ, b, c)?;
    Ok(lhs.sub(&circ(a, &bc)?))
}

// ---------------------------------------------------------------------------
// Symmetric coalgebra S h and ∘_NR.

/// Normal form in `S h`: sorted letters, sign from the graded signature,
/// `None` when an odd letter repeats.
pub fn sym_normal(space: &GradedSpace, w: &[usize]) -> Option<(Word, Rat)> {
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by_key(|&i| (w[i], i));
    let sorted = permute(w, &order);
    if sorted.windows(2).any(|p| p[0] == p[1] && odd(space.deg(p[0]))) {
        return None;
    }
    Some((sorted, signature(space, w, &order)))
}

pub fn sym_words_upto(space: &GradedSpace, cap: usize) -> Vec<Word> {
    let mut out = Vec::new();
    fn rec(space: &GradedSpace, cap: usize, start: usize, cur: &mut Word, out: &mut Vec<Word>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == cap {
            return;
        }
        for a in start..space.dim() {
            if cur.last() == Some(&a) && odd(space.deg(a)) {
                continue;
            }
            cur.push(a);
            rec(space, cap, a, cur, out);
            cur.pop();
        }
    }
    rec(space, cap, 0, &mut vec![], &mut out);
    out
}

/// Random cochain on `S h` (normal-form keys) with inputs of the given lengths.
pub fn random_sym(space: &GradedSpace, degree: i64, arities: &[usize], g: &mut Gen, density: f64) -> CochainTable {
    let cap = arities.iter().copied().max().unwrap_or(0);
    let mut c = CochainTable::zero(degree);
    for w in sym_words_upto(space, cap) {
        if !arities.contains(&w.len()) {
            continue;
        }
        for a in 0..space.dim() {
            if space.deg(a) - space.word_deg(&w) == degree && g.rng.gen_bool(density) {
                let x = g.coeff();
                c.add_term(w.clone(), a, x);
            }
        }
    }
    c
}

/// Coderivation of `S h` coinduced by `d`: `Σ_{I≠∅} ε(I,J) d(x_I)·x_J`.
pub fn sym_coderivation(space: &GradedSpace, d: &CochainTable, x: &[usize]) -> Tens {
    let n = x.len();
    let degs: Vec<i64> = x.iter().map(|&a| space.deg(a)).collect();
    let mut out = Tens::new();
    for mask in 1u32..(1 << n) {
        let (i_pos, j_pos): (Vec<usize>, Vec<usize>) = (0..n).partition(|&p| mask >> p & 1 == 1);
        let xi: Word = i_pos.iter().map(|&p| x[p]).collect();
        let Some(dv) = d.value(&xi) else { continue };
        let order: Vec<usize> = i_pos.iter().chain(&j_pos).copied().collect();
        let eps = rint(reorder_sign(&degs, &order));
        for (a, c) in dv {
            let mut w = vec![*a];
            w.extend(j_pos.iter().map(|&p| x[p]));
            if let Some((nf, s)) = sym_normal(space, &w) {
                add_to(&mut out, nf, c * &eps * s);
            }
        }
    }
    out
}

/// Nijenhuis–Richardson composition on `Hom(S⁺h, h)`.
pub fn circ_nr(space: &GradedSpace, d1: &CochainTable, d2: &CochainTable, cap: usize) -> Result<CochainTable, CoalgError> {
    check_cap(&[d1, d2], cap)?;
    let mut out = CochainTable::zero(d1.degree + d2.degree);
    for w in sym_words_upto(space, cap) {
        for (a, x) in d1.eval(&sym_coderivation(space, d2, &w)) {
            out.add_term(w.clone(), a, x);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Décalage.

/// `φ[j]` on `h[j]`: same table, signs from the décalage rule for a
/// single output. Returns the shifted space with the cochain.
pub fn shift(space: &GradedSpace, phi: &CochainTable, j: i64) -> Result<(GradedSpace, CochainTable), CoalgError> {
    let sp = space.shifted(j);
    let mut out: Option<CochainTable> = None;
    let mut degree = None;
    for (w, v) in &phi.table {
        let k = w.len() as i64;
        let mut e = (k * (k - 1) / 2) * (j * (j - 1) / 2);
        for (i, &y) in w.iter().enumerate().take(w.len().saturating_sub(1)) {
            e += j * (k - 1 - i as i64) * sp.deg(y);
        }
        let s = sign(e);
        let dg = phi.degree + j * (k - 1);
        if *degree.get_or_insert(dg) != dg {
            return Err(CoalgError::Degree("mixed arities shift to different degrees".into()));
        }
        let o = out.get_or_insert_with(|| CochainTable::zero(dg));
        for (a, x) in v {
            o.add_term(w.clone(), *a, x * &s);
        }
    }
    Ok((sp, out.unwrap_or_else(|| CochainTable::zero(phi.degree))))
}

// ---------------------------------------------------------------------------
// Braces and the ●_K bialgebra.

#[allow(clippy::too_many_arguments)]
fn rho_rec(
    space: &GradedSpace,
    psis: &[&CochainTable],
    w: &[usize],
    pos: usize,
    before: i64,
    pre: &Tens,
    out: &mut Tens,
) {
    let Some((psi, rest)) = psis.split_first() else {
        let tail = Tens::from([(w[pos..].to_vec(), Rat::one())]);
        for (v, c) in concat_t(pre, &tail) {
            add_to(out, v, c);
        }
        return;
    };
    for start in pos..w.len() {
        let id_part = &w[pos..start];
        let s = sign(psi.degree * (before + space.word_deg(id_part)));
        for end in start + 1..=w.len() {
            let Some(pv) = psi.value(&w[start..end].to_vec()) else { continue };
            let mut head = Tens::new();
            for (u, c) in pre {
                let mut u = u.clone();
                u.extend_from_slice(id_part);
                head.insert(u, c * &s);
            }
            let next = tens_times_vect(&head, pv);
            let consumed = before + space.word_deg(&w[pos..end]);
            rho_rec(space, rest, w, end, consumed, &next, out);
        }
    }
}

/// `ρ(ψ₁⋯ψ_k)(w) = Σ id^{i₁}⊗ψ₁⊗id^{i₂}⊗⋯⊗ψ_k⊗id^{i_{k+1}} (w)`.
pub fn rho(space: &GradedSpace, psis: &[&CochainTable], w: &[usize]) -> Tens {
    let mut out = Tens::new();
    rho_rec(space, psis, w, 0, 0, &unit_t(), &mut out);
    out
}

/// `φ{ψ₁,…,ψ_k} = φ∘ρ(ψ₁⋯ψ_k)` on words up to `cap`.
pub fn braces(space: &GradedSpace, phi: &CochainTable, psis: &[&CochainTable], cap: usize) -> CochainTable {
    let deg = phi.degree + psis.iter().map(|p| p.degree).sum::<i64>();
    let mut out = CochainTable::zero(deg);
    for w in space.words_upto(cap) {
        for (a, x) in phi.eval(&rho(space, psis, &w)) {
            out.add_term(w.clone(), a, x);
        }
    }
    out
}

/// Element of `H^⊗`: a linear combination of words of cochains.
#[derive(Clone, Debug, Default)]
pub struct CochainTensor {
    pub terms: Vec<(Rat, Vec<CochainTable>)>,
}

impl CochainTensor {
    /// The group-like element `e`.
    pub fn unit() -> CochainTensor {
        CochainTensor { terms: vec![(Rat::one(), vec![])] }
    }

    pub fn word(cs: Vec<CochainTable>) -> CochainTensor {
        CochainTensor { terms: vec![(Rat::one(), cs)] }
    }

    pub fn add(&self, o: &CochainTensor) -> CochainTensor {
        let mut t = self.terms.clone();
        t.extend(o.terms.iter().cloned());
        CochainTensor { terms: t }
    }

    pub fn scale(&self, c: &Rat) -> CochainTensor {
        CochainTensor { terms: self.terms.iter().map(|(x, w)| (x * c, w.clone())).collect() }
    }

    pub fn sub(&self, o: &CochainTensor) -> CochainTensor {
        self.add(&o.scale(&-Rat::one()))
    }

    fn term_degree(w: &[CochainTable]) -> i64 {
        w.iter().map(|c| c.degree).sum()
    }

    /// Faithful coordinates at truncation: `φ₁⋯φ_k` becomes the multilinear
    /// function `(w₁,…,w_k) ↦ ±φ₁(w₁)⊗⋯⊗φ_k(w_k)` with `Σ|w_i| ≤ cap`.
    pub fn expand(&self, space: &GradedSpace, cap: usize) -> BTreeMap<(Vec<Word>, Word), Rat> {
        let mut out = BTreeMap::new();
        for (c, w) in &self.terms {
            if c.is_zero() {
                continue;
            }
            let mut stack: Vec<(Vec<Word>, Tens, i64, usize)> = vec![(vec![], unit_t(), 0, 0)];
            // (inputs so far, outputs, input degree so far, letters used)
            for phi in w {
                let mut next = Vec::new();
                for (ins, outs, ideg, used) in &stack {
                    let rem = cap.saturating_sub(*used + (w.len() - ins.len() - 1));
                    for u in space.words_upto(rem) {
                        let Some(v) = phi.value(&u) else { continue };
                        let s = sign(phi.degree * ideg);
                        let mut ins2 = ins.clone();
                        ins2.push(u.clone());
                        let o = tens_times_vect(outs, v).into_iter().map(|(k, x)| (k, x * &s)).collect();
                        next.push((ins2, o, ideg + space.word_deg(&u), used + u.len()));
                    }
                }
                stack = next;
            }
            for (ins, outs, _, _) in stack {
                for (o, x) in outs {
                    add_to(&mut out, (ins.clone(), o), x * c);
                }
            }
        }
        out
    }

    pub fn eq_at(&self, o: &CochainTensor, space: &GradedSpace, cap: usize) -> bool {
        self.sub(o).expand(space, cap).is_empty()
    }
}

/// `ρ(ξ)` on a tensor of `h`-words.
pub fn rho_tensor(space: &GradedSpace, xi: &CochainTensor, x: &Tens) -> Tens {
    let mut out = Tens::new();
    for (c, w) in &xi.terms {
        let refs: Vec<&CochainTable> = w.iter().collect();
        for (u, cu) in x {
            for (v, cv) in rho(space, &refs, u) {
                add_to(&mut out, v, cv * cu * c);
            }
        }
    }
    out
}

fn nondecreasing(len: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|s: Vec<usize>| {
                let lo = s.last().copied().unwrap_or(0);
                (lo..=max).map(move |x| {
                    let mut t = s.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

/// `m[1]` on `h = A₊[1]` for `A = K⟨a⟩/(a⁴)`, `|a| = 1`; `h` has degrees 0, 1, 2.
pub fn odd_truncated() -> (GradedSpace, CochainTable) {
    let a = GradedSpace::from_degrees(&[1, 2, 3]);
    let mut m = CochainTable::zero(0);
    m.add_term(vec![0, 0], 1, rint(1));
    m.add_term(vec![0, 1], 2, rint(1));
    m.add_term(vec![1, 0], 2, rint(1));
    shift(&a, &m, 1).unwrap()
}

/// `φ₁⋯φ_k ●_K ψ₁⋯ψ_l` by the closed brace formula.
pub fn bullet_k(space: &GradedSpace, xi: &CochainTensor, eta: &CochainTensor, cap: usize) -> CochainTensor {
    let mut out = CochainTensor::default();
    for (c1, phis) in &xi.terms {
        for (c2, psis) in &eta.terms {
            let (k, l) = (phis.len(), psis.len());
            let pdeg: Vec<i64> = psis.iter().map(|p| p.degree).collect();
            let range_deg = |a: usize, b: usize| -> i64 { pdeg[a..b].iter().sum() };
            for s in nondecreasing(2 * k, l) {
                // s[i] is s_{i+1}; s_{-1} = 0.
                let at = |i: i64| if i < 1 { 0 } else { s[i as usize - 1] };
                let mut e = 0;
                for r in 1..=k as i64 {
                    let tail: i64 = phis[r as usize - 1..].iter().map(|p| p.degree).sum();
                    e += tail * range_deg(at(2 * r - 3), at(2 * r - 1));
                }
                let mut word = Vec::new();
                let mut prev = 0;
                for r in 0..k {
                    let (a, b) = (s[2 * r], s[2 * r + 1]);
                    word.extend(psis[prev..a].iter().cloned());
                    let inner: Vec<&CochainTable> = psis[a..b].iter().collect();
                    word.push(braces(space, &phis[r], &inner, cap));
                    prev = b;
                }
                word.extend(psis[prev..].iter().cloned());
                out.terms.push((sign(e) * c1 * c2, word));
            }
        }
    }
    out
}

/// `μ_K` as the coalgebra morphism coinduced by `m_K` on `H^⊗ ⊗ H^⊗`: sum
/// over `r`-fold deconcatenations of both factors, Koszul-interleaved, with
/// `m_K` applied to each of the `r` pairs.
pub fn bullet_k_coinduced(space: &GradedSpace, xi: &CochainTensor, eta: &CochainTensor, cap: usize) -> CochainTensor {
    fn pieces(n: usize, r: usize) -> Vec<Vec<(usize, usize)>> {
        // r consecutive (possibly empty) ranges covering 0..n.
        nondecreasing(r - 1, n)
            .into_iter()
            .map(|cuts| {
                let mut b = vec![0];
                b.extend(cuts);
                b.push(n);
                b.windows(2).map(|p| (p[0], p[1])).collect()
            })
            .collect()
    }
    let mut out = CochainTensor::default();
    for (c1, phis) in &xi.terms {
        for (c2, psis) in &eta.terms {
            let (k, l) = (phis.len(), psis.len());
            if k + l == 0 {
                out.terms.push((c1 * c2, vec![]));
                continue;
            }
            let deg = |cs: &[CochainTable], (a, b): (usize, usize)| -> i64 { cs[a..b].iter().map(|p| p.degree).sum() };
            for r in 1..=k + l {
                for xs in pieces(k, r) {
                    if xs.iter().any(|(a, b)| b - a > 1) {
                        continue;
                    }
                    for ys in pieces(l, r) {
                        let ok = xs.iter().zip(&ys).all(|(x, y)| x.1 > x.0 || y.1 - y.0 == 1);
                        if !ok {
                            continue;
                        }
                        // ξ¹…ξʳ η¹…ηʳ ↦ ξ¹η¹…ξʳηʳ.
                        let mut degs: Vec<i64> = xs.iter().map(|&p| deg(phis, p)).collect();
                        degs.extend(ys.iter().map(|&p| deg(psis, p)));
                        let order: Vec<usize> = (0..r).flat_map(|i| [i, r + i]).collect();
                        let s = reorder_sign(&degs, &order);
                        let word: Vec<CochainTable> = xs
                            .iter()
                            .zip(&ys)
                            .map(|(&(a, b), &(c, d))| {
                                if b > a {
                                    let inner: Vec<&CochainTable> = psis[c..d].iter().collect();
                                    braces(space, &phis[a], &inner, cap)
                                } else {
                                    psis[c].clone()
                                }
                            })
                            .collect();
                        out.terms.push((rint(s) * c1 * c2, word));
                    }
                }
            }
        }
    }
    out
}

fn check_associative(space: &GradedSpace, m1: &CochainTable, cap: usize) -> Result<(), CoalgError> {
    if circ_g(space, m1, m1, cap)?.is_zero() {
        Ok(())
    } else {
        Err(CoalgError::NotAssociative)
    }
}

/// `b_K = [m[1], −]_K` for homogeneous terms.
pub fn b_k(space: &GradedSpace, m1: &CochainTable, xi: &CochainTensor, cap: usize) -> Result<CochainTensor, CoalgError> {
    check_associative(space, m1, cap)?;
    let m = CochainTensor::word(vec![m1.clone()]);
    let mut out = CochainTensor::default();
    for (c, w) in &xi.terms {
        let t = CochainTensor { terms: vec![(c.clone(), w.clone())] };
        let s = sign(CochainTensor::term_degree(w));
        out = out.add(&bullet_k(space, &m, &t, cap)).sub(&bullet_k(space, &t, &m, cap).scale(&s));
    }
    Ok(out)
}

/// `b_K` by its two-sum expansion, with `bφ = [m[1], φ]_G` and
/// `φ∪ψ = (-1)^{|φ|} m[1]{φ,ψ}`.
pub fn b_k_formula(space: &GradedSpace, m1: &CochainTable, xi: &CochainTensor, cap: usize) -> Result<CochainTensor, CoalgError> {
    check_associative(space, m1, cap)?;
    let mut out = CochainTensor::default();
    for (c, w) in &xi.terms {
        let mut before = 0;
        for s in 0..w.len() {
            let b = bracket(|a, b| circ_g(space, a, b, cap), m1, &w[s])?;
            let mut t = w[..s].to_vec();
            t.push(b);
            t.extend(w[s + 1..].iter().cloned());
            out.terms.push((sign(before) * c, t));
            if s + 1 < w.len() {
                let cup = braces(space, m1, &[&w[s], &w[s + 1]], cap).scale(&sign(w[s].degree));
                let mut t = w[..s].to_vec();
                t.push(cup);
                t.extend(w[s + 2..].iter().cloned());
                out.terms.push((sign(before + w[s].degree) * c, t));
            }
            before += w[s].degree;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// The cofree Gerstenhaber coalgebra G h and ∘_T.
//
// Letters live in L = h[-1]; a column sW has degree |W| − 1 and a GWord is
// a graded-symmetric product of columns. Cochains send GWords to h = L[1],
// where letter `a` has degree |a| − 1.

pub type GWord = Vec<Word>;
pub type GCochain = Cochain<GWord>;

pub fn col_deg(letters: &GradedSpace, w: &[usize]) -> i64 {
    letters.word_deg(w) - 1
}

pub fn gword_normal(letters: &GradedSpace, cols: &[Word]) -> Option<(GWord, Rat)> {
    let degs: Vec<i64> = cols.iter().map(|c| col_deg(letters, c)).collect();
    let mut order: Vec<usize> = (0..cols.len()).collect();
    order.sort_by(|&i, &j| (&cols[i], i).cmp(&(&cols[j], j)));
    let sorted: GWord = order.iter().map(|&i| cols[i].clone()).collect();
    if sorted.windows(2).any(|p| p[0] == p[1] && odd(col_deg(letters, &p[0]))) {
        return None;
    }
    Some((sorted, rint(reorder_sign(&degs, &order))))
}

pub fn gword_letters(x: &GWord) -> usize {
    x.iter().map(Vec::len).sum()
}

/// Normal-form GWords with at most `cap` letters in total.
pub fn gwords_upto(letters: &GradedSpace, cap: usize) -> Vec<GWord> {
    let mut cols = letters.words_upto(cap);
    cols.sort();
    let mut out = Vec::new();
    fn rec(l: &GradedSpace, cols: &[Word], cap: usize, start: usize, cur: &mut GWord, out: &mut Vec<GWord>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        let used = gword_letters(cur);
        for i in start..cols.len() {
            if used + cols[i].len() > cap {
                continue;
            }
            if cur.last() == Some(&cols[i]) && odd(col_deg(l, &cols[i])) {
                continue;
            }
            cur.push(cols[i].clone());
            rec(l, cols, cap, i, cur, out);
            cur.pop();
        }
    }
    rec(letters, &cols, cap, 0, &mut vec![], &mut out);
    out
}

pub fn gcochain_is_homogeneous(letters: &GradedSpace, c: &GCochain) -> bool {
    c.table.iter().all(|(x, v)| {
        let ind: i64 = x.iter().map(|w| col_deg(letters, w)).sum();
        v.keys().all(|&a| letters.deg(a) - 1 - ind == c.degree)
    })
}

/// Random homogeneous GWord cochain on GWords with column count in `ncols`.
pub fn random_gcochain(letters: &GradedSpace, degree: i64, cap: usize, ncols: &[usize], g: &mut Gen, density: f64) -> GCochain {
    let mut c = GCochain::zero(degree);
    for x in gwords_upto(letters, cap) {
        if !ncols.contains(&x.len()) {
            continue;
        }
        let ind: i64 = x.iter().map(|w| col_deg(letters, w)).sum();
        for a in 0..letters.dim() {
            if letters.deg(a) - 1 - ind == degree && g.rng.gen_bool(density) {
                let v = g.coeff();
                c.add_term(x.clone(), a, v);
            }
        }
    }
    c
}

/// `c ∘ S(e₁)`: vanishes whenever some column is a nontrivial shuffle.
pub fn gharrison_part(letters: &GradedSpace, c: &GCochain, cap: usize) -> GCochain {
    let mut out = GCochain::zero(c.degree);
    for x in gwords_upto(letters, cap) {
        let mut acc: BTreeMap<GWord, Rat> = BTreeMap::from([(vec![], Rat::one())]);
        for col in &x {
            let e = eulerian(letters, col);
            let mut next = BTreeMap::new();
            for (cols, c0) in &acc {
                for (w, c1) in &e {
                    let mut cols = cols.clone();
                    cols.push(w.clone());
                    add_to(&mut next, cols, c0 * c1);
                }
            }
            acc = next;
        }
        let mut t = BTreeMap::new();
        for (cols, x0) in acc {
            if let Some((nf, s)) = gword_normal(letters, &cols) {
                add_to(&mut t, nf, x0 * s);
            }
        }
        for (a, v) in c.eval(&t) {
            out.add_term(x.clone(), a, v);
        }
    }
    out
}

fn splits(len: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for i in 0..len {
        for j in i + 1..=len {
            v.push((i, j));
        }
    }
    v
}

/// The component of `c̄` using every column of `cols` exactly once: each
/// column is cut as `U B V`, `c` eats the `B`'s and the result is the single
/// column `s(U₁⧢…⧢U_s · c(sB₁⋯sB_s) · V₁⧢…⧢V_s)`.
fn dc(letters: &GradedSpace, c: &GCochain, cols: &[Word]) -> Tens {
    let mut out = Tens::new();
    let s = cols.len();
    let choices: Vec<Vec<(usize, usize)>> = cols.iter().map(|w| splits(w.len())).collect();
    let mut idx = vec![0usize; s];
    loop {
        let cut: Vec<(usize, usize)> = (0..s).map(|a| choices[a][idx[a]]).collect();
        let us: Vec<&[usize]> = (0..s).map(|a| &cols[a][..cut[a].0]).collect();
        let bs: Vec<Word> = (0..s).map(|a| cols[a][cut[a].0..cut[a].1].to_vec()).collect();
        let vs: Vec<&[usize]> = (0..s).map(|a| &cols[a][cut[a].1..]).collect();
        if let Some((nf, s2)) = gword_normal(letters, &bs) {
            if let Some(val) = c.value(&nf) {
                // Items: s U_a B_a V_a per column, regrouped to U… (s B)… V….
                let mut degs = Vec::new();
                for a in 0..s {
                    degs.extend([-1, letters.word_deg(us[a]), letters.word_deg(&bs[a]), letters.word_deg(vs[a])]);
                }
                let mut order: Vec<usize> = (0..s).map(|a| 4 * a + 1).collect();
                for a in 0..s {
                    order.extend([4 * a, 4 * a + 2]);
                }
                order.extend((0..s).map(|a| 4 * a + 3));
                let ud: i64 = us.iter().map(|u| letters.word_deg(u)).sum();
                let sg = rint(reorder_sign(&degs, &order)) * s2 * sign(c.degree * ud + ud);
                let mut ush = unit_t();
                let mut vsh = unit_t();
                for a in 0..s {
                    ush = shuffle_t(letters, &ush, &Tens::from([(us[a].to_vec(), Rat::one())]));
                    vsh = shuffle_t(letters, &vsh, &Tens::from([(vs[a].to_vec(), Rat::one())]));
                }
                for (u, cu) in &ush {
                    for (letter, cx) in val {
                        for (v, cv) in &vsh {
                            let mut w = u.clone();
                            w.push(*letter);
                            w.extend_from_slice(v);
                            add_to(&mut out, w, cu * cx * cv * &sg);
                        }
                    }
                }
            }
        }
        let mut a = 0;
        loop {
            if a == s {
                return out;
            }
            idx[a] += 1;
            if idx[a] < choices[a].len() {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
    }
}

/// The coderivation `c̄` of `G h` coinduced by `c`, on a normal GWord.
pub fn g_coderivation(letters: &GradedSpace, c: &GCochain, x: &GWord) -> BTreeMap<GWord, Rat> {
    let r = x.len();
    let degs: Vec<i64> = x.iter().map(|w| col_deg(letters, w)).collect();
    let mut out = BTreeMap::new();
    for mask in 1u32..(1 << r) {
        let (ip, jp): (Vec<usize>, Vec<usize>) = (0..r).partition(|&p| mask >> p & 1 == 1);
        let xi: Vec<Word> = ip.iter().map(|&p| x[p].clone()).collect();
        let order: Vec<usize> = ip.iter().chain(&jp).copied().collect();
        let eps = rint(reorder_sign(&degs, &order));
        for (col, cc) in dc(letters, c, &xi) {
            let mut cols = vec![col];
            cols.extend(jp.iter().map(|&p| x[p].clone()));
            if let Some((nf, s)) = gword_normal(letters, &cols) {
                add_to(&mut out, nf, cc * &eps * s);
            }
        }
    }
    out
}

/// `c₁ ∘_T c₂ = c₁ ∘ c̄₂` on GWords with at most `cap` letters.
pub fn circ_t(letters: &GradedSpace, c1: &GCochain, c2: &GCochain, cap: usize) -> Result<GCochain, CoalgError> {
    for c in [c1, c2] {
        if let Some(len) = c.table.keys().map(gword_letters).max() {
            if len > cap {
                return Err(CoalgError::CapExceeded { len, cap });
            }
        }
    }
    let mut out = GCochain::zero(c1.degree + c2.degree);
    for x in gwords_upto(letters, cap) {
        for (a, v) in c1.eval(&g_coderivation(letters, c2, &x)) {
            out.add_term(x.clone(), a, v);
        }
    }
    Ok(out)
}

/// A finite-dimensional Gerstenhaber algebra given on a basis of multivector
/// fields closed under `∧` and `[,]_S`. Letter `a` of `L = g[1]` has degree
/// `rank − 1`.
#[derive(Clone, Debug)]
pub struct GerstAlgebra {
    pub basis: Vec<MultiVec>,
    pub letters: GradedSpace,
    pub wedge: BTreeMap<(usize, usize), Vect>,
    pub bracket: BTreeMap<(usize, usize), Vect>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Obstruction {
    /// `D_CE = [d^{1,1}, −]_T`, from the Schouten bracket.
    CE,
    /// `D_Har = [d², −]_T`, from the wedge product.
    Har,
}

impl GerstAlgebra {
    pub fn from_multivectors(basis: Vec<MultiVec>) -> Result<GerstAlgebra, CoalgError> {
        let mut keys: BTreeMap<(Vec<usize>, Mono), usize> = BTreeMap::new();
        let mut flat = |x: &MultiVec| -> SVec {
            let mut v = SVec::new();
            for (s, f) in &x.terms {
                for (m, c) in f.terms() {
                    let n = keys.len();
                    let k = *keys.entry((s.clone(), m.clone())).or_insert(n);
                    v.insert(k, c.clone());
                }
            }
            v
        };
        let cols: Vec<SVec> = basis.iter().map(&mut flat).collect();
        let mut degs = Vec::new();
        for x in &basis {
            let k = x.rank().ok_or_else(|| CoalgError::BadSpace("inhomogeneous basis element".into()))?;
            degs.push(k as i64 - 1);
        }
        let mut express = |y: &MultiVec| -> Result<Vect, CoalgError> {
            let t = flat(y);
            let x = linalg::solve(&cols, &t).ok_or_else(|| CoalgError::BadSpace("basis not closed".into()))?;
            Ok(x.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect())
        };
        let mut wd = BTreeMap::new();
        let mut br = BTreeMap::new();
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                let w = express(&wedge(&basis[i], &basis[j]))?;
                if !w.is_empty() {
                    wd.insert((i, j), w);
                }
                let b = express(&schouten(&basis[i], &basis[j]))?;
                if !b.is_empty() {
                    br.insert((i, j), b);
                }
            }
        }
        Ok(GerstAlgebra { basis, letters: GradedSpace::from_degrees(&degs), wedge: wd, bracket: br })
    }

    /// `{∂x, x∂x, y∂y, y∂x∧∂y, xy∂x∧∂y}` on `R²`.
    pub fn example() -> GerstAlgebra {
        use crate::geometry::SpaceConfig;
        use crate::ratpoly::{Poly, Var};
        let c = SpaceConfig::new(2, 1);
        let x = Poly::var(Var::base(1));
        let y = Poly::var(Var::base(2));
        let basis = vec![
            MultiVec::term(c, vec![1], Poly::one()),
            MultiVec::term(c, vec![1], x.clone()),
            MultiVec::term(c, vec![2], y.clone()),
            MultiVec::term(c, vec![1, 2], y.clone()),
            MultiVec::term(c, vec![1, 2], x.mul(&y)),
        ];
        GerstAlgebra::from_multivectors(basis).expect("closed basis")
    }

    fn rank(&self, a: usize) -> i64 {
        self.letters.deg(a) + 1
    }

    /// `d^{1,1}((x)(y)) = (-1)^{k_x} [x,y]_S`.
    pub fn d11(&self) -> GCochain {
        let mut c = GCochain::zero(1);
        for ((i, j), v) in &self.bracket {
            if let Some((nf, s)) = gword_normal(&self.letters, &[vec![*i], vec![*j]]) {
                if nf == vec![vec![*i], vec![*j]] {
                    for (a, x) in v {
                        c.add_term(nf.clone(), *a, x * sign(self.rank(*i)) * &s);
                    }
                }
            }
        }
        c
    }

    /// `d²((xy)) = (-1)^{k_x − 1} x∧y`.
    pub fn d2(&self) -> GCochain {
        let mut c = GCochain::zero(1);
        for ((i, j), v) in &self.wedge {
            for (a, x) in v {
                c.add_term(vec![vec![*i, *j]], *a, x * sign(self.rank(*i) - 1));
            }
        }
        c
    }

    pub fn structure(&self, which: Obstruction) -> GCochain {
        match which {
            Obstruction::CE => self.d11(),
            Obstruction::Har => self.d2(),
        }
    }
}

/// One-column part of a GWord cochain, read as a word cochain on the
/// letters (same table and same degree).
pub fn single_column(c: &GCochain) -> CochainTable {
    let mut t = CochainTable::zero(c.degree);
    for (x, v) in &c.table {
        if x.len() == 1 {
            t.table.insert(x[0].clone(), v.clone());
        }
    }
    t
}

pub fn from_single_column(t: &CochainTable) -> GCochain {
    let mut c = GCochain::zero(t.degree);
    for (w, v) in &t.table {
        c.table.insert(vec![w.clone()], v.clone());
    }
    c
}

/// `D_CE(c) = [d^{1,1}, c]_T` or `D_Har(c) = [d², c]_T`.
pub fn obstruction_diff(alg: &GerstAlgebra, c: &GCochain, which: Obstruction, cap: usize) -> Result<GCochain, CoalgError> {
    let d = alg.structure(which);
    bracket(|a, b| circ_t(&alg.letters, a, b, cap), &d, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(degs: &[i64]) -> GradedSpace {
        GradedSpace::from_degrees(degs)
    }

    #[test]
    fn signature_and_shuffle() {
        let s = sp(&[0, 1, 1, 2]);
        assert_eq!(signature(&s, &[0, 3], &[1, 0]), rint(1));
        assert_eq!(signature(&s, &[1, 2], &[1, 0]), rint(-1));
        assert_eq!(signature(&s, &[1, 3], &[1, 0]), rint(1));
        let xy = shuffle(&s, &[1], &[2]);
        assert_eq!(xy, Tens::from([(vec![1, 2], rint(1)), (vec![2, 1], rint(-1))]));
        // Shuffle sign agrees with the signature of the inverse shuffle.
        let u = [1, 3, 2];
        let v = [2, 0];
        let w: Word = u.iter().chain(&v).copied().collect();
        let mut direct = Tens::new();
        for perm in crate::koszulbar::permutations(5) {
            let sigma = &perm.0;
            let inv: Vec<usize> = (0..5).map(|i| sigma.iter().position(|&p| p == i).unwrap()).collect();
            let is_sh = inv[0] < inv[1] && inv[1] < inv[2] && inv[3] < inv[4];
            if is_sh {
                add_to(&mut direct, permute(&w, sigma), signature(&s, &w, sigma));
            }
        }
        assert_eq!(shuffle(&s, &u, &v), direct);
    }

    #[test]
    fn eulerian_kills_shuffles() {
        let s = sp(&[0, 1, 2]);
        for (u, v) in [(vec![0], vec![1]), (vec![1, 2], vec![1]), (vec![0, 1], vec![2, 1])] {
            let mut tot = Tens::new();
            for (w, c) in shuffle(&s, &u, &v) {
                for (x, d) in eulerian(&s, &w) {
                    add_to(&mut tot, x, c.clone() * d);
                }
            }
            assert!(tot.is_empty());
        }
    }

    fn tens(w: &[usize]) -> Tens {
        Tens::from([(w.to_vec(), Rat::one())])
    }

    // (a⊗b)•(c⊗d) = (-1)^{|b||c|} (a•c)⊗(b•d)
    fn shuffle_tt(
        s: &GradedSpace,
        x: &BTreeMap<(Word, Word), Rat>,
        y: &BTreeMap<(Word, Word), Rat>,
    ) -> BTreeMap<(Word, Word), Rat> {
        let mut out = BTreeMap::new();
        for ((a, b), c1) in x {
            for ((c, d), c2) in y {
                let sg = sign(s.word_deg(b) * s.word_deg(c));
                for (l, x1) in shuffle(s, a, c) {
                    for (r, x2) in shuffle(s, b, d) {
                        add_to(&mut out, (l.clone(), r), &x1 * x2 * c1 * c2 * &sg);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn bialgebra_laws() {
        let s = sp(&[0, 1, 2]);
        let ws = s.words_upto(2);
        for u in &ws {
            for v in &ws {
                let lhs = deconcat_t(&shuffle(&s, u, v));
                let rhs = shuffle_tt(&s, &deconcat_t(&tens(u)), &deconcat_t(&tens(v)));
                assert_eq!(lhs, rhs);
                let uv = shuffle(&s, u, v);
                let vu = shuffle(&s, v, u);
                let sg = sign(s.word_deg(u) * s.word_deg(v));
                assert_eq!(uv, vu.into_iter().map(|(k, c)| (k, c * &sg)).collect::<Tens>());
            }
        }
        assert_eq!(shuffle(&s, &[], &[1, 2]), tens(&[1, 2]));
        assert_eq!(deconcat(&[0]), vec![(vec![], vec![0]), (vec![0], vec![])]);
        assert_eq!(shuffle_t(&s, &shuffle(&s, &[1], &[2]), &tens(&[1, 0])), shuffle_t(&s, &tens(&[1]), &shuffle(&s, &[2], &[1, 0])));
    }

    #[test]
    fn coinduction() {
        let s = sp(&[0, 1, 1]);
        let mut g = Gen::new(3);
        let id = CochainTable::projection(&s);
        for w in s.words_upto(3) {
            assert_eq!(coinduce_morphism(&id, &w).unwrap(), tens(&w));
        }
        let phi = CochainTable::random(&s, 0, &[1, 2], &mut g, 0.5);
        let d = CochainTable::random(&s, 1, &[2], &mut g, 0.6);
        for w in s.words_upto(3) {
            // Δ∘φ̄ = (φ̄⊗φ̄)∘Δ
            let lhs = deconcat_t(&coinduce_morphism(&phi, &w).unwrap());
            let mut rhs = BTreeMap::new();
            for (a, b) in deconcat(&w) {
                for (x, c1) in coinduce_morphism(&phi, &a).unwrap() {
                    for (y, c2) in coinduce_morphism(&phi, &b).unwrap() {
                        add_to(&mut rhs, (x.clone(), y), c1.clone() * c2);
                    }
                }
            }
            assert_eq!(lhs, rhs);
            // Δ∘D = (φ̄⊗D + D⊗φ̄)∘Δ
            let lhs = deconcat_t(&coinduce_coderivation(&s, &d, &phi, &w).unwrap());
            let mut rhs = BTreeMap::new();
            for (a, b) in deconcat(&w) {
                let sg = sign(d.degree * s.word_deg(&a));
                for (x, c1) in coinduce_morphism(&phi, &a).unwrap() {
                    for (y, c2) in coinduce_coderivation(&s, &d, &phi, &b).unwrap() {
                        add_to(&mut rhs, (x.clone(), y), c1.clone() * c2 * &sg);
                    }
                }
                for (x, c1) in coinduce_coderivation(&s, &d, &phi, &a).unwrap() {
                    for (y, c2) in coinduce_morphism(&phi, &b).unwrap() {
                        add_to(&mut rhs, (x.clone(), y), c1.clone() * c2);
                    }
                }
            }
            assert_eq!(lhs, rhs);
            assert_eq!(coinduce_coderivation(&s, &d, &id, &w).unwrap(), sandwich(&s, &d, &w));
        }
    }

    /// `K[t]/t²` with `m[1] = shift(m, 1)` on `h = A[1]`.
    fn dual_numbers() -> (GradedSpace, CochainTable) {
        let a = sp(&[0, 0]);
        let mut m = CochainTable::zero(0);
        m.add_term(vec![0, 0], 0, rint(1));
        m.add_term(vec![0, 1], 1, rint(1));
        m.add_term(vec![1, 0], 1, rint(1));
        let (h, m1) = shift(&a, &m, 1).unwrap();
        assert_eq!(m1, m.scale(&rint(-1)).tap_degree(1));
        (h, m1)
    }

    trait TapDegree {
        fn tap_degree(self, d: i64) -> Self;
    }
    impl TapDegree for CochainTable {
        fn tap_degree(mut self, d: i64) -> Self {
            self.degree = d;
            self
        }
    }

    #[test]
    fn compositions_pre_lie() {
        let (h, m1) = dual_numbers();
        assert!(circ_g(&h, &m1, &m1, 4).unwrap().is_zero());
        let s = sp(&[0, 1, 2]);
        let mut g = Gen::new(11);
        for _ in 0..3 {
            let a = CochainTable::random(&s, 1, &[1, 2], &mut g, 0.4);
            let b = CochainTable::random(&s, 0, &[2], &mut g, 0.4);
            let c = CochainTable::random(&s, -1, &[1, 2], &mut g, 0.4);
            assert!(gerstenhaber_defect(|x, y| circ_g(&s, x, y, 4), &a, &b, &c).unwrap().is_zero());
            let a = random_sym(&s, 1, &[1, 2], &mut g, 0.4);
            let b = random_sym(&s, 0, &[2], &mut g, 0.4);
            let c = random_sym(&s, -1, &[1, 2], &mut g, 0.4);
            assert!(gerstenhaber_defect(|x, y| circ_nr(&s, x, y, 4), &a, &b, &c).unwrap().is_zero());
            let a = CochainTable::random(&s, 1, &[1, 2], &mut g, 0.4).harrison_part(&s, 4);
            let b = CochainTable::random(&s, 0, &[2], &mut g, 0.4).harrison_part(&s, 4);
            let c = CochainTable::random(&s, -1, &[1, 2], &mut g, 0.4).harrison_part(&s, 4);
            assert!(a.is_harrison(&s, 4) && b.is_harrison(&s, 4));
            assert!(circ_g(&s, &a, &b, 4).unwrap().is_harrison(&s, 4));
            assert!(gerstenhaber_defect(|x, y| circ_h(&s, x, y, 4), &a, &b, &c).unwrap().is_zero());
        }
    }

    #[test]
    fn nr_encodes_jacobi() {
        // sl2-like bracket on three odd letters (s of an ungraded Lie algebra).
        let s = sp(&[-1, -1, -1]);
        let lie = |bad: bool| {
            let mut c = CochainTable::zero(1);
            // [e,f]=h, [h,e]=2e, [h,f]=-2f with e=0, f=1, h=2
            c.add_term(vec![0, 1], 2, rint(1));
            c.add_term(vec![0, 2], 0, rint(if bad { 3 } else { -2 }));
            c.add_term(vec![1, 2], 1, rint(2));
            c
        };
        assert!(circ_nr(&s, &lie(false), &lie(false), 3).unwrap().is_zero());
        assert!(!circ_nr(&s, &lie(true), &lie(true), 3).unwrap().is_zero());
    }

    #[test]
    fn shift_laws() {
        let s = sp(&[0, 1, 2]);
        let mut g = Gen::new(5);
        let phi = CochainTable::random(&s, 1, &[2], &mut g, 0.7);
        for j in [-2, -1, 1, 2, 3] {
            for j2 in [-1, 1, 2] {
                let (s1, a) = shift(&s, &phi, j).unwrap();
                let (_, b) = shift(&s1, &a, j2).unwrap();
                let (_, c) = shift(&s, &phi, j + j2).unwrap();
                assert_eq!(b, c);
            }
        }
        let (s1, a) = shift(&s, &phi, 1).unwrap();
        assert!(a.is_homogeneous(&s1));
        let (_, back) = shift(&s1, &a, -1).unwrap();
        assert_eq!(back, phi);
        // 2→1 map on odd letters: φ[1](y1 y2) = (-1)^{|y1|} φ(y1 y2), |y1| in h[1].
        let o = sp(&[1, 1]);
        let mut f = CochainTable::zero(-1);
        f.add_term(vec![0, 1], 0, rint(1));
        let (o1, f1) = shift(&o, &f, 1).unwrap();
        assert_eq!(o1.degrees, vec![0, 0]);
        assert_eq!(f1.value(&vec![0, 1]), Some(&Vect::from([(0, rint(1))])));
        assert_eq!(f1.degree, 0);
    }

    /// `A = K⟨a⟩/(a⁴)` with `|a| = 1`, so `h = A[1]` has degrees 0,1,2.

    #[test]
    fn braces_and_bullet() {
        let (h, m1) = odd_truncated();
        assert_eq!(h.degrees, vec![0, 1, 2]);
        assert!(circ_g(&h, &m1, &m1, 4).unwrap().is_zero());
        let cap = 4;
        let mut g = Gen::new(9);
        let pal = vec![
            CochainTable::random(&h, 0, &[1, 2], &mut g, 0.5),
            CochainTable::random(&h, 1, &[1, 2], &mut g, 0.5),
            CochainTable::random(&h, -1, &[2, 3], &mut g, 0.5),
        ];
        // φ{ψ} = φ∘_G ψ
        assert_eq!(braces(&h, &pal[0], &[&pal[1]], cap), circ_g(&h, &pal[0], &pal[1], cap).unwrap());
        let mut words = vec![vec![]];
        for len in 1..=2 {
            for w in nondecreasing(len, 2) {
                words.push(w);
            }
        }
        let mk = |w: &Vec<usize>| CochainTensor::word(w.iter().map(|&i| pal[i].clone()).collect());
        for u in &words {
            for v in &words {
                let (x, y) = (mk(u), mk(v));
                let f = bullet_k(&h, &x, &y, cap);
                let c = bullet_k_coinduced(&h, &x, &y, cap);
                assert!(f.eq_at(&c, &h, cap), "{u:?} {v:?}");
            }
        }
        let e = CochainTensor::unit();
        let x = mk(&vec![1, 2]);
        assert!(bullet_k(&h, &e, &x, cap).eq_at(&x, &h, cap));
        assert!(bullet_k(&h, &x, &e, cap).eq_at(&x, &h, cap));
        // module law ρ(ξ)ρ(η) = ρ(ξ●η)
        let (xi, eta) = (mk(&vec![0]), mk(&vec![1, 2]));
        let prod = bullet_k(&h, &xi, &eta, cap);
        for w in h.words_upto(3) {
            let lhs = rho_tensor(&h, &xi, &rho_tensor(&h, &eta, &tens(&w)));
            assert_eq!(lhs, rho_tensor(&h, &prod, &tens(&w)));
        }
        // associativity
        let z = mk(&vec![2]);
        let l = bullet_k(&h, &bullet_k(&h, &xi, &eta, cap), &z, cap);
        let r = bullet_k(&h, &xi, &bullet_k(&h, &eta, &z, cap), cap);
        assert!(l.eq_at(&r, &h, cap));
        // b_K
        for w in &words {
            let x = mk(w);
            let b = b_k(&h, &m1, &x, cap).unwrap();
            assert!(b.eq_at(&b_k_formula(&h, &m1, &x, cap).unwrap(), &h, cap));
            assert!(b_k(&h, &m1, &b, cap).unwrap().expand(&h, cap).is_empty());
        }
    }

    #[test]
    fn obstruction_bicomplex() {
        let alg = GerstAlgebra::example();
        let l = &alg.letters;
        let cap = 4;
        let d = alg.d11().add(&alg.d2());
        assert!(!alg.d11().is_zero() && !alg.d2().is_zero());
        assert!(circ_t(l, &d, &d, cap).unwrap().is_zero());
        let mut g = Gen::new(1);
        for deg in [-1i64, 0, 1] {
            let c = gharrison_part(l, &random_gcochain(l, deg, cap, &[1, 2], &mut g, 0.05), cap);
            let ce = obstruction_diff(&alg, &c, Obstruction::CE, cap).unwrap();
            let ha = obstruction_diff(&alg, &c, Obstruction::Har, cap).unwrap();
            assert!(!ce.is_zero() && !ha.is_zero());
            assert!(obstruction_diff(&alg, &ce, Obstruction::CE, cap).unwrap().is_zero());
            assert!(obstruction_diff(&alg, &ha, Obstruction::Har, cap).unwrap().is_zero());
            let anti = obstruction_diff(&alg, &ce, Obstruction::Har, cap)
                .unwrap()
                .add(&obstruction_diff(&alg, &ha, Obstruction::CE, cap).unwrap());
            assert!(anti.is_zero());
        }
    }

    #[test]
    fn t_composition_pre_lie() {
        let alg = GerstAlgebra::example();
        let l = &alg.letters;
        let mut g = Gen::new(2);
        let h = |c: &GCochain| gharrison_part(l, c, 4);
        for _ in 0..2 {
            let a = h(&random_gcochain(l, 1, 4, &[1, 2], &mut g, 0.05));
            let b = h(&random_gcochain(l, 0, 4, &[1, 2], &mut g, 0.05));
            let c = h(&random_gcochain(l, -1, 4, &[1, 2], &mut g, 0.05));
            assert!(gerstenhaber_defect(|x, y| circ_t(l, x, y, 4), &a, &b, &c).unwrap().is_zero());
        }
    }

    #[test]
    fn har_on_one_column_is_harrison_cobord() {
        let alg = GerstAlgebra::example();
        let l = &alg.letters;
        let mut g = Gen::new(4);
        let d2 = single_column(&alg.d2());
        for deg in [-1i64, 0] {
            let phi = CochainTable::random(l, deg, &[1, 2], &mut g, 0.2).harrison_part(l, 3);
            let ha = obstruction_diff(&alg, &from_single_column(&phi), Obstruction::Har, 3).unwrap();
            let beta = bracket(|a, b| circ_h(l, a, b, 3), &phi, &d2).unwrap();
            assert_eq!(single_column(&ha), beta.scale(&-sign(deg)));
        }
    }

    #[test]
    fn bidegrees() {
        let alg = GerstAlgebra::example();
        let l = &alg.letters;
        let mut g = Gen::new(6);
        for cols in [1usize, 2] {
            let c = gharrison_part(l, &random_gcochain(l, 0, 3, &[cols], &mut g, 0.1), 3);
            let nl = |x: &GWord| gword_letters(x);
            let letters: Vec<usize> = c.table.keys().map(nl).collect();
            for (which, dc) in [(Obstruction::CE, 1), (Obstruction::Har, 0)] {
                let r = obstruction_diff(&alg, &c, which, 4).unwrap();
                for x in r.table.keys() {
                    assert_eq!(x.len(), cols + dc);
                    assert!(letters.contains(&(nl(x) - 1)));
                }
            }
        }
    }

    #[test]
    fn shifted_hochschild_bridge() {
        let a = sp(&[0, 0]);
        let mut m = CochainTable::zero(0);
        m.add_term(vec![0, 0], 0, rint(1));
        m.add_term(vec![0, 1], 1, rint(1));
        m.add_term(vec![1, 0], 1, rint(1));
        let (h, m1) = shift(&a, &m, 1).unwrap();
        let mut g = Gen::new(8);
        for k in 1..=2usize {
            let phi = CochainTable::random(&a, 0, &[k], &mut g, 0.6);
            // Unshifted b with a₀φ(…) first.
            let mut b = CochainTable::zero(0);
            let mul = |x: &Vect, y: &Vect| -> Vect {
                let mut t = Tens::new();
                for (i, c) in x {
                    for (j, d) in y {
                        t.insert(vec![*i, *j], c * d);
                    }
                }
                m.eval(&t)
            };
            let unit = |i: usize| Vect::from([(i, rint(1))]);
            for w in a.words(k + 1) {
                let mut acc = Vect::new();
                let mut put = |v: Vect, s: i64| {
                    for (i, c) in v {
                        add_to(&mut acc, i, c * rint(s));
                    }
                };
                let ev = |ws: &[usize]| phi.value(&ws.to_vec()).cloned().unwrap_or_default();
                put(mul(&unit(w[0]), &ev(&w[1..])), 1);
                for i in 0..k {
                    let mut t = Tens::new();
                    for (j, c) in mul(&unit(w[i]), &unit(w[i + 1])) {
                        let mut u = w[..i].to_vec();
                        u.push(j);
                        u.extend_from_slice(&w[i + 2..]);
                        t.insert(u, c);
                    }
                    put(phi.eval(&t), if i % 2 == 0 { -1 } else { 1 });
                }
                put(mul(&ev(&w[..k]), &unit(w[k])), if k % 2 == 0 { -1 } else { 1 });
                for (i, c) in acc {
                    b.add_term(w.clone(), i, c);
                }
            }
            let (_, b1) = shift(&a, &b, 1).unwrap();
            let (_, phi1) = shift(&a, &phi, 1).unwrap();
            let br = bracket(|x, y| circ_g(&h, x, y, 3), &phi1, &m1).unwrap();
            assert_eq!(b1, br.scale(&sign(k as i64)), "k={k}");
        }
    }

    #[test]
    fn space_json() {
        let s = GradedSpace::new(&[("u", 1), ("v", 0)]).unwrap();
        assert_eq!(GradedSpace::from_json(&s.to_json()).unwrap(), s);
        assert!(GradedSpace::new(&[("u", 1), ("u", 0)]).is_err());
    }
}
