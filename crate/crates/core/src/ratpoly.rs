//! Exact rationals and sparse multivariate polynomials.
//!
//! Variables live in named slots so the same polynomial type can model
//! functions on `R^n` as well as chains on `R^{(k+2)n}` (the `a`, `x_p`, `b`
//! blocks of the bar complex) and the simplex parameters `t_j`.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `(-1)^e` as a rational.
pub fn sign(e: i64) -> Rat {
    if e.rem_euclid(2) == 0 {
        Rat::one()
    } else {
        -Rat::one()
    }
}

pub fn factorial(n: u32) -> Rat {
    let mut r = BigInt::one();
    for i in 2..=n {
        r *= i;
    }
    Rat::from_integer(r)
}

pub fn binomial(n: u32, k: u32) -> Rat {
    if k > n {
        return Rat::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Base,
    A,
    B,
    X(u16),
    T(u16),
    Aux(u16),
    /// Momentum variable of an operator symbol.
    P,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub slot: Slot,
    pub coord: u16,
}

impl Var {
    pub fn base(i: usize) -> Var {
        Var { slot: Slot::Base, coord: i as u16 }
    }
    pub fn a(i: usize) -> Var {
        Var { slot: Slot::A, coord: i as u16 }
    }
    pub fn b(i: usize) -> Var {
        Var { slot: Slot::B, coord: i as u16 }
    }
    pub fn x(p: usize, i: usize) -> Var {
        Var { slot: Slot::X(p as u16), coord: i as u16 }
    }
    pub fn t(j: usize) -> Var {
        Var { slot: Slot::T(j as u16), coord: 0 }
    }
    pub fn p(i: usize) -> Var {
        Var { slot: Slot::P, coord: i as u16 }
    }
    pub fn aux(j: usize, i: usize) -> Var {
        Var { slot: Slot::Aux(j as u16), coord: i as u16 }
    }

    pub fn name(&self) -> String {
        match self.slot {
            Slot::Base => format!("x{}", self.coord),
            Slot::A => format!("a{}", self.coord),
            Slot::B => format!("b{}", self.coord),
            Slot::X(p) => format!("u{}_{}", p, self.coord),
            Slot::T(j) => format!("t{}", j),
            Slot::Aux(j) => format!("w{}_{}", j, self.coord),
            Slot::P => format!("p{}", self.coord),
        }
    }

    /// Inverse of [`Var::name`].
    pub fn from_name(s: &str) -> Option<Var> {
        let num = |t: &str| t.parse::<u16>().ok();
        let pair = |t: &str| {
            let (l, r) = t.split_once('_')?;
            Some((num(l)?, num(r)?))
        };
        let (head, rest) = s.split_at(s.chars().next()?.len_utf8());
        match head {
            "x" => Some(Var { slot: Slot::Base, coord: num(rest)? }),
            "a" => Some(Var { slot: Slot::A, coord: num(rest)? }),
            "b" => Some(Var { slot: Slot::B, coord: num(rest)? }),
            "p" => Some(Var { slot: Slot::P, coord: num(rest)? }),
            "t" => Some(Var { slot: Slot::T(num(rest)?), coord: 0 }),
            "u" => pair(rest).map(|(p, i)| Var { slot: Slot::X(p), coord: i }),
            "w" => pair(rest).map(|(p, i)| Var { slot: Slot::Aux(p), coord: i }),
            _ => None,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A monomial: variables in increasing order with positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Mono(pub Vec<(Var, u32)>);

impl Mono {
    pub fn one() -> Mono {
        Mono(Vec::new())
    }

    pub fn var(v: Var, e: u32) -> Mono {
        if e == 0 {
            Mono::one()
        } else {
            Mono(vec![(v, e)])
        }
    }

    pub fn from_pairs(mut pairs: Vec<(Var, u32)>) -> Mono {
        pairs.sort();
        let mut out: Vec<(Var, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            if e == 0 {
                continue;
            }
            match out.last_mut() {
                Some((w, f)) if *w == v => *f += e,
                _ => out.push((v, e)),
            }
        }
        Mono(out)
    }

    pub fn exp(&self, v: Var) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(&v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Mono(out)
    }

    /// Monomial with `v` removed, together with the removed exponent.
    pub fn split_off(&self, v: Var) -> (Mono, u32) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|(w, f)| {
                if *w == v {
                    e = *f;
                    false
                } else {
                    true
                }
            })
            .copied()
            .collect();
        (Mono(rest), e)
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.iter().map(|(v, _)| *v)
    }
}

/// Sparse polynomial with rational coefficients; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Mono, Rat>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn one() -> Poly {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Poly {
        Poly::term(Mono::one(), c)
    }

    pub fn int(c: i64) -> Poly {
        Poly::constant(rint(c))
    }

    pub fn var(v: Var) -> Poly {
        Poly::term(Mono::var(v, 1), Rat::one())
    }

    pub fn term(m: Mono, c: Rat) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Rat)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Mono, Rat)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, m: &Mono) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// Constant term, if the polynomial is a constant.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&Mono::one()).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Mono, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Poly, c: &Rat) {
        if c.is_zero() {
            return;
        }
        for (m, d) in &other.terms {
            self.add_term(m.clone(), d * c);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn mul_mono(&self, m: &Mono, c: &Rat) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            out.add_term(m1.mul(m), c1 * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn derive(&self, v: Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (rest, e) = m.split_off(v);
            if e > 0 {
                out.add_term(rest.mul(&Mono::var(v, e - 1)), c * rint(e as i64));
            }
        }
        out
    }

    /// Iterated derivative `∂_v^e`.
    pub fn derive_n(&self, v: Var, e: u32) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (rest, f) = m.split_off(v);
            if f >= e {
                let mut k = BigInt::one();
                for i in 0..e {
                    k *= f - i;
                }
                out.add_term(rest.mul(&Mono::var(v, f - e)), c * Rat::from_integer(k));
            }
        }
        out
    }

    /// Simultaneous substitution; unbound variables are kept.
    pub fn substitute(&self, bindings: &BTreeMap<Var, Poly>) -> Poly {
        let mut cache: BTreeMap<(Var, u32), Poly> = BTreeMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut kept = Vec::new();
            let mut acc = Poly::constant(c.clone());
            for &(v, e) in &m.0 {
                match bindings.get(&v) {
                    Some(p) => {
                        let pe = cache.entry((v, e)).or_insert_with(|| p.pow(e));
                        acc = acc.mul(pe);
                        if acc.is_zero() {
                            break;
                        }
                    }
                    None => kept.push((v, e)),
                }
            }
            if acc.is_zero() {
                continue;
            }
            let km = Mono(kept);
            for (m2, c2) in acc.terms {
                out.add_term(m2.mul(&km), c2);
            }
        }
        out
    }

    /// Variable renaming; collisions are merged.
    pub fn rename(&self, f: impl Fn(Var) -> Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let m2 = Mono::from_pairs(m.0.iter().map(|&(v, e)| (f(v), e)).collect());
            out.add_term(m2, c.clone());
        }
        out
    }

    /// Sets every variable matching `pred` to zero.
    pub fn restrict_zero(&self, pred: impl Fn(Var) -> bool) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| !m.vars().any(&pred))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// `∫_lo^hi p dv`, with `lo`, `hi` free of `v`.
    pub fn integrate(&self, v: Var, lo: &Poly, hi: &Poly) -> Poly {
        let mut anti = Poly::zero();
        for (m, c) in &self.terms {
            let (rest, e) = m.split_off(v);
            anti.add_term(rest.mul(&Mono::var(v, e + 1)), c / rint(e as i64 + 1));
        }
        let at = |p: &Poly| {
            let mut b = BTreeMap::new();
            b.insert(v, p.clone());
            anti.substitute(&b)
        };
        at(hi).sub(&at(lo))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Degree counted only on variables matching `pred`.
    pub fn degree_in(&self, pred: impl Fn(Var) -> bool) -> u32 {
        self.terms
            .keys()
            .map(|m| m.0.iter().filter(|(v, _)| pred(*v)).map(|(_, e)| e).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn uses(&self, pred: impl Fn(Var) -> bool) -> bool {
        self.terms.keys().any(|m| m.vars().any(&pred))
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.terms.keys().flat_map(|m| m.vars()).collect();
        vs.sort();
        vs.dedup();
        vs
    }

    /// Groups terms by the part of the monomial in variables matching `pred`.
    pub fn split_by(&self, pred: impl Fn(Var) -> bool) -> BTreeMap<Mono, Poly> {
        let mut out: BTreeMap<Mono, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (sel, rest): (Vec<_>, Vec<_>) = m.0.iter().partition(|(v, _)| pred(*v));
            out.entry(Mono(sel)).or_default().add_term(Mono(rest), c.clone());
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::{json, Map, Value};
        let monos: Vec<Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut exps = Map::new();
                for (v, e) in &m.0 {
                    exps.insert(v.name(), json!(e));
                }
                json!({"exps": exps, "num": int_json(c.numer()), "den": int_json(c.denom())})
            })
            .collect();
        json!({ "monomials": monos })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Poly, String> {
        let monos = v
            .get("monomials")
            .and_then(|m| m.as_array())
            .ok_or("polynomial: missing \"monomials\" array")?;
        let mut out = Poly::zero();
        for t in monos {
            let exps = t.get("exps").and_then(|e| e.as_object()).ok_or("monomial: missing \"exps\"")?;
            let mut pairs = Vec::new();
            for (name, e) in exps {
                let var = Var::from_name(name).ok_or_else(|| format!("unknown variable {name:?}"))?;
                let e = e.as_u64().ok_or("exponent must be a non-negative integer")?;
                pairs.push((var, e as u32));
            }
            let num = json_int(t.get("num").ok_or("monomial: missing \"num\"")?)?;
            let den = match t.get("den") {
                Some(d) => json_int(d)?,
                None => BigInt::one(),
            };
            if den.is_zero() {
                return Err("zero denominator".into());
            }
            out.add_term(Mono::from_pairs(pairs), Rat::new(num, den));
        }
        Ok(out)
    }

    /// Parses strings such as `-3/2*x1^2*x2 + a1 - 1/2`.
    pub fn parse(s: &str) -> Result<Poly, String> {
        Poly::parse_with(s, |name| Var::from_name(name))
    }

    /// Like [`Poly::parse`] with a custom variable resolver.
    pub fn parse_with(s: &str, resolve: impl Fn(&str) -> Option<Var>) -> Result<Poly, String> {
        let cleaned: String = s.replace('−', "-").chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err("empty polynomial".into());
        }
        let mut out = Poly::zero();
        let mut chunks: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for (i, ch) in cleaned.chars().enumerate() {
            if (ch == '+' || ch == '-') && !(i > 0 && cleaned[..i].ends_with('^')) {
                if !cur.is_empty() {
                    chunks.push((neg, std::mem::take(&mut cur)));
                } else if i > 0 {
                    return Err(format!("dangling sign in {s:?}"));
                }
                neg = ch == '-';
            } else {
                cur.push(ch);
            }
        }
        if cur.is_empty() {
            return Err(format!("dangling sign in {s:?}"));
        }
        chunks.push((neg, cur));
        for (neg, chunk) in chunks {
            let mut coeff = Rat::one();
            let mut pairs = Vec::new();
            for factor in chunk.split('*') {
                if factor.is_empty() {
                    return Err(format!("empty factor in {s:?}"));
                }
                if factor.chars().next().unwrap().is_ascii_digit() {
                    coeff *= parse_rat(factor)?;
                } else {
                    let (name, e) = match factor.split_once('^') {
                        Some((n, e)) => (n, e.parse::<u32>().map_err(|_| format!("bad exponent in {factor:?}"))?),
                        None => (factor, 1),
                    };
                    let v = resolve(name).ok_or_else(|| format!("unknown variable {name:?}"))?;
                    pairs.push((v, e));
                }
            }
            if neg {
                coeff = -coeff;
            }
            out.add_term(Mono::from_pairs(pairs), coeff);
        }
        Ok(out)
    }
}

fn parse_rat(s: &str) -> Result<Rat, String> {
    let bad = || format!("bad number {s:?}");
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

fn int_json(n: &BigInt) -> serde_json::Value {
    match n.to_i64() {
        Some(i) => serde_json::Value::from(i),
        None => serde_json::Value::from(n.to_string()),
    }
}

fn json_int(v: &serde_json::Value) -> Result<BigInt, String> {
    if let Some(i) = v.as_i64() {
        return Ok(BigInt::from(i));
    }
    v.as_str()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| format!("expected integer, got {v}"))
}

pub fn rat_to_json(r: &Rat) -> serde_json::Value {
    serde_json::json!({"num": int_json(r.numer()), "den": int_json(r.denom())})
}

pub fn rat_from_json(v: &serde_json::Value) -> Result<Rat, String> {
    let num = json_int(v.get("num").ok_or("missing num")?)?;
    let den = json_int(v.get("den").ok_or("missing den")?)?;
    if den.is_zero() {
        return Err("zero denominator".into());
    }
    Ok(Rat::new(num, den))
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let mut parts = Vec::new();
            if !a.is_one() || m.0.is_empty() {
                parts.push(a.to_string());
            }
            for (v, e) in &m.0 {
                parts.push(if *e == 1 { v.name() } else { format!("{}^{}", v.name(), e) });
            }
            f.write_str(&parts.join("*"))?;
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        Poly::add(self, o)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        Poly::sub(self, o)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        Poly::mul(self, o)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        Poly::parse(s).unwrap()
    }

    #[test]
    fn ring_basics() {
        assert_eq!(&p("x1+x2") + &p("x1-x2"), p("2*x1"));
        assert_eq!(&p("x1") * &p("x1"), p("x1^2"));
        assert!((&Poly::zero() * &p("x1+3")).is_zero());
    }

    #[test]
    fn derivative() {
        assert_eq!(p("x1^2*x2").derive(Var::base(1)), p("2*x1*x2"));
        assert!(p("3").derive(Var::base(2)).is_zero());
        assert_eq!(p("x1^3*x2").derive_n(Var::base(1), 2), p("6*x1*x2"));
    }

    #[test]
    fn substitution() {
        let mut b = BTreeMap::new();
        b.insert(Var::x(1, 1), Poly::var(Var::a(1)));
        assert!(p("u1_1-a1").substitute(&b).is_zero());
        assert_eq!(p("u1_1*b1").substitute(&b), p("a1*b1"));
        assert_eq!(p("x1*x2+1").substitute(&BTreeMap::new()), p("x1*x2+1"));
    }

    #[test]
    fn integrals() {
        let t1 = Var::t(1);
        assert_eq!(p("t1").integrate(t1, &Poly::zero(), &Poly::one()), p("1/2"));
        assert_eq!(p("t2").integrate(Var::t(2), &Poly::zero(), &p("t1")), p("1/2*t1^2"));
        assert_eq!(p("a1 + t1*b1 - t1*a1").integrate(t1, &Poly::zero(), &Poly::one()), p("1/2*a1+1/2*b1"));
    }

    #[test]
    fn text_round_trip() {
        let q = p("-3/2*x1^2*x2 + 7*a2*u1_3 - t2 + 5");
        assert_eq!(Poly::from_json(&q.to_json()).unwrap(), q);
        assert_eq!(p(&q.to_string()), q);
        assert!(Poly::parse("x1+").is_err());
        assert!(Poly::parse("q7").is_err());
    }
}
