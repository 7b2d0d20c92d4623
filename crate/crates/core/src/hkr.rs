//! HKR maps between multivectors and multidifferential cochains, the adapted
//! variant `ψ^[1]`, and constructive Hochschild primitives.

use crate::geometry::{embed_gtilde, sort_with_sign, GTildeVec, MultiVec};
use crate::hochschild::{
    has_transversal, hochschild_b, is_adapted_op, unit_midx, xi_project, btilde, GTildeOp, MIdx, PolyDiffOp,
};
use crate::koszulbar::{dual_s, permutations, subsets, tuples_of_order};
use crate::linalg::{solve, SVec};
use crate::ratpoly::{factorial, sign, Mono, Poly, Rat};
use num::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, thiserror::Error)]
pub enum HkrError {
    #[error("input is not a Hochschild cocycle")]
    NotACocycle,
    #[error("cocycle has a nonzero HKR class")]
    NotExact(MultiVec),
    #[error("adapted correction failed: {0}")]
    Correction(String),
    #[error("postcondition violated: {0}")]
    Postcondition(String),
}

/// `φ = ψ^[1](harmonic) + b(primitive)`.
#[derive(Clone, Debug)]
pub struct HkrDecomposition {
    pub harmonic: MultiVec,
    pub primitive: PolyDiffOp,
}

/// `1/k! Σ_σ sgn σ ∂_{s_σ(1)} ⊗ … ⊗ ∂_{s_σ(k)}` as index tuples with weights.
fn alternation(n: usize, s: &[usize]) -> Vec<(Vec<MIdx>, Rat)> {
    let w = Rat::one() / factorial(s.len() as u32);
    permutations(s.len())
        .into_iter()
        .map(|(perm, inv)| (perm.iter().map(|&q| unit_midx(n, s[q])).collect(), sign(inv) * &w))
        .collect()
}

/// `ψ_HKR(f ∂_S) = f α(∂_S)`, full antisymmetrization with `1/k!`.
/// Mixed-rank input yields the sum of its components' images, one per arity;
/// the caller picks the rank.
pub fn psi_hkr(x: &MultiVec, k: usize) -> PolyDiffOp {
    let c = x.config;
    let mut out = PolyDiffOp::zero(c, k);
    for (s, f) in x.terms.iter().filter(|(s, _)| s.len() == k) {
        for (key, w) in alternation(c.n, s) {
            out.add_term(key, f.scale(&w));
        }
    }
    out
}

/// `π_HKR`: first-order part, wedged.
pub fn pi_hkr(phi: &PolyDiffOp) -> MultiVec {
    let c = phi.config;
    let mut out = MultiVec::zero(c);
    for (key, f) in &phi.terms {
        let mut idx = Vec::with_capacity(key.len());
        for m in key {
            if m.iter().sum::<u32>() != 1 {
                break;
            }
            idx.push(m.iter().position(|&e| e == 1).unwrap() + 1);
        }
        if idx.len() == key.len() {
            out = out.add(&MultiVec::term(c, idx, f.clone()));
        }
    }
    out
}

/// `ψ^[1]`: each `∂_S` is rewritten as `±∂_{S''} ∧ ∂_{S'}` (transversal block
/// first) and the blocks are antisymmetrized separately.
pub fn psi1(x: &MultiVec, k: usize) -> PolyDiffOp {
    let c = x.config;
    let mut out = PolyDiffOp::zero(c, k);
    for (s, f) in x.terms.iter().filter(|(s, _)| s.len() == k) {
        let trans: Vec<usize> = s.iter().copied().filter(|&i| c.is_transversal(i)).collect();
        let tang: Vec<usize> = s.iter().copied().filter(|&i| !c.is_transversal(i)).collect();
        let reordered: Vec<usize> = trans.iter().chain(tang.iter()).copied().collect();
        let (sg, _) = sort_with_sign(&reordered).unwrap();
        for (k1, w1) in alternation(c.n, &trans) {
            for (k2, w2) in alternation(c.n, &tang) {
                let key: Vec<MIdx> = k1.iter().chain(k2.iter()).cloned().collect();
                out.add_term(key, f.scale(&(&sg * &w1 * &w2)));
            }
        }
    }
    out
}

fn check_cocycle(phi: &PolyDiffOp) -> Result<(), HkrError> {
    if hochschild_b(phi).is_zero() {
        Ok(())
    } else {
        Err(HkrError::NotACocycle)
    }
}

/// `ξ` with `bξ = φ` for a cocycle with vanishing class. Adapted input gets an
/// adapted primitive.
pub fn primitive(phi: &PolyDiffOp) -> Result<PolyDiffOp, HkrError> {
    check_cocycle(phi)?;
    let class = pi_hkr(phi);
    if !class.is_zero() {
        return Err(HkrError::NotExact(class));
    }
    if phi.arity == 0 {
        // No (−1)-cochains: the only exact function is 0, and π(φ) = φ was zero.
        return Ok(PolyDiffOp::zero(phi.config, 0));
    }
    let mut xi = dual_s(phi);
    if is_adapted_op(phi) {
        xi = adapted_correction(&xi)?;
        if !is_adapted_op(&xi) {
            return Err(HkrError::Postcondition("primitive is not adapted".into()));
        }
    }
    if hochschild_b(&xi) != *phi {
        return Err(HkrError::Postcondition("b(primitive) differs from the input".into()));
    }
    Ok(xi)
}

/// Given `ξ` with `bξ ∈ G_I`, returns `ξ − ψ^[1](h) − b(ρ)` with `Ξ` of the result zero,
/// where `Ξξ = Ξψ^[1](h) + b~(Ξρ)` is solved exactly in `G~`.
pub fn adapted_correction(xi: &PolyDiffOp) -> Result<PolyDiffOp, HkrError> {
    let c = xi.config;
    let k = xi.arity;
    let t = xi_project(xi);
    if t.is_zero() {
        return Ok(xi.clone());
    }
    if k == 0 {
        let h = t.terms.get(&Vec::new()).cloned().unwrap_or_default();
        return Ok(xi.sub(&PolyDiffOp::function(c, h)));
    }
    // b~ and Ξψ^[1] act coefficient-wise, so the system splits by tangential monomial.
    let mut by_mono: BTreeMap<Mono, BTreeMap<Vec<MIdx>, Rat>> = BTreeMap::new();
    for (key, p) in &t.terms {
        for (m, coef) in p.terms() {
            by_mono.entry(m.clone()).or_default().insert(key.clone(), coef.clone());
        }
    }
    let orders: BTreeSet<u32> = t.terms.keys().map(|key| key.iter().flatten().sum()).collect();

    // Columns: Ξψ^[1](∂_S) for transversal S, then b~ of unit G~ cochains of arity k−1.
    let trans: Vec<usize> = c.transversal().collect();
    let mut cols: Vec<(Column, BTreeMap<Vec<MIdx>, Rat>)> = Vec::new();
    if k <= trans.len() {
        for s in subsets(trans.len(), k) {
            let s: Vec<usize> = s.iter().map(|&j| trans[j - 1]).collect();
            let img = xi_project(&psi1(&MultiVec::term(c, s.clone(), Poly::one()), k));
            cols.push((Column::Harmonic(s), constant_terms(&img)));
        }
    }
    if k >= 2 {
        for &o in &orders {
            for key in tuples_of_order(c.n, k - 1, o) {
                if !has_transversal(&c, key.last().unwrap()) {
                    continue;
                }
                let mut e = GTildeOp::zero(c, k - 1);
                e.terms.insert(key.clone(), Poly::one());
                cols.push((Column::Rho(key), constant_terms(&btilde(&e))));
            }
        }
    }
    let mut rows: BTreeMap<Vec<MIdx>, usize> = BTreeMap::new();
    for (_, col) in &cols {
        for key in col.keys() {
            let len = rows.len();
            rows.entry(key.clone()).or_insert(len);
        }
    }
    for target in by_mono.values() {
        for key in target.keys() {
            let len = rows.len();
            rows.entry(key.clone()).or_insert(len);
        }
    }
    let to_svec = |m: &BTreeMap<Vec<MIdx>, Rat>| -> SVec { m.iter().map(|(key, v)| (rows[key], v.clone())).collect() };
    let col_vecs: Vec<SVec> = cols.iter().map(|(_, m)| to_svec(m)).collect();

    let mut harmonic = MultiVec::zero(c);
    let mut rho = PolyDiffOp::zero(c, k.saturating_sub(1));
    for (m, target) in &by_mono {
        let x = solve(&col_vecs, &to_svec(target))
            .ok_or_else(|| HkrError::Correction(format!("no solution for coefficient monomial {m:?}")))?;
        let mono = Poly::term(m.clone(), Rat::one());
        for ((col, _), v) in cols.iter().zip(x) {
            if v.is_zero() {
                continue;
            }
            match col {
                Column::Harmonic(s) => harmonic = harmonic.add(&MultiVec::term(c, s.clone(), mono.scale(&v))),
                Column::Rho(key) => rho.add_term(key.clone(), mono.scale(&v)),
            }
        }
    }
    let h = embed_gtilde(&GTildeVec { config: c, terms: harmonic.terms });
    let out = xi.sub(&psi1(&h, k)).sub(&hochschild_b(&rho));
    if !xi_project(&out).is_zero() {
        return Err(HkrError::Correction("Ξ of the corrected cochain is nonzero".into()));
    }
    Ok(out)
}

enum Column {
    Harmonic(Vec<usize>),
    Rho(Vec<MIdx>),
}

fn constant_terms(t: &GTildeOp) -> BTreeMap<Vec<MIdx>, Rat> {
    t.terms
        .iter()
        .filter_map(|(key, p)| {
            let v = p.coeff(&Mono::one());
            (!v.is_zero()).then(|| (key.clone(), v))
        })
        .collect()
}

/// `φ = ψ^[1](π φ) + bξ`.
pub fn decompose(phi: &PolyDiffOp) -> Result<HkrDecomposition, HkrError> {
    check_cocycle(phi)?;
    let harmonic = pi_hkr(phi);
    let rest = phi.sub(&psi1(&harmonic, phi.arity));
    let primitive = primitive(&rest)?;
    Ok(HkrDecomposition { harmonic, primitive })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::Gen;
    use crate::geometry::{is_adapted_mv, schouten, SpaceConfig};
    use crate::hochschild::{cup, gerst_bracket};
    use crate::koszulbar::dual_g;
    use crate::ratpoly::rat;

    fn c21() -> SpaceConfig {
        SpaceConfig::new(2, 1)
    }

    #[test]
    fn psi_examples() {
        let c = c21();
        let x = MultiVec::term(c, vec![1, 2], Poly::one());
        let mut e = PolyDiffOp::zero(c, 2);
        e.add_term(vec![vec![1, 0], vec![0, 1]], Poly::constant(rat(1, 2)));
        e.add_term(vec![vec![0, 1], vec![1, 0]], Poly::constant(rat(-1, 2)));
        assert_eq!(psi_hkr(&x, 2), e);
        let mut e1 = PolyDiffOp::zero(c, 2);
        e1.add_term(vec![vec![0, 1], vec![1, 0]], Poly::int(-1));
        assert_eq!(psi1(&x, 2), e1);
        assert_eq!(pi_hkr(&e1), x);
    }

    #[test]
    fn hkr_identities() {
        let mut g = Gen::new(9);
        for (n, l) in [(2, 1), (3, 1), (3, 2)] {
            let c = SpaceConfig::new(n, l);
            for k in 0..=3 {
                let x = g.multivec(c, k, 2);
                assert_eq!(psi_hkr(&x, k), dual_g(&x, k));
                assert_eq!(pi_hkr(&psi_hkr(&x, k)), x);
                assert_eq!(pi_hkr(&psi1(&x, k)), x);
                assert!(hochschild_b(&psi1(&x, k)).is_zero());
                let y = g.adapted_multivec(c, k, 2);
                assert!(is_adapted_op(&psi1(&y, k)));
            }
        }
    }

    #[test]
    fn primitive_round_trip() {
        let mut g = Gen::new(4);
        let c = c21();
        for arity in 0..=2 {
            let eta = g.adapted_op(c, arity, 2, 2);
            let phi = hochschild_b(&eta);
            let xi = primitive(&phi).unwrap();
            assert_eq!(hochschild_b(&xi), phi);
            assert!(is_adapted_op(&xi));
        }
        let y_dy = PolyDiffOp::vector_field(c, 2, Poly::var(crate::ratpoly::Var::base(2)));
        let phi = hochschild_b(&y_dy);
        assert_eq!(hochschild_b(&primitive(&phi).unwrap()), phi);
        let harm = psi_hkr(&MultiVec::term(c, vec![1, 2], Poly::one()), 2);
        assert!(matches!(primitive(&harm), Err(HkrError::NotExact(_))));
    }

    #[test]
    fn bracket_goes_to_opposite_schouten() {
        let c = SpaceConfig::new(2, 0);
        let f = MultiVec::function(c, c.parse_poly("x").unwrap());
        let p = MultiVec::term(c, vec![1, 2], Poly::one());
        let g = pi_hkr(&gerst_bracket(&psi1(&f, 0), &psi1(&p, 2)));
        assert_eq!(g, MultiVec::term(c, vec![2], Poly::one()));
        // [x, ∂x∧∂y]_S = −∂y, so the two even ranks pick up a sign
        assert_eq!(schouten(&f, &p), g.scale(&rat(-1, 1)));
        assert_eq!(schouten(&p, &f), g.scale(&rat(-1, 1)));
    }

    #[test]
    fn bracket_defect() {
        let c = c21();
        let x = MultiVec::term(c, vec![1, 2], Poly::one());
        let y = MultiVec::term(c, vec![2], Poly::var(crate::ratpoly::Var::base(2)));
        assert!(is_adapted_mv(&y));
        let px = psi1(&x, 2);
        let py = psi1(&y, 1);
        let s = schouten(&x, &y);
        let defect = gerst_bracket(&px, &py).sub(&psi1(&s, 2));
        let d = decompose(&defect).unwrap();
        assert!(d.harmonic.is_zero());
        assert!(is_adapted_op(&d.primitive));
        assert_eq!(hochschild_b(&d.primitive), defect);
        let xy = psi1(&crate::geometry::wedge(&x, &y), 3);
        let literal = cup(&px, &py).sub(&cup(&py, &px)).sub(&xy);
        assert_eq!(pi_hkr(&literal), crate::geometry::wedge(&x, &y).scale(&rat(-1, 1)));
        for defect in [cup(&px, &py).sub(&xy), cup(&px, &py).sub(&cup(&py, &px))] {
            let d = decompose(&defect).unwrap();
            assert!(d.harmonic.is_zero());
            assert_eq!(hochschild_b(&d.primitive), defect);
        }
    }
}
