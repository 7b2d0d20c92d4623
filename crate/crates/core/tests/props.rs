use cfk::gen::Gen;
use cfk::geometry::{is_adapted_mv, schouten, wedge, MultiVec, SpaceConfig};
use cfk::hkr::{pi_hkr, psi1};
use cfk::hochschild::{gerst_bracket, hochschild_b, is_adapted_op, PolyDiffOp};
use cfk::ratpoly::{sign, Poly, Var};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let (p, q, r) = (g.base_poly(3, 3), g.base_poly(3, 2), g.base_poly(2, 2));
        prop_assert_eq!(p.mul(&q.add(&r)), p.mul(&q).add(&p.mul(&r)));
        prop_assert_eq!(p.mul(&q).mul(&r), p.mul(&q.mul(&r)));
        prop_assert!(p.sub(&p).is_zero());
        let v = Var::base(1);
        prop_assert_eq!(p.mul(&q).derive(v), p.derive(v).mul(&q).add(&p.mul(&q.derive(v))));
        prop_assert_eq!(Poly::from_json(&p.to_json()).unwrap(), p.clone());
        prop_assert_eq!(Poly::parse(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn schouten_is_graded_lie(seed in any::<u64>(), a in 0usize..3, b in 0usize..3, d in 0usize..3) {
        let c = SpaceConfig::new(3, 2);
        let mut g = Gen::new(seed);
        let (x, y, z) = (g.multivec(c, a, 2), g.multivec(c, b, 2), g.multivec(c, d, 1));
        let e = sign((a as i64 - 1) * (b as i64 - 1));
        prop_assert!(schouten(&x, &y).add(&schouten(&y, &x).scale(&e)).is_zero());
        let jac = schouten(&x, &schouten(&y, &z))
            .sub(&schouten(&schouten(&x, &y), &z))
            .sub(&schouten(&y, &schouten(&x, &z)).scale(&e));
        prop_assert!(jac.is_zero());
        prop_assert_eq!(MultiVec::from_json(&x.to_json()).unwrap(), x);
    }

    #[test]
    fn adapted_fields_close(seed in any::<u64>(), a in 0usize..3, b in 0usize..3) {
        let c = SpaceConfig::new(3, 1);
        let mut g = Gen::new(seed);
        let (x, y) = (g.adapted_multivec(c, a, 2), g.adapted_multivec(c, b, 2));
        prop_assert!(is_adapted_mv(&schouten(&x, &y)));
        prop_assert!(is_adapted_mv(&wedge(&x, &y)));
        let px = psi1(&x, a);
        prop_assert!(is_adapted_op(&px));
        prop_assert!(hochschild_b(&px).is_zero());
        prop_assert_eq!(pi_hkr(&px), x);
    }

    #[test]
    fn hochschild_b_squares_to_zero(seed in any::<u64>(), k in 0usize..3) {
        let c = SpaceConfig::new(2, 1);
        let mut g = Gen::new(seed);
        let phi = g.op(c, k, 2, 2);
        prop_assert!(hochschild_b(&hochschild_b(&phi)).is_zero());
        let mu = PolyDiffOp::mu(c);
        prop_assert_eq!(hochschild_b(&phi), gerst_bracket(&phi, &mu).scale(&sign(1)));
        prop_assert_eq!(PolyDiffOp::from_json(&phi.to_json(), None).unwrap(), phi);
    }
}
