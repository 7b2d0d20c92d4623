//! HKR maps between multivectors and cochains, and the constructive
//! splitting of a cocycle into harmonic part plus coboundary.

use cfk::geometry::{MultiVec, SpaceConfig};
use cfk::hkr::{decompose, pi_hkr, primitive, psi1, psi_hkr};
use cfk::hochschild::{hochschild_b, is_adapted_op, PolyDiffOp};

fn main() {
    let c = SpaceConfig::new(2, 1);
    let f = |s: &str| c.parse_poly(s).unwrap();
    let x = MultiVec::term(c, vec![1, 2], f("y"));

    let a = psi_hkr(&x, 2);
    let a1 = psi1(&x, 2);
    println!("ψ(y ∂x∧∂y)    = {}", a.to_json());
    println!("ψ¹(y ∂x∧∂y)   = {}", a1.to_json());
    println!("π ψ¹ = id     : {}", pi_hkr(&a1) == x);
    println!("ψ¹ adapted    : {}  (ψ: {})", is_adapted_op(&a1), is_adapted_op(&a));

    // A cocycle that is a multivector image plus a coboundary.
    let eta = PolyDiffOp::from_coords(c, &[vec![1, 1]], f("x*y"));
    let phi = a1.add(&hochschild_b(&eta));
    let dec = decompose(&phi).unwrap();
    println!("harmonic      = {}", dec.harmonic.to_json());
    assert_eq!(psi1(&dec.harmonic, 2).add(&hochschild_b(&dec.primitive)), phi);

    let xi = primitive(&hochschild_b(&eta)).unwrap();
    println!("primitive     = {}", xi.to_json());
    println!("b ξ = b η     : {}", hochschild_b(&xi) == hochschild_b(&eta));
}
