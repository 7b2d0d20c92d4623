//! Transferred L∞ structure on adapted multivectors by perturbation along
//! the HKR splitting. The binary bracket is the Schouten bracket in the
//! opposite convention; the ternary one and the relations are checked.

use cfk::formality::perturb;
use cfk::geometry::{schouten, MultiVec, SpaceConfig};
use cfk::ratpoly::rint;

fn main() {
    let c = SpaceConfig::new(2, 1);
    let f = |s: &str| c.parse_poly(s).unwrap();
    let t = perturb(c, 3).unwrap();

    let x = MultiVec::term(c, vec![1], f("x*y"));
    let y = MultiVec::term(c, vec![1, 2], f("x^2"));
    let z = MultiVec::term(c, vec![2], f("y^2"));

    let b2 = t.bracket2(&x, &y).unwrap();
    println!("ℓ2(x, y)   = {}", b2.to_json());
    assert_eq!(b2, schouten(&y, &x).scale(&-rint(1)));

    println!("d'(x,y,z)  = {}", t.d_prime(&[x.clone(), y.clone(), z.clone()]).unwrap().to_json());
    println!("L∞ defect  = 0 : {}", t.linf_defect(&[x.clone(), y.clone(), z.clone()]).unwrap().is_zero());
    println!("morphism   = 0 : {}", t.morphism_defect(&[x, y, z]).unwrap().is_zero());
}
