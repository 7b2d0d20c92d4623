//! Multivector fields on R^3 with the last coordinate transversal:
//! wedge, Schouten bracket, and the adaptedness test.

use cfk::geometry::{interior, is_adapted_mv, lie_derivative, schouten, wedge, DiffForm, MultiVec, SpaceConfig};
use cfk::ratpoly::sign;

fn main() {
    let c = SpaceConfig::new(3, 1);
    let f = |s: &str| c.parse_poly(s).unwrap();

    let v = MultiVec::term(c, vec![1], f("y"));
    let w = MultiVec::term(c, vec![2], f("x*z"));
    let p = MultiVec::term(c, vec![1, 2], f("z"));

    // On vector fields the bracket is the Lie bracket.
    println!("[v,w]    = {}", schouten(&v, &w).to_json());
    println!("v ∧ w    = {}", wedge(&v, &w).to_json());
    println!("[P,P]    = {}", schouten(&p, &p).to_json());

    // ∂1∧∂2 has no transversal index, z ∂3 has its coefficient in I = <z>.
    for (name, x) in [("z ∂1∧∂2", &p), ("∂3", &MultiVec::term(c, vec![3], f("1"))), ("z ∂3", &MultiVec::term(c, vec![3], f("z")))] {
        println!("adapted({name}) = {}", is_adapted_mv(x));
    }

    // Cartan: [L_v, i_P] = i_[v,P].
    let alpha = DiffForm::term(c, vec![1, 3], f("x^2 + y"));
    let lhs = lie_derivative(&v, &interior(&p, &alpha)).sub(&interior(&p, &lie_derivative(&v, &alpha)).scale(&sign(0)));
    assert_eq!(lhs, interior(&schouten(&v, &p), &alpha));
    println!("[L_v, i_P] α = i_[v,P] α  ok");
}
