//! Star products: closed forms, order-by-order construction from a
//! Poisson bivector, verification, and an obstructed example.

use cfk::formality::{mc_build, verify_star, BuildOutcome, StarProduct};
use cfk::geometry::{MultiVec, SpaceConfig};
use cfk::ratpoly::{Poly, Var};

fn main() {
    // R^2 with C = {y = 0}, P = ∂y∧∂x.
    let c = SpaceConfig::new(2, 1);
    let p = MultiVec::term(c, vec![2, 1], Poly::one());
    let std = StarProduct::standard_ordered(c, 4);
    println!("standard ordered, N=4: {}", verify_star(&std, &p).to_json());
    let moyal = StarProduct::moyal(c, 2);
    println!("Moyal, N=2:            {}", verify_star(&moyal, &p).to_json());

    match mc_build(&p, 3, true).unwrap() {
        BuildOutcome::Product(s) => println!("built to order {}: passes = {}", s.order(), verify_star(&s, &p).passes()),
        BuildOutcome::Obstruction(o) => println!("obstructed: {}", o.to_json()),
    }

    // Linear structure x ∂x∧∂y with C a point.
    let c = SpaceConfig::new(2, 2);
    let p = MultiVec::term(c, vec![1, 2], c.parse_poly("x").unwrap());
    if let BuildOutcome::Product(s) = mc_build(&p, 2, true).unwrap() {
        println!("x ∂x∧∂y on a point, C_1 = {}", s.c[0].to_json());
    }

    // P = ε_ijk ∂_k h ∂_i∧∂_j is Poisson for any h; this one is adapted to
    // the plane z = 0 but the third-order class does not vanish.
    let c = SpaceConfig::new(3, 1);
    let h = c.parse_poly("x*y + y*z^2").unwrap();
    let d = |i| h.derive(Var::base(i));
    let p = MultiVec::term(c, vec![2, 3], d(1))
        .add(&MultiVec::term(c, vec![3, 1], d(2)))
        .add(&MultiVec::term(c, vec![1, 2], d(3)));
    match mc_build(&p, 3, true).unwrap() {
        BuildOutcome::Product(s) => println!("unexpected product of order {}", s.order()),
        BuildOutcome::Obstruction(o) => println!("obstruction: {}", o.to_json()),
    }
}
