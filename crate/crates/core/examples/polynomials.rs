//! Exact rational polynomials: parsing, arithmetic, derivatives and JSON.

use cfk::ratpoly::{rat, Poly, Var};

fn main() {
    let p = Poly::parse("x1^2*x2 - 1/3*x2 + 2").unwrap();
    let q = Poly::parse("x1 + x2").unwrap();
    println!("p       = {p}");
    println!("p*q     = {}", p.mul(&q));
    println!("d/dx1 p = {}", p.derive(Var::base(1)));
    println!("q^3     = {}", q.pow(3));
    println!("p/2     = {}", p.scale(&rat(1, 2)));

    // Restricting to x2 = 0 kills the ideal generated by x2.
    println!("p|x2=0  = {}", p.restrict_zero(|v| v == Var::base(2)));

    let json = p.to_json();
    println!("json    = {json}");
    assert_eq!(Poly::from_json(&json).unwrap(), p);
}
