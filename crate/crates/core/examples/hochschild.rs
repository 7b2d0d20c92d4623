//! Multidifferential Hochschild cochains: compositions, the Gerstenhaber
//! bracket, the differential b and the cup product.

use cfk::geometry::SpaceConfig;
use cfk::hochschild::{cup, gerst_bracket, hochschild_b, is_adapted_op, xi_project, btilde, PolyDiffOp};

fn main() {
    let c = SpaceConfig::new(2, 1);
    let f = |s: &str| c.parse_poly(s).unwrap();

    let mu = PolyDiffOp::mu(c);
    let d1 = PolyDiffOp::vector_field(c, 1, f("x*y"));
    let d2 = PolyDiffOp::from_coords(c, &[vec![1], vec![2, 2]], f("y"));

    // A vector field is a derivation, so b kills it.
    println!("b(x y ∂x)       = {}", hochschild_b(&d1).to_json());
    println!("b(φ)            = {}", hochschild_b(&d2).to_json());
    println!("b b(φ) = 0      : {}", hochschild_b(&hochschild_b(&d2)).is_zero());
    println!("[μ, μ]_G = 0    : {}", gerst_bracket(&mu, &mu).is_zero());
    println!("[D, φ]_G        = {}", gerst_bracket(&d1, &d2).to_json());
    println!("D ∪ D           = {}", cup(&d1, &d1).to_json());

    let args = [f("x^2"), f("x*y^3")];
    println!("φ(x², x y³)     = {}", d2.apply(&args));

    // ∂x ⊗ ∂y² ends with a tangential derivative: adapted. With y ∂y it
    // also maps (·, I) into I.
    println!("adapted(φ)      = {}", is_adapted_op(&d2));
    let bad = PolyDiffOp::from_coords(c, &[vec![2]], f("1"));
    println!("adapted(∂y)     = {}", is_adapted_op(&bad));

    // The quotient map onto G/G_I intertwines b with its reduced form.
    assert_eq!(xi_project(&hochschild_b(&bad)), btilde(&xi_project(&bad)));
    println!("Ξ b = b~ Ξ      : ok");
}
