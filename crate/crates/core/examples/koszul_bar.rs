//! Bar and Koszul resolutions of A = Q[x1, x2] with the comparison maps
//! F, G and the contracting homotopies.

use cfk::koszulbar::{del_h, del_k, f_map, g_map, h_k, s_h, theta, BarChain, KoszulChain};
use cfk::ratpoly::{Poly, Var};

fn main() {
    let n = 2;
    // Koszul 1-chain: 1 ⊗ e1 in A ⊗ Λ R^2 ⊗ A.
    let w = KoszulChain::term(n, &[1], Poly::one());
    let fw = f_map(&w);
    println!("F(e1)        = {}", fw.value);
    println!("G F(e1) = e1 : {}", g_map(&fw) == w);
    println!("∂_H F = F ∂_K: {}", del_h(&fw) == f_map(&del_k(&w)));

    // Bar 1-chain with value a polynomial in the three tensor slots.
    let v = Poly::var(Var::x(1, 1)).mul(&Poly::var(Var::x(1, 2)));
    let phi = BarChain::new(n, 1, v);
    println!("∂_H φ        = {}", del_h(&phi).value);
    let th = theta(&phi);
    let rhs = del_h(&s_h(&phi)).add(&s_h(&del_h(&phi)));
    println!("φ - Θφ = ∂s + s∂ : {}", phi.sub(&th) == rhs);
    println!("Θ² = Θ       : {}", theta(&th) == th);

    let z = KoszulChain::term(n, &[], Poly::var(Var::b(2)));
    println!("h_K(b2)      = {:?}", h_k(&z));
}
