//! Brace operations on the tensor coalgebra: the ●_K product from its
//! closed formula against the coinduced coderivation, and b_K.

use cfk::coalg::{b_k, bullet_k, bullet_k_coinduced, odd_truncated, CochainTable, CochainTensor};
use cfk::gen::Gen;

fn main() {
    // A = K<a>/(a^4), cochains on A₊[1] with m[1] the shifted product.
    let (h, m1) = odd_truncated();
    let cap = 4;
    let mut g = Gen::new(11);
    let phi = CochainTable::random(&h, 0, &[1, 2], &mut g, 0.5);
    let psi = CochainTable::random(&h, 1, &[1, 2], &mut g, 0.5);
    let x = CochainTensor::word(vec![phi.clone()]);
    let y = CochainTensor::word(vec![psi, phi]);

    let direct = bullet_k(&h, &x, &y, cap);
    let coind = bullet_k_coinduced(&h, &x, &y, cap);
    println!("●_K terms: {}", direct.expand(&h, cap).len());
    println!("formula = coinduction : {}", direct.eq_at(&coind, &h, cap));

    let b = b_k(&h, &m1, &x, cap).unwrap();
    let bb = b_k(&h, &m1, &b, cap).unwrap();
    println!("b_K² = 0 : {}", bb.expand(&h, cap).is_empty());
}
