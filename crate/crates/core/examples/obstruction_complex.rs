//! Cochains on the cofree Gerstenhaber coalgebra of a small Gerstenhaber
//! algebra, with the differentials D_CE (bracket) and D_Har (product).

use cfk::coalg::{gharrison_part, obstruction_diff, random_gcochain, GerstAlgebra, Obstruction};
use cfk::gen::Gen;

fn main() {
    let alg = GerstAlgebra::example();
    let l = &alg.letters;
    let cap = 3;
    let mut g = Gen::new(3);
    for deg in [-1, 0, 1] {
        let c = gharrison_part(l, &random_gcochain(l, deg, cap, &[1, 2], &mut g, 0.05), cap);
        let d = |x, w| obstruction_diff(&alg, x, w, cap).unwrap();
        let (ce, har) = (d(&c, Obstruction::CE), d(&c, Obstruction::Har));
        println!(
            "degree {deg:>2}: {} entries, D_CE² = 0 {}, D_Har² = 0 {}, anticommute {}",
            c.table.len(),
            d(&ce, Obstruction::CE).is_zero(),
            d(&har, Obstruction::Har).is_zero(),
            d(&ce, Obstruction::Har).add(&d(&har, Obstruction::CE)).is_zero(),
        );
    }
}
