//! Truncated cohomology of the Koszul cochain complexes and of the
//! multidifferential Hochschild complexes G, G_I, G~, next to the
//! dimensions predicted by the HKR-type theorems.

use cfk::geometry::SpaceConfig;
use cfk::koszulbar::{
    hochschild_truncated_cohomology, predicted_dim, predicted_hochschild_dim, truncated_cohomology, BimoduleTag,
    HochschildComplex,
};

fn main() {
    let (d, o) = (1, 2);
    for c in [SpaceConfig::new(2, 1), SpaceConfig::new(3, 2)] {
        println!("n = {}, l = {}, polyDeg ≤ {d}, opOrder ≤ {o}", c.n, c.l);
        for tag in BimoduleTag::ALL {
            let dims: Vec<String> = (0..=c.n)
                .map(|k| {
                    let r = truncated_cohomology(tag, c, k, d, o).unwrap();
                    format!("{}/{}", r.dim, predicted_dim(tag, c, k, d, o))
                })
                .collect();
            println!("  H^k({:>3}) computed/predicted: {}", tag.name(), dims.join("  "));
        }
        for which in [HochschildComplex::G, HochschildComplex::GI, HochschildComplex::GTilde] {
            let dims: Vec<String> = (0..=2)
                .map(|k| {
                    let r = hochschild_truncated_cohomology(which, c, k, d, o).unwrap();
                    format!("{}/{}", r.dim, predicted_hochschild_dim(which, c, k, d, o))
                })
                .collect();
            println!("  H^k({which:?}) computed/predicted: {}", dims.join("  "));
        }
    }
}
