//! Seeded random generators for the verification suites.

use crate::geometry::{MultiVec, SpaceConfig};
use crate::hochschild::{MIdx, PolyDiffOp};
use crate::koszulbar::{subsets, BarChain, KoszulChain};
use crate::ratpoly::{rat, Mono, Poly, Var};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Gen {
    pub rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn coeff(&mut self) -> crate::ratpoly::Rat {
        let num = self.rng.gen_range(1..=4) * if self.rng.gen_bool(0.5) { 1 } else { -1 };
        let den = *[1, 1, 1, 2, 3].choose(&mut self.rng).unwrap();
        rat(num, den)
    }

    /// Random monomial of degree ≤ `deg` in the given variables.
    pub fn mono(&mut self, vars: &[Var], deg: u32) -> Mono {
        let d = self.rng.gen_range(0..=deg);
        let mut pairs = Vec::new();
        for _ in 0..d {
            if vars.is_empty() {
                break;
            }
            pairs.push((*vars.choose(&mut self.rng).unwrap(), 1));
        }
        Mono::from_pairs(pairs)
    }

    pub fn poly_in(&mut self, vars: &[Var], deg: u32, max_terms: usize) -> Poly {
        let t = self.rng.gen_range(1..=max_terms.max(1));
        let mut p = Poly::zero();
        for _ in 0..t {
            let m = self.mono(vars, deg);
            let c = self.coeff();
            p.add_term(m, c);
        }
        p
    }

    pub fn base_poly(&mut self, n: usize, deg: u32) -> Poly {
        let vars: Vec<Var> = (1..=n).map(Var::base).collect();
        self.poly_in(&vars, deg, 3)
    }

    pub fn subset(&mut self, n: usize, k: usize) -> Vec<usize> {
        let mut all: Vec<usize> = (1..=n).collect();
        all.shuffle(&mut self.rng);
        let mut s: Vec<usize> = all.into_iter().take(k).collect();
        s.sort_unstable();
        s
    }

    pub fn multivec(&mut self, c: SpaceConfig, k: usize, deg: u32) -> MultiVec {
        let mut x = MultiVec::zero(c);
        if k > c.n {
            return x;
        }
        for _ in 0..self.rng.gen_range(1..=3) {
            let s = self.subset(c.n, k);
            let f = self.base_poly(c.n, deg);
            x = x.add(&MultiVec::term(c, s, f));
        }
        x
    }

    /// Random adapted multivector: all-transversal coefficients are pushed into `I`.
    pub fn adapted_multivec(&mut self, c: SpaceConfig, k: usize, deg: u32) -> MultiVec {
        let x = self.multivec(c, k, deg);
        let mut out = MultiVec::zero(c);
        for (s, f) in &x.terms {
            let f = if s.iter().all(|&i| c.is_transversal(i)) { f.sub(&c.restrict(f)) } else { f.clone() };
            out = out.add(&MultiVec::term(c, s.clone(), f));
        }
        out
    }

    pub fn midx(&mut self, n: usize, order: u32) -> MIdx {
        let mut m = vec![0u32; n];
        for _ in 0..self.rng.gen_range(0..=order) {
            m[self.rng.gen_range(0..n)] += 1;
        }
        m
    }

    /// Random multidifferential operator with total order ≤ `order`.
    pub fn op(&mut self, c: SpaceConfig, arity: usize, order: u32, deg: u32) -> PolyDiffOp {
        let mut phi = PolyDiffOp::zero(c, arity);
        for _ in 0..self.rng.gen_range(1..=3) {
            let mut left = order;
            let mut idx = Vec::new();
            for _ in 0..arity {
                let m = self.midx(c.n, left);
                left -= m.iter().sum::<u32>();
                idx.push(m);
            }
            idx.shuffle(&mut self.rng);
            let f = self.base_poly(c.n, deg);
            phi.add_term(idx, f);
        }
        phi
    }

    /// Random adapted operator: coefficients of terms whose last slot has a
    /// transversal derivative are pushed into `I`.
    pub fn adapted_op(&mut self, c: SpaceConfig, arity: usize, order: u32, deg: u32) -> PolyDiffOp {
        let phi = self.op(c, arity, order, deg);
        let mut out = PolyDiffOp::zero(c, arity);
        for (idx, f) in &phi.terms {
            let bad = arity == 0 || idx.last().map(|m| c.transversal().any(|i| m[i - 1] > 0)).unwrap_or(false);
            let f = if bad { f.sub(&c.restrict(f)) } else { f.clone() };
            out.add_term(idx.clone(), f);
        }
        out
    }

    /// Element of `A^e ⊗ A^{⊗k}` in the bar complex.
    pub fn bar_chain(&mut self, n: usize, k: usize, deg: u32) -> BarChain {
        let mut vars: Vec<Var> = (1..=n).flat_map(|i| [Var::a(i), Var::b(i)]).collect();
        for p in 1..=k {
            vars.extend((1..=n).map(|i| Var::x(p, i)));
        }
        BarChain::new(n, k, self.poly_in(&vars, deg, 4))
    }

    pub fn koszul_chain(&mut self, n: usize, k: usize, deg: u32) -> KoszulChain {
        let vars: Vec<Var> = (1..=n).flat_map(|i| [Var::a(i), Var::b(i)]).collect();
        let mut w = KoszulChain::zero(n, k);
        for s in subsets(n, k) {
            if self.rng.gen_bool(0.6) {
                w = w.add(&KoszulChain::term(n, &s, self.poly_in(&vars, deg, 3)));
            }
        }
        w
    }
}
