//! Exact sparse linear algebra over Q: rank, kernels, solving, and
//! cohomology of finite cochain complexes.

use crate::ratpoly::Rat;
use num::{One, Zero};
use std::collections::BTreeMap;

/// Sparse vector indexed by column.
pub type SVec = BTreeMap<usize, Rat>;

fn axpy(dst: &mut SVec, c: &Rat, src: &SVec) {
    for (k, v) in src {
        let e = dst.entry(*k).or_insert_with(Rat::zero);
        *e += c * v;
        if e.is_zero() {
            dst.remove(k);
        }
    }
}

/// Incremental row echelon basis: rows kept reduced with distinct pivots
/// (pivot = smallest column index, normalized to 1).
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, SVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis, returning the remainder.
    pub fn reduce(&self, v: &SVec) -> SVec {
        let mut v = v.clone();
        loop {
            let hit = v.iter().find(|(k, _)| self.rows.contains_key(k)).map(|(k, c)| (*k, c.clone()));
            match hit {
                Some((k, c)) => axpy(&mut v, &-c, &self.rows[&k]),
                None => return v,
            }
        }
    }

    /// Adds `v`; returns true if it enlarged the span.
    pub fn insert(&mut self, v: &SVec) -> bool {
        let r = self.reduce(v);
        let Some((&p, c)) = r.iter().next() else {
            return false;
        };
        let inv = Rat::one() / c;
        let r: SVec = r.iter().map(|(k, x)| (*k, x * &inv)).collect();
        self.rows.insert(p, r);
        true
    }

    pub fn contains(&self, v: &SVec) -> bool {
        self.reduce(v).is_empty()
    }
}

pub fn rank(rows: &[SVec]) -> usize {
    let mut e = Echelon::new();
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

/// Solves `Σ_j x_j cols[j] = target`; returns `None` when inconsistent.
pub fn solve(cols: &[SVec], target: &SVec) -> Option<Vec<Rat>> {
    // Track each echelon row as a combination of the input columns.
    let m = cols.len();
    let mut rows: BTreeMap<usize, (SVec, SVec)> = BTreeMap::new();
    let reduce = |rows: &BTreeMap<usize, (SVec, SVec)>, v: &SVec, tag: &mut SVec| {
        let mut v = v.clone();
        loop {
            let hit = v.iter().find(|(k, _)| rows.contains_key(k)).map(|(k, c)| (*k, c.clone()));
            match hit {
                Some((k, c)) => {
                    let (r, t) = &rows[&k];
                    axpy(&mut v, &-c.clone(), r);
                    axpy(tag, &-c, t);
                }
                None => return v,
            }
        }
    };
    for (j, col) in cols.iter().enumerate() {
        let mut tag: SVec = BTreeMap::new();
        tag.insert(j, Rat::one());
        let r = reduce(&rows, col, &mut tag);
        if let Some((&p, c)) = r.iter().next() {
            let inv = Rat::one() / c;
            let r = r.iter().map(|(k, x)| (*k, x * &inv)).collect();
            let tag = tag.iter().map(|(k, x)| (*k, x * &inv)).collect();
            rows.insert(p, (r, tag));
        }
    }
    let mut tag = SVec::new();
    let rem = reduce(&rows, target, &mut tag);
    if !rem.is_empty() {
        return None;
    }
    // target - Σ (combination) = 0, so x = -tag.
    let mut x = vec![Rat::zero(); m];
    for (k, v) in tag {
        x[k] = -v;
    }
    Some(x)
}

/// Basis of `{x : Σ_j x_j cols[j] = 0}`.
pub fn kernel(cols: &[SVec]) -> Vec<SVec> {
    let mut rows: BTreeMap<usize, (SVec, SVec)> = BTreeMap::new();
    let mut out = Vec::new();
    for (j, col) in cols.iter().enumerate() {
        let mut v = col.clone();
        let mut tag: SVec = BTreeMap::new();
        tag.insert(j, Rat::one());
        loop {
            let hit = v.iter().find(|(k, _)| rows.contains_key(k)).map(|(k, c)| (*k, c.clone()));
            match hit {
                Some((k, c)) => {
                    let (r, t) = &rows[&k];
                    axpy(&mut v, &-c.clone(), r);
                    axpy(&mut tag, &-c, t);
                }
                None => break,
            }
        }
        match v.iter().next() {
            Some((&p, c)) => {
                let inv = Rat::one() / c;
                let r = v.iter().map(|(k, x)| (*k, x * &inv)).collect();
                let t = tag.iter().map(|(k, x)| (*k, x * &inv)).collect();
                rows.insert(p, (r, t));
            }
            None => out.push(tag),
        }
    }
    out
}

/// Cohomology of `C^{k-1} -> C^k -> C^{k+1}` given the two differentials as
/// column lists (`d_prev[j]` is the image of the j-th basis vector of C^{k-1}
/// in C^k coordinates, `d_next[j]` the image of the j-th basis vector of C^k).
#[derive(Clone, Debug)]
pub struct CohomologyReport {
    pub dim_cochains: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    pub dim: usize,
    pub representatives: Vec<SVec>,
}

pub fn cohomology(dim_k: usize, d_prev: &[SVec], d_next: &[SVec]) -> CohomologyReport {
    assert_eq!(d_next.len(), dim_k, "one column per cochain basis vector");
    let ker = kernel(d_next);
    let mut img = Echelon::new();
    for c in d_prev {
        img.insert(c);
    }
    let rank_in = img.rank();
    let mut reps = Vec::new();
    for z in &ker {
        if img.insert(z) {
            reps.push(z.clone());
        }
    }
    let rank_out = dim_k - ker.len();
    CohomologyReport {
        dim_cochains: dim_k,
        rank_in,
        rank_out,
        dim: ker.len() - rank_in,
        representatives: reps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::rint;

    fn v(xs: &[(usize, i64)]) -> SVec {
        xs.iter().map(|(k, x)| (*k, rint(*x))).collect()
    }

    #[test]
    fn rank_kernel_solve() {
        let cols = vec![v(&[(0, 1), (1, 2)]), v(&[(0, 2), (1, 4)]), v(&[(1, 1)])];
        assert_eq!(rank(&cols), 2);
        let k = kernel(&cols);
        assert_eq!(k, vec![v(&[(0, -2), (1, 1)])]);
        let x = solve(&cols, &v(&[(0, 3), (1, 7)])).unwrap();
        assert_eq!(x, vec![rint(3), rint(0), rint(1)]);
        assert!(solve(&cols, &v(&[(2, 1)])).is_none());
    }

    #[test]
    fn circle_cohomology() {
        // Simplicial circle: 2 vertices, 2 edges, d0 dual to boundary.
        let d0 = vec![v(&[(0, -1), (1, -1)]), v(&[(0, 1), (1, 1)])];
        let r = cohomology(2, &d0, &[SVec::new(), SVec::new()]);
        assert_eq!(r.dim, 1);
    }
}
