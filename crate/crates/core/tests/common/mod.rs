//! Independent reference implementations used by the integration tests.
//! None of these call into the library routines they are compared against.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeSet;

use itertools::Itertools;
use nicetop::{Bound, Cut, ElemSet, Pattern, Rational};
use rand::Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Every partial order on `0..n`, by testing all `2^(n(n-1))` off-diagonal
/// relations, reduced to isomorphism classes by minimizing over all
/// relabelings.
pub fn brute_force_poset_classes(n: usize) -> BTreeSet<Vec<bool>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|(a, b)| a != b).collect();
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let mut classes = BTreeSet::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let mut r = vec![vec![false; n]; n];
        for (i, x) in r.iter_mut().enumerate() {
            x[i] = true;
        }
        for (bit, &(a, b)) in pairs.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                r[a][b] = true;
            }
        }
        let antisym = (0..n).all(|a| (0..n).all(|b| a == b || !(r[a][b] && r[b][a])));
        let trans = (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| !(r[a][b] && r[b][c]) || r[a][c])));
        if !(antisym && trans) {
            continue;
        }
        let canon = perms
            .iter()
            .map(|p| {
                let mut flat = vec![false; n * n];
                for a in 0..n {
                    for b in 0..n {
                        flat[p[a] * n + p[b]] = r[a][b];
                    }
                }
                flat
            })
            .min()
            .unwrap_or_default();
        classes.insert(canon);
    }
    classes
}

/// The same canonical form for a relation matrix.
pub fn canonical_relation(r: &[Vec<bool>]) -> Vec<bool> {
    let n = r.len();
    (0..n)
        .permutations(n)
        .map(|p| {
            let mut flat = vec![false; n * n];
            for a in 0..n {
                for b in 0..n {
                    flat[p[a] * n + p[b]] = r[a][b];
                }
            }
            flat
        })
        .min()
        .unwrap_or_default()
}

/// Every labeled topology on `0..n` (finite, so Alexandroff), as its sorted
/// list of open sets, found by testing all families of subsets for
/// closure under unions and intersections.
pub fn all_topologies(n: usize) -> Vec<Vec<ElemSet>> {
    let full = (1u64 << n) - 1;
    let middle: Vec<u64> = (1..full).collect();
    let mut out = Vec::new();
    for choice in 0u64..(1u64 << middle.len()) {
        let mut opens: Vec<u64> = vec![0, full];
        if n == 0 {
            opens = vec![0];
        }
        for (bit, &s) in middle.iter().enumerate() {
            if choice >> bit & 1 == 1 {
                opens.push(s);
            }
        }
        let set: BTreeSet<u64> = opens.iter().copied().collect();
        let closed = opens.iter().all(|&a| opens.iter().all(|&b| set.contains(&(a | b)) && set.contains(&(a & b))));
        if closed {
            out.push(set.into_iter().map(ElemSet::from_bits).collect());
        }
    }
    out
}

/// T0: distinct points are told apart by some open set.
pub fn is_t0(n: usize, opens: &[ElemSet]) -> bool {
    (0..n).tuple_combinations().all(|(x, y)| opens.iter().any(|o| o.contains(x) != o.contains(y)))
}

/// Rank over `Q` by Gaussian elimination.
pub fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][c] != q(0, 1)) else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank][c];
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != q(0, 1) {
                let factor = rows[r][c] / p;
                for k in 0..cols {
                    let sub = rows[rank][k] * factor;
                    rows[r][k] -= sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// An element of the ideal, as a power of the uniformizer `2` in the
/// 2-adic model of `v`: the least integer exponent inside the cut.
pub fn ideal_element(c: &Cut) -> Option<Rational> {
    match c {
        Cut::Zero => None,
        Cut::Cut { gamma, bound } => {
            let floor = gamma.floor().to_integer();
            let k = if *bound == Bound::Closed && gamma.is_integer() { floor } else { floor + 1 };
            Some(if k >= 0 { q(1 << k.min(40), 1) } else { q(1, 1 << (-k).min(40)) })
        }
    }
}

/// Vectors `x·E_ij`, `x` ranging over a few elements of `I_ij`, flattened
/// to `n²` coordinates. Their span over `F` is `F·R`.
pub fn pattern_span_vectors(p: &Pattern) -> Vec<Vec<Rational>> {
    let n = p.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if let Some(x) = ideal_element(p.entry(i, j)) {
                for scale in [q(1, 1), q(2, 1), q(-3, 1)] {
                    let mut v = vec![q(0, 1); n * n];
                    v[i * n + j] = x * scale;
                    out.push(v);
                }
            }
        }
    }
    if out.is_empty() {
        out.push(vec![q(0, 1); n * n]);
    }
    out
}

/// A cut with threshold on `(1/den)·ℤ`, `|γ| <= half`.
pub fn random_grid_cut<R: Rng>(rng: &mut R, den: i64, half: i64, zero_weight: f64) -> Cut {
    if rng.gen_bool(zero_weight) {
        return Cut::Zero;
    }
    let k = rng.gen_range(-half * den..=half * den);
    let g = q(k, den);
    if rng.gen_bool(0.5) {
        Cut::closed(g)
    } else {
        Cut::open(g)
    }
}

pub fn random_bound<R: Rng>(rng: &mut R) -> Bound {
    if rng.gen_bool(0.5) {
        Bound::Closed
    } else {
        Bound::Open
    }
}
