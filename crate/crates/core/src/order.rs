//! Finite posets, bitset element sets and intersection-closed set families.
//!
//! Everything here is finite and positional: points are `0..n` and sets of
//! points are [`ElemSet`] bitmasks. Models are capped at [`MAX_POINTS`]
//! points, which is far beyond what the exhaustive sweeps ever touch.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Hard upper bound on the number of points in any finite model.
pub const MAX_POINTS: usize = 64;

/// Default cap for [`enumerate_posets`].
pub const DEFAULT_POSET_CAP: usize = 6;
/// Hard limit for poset enumeration; beyond this the labeled search explodes.
pub const HARD_POSET_CAP: usize = 7;
/// Largest ground set accepted by [`enumerate_nice_families`].
pub const MAX_FAMILY_GROUND: usize = 5;
/// Largest member count accepted by [`enumerate_nice_families`].
pub const MAX_FAMILY_MEMBERS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderError {
    #[error("relation is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("{n} points exceeds the limit of {MAX_POINTS}")]
    TooLarge { n: usize },
    #[error("reflexivity fails at ({0}, {1})")]
    ReflexivityViolation(usize, usize),
    #[error("antisymmetry fails at ({0}, {1})")]
    AntisymmetryViolation(usize, usize),
    #[error("transitivity fails at ({0}, {1})")]
    TransitivityViolation(usize, usize),
    #[error("{what} = {requested} exceeds cap {cap}")]
    CapExceeded { what: &'static str, requested: usize, cap: usize },
    #[error("index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("members {left} and {right} intersect outside the family")]
    NotIntersectionClosed { left: usize, right: usize },
    #[error("member {0} is listed twice")]
    DuplicateMember(usize),
    #[error("family has no members")]
    EmptyFamily,
}

/// A set of points `< 64`, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ElemSet(u64);

impl ElemSet {
    pub const EMPTY: ElemSet = ElemSet(0);

    /// All of `0..n`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_POINTS);
        if n == MAX_POINTS {
            ElemSet(u64::MAX)
        } else {
            ElemSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(x: usize) -> Self {
        assert!(x < MAX_POINTS);
        ElemSet(1u64 << x)
    }

    pub const fn from_bits(bits: u64) -> Self {
        ElemSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, x: usize) -> bool {
        x < MAX_POINTS && self.0 >> x & 1 == 1
    }

    pub fn insert(&mut self, x: usize) {
        assert!(x < MAX_POINTS);
        self.0 |= 1u64 << x;
    }

    pub fn remove(&mut self, x: usize) {
        if x < MAX_POINTS {
            self.0 &= !(1u64 << x);
        }
    }

    pub fn with(mut self, x: usize) -> Self {
        self.insert(x);
        self
    }

    pub fn without(mut self, x: usize) -> Self {
        self.remove(x);
        self
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        ElemSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        ElemSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        ElemSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_superset(self, other: Self) -> bool {
        other.is_subset(self)
    }

    /// Smallest element, if any.
    pub fn first(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    /// Largest index that may appear in the set, plus one.
    pub fn bound(self) -> usize {
        MAX_POINTS - self.0.leading_zeros() as usize
    }

    pub fn iter(self) -> ElemIter {
        ElemIter(self.0)
    }

    /// Every subset of `self`, the empty set first and `self` last.
    pub fn subsets(self) -> Subsets {
        Subsets { mask: self.0, next: Some(0) }
    }

    /// Every pair `(a, b)` with `a <= b` drawn from the set.
    pub fn pairs(self) -> impl Iterator<Item = (usize, usize)> {
        self.iter().flat_map(move |a| self.iter().filter(move |&b| b >= a).map(move |b| (a, b)))
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromIterator<usize> for ElemSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = ElemSet::EMPTY;
        for x in iter {
            s.insert(x);
        }
        s
    }
}

impl<const N: usize> From<[usize; N]> for ElemSet {
    fn from(xs: [usize; N]) -> Self {
        xs.into_iter().collect()
    }
}

impl Serialize for ElemSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for ElemSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let xs = Vec::<usize>::deserialize(d)?;
        if let Some(&bad) = xs.iter().find(|&&x| x >= MAX_POINTS) {
            return Err(serde::de::Error::custom(format!("index {bad} out of range")));
        }
        Ok(xs.into_iter().collect())
    }
}

pub struct ElemIter(u64);

impl Iterator for ElemIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let x = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(x)
    }
}

/// Submask enumeration in increasing numeric order.
pub struct Subsets {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = ElemSet;

    fn next(&mut self) -> Option<ElemSet> {
        let cur = self.next?;
        self.next = if cur == self.mask { None } else { Some((cur.wrapping_sub(self.mask)) & self.mask) };
        Some(ElemSet(cur))
    }
}

/// A finite partial order on `0..n`.
///
/// Stored as principal up-sets and down-sets, so `leq` is a bit test.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinitePoset {
    n: usize,
    up: Vec<ElemSet>,
    down: Vec<ElemSet>,
}

/// Check that `rel` is a partial order and build the poset.
///
/// Reflexivity is checked first, then antisymmetry, then transitivity; the
/// error carries the first witness pair found in row-major order.
pub fn validate_poset(rel: &[Vec<bool>]) -> Result<FinitePoset, OrderError> {
    let n = rel.len();
    if n > MAX_POINTS {
        return Err(OrderError::TooLarge { n });
    }
    for (row, r) in rel.iter().enumerate() {
        if r.len() != n {
            return Err(OrderError::NotSquare { row, len: r.len(), n });
        }
    }
    for x in 0..n {
        if !rel[x][x] {
            return Err(OrderError::ReflexivityViolation(x, x));
        }
    }
    for x in 0..n {
        for y in x + 1..n {
            if rel[x][y] && rel[y][x] {
                return Err(OrderError::AntisymmetryViolation(x, y));
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            if !rel[x][y] {
                continue;
            }
            for z in 0..n {
                if rel[y][z] && !rel[x][z] {
                    return Err(OrderError::TransitivityViolation(x, z));
                }
            }
        }
    }
    let up: Vec<ElemSet> = (0..n).map(|x| (0..n).filter(|&y| rel[x][y]).collect()).collect();
    Ok(FinitePoset::from_up_unchecked(up))
}

impl FinitePoset {
    /// Build from principal up-sets that are already known to form a partial order.
    pub(crate) fn from_up_unchecked(up: Vec<ElemSet>) -> Self {
        let n = up.len();
        let mut down = vec![ElemSet::EMPTY; n];
        for (x, ux) in up.iter().enumerate() {
            for y in ux.iter() {
                down[y].insert(x);
            }
        }
        FinitePoset { n, up, down }
    }

    pub fn from_relation(rel: &[Vec<bool>]) -> Result<Self, OrderError> {
        validate_poset(rel)
    }

    /// `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        assert!(n <= MAX_POINTS);
        let up = (0..n).map(|x| ElemSet::full(n).difference(ElemSet::full(x))).collect();
        Self::from_up_unchecked(up)
    }

    pub fn antichain(n: usize) -> Self {
        assert!(n <= MAX_POINTS);
        Self::from_up_unchecked((0..n).map(ElemSet::singleton).collect())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn all(&self) -> ElemSet {
        ElemSet::full(self.n)
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.up[x].contains(y)
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    /// `{ y : x <= y }`
    pub fn principal_up(&self, x: usize) -> ElemSet {
        self.up[x]
    }

    /// `{ y : y <= x }`
    pub fn principal_down(&self, x: usize) -> ElemSet {
        self.down[x]
    }

    pub fn relation(&self) -> Vec<Vec<bool>> {
        (0..self.n).map(|x| (0..self.n).map(|y| self.leq(x, y)).collect()).collect()
    }

    pub fn check_subset(&self, xs: ElemSet) -> Result<(), OrderError> {
        match xs.iter().find(|&x| x >= self.n) {
            Some(index) => Err(OrderError::IndexOutOfRange { index, n: self.n }),
            None => Ok(()),
        }
    }

    pub fn up_set(&self, xs: ElemSet) -> ElemSet {
        xs.iter().fold(ElemSet::EMPTY, |acc, x| acc.union(self.up[x]))
    }

    pub fn down_set(&self, xs: ElemSet) -> ElemSet {
        xs.iter().fold(ElemSet::EMPTY, |acc, x| acc.union(self.down[x]))
    }

    pub fn is_upper(&self, xs: ElemSet) -> bool {
        self.up_set(xs) == xs
    }

    pub fn is_lower(&self, xs: ElemSet) -> bool {
        self.down_set(xs) == xs
    }

    pub fn maximal_elements(&self, xs: ElemSet) -> ElemSet {
        xs.iter().filter(|&x| self.up[x].intersection(xs) == ElemSet::singleton(x)).collect()
    }

    pub fn minimal_elements(&self, xs: ElemSet) -> ElemSet {
        xs.iter().filter(|&x| self.down[x].intersection(xs) == ElemSet::singleton(x)).collect()
    }

    /// Elements above every member of `xs`; all points when `xs` is empty.
    pub fn upper_bounds(&self, xs: ElemSet) -> ElemSet {
        xs.iter().fold(self.all(), |acc, x| acc.intersection(self.up[x]))
    }

    pub fn lower_bounds(&self, xs: ElemSet) -> ElemSet {
        xs.iter().fold(self.all(), |acc, x| acc.intersection(self.down[x]))
    }

    /// The element of `xs` above all of `xs`, if there is one.
    pub fn greatest(&self, xs: ElemSet) -> Option<usize> {
        xs.intersection(self.upper_bounds(xs)).first()
    }

    pub fn least(&self, xs: ElemSet) -> Option<usize> {
        xs.intersection(self.lower_bounds(xs)).first()
    }

    pub fn is_chain(&self, xs: ElemSet) -> bool {
        xs.pairs().all(|(a, b)| self.comparable(a, b))
    }

    /// Nonempty, and every pair has an upper bound inside `xs`.
    pub fn is_directed(&self, xs: ElemSet) -> bool {
        !xs.is_empty() && xs.pairs().all(|(a, b)| !self.up[a].intersection(self.up[b]).intersection(xs).is_empty())
    }

    /// An order ideal: a directed lower set.
    pub fn is_ideal(&self, xs: ElemSet) -> bool {
        self.is_lower(xs) && self.is_directed(xs)
    }

    pub fn sup(&self, xs: ElemSet) -> Option<usize> {
        self.least(self.upper_bounds(xs))
    }

    pub fn inf(&self, xs: ElemSet) -> Option<usize> {
        self.greatest(self.lower_bounds(xs))
    }

    pub fn is_inf_semilattice(&self) -> bool {
        self.all().pairs().all(|(a, b)| self.inf([a, b].into()).is_some())
    }

    pub fn is_sup_semilattice(&self) -> bool {
        self.all().pairs().all(|(a, b)| self.sup([a, b].into()).is_some())
    }

    pub fn is_lattice(&self) -> bool {
        self.is_inf_semilattice() && self.is_sup_semilattice()
    }

    /// Every directed subset has a supremum, checked over all subsets.
    ///
    /// Exponential in `n`; models above 24 points fall back to the fact that
    /// a finite directed set owns a greatest element, which is then its sup.
    pub fn is_dcpo(&self) -> bool {
        if self.n > 24 {
            return true;
        }
        self.all().subsets().filter(|&xs| self.is_directed(xs)).all(|xs| self.sup(xs).is_some())
    }

    /// A linear extension, minimal elements first.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&x| (self.down[x].len(), x));
        order
    }

    /// Every lower set, each exactly once, in no particular order.
    pub fn lower_sets(&self) -> Vec<ElemSet> {
        let order = self.linear_extension();
        let mut out = Vec::new();
        self.lower_sets_rec(&order, 0, ElemSet::EMPTY, &mut out);
        out
    }

    fn lower_sets_rec(&self, order: &[usize], i: usize, cur: ElemSet, out: &mut Vec<ElemSet>) {
        if i == order.len() {
            out.push(cur);
            return;
        }
        let x = order[i];
        self.lower_sets_rec(order, i + 1, cur, out);
        if self.down[x].without(x).is_subset(cur) {
            self.lower_sets_rec(order, i + 1, cur.with(x), out);
        }
    }

    pub fn upper_sets(&self) -> Vec<ElemSet> {
        let all = self.all();
        self.lower_sets().into_iter().map(|l| all.difference(l)).collect()
    }

    /// The poset with `x` renamed to `perm[x]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut up = vec![ElemSet::EMPTY; self.n];
        for x in 0..self.n {
            up[perm[x]] = self.up[x].iter().map(|y| perm[y]).collect();
        }
        Self::from_up_unchecked(up)
    }

    /// Row-major relation bits, first entry most significant, after placing
    /// old element `at[p]` at position `p`.
    fn code_under(&self, at: &[usize]) -> u64 {
        let mut code = 0u64;
        for &x in at {
            for &y in at {
                code = code << 1 | self.leq(x, y) as u64;
            }
        }
        code
    }

    /// Canonical code: the lexicographically least relation matrix over all
    /// relabelings that sort points by `(|down|, |up|)`.
    ///
    /// The signature is isomorphism-invariant, so restricting to
    /// signature-sorted relabelings still yields a complete invariant.
    pub fn canonical_code(&self) -> u64 {
        assert!(self.n <= 8, "canonical codes are defined for at most 8 points");
        let sig = |x: usize| (self.down[x].len(), self.up[x].len());
        let mut slots: Vec<(usize, usize)> = (0..self.n).map(sig).collect();
        slots.sort();
        let mut best = u64::MAX;
        let mut at = Vec::with_capacity(self.n);
        self.canon_rec(&slots, &mut at, ElemSet::EMPTY, &mut best);
        best
    }

    fn canon_rec(&self, slots: &[(usize, usize)], at: &mut Vec<usize>, used: ElemSet, best: &mut u64) {
        let p = at.len();
        if p == self.n {
            *best = (*best).min(self.code_under(at));
            return;
        }
        for x in 0..self.n {
            if !used.contains(x) && (self.down[x].len(), self.up[x].len()) == slots[p] {
                at.push(x);
                self.canon_rec(slots, at, used.with(x), best);
                at.pop();
            }
        }
    }

    /// Rebuild a poset on `n` points from a code produced by the identity layout.
    pub fn from_code(n: usize, code: u64) -> Self {
        let mut up = vec![ElemSet::EMPTY; n];
        for x in 0..n {
            for y in 0..n {
                let bit = (n * n - 1) - (x * n + y);
                if code >> bit & 1 == 1 {
                    up[x].insert(y);
                }
            }
        }
        Self::from_up_unchecked(up)
    }
}

impl fmt::Debug for FinitePoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let covers: Vec<(usize, usize)> =
            (0..self.n).flat_map(|x| (0..self.n).map(move |y| (x, y))).filter(|&(x, y)| self.lt(x, y)).collect();
        f.debug_struct("FinitePoset").field("n", &self.n).field("lt", &covers).finish()
    }
}

#[derive(Serialize, Deserialize)]
struct PosetRepr {
    n: usize,
    leq: Vec<Vec<bool>>,
}

impl Serialize for FinitePoset {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PosetRepr { n: self.n, leq: self.relation() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinitePoset {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = PosetRepr::deserialize(d)?;
        if repr.leq.len() != repr.n {
            return Err(serde::de::Error::custom(format!("n = {} but leq has {} rows", repr.n, repr.leq.len())));
        }
        validate_poset(&repr.leq).map_err(serde::de::Error::custom)
    }
}

/// One representative per isomorphism class of posets on `n` points.
///
/// Uses the default cap of [`DEFAULT_POSET_CAP`].
pub fn enumerate_posets(n: usize) -> Result<Vec<FinitePoset>, OrderError> {
    enumerate_posets_capped(n, DEFAULT_POSET_CAP)
}

/// Like [`enumerate_posets`] with an explicit cap (at most [`HARD_POSET_CAP`]).
///
/// Naturally labeled posets (`x <= y` implies `x <= y` as integers) are grown
/// one point at a time by choosing the new point's strict down-set among the
/// lower sets of the points already placed; every isomorphism class has such a
/// labeling. Classes are then merged by [`FinitePoset::canonical_code`], and
/// the output is sorted by that code.
pub fn enumerate_posets_capped(n: usize, cap: usize) -> Result<Vec<FinitePoset>, OrderError> {
    let cap = cap.min(HARD_POSET_CAP);
    if n > cap {
        return Err(OrderError::CapExceeded { what: "poset size", requested: n, cap });
    }
    let mut classes: BTreeMap<u64, FinitePoset> = BTreeMap::new();
    grow_natural(n, &mut Vec::new(), &mut |down| {
        let p = poset_from_strict_downs(down);
        classes.entry(p.canonical_code()).or_insert(p);
    });
    Ok(classes.into_keys().map(|code| FinitePoset::from_code(n, code)).collect())
}

fn poset_from_strict_downs(down: &[ElemSet]) -> FinitePoset {
    let n = down.len();
    let mut up: Vec<ElemSet> = (0..n).map(ElemSet::singleton).collect();
    for (y, d) in down.iter().enumerate() {
        for x in d.iter() {
            up[x].insert(y);
        }
    }
    FinitePoset::from_up_unchecked(up)
}

fn grow_natural(n: usize, down: &mut Vec<ElemSet>, emit: &mut dyn FnMut(&[ElemSet])) {
    let k = down.len();
    if k == n {
        emit(down);
        return;
    }
    let so_far = poset_from_strict_downs(down);
    for lower in so_far.lower_sets() {
        down.push(lower);
        grow_natural(n, down, emit);
        down.pop();
    }
}

/// A finite family of subsets of `0..ground`, closed under pairwise
/// intersection, ordered by inclusion.
///
/// This is the finite stand-in for the space of nice subalgebras: members are
/// the points, inclusion is the specialization order.
#[derive(Clone, PartialEq, Eq)]
pub struct NiceFamily {
    ground: usize,
    members: Vec<ElemSet>,
    order: FinitePoset,
}

impl NiceFamily {
    pub fn new(ground: usize, members: Vec<ElemSet>) -> Result<Self, OrderError> {
        if ground > MAX_POINTS {
            return Err(OrderError::TooLarge { n: ground });
        }
        if members.len() > MAX_POINTS {
            return Err(OrderError::TooLarge { n: members.len() });
        }
        if members.is_empty() {
            return Err(OrderError::EmptyFamily);
        }
        let full = ElemSet::full(ground);
        for m in &members {
            if !m.is_subset(full) {
                let index = m.difference(full).first().unwrap_or_default();
                return Err(OrderError::IndexOutOfRange { index, n: ground });
            }
        }
        let mut seen = BTreeMap::new();
        for (i, m) in members.iter().enumerate() {
            if seen.insert(*m, i).is_some() {
                return Err(OrderError::DuplicateMember(i));
            }
        }
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                if !seen.contains_key(&members[i].intersection(members[j])) {
                    return Err(OrderError::NotIntersectionClosed { left: i, right: j });
                }
            }
        }
        let up = members.iter().map(|a| (0..members.len()).filter(|&j| a.is_subset(members[j])).collect()).collect();
        Ok(NiceFamily { ground, members, order: FinitePoset::from_up_unchecked(up) })
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn members(&self) -> &[ElemSet] {
        &self.members
    }

    pub fn member(&self, i: usize) -> ElemSet {
        self.members[i]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The inclusion order on members.
    pub fn order(&self) -> &FinitePoset {
        &self.order
    }

    pub fn index_of(&self, set: ElemSet) -> Option<usize> {
        self.members.iter().position(|&m| m == set)
    }

    /// Indices of members containing `m`.
    pub fn containing(&self, m: ElemSet) -> ElemSet {
        (0..self.members.len()).filter(|&i| m.is_subset(self.members[i])).collect()
    }

    /// Set-level intersection of the chosen members; `None` for no members.
    pub fn intersection_of(&self, points: ElemSet) -> Option<ElemSet> {
        let mut it = points.iter();
        let first = self.members[it.next()?];
        Some(it.fold(first, |acc, i| acc.intersection(self.members[i])))
    }

    pub fn union_of(&self, points: ElemSet) -> ElemSet {
        points.iter().fold(ElemSet::EMPTY, |acc, i| acc.union(self.members[i]))
    }

    /// Index of `members[i] ∩ members[j]`, which exists by closure.
    pub fn meet(&self, i: usize, j: usize) -> usize {
        self.index_of(self.members[i].intersection(self.members[j])).expect("family is intersection-closed")
    }
}

impl fmt::Debug for NiceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NiceFamily").field("ground", &self.ground).field("members", &self.members).finish()
    }
}

#[derive(Serialize, Deserialize)]
struct FamilyRepr {
    ground: usize,
    members: Vec<ElemSet>,
}

impl Serialize for NiceFamily {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FamilyRepr { ground: self.ground, members: self.members.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for NiceFamily {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = FamilyRepr::deserialize(d)?;
        NiceFamily::new(repr.ground, repr.members).map_err(serde::de::Error::custom)
    }
}

/// All nonempty intersection-closed families on `0..ground` with at most
/// `max_members` members, one per orbit of ground-set permutations.
///
/// Families are grown by adding subsets in a linear extension of inclusion;
/// at that point every intersection with an earlier member is a proper
/// subset of the new one, so closure only needs checking against what is
/// already chosen. Each representative lists members in increasing mask order.
pub fn enumerate_nice_families(ground: usize, max_members: usize) -> Result<Vec<NiceFamily>, OrderError> {
    if ground > MAX_FAMILY_GROUND {
        return Err(OrderError::CapExceeded { what: "ground", requested: ground, cap: MAX_FAMILY_GROUND });
    }
    if max_members > MAX_FAMILY_MEMBERS {
        return Err(OrderError::CapExceeded { what: "max_members", requested: max_members, cap: MAX_FAMILY_MEMBERS });
    }
    let mut subsets: Vec<u64> = (0..1u64 << ground).collect();
    subsets.sort_by_key(|&s| (s.count_ones(), s));
    let perms = ground_permutation_tables(ground);
    let mut canon: BTreeSet<(usize, Vec<u64>)> = BTreeSet::new();
    let mut chosen: Vec<u64> = Vec::new();
    grow_family(&subsets, 0, max_members, &mut chosen, &mut |fam| {
        let key = perms
            .iter()
            .map(|table| {
                let mut v: Vec<u64> = fam.iter().map(|&m| table[m as usize]).collect();
                v.sort_unstable();
                v
            })
            .min()
            .expect("at least the identity permutation");
        canon.insert((key.len(), key));
    });
    Ok(canon
        .into_iter()
        .map(|(_, key)| {
            NiceFamily::new(ground, key.into_iter().map(ElemSet::from_bits).collect()).expect("generated families are valid")
        })
        .collect())
}

fn grow_family(subsets: &[u64], from: usize, cap: usize, chosen: &mut Vec<u64>, emit: &mut dyn FnMut(&[u64])) {
    if !chosen.is_empty() {
        emit(chosen);
    }
    if chosen.len() == cap {
        return;
    }
    for idx in from..subsets.len() {
        let y = subsets[idx];
        if chosen.iter().all(|&x| chosen.contains(&(x & y))) {
            chosen.push(y);
            grow_family(subsets, idx + 1, cap, chosen, emit);
            chosen.pop();
        }
    }
}

/// For each permutation of the ground set, the induced map on masks.
fn ground_permutation_tables(ground: usize) -> Vec<Vec<u64>> {
    use itertools::Itertools;
    (0..ground)
        .permutations(ground)
        .map(|perm| {
            (0..1u64 << ground).map(|mask| ElemSet::from_bits(mask).iter().fold(0u64, |acc, x| acc | 1u64 << perm[x])).collect()
        })
        .collect()
}
