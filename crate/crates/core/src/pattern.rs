//! Pattern subrings of `M_n(F)` over the valuation model, and symbolic open
//! families of such rings.
//!
//! A pattern ring allows in position `(i, j)` exactly the elements of a fixed
//! fractional ideal `I_ij`. The symbolic families describe infinite open sets
//! `∪ V(G)` where some generators `G(t)` move along a parameter interval; all
//! membership and condition questions are decided exactly, for the whole
//! interval at once, by reducing them to rays in the parameter.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::alexandroff::{AscendingChainDescriptor, SpaceModel};
use crate::ladders::OpenLadder;
use crate::order::{ElemSet, MAX_POINTS};
use crate::valuation::{Bound, CutIdeal, ParamIdealFamily, Scalar, ValuationError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("pattern sizes differ: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("pattern must be a square matrix of size >= 1")]
    BadShape,
    #[error("rings {0} and {1} have no upper bound in the list")]
    NotDirected(usize, usize),
    #[error("family has no members")]
    EmptyFamily,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unsupported descriptor: {0}")]
    UnsupportedDescriptor(String),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
}

/// An `n × n` matrix of cut ideals read as the set of matrices with entries
/// in the corresponding ideals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PatternRing<T> {
    n: usize,
    entries: Vec<CutIdeal<T>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PatternViolation {
    /// `I_ik · I_kj ⊄ I_ij`
    Closure { i: usize, j: usize, k: usize },
    /// `O_v ⊄ I_ii`
    NotUnital { i: usize },
    /// The diagonal ideals do not meet in exactly `O_v`, so `R ∩ F ≠ S`.
    ScalarMeet,
    /// A zero entry, so `F·R ≠ M_n(F)`.
    ZeroEntry { i: usize, j: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternReport {
    pub multiplicatively_closed: bool,
    pub unital: bool,
    pub s_nice: bool,
    pub violations: Vec<PatternViolation>,
}

impl PatternReport {
    pub fn all_ok(&self) -> bool {
        self.multiplicatively_closed && self.unital && self.s_nice
    }

    fn from_violations(violations: Vec<PatternViolation>) -> Self {
        let any = |f: fn(&PatternViolation) -> bool| violations.iter().any(f);
        PatternReport {
            multiplicatively_closed: !any(|v| matches!(v, PatternViolation::Closure { .. })),
            unital: !any(|v| matches!(v, PatternViolation::NotUnital { .. })),
            s_nice: !any(|v| matches!(v, PatternViolation::ScalarMeet | PatternViolation::ZeroEntry { .. })),
            violations,
        }
    }
}

impl<T: Scalar> PatternRing<T> {
    pub fn new(rows: Vec<Vec<CutIdeal<T>>>) -> Result<Self, PatternError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(PatternError::BadShape);
        }
        Ok(PatternRing { n, entries: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> CutIdeal<T>) -> Self {
        assert!(n >= 1);
        let entries = (0..n * n).map(|ix| f(ix / n, ix % n)).collect();
        PatternRing { n, entries }
    }

    /// `M_n(O_v)`.
    pub fn full(n: usize) -> Self {
        Self::from_fn(n, |_, _| CutIdeal::unit())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &CutIdeal<T> {
        &self.entries[i * self.n + j]
    }

    pub fn with_entry(mut self, i: usize, j: usize, ideal: CutIdeal<T>) -> Self {
        self.entries[i * self.n + j] = ideal;
        self
    }

    pub fn rows(&self) -> Vec<Vec<CutIdeal<T>>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    fn same_size(&self, other: &Self) -> Result<(), PatternError> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(PatternError::SizeMismatch { left: self.n, right: other.n })
        }
    }

    /// Entrywise `self ⊇ other`. Patterns of different sizes are never nested.
    pub fn contains(&self, other: &Self) -> bool {
        self.n == other.n && self.entries.iter().zip(&other.entries).all(|(a, b)| a.contains(b))
    }

    pub fn strictly_contains(&self, other: &Self) -> bool {
        self.contains(other) && self != other
    }

    pub fn intersect(&self, other: &Self) -> Result<Self, PatternError> {
        self.same_size(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.intersect(b)).collect();
        Ok(PatternRing { n: self.n, entries })
    }

    pub fn sum(&self, other: &Self) -> Result<Self, PatternError> {
        self.same_size(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.sum(b)).collect();
        Ok(PatternRing { n: self.n, entries })
    }

    pub fn check(&self) -> PatternReport {
        check_pattern(self)
    }

    /// Multiplicatively closed, unital and nice.
    pub fn is_nice(&self) -> bool {
        self.check().all_ok()
    }
}

impl<T: fmt::Display> fmt::Debug for PatternRing<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, row) in self.entries.chunks(self.n).enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            f.write_str(&cells.join(", "))?;
        }
        f.write_str("]")
    }
}

impl<T: fmt::Display> fmt::Display for PatternRing<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "")]
struct PatternRepr<T: Scalar> {
    n: usize,
    entries: Vec<Vec<CutIdeal<T>>>,
}

impl<T: Scalar> Serialize for PatternRing<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PatternRepr { n: self.n, entries: self.rows() }.serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for PatternRing<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = PatternRepr::<T>::deserialize(d)?;
        if repr.entries.len() != repr.n {
            return Err(serde::de::Error::custom("entries do not match n"));
        }
        PatternRing::new(repr.entries).map_err(serde::de::Error::custom)
    }
}

/// Closure, unitality and niceness of a single pattern.
///
/// Closure is checked term by term: the ideal sum over `k` lies in `I_ij`
/// iff each product does, since cuts are totally ordered.
pub fn check_pattern<T: Scalar>(p: &PatternRing<T>) -> PatternReport {
    let n = p.n;
    let mut violations = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if !p.entry(i, j).contains(&p.entry(i, k).multiply(p.entry(k, j))) {
                    violations.push(PatternViolation::Closure { i, j, k });
                }
            }
        }
    }
    let unit = CutIdeal::unit();
    for i in 0..n {
        if !p.entry(i, i).contains(&unit) {
            violations.push(PatternViolation::NotUnital { i });
        }
    }
    let meet = (0..n).map(|i| p.entry(i, i).clone()).min().expect("n >= 1");
    if meet != unit {
        violations.push(PatternViolation::ScalarMeet);
    }
    for i in 0..n {
        for j in 0..n {
            if p.entry(i, j).is_zero() {
                violations.push(PatternViolation::ZeroEntry { i, j });
            }
        }
    }
    PatternReport::from_violations(violations)
}

pub fn intersect_rings<T: Scalar>(a: &PatternRing<T>, b: &PatternRing<T>) -> Result<PatternRing<T>, PatternError> {
    a.intersect(b)
}

/// Entrywise union of a directed list, which is then itself a pattern ring.
pub fn union_directed<T: Scalar>(rings: &[PatternRing<T>]) -> Result<PatternRing<T>, PatternError> {
    let first = rings.first().ok_or(PatternError::EmptyFamily)?;
    for r in rings {
        first.same_size(r)?;
    }
    for a in 0..rings.len() {
        for b in a + 1..rings.len() {
            let bounded = rings.iter().any(|u| u.contains(&rings[a]) && u.contains(&rings[b]));
            if !bounded {
                return Err(PatternError::NotDirected(a, b));
            }
        }
    }
    let mut acc = first.clone();
    for r in &rings[1..] {
        acc = acc.sum(r)?;
    }
    Ok(acc)
}

/// A set of parameters `t`: empty, everything, or a ray.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Ray<T> {
    Empty,
    All,
    /// `t < c`, or `t <= c` when inclusive
    Below(T, bool),
    /// `t > c`, or `t >= c` when inclusive
    Above(T, bool),
}

/// A possibly unbounded interval with per-end inclusivity, or empty.
#[derive(Clone, Debug)]
struct Interval<T> {
    lo: Option<(T, bool)>,
    hi: Option<(T, bool)>,
    empty: bool,
}

impl<T: Scalar> Interval<T> {
    fn all() -> Self {
        Interval { lo: None, hi: None, empty: false }
    }

    fn empty() -> Self {
        Interval { lo: None, hi: None, empty: true }
    }

    fn open(lo: Option<T>, hi: Option<T>) -> Self {
        Interval { lo: lo.map(|l| (l, false)), hi: hi.map(|h| (h, false)), empty: false }
    }

    fn of_ray(r: &Ray<T>) -> Self {
        match r {
            Ray::Empty => Self::empty(),
            Ray::All => Self::all(),
            Ray::Below(c, inc) => Interval { lo: None, hi: Some((c.clone(), *inc)), empty: false },
            Ray::Above(c, inc) => Interval { lo: Some((c.clone(), *inc)), hi: None, empty: false },
        }
    }

    fn intersect(&self, other: &Self) -> Self {
        if self.empty || other.empty {
            return Self::empty();
        }
        let lo = match (&self.lo, &other.lo) {
            (None, x) | (x, None) => x.clone(),
            (Some((a, ia)), Some((b, ib))) => Some(if a > b {
                (a.clone(), *ia)
            } else if b > a {
                (b.clone(), *ib)
            } else {
                (a.clone(), *ia && *ib)
            }),
        };
        let hi = match (&self.hi, &other.hi) {
            (None, x) | (x, None) => x.clone(),
            (Some((a, ia)), Some((b, ib))) => Some(if a < b {
                (a.clone(), *ia)
            } else if b < a {
                (b.clone(), *ib)
            } else {
                (a.clone(), *ia && *ib)
            }),
        };
        Interval { lo, hi, empty: false }
    }

    fn is_empty(&self) -> bool {
        if self.empty {
            return true;
        }
        match (&self.lo, &self.hi) {
            (Some((l, il)), Some((h, ih))) => l > h || (l == h && !(*il && *ih)),
            _ => false,
        }
    }
}

impl<T: Scalar> Ray<T> {
    fn complement(&self) -> Ray<T> {
        match self {
            Ray::Empty => Ray::All,
            Ray::All => Ray::Empty,
            Ray::Below(c, inc) => Ray::Above(c.clone(), !inc),
            Ray::Above(c, inc) => Ray::Below(c.clone(), !inc),
        }
    }
}

/// Union of rays, kept as one leftward and one rightward ray.
#[derive(Clone, Debug)]
struct RayUnion<T> {
    all: bool,
    below: Option<(T, bool)>,
    above: Option<(T, bool)>,
}

impl<T: Scalar> RayUnion<T> {
    fn new() -> Self {
        RayUnion { all: false, below: None, above: None }
    }

    fn add(&mut self, r: Ray<T>) {
        match r {
            Ray::Empty => {}
            Ray::All => self.all = true,
            Ray::Below(c, inc) => {
                self.below = Some(match self.below.take() {
                    None => (c, inc),
                    Some((d, id)) if d > c => (d, id),
                    Some((d, _)) if d < c => (c, inc),
                    Some((d, id)) => (d, id || inc),
                })
            }
            Ray::Above(c, inc) => {
                self.above = Some(match self.above.take() {
                    None => (c, inc),
                    Some((d, id)) if d < c => (d, id),
                    Some((d, _)) if d > c => (c, inc),
                    Some((d, id)) => (d, id || inc),
                })
            }
        }
    }

    fn rays(&self) -> Vec<Ray<T>> {
        if self.all {
            return vec![Ray::All];
        }
        let mut out = Vec::new();
        if let Some((c, i)) = &self.below {
            out.push(Ray::Below(c.clone(), *i));
        }
        if let Some((c, i)) = &self.above {
            out.push(Ray::Above(c.clone(), *i));
        }
        out
    }

    fn meets(&self, within: &Interval<T>) -> bool {
        self.rays().iter().any(|r| !Interval::of_ray(r).intersect(within).is_empty())
    }

    fn covers(&self, within: &Interval<T>) -> bool {
        let gap = self.rays().iter().fold(within.clone(), |acc, r| acc.intersect(&Interval::of_ray(&r.complement())));
        gap.is_empty()
    }
}

/// A pattern ring one of whose off-diagonal entries runs along a strictly
/// monotone chain of cuts: `G(t) = base` with `(i, j)` replaced by the
/// family member at `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(bound = "")]
pub struct ParamPattern<T: Scalar> {
    base: PatternRing<T>,
    entry: (usize, usize),
    family: ParamIdealFamily<T>,
}

impl<T: Scalar> ParamPattern<T> {
    /// Only off-diagonal, strictly monotone families are supported.
    pub fn new(base: PatternRing<T>, entry: (usize, usize), family: ParamIdealFamily<T>) -> Result<Self, PatternError> {
        let (i, j) = entry;
        if i >= base.n || j >= base.n {
            return Err(PatternError::InvalidParameter(format!("entry {entry:?} outside {}x{}", base.n, base.n)));
        }
        if i == j {
            return Err(PatternError::UnsupportedDescriptor("parametric diagonal entry".into()));
        }
        family.strict_chain()?;
        let placeholder = family.member(&family.interior_point())?;
        Ok(ParamPattern { base: base.with_entry(i, j, placeholder), entry, family })
    }

    pub fn n(&self) -> usize {
        self.base.n
    }

    pub fn entry(&self) -> (usize, usize) {
        self.entry
    }

    pub fn family(&self) -> &ParamIdealFamily<T> {
        &self.family
    }

    /// Entries outside the moving one; the moving entry holds an arbitrary member.
    pub fn base(&self) -> &PatternRing<T> {
        &self.base
    }

    pub fn at(&self, t: &T) -> Result<PatternRing<T>, PatternError> {
        let (i, j) = self.entry;
        Ok(self.base.clone().with_entry(i, j, self.family.member(t)?))
    }

    /// `∩_t G(t)`.
    pub fn intersection_limit(&self) -> PatternRing<T> {
        let (i, j) = self.entry;
        self.base.clone().with_entry(i, j, self.family.intersect_family())
    }

    /// `∪_t G(t)`, when the union of the moving entry is a fractional ideal.
    pub fn union_limit(&self) -> Result<PatternRing<T>, PatternError> {
        let (i, j) = self.entry;
        Ok(self.base.clone().with_entry(i, j, self.family.union_family()?))
    }

    fn fixed_entries_contain(&self, ring: &PatternRing<T>, skip: &[(usize, usize)]) -> bool {
        let n = self.base.n;
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|e| *e != self.entry && !skip.contains(e))
            .all(|(i, j)| ring.entry(i, j).contains(self.base.entry(i, j)))
    }

    /// Some `G(t)` lies inside `ring`.
    pub fn some_member_within(&self, ring: &PatternRing<T>) -> bool {
        let (i, j) = self.entry;
        ring.n == self.base.n && self.fixed_entries_contain(ring, &[]) && self.family.some_member_within(ring.entry(i, j))
    }

    /// Closure, unitality and niceness of every `G(t)` at once.
    ///
    /// A product term containing the moving entry only on the left must hold
    /// for every member, which is the same as holding for the union limit
    /// (multiplication commutes with directed unions of cuts). A fixed term
    /// below the moving entry must lie in every member, i.e. in the
    /// intersection limit. A term `X·e ⊆ e` with `e` on both sides does not
    /// depend on the cut point of `e`, so one interior member decides it.
    pub fn check_all_members(&self) -> PatternReport {
        let n = self.base.n;
        let var = self.entry;
        let union = self.family.union_family().ok();
        let inter = self.family.intersect_family();
        let some_member = self.family.member(&self.family.interior_point()).expect("interior point");
        let val = |e: (usize, usize)| self.base.entry(e.0, e.1).clone();
        let mut violations = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (l, r) = ((i, k), (k, j));
                    let lhs_var = l == var || r == var;
                    let ok = if (i, j) != var {
                        if !lhs_var {
                            val((i, j)).contains(&val(l).multiply(&val(r)))
                        } else {
                            let other = if l == var { val(r) } else { val(l) };
                            match &union {
                                Some(u) => val((i, j)).contains(&u.multiply(&other)),
                                None => other.is_zero(),
                            }
                        }
                    } else if !lhs_var {
                        inter.contains(&val(l).multiply(&val(r)))
                    } else {
                        let other = if l == var { val(r) } else { val(l) };
                        some_member.contains(&some_member.multiply(&other))
                    };
                    if !ok {
                        violations.push(PatternViolation::Closure { i, j, k });
                    }
                }
            }
        }
        let unit = CutIdeal::unit();
        for i in 0..n {
            if !val((i, i)).contains(&unit) {
                violations.push(PatternViolation::NotUnital { i });
            }
        }
        if (0..n).map(|i| val((i, i))).min().expect("n >= 1") != unit {
            violations.push(PatternViolation::ScalarMeet);
        }
        for i in 0..n {
            for j in 0..n {
                if (i, j) != var && val((i, j)).is_zero() {
                    violations.push(PatternViolation::ZeroEntry { i, j });
                }
            }
        }
        PatternReport::from_violations(violations)
    }

    /// The parameters `t` at which the moving cut contains `ideal`.
    fn ray_containing(&self, ideal: &CutIdeal<T>) -> Ray<T> {
        match ideal {
            CutIdeal::Zero => Ray::All,
            CutIdeal::Cut { gamma, bound } => {
                let inclusive = self.family.bound() == Bound::Closed || *bound == Bound::Open;
                self.gamma_below(gamma.clone(), inclusive)
            }
        }
    }

    /// Parameters with cut point `< c` (or `<= c`).
    fn gamma_below(&self, c: T, inclusive: bool) -> Ray<T> {
        let t = self.family.param_for_gamma(&c).expect("strict chain");
        if self.family.slope() > &T::zero() {
            Ray::Below(t, inclusive)
        } else {
            Ray::Above(t, inclusive)
        }
    }

    /// Parameters with cut point `> c` (or `>= c`).
    fn gamma_above(&self, c: T, inclusive: bool) -> Ray<T> {
        self.gamma_below(c, !inclusive).complement()
    }

    fn interval(&self) -> Interval<T> {
        Interval::open(self.family.lo().cloned(), self.family.hi().cloned())
    }
}

/// Where a moving pattern meets an open family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalMembership {
    /// Every parameter value gives a member.
    Everywhere,
    /// No parameter value gives a member.
    Nowhere,
    /// Some but not all parameter values give members.
    Partly,
}

/// Generator pairs whose intersection leaves the family, and the escapes
/// found between generators and moving pieces.
type EscapeScan = (Vec<(usize, usize)>, Vec<IntersectionEscape>);

/// An open set `U = ∪ V(G)` of nice pattern rings, given by finitely many
/// fixed generators and finitely many moving ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(bound = "")]
pub struct SymbolicOpenFamily<T: Scalar> {
    n: usize,
    generators: Vec<PatternRing<T>>,
    pieces: Vec<ParamPattern<T>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionEscape {
    pub generator: usize,
    pub piece: usize,
    /// `generator ∩ G(t)` leaves the family for every `t`, not just some.
    pub for_every_parameter: bool,
}

/// Everything the condition evaluator learned about a family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(bound = "")]
pub struct SymbolicEvaluation<T: Scalar> {
    pub ladder: OpenLadder,
    pub infimum: PatternRing<T>,
    pub infimum_is_nice: bool,
    pub infimum_in_family: bool,
    /// Indices of the generators that are minimal in `U`; moving pieces never are.
    pub minimal_generators: Vec<usize>,
    pub escapes: Vec<IntersectionEscape>,
}

impl<T: Scalar> SymbolicOpenFamily<T> {
    /// Every generator and every moving generator must be a nice pattern.
    pub fn new(n: usize, generators: Vec<PatternRing<T>>, pieces: Vec<ParamPattern<T>>) -> Result<Self, PatternError> {
        if generators.is_empty() && pieces.is_empty() {
            return Err(PatternError::EmptyFamily);
        }
        for g in &generators {
            if g.n != n {
                return Err(PatternError::SizeMismatch { left: n, right: g.n });
            }
            if !g.is_nice() {
                return Err(PatternError::InvalidParameter(format!("generator {g} is not a nice pattern")));
            }
        }
        for p in &pieces {
            if p.n() != n {
                return Err(PatternError::SizeMismatch { left: n, right: p.n() });
            }
            let report = p.check_all_members();
            if !report.all_ok() {
                return Err(PatternError::InvalidParameter(format!(
                    "moving generator fails for some parameter: {:?}",
                    report.violations
                )));
            }
        }
        Ok(SymbolicOpenFamily { n, generators, pieces })
    }

    /// `V(G)`.
    pub fn principal(g: PatternRing<T>) -> Result<Self, PatternError> {
        Self::new(g.n, vec![g], vec![])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PatternRing<T>] {
        &self.generators
    }

    pub fn pieces(&self) -> &[ParamPattern<T>] {
        &self.pieces
    }

    /// Membership: a nice pattern containing some generator or some `G(t)`.
    pub fn member_of(&self, ring: &PatternRing<T>) -> Result<bool, PatternError> {
        if ring.n != self.n {
            return Err(PatternError::SizeMismatch { left: self.n, right: ring.n });
        }
        Ok(ring.is_nice()
            && (self.generators.iter().any(|g| ring.contains(g)) || self.pieces.iter().any(|p| p.some_member_within(ring))))
    }

    /// `∩_{R ∈ U} R`, entrywise over the generators and the limits of the
    /// moving pieces. Every member contains a generator, so nothing else
    /// can lower the intersection.
    pub fn infimum(&self) -> PatternRing<T> {
        let mut parts = self.generators.iter().cloned().chain(self.pieces.iter().map(|p| p.intersection_limit()));
        let first = parts.next().expect("nonempty family");
        parts.fold(first, |acc, r| acc.intersect(&r).expect("sizes checked"))
    }

    /// Generators with nothing in `U` strictly below them.
    ///
    /// A moving piece has no minimal member: its chain keeps descending
    /// toward a limit outside the interval, and anything above some `G(t)`
    /// is strictly above a later one.
    pub fn minimal_generators(&self) -> Vec<usize> {
        (0..self.generators.len())
            .filter(|&a| {
                let g = &self.generators[a];
                let duplicate = self.generators[..a].contains(g);
                let below = self.generators.iter().any(|h| g.strictly_contains(h));
                let piece_below = self.pieces.iter().any(|p| p.some_member_within(g));
                !duplicate && !below && !piece_below
            })
            .collect()
    }

    /// For which `t` the pattern with fixed entries from `fixed` and the
    /// moving entry of `piece` at `t` lies in `U`, as a union of rays.
    /// `fixed` must already be nice-compatible (an intersection of members).
    fn membership_rays(&self, fixed: &PatternRing<T>, piece: &ParamPattern<T>) -> RayUnion<T> {
        let var = piece.entry;
        let mut rays = RayUnion::new();
        let fixed_contains = |h: &PatternRing<T>, skip: &[(usize, usize)]| {
            (0..self.n)
                .flat_map(|i| (0..self.n).map(move |j| (i, j)))
                .filter(|e| *e != var && !skip.contains(e))
                .all(|(i, j)| fixed.entry(i, j).contains(h.entry(i, j)))
        };
        for h in &self.generators {
            if fixed_contains(h, &[]) {
                rays.add(piece.ray_containing(h.entry(var.0, var.1)));
            }
        }
        for q in &self.pieces {
            let (k, l) = q.entry;
            if q.entry == var {
                if fixed_contains(&q.base, &[]) {
                    rays.add(match q.family.gamma_sup() {
                        None => Ray::All,
                        Some(sup) => piece.gamma_below(sup, false),
                    });
                }
            } else if fixed_contains(&q.base, &[q.entry]) && q.family.some_member_within(fixed.entry(k, l)) {
                rays.add(piece.ray_containing(q.base.entry(var.0, var.1)));
            }
        }
        rays
    }

    /// Where `g ∩ G(t)` lies in `U` as `t` runs over the piece's interval.
    pub fn intersection_membership(
        &self,
        g: &PatternRing<T>,
        piece: &ParamPattern<T>,
    ) -> Result<IntervalMembership, PatternError> {
        if g.n != self.n || piece.n() != self.n {
            return Err(PatternError::SizeMismatch { left: self.n, right: g.n });
        }
        let (i, j) = piece.entry;
        let fixed = g.intersect(&piece.base)?;
        let whole = piece.interval();
        // where the moving cut is the smaller of the two entries
        let moving = match g.entry(i, j) {
            CutIdeal::Zero => Ray::Empty,
            CutIdeal::Cut { gamma, bound } => {
                let inclusive = *bound == Bound::Closed || piece.family.bound() == Bound::Open;
                piece.gamma_above(gamma.clone(), inclusive)
            }
        };
        let moving_part = whole.intersect(&Interval::of_ray(&moving));
        let pinned_part = whole.intersect(&Interval::of_ray(&moving.complement()));

        let mut everywhere = true;
        let mut somewhere = false;
        if !pinned_part.is_empty() {
            let pinned = fixed.clone().with_entry(i, j, g.entry(i, j).clone());
            let inside = self.member_of(&pinned)?;
            everywhere &= inside;
            somewhere |= inside;
        }
        if !moving_part.is_empty() {
            let rays = self.membership_rays(&fixed, piece);
            everywhere &= rays.covers(&moving_part);
            somewhere |= rays.meets(&moving_part);
        }
        Ok(match (everywhere, somewhere) {
            (true, _) => IntervalMembership::Everywhere,
            (false, false) => IntervalMembership::Nowhere,
            (false, true) => IntervalMembership::Partly,
        })
    }

    /// Pairs of generators whose intersection leaves `U`.
    ///
    /// Any two members contain generators `h1, h2`, and their intersection
    /// lies above `h1 ∩ h2`, so closure only needs checking on generators.
    /// Two members of one moving chain intersect to the smaller of them.
    fn escapes(&self) -> Result<EscapeScan, PatternError> {
        if self.pieces.len() > 1 {
            return Err(PatternError::UnsupportedDescriptor("intersections across two moving generators".into()));
        }
        let mut fixed_pairs = Vec::new();
        for a in 0..self.generators.len() {
            for b in a + 1..self.generators.len() {
                let m = self.generators[a].intersect(&self.generators[b])?;
                if !self.member_of(&m)? {
                    fixed_pairs.push((a, b));
                }
            }
        }
        let mut escapes = Vec::new();
        for (pi, piece) in self.pieces.iter().enumerate() {
            for (gi, g) in self.generators.iter().enumerate() {
                match self.intersection_membership(g, piece)? {
                    IntervalMembership::Everywhere => {}
                    IntervalMembership::Nowhere => {
                        escapes.push(IntersectionEscape { generator: gi, piece: pi, for_every_parameter: true })
                    }
                    IntervalMembership::Partly => {
                        escapes.push(IntersectionEscape { generator: gi, piece: pi, for_every_parameter: false })
                    }
                }
            }
        }
        Ok((fixed_pairs, escapes))
    }

    /// Whether every nice pattern above the infimum lies in `U`.
    fn upper_set_of_infimum_inside(&self, inf: &PatternRing<T>, inf_nice: bool) -> Result<bool, PatternError> {
        if inf_nice {
            // inf ∈ V(inf), and U is an upper set
            return self.member_of(inf);
        }
        // A nice R ⊇ inf has no zero entries. If a moving piece matches inf
        // off its moving entry and its chain shrinks to zero there, every
        // such R contains some member of that piece.
        for p in &self.pieces {
            let (i, j) = p.entry;
            let matches_off_entry = (0..self.n)
                .flat_map(|a| (0..self.n).map(move |b| (a, b)))
                .filter(|&e| e != (i, j))
                .all(|(a, b)| inf.entry(a, b) == p.base.entry(a, b));
            if matches_off_entry && p.family.intersect_family().is_zero() && inf.entry(i, j).is_zero() {
                return Ok(true);
            }
        }
        Err(PatternError::UnsupportedDescriptor(
            "infimum is not a nice pattern and no moving generator accounts for its upper set".into(),
        ))
    }

    /// Decide all six open-set conditions exactly.
    ///
    /// `(a)` and `(b)` both reduce to the infimum being a member (`U` has a
    /// least element iff `∩U ∈ U`; the intersection of any nonempty
    /// subfamily then sits between `∩U` and a member). `(c)` and `(d)`
    /// coincide because every member contains `∩U`. `(e)` is the generator
    /// closure check and `(f)` counts minimal generators.
    pub fn evaluate(&self) -> Result<SymbolicEvaluation<T>, PatternError> {
        let infimum = self.infimum();
        let infimum_is_nice = infimum.is_nice();
        let infimum_in_family = self.member_of(&infimum)?;
        let d = self.upper_set_of_infimum_inside(&infimum, infimum_is_nice)?;
        let (fixed_pairs, escapes) = self.escapes()?;
        let minimal_generators = self.minimal_generators();
        let ladder = OpenLadder {
            a: infimum_in_family,
            b: infimum_in_family,
            c: d,
            d,
            e: fixed_pairs.is_empty() && escapes.is_empty(),
            f: minimal_generators.len() <= 1,
        };
        Ok(SymbolicEvaluation { ladder, infimum, infimum_is_nice, infimum_in_family, minimal_generators, escapes })
    }

    pub fn conditions(&self) -> Result<OpenLadder, PatternError> {
        Ok(self.evaluate()?.ladder)
    }
}

/// `[[O_v, I_r], [J1, O_v]]`.
pub fn corner_ring<T: Scalar>(upper: CutIdeal<T>, lower: CutIdeal<T>) -> PatternRing<T> {
    PatternRing::full(2).with_entry(0, 1, upper).with_entry(1, 0, lower)
}

fn check_positive<T: Scalar>(r0: &T) -> Result<(), PatternError> {
    if r0 <= &T::zero() {
        return Err(PatternError::InvalidParameter(format!("r0 = {r0} must be positive")));
    }
    Ok(())
}

fn check_nonzero_integral<T: Scalar>(name: &str, j: &CutIdeal<T>) -> Result<(), PatternError> {
    if !j.is_nonzero_integral() {
        return Err(PatternError::InvalidParameter(format!("{name} = {j} is not a nonzero ideal of O_v")));
    }
    Ok(())
}

/// `U = ∪_{0<r<r0} V(R_r)` with `R_r = [[O_v, I_r], [J1, O_v]]` and
/// `I_r = {v >= r}`: closed under finite intersections, but its infimum
/// `R_{r0}` is not a member.
pub fn descending_corner_family<T: Scalar>(r0: T, j1: CutIdeal<T>) -> Result<SymbolicOpenFamily<T>, PatternError> {
    check_positive(&r0)?;
    check_nonzero_integral("J1", &j1)?;
    let family = ParamIdealFamily::identity(T::zero(), r0, Bound::Closed)?;
    let piece = ParamPattern::new(corner_ring(CutIdeal::unit(), j1), (0, 1), family)?;
    SymbolicOpenFamily::new(2, vec![], vec![piece])
}

/// The descending corner family together with `V(R')`,
/// `R' = [[O_v, I_{r0}], [J2, O_v]]` for `J2 ⊋ J1`: `R'` is the unique
/// minimal member, yet `R' ∩ R_r` escapes the family for every `r`.
pub fn pinned_corner_family<T: Scalar>(r0: T, j1: CutIdeal<T>, j2: CutIdeal<T>) -> Result<SymbolicOpenFamily<T>, PatternError> {
    check_positive(&r0)?;
    check_nonzero_integral("J1", &j1)?;
    check_nonzero_integral("J2", &j2)?;
    if !j2.strictly_contains(&j1) {
        return Err(PatternError::InvalidParameter(format!("J2 = {j2} must strictly contain J1 = {j1}")));
    }
    let pinned = corner_ring(CutIdeal::closed(r0.clone()), j2);
    let base = descending_corner_family(r0, j1)?;
    SymbolicOpenFamily::new(2, vec![pinned], base.pieces)
}

/// `∪_{t>0} V([[O_v, {v >= t}], [O_v, O_v]])`: the corner shrinks to zero,
/// so the infimum is the lower-triangular pattern, which is not nice, while
/// its upper set of nice rings is exactly the family.
pub fn vanishing_corner_family<T: Scalar>() -> Result<SymbolicOpenFamily<T>, PatternError> {
    let family = ParamIdealFamily::new(Some(T::zero()), None, T::one(), T::zero(), Bound::Closed)?;
    let piece = ParamPattern::new(PatternRing::full(2), (0, 1), family)?;
    SymbolicOpenFamily::new(2, vec![], vec![piece])
}

/// `R_1 ⊂ R_2 ⊂ ...` in `M_n`: every entry `O_v` except the last column
/// above the corner, which holds `I_k = {v >= scale/k}`. The ideals climb
/// strictly toward the maximal ideal without reaching it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AscendingColumnChain<T> {
    n: usize,
    scale: T,
}

impl<T: Scalar> AscendingColumnChain<T> {
    pub fn new(n: usize) -> Result<Self, PatternError> {
        Self::with_scale(n, T::one())
    }

    pub fn with_scale(n: usize, scale: T) -> Result<Self, PatternError> {
        if n < 2 {
            return Err(PatternError::InvalidParameter(format!("matrix size {n} must be at least 2")));
        }
        if scale <= T::zero() {
            return Err(PatternError::InvalidParameter(format!("scale {scale} must be positive")));
        }
        Ok(AscendingColumnChain { n, scale })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn column_ideal(&self, k: usize) -> CutIdeal<T> {
        assert!(k >= 1, "chain is indexed from 1");
        CutIdeal::closed(self.scale.clone() / T::from_int(k as i64))
    }

    /// `R_k`, `k >= 1`.
    pub fn ring(&self, k: usize) -> PatternRing<T> {
        let last = self.n - 1;
        let col = self.column_ideal(k);
        PatternRing::from_fn(self.n, |i, j| if j == last && i < last { col.clone() } else { CutIdeal::unit() })
    }

    /// `R_1, ..., R_depth`.
    pub fn truncation(&self, depth: usize) -> Result<Vec<PatternRing<T>>, PatternError> {
        if depth == 0 {
            return Err(PatternError::InvalidParameter("depth must be at least 1".into()));
        }
        Ok((1..=depth).map(|k| self.ring(k)).collect())
    }

    /// Union of the column ideals: the open cut at `inf_k scale/k = 0`.
    pub fn column_limit(&self) -> CutIdeal<T> {
        CutIdeal::open(T::zero())
    }

    /// Entrywise union of the whole chain. It is a nice ring lying above
    /// every `R_k`, but it is not one of them.
    pub fn limit_ring(&self) -> PatternRing<T> {
        let last = self.n - 1;
        let col = self.column_limit();
        PatternRing::from_fn(self.n, |i, j| if j == last && i < last { col.clone() } else { CutIdeal::unit() })
    }
}

impl<T: Scalar> AscendingChainDescriptor for AscendingColumnChain<T> {
    /// `scale/k - scale/(k+1) = scale/(k(k+1)) > 0` for all `k >= 1`, and
    /// the entries outside the column are constant, so each step is strict.
    fn strictly_ascending(&self) -> bool {
        self.scale > T::zero()
    }

    /// `R_k` bounds the chain iff its column cut contains the column limit
    /// `{v > 0}`, i.e. iff `scale/k <= 0`, which never happens.
    fn bounding_member(&self) -> Option<usize> {
        let limit = self.column_limit();
        if self.scale <= T::zero() && self.column_ideal(1).contains(&limit) {
            Some(1)
        } else {
            None
        }
    }

    fn describe(&self) -> String {
        format!("{n}x{n} last-column chain with I_k = {{v >= {s}/k}}", n = self.n, s = self.scale)
    }
}

/// Finitely many distinct pattern rings ordered by inclusion.
#[derive(Clone, Debug)]
pub struct PatternSpace<T: Scalar> {
    rings: Vec<PatternRing<T>>,
}

impl<T: Scalar> PatternSpace<T> {
    pub fn new(rings: Vec<PatternRing<T>>) -> Result<Self, PatternError> {
        if rings.is_empty() {
            return Err(PatternError::EmptyFamily);
        }
        if rings.len() > MAX_POINTS {
            return Err(PatternError::InvalidParameter(format!("{} rings exceeds {MAX_POINTS}", rings.len())));
        }
        let n = rings[0].n;
        for (a, r) in rings.iter().enumerate() {
            if r.n != n {
                return Err(PatternError::SizeMismatch { left: n, right: r.n });
            }
            if rings[..a].contains(r) {
                return Err(PatternError::InvalidParameter(format!("ring {a} is listed twice")));
            }
        }
        Ok(PatternSpace { rings })
    }

    pub fn rings(&self) -> &[PatternRing<T>] {
        &self.rings
    }

    pub fn points_of(&self, f: impl Fn(usize) -> bool) -> ElemSet {
        (0..self.rings.len()).filter(|&i| f(i)).collect()
    }
}

impl<T: Scalar> SpaceModel for PatternSpace<T> {
    fn point_count(&self) -> usize {
        self.rings.len()
    }

    fn leq(&self, x: usize, y: usize) -> bool {
        self.rings[y].contains(&self.rings[x])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    type Cut = CutIdeal<Rational64>;
    type Ring = PatternRing<Rational64>;

    fn q(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn r_r(r: Rational64, j1: Cut) -> Ring {
        corner_ring(Cut::closed(r), j1)
    }

    #[test]
    fn check_examples() {
        let rr = r_r(q(1, 2), Cut::closed(q(1, 1)));
        assert!(check_pattern(&rr).all_ok());
        let bad = Ring::full(2).with_entry(0, 1, Cut::closed(q(-1, 1)));
        let rep = check_pattern(&bad);
        assert!(!rep.multiplicatively_closed);
        assert_eq!(rep.violations[0], PatternViolation::Closure { i: 0, j: 0, k: 1 });
        assert!(Ring::full(3).is_nice());
        let zero = Ring::full(2).with_entry(1, 0, Cut::Zero);
        let rep = check_pattern(&zero);
        assert!(rep.multiplicatively_closed && rep.unital && !rep.s_nice);
        let big_diag = Ring::full(2).with_entry(0, 0, Cut::closed(q(-1, 1)));
        let rep = check_pattern(&big_diag);
        assert!(rep.unital);
        assert!(!rep.multiplicatively_closed);
        let shrunk = Ring::full(2).with_entry(1, 1, Cut::maximal()).with_entry(1, 0, Cut::maximal());
        assert!(!check_pattern(&shrunk).unital);
    }

    #[test]
    fn intersections_and_unions() {
        let j1 = Cut::closed(q(1, 1));
        assert_eq!(intersect_rings(&r_r(q(1, 3), j1.clone()), &r_r(q(1, 2), j1.clone())).unwrap(), r_r(q(1, 2), j1.clone()));
        let chain = vec![r_r(q(1, 2), j1.clone()), r_r(q(1, 3), j1.clone()), r_r(q(1, 4), j1.clone())];
        assert_eq!(union_directed(&chain).unwrap(), r_r(q(1, 4), j1.clone()));
        let a = corner_ring(Cut::closed(q(1, 1)), Cut::closed(q(2, 1)));
        let b = corner_ring(Cut::closed(q(2, 1)), Cut::closed(q(1, 1)));
        assert_eq!(union_directed(&[a.clone(), b]), Err(PatternError::NotDirected(0, 1)));
        assert_eq!(union_directed::<Rational64>(&[]), Err(PatternError::EmptyFamily));
        assert!(matches!(a.intersect(&Ring::full(3)), Err(PatternError::SizeMismatch { .. })));
    }

    #[test]
    fn corner_family_membership() {
        let r0 = q(1, 1);
        let u = descending_corner_family(r0, Cut::closed(q(2, 1))).unwrap();
        assert!(u.member_of(&r_r(q(1, 2), Cut::closed(q(2, 1)))).unwrap());
        assert!(!u.member_of(&r_r(r0, Cut::closed(q(2, 1)))).unwrap());
        assert!(u.member_of(&Ring::full(2)).unwrap());
        assert!(matches!(u.member_of(&Ring::full(3)), Err(PatternError::SizeMismatch { .. })));
        assert_eq!(u.infimum(), r_r(r0, Cut::closed(q(2, 1))));
    }

    #[test]
    fn infimum_of_generators() {
        let g = r_r(q(1, 1), Cut::closed(q(1, 1)));
        assert_eq!(SymbolicOpenFamily::principal(g.clone()).unwrap().infimum(), g);
        let g2 = r_r(q(1, 2), Cut::closed(q(1, 1)));
        let u = SymbolicOpenFamily::new(2, vec![g.clone(), g2], vec![]).unwrap();
        assert_eq!(u.infimum(), g);
    }

    #[test]
    fn constructor_guards() {
        assert!(matches!(descending_corner_family(q(0, 1), Cut::closed(q(2, 1))), Err(PatternError::InvalidParameter(_))));
        assert!(matches!(descending_corner_family(q(1, 1), Cut::Zero), Err(PatternError::InvalidParameter(_))));
        assert!(descending_corner_family(q(1, 2), Cut::maximal()).is_ok());
        let j = Cut::closed(q(2, 1));
        assert!(matches!(pinned_corner_family(q(1, 1), j.clone(), j.clone()), Err(PatternError::InvalidParameter(_))));
        assert!(pinned_corner_family(q(1, 1), Cut::closed(q(3, 1)), Cut::open(q(2, 1))).is_ok());
        assert!(matches!(AscendingColumnChain::<Rational64>::new(1), Err(PatternError::InvalidParameter(_))));
    }

    #[test]
    fn moving_diagonal_is_unsupported() {
        let fam = ParamIdealFamily::identity(q(-1, 1), q(0, 1), Bound::Closed).unwrap();
        assert!(matches!(ParamPattern::new(Ring::full(2), (0, 0), fam), Err(PatternError::UnsupportedDescriptor(_))));
        let flat = ParamIdealFamily::new(Some(q(0, 1)), Some(q(1, 1)), q(0, 1), q(1, 1), Bound::Closed).unwrap();
        assert!(matches!(
            ParamPattern::new(Ring::full(2), (0, 1), flat),
            Err(PatternError::Valuation(ValuationError::DegenerateFamily))
        ));
    }

    #[test]
    fn condition_flags_on_the_three_families() {
        let u = descending_corner_family(q(1, 1), Cut::closed(q(2, 1))).unwrap().conditions().unwrap();
        assert!(u.e && !u.d && u.f && !u.a);
        let p = pinned_corner_family(q(1, 1), Cut::closed(q(3, 1)), Cut::closed(q(2, 1))).unwrap();
        let ev = p.evaluate().unwrap();
        assert!(ev.ladder.f && !ev.ladder.e);
        assert_eq!(ev.minimal_generators, vec![0]);
        assert_eq!(ev.escapes, vec![IntersectionEscape { generator: 0, piece: 0, for_every_parameter: true }]);
        let v = vanishing_corner_family::<Rational64>().unwrap().evaluate().unwrap();
        assert!(v.ladder.c && !v.ladder.b && !v.infimum_is_nice);
        let g = SymbolicOpenFamily::principal(Ring::full(2)).unwrap().conditions().unwrap();
        assert!(g.a && g.b && g.c && g.d && g.e && g.f);
    }

    #[test]
    fn partial_escape_is_detected() {
        // generator whose corner sits inside the interval: g ∩ G(t) ∈ U only for t beyond it
        let g = corner_ring(Cut::closed(q(1, 2)), Cut::closed(q(2, 1)));
        let fam = ParamIdealFamily::identity(q(0, 1), q(1, 1), Bound::Closed).unwrap();
        let piece = ParamPattern::new(corner_ring(Cut::unit(), Cut::closed(q(2, 1))), (0, 1), fam).unwrap();
        let u = SymbolicOpenFamily::new(2, vec![g.clone()], vec![piece.clone()]).unwrap();
        assert_eq!(u.intersection_membership(&g, &piece).unwrap(), IntervalMembership::Everywhere);
        let ev = u.evaluate().unwrap();
        assert!(ev.ladder.e);
        assert!(ev.minimal_generators.is_empty());
    }

    #[test]
    fn column_chain() {
        let ch = AscendingColumnChain::<Rational64>::new(3).unwrap();
        let rings = ch.truncation(3).unwrap();
        assert!(rings.iter().all(|r| r.is_nice()));
        assert!(rings[1].strictly_contains(&rings[0]) && rings[2].strictly_contains(&rings[1]));
        assert!(ch.strictly_ascending());
        assert_eq!(ch.bounding_member(), None);
        assert!(ch.limit_ring().is_nice());
        assert_eq!(ch.truncation(1).unwrap().len(), 1);
        assert!(ch.truncation(0).is_err());
    }

    #[test]
    fn pattern_json() {
        let r = r_r(q(1, 2), Cut::maximal());
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(
            s,
            r#"{"n":2,"entries":[[{"gamma":"0","bound":"closed"},{"gamma":"1/2","bound":"closed"}],[{"gamma":"0","bound":"open"},{"gamma":"0","bound":"closed"}]]}"#
        );
        assert_eq!(serde_json::from_str::<Ring>(&s).unwrap(), r);
    }
}
