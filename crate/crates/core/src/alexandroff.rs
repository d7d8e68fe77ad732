//! Alexandroff topologies and the order/topology correspondence.
//!
//! A finite T0 Alexandroff space is the same thing as a finite poset: opens
//! are upper sets, closeds are lower sets, and the minimal open around `x`
//! is the principal up-set of `x`. Everything below works over any
//! [`SpaceModel`]; the symbolic (infinite) side enters only through
//! [`AscendingChainDescriptor`].

use std::collections::BTreeSet;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::order::{ElemSet, FinitePoset, NiceFamily, MAX_POINTS};

/// Exhaustive cover-based irreducibility is only run up to this many points.
pub const EXHAUSTIVE_COVER_LIMIT: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error("points {0} and {1} have the same open neighbourhoods")]
    NotT0(usize, usize),
    #[error("irreducibility of the empty set is not defined")]
    EmptySet,
    #[error("set {0} is not closed")]
    NotClosed(ElemSet),
    #[error("the open sets must include the empty set and the whole space")]
    MissingTrivialOpens,
    #[error("opens {0} and {1} have a union that is not open")]
    NotUnionClosed(ElemSet, ElemSet),
    #[error("opens {0} and {1} have an intersection that is not open")]
    NotIntersectionClosed(ElemSet, ElemSet),
    #[error("point {0} is missing from its own minimal open")]
    NotReflexive(usize),
    #[error("{y} lies in the minimal open of {x} but its own minimal open is not contained in it")]
    NotTransitive { x: usize, y: usize },
    #[error("{n} points exceeds the limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("set mentions point {index} but the space has {n} points")]
    IndexOutOfRange { index: usize, n: usize },
}

/// A finite space whose points carry a partial specialization order.
pub trait SpaceModel {
    fn point_count(&self) -> usize;

    /// `x <= y` in the specialization order, i.e. `x ∈ cl{y}`.
    fn leq(&self, x: usize, y: usize) -> bool;

    /// `{ y : y >= x }`.
    fn minimal_open(&self, x: usize) -> ElemSet {
        (0..self.point_count()).filter(|&y| self.leq(x, y)).collect()
    }

    /// `cl{x} = { y : y <= x }`.
    fn closure_point(&self, x: usize) -> ElemSet {
        (0..self.point_count()).filter(|&y| self.leq(y, x)).collect()
    }

    fn all_points(&self) -> ElemSet {
        ElemSet::full(self.point_count())
    }
}

impl SpaceModel for FinitePoset {
    fn point_count(&self) -> usize {
        self.len()
    }

    fn leq(&self, x: usize, y: usize) -> bool {
        FinitePoset::leq(self, x, y)
    }

    fn minimal_open(&self, x: usize) -> ElemSet {
        self.principal_up(x)
    }

    fn closure_point(&self, x: usize) -> ElemSet {
        self.principal_down(x)
    }
}

impl SpaceModel for NiceFamily {
    fn point_count(&self) -> usize {
        self.len()
    }

    fn leq(&self, x: usize, y: usize) -> bool {
        self.order().leq(x, y)
    }

    fn minimal_open(&self, x: usize) -> ElemSet {
        self.order().principal_up(x)
    }

    fn closure_point(&self, x: usize) -> ElemSet {
        self.order().principal_down(x)
    }
}

/// The specialization poset of a model.
pub fn to_poset<M: SpaceModel + ?Sized>(model: &M) -> FinitePoset {
    FinitePoset::from_up_unchecked((0..model.point_count()).map(|x| model.minimal_open(x)).collect())
}

/// An Alexandroff topology on `0..n`, stored as the minimal open `U_x` of each point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlexTopology {
    n: usize,
    min_open: Vec<ElemSet>,
}

impl AlexTopology {
    /// Accepts any preorder presentation: `x ∈ U_x`, and `y ∈ U_x` implies `U_y ⊆ U_x`.
    pub fn from_min_opens(min_open: Vec<ElemSet>) -> Result<Self, TopologyError> {
        let n = min_open.len();
        if n > MAX_POINTS {
            return Err(TopologyError::TooLarge { n, limit: MAX_POINTS });
        }
        let full = ElemSet::full(n);
        for (x, &ux) in min_open.iter().enumerate() {
            if let Some(index) = ux.difference(full).first() {
                return Err(TopologyError::IndexOutOfRange { index, n });
            }
            if !ux.contains(x) {
                return Err(TopologyError::NotReflexive(x));
            }
            if let Some(y) = ux.iter().find(|&y| !min_open[y].is_subset(ux)) {
                return Err(TopologyError::NotTransitive { x, y });
            }
        }
        Ok(AlexTopology { n, min_open })
    }

    /// Build from an explicit list of open sets. The list must contain the
    /// empty set and the whole space and be closed under binary unions and
    /// intersections (finite, hence Alexandroff).
    pub fn from_opens(n: usize, opens: &[ElemSet]) -> Result<Self, TopologyError> {
        if n > MAX_POINTS {
            return Err(TopologyError::TooLarge { n, limit: MAX_POINTS });
        }
        let full = ElemSet::full(n);
        let set: BTreeSet<ElemSet> = opens.iter().copied().collect();
        for o in &set {
            if let Some(index) = o.difference(full).first() {
                return Err(TopologyError::IndexOutOfRange { index, n });
            }
        }
        if !set.contains(&ElemSet::EMPTY) || !set.contains(&full) {
            return Err(TopologyError::MissingTrivialOpens);
        }
        for &a in &set {
            for &b in &set {
                if !set.contains(&a.union(b)) {
                    return Err(TopologyError::NotUnionClosed(a, b));
                }
                if !set.contains(&a.intersection(b)) {
                    return Err(TopologyError::NotIntersectionClosed(a, b));
                }
            }
        }
        let min_open = (0..n).map(|x| set.iter().filter(|o| o.contains(x)).fold(full, |acc, &o| acc.intersection(o))).collect();
        Ok(AlexTopology { n, min_open })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn min_open(&self, x: usize) -> ElemSet {
        self.min_open[x]
    }

    pub fn is_open(&self, s: ElemSet) -> bool {
        s.is_subset(ElemSet::full(self.n)) && s.iter().all(|x| self.min_open[x].is_subset(s))
    }

    pub fn is_closed(&self, s: ElemSet) -> bool {
        self.is_open(ElemSet::full(self.n).difference(s))
    }

    /// Every open set, sorted. Exponential; intended for small spaces.
    pub fn opens(&self) -> Vec<ElemSet> {
        assert!(self.n <= 24, "open-set listing is limited to 24 points");
        ElemSet::full(self.n).subsets().filter(|&s| self.is_open(s)).collect()
    }

    pub fn is_t0(&self) -> bool {
        self.t0_witness().is_none()
    }

    fn t0_witness(&self) -> Option<(usize, usize)> {
        (0..self.n).flat_map(|x| (x + 1..self.n).map(move |y| (x, y))).find(|&(x, y)| self.min_open[x] == self.min_open[y])
    }
}

impl SpaceModel for AlexTopology {
    fn point_count(&self) -> usize {
        self.n
    }

    fn leq(&self, x: usize, y: usize) -> bool {
        self.min_open[x].contains(y)
    }

    fn minimal_open(&self, x: usize) -> ElemSet {
        self.min_open[x]
    }
}

#[derive(Serialize, Deserialize)]
struct TopologyRepr {
    n: usize,
    min_open: Vec<ElemSet>,
}

impl Serialize for AlexTopology {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TopologyRepr { n: self.n, min_open: self.min_open.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlexTopology {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = TopologyRepr::deserialize(d)?;
        if repr.min_open.len() != repr.n {
            return Err(serde::de::Error::custom("min_open length does not match n"));
        }
        AlexTopology::from_min_opens(repr.min_open).map_err(serde::de::Error::custom)
    }
}

/// Opens are the upper sets of `p`.
pub fn topology_from_order(p: &FinitePoset) -> AlexTopology {
    AlexTopology { n: p.len(), min_open: (0..p.len()).map(|x| p.principal_up(x)).collect() }
}

/// `x <= y` iff `x ∈ cl{y}` iff `y ∈ U_x`. Fails on a pair of
/// topologically indistinguishable points.
pub fn specialization_order(t: &AlexTopology) -> Result<FinitePoset, TopologyError> {
    if let Some((x, y)) = t.t0_witness() {
        return Err(TopologyError::NotT0(x, y));
    }
    Ok(to_poset(t))
}

/// `V(M)`: indices of the members containing `m`.
pub fn v_of(family: &NiceFamily, m: ElemSet) -> ElemSet {
    family.containing(m)
}

/// Down-closure of `xs` in the specialization order.
pub fn closure_set<M: SpaceModel + ?Sized>(model: &M, xs: ElemSet) -> ElemSet {
    xs.iter().fold(ElemSet::EMPTY, |acc, x| acc.union(model.closure_point(x)))
}

pub fn up_closure<M: SpaceModel + ?Sized>(model: &M, xs: ElemSet) -> ElemSet {
    xs.iter().fold(ElemSet::EMPTY, |acc, x| acc.union(model.minimal_open(x)))
}

pub fn is_closed<M: SpaceModel + ?Sized>(model: &M, xs: ElemSet) -> bool {
    xs.is_subset(model.all_points()) && closure_set(model, xs) == xs
}

pub fn is_open<M: SpaceModel + ?Sized>(model: &M, xs: ElemSet) -> bool {
    xs.is_subset(model.all_points()) && up_closure(model, xs) == xs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Irreducibility {
    Irreducible,
    /// `a, b ∈ X` with no common upper bound in `X`. The closed sets
    /// "points not above a" and "points not above b" cover `X`, and neither
    /// contains it alone.
    Reducible {
        a: usize,
        b: usize,
    },
}

impl Irreducibility {
    pub fn holds(self) -> bool {
        matches!(self, Irreducibility::Irreducible)
    }
}

/// Irreducibility via directedness, with a certificate pair on failure.
pub fn is_irreducible<M: SpaceModel + ?Sized>(model: &M, xs: ElemSet) -> Result<Irreducibility, TopologyError> {
    if xs.is_empty() {
        return Err(TopologyError::EmptySet);
    }
    check_in_space(model, xs)?;
    for (a, b) in xs.pairs() {
        let common = model.minimal_open(a).intersection(model.minimal_open(b)).intersection(xs);
        if common.is_empty() {
            return Ok(Irreducibility::Reducible { a, b });
        }
    }
    Ok(Irreducibility::Irreducible)
}

fn check_in_space<M: SpaceModel + ?Sized>(model: &M, xs: ElemSet) -> Result<(), TopologyError> {
    match xs.difference(model.all_points()).first() {
        Some(index) => Err(TopologyError::IndexOutOfRange { index, n: model.point_count() }),
        None => Ok(()),
    }
}

/// Irreducibility from the closed-cover definition, restricted to the
/// closed sets `G_a = { points not above a }`.
pub fn is_irreducible_by_cover<M: SpaceModel + ?Sized>(model: &M, xs: ElemSet) -> bool {
    if xs.is_empty() {
        return false;
    }
    let all = model.all_points();
    let g: Vec<ElemSet> = (0..model.point_count()).map(|a| all.difference(model.minimal_open(a))).collect();
    !all.pairs().any(|(a, b)| covers_without_containing(xs, g[a], g[b]))
}

/// Irreducibility from the closed-cover definition over every pair of closed sets.
pub fn is_irreducible_exhaustive<M: SpaceModel + ?Sized>(model: &M, xs: ElemSet) -> Result<bool, TopologyError> {
    let n = model.point_count();
    if n > EXHAUSTIVE_COVER_LIMIT {
        return Err(TopologyError::TooLarge { n, limit: EXHAUSTIVE_COVER_LIMIT });
    }
    if xs.is_empty() {
        return Ok(false);
    }
    let closeds: Vec<ElemSet> = model.all_points().subsets().filter(|&s| is_closed(model, s)).collect();
    for &g1 in &closeds {
        for &g2 in &closeds {
            if covers_without_containing(xs, g1, g2) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn covers_without_containing(xs: ElemSet, g1: ElemSet, g2: ElemSet) -> bool {
    xs.is_subset(g1.union(g2)) && !xs.is_subset(g1) && !xs.is_subset(g2)
}

pub fn maximal_points<M: SpaceModel + ?Sized>(model: &M) -> ElemSet {
    let all = model.all_points();
    all.iter().filter(|&x| model.minimal_open(x) == ElemSet::singleton(x)).collect()
}

/// `{ cl{m} : m maximal }`, ordered by `m`.
pub fn irreducible_components<M: SpaceModel + ?Sized>(model: &M) -> Vec<ElemSet> {
    maximal_points(model).iter().map(|m| model.closure_point(m)).collect()
}

/// The point whose closure is `c`, if any.
pub fn generic_point<M: SpaceModel + ?Sized>(model: &M, c: ElemSet) -> Result<Option<usize>, TopologyError> {
    if !is_closed(model, c) {
        return Err(TopologyError::NotClosed(c));
    }
    Ok(c.iter().find(|&g| model.closure_point(g) == c))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Sobriety {
    /// Every irreducible closed set has a generic point; `checked` counts them.
    Sober { checked: usize },
    /// An irreducible closed set without a generic point.
    NotSober { closed_set: ElemSet },
}

impl Sobriety {
    pub fn holds(&self) -> bool {
        matches!(self, Sobriety::Sober { .. })
    }
}

/// Scan every closed set; the irreducible ones must each have a generic point.
pub fn is_sober<M: SpaceModel + ?Sized>(model: &M) -> Sobriety {
    let poset = to_poset(model);
    let mut checked = 0;
    for c in poset.lower_sets() {
        if c.is_empty() || !is_irreducible(model, c).map(Irreducibility::holds).unwrap_or(false) {
            continue;
        }
        checked += 1;
        if generic_point(model, c).ok().flatten().is_none() {
            return Sobriety::NotSober { closed_set: c };
        }
    }
    Sobriety::Sober { checked }
}

/// A symbolic ascending chain `R_1 <= R_2 <= ...` living in some infinite
/// space, described by finitely many exact facts.
pub trait AscendingChainDescriptor {
    /// Every step `R_k < R_{k+1}` is strict, decided for all `k` at once.
    fn strictly_ascending(&self) -> bool;

    /// A member of the chain lying above all members, if one exists.
    fn bounding_member(&self) -> Option<usize>;

    fn describe(&self) -> String;
}

/// Verdict on the closed set `I = ∪_k cl{R_k}` of a symbolic chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainSobrietyCertificate {
    pub chain: String,
    /// `I` is a union of lower sets, hence closed.
    pub closed: bool,
    /// `I` is directed (it is the down-closure of a chain), hence irreducible.
    pub irreducible: bool,
    /// A generic point `g` would satisfy `g <= R_k` for some `k` and
    /// `R_{k+1} <= g`; strict ascent rules that out.
    pub has_generic_point: bool,
    pub bounding_member: Option<usize>,
}

impl ChainSobrietyCertificate {
    /// The space is certified non-sober by this chain.
    pub fn refutes_sobriety(&self) -> bool {
        self.closed && self.irreducible && !self.has_generic_point
    }
}

pub fn chain_sobriety<D: AscendingChainDescriptor + ?Sized>(desc: &D) -> ChainSobrietyCertificate {
    let strict = desc.strictly_ascending();
    let bound = desc.bounding_member();
    ChainSobrietyCertificate {
        chain: desc.describe(),
        closed: true,
        irreducible: true,
        has_generic_point: !strict || bound.is_some(),
        bounding_member: bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::validate_poset;

    fn diamond() -> FinitePoset {
        let mut r = vec![vec![false; 4]; 4];
        for (a, b) in [(0, 0), (1, 1), (2, 2), (3, 3), (0, 1), (0, 2), (0, 3), (1, 3), (2, 3)] {
            r[a][b] = true;
        }
        validate_poset(&r).unwrap()
    }

    #[test]
    fn chain_topology() {
        let t = topology_from_order(&FinitePoset::chain(3));
        let opens = t.opens();
        let want: Vec<ElemSet> = vec![ElemSet::EMPTY, [2].into(), [1, 2].into(), [0, 1, 2].into()];
        let mut sorted = want.clone();
        sorted.sort();
        assert_eq!(opens, sorted);
        assert_eq!(specialization_order(&t).unwrap(), FinitePoset::chain(3));
    }

    #[test]
    fn discrete_and_diamond() {
        let t = topology_from_order(&FinitePoset::antichain(2));
        assert_eq!(t.opens().len(), 4);
        assert_eq!(topology_from_order(&diamond()).opens().len(), 6);
        let d = AlexTopology::from_opens(3, &ElemSet::full(3).subsets().collect::<Vec<_>>()).unwrap();
        assert_eq!(specialization_order(&d).unwrap(), FinitePoset::antichain(3));
    }

    #[test]
    fn indiscrete_pair_is_not_t0() {
        let t = AlexTopology::from_opens(2, &[ElemSet::EMPTY, [0, 1].into()]).unwrap();
        assert_eq!(specialization_order(&t), Err(TopologyError::NotT0(0, 1)));
    }

    #[test]
    fn bad_open_lists() {
        assert_eq!(AlexTopology::from_opens(2, &[[0].into(), [0, 1].into()]), Err(TopologyError::MissingTrivialOpens));
        assert!(matches!(
            AlexTopology::from_opens(3, &[ElemSet::EMPTY, [0].into(), [1].into(), [0, 1, 2].into()]),
            Err(TopologyError::NotUnionClosed(..))
        ));
        assert_eq!(
            AlexTopology::from_min_opens(vec![[0, 1].into(), [1, 2].into(), [2].into()]),
            Err(TopologyError::NotTransitive { x: 0, y: 1 })
        );
    }

    #[test]
    fn v_of_examples() {
        let f = NiceFamily::new(3, vec![[0].into(), [0, 1].into(), [0, 2].into()]).unwrap();
        assert_eq!(v_of(&f, [0].into()), [0, 1, 2].into());
        assert_eq!(v_of(&f, [1, 2].into()), ElemSet::EMPTY);
        assert_eq!(v_of(&f, [1].into()), [1].into());
        assert_eq!(v_of(&f, ElemSet::EMPTY), f.all_points());
    }

    #[test]
    fn closures() {
        let c = FinitePoset::chain(3);
        assert_eq!(closure_set(&c, [2].into()), c.all());
        assert_eq!(closure_set(&c, ElemSet::EMPTY), ElemSet::EMPTY);
        assert_eq!(closure_set(&diamond(), [1].into()), [0, 1].into());
    }

    #[test]
    fn irreducibility_examples() {
        let c = FinitePoset::chain(4);
        assert!(is_irreducible(&c, [0, 2, 3].into()).unwrap().holds());
        let d = diamond();
        assert_eq!(is_irreducible(&d, [1, 2].into()).unwrap(), Irreducibility::Reducible { a: 1, b: 2 });
        assert!(is_irreducible(&d, d.all()).unwrap().holds());
        assert!(is_irreducible_exhaustive(&d, d.all()).unwrap());
        assert!(is_irreducible_by_cover(&d, d.all()));
        assert_eq!(is_irreducible(&d, ElemSet::EMPTY), Err(TopologyError::EmptySet));
        assert!(!is_irreducible_by_cover(&d, ElemSet::EMPTY));
    }

    #[test]
    fn components() {
        let c = FinitePoset::chain(3);
        assert_eq!(irreducible_components(&c), vec![c.all()]);
        let a = FinitePoset::antichain(3);
        assert_eq!(irreducible_components(&a), vec![[0].into(), [1].into(), [2].into()]);
        assert_eq!(irreducible_components(&diamond()), vec![ElemSet::full(4)]);
    }

    #[test]
    fn generic_points() {
        let d = diamond();
        assert_eq!(generic_point(&d, d.closure_point(2)).unwrap(), Some(2));
        let a = FinitePoset::antichain(2);
        assert_eq!(generic_point(&a, a.all()).unwrap(), None);
        assert_eq!(generic_point(&d, [1].into()), Err(TopologyError::NotClosed([1].into())));
    }

    #[test]
    fn finite_spaces_are_sober() {
        assert!(is_sober(&FinitePoset::chain(1)).holds());
        assert!(is_sober(&diamond()).holds());
        assert_eq!(is_sober(&FinitePoset::antichain(3)), Sobriety::Sober { checked: 3 });
    }

    struct Stalls;
    impl AscendingChainDescriptor for Stalls {
        fn strictly_ascending(&self) -> bool {
            false
        }
        fn bounding_member(&self) -> Option<usize> {
            Some(4)
        }
        fn describe(&self) -> String {
            "stalls at 4".into()
        }
    }

    #[test]
    fn stabilizing_chain_keeps_its_generic_point() {
        let cert = chain_sobriety(&Stalls);
        assert!(cert.has_generic_point);
        assert!(!cert.refutes_sobriety());
    }

    #[test]
    fn topology_json() {
        let t = topology_from_order(&FinitePoset::chain(2));
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"n":2,"min_open":[[0,1],[1]]}"#);
        assert_eq!(serde_json::from_str::<AlexTopology>(&s).unwrap(), t);
    }
}
