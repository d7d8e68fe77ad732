//! The six open-set and six closed-set conditions, the implications between
//! them, and exhaustive sweeps over finite models.
//!
//! Finite families can never separate the conditions (see
//! [`finite_collapse_facts`]); the separating examples live in
//! [`search_reversals`], built on the symbolic pattern families.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::alexandroff::{
    closure_set, irreducible_components, is_irreducible, is_irreducible_by_cover, is_irreducible_exhaustive, is_sober,
    specialization_order, topology_from_order, SpaceModel, TopologyError,
};
use crate::order::{ElemSet, FinitePoset, NiceFamily};
use crate::pattern::{descending_corner_family, pinned_corner_family, vanishing_corner_family, PatternError, PatternRing};
use crate::valuation::{CutIdeal, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LadderError {
    #[error("{0} is not an open (upper) set")]
    NotOpen(ElemSet),
    #[error("{0} is not a closed (lower) set")]
    NotClosed(ElemSet),
    #[error("implication violated: {0}")]
    ImplicationViolation(Box<Violation>),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

/// Conditions on an open set `U`:
/// (a) `U = V(R0)` for a member `R0`; (b) closed under every nonempty
/// intersection; (c) `V(∩U) = U`; (d) `V(∩U) ⊆ U`; (e) closed under
/// pairwise intersection; (f) at most one minimal element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OpenLadder {
    pub a: bool,
    pub b: bool,
    pub c: bool,
    pub d: bool,
    pub e: bool,
    pub f: bool,
}

impl OpenLadder {
    /// Labels of the implications `a⇔b, b⇒c, c⇔d, d⇒e, e⇒f` that fail.
    pub fn implication_failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.a != self.b {
            out.push("a<=>b");
        }
        if self.b && !self.c {
            out.push("b=>c");
        }
        if self.c != self.d {
            out.push("c<=>d");
        }
        if self.d && !self.e {
            out.push("d=>e");
        }
        if self.e && !self.f {
            out.push("e=>f");
        }
        out
    }

    pub fn all(&self) -> bool {
        self.a && self.b && self.c && self.d && self.e && self.f
    }
}

/// Conditions on a closed set `C`:
/// (a) `C = cl{R}`; (b) every nonempty subset has a supremum in `C`;
/// (c) `sup C` exists and `cl{sup C} = C`; (d) `sup C` exists and
/// `cl{sup C} ⊆ C`; (e) closed under pairwise suprema; (f) at most one
/// maximal element. `ideal` and `sublattice` record the order-theoretic
/// shape that (e) forces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClosedLadder {
    pub a: bool,
    pub b: bool,
    pub c: bool,
    pub d: bool,
    pub e: bool,
    pub f: bool,
    pub ideal: bool,
    pub sublattice: bool,
}

impl ClosedLadder {
    /// Labels of the implications `a⇔b⇔c⇔d, d⇒e, e⇒f, e⇒ideal∧sublattice` that fail.
    pub fn implication_failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !(self.a == self.b && self.b == self.c && self.c == self.d) {
            out.push("a<=>b<=>c<=>d");
        }
        if self.d && !self.e {
            out.push("d=>e");
        }
        if self.e && !self.f {
            out.push("e=>f");
        }
        if self.e && !(self.ideal && self.sublattice) {
            out.push("e=>ideal+sublattice");
        }
        out
    }
}

/// Conditions are only asserted on nonempty sets; `∩∅` is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Evaluation<L> {
    Vacuous,
    Evaluated(L),
}

impl<L: Copy> Evaluation<L> {
    pub fn evaluated(&self) -> Option<L> {
        match self {
            Evaluation::Vacuous => None,
            Evaluation::Evaluated(l) => Some(*l),
        }
    }
}

pub fn eval_open_ladder(family: &NiceFamily, u: ElemSet) -> Result<Evaluation<OpenLadder>, LadderError> {
    let order = family.order();
    if order.check_subset(u).is_err() || !order.is_upper(u) {
        return Err(LadderError::NotOpen(u));
    }
    let Some(inter) = family.intersection_of(u) else {
        return Ok(Evaluation::Vacuous);
    };
    let in_u = |set: ElemSet| family.index_of(set).is_some_and(|i| u.contains(i));
    let a = u.iter().any(|i| family.containing(family.member(i)) == u);
    let b = u.subsets().filter(|w| !w.is_empty()).all(|w| in_u(family.intersection_of(w).expect("nonempty")));
    let v_inter = family.containing(inter);
    let c = v_inter == u;
    let d = v_inter.is_subset(u);
    let e = u.pairs().all(|(x, y)| u.contains(family.meet(x, y)));
    let f = order.minimal_elements(u).len() <= 1;
    Ok(Evaluation::Evaluated(OpenLadder { a, b, c, d, e, f }))
}

pub fn eval_closed_ladder(family: &NiceFamily, c: ElemSet) -> Result<Evaluation<ClosedLadder>, LadderError> {
    let order = family.order();
    if order.check_subset(c).is_err() || !order.is_lower(c) {
        return Err(LadderError::NotClosed(c));
    }
    if c.is_empty() {
        return Ok(Evaluation::Vacuous);
    }
    let a = c.iter().any(|r| order.principal_down(r) == c);
    let b = c.subsets().filter(|w| !w.is_empty()).all(|w| order.sup(w).is_some_and(|s| c.contains(s)));
    let sup = order.sup(c);
    let cc = sup.is_some_and(|s| order.principal_down(s) == c);
    let d = sup.is_some_and(|s| order.principal_down(s).is_subset(c));
    let e = c.pairs().all(|(x, y)| order.sup(ElemSet::from([x, y])).is_some_and(|s| c.contains(s)));
    let f = order.maximal_elements(c).len() <= 1;
    let ideal = order.is_ideal(c);
    let sublattice = c.pairs().all(|(x, y)| {
        let pair = ElemSet::from([x, y]);
        order.sup(pair).is_some_and(|s| c.contains(s)) && order.inf(pair).is_some_and(|i| c.contains(i))
    });
    Ok(Evaluation::Evaluated(ClosedLadder { a, b, c: cc, d, e, f, ideal, sublattice }))
}

/// The six greatest-element conditions on a nonempty open set:
/// greatest element; `cl U = cl{R0}`; unique maximal element; irreducible;
/// closed under pairwise suprema; every nonempty subset has a supremum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GreatestElementFlags {
    pub greatest: bool,
    pub closure_of_point: bool,
    pub unique_maximal: bool,
    pub irreducible: bool,
    pub sup_closed: bool,
    pub all_sups: bool,
}

impl GreatestElementFlags {
    pub fn all_equal(&self) -> bool {
        let v = [self.greatest, self.closure_of_point, self.unique_maximal, self.irreducible, self.sup_closed, self.all_sups];
        v.iter().all(|&x| x == v[0])
    }
}

pub fn greatest_element_flags<M: SpaceModel + ?Sized>(model: &M, u: ElemSet) -> Result<GreatestElementFlags, LadderError> {
    let order = crate::alexandroff::to_poset(model);
    if u.is_empty() {
        return Err(LadderError::Topology(TopologyError::EmptySet));
    }
    if !order.is_upper(u) {
        return Err(LadderError::NotOpen(u));
    }
    let cl_u = closure_set(model, u);
    Ok(GreatestElementFlags {
        greatest: order.greatest(u).is_some(),
        closure_of_point: order.all().iter().any(|r| order.principal_down(r) == cl_u),
        unique_maximal: order.maximal_elements(u).len() == 1,
        irreducible: is_irreducible(model, u)?.holds(),
        sup_closed: u.pairs().all(|(x, y)| order.sup(ElemSet::from([x, y])).is_some_and(|s| u.contains(s))),
        all_sups: u.subsets().filter(|h| !h.is_empty()).all(|h| order.sup(h).is_some()),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub model: String,
    pub set: ElemSet,
    pub check: String,
    pub detail: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} on {} in {}: {}", self.check, self.set, self.model, self.detail)
    }
}

/// A machine-checked example separating two adjacent open-set conditions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReversalCertificate {
    /// The implication shown not to reverse, e.g. `"(e)=>(d)"` fails.
    pub fails: String,
    pub family: String,
    pub ladder: OpenLadder,
    pub witness: String,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LadderReport {
    pub model: String,
    pub checked: usize,
    pub violations: Vec<Violation>,
    pub reversal_certificates: Vec<ReversalCertificate>,
}

impl LadderReport {
    pub fn into_result(self) -> Result<Self, LadderError> {
        match self.violations.first() {
            Some(v) => Err(LadderError::ImplicationViolation(Box::new(v.clone()))),
            None => Ok(self),
        }
    }

    /// Concatenate reports, keeping order.
    pub fn merge(model: impl Into<String>, parts: impl IntoIterator<Item = LadderReport>) -> LadderReport {
        let mut out = LadderReport { model: model.into(), checked: 0, violations: vec![], reversal_certificates: vec![] };
        for p in parts {
            out.checked += p.checked;
            out.violations.extend(p.violations);
            out.reversal_certificates.extend(p.reversal_certificates);
        }
        out
    }
}

struct Recorder<'a> {
    model: &'a str,
    checked: usize,
    violations: Vec<Violation>,
}

impl Recorder<'_> {
    fn check(&mut self, ok: bool, set: ElemSet, check: &str, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations.push(Violation { model: self.model.to_string(), set, check: check.to_string(), detail: detail() });
        }
    }
}

/// Nonempty subsets of `xs` that are irreducible and maximal among such.
fn maximal_irreducible_subsets<M: SpaceModel + ?Sized>(model: &M, xs: ElemSet) -> Result<Vec<ElemSet>, TopologyError> {
    let mut irr = Vec::new();
    for s in xs.subsets() {
        if !s.is_empty() && is_irreducible_exhaustive(model, s)? {
            irr.push(s);
        }
    }
    let mut out: Vec<ElemSet> = irr.iter().copied().filter(|s| !irr.iter().any(|t| t != s && s.is_subset(*t))).collect();
    out.sort();
    Ok(out)
}

/// Every implication and equivalence on every open, closed and nonempty
/// subset of a finite family.
pub fn verify_ladders(family: &NiceFamily) -> Result<LadderReport, LadderError> {
    let model = format!("{family:?}");
    let mut rec = Recorder { model: &model, checked: 0, violations: vec![] };
    let order = family.order();
    let all = order.all();

    for u in order.upper_sets() {
        if let Evaluation::Evaluated(l) = eval_open_ladder(family, u)? {
            let fails = l.implication_failures();
            rec.check(fails.is_empty(), u, "open ladder", || format!("{fails:?} with {l:?}"));
            let flags = greatest_element_flags(family, u)?;
            rec.check(flags.all_equal(), u, "greatest-element equivalence", || format!("{flags:?}"));
        }
    }
    for c in order.lower_sets() {
        if let Evaluation::Evaluated(l) = eval_closed_ladder(family, c)? {
            let fails = l.implication_failures();
            rec.check(fails.is_empty(), c, "closed ladder", || format!("{fails:?} with {l:?}"));
        }
    }

    for h in all.subsets().filter(|h| !h.is_empty()) {
        let has_lower = !order.lower_bounds(h).is_empty();
        let inf = order.inf(h);
        rec.check(has_lower == inf.is_some(), h, "lower bound iff infimum", || format!("lower={has_lower} inf={inf:?}"));
        if let Some(i) = inf {
            let inter = family.intersection_of(h).expect("nonempty");
            rec.check(family.member(i) == inter, h, "infimum is intersection", || format!("inf={i} inter={inter}"));
        }
        let has_upper = !order.upper_bounds(h).is_empty();
        let sup = order.sup(h);
        rec.check(has_upper == sup.is_some(), h, "upper bound iff supremum", || format!("upper={has_upper} sup={sup:?}"));

        if is_irreducible(family, h)?.holds() {
            let union = family.union_of(h);
            let member = family.index_of(union);
            rec.check(member.is_some() && member == sup, h, "irreducible union is supremum", || {
                format!("union={union} member={member:?} sup={sup:?}")
            });
        }
    }

    let comps = {
        let mut c = irreducible_components(family);
        c.sort();
        c
    };
    let brute = maximal_irreducible_subsets(family, all)?;
    rec.check(comps == brute, all, "components are maximal closures", || format!("{comps:?} vs {brute:?}"));

    let nonempty_opens = order.upper_sets().into_iter().filter(|u| !u.is_empty());
    let core = nonempty_opens.fold(all, |acc, u| acc.intersection(u));
    let greatest = order.greatest(all);
    let singleton = core.len() == 1 && greatest.is_some_and(|g| core.contains(g));
    let lattice = order.is_lattice();
    rec.check(greatest.is_some() == singleton && singleton == lattice, all, "open intersection singleton", || {
        format!("greatest={greatest:?} core={core} lattice={lattice}")
    });

    let (checked, violations) = (rec.checked, rec.violations);
    Ok(LadderReport { model, checked, violations, reversal_certificates: vec![] })
}

/// Order-level checks that make sense on any finite poset: topology round
/// trip, components, sobriety, and agreement of the irreducibility tests.
pub fn verify_poset(p: &FinitePoset) -> Result<LadderReport, LadderError> {
    let model = format!("{p:?}");
    let mut rec = Recorder { model: &model, checked: 0, violations: vec![] };
    let all = p.all();
    let back = specialization_order(&topology_from_order(p))?;
    rec.check(&back == p, all, "topology round trip", || format!("{back:?}"));
    for s in all.subsets().filter(|s| !s.is_empty()) {
        let cover = is_irreducible_by_cover(p, s);
        let exhaustive = is_irreducible_exhaustive(p, s)?;
        let directed = p.is_directed(s);
        rec.check(cover == exhaustive && exhaustive == directed, s, "irreducibility tests agree", || {
            format!("cover={cover} exhaustive={exhaustive} directed={directed}")
        });
    }
    let mut comps = irreducible_components(p);
    comps.sort();
    let brute = maximal_irreducible_subsets(p, all)?;
    rec.check(comps == brute, all, "components are maximal closures", || format!("{comps:?} vs {brute:?}"));
    let sober = is_sober(p);
    rec.check(sober.holds(), all, "finite space is sober", || format!("{sober:?}"));
    let (checked, violations) = (rec.checked, rec.violations);
    Ok(LadderReport { model, checked, violations, reversal_certificates: vec![] })
}

/// Run [`verify_ladders`] over many families in parallel; the merged
/// report keeps input order.
pub fn sweep_families(label: &str, families: &[NiceFamily]) -> Result<LadderReport, LadderError> {
    let parts: Result<Vec<_>, _> = families.par_iter().map(verify_ladders).collect();
    Ok(LadderReport::merge(label, parts?))
}

pub fn sweep_posets(label: &str, posets: &[FinitePoset]) -> Result<LadderReport, LadderError> {
    let parts: Result<Vec<_>, _> = posets.par_iter().map(verify_poset).collect();
    Ok(LadderReport::merge(label, parts?))
}

/// Counts of open sets where a finite model separates two conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct CollapseFacts {
    pub models: usize,
    pub nonempty_opens: usize,
    pub f_without_a: usize,
    pub e_without_d: usize,
    pub c_without_b: usize,
    pub not_all_equal: usize,
}

/// In a finite family every nonempty open with a unique minimal element
/// lies above it, so all six open conditions coincide. The counts here
/// should all be zero.
pub fn finite_collapse_facts(families: &[NiceFamily]) -> Result<CollapseFacts, LadderError> {
    let per: Result<Vec<CollapseFacts>, LadderError> = families
        .par_iter()
        .map(|fam| {
            let mut out = CollapseFacts { models: 1, ..Default::default() };
            for u in fam.order().upper_sets() {
                if let Evaluation::Evaluated(l) = eval_open_ladder(fam, u)? {
                    out.nonempty_opens += 1;
                    out.f_without_a += usize::from(l.f && !l.a);
                    out.e_without_d += usize::from(l.e && !l.d);
                    out.c_without_b += usize::from(l.c && !l.b);
                    let v = [l.a, l.b, l.c, l.d, l.e, l.f];
                    out.not_all_equal += usize::from(!v.iter().all(|&x| x == v[0]));
                }
            }
            Ok(out)
        })
        .collect();
    Ok(per?.into_iter().fold(CollapseFacts::default(), |acc, x| CollapseFacts {
        models: acc.models + x.models,
        nonempty_opens: acc.nonempty_opens + x.nonempty_opens,
        f_without_a: acc.f_without_a + x.f_without_a,
        e_without_d: acc.e_without_d + x.e_without_d,
        c_without_b: acc.c_without_b + x.c_without_b,
        not_all_equal: acc.not_all_equal + x.not_all_equal,
    }))
}

/// The three symbolic families on which a left-to-right implication of the
/// open ladder fails to reverse, each checked by the exact evaluator.
pub fn search_reversals<T: Scalar>() -> Result<Vec<ReversalCertificate>, LadderError> {
    let two = T::from_int(2);
    let three = T::from_int(3);

    let vanishing = vanishing_corner_family::<T>()?;
    let ev = vanishing.evaluate()?;
    let c_not_b = ReversalCertificate {
        fails: "(c)=>(b)".into(),
        family: "union over t>0 of V([[O, >=t], [O, O]])".into(),
        ladder: ev.ladder,
        witness: format!("infimum {} is not nice, yet V(infimum) is the whole family", ev.infimum),
        verified: ev.ladder.c && !ev.ladder.b && !ev.infimum_is_nice && !vanishing.member_of(&ev.infimum)?,
    };

    let j1 = CutIdeal::closed(two.clone());
    let descending = descending_corner_family(T::one(), j1.clone())?;
    let ev = descending.evaluate()?;
    let expected_inf = PatternRing::full(2).with_entry(0, 1, CutIdeal::closed(T::one())).with_entry(1, 0, j1);
    let e_not_d = ReversalCertificate {
        fails: "(e)=>(d)".into(),
        family: "union over 0<r<1 of V([[O, >=r], [>=2, O]])".into(),
        ladder: ev.ladder,
        witness: format!("infimum {} is nice but not a member", ev.infimum),
        verified: ev.ladder.e
            && !ev.ladder.d
            && ev.infimum == expected_inf
            && ev.infimum_is_nice
            && !descending.member_of(&ev.infimum)?,
    };

    let pinned = pinned_corner_family(T::one(), CutIdeal::closed(three), CutIdeal::closed(two))?;
    let ev = pinned.evaluate()?;
    let f_not_e = ReversalCertificate {
        fails: "(f)=>(e)".into(),
        family: "V([[O, >=1], [>=2, O]]) together with the union over 0<r<1 of V([[O, >=r], [>=3, O]])".into(),
        ladder: ev.ladder,
        witness:
            "the pinned generator is the unique minimal member, and its intersection with every moving member leaves the family"
                .into(),
        verified: ev.ladder.f
            && !ev.ladder.e
            && ev.minimal_generators == vec![0]
            && ev.escapes.iter().any(|x| x.for_every_parameter),
    };

    Ok(vec![c_not_b, e_not_d, f_not_e])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::enumerate_nice_families;
    use num_rational::Rational64;

    fn fam(ground: usize, sets: &[&[usize]]) -> NiceFamily {
        NiceFamily::new(ground, sets.iter().map(|s| s.iter().copied().collect()).collect()).unwrap()
    }

    #[test]
    fn principal_open_is_all_true() {
        let f = fam(3, &[&[], &[0], &[1], &[0, 1]]);
        let u = f.containing(ElemSet::from([0]));
        let l = eval_open_ladder(&f, u).unwrap().evaluated().unwrap();
        assert!(l.all());
        assert_eq!(eval_open_ladder(&f, ElemSet::EMPTY).unwrap(), Evaluation::Vacuous);
        assert!(matches!(eval_open_ladder(&f, ElemSet::from([0])), Err(LadderError::NotOpen(_))));
    }

    #[test]
    fn antichain_closed_pair() {
        let f = fam(2, &[&[], &[0], &[1]]);
        let c = ElemSet::from([0, 1, 2]);
        let l = eval_closed_ladder(&f, c).unwrap().evaluated().unwrap();
        assert!(!l.e && !l.f && !l.a);
        let p = f.order().principal_down(1);
        assert!(eval_closed_ladder(&f, p).unwrap().evaluated().unwrap().a);
        assert!(matches!(eval_closed_ladder(&f, ElemSet::from([1])), Err(LadderError::NotClosed(_))));
    }

    #[test]
    fn diamond_without_top_fails_everything() {
        let f = fam(2, &[&[], &[0], &[1]]);
        let flags = greatest_element_flags(&f, f.order().all()).unwrap();
        assert!(flags.all_equal() && !flags.greatest);
        let chain = fam(2, &[&[], &[0], &[0, 1]]);
        for u in chain.order().upper_sets().into_iter().filter(|u| !u.is_empty()) {
            assert!(greatest_element_flags(&chain, u).unwrap().greatest);
        }
    }

    #[test]
    fn small_sweep_is_clean() {
        let fams = enumerate_nice_families(3, 5).unwrap();
        let rep = sweep_families("ground 3", &fams).unwrap();
        assert!(rep.violations.is_empty(), "{:?}", rep.violations.first());
        let facts = finite_collapse_facts(&fams).unwrap();
        assert_eq!((facts.f_without_a, facts.e_without_d, facts.c_without_b, facts.not_all_equal), (0, 0, 0, 0));
    }

    #[test]
    fn reversals_verify() {
        let certs = search_reversals::<Rational64>().unwrap();
        assert_eq!(certs.len(), 3);
        assert!(certs.iter().all(|c| c.verified), "{certs:?}");
    }
}
