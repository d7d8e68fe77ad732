//! Prime covers of nice subalgebras, modeled abstractly.
//!
//! Each member `R` of a finite family carries the set of primes of `S` that
//! some prime of `R` lies over. Passing to a smaller member can only enlarge
//! that set. The step "find a smaller member covering one more prime" is
//! supplied by a [`RefinementOracle`], whose contract is checked on every call.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::order::{enumerate_nice_families, ElemSet, NiceFamily, OrderError, MAX_POINTS};

/// Above this many steps a lazy chain refuses to evaluate.
pub const LAZY_DEPTH_CAP: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpectralError {
    #[error("member {0} is not in the family")]
    UnknownMember(usize),
    #[error("prime {0} is not in the model")]
    UnknownPrime(usize),
    #[error("{0} primes exceeds the limit of {MAX_POINTS}")]
    TooManyPrimes(usize),
    #[error("expected {expected} covers, got {got}")]
    CoverCount { expected: usize, got: usize },
    #[error("member {smaller} is inside member {larger} but covers fewer primes")]
    NotAntitone { smaller: usize, larger: usize },
    #[error("prime {prime} is already covered by member {member}")]
    AlreadyCovered { member: usize, prime: usize },
    #[error("no member below {member} covers prime {prime}")]
    NoRefinement { member: usize, prime: usize },
    #[error("oracle returned {returned} for ({member}, {prime}): {reason}")]
    OracleViolation { member: usize, prime: usize, returned: usize, reason: String },
    #[error("closed set is empty")]
    EmptyClosedSet,
    #[error("{0} is not a closed (lower) set")]
    NotClosed(ElemSet),
    #[error("depth {requested} exceeds the cap {cap}")]
    DepthExceeded { requested: usize, cap: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Order(#[from] OrderError),
}

/// Given a member `r1` and a prime `p` it misses, propose a strictly smaller
/// member whose cover contains `cover(r1) ∪ {p}`.
pub trait RefinementOracle: Send + Sync {
    fn propose(&self, model: &SpectralModel, r1: usize, p: usize) -> Option<usize>;

    fn name(&self) -> &'static str;
}

/// `R1 ∩ R2` for the first member `R2` covering the prime.
#[derive(Debug, Clone, Copy, Default)]
pub struct IntersectionOracle;

impl RefinementOracle for IntersectionOracle {
    fn propose(&self, model: &SpectralModel, r1: usize, p: usize) -> Option<usize> {
        let r2 = (0..model.family.len()).find(|&r| model.covers[r].contains(p))?;
        Some(model.family.meet(r1, r2))
    }

    fn name(&self) -> &'static str {
        "intersection"
    }
}

/// Among the members covering the prime, intersect with the one that
/// leaves the fewest primes missing.
#[derive(Debug, Clone, Copy, Default)]
pub struct GreedyOracle;

impl RefinementOracle for GreedyOracle {
    fn propose(&self, model: &SpectralModel, r1: usize, p: usize) -> Option<usize> {
        (0..model.family.len())
            .filter(|&r| model.covers[r].contains(p))
            .map(|r2| model.family.meet(r1, r2))
            .max_by_key(|&m| (model.covers[m].len(), std::cmp::Reverse(m)))
    }

    fn name(&self) -> &'static str {
        "greedy"
    }
}

#[derive(Clone)]
pub struct SpectralModel {
    family: NiceFamily,
    primes: usize,
    covers: Vec<ElemSet>,
    oracle: Arc<dyn RefinementOracle>,
}

impl fmt::Debug for SpectralModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralModel")
            .field("family", &self.family)
            .field("primes", &self.primes)
            .field("covers", &self.covers)
            .field("oracle", &self.oracle.name())
            .finish()
    }
}

/// The outcome of iterating refinement until every prime is covered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoRun {
    pub start: usize,
    pub member: usize,
    pub missing_at_start: usize,
    pub steps: usize,
    pub path: Vec<usize>,
}

/// The no-LO conditions that a finite model can decide.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NoLoReport {
    /// No member covers every prime.
    pub no_lo_member: bool,
    /// The realized cover sets have no maximal element.
    pub no_maximal_cover: bool,
    /// `no_lo_member ⇒ no_maximal_cover` on this model.
    pub first_implies_second: bool,
    /// A finite model always has a maximal realized cover, so "no LO member
    /// but a maximal cover" is expected here and says nothing about
    /// infinite families. The chain conditions are checked on lazy models.
    pub finite_artifact: bool,
}

impl SpectralModel {
    pub fn new(
        family: NiceFamily,
        primes: usize,
        covers: Vec<ElemSet>,
        oracle: Arc<dyn RefinementOracle>,
    ) -> Result<Self, SpectralError> {
        if primes > MAX_POINTS {
            return Err(SpectralError::TooManyPrimes(primes));
        }
        if covers.len() != family.len() {
            return Err(SpectralError::CoverCount { expected: family.len(), got: covers.len() });
        }
        let all = ElemSet::full(primes);
        for c in &covers {
            if let Some(p) = c.difference(all).first() {
                return Err(SpectralError::UnknownPrime(p));
            }
        }
        let order = family.order();
        for (small, large) in order.all().pairs().flat_map(|(a, b)| [(a, b), (b, a)]) {
            if order.leq(small, large) && !covers[large].is_subset(covers[small]) {
                return Err(SpectralError::NotAntitone { smaller: small, larger: large });
            }
        }
        Ok(SpectralModel { family, primes, covers, oracle })
    }

    /// `cover(R) = {P : R ⊆ w for some w ∈ witnesses[P]}`, which is
    /// antitone by construction.
    pub fn from_witnesses(
        family: NiceFamily,
        witnesses: &[ElemSet],
        oracle: Arc<dyn RefinementOracle>,
    ) -> Result<Self, SpectralError> {
        let order = family.order();
        let covers = (0..family.len())
            .map(|r| (0..witnesses.len()).filter(|&p| witnesses[p].iter().any(|w| order.leq(r, w))).collect())
            .collect();
        Self::new(family, witnesses.len(), covers, oracle)
    }

    pub fn with_oracle(mut self, oracle: Arc<dyn RefinementOracle>) -> Self {
        self.oracle = oracle;
        self
    }

    pub fn family(&self) -> &NiceFamily {
        &self.family
    }

    pub fn primes(&self) -> usize {
        self.primes
    }

    pub fn all_primes(&self) -> ElemSet {
        ElemSet::full(self.primes)
    }

    pub fn oracle_name(&self) -> &'static str {
        self.oracle.name()
    }

    fn check_member(&self, r: usize) -> Result<(), SpectralError> {
        if r < self.family.len() {
            Ok(())
        } else {
            Err(SpectralError::UnknownMember(r))
        }
    }

    pub fn cover(&self, r: usize) -> Result<ElemSet, SpectralError> {
        self.check_member(r)?;
        Ok(self.covers[r])
    }

    pub fn satisfies_lo(&self, r: usize) -> Result<bool, SpectralError> {
        Ok(self.cover(r)? == self.all_primes())
    }

    pub fn lo_members(&self) -> ElemSet {
        (0..self.family.len()).filter(|&r| self.covers[r] == self.all_primes()).collect()
    }

    /// One refinement step, with the oracle's answer checked.
    pub fn refine(&self, r1: usize, p: usize) -> Result<usize, SpectralError> {
        self.check_member(r1)?;
        if p >= self.primes {
            return Err(SpectralError::UnknownPrime(p));
        }
        if self.covers[r1].contains(p) {
            return Err(SpectralError::AlreadyCovered { member: r1, prime: p });
        }
        let r = self.oracle.propose(self, r1, p).ok_or(SpectralError::NoRefinement { member: r1, prime: p })?;
        let violation =
            |reason: &str| SpectralError::OracleViolation { member: r1, prime: p, returned: r, reason: reason.into() };
        if r >= self.family.len() {
            return Err(violation("not a member"));
        }
        if !self.family.order().lt(r, r1) {
            return Err(violation("not strictly inside the starting member"));
        }
        if !self.covers[r].contains(p) || !self.covers[r1].is_subset(self.covers[r]) {
            return Err(violation("cover does not grow as required"));
        }
        Ok(r)
    }

    /// Refine until every prime is covered. Each step covers at least one new
    /// prime, so this takes at most as many steps as primes are missing.
    pub fn lo_from_cofinite(&self, r1: usize) -> Result<LoRun, SpectralError> {
        let missing_at_start = self.all_primes().difference(self.cover(r1)?).len();
        let mut path = vec![r1];
        let mut r = r1;
        while let Some(p) = self.all_primes().difference(self.covers[r]).first() {
            r = self.refine(r, p)?;
            path.push(r);
        }
        Ok(LoRun { start: r1, member: r, missing_at_start, steps: path.len() - 1, path })
    }

    /// An LO member inside a nonempty closed set: `R ∩ R2` for a global LO
    /// member `R` and any `R2 ∈ C`. `None` when no member satisfies LO.
    pub fn closed_set_lo(&self, c: ElemSet) -> Result<Option<usize>, SpectralError> {
        let order = self.family.order();
        order.check_subset(c)?;
        if c.is_empty() {
            return Err(SpectralError::EmptyClosedSet);
        }
        if !order.is_lower(c) {
            return Err(SpectralError::NotClosed(c));
        }
        let Some(lo) = self.lo_members().first() else {
            return Ok(None);
        };
        let r2 = c.first().expect("nonempty");
        Ok(Some(self.family.meet(lo, r2)))
    }

    pub fn no_lo_report(&self) -> NoLoReport {
        let no_lo_member = self.lo_members().is_empty();
        let realized: Vec<ElemSet> = self.covers.clone();
        let has_maximal = realized.iter().any(|y| !realized.iter().any(|z| y.is_subset(*z) && y != z));
        let no_maximal_cover = !has_maximal;
        NoLoReport {
            no_lo_member,
            no_maximal_cover,
            first_implies_second: !no_lo_member || no_maximal_cover,
            finite_artifact: no_lo_member && !no_maximal_cover,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ModelRepr {
    family: NiceFamily,
    primes: usize,
    cover: BTreeMap<String, Vec<usize>>,
}

impl Serialize for SpectralModel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let cover = self.covers.iter().enumerate().map(|(i, c)| (i.to_string(), c.to_vec())).collect();
        ModelRepr { family: self.family.clone(), primes: self.primes, cover }.serialize(s)
    }
}

/// Deserialized models use [`IntersectionOracle`].
impl<'de> Deserialize<'de> for SpectralModel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = ModelRepr::deserialize(d)?;
        let mut covers = vec![ElemSet::EMPTY; repr.family.len()];
        for (k, v) in repr.cover {
            let i: usize = k.parse().map_err(D::Error::custom)?;
            let slot = covers.get_mut(i).ok_or_else(|| D::Error::custom(format!("member {i} out of range")))?;
            *slot = v.into_iter().filter(|&p| p < MAX_POINTS).collect();
        }
        SpectralModel::new(repr.family, repr.primes, covers, Arc::new(IntersectionOracle)).map_err(D::Error::custom)
    }
}

/// Seeded fixtures: every family on a ground set of at most `max_ground`
/// points with at most `max_members` members, each paired with `per_family`
/// random witness assignments over `1..=max_primes` primes. Roughly one in
/// four assignments leaves some prime without witnesses, so no member covers it.
pub fn fixture_models(
    seed: u64,
    max_ground: usize,
    max_members: usize,
    max_primes: usize,
    per_family: usize,
) -> Result<Vec<SpectralModel>, SpectralError> {
    if max_primes == 0 || max_primes > MAX_POINTS {
        return Err(SpectralError::InvalidParameter(format!("prime count {max_primes} out of range")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for ground in 0..=max_ground {
        for family in enumerate_nice_families(ground, max_members)? {
            for _ in 0..per_family {
                let primes = rng.gen_range(1..=max_primes);
                let starve = rng.gen_bool(0.25);
                let witnesses: Vec<ElemSet> = (0..primes)
                    .map(|p| {
                        if starve && p == 0 {
                            return ElemSet::EMPTY;
                        }
                        let mut w: ElemSet = (0..family.len()).filter(|_| rng.gen_bool(0.4)).collect();
                        if w.is_empty() {
                            w.insert(rng.gen_range(0..family.len()));
                        }
                        w
                    })
                    .collect();
                out.push(SpectralModel::from_witnesses(family.clone(), &witnesses, Arc::new(IntersectionOracle))?);
            }
        }
    }
    Ok(out)
}

/// Which primes the `k`-th member of a lazy chain covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ChainRule {
    /// The first `k` primes.
    FirstPrimes,
    /// The first `step·k` primes.
    Stride { step: usize },
}

/// A descending chain `R_1 ⊃ R_2 ⊃ ...` generated on demand, where
/// `R_k` covers an initial segment of the prime numbers that grows with `k`.
/// There are infinitely many primes, so no member ever covers them all.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LazyChainModel {
    rule: ChainRule,
    depth_cap: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LazyChainReport {
    pub rule: ChainRule,
    pub depth: usize,
    pub pairs_checked: usize,
    /// `i < j ⇒ R_i ⊃ R_j`.
    pub strictly_descending: bool,
    /// `i < j ⇒ cover(R_i) ⊂ cover(R_j)`.
    pub covers_strictly_grow: bool,
    /// Each closed set `cl{R_m}` contains the tail `R_m ⊃ R_{m+1} ⊃ ...`
    /// with strictly growing covers, for every `m` up to the depth.
    pub every_tail_grows: bool,
    /// A prime outside `cover(R_k)` was exhibited for every `k`.
    pub never_full: bool,
    pub largest_prime: u64,
}

impl LazyChainReport {
    pub fn holds(&self) -> bool {
        self.strictly_descending && self.covers_strictly_grow && self.every_tail_grows && self.never_full
    }
}

impl LazyChainModel {
    pub fn new(rule: ChainRule) -> Result<Self, SpectralError> {
        if let ChainRule::Stride { step: 0 } = rule {
            return Err(SpectralError::InvalidParameter("stride must be positive".into()));
        }
        Ok(LazyChainModel { rule, depth_cap: LAZY_DEPTH_CAP })
    }

    pub fn with_depth_cap(mut self, cap: usize) -> Self {
        self.depth_cap = cap.min(LAZY_DEPTH_CAP);
        self
    }

    pub fn rule(&self) -> ChainRule {
        self.rule
    }

    /// Containment along the chain: `R_j ⊆ R_i` iff `i <= j`.
    pub fn contains(&self, i: usize, j: usize) -> bool {
        i <= j
    }

    pub fn cover_len(&self, k: usize) -> usize {
        match self.rule {
            ChainRule::FirstPrimes => k,
            ChainRule::Stride { step } => step * k,
        }
    }

    /// `cover(R_k)` as actual primes.
    pub fn cover(&self, k: usize) -> Vec<u64> {
        first_primes(self.cover_len(k))
    }

    pub fn verify(&self, depth: usize) -> Result<LazyChainReport, SpectralError> {
        if depth > self.depth_cap {
            return Err(SpectralError::DepthExceeded { requested: depth, cap: self.depth_cap });
        }
        if depth == 0 {
            return Err(SpectralError::InvalidParameter("depth must be at least 1".into()));
        }
        let primes = first_primes(self.cover_len(depth + 1));
        let covers: Vec<&[u64]> = (1..=depth + 1).map(|k| &primes[..self.cover_len(k)]).collect();
        let proper_subset = |a: &[u64], b: &[u64]| a.len() < b.len() && a.iter().all(|x| b.binary_search(x).is_ok());
        let mut pairs = 0;
        let mut descending = true;
        let mut grows = true;
        for i in 0..depth {
            for j in i + 1..depth {
                pairs += 1;
                descending &= self.contains(i + 1, j + 1) && !self.contains(j + 1, i + 1);
                grows &= proper_subset(covers[i], covers[j]);
            }
        }
        let every_tail_grows = (0..depth).all(|m| (m..depth.saturating_sub(1)).all(|k| proper_subset(covers[k], covers[k + 1])));
        let never_full = (0..depth).all(|k| covers[k + 1].iter().any(|p| covers[k].binary_search(p).is_err()));
        Ok(LazyChainReport {
            rule: self.rule,
            depth,
            pairs_checked: pairs,
            strictly_descending: descending,
            covers_strictly_grow: grows,
            every_tail_grows,
            never_full,
            largest_prime: primes.last().copied().unwrap_or(0),
        })
    }
}

/// The first `n` prime numbers, by trial division against earlier primes.
pub fn first_primes(n: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(n);
    let mut c = 2u64;
    while out.len() < n {
        if out.iter().take_while(|&&p| p * p <= c).all(|&p| !c.is_multiple_of(p)) {
            out.push(c);
        }
        c += 1;
    }
    out
}
