//! Fractional ideals of a valuation domain with value group ℝ.
//!
//! Every nonzero ideal is a cut of the value group: `{x : v(x) >= γ}` or
//! `{x : v(x) > γ}`. Cut points are kept exact in any [`Scalar`]; the crate
//! root fixes the default to 64-bit rationals.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::{FromPrimitive, Num, Signed};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact ordered-field scalars usable as cut points.
///
/// `Ord` rules out IEEE floats on purpose; the cut order must be decidable.
pub trait Scalar:
    Clone + Ord + fmt::Debug + fmt::Display + FromStr + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    fn from_int(k: i64) -> Self {
        Self::from_i64(k).expect("integer fits the scalar type")
    }
}

impl<T> Scalar for T where
    T: Clone + Ord + fmt::Debug + fmt::Display + FromStr + Num + Signed + FromPrimitive + Send + Sync + 'static
{
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValuationError {
    #[error("parameter interval is empty")]
    EmptyInterval,
    #[error("family has slope zero and is constant")]
    DegenerateFamily,
    #[error("union of the family is not a fractional ideal (cut points are unbounded below)")]
    UnboundedUnion,
    #[error("parameter {0} lies outside the family's interval")]
    OutsideInterval(String),
    #[error("cannot parse cut ideal from {0:?}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// `v(x) > γ`
    Open,
    /// `v(x) >= γ`
    Closed,
}

impl Bound {
    pub fn both_closed(self, other: Bound) -> Bound {
        if self == Bound::Closed && other == Bound::Closed {
            Bound::Closed
        } else {
            Bound::Open
        }
    }
}

/// A fractional ideal of `O_v`: the zero ideal, or a value cut.
///
/// The derived `Ord` is inclusion: `I <= J` iff `I ⊆ J`. Cuts are totally
/// ordered, so intersection is `min` and ideal sum is `max`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum CutIdeal<T> {
    Zero,
    Cut { gamma: T, bound: Bound },
}

impl<T: Scalar> CutIdeal<T> {
    pub fn closed(gamma: T) -> Self {
        CutIdeal::Cut { gamma, bound: Bound::Closed }
    }

    pub fn open(gamma: T) -> Self {
        CutIdeal::Cut { gamma, bound: Bound::Open }
    }

    /// `O_v` itself.
    pub fn unit() -> Self {
        Self::closed(T::zero())
    }

    /// The maximal ideal `{v > 0}`.
    pub fn maximal() -> Self {
        Self::open(T::zero())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, CutIdeal::Zero)
    }

    pub fn gamma(&self) -> Option<&T> {
        match self {
            CutIdeal::Zero => None,
            CutIdeal::Cut { gamma, .. } => Some(gamma),
        }
    }

    pub fn bound(&self) -> Option<Bound> {
        match self {
            CutIdeal::Zero => None,
            CutIdeal::Cut { bound, .. } => Some(*bound),
        }
    }

    /// `self ⊇ other`.
    pub fn contains(&self, other: &Self) -> bool {
        self >= other
    }

    pub fn strictly_contains(&self, other: &Self) -> bool {
        self > other
    }

    /// Ideal generated by all products. Open wins unless both cuts are closed.
    pub fn multiply(&self, other: &Self) -> Self {
        match (self, other) {
            (CutIdeal::Cut { gamma: g1, bound: b1 }, CutIdeal::Cut { gamma: g2, bound: b2 }) => {
                CutIdeal::Cut { gamma: g1.clone() + g2.clone(), bound: b1.both_closed(*b2) }
            }
            _ => CutIdeal::Zero,
        }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.clone().min(other.clone())
    }

    pub fn sum(&self, other: &Self) -> Self {
        self.clone().max(other.clone())
    }

    /// An ideal of `O_v` proper or not (contained in `O_v`), including zero.
    pub fn is_integral(&self) -> bool {
        Self::unit().contains(self)
    }

    /// A nonzero ideal of `O_v`.
    pub fn is_nonzero_integral(&self) -> bool {
        !self.is_zero() && self.is_integral()
    }
}

impl<T: Scalar> PartialOrd for CutIdeal<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for CutIdeal<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (CutIdeal::Zero, CutIdeal::Zero) => Ordering::Equal,
            (CutIdeal::Zero, _) => Ordering::Less,
            (_, CutIdeal::Zero) => Ordering::Greater,
            (CutIdeal::Cut { gamma: g1, bound: b1 }, CutIdeal::Cut { gamma: g2, bound: b2 }) => {
                // smaller threshold, larger ideal; at equal thresholds closed ⊋ open
                g2.cmp(g1).then(b1.cmp(b2))
            }
        }
    }
}

impl<T: fmt::Display> fmt::Debug for CutIdeal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `0`, `>=γ` or `>γ`.
impl<T: fmt::Display> fmt::Display for CutIdeal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutIdeal::Zero => f.write_str("0"),
            CutIdeal::Cut { gamma, bound: Bound::Closed } => write!(f, ">={gamma}"),
            CutIdeal::Cut { gamma, bound: Bound::Open } => write!(f, ">{gamma}"),
        }
    }
}

/// Accepts `0`/`zero`, `>=γ`, `>γ`, or a bare `γ` (closed).
impl<T: Scalar> FromStr for CutIdeal<T> {
    type Err = ValuationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let parse = |g: &str| g.trim().parse::<T>().map_err(|_| ValuationError::Parse(s.to_string()));
        if s == "0" || s == "zero" {
            return Ok(CutIdeal::Zero);
        }
        if let Some(rest) = s.strip_prefix(">=") {
            Ok(Self::closed(parse(rest)?))
        } else if let Some(rest) = s.strip_prefix('>') {
            Ok(Self::open(parse(rest)?))
        } else {
            Ok(Self::closed(parse(s)?))
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CutRepr {
    Zero { zero: bool },
    Cut { gamma: String, bound: Bound },
}

impl<T: Scalar> Serialize for CutIdeal<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            CutIdeal::Zero => CutRepr::Zero { zero: true },
            CutIdeal::Cut { gamma, bound } => CutRepr::Cut { gamma: gamma.to_string(), bound: *bound },
        }
        .serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for CutIdeal<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match CutRepr::deserialize(d)? {
            CutRepr::Zero { zero: true } => Ok(CutIdeal::Zero),
            CutRepr::Zero { zero: false } => Err(serde::de::Error::custom("\"zero\" must be true")),
            CutRepr::Cut { gamma, bound } => {
                let gamma = gamma.parse::<T>().map_err(|_| serde::de::Error::custom(format!("bad cut point {gamma:?}")))?;
                Ok(CutIdeal::Cut { gamma, bound })
            }
        }
    }
}

/// `{ Cut(slope·t + intercept, bound) : lo < t < hi }`, a chain of cut ideals.
///
/// An absent endpoint means the interval is unbounded on that side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamIdealFamily<T> {
    lo: Option<T>,
    hi: Option<T>,
    slope: T,
    intercept: T,
    bound: Bound,
}

impl<T: Scalar> Serialize for ParamIdealFamily<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ParamIdealFamily", 5)?;
        st.serialize_field("lo", &self.lo.as_ref().map(|x| x.to_string()))?;
        st.serialize_field("hi", &self.hi.as_ref().map(|x| x.to_string()))?;
        st.serialize_field("slope", &self.slope.to_string())?;
        st.serialize_field("intercept", &self.intercept.to_string())?;
        st.serialize_field("bound", &self.bound)?;
        st.end()
    }
}

impl<T: Scalar> ParamIdealFamily<T> {
    pub fn new(lo: Option<T>, hi: Option<T>, slope: T, intercept: T, bound: Bound) -> Result<Self, ValuationError> {
        if let (Some(l), Some(h)) = (&lo, &hi) {
            if l >= h {
                return Err(ValuationError::EmptyInterval);
            }
        }
        Ok(ParamIdealFamily { lo, hi, slope, intercept, bound })
    }

    /// `Cut(t, bound)` for `t ∈ (lo, hi)`.
    pub fn identity(lo: T, hi: T, bound: Bound) -> Result<Self, ValuationError> {
        Self::new(Some(lo), Some(hi), T::one(), T::zero(), bound)
    }

    pub fn lo(&self) -> Option<&T> {
        self.lo.as_ref()
    }

    pub fn hi(&self) -> Option<&T> {
        self.hi.as_ref()
    }

    pub fn slope(&self) -> &T {
        &self.slope
    }

    pub fn intercept(&self) -> &T {
        &self.intercept
    }

    pub fn bound(&self) -> Bound {
        self.bound
    }

    pub fn is_degenerate(&self) -> bool {
        self.slope.is_zero()
    }

    pub fn strict_chain(&self) -> Result<(), ValuationError> {
        if self.is_degenerate() {
            Err(ValuationError::DegenerateFamily)
        } else {
            Ok(())
        }
    }

    pub fn in_interval(&self, t: &T) -> bool {
        self.lo.as_ref().is_none_or(|l| l < t) && self.hi.as_ref().is_none_or(|h| t < h)
    }

    pub fn gamma_at(&self, t: &T) -> T {
        self.slope.clone() * t.clone() + self.intercept.clone()
    }

    pub fn member(&self, t: &T) -> Result<CutIdeal<T>, ValuationError> {
        if !self.in_interval(t) {
            return Err(ValuationError::OutsideInterval(t.to_string()));
        }
        Ok(CutIdeal::Cut { gamma: self.gamma_at(t), bound: self.bound })
    }

    /// The parameter at which the cut point equals `gamma`.
    pub fn param_for_gamma(&self, gamma: &T) -> Result<T, ValuationError> {
        self.strict_chain()?;
        Ok((gamma.clone() - self.intercept.clone()) / self.slope.clone())
    }

    /// A parameter strictly inside the interval.
    pub fn interior_point(&self) -> T {
        match (&self.lo, &self.hi) {
            (Some(l), Some(h)) => (l.clone() + h.clone()) / T::from_int(2),
            (Some(l), None) => l.clone() + T::one(),
            (None, Some(h)) => h.clone() - T::one(),
            (None, None) => T::zero(),
        }
    }

    /// Supremum of the cut points over the open interval; `None` is `+∞`.
    /// Never attained unless the family is constant.
    pub fn gamma_sup(&self) -> Option<T> {
        match self.slope.cmp(&T::zero()) {
            Ordering::Equal => Some(self.intercept.clone()),
            Ordering::Greater => self.hi.as_ref().map(|h| self.gamma_at(h)),
            Ordering::Less => self.lo.as_ref().map(|l| self.gamma_at(l)),
        }
    }

    /// Infimum of the cut points; `None` is `-∞`.
    pub fn gamma_inf(&self) -> Option<T> {
        match self.slope.cmp(&T::zero()) {
            Ordering::Equal => Some(self.intercept.clone()),
            Ordering::Greater => self.lo.as_ref().map(|l| self.gamma_at(l)),
            Ordering::Less => self.hi.as_ref().map(|h| self.gamma_at(h)),
        }
    }

    /// `∩_t Cut(γ(t))`. The limit of an unattained supremum is closed,
    /// because `v(x) >= γ(t)` for every `t` iff `v(x) >= sup γ`.
    pub fn intersect_family(&self) -> CutIdeal<T> {
        if self.is_degenerate() {
            return CutIdeal::Cut { gamma: self.intercept.clone(), bound: self.bound };
        }
        match self.gamma_sup() {
            None => CutIdeal::Zero,
            Some(s) => CutIdeal::closed(s),
        }
    }

    /// `∪_t Cut(γ(t))`, the open cut at an unattained infimum.
    pub fn union_family(&self) -> Result<CutIdeal<T>, ValuationError> {
        if self.is_degenerate() {
            return Ok(CutIdeal::Cut { gamma: self.intercept.clone(), bound: self.bound });
        }
        match self.gamma_inf() {
            None => Err(ValuationError::UnboundedUnion),
            Some(i) => Ok(CutIdeal::open(i)),
        }
    }

    /// Some member is contained in `ideal`.
    pub fn some_member_within(&self, ideal: &CutIdeal<T>) -> bool {
        if self.is_degenerate() {
            return ideal.contains(&CutIdeal::Cut { gamma: self.intercept.clone(), bound: self.bound });
        }
        match (ideal, self.gamma_sup()) {
            (CutIdeal::Zero, _) => false,
            (CutIdeal::Cut { .. }, None) => true,
            (CutIdeal::Cut { gamma, .. }, Some(sup)) => &sup > gamma,
        }
    }

    /// Every member is contained in `ideal`.
    pub fn all_members_within(&self, ideal: &CutIdeal<T>) -> bool {
        match self.union_family() {
            Ok(u) => ideal.contains(&u),
            Err(_) => false,
        }
    }

    /// `ideal` is contained in every member.
    pub fn within_all_members(&self, ideal: &CutIdeal<T>) -> bool {
        self.intersect_family().contains(ideal)
    }
}

/// Setwise model of cut ideals on a finite value grid.
///
/// A cut is represented by the grid points of `(1/denom)·ℤ ∩ [-B, B]` lying
/// in its value set. Nothing here uses the cut-level arithmetic of
/// [`CutIdeal`]; it only reads a cut's threshold and flag, so it serves as an
/// independent oracle for `multiply`, `intersect` and `sum`.
pub mod grid {
    use num_rational::Rational64;

    use super::{Bound, CutIdeal};

    #[derive(Clone, Copy, Debug, PartialEq, Eq)]
    pub struct GridConfig {
        pub q: i64,
        pub bound: i64,
    }

    impl Default for GridConfig {
        fn default() -> Self {
            GridConfig { q: 64, bound: 16 }
        }
    }

    /// Membership of grid points `k/denom`, `k ∈ [-B·denom, B·denom]`.
    #[derive(Clone, Debug, PartialEq, Eq)]
    pub struct GridSet {
        denom: i64,
        bound: i64,
        member: Vec<bool>,
    }

    fn in_value_set(cut: &CutIdeal<Rational64>, k: i64, denom: i64) -> bool {
        match cut {
            CutIdeal::Zero => false,
            CutIdeal::Cut { gamma, bound } => {
                // compare k/denom with p/q via k·q vs p·denom
                let lhs = k as i128 * *gamma.denom() as i128;
                let rhs = *gamma.numer() as i128 * denom as i128;
                match bound {
                    Bound::Closed => lhs >= rhs,
                    Bound::Open => lhs > rhs,
                }
            }
        }
    }

    impl GridSet {
        pub fn of_cut(cut: &CutIdeal<Rational64>, denom: i64, bound: i64) -> Self {
            let member = (-bound * denom..=bound * denom).map(|k| in_value_set(cut, k, denom)).collect();
            GridSet { denom, bound, member }
        }

        pub fn points(&self) -> impl Iterator<Item = i64> + '_ {
            let off = self.bound * self.denom;
            self.member.iter().enumerate().filter(|(_, &m)| m).map(move |(i, _)| i as i64 - off)
        }

        pub fn is_upward_closed(&self) -> bool {
            self.member.windows(2).all(|w| !w[0] || w[1])
        }

        fn zip(&self, other: &Self, f: impl Fn(bool, bool) -> bool) -> Self {
            assert_eq!((self.denom, self.bound), (other.denom, other.bound));
            let member = self.member.iter().zip(&other.member).map(|(&a, &b)| f(a, b)).collect();
            GridSet { denom: self.denom, bound: self.bound, member }
        }

        pub fn intersect(&self, other: &Self) -> Self {
            self.zip(other, |a, b| a && b)
        }

        pub fn union(&self, other: &Self) -> Self {
            self.zip(other, |a, b| a || b)
        }

        pub fn is_subset(&self, other: &Self) -> bool {
            self.member.iter().zip(&other.member).all(|(&a, &b)| !a || b)
        }

        /// Sumset `{a + b}` clipped to the grid.
        ///
        /// Both operands must be upward closed on the grid, so the sumset is
        /// everything from `min a + min b` up to the grid edge.
        pub fn sumset(&self, other: &Self) -> Self {
            assert!(self.is_upward_closed() && other.is_upward_closed());
            let start = match (self.points().next(), other.points().next()) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            };
            let off = self.bound * self.denom;
            let member = (0..self.member.len()).map(|i| start.is_some_and(|s| i as i64 - off >= s)).collect();
            GridSet { denom: self.denom, bound: self.bound, member }
        }

        /// Keep the points lying on the coarser grid `(1/denom')·ℤ`.
        pub fn restrict(&self, coarse_denom: i64) -> Self {
            assert_eq!(self.denom % coarse_denom, 0);
            let step = self.denom / coarse_denom;
            let off = self.bound * self.denom;
            let member = (-self.bound * coarse_denom..=self.bound * coarse_denom)
                .map(|k| self.member[(k * step + off) as usize])
                .collect();
            GridSet { denom: coarse_denom, bound: self.bound, member }
        }
    }

    /// Which cut operations disagree with the grid model for one pair.
    ///
    /// Inputs are sampled on the refined grid `1/(2q)` and results compared
    /// on `1/q`; the refinement is what lets a sum of two open thresholds
    /// land strictly above the closed one on the comparison grid. Operands
    /// should have thresholds on `(1/q)·ℤ` with `|γ| <= B/2`.
    pub fn disagreements(cfg: GridConfig, a: &CutIdeal<Rational64>, b: &CutIdeal<Rational64>) -> Vec<&'static str> {
        let fine = 2 * cfg.q;
        let ga = GridSet::of_cut(a, fine, cfg.bound);
        let gb = GridSet::of_cut(b, fine, cfg.bound);
        let on_grid = |c: &CutIdeal<Rational64>| GridSet::of_cut(c, cfg.q, cfg.bound);
        let mut bad = Vec::new();
        if ga.sumset(&gb).restrict(cfg.q) != on_grid(&a.multiply(b)) {
            bad.push("multiply");
        }
        if ga.intersect(&gb).restrict(cfg.q) != on_grid(&a.intersect(b)) {
            bad.push("intersect");
        }
        if ga.union(&gb).restrict(cfg.q) != on_grid(&a.sum(b)) {
            bad.push("sum");
        }
        if ga.is_subset(&gb) != b.contains(a) {
            bad.push("contains");
        }
        bad
    }
}
