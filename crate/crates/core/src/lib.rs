//! Finite and symbolic models of the space of nice subalgebras.
//!
//! * [`order`]: finite posets, enumeration up to isomorphism, and
//!   intersection-closed set families.
//! * [`alexandroff`]: upper-set topologies, closures, irreducibility,
//!   components, generic points and sobriety.
//! * [`valuation`]: cut ideals of a valuation ring with value group `ℝ`
//!   and monotone parametric chains of them.
//! * [`pattern`]: pattern subrings of `M_n(F)` and symbolic open families.
//! * [`ladders`]: open- and closed-set conditions, implication sweeps,
//!   and the separating examples.
//! * [`spectra`]: prime covers, lying over, and refinement.
//!
//! The valuation and pattern layers are generic over [`valuation::Scalar`];
//! the aliases below fix the scalar to exact rationals.

#![allow(clippy::needless_range_loop)]

pub mod alexandroff;
pub mod ladders;
pub mod order;
pub mod pattern;
pub mod spectra;
pub mod valuation;

pub use alexandroff::{AlexTopology, SpaceModel, TopologyError};
pub use ladders::{ClosedLadder, LadderError, LadderReport, OpenLadder};
pub use order::{ElemSet, FinitePoset, NiceFamily, OrderError};
pub use pattern::PatternError;
pub use spectra::{SpectralError, SpectralModel};
pub use valuation::{Bound, Scalar, ValuationError};

pub type Rational = num_rational::Rational64;
pub type BigRational = num_rational::BigRational;

pub type Cut = valuation::CutIdeal<Rational>;
pub type IdealFamily = valuation::ParamIdealFamily<Rational>;
pub type Pattern = pattern::PatternRing<Rational>;
pub type OpenFamily = pattern::SymbolicOpenFamily<Rational>;

pub type BigCut = valuation::CutIdeal<BigRational>;
pub type BigPattern = pattern::PatternRing<BigRational>;
