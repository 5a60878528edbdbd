//! Exact arithmetic in the rational function field `K = Q(t)` and the
//! constructions built on it: valuations and heights, S-units and counting
//! functions, multiplicative relations, the twisted derivation `D_u`,
//! multivariate polynomials over `K` with gcd and power-free structure,
//! the linear-forms refinement used for gcd estimates, and the `d`-th root
//! pipeline for exponential polynomials.
//!
//! Every type is generic over an exact [`Scalar`] field. The aliases below
//! fix the scalar to arbitrary-precision rationals, which is what the
//! command line tool and the test suites use.

pub mod derivation;
pub mod divlattice;
pub mod error;
pub mod ffcore;
pub mod linalg;
mod modular;
pub mod mvpoly;
pub mod parse;
pub mod pisot;
pub mod place;
pub mod poly;
pub mod ratfunc;
pub mod refinement;
pub mod scalar;

pub use error::{Error, Result};
pub use ffcore::{FieldContext, Valuation};
pub use mvpoly::{Monomial, MvPoly};
pub use place::{ClosedPoint, PlaceSet};
pub use poly::Poly;
pub use ratfunc::RationalFunction;
pub use scalar::{Field, Scalar};

pub use num_rational::BigRational;

pub type QPoly = Poly<BigRational>;
pub type QRatFunc = RationalFunction<BigRational>;
pub type QPoint = ClosedPoint<BigRational>;
pub type QPlaceSet = PlaceSet<BigRational>;
pub type QMvPoly = MvPoly<BigRational>;
pub type QUnitTuple = divlattice::UnitTuple<BigRational>;
pub type QExpPoly = pisot::ExpPoly<BigRational>;

