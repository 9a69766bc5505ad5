//! Exact verification engine for the trigonometric R-matrix of quantum
//! affine `gl(n)`, its level-zero evaluation L-operators, and their full and
//! partial Gauss decompositions.
//!
//! Everything is computed over towers of rational-function fields built on
//! [`Rational`]; no floating point is used anywhere.

pub mod currents;
pub mod error;
pub mod export;
pub mod field;
pub mod gauss;
pub mod linalg;
pub mod loperator;
pub mod parse;
pub mod poly;
pub mod ratfunc;
pub mod relation;
pub mod report;
pub mod rmatrix;
pub mod series;
pub mod suite;

pub use error::{EngineError, Result};
pub use field::{Coeff, Field, Rational};
pub use linalg::{embed, embed_rect, swap, LegSpace, Mat};
pub use poly::Poly;
pub use ratfunc::{RatFunc, ScalarQ};
pub use report::{Verdict, VerificationReport};
pub use rmatrix::{Convention, RMatrix};
pub use series::{BiSeries, DeltaComb, Direction, TruncSeries};
pub use suite::{run, with_field, FieldTask, Param, RunConfig, Suite};
