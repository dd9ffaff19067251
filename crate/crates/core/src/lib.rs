//! Almansi-type decompositions of slice functions of several quaternionic
//! variables, with exact polynomial and Monte Carlo verification of the
//! associated differential and integral identities.

pub mod almansi;
pub mod calculus;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod index;
pub mod integral;
pub mod numdiff;
pub mod poly;
pub mod quat;
pub mod slice;
pub mod stem;
pub mod tolerances;
pub mod verify;

pub use almansi::{almansi_component, almansi_decompose, AlmansiDecomposition, ReconstructMode};
pub use error::{Error, Result};
pub use index::{IndexSet, MAX_VARS};
pub use poly::{ClosedForm, QPolynomial, RealPolyMap};
pub use quat::Quaternion;
pub use slice::{QPoint, SliceFunction};
pub use stem::{ComplexPoint, StemFunction, StemValue};
