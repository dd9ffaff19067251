//! Exact right-coefficient polynomials, zonal factors, closed-form Almansi
//! components and their expansion into real coordinates.

mod closed;
mod qpoly;
mod realmap;
mod zonal;

pub use closed::{zonal_map, ClosedForm, ClosedTerm, Factor};
pub use qpoly::{poly_slice_product, QPolynomial, Term};
pub use realmap::{coord_index, RealPolyMap, MAX_DEGREE};
pub use zonal::{zonal_tilde, zonal_tilde_ab};

use crate::error::Result;
use crate::index::IndexSet;
use crate::stem::StemFunction;

/// Closed form of `S^H_K(P)` as a product of zonal and power factors.
pub fn poly_component_closed_form(p: &QPolynomial, h: IndexSet, k: IndexSet) -> Result<ClosedForm> {
    ClosedForm::component(p, h, k)
}

/// The polynomial-backed stem function inducing `P`.
pub fn poly_to_stem(p: &QPolynomial) -> StemFunction {
    StemFunction::closed(ClosedForm::from_poly(p))
}

pub fn to_real_poly_map(p: &QPolynomial) -> Result<RealPolyMap> {
    ClosedForm::from_poly(p).to_real_map()
}
