//! Acceptance tolerances. Exact-path identities are held to round-off levels;
//! anything involving finite differences gets `FINITE_DIFFERENCE`.

pub const RECONSTRUCTION: f64 = 1e-9;
pub const ORDERED_RECONSTRUCTION: f64 = 1e-10;
pub const EXPLICIT_STEM: f64 = 1e-10;
pub const CLOSED_FORM: f64 = 1e-9;
pub const STEM_RECONSTRUCTION: f64 = 1e-10;
pub const HARMONIC: f64 = 1e-11;
pub const BIHARMONIC: f64 = 1e-11;
pub const SPHERICAL_CRF: f64 = 1e-11;
pub const FUETER: f64 = 1e-11;
pub const LAPLACIAN_SUM: f64 = 1e-11;
pub const ZONAL: f64 = 1e-10;
pub const ZONAL_EXACT: f64 = 1e-12;
pub const CIRCULARITY: f64 = 1e-11;
pub const REAL_VALUED: f64 = 1e-12;
/// Minimum imaginary magnitude that counts as "not slice preserving".
pub const NONREAL_PROBE: f64 = 1e-3;
pub const VANISHING: f64 = 1e-12;
pub const CR_SYSTEM: f64 = 1e-8;
pub const FINITE_DIFFERENCE: f64 = 1e-7;
/// First and second mean-value formulas at `m = 1` on one sample stream.
pub const MEAN_VALUE_AGREEMENT: f64 = 1e-12;
