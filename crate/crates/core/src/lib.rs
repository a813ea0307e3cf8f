//! Causality from spectral data: gamma matrices, the pointwise causal and
//! steepness tests on `J[D, f]`, the trace and determinant identities behind
//! them, causal order probed by functions, the algebraic Lorentzian
//! distance, and finite-dimensional candidate triples.

pub mod causal_order;
pub mod clifford;
pub mod error;
pub mod exact;
pub mod identities;
pub mod identity_suite;
pub mod linalg;
pub mod lorentz_distance;
pub mod manifold;
pub mod nc_finite;
pub mod spectral_matrix;

pub use error::{Error, Result};
