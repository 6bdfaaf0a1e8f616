//! Exact arithmetic for matrix-valued generalized Bessel orthogonal polynomials.

pub mod closed_form;
pub mod error;
pub mod exactnum;
pub mod laurent;
pub mod mops_engine;
pub mod painleve;
pub mod polymat;
pub mod report;
pub mod scalar_bessel;
pub mod structure_rh;
pub mod suites;
pub mod weights_moments;

pub use error::{Error, Result};
