//! Exact tools for low-degree polynomial samplers over F2: ANF arithmetic,
//! Walsh spectra, quadratic structure, factor regularization, subspace
//! sunflowers, exact total variation distance and gap certificates.

pub mod dist;
pub mod error;
pub mod factors;
pub mod gap;
pub mod gf2;
pub mod limits;
pub mod quadratic;
pub mod rational;
pub mod spectral;
pub mod subspace;

pub use error::{Error, Result};
pub use gf2::{PolyF2, TruthTable};
pub use rational::Rational;
