//! Polynomials over F2 in algebraic normal form, truth tables and bit-packed
//! linear algebra.

pub mod matrix;
pub mod poly;
pub mod restrict;
pub mod truth_table;

pub use matrix::{BitMatrix, LinearBasis, Rref};
pub use poly::{common_vars, parse_poly_lines, Monomial, PolyF2, MAX_VARS};
pub use restrict::{restrict_affine, Restriction};
pub use truth_table::{anf_from_bits, anf_from_truth_table, compose, truth_table, TruthTable};
