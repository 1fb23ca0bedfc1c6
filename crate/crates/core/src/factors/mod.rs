//! Factors of polynomials: regularity certificates, refinement, the ψ
//! bookkeeping function, regularization of quadratic collections and
//! sunflower pairwise regularization.

mod factor;
pub mod greedy;
pub mod growth;
pub mod pairwise;
pub mod rank21;
pub mod regularity;

pub use factor::{invlex_compare, Factor};
pub use greedy::greedy_independent_support;
pub use growth::{ckl2, psi, psi_bounded, psi_star, psi_star_bounded, CklProfile, GrowthFn, PsiOutcome};
pub use pairwise::{pairwise_sunflower_regularize, verify_pairwise, Case, PairwiseChecks, PairwiseOutcome};
pub use rank21::{regularize_rank21, Rank21Output, Rank21Step};
pub use regularity::{
    factor_rank, heuristic_regularity, min_rank_combination, refine_step, regularity_witness, regularity_witness_polys,
    regularize, verify_reconstruction, HeuristicVerdict, Refinement, RegularityCertificate, Regularization, Violation,
    Witness,
};
