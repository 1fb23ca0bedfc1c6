//! Distance of `Pr[P = 1]` from one third: dyadic certificates, closed-form
//! bounds, exhaustive scans and a random-walk search.

mod dyadic;
mod scan;
mod walk;

pub use dyadic::{
    delta_2r_bound, delta_dr_bound, dyadic_gap_floor, dyadic_proximity, gap_to, one_third_gap, DeltaBound,
    DyadicCertificate,
};
pub use scan::{min_gap_scan, min_gap_scan_tables, monomials, ScanResult, MAX_MONOMIALS};
pub use walk::{merged_best, random_walk_ensemble, random_walk_search, Schedule, TraceEntry, WalkConfig, WalkResult};
