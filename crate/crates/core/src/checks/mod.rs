//! Numerical verifiers for the inequalities behind the two-sided bounds.

mod bounds;
mod inequalities;
mod suites;

pub use bounds::{
    lower_constant, sweep, sweep_csv, theorem_bounds_check, upper_constant, BoundCheckReport, BoundOptions, Grade,
    SweepRow,
};
pub use inequalities::{
    hardy_check, layer_cake_check, lemma_lfun_check, prop_capacity_levels_check, InequalityReport, LemmaReport,
    LevelProfile, LevelsReport, MonotoneProfile,
};
pub use suites::{
    hardy_suite, layer_cake_suite, levels_suite, random_graph_and_function, random_level_profile,
    random_monotone_profile, SuiteSummary,
};

/// Additive slack for every comparison: `1e-7 * max(1, |rhs|)`.
pub fn tolerance(rhs: f64) -> f64 {
    1e-7 * rhs.abs().max(1.0)
}
