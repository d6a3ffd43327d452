//! Seed selectors.
//!
//! Greedy selectors evaluate objectives on a fixed [`SketchSet`](crate::cascade::SketchSet),
//! so the objective is a deterministic monotone submodular set function and the
//! lazy and naive greedy variants pick identical sequences.

mod coverage;
mod exhaustive;
mod greedy;
mod objective;
mod saturate;

pub use coverage::Evaluator;
pub use exhaustive::{
    binomial, exhaustive_opt, seed_sets, ExhaustiveObjective, ExhaustiveResult, UtilitySource,
    DEFAULT_COMBINATION_LIMIT,
};
pub use greedy::{greedy_utilitarian, greedy_welfare, run_greedy, SelectionTrace, Strategy};
pub use objective::Objective;
pub use saturate::{
    dc_lower_bounds, saturate_dc, saturate_dc_with, saturate_maximin, saturate_maximin_with, DcBounds, DcSelection, MaximinSelection, DEFAULT_TOL,
};
