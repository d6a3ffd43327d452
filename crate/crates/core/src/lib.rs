//! Fair influence maximization under the independent cascade model.
//!
//! Seed sets are chosen to maximize isoelastic welfare over per-community
//! influenced fractions. The inequality-aversion parameter `α < 1` moves the
//! objective from plain total influence (`α → 1`) toward the maximin fraction
//! (`α → -∞`).

pub mod cascade;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod io;
pub mod rng;
pub mod sbm;
pub mod optimize;
pub mod welfare;

pub use cascade::{
    estimate_utilities, exact_utilities, sample_sketches, SketchSet, UtilityVector, DEFAULT_SKETCHES,
};
pub use error::{Error, Result};
pub use graph::{CommunityPartition, Graph, SeedSet};
pub use welfare::{WelfareParams, PrincipleVerdict};
