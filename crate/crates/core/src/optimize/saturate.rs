use serde::{Deserialize, Serialize};

use super::coverage::Evaluator;
use super::greedy::{greedy_utilitarian, run_greedy, SelectionTrace, Strategy};
use super::objective::Objective;
use crate::cascade::{estimate_utilities, sample_sketches, SketchSet, UtilityVector};
use crate::error::{Error, Result};
use crate::graph::{induced_within_community_subgraph, CommunityPartition, Graph, SeedSet};
use crate::rng::derive_seed;

pub const DEFAULT_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct MaximinSelection {
    pub seeds: SeedSet,
    pub trace: SelectionTrace,
    /// Largest level found feasible by the binary search.
    pub gamma: f64,
    pub utilities: UtilityVector,
}

/// Per-community utility achievable with a proportional budget spent internally.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DcBounds {
    pub bounds: Vec<f64>,
    pub budgets: Vec<usize>,
    /// Seeds behind each bound, in ids of the full graph.
    pub seeds: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DcSelection {
    pub seeds: SeedSet,
    pub trace: SelectionTrace,
    pub feasible: bool,
    pub utilities: UtilityVector,
    /// `u_c - U_c` per community.
    pub slack: Vec<f64>,
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("tolerance must lie in (0, 1), got {tol}")))
    }
}

/// Maximin selection by truncation: binary search on `γ ∈ [0, 1]`, where each
/// level runs a greedy on `Σ_c min(u_c, γ)`. A level is feasible when the greedy
/// reaches `N_C·γ` within `tol`. Budget left after saturation goes to total
/// influence.
pub fn saturate_maximin(
    sk: &SketchSet,
    part: &CommunityPartition,
    k: usize,
    tol: f64,
) -> Result<MaximinSelection> {
    saturate_maximin_with(&Evaluator::new(sk, part)?, k, tol)
}

/// [`saturate_maximin`] on an existing evaluator.
pub fn saturate_maximin_with(ev: &Evaluator, k: usize, tol: f64) -> Result<MaximinSelection> {
    check_tol(tol)?;
    let nc = ev.num_communities() as f64;
    let run = |gamma: f64| -> Result<(SeedSet, SelectionTrace, bool)> {
        let objective = Objective::Truncated { gamma };
        let (seeds, trace) = run_greedy(ev, &objective, Some(&Objective::Total), k, Strategy::Lazy)?;
        let counts = ev.reach_counts(seeds.vertices());
        let feasible = objective.value(&counts, ev.scale()) >= nc * gamma - tol;
        Ok((seeds, trace, feasible))
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let (mut best_seeds, mut best_trace, _) = run(0.0)?;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let (seeds, trace, feasible) = run(mid)?;
        if feasible {
            lo = mid;
            best_seeds = seeds;
            best_trace = trace;
        } else {
            hi = mid;
        }
    }
    let utilities = ev.utilities(best_seeds.vertices());
    Ok(MaximinSelection { seeds: best_seeds, trace: best_trace, gamma: lo, utilities })
}

/// `U_c` from a utilitarian greedy on community `c`'s induced subgraph with budget
/// `⌊k n_c / n⌋` and its own sketches, seeded from `(master_seed, c)`.
pub fn dc_lower_bounds(
    g: &Graph,
    part: &CommunityPartition,
    k: usize,
    r: usize,
    master_seed: u64,
) -> Result<DcBounds> {
    part.check_graph(g)?;
    let n = g.n();
    if k > n {
        return Err(Error::BudgetTooLarge { k, n });
    }
    let mut out = DcBounds { bounds: Vec::new(), budgets: Vec::new(), seeds: Vec::new() };
    for c in 0..part.num_communities() {
        let budget = k * part.size(c) / n;
        out.budgets.push(budget);
        if budget == 0 {
            out.bounds.push(0.0);
            out.seeds.push(Vec::new());
            continue;
        }
        let sub = induced_within_community_subgraph(g, part, c)?;
        let local = CommunityPartition::new(vec![0; sub.graph.n()])?;
        let sk = sample_sketches(&sub.graph, r, derive_seed(master_seed, &[c as u64]))?;
        let (seeds, _) = greedy_utilitarian(&sk, &local, budget)?;
        out.bounds.push(estimate_utilities(&sk, &seeds, &local)?.values()[0]);
        out.seeds.push(sub.original_ids(seeds.vertices()));
    }
    Ok(out)
}

/// Greedy on the normalized saturation `Σ_c min(u_c / U_c, 1)`; once it stops
/// improving, the remaining budget goes to total influence.
pub fn saturate_dc(
    sk: &SketchSet,
    part: &CommunityPartition,
    k: usize,
    bounds: &DcBounds,
    tol: f64,
) -> Result<DcSelection> {
    saturate_dc_with(&Evaluator::new(sk, part)?, k, bounds, tol)
}

/// [`saturate_dc`] on an existing evaluator.
pub fn saturate_dc_with(ev: &Evaluator, k: usize, bounds: &DcBounds, tol: f64) -> Result<DcSelection> {
    check_tol(tol)?;
    let nc = ev.num_communities();
    if bounds.bounds.len() != nc || bounds.budgets.len() != nc {
        return Err(Error::LengthMismatch { left: bounds.bounds.len(), right: nc });
    }
    if bounds.budgets.iter().sum::<usize>() > k {
        return Err(Error::InvalidParameter("DC budgets exceed k; bounds were computed for another budget".into()));
    }
    let objective = Objective::Saturation { bounds: bounds.bounds.clone() };
    let (seeds, trace) = run_greedy(ev, &objective, Some(&Objective::Total), k, Strategy::Lazy)?;
    let utilities = ev.utilities(seeds.vertices());
    let slack: Vec<f64> = utilities.values().iter().zip(&bounds.bounds).map(|(u, b)| u - b).collect();
    let feasible = slack.iter().all(|&s| s >= -tol);
    Ok(DcSelection { seeds, trace, feasible, utilities, slack })
}
