use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::coverage::{Coverage, Evaluator};
use super::objective::Objective;
use crate::cascade::{Scratch, SketchSet};
use crate::error::{Error, Result};
use crate::graph::{CommunityPartition, SeedSet};
use crate::welfare::WelfareParams;

/// Gains at or below this count as zero when deciding that an objective is exhausted.
pub(crate) const STUCK: f64 = 1e-12;

/// Record of one greedy run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SelectionTrace {
    /// Seeds in the order they were picked.
    pub chosen: Vec<usize>,
    /// Primary objective value after each pick.
    pub objective_after_each: Vec<f64>,
    /// Number of marginal-gain evaluations.
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Priority queue of cached, possibly stale, marginal gains.
    #[default]
    Lazy,
    /// Re-evaluate every candidate each round.
    Naive,
}

/// Greedy maximization of `objective` with budget `k`. When `fallback` is given,
/// the run switches to it for the remaining budget once no candidate improves the
/// primary objective. Ties go to the lowest vertex id.
pub fn run_greedy(
    ev: &Evaluator,
    objective: &Objective,
    fallback: Option<&Objective>,
    k: usize,
    strategy: Strategy,
) -> Result<(SeedSet, SelectionTrace)> {
    let n = ev.vertex_count();
    if k > n {
        return Err(Error::BudgetTooLarge { k, n });
    }
    let (chosen, trace) = match strategy {
        Strategy::Lazy => lazy(ev, objective, fallback, k),
        Strategy::Naive => naive(ev, objective, fallback, k),
    };
    Ok((SeedSet::new(chosen, k, n)?, trace))
}

pub fn greedy_welfare(
    sk: &SketchSet,
    part: &CommunityPartition,
    k: usize,
    params: &WelfareParams,
) -> Result<(SeedSet, SelectionTrace)> {
    let ev = Evaluator::new(sk, part)?;
    run_greedy(&ev, &Objective::Welfare(*params), None, k, Strategy::Lazy)
}

pub fn greedy_utilitarian(
    sk: &SketchSet,
    part: &CommunityPartition,
    k: usize,
) -> Result<(SeedSet, SelectionTrace)> {
    let ev = Evaluator::new(sk, part)?;
    run_greedy(&ev, &Objective::Total, None, k, Strategy::Lazy)
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    gain: f64,
    v: usize,
    round: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // max-heap: larger gain first, then smaller id
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain.total_cmp(&other.gain).then(other.v.cmp(&self.v))
    }
}

/// Rounding can make a recomputed gain exceed its cached bound by a few ulps;
/// stale entries this close to the leader are refreshed before it is accepted.
fn slack(gain: f64) -> f64 {
    1e-9 * gain.abs() + f64::MIN_POSITIVE
}

fn evaluate_all(cov: &Coverage, objective: &Objective, candidates: &[usize], round: usize) -> Vec<Entry> {
    let scale = cov_scale(cov);
    candidates
        .par_iter()
        .map_init(
            || Scratch::new(cov_vertex_count(cov)),
            |scratch, &v| {
                let delta = cov.marginal_with(v, scratch);
                Entry { gain: objective.gain(&cov.counts, &delta, scale), v, round }
            },
        )
        .collect()
}

fn cov_scale<'c>(cov: &'c Coverage) -> &'c super::objective::Scale {
    cov.evaluator().scale()
}

fn cov_vertex_count(cov: &Coverage) -> usize {
    cov.evaluator().vertex_count()
}

fn record(cov: &mut Coverage, trace: &mut SelectionTrace, primary: &Objective, v: usize) {
    cov.add(v);
    trace.chosen.push(v);
    trace.objective_after_each.push(primary.value(&cov.counts, cov_scale(cov)));
}

fn lazy(
    ev: &Evaluator,
    primary: &Objective,
    fallback: Option<&Objective>,
    k: usize,
) -> (Vec<usize>, SelectionTrace) {
    let mut cov = Coverage::new(ev);
    let mut trace = SelectionTrace::default();
    let mut objective = primary;
    let mut fallback = fallback;
    let candidates: Vec<usize> = (0..ev.vertex_count()).collect();
    let mut heap: BinaryHeap<Entry> = evaluate_all(&cov, objective, &candidates, 0).into();
    trace.evaluations += candidates.len();
    let mut round = 0;
    while trace.chosen.len() < k {
        let Some(top) = heap.pop() else { break };
        if top.round != round {
            let delta = cov.marginal(top.v);
            trace.evaluations += 1;
            heap.push(Entry { gain: objective.gain(&cov.counts, &delta, cov_scale(&cov)), v: top.v, round });
            continue;
        }
        if let Some(&next) = heap.peek() {
            if next.round != round && next.gain >= top.gain - slack(top.gain) {
                heap.pop();
                let delta = cov.marginal(next.v);
                trace.evaluations += 1;
                heap.push(Entry { gain: objective.gain(&cov.counts, &delta, cov_scale(&cov)), v: next.v, round });
                heap.push(top);
                continue;
            }
        }
        if top.gain <= STUCK {
            if let Some(next_objective) = fallback.take() {
                objective = next_objective;
                heap.push(top);
                let rest: Vec<usize> = heap.drain().map(|e| e.v).collect();
                heap = evaluate_all(&cov, objective, &rest, round).into();
                trace.evaluations += rest.len();
                continue;
            }
        }
        record(&mut cov, &mut trace, primary, top.v);
        round += 1;
    }
    (trace.chosen.clone(), trace)
}

fn naive(
    ev: &Evaluator,
    primary: &Objective,
    fallback: Option<&Objective>,
    k: usize,
) -> (Vec<usize>, SelectionTrace) {
    let mut cov = Coverage::new(ev);
    let mut trace = SelectionTrace::default();
    let mut objective = primary;
    let mut fallback = fallback;
    let mut remaining: Vec<usize> = (0..ev.vertex_count()).collect();
    while trace.chosen.len() < k {
        let entries = evaluate_all(&cov, objective, &remaining, 0);
        trace.evaluations += entries.len();
        let Some(best) = entries.into_iter().max() else { break };
        if best.gain <= STUCK {
            if let Some(next_objective) = fallback.take() {
                objective = next_objective;
                continue;
            }
        }
        remaining.retain(|&v| v != best.v);
        record(&mut cov, &mut trace, primary, best.v);
    }
    (trace.chosen.clone(), trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::{estimate_utilities, sample_sketches};
    use crate::graph::Graph;

    fn star_plus_isolated() -> (Graph, CommunityPartition) {
        let g = Graph::new(7, (1..6).map(|l| (0, l)).collect(), false, 1.0).unwrap();
        (g, CommunityPartition::new(vec![0; 7]).unwrap())
    }

    #[test]
    fn star_center_first() {
        let (g, part) = star_plus_isolated();
        let sk = sample_sketches(&g, 10, 0).unwrap();
        let params = WelfareParams::for_population(0.0, 7).unwrap();
        let (seeds, trace) = greedy_welfare(&sk, &part, 1, &params).unwrap();
        assert_eq!(seeds.vertices(), &[0]);
        assert_eq!(trace.chosen, vec![0]);
    }

    #[test]
    fn two_equal_stars_get_one_seed_each() {
        let mut edges: Vec<_> = (1..5).map(|l| (0, l)).collect();
        edges.extend((6..10).map(|l| (5, l)));
        let g = Graph::new(10, edges, false, 1.0).unwrap();
        let part = CommunityPartition::from_sizes(&[5, 5]).unwrap();
        let sk = sample_sketches(&g, 4, 0).unwrap();
        let params = WelfareParams::for_population(-2.0, 10).unwrap();
        let (seeds, _) = greedy_welfare(&sk, &part, 2, &params).unwrap();
        assert_eq!(seeds.vertices(), &[0, 5]);
    }

    #[test]
    fn full_budget_takes_everything() {
        let (g, part) = star_plus_isolated();
        let sk = sample_sketches(&g.with_p(0.3).unwrap(), 20, 2).unwrap();
        let (seeds, trace) = greedy_utilitarian(&sk, &part, 7).unwrap();
        assert_eq!(seeds.len(), 7);
        assert!((estimate_utilities(&sk, &seeds, &part).unwrap().values()[0] - 1.0).abs() < 1e-15);
        assert!(trace.objective_after_each.windows(2).all(|w| w[1] >= w[0]));
        assert!(matches!(greedy_utilitarian(&sk, &part, 8), Err(Error::BudgetTooLarge { .. })));
    }

    #[test]
    fn zero_budget_is_empty() {
        let (g, part) = star_plus_isolated();
        let sk = sample_sketches(&g, 5, 0).unwrap();
        let (seeds, trace) = greedy_utilitarian(&sk, &part, 0).unwrap();
        assert!(seeds.is_empty());
        assert!(trace.chosen.is_empty());
    }

    #[test]
    fn fallback_fills_the_budget() {
        let (g, part) = star_plus_isolated();
        let sk = sample_sketches(&g, 5, 0).unwrap();
        let ev = Evaluator::new(&sk, &part).unwrap();
        let truncated = Objective::Truncated { gamma: 0.1 };
        for strategy in [Strategy::Lazy, Strategy::Naive] {
            let (seeds, trace) = run_greedy(&ev, &truncated, Some(&Objective::Total), 2, strategy).unwrap();
            // the first pick saturates; the second maximizes spread among the rest
            assert_eq!(trace.chosen, vec![0, 6], "{strategy:?}");
            assert_eq!(seeds.len(), 2);
        }
    }
}
