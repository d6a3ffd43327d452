use crate::cascade::{exact_utilities, estimate_utilities, SketchSet, UtilityVector};
use crate::error::{Error, Result};
use crate::graph::{CommunityPartition, Graph, SeedSet};
use crate::welfare::{self, WelfareParams};

pub const DEFAULT_COMBINATION_LIMIT: u128 = 2_000_000;

/// Where utilities of a candidate seed set come from.
#[derive(Debug, Clone, Copy)]
pub enum UtilitySource<'a> {
    Exact(&'a Graph),
    Sketch(&'a SketchSet),
}

impl UtilitySource<'_> {
    pub fn vertex_count(&self) -> usize {
        match self {
            UtilitySource::Exact(g) => g.n(),
            UtilitySource::Sketch(sk) => sk.vertex_count(),
        }
    }

    pub fn utilities(&self, seeds: &SeedSet, part: &CommunityPartition) -> Result<UtilityVector> {
        match self {
            UtilitySource::Exact(g) => exact_utilities(g, seeds, part),
            UtilitySource::Sketch(sk) => estimate_utilities(sk, seeds, part),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExhaustiveObjective {
    Total,
    Welfare(WelfareParams),
    Maximin,
}

impl ExhaustiveObjective {
    pub fn value(&self, u: &UtilityVector) -> f64 {
        match self {
            ExhaustiveObjective::Total => welfare::total_influence(u),
            ExhaustiveObjective::Welfare(params) => welfare::welfare(u, params),
            ExhaustiveObjective::Maximin => u.min(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveResult {
    pub seeds: SeedSet,
    pub value: f64,
    pub utilities: UtilityVector,
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn seed_sets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let next = {
            let c = current.as_mut().unwrap();
            match (0..k).rev().find(|&i| c[i] < n - k + i) {
                Some(i) => {
                    c[i] += 1;
                    for j in i + 1..k {
                        c[j] = c[j - 1] + 1;
                    }
                    true
                }
                None => false,
            }
        };
        if !next {
            current = None;
        }
        Some(out)
    })
}

/// Brute-force maximizer over every budget-`k` seed set; the lexicographically
/// first maximizer wins ties.
pub fn exhaustive_opt(
    source: UtilitySource,
    part: &CommunityPartition,
    k: usize,
    objective: &ExhaustiveObjective,
    limit: u128,
) -> Result<ExhaustiveResult> {
    let n = source.vertex_count();
    if k > n {
        return Err(Error::BudgetTooLarge { k, n });
    }
    if binomial(n, k) > limit {
        return Err(Error::CombinatorialLimit { n, k, limit });
    }
    let mut best: Option<ExhaustiveResult> = None;
    for set in seed_sets(n, k) {
        let seeds = SeedSet::new(set, k, n)?;
        let utilities = source.utilities(&seeds, part)?;
        let value = objective.value(&utilities);
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(ExhaustiveResult { seeds, value, utilities });
        }
    }
    Ok(best.expect("at least one seed set"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_in_order() {
        let all: Vec<_> = seed_sets(4, 2).collect();
        assert_eq!(all, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(seed_sets(3, 0).count(), 1);
        assert_eq!(seed_sets(2, 3).count(), 0);
        assert_eq!(binomial(15, 3), 455);
        assert_eq!(binomial(60, 30), 118264581564861424);
    }

    #[test]
    fn star_center_maximizes_total() {
        let g = Graph::new(5, (1..5).map(|l| (0, l)).collect(), false, 0.5).unwrap();
        let part = CommunityPartition::new(vec![0; 5]).unwrap();
        let r = exhaustive_opt(UtilitySource::Exact(&g), &part, 1, &ExhaustiveObjective::Total, 100).unwrap();
        assert_eq!(r.seeds.vertices(), &[0]);
        assert!((r.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_budget_gives_floored_welfare() {
        let g = Graph::new(4, vec![(0, 1)], false, 0.5).unwrap();
        let part = CommunityPartition::from_sizes(&[2, 2]).unwrap();
        let params = WelfareParams::for_population(-1.0, 4).unwrap();
        let obj = ExhaustiveObjective::Welfare(params);
        let r = exhaustive_opt(UtilitySource::Exact(&g), &part, 0, &obj, 100).unwrap();
        assert!(r.seeds.is_empty());
        assert!(r.value.is_finite());
        assert_eq!(r.value, 4.0 * params.transform(0.0));
    }

    #[test]
    fn limit_is_enforced() {
        let g = Graph::new(30, vec![], false, 0.5).unwrap();
        let part = CommunityPartition::new(vec![0; 30]).unwrap();
        let err = exhaustive_opt(UtilitySource::Exact(&g), &part, 10, &ExhaustiveObjective::Maximin, 1000);
        assert!(matches!(err, Err(Error::CombinatorialLimit { .. })));
    }
}
