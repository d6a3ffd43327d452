use crate::cascade::UtilityVector;
use crate::welfare::{self, WelfareParams};

/// Set functions over sketch coverage. All of them are monotone and submodular
/// in the seed set, which is what the greedy selectors rely on.
#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    /// Expected number of influenced vertices.
    Total,
    Welfare(WelfareParams),
    /// `Σ_c min(u_c, γ)`.
    Truncated { gamma: f64 },
    /// `Σ_c min(u_c / U_c, 1)`; communities with `U_c = 0` contribute a constant 1.
    Saturation { bounds: Vec<f64> },
}

/// Converts per-community covered counts (summed over sketches) into utilities.
#[derive(Debug, Clone)]
pub(crate) struct Scale {
    pub sizes: Vec<usize>,
    pub samples: usize,
}

impl Scale {
    #[inline]
    pub fn utility(&self, c: usize, count: u64) -> f64 {
        count as f64 / (self.samples as f64 * self.sizes[c] as f64)
    }

    pub fn utilities(&self, counts: &[u64]) -> UtilityVector {
        UtilityVector::from_counts(counts, &self.sizes, self.samples)
    }
}

impl Objective {
    pub(crate) fn value(&self, counts: &[u64], scale: &Scale) -> f64 {
        match self {
            Objective::Total => counts.iter().sum::<u64>() as f64 / scale.samples as f64,
            Objective::Welfare(params) => welfare::welfare(&scale.utilities(counts), params),
            Objective::Truncated { gamma } => (0..counts.len())
                .map(|c| scale.utility(c, counts[c]).min(*gamma))
                .sum(),
            Objective::Saturation { bounds } => (0..counts.len())
                .map(|c| saturation(scale.utility(c, counts[c]), bounds[c]))
                .sum(),
        }
    }

    /// Increase in value when `delta` newly covered counts are added to `old`.
    pub(crate) fn gain(&self, old: &[u64], delta: &[u64], scale: &Scale) -> f64 {
        if let Objective::Total = self {
            return delta.iter().sum::<u64>() as f64 / scale.samples as f64;
        }
        let mut sum = 0.0;
        for c in 0..old.len() {
            if delta[c] == 0 {
                continue;
            }
            let before = scale.utility(c, old[c]);
            let after = scale.utility(c, old[c] + delta[c]);
            sum += match self {
                Objective::Welfare(params) => {
                    scale.sizes[c] as f64 * params.transform_diff(before, after)
                }
                Objective::Truncated { gamma } => after.min(*gamma) - before.min(*gamma),
                Objective::Saturation { bounds } => {
                    saturation(after, bounds[c]) - saturation(before, bounds[c])
                }
                Objective::Total => unreachable!(),
            };
        }
        sum
    }
}

fn saturation(u: f64, bound: f64) -> f64 {
    if bound <= 0.0 {
        1.0
    } else {
        (u / bound).min(1.0)
    }
}
