//! Isoelastic welfare, fairness metrics and the welfare principles as predicates.
//!
//! `W_α(u) = Σ_c n_c · u_c^α / α` for `α < 1, α ≠ 0`, and `Σ_c n_c · ln u_c` for
//! `α = 0`. Smaller `α` means stronger aversion to inequality between communities.
//!
//! The isoelastic transform diverges at zero for `α ≤ 0`. Below the floor `ε` the
//! transform continues along its tangent at `ε`, which keeps it finite, strictly
//! increasing and concave, so welfare over sketch utilities stays submodular.

use std::cmp::Ordering;

use crate::cascade::UtilityVector;
use crate::error::{Error, Result};

/// Slack used when comparing sums of utilities that are equal in exact arithmetic.
pub const COMPARE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelfareParams {
    alpha: f64,
    epsilon: f64,
}

impl WelfareParams {
    pub fn new(alpha: f64, epsilon: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha >= 1.0 {
            return Err(Error::InvalidParameter(format!("alpha must be finite and < 1, got {alpha}")));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        Ok(WelfareParams { alpha, epsilon })
    }

    /// Default floor `ε = 1/(2n)`, below the smallest positive utility a seed can give.
    pub fn for_population(alpha: f64, n: usize) -> Result<Self> {
        Self::new(alpha, 1.0 / (2.0 * n.max(1) as f64))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Per-individual welfare of utility `x`.
    pub fn transform(&self, x: f64) -> f64 {
        if x >= self.epsilon {
            isoelastic(x, self.alpha)
        } else {
            isoelastic(self.epsilon, self.alpha) + self.slope_at_floor() * (x - self.epsilon)
        }
    }

    /// `transform(new) - transform(old)`, computed without cancelling two large values.
    pub fn transform_diff(&self, old: f64, new: f64) -> f64 {
        if old == new {
            return 0.0;
        }
        let eps = self.epsilon;
        if old >= eps && new >= eps {
            if self.alpha == 0.0 {
                ((new - old) / old).ln_1p()
            } else {
                (new.powf(self.alpha) - old.powf(self.alpha)) / self.alpha
            }
        } else if old < eps && new < eps {
            self.slope_at_floor() * (new - old)
        } else if old < eps {
            self.slope_at_floor() * (eps - old) + self.transform_diff(eps, new)
        } else {
            -self.transform_diff(new, old)
        }
    }

    fn slope_at_floor(&self) -> f64 {
        self.epsilon.powf(self.alpha - 1.0)
    }
}

fn isoelastic(x: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        x.ln()
    } else {
        x.powf(alpha) / alpha
    }
}

/// Sums terms in ascending order so the result does not depend on community order.
fn ordered_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.into_iter().sum()
}

pub fn welfare(u: &UtilityVector, params: &WelfareParams) -> f64 {
    ordered_sum(
        u.values()
            .iter()
            .zip(u.sizes())
            .map(|(&x, &n)| n as f64 * params.transform(x))
            .collect(),
    )
}

/// `W(u) - W(v)`, accumulated per community.
pub fn welfare_difference(u: &UtilityVector, v: &UtilityVector, params: &WelfareParams) -> Result<f64> {
    check_same_shape(u, v)?;
    Ok(ordered_sum(
        u.values()
            .iter()
            .zip(v.values())
            .zip(u.sizes())
            .map(|((&a, &b), &n)| n as f64 * params.transform_diff(b, a))
            .collect(),
    ))
}

/// `Σ_c n_c u_c`.
pub fn total_influence(u: &UtilityVector) -> f64 {
    ordered_sum(u.values().iter().zip(u.sizes()).map(|(&x, &n)| n as f64 * x).collect())
}

/// `max_c u_c - min_c u_c`.
pub fn utility_gap(u: &UtilityVector) -> f64 {
    if u.is_empty() {
        0.0
    } else {
        u.max() - u.min()
    }
}

/// Price of fairness `1 - fair/im`, clamped to `[0, 1]`.
pub fn pof(fair_total: f64, im_total: f64) -> Result<f64> {
    if !(im_total > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "price of fairness needs a positive reference total, got {im_total}"
        )));
    }
    Ok((1.0 - fair_total / im_total).clamp(0.0, 1.0))
}

pub fn dp_satisfied(u: &UtilityVector, delta: f64) -> bool {
    utility_gap(u) <= delta + COMPARE_TOL
}

/// Leximin order of `u` relative to `v`: `Greater` means `u` is preferred.
pub fn leximin_compare(u: &UtilityVector, v: &UtilityVector) -> Result<Ordering> {
    leximin_compare_with_tol(u, v, COMPARE_TOL)
}

/// As [`leximin_compare`], treating entries within `tol` of each other as equal.
pub fn leximin_compare_with_tol(u: &UtilityVector, v: &UtilityVector, tol: f64) -> Result<Ordering> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch { left: u.len(), right: v.len() });
    }
    let sorted = |x: &UtilityVector| {
        let mut s = x.values().to_vec();
        s.sort_by(f64::total_cmp);
        s
    };
    for (a, b) in sorted(u).into_iter().zip(sorted(v)) {
        if (a - b).abs() > tol {
            return Ok(a.total_cmp(&b));
        }
    }
    Ok(Ordering::Equal)
}

/// Outcome of checking one welfare principle on a pair `(first, second)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrincipleVerdict {
    /// The principle's premises hold for neither ordering of the pair.
    NotApplicable,
    PrefersFirst,
    PrefersSecond,
}

impl PrincipleVerdict {
    pub fn is_applicable(self) -> bool {
        self != PrincipleVerdict::NotApplicable
    }

    /// Verdict with the roles of the two vectors swapped.
    pub fn flipped(self) -> Self {
        match self {
            PrincipleVerdict::PrefersFirst => PrincipleVerdict::PrefersSecond,
            PrincipleVerdict::PrefersSecond => PrincipleVerdict::PrefersFirst,
            PrincipleVerdict::NotApplicable => PrincipleVerdict::NotApplicable,
        }
    }

    /// What a welfare difference `W(first) - W(second)` says about the pair.
    pub fn from_difference(diff: f64) -> Self {
        if diff > 0.0 {
            PrincipleVerdict::PrefersFirst
        } else if diff < 0.0 {
            PrincipleVerdict::PrefersSecond
        } else {
            PrincipleVerdict::NotApplicable
        }
    }
}

fn check_same_shape(u: &UtilityVector, v: &UtilityVector) -> Result<()> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch { left: u.len(), right: v.len() });
    }
    if u.sizes() != v.sizes() {
        return Err(Error::InvalidParameter("utility vectors have different community sizes".into()));
    }
    Ok(())
}

/// Pareto dominance: one vector is at least as good everywhere and better somewhere.
pub fn check_monotonicity_preference(u: &UtilityVector, v: &UtilityVector) -> Result<PrincipleVerdict> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch { left: u.len(), right: v.len() });
    }
    let pairs = || u.values().iter().zip(v.values());
    let v_weakly = pairs().all(|(a, b)| b >= a);
    let u_weakly = pairs().all(|(a, b)| a >= b);
    Ok(match (u_weakly, v_weakly) {
        (true, true) => PrincipleVerdict::NotApplicable,
        (false, true) => PrincipleVerdict::PrefersSecond,
        (true, false) => PrincipleVerdict::PrefersFirst,
        (false, false) => PrincipleVerdict::NotApplicable,
    })
}

/// Influence transfer: with both vectors ascending under one common community
/// order, the weighted prefix sums `Σ_{κ≤c} n_κ (v_κ - u_κ)` are all non-negative
/// and some community strictly gains. If no common order exists the principle
/// does not apply.
pub fn check_influence_transfer(u: &UtilityVector, v: &UtilityVector) -> Result<PrincipleVerdict> {
    check_same_shape(u, v)?;
    let (a, b) = (u.values(), v.values());
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by(|&i, &j| a[i].total_cmp(&a[j]).then(b[i].total_cmp(&b[j])).then(i.cmp(&j)));
    if order.windows(2).any(|w| b[w[0]] > b[w[1]]) {
        return Ok(PrincipleVerdict::NotApplicable);
    }
    let sizes = u.sizes();
    let tol = COMPARE_TOL * u.population() as f64;
    let dominates = |hi: &[f64], lo: &[f64]| {
        let mut prefix = 0.0;
        let mut prefixes_ok = true;
        for &c in &order {
            prefix += sizes[c] as f64 * (hi[c] - lo[c]);
            prefixes_ok &= prefix >= -tol;
        }
        prefixes_ok && order.iter().any(|&c| hi[c] > lo[c])
    };
    Ok(if dominates(b, a) {
        PrincipleVerdict::PrefersSecond
    } else if dominates(a, b) {
        PrincipleVerdict::PrefersFirst
    } else {
        PrincipleVerdict::NotApplicable
    })
}

/// Utility gap reduction: prefer the vector with at least the other's total and a
/// strictly smaller gap.
pub fn check_gap_reduction(u: &UtilityVector, v: &UtilityVector) -> Result<PrincipleVerdict> {
    check_same_shape(u, v)?;
    let tol = COMPARE_TOL * u.population() as f64;
    let (tu, tv) = (total_influence(u), total_influence(v));
    let (gu, gv) = (utility_gap(u), utility_gap(v));
    Ok(if tv >= tu - tol && gu > gv + COMPARE_TOL {
        PrincipleVerdict::PrefersSecond
    } else if tu >= tv - tol && gv > gu + COMPARE_TOL {
        PrincipleVerdict::PrefersFirst
    } else {
        PrincipleVerdict::NotApplicable
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uv(values: &[f64], size: usize) -> UtilityVector {
        UtilityVector::uniform(values.to_vec(), size).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(WelfareParams::new(1.0, 0.01).is_err());
        assert!(WelfareParams::new(0.5, 0.0).is_err());
        assert!(WelfareParams::new(f64::NEG_INFINITY, 0.1).is_err());
        let p = WelfareParams::for_population(-2.0, 50).unwrap();
        assert_eq!(p.epsilon(), 0.01);
    }

    #[test]
    fn welfare_examples() {
        let log = WelfareParams::new(0.0, 0.01).unwrap();
        assert_eq!(welfare(&uv(&[1.0, 1.0], 5), &log), 0.0);
        let half = WelfareParams::new(0.5, 0.01).unwrap();
        let u = UtilityVector::new(vec![0.25], vec![4]).unwrap();
        assert!((welfare(&u, &half) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn gap_witness_log_difference() {
        let log = WelfareParams::new(0.0, 1.0 / 600.0).unwrap();
        let d = welfare_difference(&uv(&[0.3, 0.7, 0.8], 100), &uv(&[0.34, 0.6, 0.86], 100), &log)
            .unwrap();
        assert!((d + 4.3).abs() < 0.1, "{d}");
    }

    #[test]
    fn floor_extension_is_finite_and_increasing() {
        for alpha in [-20.0, -2.0, 0.0, 0.5] {
            let p = WelfareParams::new(alpha, 0.01).unwrap();
            let xs = [0.0, 0.002, 0.005, 0.01, 0.02, 0.5];
            for w in xs.windows(2) {
                assert!(p.transform(w[0]).is_finite());
                assert!(p.transform(w[1]) > p.transform(w[0]), "alpha {alpha}: {w:?}");
                let d = p.transform_diff(w[0], w[1]);
                let direct = p.transform(w[1]) - p.transform(w[0]);
                assert!((d - direct).abs() <= 1e-9 * direct.abs().max(1.0), "alpha {alpha}");
            }
        }
    }

    #[test]
    fn totals_and_gaps() {
        assert_eq!(total_influence(&uv(&[0.0, 0.0], 7)), 0.0);
        assert!((total_influence(&uv(&[0.3, 0.7, 0.8], 100)) - 180.0).abs() < 1e-9);
        assert_eq!(total_influence(&UtilityVector::new(vec![1.0, 1.0], vec![3, 4]).unwrap()), 7.0);
        assert!((utility_gap(&uv(&[0.3, 0.7, 0.8], 1)) - 0.5).abs() < 1e-12);
        assert!((utility_gap(&uv(&[0.34, 0.6, 0.86], 1)) - 0.52).abs() < 1e-12);
        assert_eq!(utility_gap(&uv(&[0.4, 0.4], 1)), 0.0);
    }

    #[test]
    fn pof_examples() {
        assert!((pof(90.0, 100.0).unwrap() - 0.1).abs() < 1e-12);
        assert_eq!(pof(100.0, 100.0).unwrap(), 0.0);
        assert_eq!(pof(100.0000001, 100.0).unwrap(), 0.0);
        assert!(pof(1.0, 0.0).is_err());
    }

    #[test]
    fn dp_examples() {
        assert!(dp_satisfied(&uv(&[0.2, 0.2], 1), 0.0));
        assert!(!dp_satisfied(&uv(&[0.3, 0.7, 0.8], 1), 0.4));
        assert!(dp_satisfied(&uv(&[0.3, 0.7, 0.8], 1), 0.5));
    }

    #[test]
    fn leximin_examples() {
        let cmp = |a: &[f64], b: &[f64]| leximin_compare(&uv(a, 1), &uv(b, 1)).unwrap();
        assert_eq!(cmp(&[0.2, 0.4, 0.6], &[0.2, 0.2, 0.8]), Ordering::Greater);
        assert_eq!(cmp(&[0.2, 0.4, 0.6], &[0.6, 0.2, 0.4]), Ordering::Equal);
        assert_eq!(cmp(&[0.3, 0.9], &[0.2, 1.0]), Ordering::Greater);
        assert!(leximin_compare(&uv(&[0.1], 1), &uv(&[0.1, 0.2], 1)).is_err());
    }

    #[test]
    fn influence_transfer_examples() {
        use PrincipleVerdict::*;
        let chk = |a: &[f64], b: &[f64]| check_influence_transfer(&uv(a, 10), &uv(b, 10)).unwrap();
        assert_eq!(chk(&[0.5, 0.5], &[0.3, 0.7]), PrefersFirst);
        assert_eq!(chk(&[0.2, 0.4, 0.6], &[0.2, 0.2, 0.8]), PrefersFirst);
        assert_eq!(chk(&[0.3, 0.7], &[0.3, 0.7]), NotApplicable);
        // order flips between the vectors
        assert_eq!(chk(&[0.2, 0.6], &[0.7, 0.3]), NotApplicable);
        assert!(check_influence_transfer(&uv(&[0.1], 1), &uv(&[0.1], 2)).is_err());
    }

    #[test]
    fn gap_reduction_examples() {
        use PrincipleVerdict::*;
        let chk = |a: &[f64], b: &[f64]| check_gap_reduction(&uv(a, 100), &uv(b, 100)).unwrap();
        assert_eq!(chk(&[0.3, 0.7, 0.8], &[0.34, 0.6, 0.86]), PrefersFirst);
        assert_eq!(chk(&[0.3, 0.7, 0.8], &[0.3, 0.7, 0.8]), NotApplicable);
        // v has the larger total but also the larger gap
        assert_eq!(chk(&[0.5, 0.5], &[0.2, 0.9]), NotApplicable);
        assert_eq!(chk(&[0.5, 0.5, 0.5], &[0.2, 0.5, 0.8]), PrefersFirst);
    }

    #[test]
    fn monotonicity_examples() {
        use PrincipleVerdict::*;
        let chk = |a: &[f64], b: &[f64]| check_monotonicity_preference(&uv(a, 1), &uv(b, 1)).unwrap();
        assert_eq!(chk(&[0.1, 0.2], &[0.2, 0.2]), PrefersSecond);
        assert_eq!(chk(&[0.1, 0.2], &[0.1, 0.2]), NotApplicable);
        assert_eq!(chk(&[0.1, 0.9], &[0.2, 0.8]), NotApplicable);
    }

    #[test]
    fn verdict_helpers() {
        assert_eq!(PrincipleVerdict::from_difference(-1.0), PrincipleVerdict::PrefersSecond);
        assert_eq!(PrincipleVerdict::PrefersFirst.flipped(), PrincipleVerdict::PrefersSecond);
        assert!(!PrincipleVerdict::NotApplicable.is_applicable());
    }
}
