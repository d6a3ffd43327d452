use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cascade::DEFAULT_SKETCHES;
use crate::error::{Error, Result};
use crate::graph::{check_probability, CommunityPartition, Graph, DEFAULT_P};
use crate::io::load_graph;
use crate::optimize::DEFAULT_TOL;
use crate::sbm::{generate_sbm, SbmSpec};

pub const DEFAULT_ALPHAS: [f64; 6] = [-9.0, -5.0, -2.0, 0.0, 0.5, 0.9];
pub const DEFAULT_REPLICATIONS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Baseline {
    Utilitarian,
    Maximin,
    Dc,
}

/// Graph family for a sweep: an SBM sampled per replication, or a fixed file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphSource {
    Sbm(SbmSpec),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub source: GraphSource,
    /// Absolute budgets.
    #[serde(default)]
    pub budgets: Vec<usize>,
    /// Budgets as fractions of `n`, rounded to the nearest integer.
    #[serde(default)]
    pub budget_fractions: Vec<f64>,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default = "default_baselines")]
    pub baselines: Vec<Baseline>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_sketches")]
    pub sketches: usize,
    /// Overrides the propagation probability of the source when set.
    #[serde(default)]
    pub p: Option<f64>,
    /// Welfare floor; `1/(2n)` when unset.
    #[serde(default)]
    pub epsilon: Option<f64>,
    /// Binary-search width and constraint slack for the maximin and DC selectors.
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_alphas() -> Vec<f64> {
    DEFAULT_ALPHAS.to_vec()
}

fn default_baselines() -> Vec<Baseline> {
    vec![Baseline::Utilitarian, Baseline::Maximin, Baseline::Dc]
}

fn default_replications() -> usize {
    DEFAULT_REPLICATIONS
}

fn default_sketches() -> usize {
    DEFAULT_SKETCHES
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

impl ExperimentConfig {
    pub fn new(source: GraphSource) -> Self {
        ExperimentConfig {
            source,
            budgets: Vec::new(),
            budget_fractions: Vec::new(),
            alphas: default_alphas(),
            baselines: default_baselines(),
            replications: DEFAULT_REPLICATIONS,
            master_seed: 0,
            sketches: DEFAULT_SKETCHES,
            p: None,
            epsilon: None,
            tol: DEFAULT_TOL,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidParameter("replications must be >= 1".into()));
        }
        if self.sketches == 0 {
            return Err(Error::InvalidParameter("sketch count must be >= 1".into()));
        }
        if self.budgets.is_empty() && self.budget_fractions.is_empty() {
            return Err(Error::InvalidParameter("no budgets given".into()));
        }
        if let Some(&f) = self.budget_fractions.iter().find(|f| !(**f > 0.0 && **f <= 1.0)) {
            return Err(Error::InvalidParameter(format!("budget fraction {f} outside (0, 1]")));
        }
        if self.budgets.contains(&0) {
            return Err(Error::InvalidParameter("budgets must be >= 1".into()));
        }
        if let Some(&a) = self.alphas.iter().find(|a| !(a.is_finite() && **a < 1.0)) {
            return Err(Error::InvalidParameter(format!("alpha must be finite and < 1, got {a}")));
        }
        if let Some(p) = self.p {
            check_probability(p)?;
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1), got {e}")));
            }
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidParameter(format!("tolerance must lie in (0, 1), got {}", self.tol)));
        }
        if let GraphSource::Sbm(spec) = &self.source {
            spec.validate()?;
        }
        Ok(())
    }

    /// Resolved budgets for a graph of `n` vertices, sorted and deduplicated.
    pub fn budgets_for(&self, n: usize) -> Result<Vec<usize>> {
        let mut ks: Vec<usize> = self.budgets.clone();
        ks.extend(self.budget_fractions.iter().map(|f| ((f * n as f64).round() as usize).max(1)));
        ks.sort_unstable();
        ks.dedup();
        if let Some(&k) = ks.iter().find(|&&k| k > n) {
            return Err(Error::BudgetTooLarge { k, n });
        }
        Ok(ks)
    }

    /// Graph for one replication, with the configured `p` applied.
    pub fn instantiate(&self, rng_seed: u64) -> Result<(Graph, CommunityPartition)> {
        let (g, part) = match &self.source {
            GraphSource::Sbm(spec) => generate_sbm(spec, rng_seed)?,
            GraphSource::File(path) => load_graph(path)?,
        };
        match self.p {
            Some(p) => Ok((g.with_p(p)?, part)),
            None => Ok((g, part)),
        }
    }

    pub fn resolved_p(&self) -> Option<f64> {
        match (&self.source, self.p) {
            (_, Some(p)) => Some(p),
            (GraphSource::Sbm(spec), None) => Some(spec.p),
            (GraphSource::File(_), None) => None,
        }
    }
}

/// Three equal communities of 100 with within-community probabilities
/// `(0.06, 0.03, q3)` and between-community probability 0.005.
pub fn connectedness_spec(q3: f64) -> SbmSpec {
    SbmSpec::uniform(vec![100, 100, 100], vec![0.06, 0.03, q3], 0.005).with_p(DEFAULT_P)
}

/// Two communities of 100 and `100·ratio` with within 0.005 and between 0.001.
pub fn relative_size_spec(ratio: usize) -> SbmSpec {
    SbmSpec::uniform(vec![100, 100 * ratio], vec![0.005, 0.005], 0.001).with_p(DEFAULT_P)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let cfg = ExperimentConfig::from_json(
            r#"{"source": {"sbm": {"community_sizes": [10, 10], "within_prob": [0.1, 0.2], "between_prob": 0.01}},
                "budgets": [2]}"#,
        )
        .unwrap();
        assert_eq!(cfg.alphas, DEFAULT_ALPHAS.to_vec());
        assert_eq!(cfg.replications, 20);
        assert_eq!(cfg.sketches, 1000);
        assert_eq!(cfg.resolved_p(), Some(0.25));
        assert_eq!(cfg.budgets_for(20).unwrap(), vec![2]);
    }

    #[test]
    fn rejects_bad_values() {
        let src = GraphSource::Sbm(SbmSpec::uniform(vec![5], vec![0.1], 0.0));
        let mut cfg = ExperimentConfig::new(src);
        assert!(cfg.validate().is_err());
        cfg.budget_fractions = vec![0.1];
        cfg.validate().unwrap();
        assert_eq!(cfg.budgets_for(5).unwrap(), vec![1]);
        cfg.alphas.push(1.0);
        assert!(cfg.validate().is_err());
        assert!(ExperimentConfig::from_json(r#"{"source": {"file": "x"}, "budgets": [1], "typo": 1}"#).is_err());
    }
}
