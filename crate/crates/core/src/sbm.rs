//! Stochastic block model generation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{check_probability, CommunityPartition, Graph, DEFAULT_P};
use crate::rng::stream_rng;

/// Between-community edge probability: one value for every pair, or a full
/// symmetric matrix whose diagonal is ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BetweenProb {
    Uniform(f64),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbmSpec {
    pub community_sizes: Vec<usize>,
    pub within_prob: Vec<f64>,
    pub between_prob: BetweenProb,
    /// Propagation probability attached to the generated graph.
    #[serde(default = "default_p")]
    pub p: f64,
}

fn default_p() -> f64 {
    DEFAULT_P
}

impl SbmSpec {
    pub fn uniform(community_sizes: Vec<usize>, within_prob: Vec<f64>, between: f64) -> Self {
        SbmSpec {
            community_sizes,
            within_prob,
            between_prob: BetweenProb::Uniform(between),
            p: DEFAULT_P,
        }
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn num_communities(&self) -> usize {
        self.community_sizes.len()
    }

    pub fn n(&self) -> usize {
        self.community_sizes.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        let nc = self.community_sizes.len();
        if nc == 0 {
            return Err(Error::InvalidParameter("SBM needs at least one community".into()));
        }
        if self.community_sizes.contains(&0) {
            return Err(Error::InvalidParameter("SBM community sizes must be >= 1".into()));
        }
        if self.within_prob.len() != nc {
            return Err(Error::LengthMismatch { left: self.within_prob.len(), right: nc });
        }
        self.within_prob.iter().try_for_each(|&q| check_probability(q))?;
        check_probability(self.p)?;
        match &self.between_prob {
            BetweenProb::Uniform(q) => check_probability(*q)?,
            BetweenProb::Matrix(m) => {
                if m.len() != nc {
                    return Err(Error::LengthMismatch { left: m.len(), right: nc });
                }
                for (a, row) in m.iter().enumerate() {
                    if row.len() != nc {
                        return Err(Error::LengthMismatch { left: row.len(), right: nc });
                    }
                    for (b, &q) in row.iter().enumerate() {
                        check_probability(q)?;
                        if a != b && q != m[b][a] {
                            return Err(Error::InvalidParameter(format!(
                                "between-community matrix not symmetric at ({a}, {b})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Edge probability between a vertex of community `a` and one of community `b`.
    pub fn probability(&self, a: usize, b: usize) -> f64 {
        if a == b {
            return self.within_prob[a];
        }
        match &self.between_prob {
            BetweenProb::Uniform(q) => *q,
            BetweenProb::Matrix(m) => m[a][b],
        }
    }

    /// A 16-community template with 5940 vertices and sizes in [112, 693]. The
    /// probabilities are not known publicly and must be supplied by the caller.
    pub fn sixteen_community_template(
        within_prob: Vec<f64>,
        between_prob: BetweenProb,
    ) -> Result<Self> {
        let spec = SbmSpec {
            community_sizes: SIXTEEN_COMMUNITY_SIZES.to_vec(),
            within_prob,
            between_prob,
            p: DEFAULT_P,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Community sizes for [`SbmSpec::sixteen_community_template`].
pub const SIXTEEN_COMMUNITY_SIZES: [usize; 16] = [
    112, 693, 245, 310, 420, 380, 290, 505, 330, 455, 275, 360, 410, 298, 472, 385,
];

/// Samples a simple undirected graph: every unordered pair is tested once.
/// Vertices are labelled in contiguous community blocks.
pub fn generate_sbm(spec: &SbmSpec, rng_seed: u64) -> Result<(Graph, CommunityPartition)> {
    spec.validate()?;
    let part = CommunityPartition::from_sizes(&spec.community_sizes)?;
    let n = spec.n();
    let nc = spec.num_communities();
    let table: Vec<f64> = (0..nc * nc).map(|i| spec.probability(i / nc, i % nc)).collect();
    let labels = part.labels();
    let mut rng = stream_rng(rng_seed, 0);
    let mut edges = Vec::new();
    for u in 0..n {
        let row = &table[labels[u] * nc..(labels[u] + 1) * nc];
        for v in (u + 1)..n {
            let q = row[labels[v]];
            if q > 0.0 && rng.gen::<f64>() < q {
                edges.push((u, v));
            }
        }
    }
    let g = Graph::new(n, edges, false, spec.p)?;
    Ok((g, part))
}
