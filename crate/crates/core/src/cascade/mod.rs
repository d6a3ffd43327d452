//! Independent cascade diffusion.
//!
//! Utilities are estimated on a fixed [`SketchSet`] of live-edge realizations so that
//! every objective evaluated during a selection run sees the same randomness.
//! [`exact_utilities`] is the brute-force oracle for small or tree-shaped graphs.

mod exact;
mod sketch;

pub use exact::{exact_utilities, exact_utilities_with, reachable_counts, ExactMethod, ExactOptions};
pub(crate) use sketch::{add_counts, bfs_count};
pub use sketch::{estimate_utilities, sample_sketches, Scratch, SketchSet, DEFAULT_SKETCHES};

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Adjacency, Graph, SeedSet};

/// Per-community expected influenced fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityVector {
    values: Vec<f64>,
    sizes: Vec<usize>,
}

impl UtilityVector {
    pub fn new(values: Vec<f64>, sizes: Vec<usize>) -> Result<Self> {
        if values.len() != sizes.len() {
            return Err(Error::LengthMismatch { left: values.len(), right: sizes.len() });
        }
        if let Some(&x) = values.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidParameter(format!("utility {x} outside [0, 1]")));
        }
        if sizes.contains(&0) {
            return Err(Error::InvalidParameter("community sizes must be >= 1".into()));
        }
        Ok(UtilityVector { values, sizes })
    }

    /// Equal-size communities; handy for comparing bare vectors.
    pub fn uniform(values: Vec<f64>, size: usize) -> Result<Self> {
        let sizes = vec![size; values.len()];
        Self::new(values, sizes)
    }

    /// `counts[c]` activated-vertex tallies summed over `samples` realizations.
    pub fn from_counts(counts: &[u64], sizes: &[usize], samples: usize) -> Self {
        let values = counts
            .iter()
            .zip(sizes)
            .map(|(&k, &s)| k as f64 / (samples as f64 * s as f64))
            .collect();
        UtilityVector { values, sizes: sizes.to_vec() }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn population(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// One independent-cascade realization. Each newly activated vertex tries every
/// out-arc once with probability `g.p()`. Returns the activated vertices, sorted.
pub fn simulate_once<R: Rng + ?Sized>(g: &Graph, seeds: &SeedSet, rng: &mut R) -> Result<Vec<usize>> {
    if let Some(&id) = seeds.vertices().iter().find(|&&v| v >= g.n()) {
        return Err(Error::VertexOutOfRange { id, n: g.n() });
    }
    Ok(simulate_on(&g.out_adjacency(), g.p(), seeds.vertices(), rng))
}

pub(crate) fn simulate_on<R: Rng + ?Sized>(
    adj: &Adjacency,
    p: f64,
    seeds: &[usize],
    rng: &mut R,
) -> Vec<usize> {
    let mut active = vec![false; adj.vertex_count()];
    let mut queue: Vec<usize> = Vec::with_capacity(seeds.len());
    for &s in seeds {
        if !active[s] {
            active[s] = true;
            queue.push(s);
        }
    }
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        for &v in adj.neighbors(u) {
            let v = v as usize;
            if !active[v] && rng.gen::<f64>() < p {
                active[v] = true;
                queue.push(v);
            }
        }
    }
    queue.sort_unstable();
    queue
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    fn star(leaves: usize, p: f64) -> Graph {
        Graph::new(leaves + 1, (1..=leaves).map(|l| (0, l)).collect(), false, p).unwrap()
    }

    #[test]
    fn p_zero_activates_only_seeds() {
        let g = star(5, 0.0);
        let seeds = SeedSet::from_vertices([0, 3], 6).unwrap();
        let mut rng = stream_rng(1, 0);
        for _ in 0..20 {
            assert_eq!(simulate_once(&g, &seeds, &mut rng).unwrap(), vec![0, 3]);
        }
    }

    #[test]
    fn p_one_floods_the_component() {
        let mut edges: Vec<_> = (1..=4).map(|l| (0, l)).collect();
        edges.push((5, 6));
        let g = Graph::new(7, edges, false, 1.0).unwrap();
        let seeds = SeedSet::from_vertices([0], 7).unwrap();
        let got = simulate_once(&g, &seeds, &mut stream_rng(3, 0)).unwrap();
        assert_eq!(got, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn invalid_seed_is_an_error() {
        let g = star(2, 0.5);
        let seeds = SeedSet::from_vertices([9], 10).unwrap();
        assert!(simulate_once(&g, &seeds, &mut stream_rng(0, 0)).is_err());
    }

    #[test]
    fn single_arc_fires_a_quarter_of_the_time() {
        let g = Graph::new(2, vec![(0, 1)], true, 0.25).unwrap();
        let seeds = SeedSet::from_vertices([0], 2).unwrap();
        let runs = 100_000;
        let mut rng = stream_rng(42, 0);
        let hits = (0..runs)
            .filter(|_| simulate_once(&g, &seeds, &mut rng).unwrap().contains(&1))
            .count();
        let sigma = (runs as f64 * 0.25 * 0.75).sqrt();
        assert!((hits as f64 - 0.25 * runs as f64).abs() <= 3.0 * sigma, "hits = {hits}");
    }

    #[test]
    fn utility_vector_validation() {
        assert!(UtilityVector::new(vec![0.5, 1.2], vec![1, 1]).is_err());
        assert!(UtilityVector::new(vec![0.5], vec![1, 1]).is_err());
        let u = UtilityVector::from_counts(&[30, 10], &[10, 5], 4);
        assert_eq!(u.values(), &[0.75, 0.5]);
    }
}
