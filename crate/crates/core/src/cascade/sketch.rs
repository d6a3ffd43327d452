use rand::Rng;
use rayon::prelude::*;

use super::UtilityVector;
use crate::error::{Error, Result};
use crate::graph::{Adjacency, CommunityPartition, Graph, SeedSet};
use crate::rng::stream_rng;

pub const DEFAULT_SKETCHES: usize = 1000;

/// `R` live-edge realizations of a graph. Sketch `i` keeps each arc independently
/// with probability `p`, drawn from the RNG stream `(master_seed, i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SketchSet {
    n: usize,
    master_seed: u64,
    sketches: Vec<Adjacency>,
}

/// Reusable BFS state: generation-stamped visit marks plus a queue.
#[derive(Debug, Clone)]
pub struct Scratch {
    stamp: Vec<u32>,
    generation: u32,
    pub(crate) queue: Vec<u32>,
}

impl Scratch {
    pub fn new(n: usize) -> Self {
        Scratch { stamp: vec![0; n], generation: 0, queue: Vec::new() }
    }

    pub(crate) fn begin(&mut self) {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        }
        self.queue.clear();
    }

    /// Marks `v`; returns false if it was already marked in this generation.
    #[inline]
    pub(crate) fn visit(&mut self, v: usize) -> bool {
        if self.stamp[v] == self.generation {
            false
        } else {
            self.stamp[v] = self.generation;
            true
        }
    }
}

impl SketchSet {
    pub fn len(&self) -> usize {
        self.sketches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sketches.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn sketches(&self) -> &[Adjacency] {
        &self.sketches
    }

    pub fn sketch(&self, i: usize) -> &Adjacency {
        &self.sketches[i]
    }

    pub(crate) fn check_partition(&self, part: &CommunityPartition) -> Result<()> {
        if part.vertex_count() != self.n {
            return Err(Error::GraphMismatch { partition: part.vertex_count(), graph: self.n });
        }
        Ok(())
    }

    /// Per-community activated counts of `seeds`, summed over all sketches.
    pub fn reach_counts(&self, seeds: &[usize], labels: &[usize], communities: usize) -> Vec<u64> {
        self.sketches
            .par_iter()
            .map_init(
                || Scratch::new(self.n),
                |scratch, adj| {
                    let mut counts = vec![0u64; communities];
                    bfs_count(adj, seeds, labels, scratch, &mut counts);
                    counts
                },
            )
            .reduce(|| vec![0u64; communities], add_counts)
    }
}

pub(crate) fn add_counts(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
    a
}

/// Adds the community labels of every vertex reachable from `seeds` to `counts`.
pub(crate) fn bfs_count(
    adj: &Adjacency,
    seeds: &[usize],
    labels: &[usize],
    scratch: &mut Scratch,
    counts: &mut [u64],
) {
    scratch.begin();
    for &s in seeds {
        if scratch.visit(s) {
            scratch.queue.push(s as u32);
        }
    }
    let mut head = 0;
    while head < scratch.queue.len() {
        let u = scratch.queue[head] as usize;
        head += 1;
        counts[labels[u]] += 1;
        for &v in adj.neighbors(u) {
            if scratch.visit(v as usize) {
                scratch.queue.push(v);
            }
        }
    }
}

pub fn sample_sketches(g: &Graph, r: usize, master_seed: u64) -> Result<SketchSet> {
    if r == 0 {
        return Err(Error::InvalidParameter("sketch count must be >= 1".into()));
    }
    let arcs = g.arcs();
    let p = g.p();
    let sketches = (0..r)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(master_seed, i as u64);
            let live: Vec<(usize, usize)> =
                arcs.iter().copied().filter(|_| rng.gen::<f64>() < p).collect();
            Adjacency::from_arcs(g.n(), &live)
        })
        .collect();
    Ok(SketchSet { n: g.n(), master_seed, sketches })
}

/// `u_c = (1/R) Σ_sketches |reach(seeds) ∩ V_c| / n_c`.
pub fn estimate_utilities(
    sk: &SketchSet,
    seeds: &SeedSet,
    part: &CommunityPartition,
) -> Result<UtilityVector> {
    sk.check_partition(part)?;
    if let Some(&id) = seeds.vertices().iter().find(|&&v| v >= sk.n) {
        return Err(Error::VertexOutOfRange { id, n: sk.n });
    }
    let counts = sk.reach_counts(seeds.vertices(), part.labels(), part.num_communities());
    Ok(UtilityVector::from_counts(&counts, part.sizes(), sk.len()))
}
