use std::sync::OnceLock;

use rayon::prelude::*;

use super::objective::Scale;
use crate::cascade::{Scratch, SketchSet, UtilityVector};
use crate::error::Result;
use crate::graph::{Adjacency, CommunityPartition};

/// Sketch-based objective evaluation for one (sketch set, partition) pair.
///
/// Singleton reach counts are computed once and shared by every selection run
/// started from this evaluator.
pub struct Evaluator<'a> {
    sk: &'a SketchSet,
    part: &'a CommunityPartition,
    labels: &'a [usize],
    scale: Scale,
    singles: OnceLock<Vec<u64>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(sk: &'a SketchSet, part: &'a CommunityPartition) -> Result<Self> {
        sk.check_partition(part)?;
        Ok(Evaluator {
            sk,
            part,
            labels: part.labels(),
            scale: Scale { sizes: part.sizes().to_vec(), samples: sk.len() },
            singles: OnceLock::new(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.sk.vertex_count()
    }

    pub fn sketches(&self) -> &'a SketchSet {
        self.sk
    }

    pub fn partition(&self) -> &'a CommunityPartition {
        self.part
    }

    pub fn num_communities(&self) -> usize {
        self.scale.sizes.len()
    }

    pub(crate) fn scale(&self) -> &Scale {
        &self.scale
    }

    /// Row `v` holds the per-community counts reached from `{v}` over all sketches.
    pub(crate) fn singleton_counts(&self, v: usize) -> &[u64] {
        let nc = self.num_communities();
        let table = self.singles.get_or_init(|| {
            (0..self.vertex_count())
                .into_par_iter()
                .map_init(
                    || Scratch::new(self.vertex_count()),
                    |scratch, v| {
                        let mut counts = vec![0u64; nc];
                        for adj in self.sk.sketches() {
                            crate::cascade::bfs_count(adj, &[v], self.labels, scratch, &mut counts);
                        }
                        counts
                    },
                )
                .flatten_iter()
                .collect()
        });
        &table[v * nc..(v + 1) * nc]
    }

    pub fn utilities(&self, seeds: &[usize]) -> UtilityVector {
        self.scale.utilities(&self.reach_counts(seeds))
    }

    /// Per-community counts reached from `seeds`, summed over sketches.
    pub fn reach_counts(&self, seeds: &[usize]) -> Vec<u64> {
        self.sk.reach_counts(seeds, self.labels, self.num_communities())
    }
}

/// Covered vertices per sketch for the seeds chosen so far.
pub(crate) struct Coverage<'e, 'a> {
    ev: &'e Evaluator<'a>,
    words: usize,
    covered: Vec<u64>,
    pub counts: Vec<u64>,
    pub seeds: Vec<usize>,
}

const MIN_SKETCHES_PER_TASK: usize = 16;

impl<'e, 'a> Coverage<'e, 'a> {
    pub fn new(ev: &'e Evaluator<'a>) -> Self {
        let words = ev.vertex_count().div_ceil(64).max(1);
        Coverage {
            ev,
            words,
            covered: vec![0; words * ev.sk.len()],
            counts: vec![0; ev.num_communities()],
            seeds: Vec::new(),
        }
    }

    pub fn evaluator(&self) -> &'e Evaluator<'a> {
        self.ev
    }

    /// Newly covered counts if `v` were added, evaluated sequentially.
    pub fn marginal_with(&self, v: usize, scratch: &mut Scratch) -> Vec<u64> {
        if self.seeds.is_empty() {
            return self.ev.singleton_counts(v).to_vec();
        }
        let mut counts = vec![0u64; self.ev.num_communities()];
        for (i, adj) in self.ev.sk.sketches().iter().enumerate() {
            self.bfs_uncovered(i, adj, v, scratch, &mut counts);
        }
        counts
    }

    /// As [`Self::marginal_with`], splitting the sketches across workers.
    pub fn marginal(&self, v: usize) -> Vec<u64> {
        if self.seeds.is_empty() {
            return self.ev.singleton_counts(v).to_vec();
        }
        let nc = self.ev.num_communities();
        self.ev
            .sk
            .sketches()
            .par_iter()
            .enumerate()
            .with_min_len(MIN_SKETCHES_PER_TASK)
            .fold(
                || (Scratch::new(self.ev.vertex_count()), vec![0u64; nc]),
                |(mut scratch, mut counts), (i, adj)| {
                    self.bfs_uncovered(i, adj, v, &mut scratch, &mut counts);
                    (scratch, counts)
                },
            )
            .map(|(_, counts)| counts)
            .reduce(|| vec![0u64; nc], crate::cascade::add_counts)
    }

    fn bfs_uncovered(&self, i: usize, adj: &Adjacency, v: usize, scratch: &mut Scratch, counts: &mut [u64]) {
        let bits = &self.covered[i * self.words..(i + 1) * self.words];
        let is_covered = |x: usize| bits[x / 64] >> (x % 64) & 1 == 1;
        if is_covered(v) {
            return;
        }
        // covered sets are closed under reachability, so the search can stop at them
        scratch.begin();
        scratch.visit(v);
        scratch.queue.push(v as u32);
        let mut head = 0;
        while head < scratch.queue.len() {
            let x = scratch.queue[head] as usize;
            head += 1;
            counts[self.ev.labels[x]] += 1;
            for &y in adj.neighbors(x) {
                let y = y as usize;
                if !is_covered(y) && scratch.visit(y) {
                    scratch.queue.push(y as u32);
                }
            }
        }
    }

    /// Adds `v` to the seed set and returns the newly covered counts.
    pub fn add(&mut self, v: usize) -> Vec<u64> {
        let nc = self.ev.num_communities();
        let labels = self.ev.labels;
        let delta = self
            .covered
            .par_chunks_mut(self.words)
            .zip(self.ev.sk.sketches().par_iter())
            .with_min_len(MIN_SKETCHES_PER_TASK)
            .fold(
                || (Vec::<u32>::new(), vec![0u64; nc]),
                |(mut queue, mut counts), (bits, adj)| {
                    if bits[v / 64] >> (v % 64) & 1 == 0 {
                        bits[v / 64] |= 1 << (v % 64);
                        queue.clear();
                        queue.push(v as u32);
                        let mut head = 0;
                        while head < queue.len() {
                            let x = queue[head] as usize;
                            head += 1;
                            counts[labels[x]] += 1;
                            for &y in adj.neighbors(x) {
                                let y = y as usize;
                                if bits[y / 64] >> (y % 64) & 1 == 0 {
                                    bits[y / 64] |= 1 << (y % 64);
                                    queue.push(y as u32);
                                }
                            }
                        }
                    }
                    (queue, counts)
                },
            )
            .map(|(_, counts)| counts)
            .reduce(|| vec![0u64; nc], crate::cascade::add_counts);
        for (c, d) in self.counts.iter_mut().zip(&delta) {
            *c += d;
        }
        self.seeds.push(v);
        delta
    }
}
