use super::UtilityVector;
use crate::error::{Error, Result};
use crate::graph::{CommunityPartition, Graph, SeedSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactMethod {
    /// Enumeration when within the arc limit, otherwise the forest recursion.
    Auto,
    Enumerate,
    Forest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactOptions {
    /// Largest number of relevant arcs whose live/dead subsets are enumerated.
    pub arc_limit: usize,
    pub method: ExactMethod,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions { arc_limit: 20, method: ExactMethod::Auto }
    }
}

/// Per-community counts of vertices reachable from `seeds` when every arc is live.
pub fn reachable_counts(g: &Graph, seeds: &SeedSet, part: &CommunityPartition) -> Result<Vec<usize>> {
    check_inputs(g, seeds, part)?;
    let reached = reachable(g, seeds.vertices());
    let mut counts = vec![0usize; part.num_communities()];
    for (v, _) in reached.iter().enumerate().filter(|(_, &r)| r) {
        counts[part.label(v)] += 1;
    }
    Ok(counts)
}

pub fn exact_utilities(g: &Graph, seeds: &SeedSet, part: &CommunityPartition) -> Result<UtilityVector> {
    exact_utilities_with(g, seeds, part, &ExactOptions::default())
}

/// Exact expected influenced fractions.
///
/// `p ∈ {0, 1}` is plain reachability. Otherwise the live/dead states of every arc
/// whose tail is reachable from the seeds are enumerated, weighting each state by
/// `p^|live| (1-p)^|dead|`. Graphs whose underlying undirected graph is a forest
/// are handled at any size: subtrees hanging off a target are disjoint, so their
/// contributions are independent.
pub fn exact_utilities_with(
    g: &Graph,
    seeds: &SeedSet,
    part: &CommunityPartition,
    opts: &ExactOptions,
) -> Result<UtilityVector> {
    check_inputs(g, seeds, part)?;
    let p = g.p();
    let probs = if p == 1.0 {
        reachable(g, seeds.vertices()).into_iter().map(|r| if r { 1.0 } else { 0.0 }).collect()
    } else if p == 0.0 {
        (0..g.n()).map(|v| if seeds.contains(v) { 1.0 } else { 0.0 }).collect()
    } else {
        let relevant = relevant_arcs(g, seeds);
        let fits = relevant.len() <= opts.arc_limit;
        match opts.method {
            ExactMethod::Enumerate if !fits => {
                return Err(Error::EnumerationLimit { arcs: relevant.len(), limit: opts.arc_limit })
            }
            ExactMethod::Enumerate => enumerate(g.n(), &relevant, p, seeds),
            ExactMethod::Auto if fits => enumerate(g.n(), &relevant, p, seeds),
            ExactMethod::Forest | ExactMethod::Auto => match Forest::build(g) {
                Some(forest) => forest.activation_probabilities(p, seeds),
                None => {
                    return Err(Error::EnumerationLimit {
                        arcs: relevant.len(),
                        limit: opts.arc_limit,
                    })
                }
            },
        }
    };
    let mut sums = vec![0.0; part.num_communities()];
    for (v, pr) in probs.iter().enumerate() {
        sums[part.label(v)] += pr;
    }
    let values = sums
        .iter()
        .zip(part.sizes())
        .map(|(s, &n)| (s / n as f64).clamp(0.0, 1.0))
        .collect();
    UtilityVector::new(values, part.sizes().to_vec())
}

fn check_inputs(g: &Graph, seeds: &SeedSet, part: &CommunityPartition) -> Result<()> {
    part.check_graph(g)?;
    if let Some(&id) = seeds.vertices().iter().find(|&&v| v >= g.n()) {
        return Err(Error::VertexOutOfRange { id, n: g.n() });
    }
    Ok(())
}

fn reachable(g: &Graph, seeds: &[usize]) -> Vec<bool> {
    let adj = g.out_adjacency();
    let mut seen = vec![false; g.n()];
    let mut stack: Vec<usize> = Vec::new();
    for &s in seeds {
        if !seen[s] {
            seen[s] = true;
            stack.push(s);
        }
    }
    while let Some(u) = stack.pop() {
        for &v in adj.neighbors(u) {
            let v = v as usize;
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

/// Arcs that can ever carry influence: tail reachable from a seed, head not a seed.
fn relevant_arcs(g: &Graph, seeds: &SeedSet) -> Vec<(usize, usize)> {
    let reach = reachable(g, seeds.vertices());
    g.arcs().into_iter().filter(|&(u, v)| reach[u] && !seeds.contains(v)).collect()
}

fn enumerate(n: usize, arcs: &[(usize, usize)], p: f64, seeds: &SeedSet) -> Vec<f64> {
    let m = arcs.len();
    let mut probs = vec![0.0; n];
    let mut active = vec![false; n];
    for mask in 0u64..(1u64 << m) {
        let live = mask.count_ones() as i32;
        let weight = p.powi(live) * (1.0 - p).powi(m as i32 - live);
        active.iter_mut().for_each(|a| *a = false);
        for &s in seeds.vertices() {
            active[s] = true;
        }
        // arcs are few; sweep until no arc fires
        loop {
            let mut changed = false;
            for (i, &(u, v)) in arcs.iter().enumerate() {
                if mask >> i & 1 == 1 && active[u] && !active[v] {
                    active[v] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for (pr, &a) in probs.iter_mut().zip(&active) {
            if a {
                *pr += weight;
            }
        }
    }
    probs
}

/// Undirected-forest view of a graph with per-direction arc flags.
struct Forest {
    /// `neighbors[x]` holds `(y, arc y→x exists)`.
    neighbors: Vec<Vec<(usize, bool)>>,
}

impl Forest {
    fn build(g: &Graph) -> Option<Forest> {
        let n = g.n();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut pairs: std::collections::HashMap<(usize, usize), (bool, bool)> =
            std::collections::HashMap::new();
        for (u, v) in g.arcs() {
            let key = (u.min(v), u.max(v));
            let entry = pairs.entry(key).or_insert((false, false));
            if u < v {
                entry.0 = true;
            } else {
                entry.1 = true;
            }
        }
        let mut keys: Vec<_> = pairs.keys().copied().collect();
        keys.sort_unstable();
        let mut neighbors = vec![Vec::new(); n];
        for (a, b) in keys {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return None;
            }
            parent[ra] = rb;
            let (ab, ba) = pairs[&(a, b)];
            neighbors[b].push((a, ab));
            neighbors[a].push((b, ba));
        }
        Some(Forest { neighbors })
    }

    fn activation_probabilities(&self, p: f64, seeds: &SeedSet) -> Vec<f64> {
        let n = self.neighbors.len();
        let mut out = vec![0.0; n];
        let mut reach = vec![0.0; n];
        let mut order: Vec<(usize, usize)> = Vec::with_capacity(n);
        for (target, slot) in out.iter_mut().enumerate() {
            if seeds.contains(target) {
                *slot = 1.0;
                continue;
            }
            // preorder from the target, then fold subtrees bottom-up
            order.clear();
            order.push((target, usize::MAX));
            let mut i = 0;
            while i < order.len() {
                let (x, from) = order[i];
                i += 1;
                for &(y, _) in &self.neighbors[x] {
                    if y != from {
                        order.push((y, x));
                    }
                }
            }
            for &(x, from) in order.iter().rev() {
                let miss: f64 = self.neighbors[x]
                    .iter()
                    .filter(|&&(y, arc)| y != from && arc)
                    .map(|&(y, _)| 1.0 - p * reach[y])
                    .product();
                reach[x] = if seeds.contains(x) { 1.0 } else { 1.0 - miss };
            }
            *slot = reach[target];
        }
        out
    }
}
