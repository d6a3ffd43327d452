//! Graph, community partition and seed-set types.
//!
//! A [`Graph`] is immutable once validated. Undirected edges are stored once and
//! expanded into two arcs by [`Graph::arcs`] when a diffusion process needs them.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Propagation probability used when none is given.
pub const DEFAULT_P: f64 = 0.25;

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    directed: bool,
    p: f64,
}

impl Graph {
    /// Validates and builds a graph. Edge order is preserved.
    pub fn new(n: usize, edges: Vec<(usize, usize)>, directed: bool, p: f64) -> Result<Self> {
        check_probability(p)?;
        let mut seen = HashSet::with_capacity(edges.len());
        for &(u, v) in &edges {
            for id in [u, v] {
                if id >= n {
                    return Err(Error::VertexOutOfRange { id, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            let key = if directed || u < v { (u, v) } else { (v, u) };
            if !seen.insert(key) {
                return Err(Error::DuplicateEdge(u, v));
            }
        }
        Ok(Graph { n, edges, directed, p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Same topology with a different propagation probability.
    pub fn with_p(&self, p: f64) -> Result<Graph> {
        check_probability(p)?;
        Ok(Graph { p, ..self.clone() })
    }

    pub fn arc_count(&self) -> usize {
        if self.directed {
            self.edges.len()
        } else {
            2 * self.edges.len()
        }
    }

    /// Directed arcs along which influence can travel.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut arcs = Vec::with_capacity(self.arc_count());
        for &(u, v) in &self.edges {
            arcs.push((u, v));
            if !self.directed {
                arcs.push((v, u));
            }
        }
        arcs
    }

    /// Out-adjacency over [`Graph::arcs`] in compressed form.
    pub fn out_adjacency(&self) -> Adjacency {
        Adjacency::from_arcs(self.n, &self.arcs())
    }
}

/// Compressed sparse row adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl Adjacency {
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Self {
        let mut degree = vec![0u32; n + 1];
        for &(u, _) in arcs {
            degree[u + 1] += 1;
        }
        for i in 0..n {
            degree[i + 1] += degree[i];
        }
        let offsets = degree;
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; arcs.len()];
        for &(u, v) in arcs {
            targets[fill[u] as usize] = v as u32;
            fill[u] += 1;
        }
        Adjacency { offsets, targets }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn arc_count(&self) -> usize {
        self.targets.len()
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }
}

/// Disjoint community labels covering every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityPartition {
    labels: Vec<usize>,
    sizes: Vec<usize>,
}

impl CommunityPartition {
    /// Labels must use every id in `0..N_C`.
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        let count = labels.iter().map(|&c| c + 1).max().unwrap_or(0);
        let mut sizes = vec![0usize; count];
        for &c in &labels {
            sizes[c] += 1;
        }
        if let Some(c) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::Partition(format!("community {c} has no vertices")));
        }
        Ok(CommunityPartition { labels, sizes })
    }

    /// Contiguous blocks: the first `sizes[0]` vertices form community 0, and so on.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        let labels = sizes
            .iter()
            .enumerate()
            .flat_map(|(c, &s)| std::iter::repeat(c).take(s))
            .collect();
        Self::new(labels)
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn num_communities(&self) -> usize {
        self.sizes.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size(&self, c: usize) -> usize {
        self.sizes[c]
    }

    pub fn members(&self, c: usize) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(move |&(_, &l)| l == c)
            .map(|(v, _)| v)
    }

    pub fn check_graph(&self, g: &Graph) -> Result<()> {
        if self.labels.len() != g.n() {
            return Err(Error::GraphMismatch { partition: self.labels.len(), graph: g.n() });
        }
        Ok(())
    }
}

/// A budget-feasible set of seed vertices, kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SeedSet {
    vertices: Vec<usize>,
    budget: usize,
}

impl SeedSet {
    pub fn new(vertices: impl IntoIterator<Item = usize>, budget: usize, n: usize) -> Result<Self> {
        let mut vertices: Vec<usize> = vertices.into_iter().collect();
        vertices.sort_unstable();
        vertices.dedup();
        if let Some(&id) = vertices.iter().find(|&&v| v >= n) {
            return Err(Error::VertexOutOfRange { id, n });
        }
        if vertices.len() > budget {
            return Err(Error::InvalidParameter(format!(
                "{} seeds exceed budget {budget}",
                vertices.len()
            )));
        }
        Ok(SeedSet { vertices, budget })
    }

    /// Seed set whose budget equals its size.
    pub fn from_vertices(vertices: impl IntoIterator<Item = usize>, n: usize) -> Result<Self> {
        let vertices: Vec<usize> = vertices.into_iter().collect();
        let budget = vertices.len();
        Self::new(vertices, budget, n)
    }

    pub fn empty() -> Self {
        SeedSet::default()
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }
}

/// Subgraph induced by one community, with dense ids and the inverse map.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedSubgraph {
    pub graph: Graph,
    /// `to_original[i]` is the id in the parent graph of subgraph vertex `i`.
    pub to_original: Vec<usize>,
}

impl InducedSubgraph {
    pub fn original_ids(&self, local: &[usize]) -> Vec<usize> {
        local.iter().map(|&v| self.to_original[v]).collect()
    }
}

/// Keeps the vertices of community `c` and the edges with both endpoints in it.
pub fn induced_within_community_subgraph(
    g: &Graph,
    part: &CommunityPartition,
    c: usize,
) -> Result<InducedSubgraph> {
    part.check_graph(g)?;
    if c >= part.num_communities() {
        return Err(Error::InvalidParameter(format!(
            "community {c} out of range (N_C = {})",
            part.num_communities()
        )));
    }
    let mut local = vec![usize::MAX; g.n()];
    let mut to_original = Vec::with_capacity(part.size(c));
    for v in part.members(c) {
        local[v] = to_original.len();
        to_original.push(v);
    }
    let edges = g
        .edges()
        .iter()
        .filter(|&&(u, v)| local[u] != usize::MAX && local[v] != usize::MAX)
        .map(|&(u, v)| (local[u], local[v]))
        .collect();
    let graph = Graph::new(to_original.len(), edges, g.is_directed(), g.p())?;
    Ok(InducedSubgraph { graph, to_original })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_and_loops() {
        assert!(matches!(
            Graph::new(3, vec![(0, 5)], false, 0.25),
            Err(Error::VertexOutOfRange { id: 5, n: 3 })
        ));
        assert!(matches!(Graph::new(3, vec![(1, 1)], false, 0.25), Err(Error::SelfLoop(1))));
        assert!(matches!(Graph::new(3, vec![], false, 1.5), Err(Error::InvalidProbability(_))));
    }

    #[test]
    fn undirected_reverse_pair_is_duplicate() {
        assert!(matches!(
            Graph::new(3, vec![(0, 1), (1, 0)], false, 0.5),
            Err(Error::DuplicateEdge(1, 0))
        ));
        // directed graphs may hold both orientations
        let g = Graph::new(3, vec![(0, 1), (1, 0)], true, 0.5).unwrap();
        assert_eq!(g.arc_count(), 2);
    }

    #[test]
    fn undirected_edges_expand_to_two_arcs() {
        let g = Graph::new(3, vec![(0, 1), (1, 2)], false, 0.5).unwrap();
        assert_eq!(g.arcs(), vec![(0, 1), (1, 0), (1, 2), (2, 1)]);
        let adj = g.out_adjacency();
        assert_eq!(adj.neighbors(1), &[0, 2]);
        assert_eq!(adj.neighbors(0), &[1]);
    }

    #[test]
    fn partition_requires_every_label() {
        assert!(CommunityPartition::new(vec![0, 2, 2]).is_err());
        let part = CommunityPartition::new(vec![1, 0, 1]).unwrap();
        assert_eq!(part.sizes(), &[1, 2]);
        assert_eq!(part.members(1).collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn seed_set_is_sorted_and_budgeted() {
        let s = SeedSet::new([4, 1, 4], 3, 5).unwrap();
        assert_eq!(s.vertices(), &[1, 4]);
        assert!(SeedSet::new([1, 2, 3], 2, 5).is_err());
        assert!(SeedSet::new([7], 1, 5).is_err());
    }

    #[test]
    fn cross_edge_absent_from_both_subgraphs() {
        let g = Graph::new(4, vec![(0, 1), (1, 2), (2, 3)], false, 0.3).unwrap();
        let part = CommunityPartition::new(vec![0, 0, 1, 1]).unwrap();
        let a = induced_within_community_subgraph(&g, &part, 0).unwrap();
        let b = induced_within_community_subgraph(&g, &part, 1).unwrap();
        assert_eq!(a.graph.edges(), &[(0, 1)]);
        assert_eq!(b.graph.edges(), &[(0, 1)]);
        assert_eq!(b.to_original, vec![2, 3]);
        assert_eq!(b.original_ids(&[1]), vec![3]);
    }

    #[test]
    fn disconnected_community_keeps_its_components() {
        let g = Graph::new(6, vec![(0, 1), (0, 2), (3, 4)], false, 0.3).unwrap();
        let part = CommunityPartition::new(vec![0, 0, 0, 1, 1, 1]).unwrap();
        let a = induced_within_community_subgraph(&g, &part, 0).unwrap();
        assert_eq!(a.graph.n(), 3);
        assert_eq!(a.graph.edges().len(), 2);
        let b = induced_within_community_subgraph(&g, &part, 1).unwrap();
        assert_eq!(b.graph.n(), 3);
        assert_eq!(b.graph.edges(), &[(0, 1)]);
    }
}
