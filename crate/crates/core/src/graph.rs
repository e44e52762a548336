//! Undirected weighted sparse graph with the descriptive metrics used
//! throughout the pipeline.
//!
//! The same graph type is used at every stage; only the meaning of the
//! edge weight changes (shared-repository count, retracing probability,
//! or their product).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::partition::Partition;

/// Dense node identifier, contiguous in `[0, node_count)`.
pub type NodeId = usize;

/// An undirected edge with canonical endpoint order `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub weight: f64,
}

/// Immutable undirected weighted graph.
///
/// No self-loops, at most one edge per unordered pair. Adjacency lists are
/// sorted by neighbor id and store the index of the edge they belong to.
#[derive(Debug, Clone)]
pub struct Graph {
    node_count: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(NodeId, usize)>>,
    total_weight: f64,
}

impl Graph {
    /// Builds a graph from raw `(u, v, weight)` triples.
    ///
    /// Duplicate pairs are merged by summing their weights. Self-loops are
    /// rejected so ingestion bugs surface instead of silently vanishing.
    pub fn from_edges<I>(node_count: usize, raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64)>,
    {
        let mut merged: BTreeMap<(NodeId, NodeId), f64> = BTreeMap::new();
        for (u, v, w) in raw {
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if u >= node_count {
                return Err(Error::NodeOutOfRange { node: u, node_count });
            }
            if v >= node_count {
                return Err(Error::NodeOutOfRange { node: v, node_count });
            }
            if w < 0.0 || !w.is_finite() {
                return Err(Error::NegativeWeight { u, v, weight: w });
            }
            let key = (u.min(v), u.max(v));
            *merged.entry(key).or_insert(0.0) += w;
        }

        let edges: Vec<Edge> = merged
            .into_iter()
            .map(|((u, v), weight)| Edge { u, v, weight })
            .collect();

        let mut adj = vec![Vec::new(); node_count];
        let mut total_weight = 0.0;
        for (idx, e) in edges.iter().enumerate() {
            adj[e.u].push((e.v, idx));
            adj[e.v].push((e.u, idx));
            total_weight += e.weight;
        }
        for list in &mut adj {
            list.sort_unstable_by_key(|&(nbr, _)| nbr);
        }

        Ok(Graph { node_count, edges, adj, total_weight })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `u` as `(neighbor, edge index)` pairs, sorted by neighbor id.
    pub fn neighbors(&self, u: NodeId) -> &[(NodeId, usize)] {
        &self.adj[u]
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adj[u].len()
    }

    pub fn weighted_degree(&self, u: NodeId) -> f64 {
        self.adj[u].iter().map(|&(_, e)| self.edges[e].weight).sum()
    }

    /// Sum of all edge weights (each undirected edge counted once).
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// Index into `edges()` for the pair `{u, v}`, if present.
    pub fn edge_index(&self, u: NodeId, v: NodeId) -> Option<usize> {
        let list = &self.adj[u];
        list.binary_search_by_key(&v, |&(nbr, _)| nbr)
            .ok()
            .map(|pos| list[pos].1)
    }

    /// Same topology with a new weight per edge, in edge-index order.
    pub fn with_weights(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.edges.len() {
            return Err(Error::EdgeSetMismatch { got: weights.len(), expected: self.edges.len() });
        }
        let mut g = self.clone();
        let mut total = 0.0;
        for (e, &w) in g.edges.iter_mut().zip(weights) {
            if w < 0.0 || !w.is_finite() {
                return Err(Error::NegativeWeight { u: e.u, v: e.v, weight: w });
            }
            e.weight = w;
            total += w;
        }
        g.total_weight = total;
        Ok(g)
    }

    /// Fraction of realized edges out of all possible pairs: `2|E| / (n(n-1))`.
    pub fn density(&self) -> Result<f64> {
        if self.node_count < 2 {
            return Err(Error::DensityUndefined(self.node_count));
        }
        let n = self.node_count as f64;
        Ok(2.0 * self.edges.len() as f64 / (n * (n - 1.0)))
    }

    /// Global clustering coefficient: closed triplets over connected triplets.
    ///
    /// Returns 0 when the graph has no connected triplets.
    pub fn transitivity(&self) -> f64 {
        let mut triplets = 0u64;
        for u in 0..self.node_count {
            let d = self.adj[u].len() as u64;
            triplets += d * d.saturating_sub(1) / 2;
        }
        if triplets == 0 {
            return 0.0;
        }
        // Each triangle is counted once per edge, i.e. three times in total.
        let mut closed = 0u64;
        for e in &self.edges {
            closed += self.common_neighbor_count(e.u, e.v);
        }
        closed as f64 / triplets as f64
    }

    fn common_neighbor_count(&self, u: NodeId, v: NodeId) -> u64 {
        let (a, b) = (&self.adj[u], &self.adj[v]);
        let (mut i, mut j, mut count) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }

    /// Labels every node with its connected component.
    pub fn connected_components(&self) -> Partition {
        let mut labels = vec![usize::MAX; self.node_count];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..self.node_count {
            if labels[start] != usize::MAX {
                continue;
            }
            labels[start] = next;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &(v, _) in &self.adj[u] {
                    if labels[v] == usize::MAX {
                        labels[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        Partition::from_labels(&labels)
    }

    /// Drops all zero-degree nodes, remapping ids to stay dense.
    pub fn remove_isolates(&self) -> (Graph, IsolateRemap) {
        let mut old_to_new = vec![None; self.node_count];
        let mut new_to_old = Vec::new();
        for u in 0..self.node_count {
            if !self.adj[u].is_empty() {
                old_to_new[u] = Some(new_to_old.len());
                new_to_old.push(u);
            }
        }
        let edges = self.edges.iter().map(|e| {
            (old_to_new[e.u].unwrap(), old_to_new[e.v].unwrap(), e.weight)
        });
        let graph = Graph::from_edges(new_to_old.len(), edges)
            .expect("remapped edges are valid by construction");
        (graph, IsolateRemap { old_to_new, new_to_old })
    }
}

/// Node id translation produced by [`Graph::remove_isolates`].
#[derive(Debug, Clone)]
pub struct IsolateRemap {
    /// `old_to_new[old] = Some(new)` for retained nodes, `None` for isolates.
    pub old_to_new: Vec<Option<NodeId>>,
    /// Original id of each retained node.
    pub new_to_old: Vec<NodeId>,
}

impl IsolateRemap {
    pub fn is_identity(&self) -> bool {
        self.old_to_new.len() == self.new_to_old.len()
            && self.old_to_new.iter().enumerate().all(|(i, m)| *m == Some(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_edges(pairs: &[(usize, usize)]) -> Vec<(usize, usize, f64)> {
        pairs.iter().map(|&(u, v)| (u, v, 1.0)).collect()
    }

    #[test]
    fn duplicate_pairs_merge_by_summing() {
        let g = Graph::from_edges(2, vec![(0, 1, 1.0), (1, 0, 2.0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edges()[0].weight, 3.0);
    }

    #[test]
    fn triangle_builds_three_edges() {
        let g = Graph::from_edges(3, unit_edges(&[(0, 1), (1, 2), (2, 0)])).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.weighted_degree(0), 2.0);
    }

    #[test]
    fn self_loop_is_rejected_naming_the_node() {
        let err = Graph::from_edges(1, vec![(0, 0, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::SelfLoop(0)));
    }

    #[test]
    fn out_of_range_endpoint_is_rejected() {
        let err = Graph::from_edges(2, vec![(0, 5, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::NodeOutOfRange { node: 5, .. }));
    }

    #[test]
    fn density_of_complete_k4_is_one() {
        let g = Graph::from_edges(
            4,
            unit_edges(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
        )
        .unwrap();
        assert_eq!(g.density().unwrap(), 1.0);
    }

    #[test]
    fn density_of_four_node_path_is_half() {
        // 2*3 / (4*3) worked out by hand.
        let g = Graph::from_edges(4, unit_edges(&[(0, 1), (1, 2), (2, 3)])).unwrap();
        assert_eq!(g.density().unwrap(), 0.5);
    }

    #[test]
    fn density_of_empty_ten_node_graph_is_zero() {
        let g = Graph::from_edges(10, Vec::new()).unwrap();
        assert_eq!(g.density().unwrap(), 0.0);
    }

    #[test]
    fn density_undefined_below_two_nodes() {
        let g = Graph::from_edges(1, Vec::new()).unwrap();
        assert!(matches!(g.density().unwrap_err(), Error::DensityUndefined(1)));
    }

    #[test]
    fn transitivity_of_triangle_is_one() {
        let g = Graph::from_edges(3, unit_edges(&[(0, 1), (1, 2), (2, 0)])).unwrap();
        assert_eq!(g.transitivity(), 1.0);
    }

    #[test]
    fn transitivity_of_path_is_zero() {
        let g = Graph::from_edges(3, unit_edges(&[(0, 1), (1, 2)])).unwrap();
        assert_eq!(g.transitivity(), 0.0);
    }

    #[test]
    fn transitivity_of_k4_minus_edge() {
        // Triplet enumeration by hand: degrees (3,3,2,2) give 8 triplets,
        // triangles {0,1,2} and {0,1,3} give 6 closed ones.
        let g = Graph::from_edges(4, unit_edges(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]))
            .unwrap();
        assert_eq!(g.transitivity(), 0.75);
    }

    #[test]
    fn two_disjoint_triangles_have_two_components() {
        let g = Graph::from_edges(
            6,
            unit_edges(&[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]),
        )
        .unwrap();
        let p = g.connected_components();
        assert_eq!(p.community_count(), 2);
        assert_eq!(p.sizes(), vec![3, 3]);
    }

    #[test]
    fn connected_graph_is_one_component() {
        let g = Graph::from_edges(4, unit_edges(&[(0, 1), (1, 2), (2, 3)])).unwrap();
        assert_eq!(g.connected_components().community_count(), 1);
    }

    #[test]
    fn star_plus_cycle_toy_has_components_of_nine_and_five() {
        // 8 leaves around node 0, plus a 5-clique on nodes 9..14.
        let mut edges = unit_edges(&[
            (0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (0, 6), (0, 7), (0, 8),
        ]);
        for i in 9..14 {
            for j in (i + 1)..14 {
                edges.push((i, j, 1.0));
            }
        }
        let g = Graph::from_edges(14, edges).unwrap();
        let p = g.connected_components();
        assert_eq!(p.community_count(), 2);
        let mut sizes = p.sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![5, 9]);
    }

    #[test]
    fn remove_isolates_drops_unconnected_nodes() {
        let g = Graph::from_edges(5, unit_edges(&[(0, 2), (2, 4)])).unwrap();
        let (h, remap) = g.remove_isolates();
        assert_eq!(h.node_count(), 3);
        assert_eq!(h.edge_count(), 2);
        assert_eq!(remap.new_to_old, vec![0, 2, 4]);
        assert_eq!(remap.old_to_new[1], None);
    }

    #[test]
    fn remove_isolates_without_isolates_is_identity() {
        let g = Graph::from_edges(3, unit_edges(&[(0, 1), (1, 2)])).unwrap();
        let (h, remap) = g.remove_isolates();
        assert_eq!(h.node_count(), 3);
        assert!(remap.is_identity());
    }

    #[test]
    fn remove_isolates_on_all_isolates_gives_empty_graph() {
        let g = Graph::from_edges(4, Vec::new()).unwrap();
        let (h, remap) = g.remove_isolates();
        assert_eq!(h.node_count(), 0);
        assert!(remap.new_to_old.is_empty());
    }

    #[test]
    fn remove_isolates_is_idempotent() {
        let g = Graph::from_edges(6, unit_edges(&[(0, 3), (3, 5)])).unwrap();
        let (h1, _) = g.remove_isolates();
        let (h2, remap) = h1.remove_isolates();
        assert_eq!(h1.node_count(), h2.node_count());
        assert!(remap.is_identity());
    }

    #[test]
    fn adjacency_is_symmetric_and_consistent() {
        let g = Graph::from_edges(5, unit_edges(&[(0, 1), (1, 2), (2, 3), (3, 0), (1, 4)]))
            .unwrap();
        let mut entries = 0;
        for u in 0..g.node_count() {
            for &(v, e) in g.neighbors(u) {
                entries += 1;
                assert!(g.neighbors(v).iter().any(|&(w, f)| w == u && f == e));
            }
        }
        assert_eq!(entries, 2 * g.edge_count());
    }
}
