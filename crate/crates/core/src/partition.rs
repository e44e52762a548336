//! Node-to-community labelings.

use crate::graph::NodeId;

/// A labeling of every node with a community id.
///
/// Labels are always dense in `[0, community_count)`, normalized by first
/// occurrence, so two partitions that group nodes identically compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    community_count: usize,
}

impl Partition {
    /// Builds a partition from arbitrary labels, renumbering them densely
    /// in order of first occurrence.
    pub fn from_labels(raw: &[usize]) -> Self {
        let mut remap = std::collections::HashMap::new();
        let mut labels = Vec::with_capacity(raw.len());
        for &l in raw {
            let next = remap.len();
            let dense = *remap.entry(l).or_insert(next);
            labels.push(dense);
        }
        Partition { labels, community_count: remap.len() }
    }

    /// Every node in its own community.
    pub fn singletons(node_count: usize) -> Self {
        Partition { labels: (0..node_count).collect(), community_count: node_count }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn community_count(&self) -> usize {
        self.community_count
    }

    pub fn label(&self, node: NodeId) -> usize {
        self.labels[node]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Node count of each community, indexed by community id.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.community_count];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Member lists per community, indexed by community id.
    pub fn communities(&self) -> Vec<Vec<NodeId>> {
        let mut out = vec![Vec::new(); self.community_count];
        for (node, &l) in self.labels.iter().enumerate() {
            out[l].push(node);
        }
        out
    }
}
