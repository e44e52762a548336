//! Weighted modularity, the two-phase Louvain optimizer, and partition
//! comparison via normalized mutual information.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;

#[derive(Debug, Clone, Copy)]
pub struct LouvainConfig {
    pub seed: u64,
    /// Minimum absolute modularity gain for a sweep (and a level) to continue.
    pub min_gain: f64,
}

impl LouvainConfig {
    pub const DEFAULT_MIN_GAIN: f64 = 1e-7;

    pub fn new(seed: u64) -> Self {
        LouvainConfig { seed, min_gain: Self::DEFAULT_MIN_GAIN }
    }
}

/// Newman-Girvan modularity of `p` on `g`:
/// `Q = (1/2m) Σ_ij [A_ij − k_i k_j / 2m] δ(c_i, c_j)`.
pub fn modularity(g: &Graph, p: &Partition) -> Result<f64> {
    if p.node_count() != g.node_count() {
        return Err(Error::PartitionMismatch { labels: p.node_count(), nodes: g.node_count() });
    }
    let m2 = 2.0 * g.total_weight();
    if m2 <= 0.0 {
        return Err(Error::ZeroTotalWeight);
    }
    let k = p.community_count();
    let mut internal = vec![0.0; k];
    let mut comm_degree = vec![0.0; k];
    for e in g.edges() {
        let (cu, cv) = (p.label(e.u), p.label(e.v));
        if cu == cv {
            internal[cu] += e.weight;
        }
        comm_degree[cu] += e.weight;
        comm_degree[cv] += e.weight;
    }
    let q = (0..k)
        .map(|c| 2.0 * internal[c] / m2 - (comm_degree[c] / m2).powi(2))
        .sum();
    Ok(q)
}

/// Runs Louvain until a full pass over the graph gains less than
/// `cfg.min_gain` modularity.
///
/// Node visit order is reshuffled per sweep from the seeded generator, so a
/// fixed seed yields a fixed partition. Nodes whose incident weights are all
/// zero never see a positive gain and stay singletons.
pub fn louvain(g: &Graph, cfg: &LouvainConfig) -> Result<Partition> {
    let mut level = LevelGraph::from_graph(g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut node_to_final: Vec<usize> = (0..g.node_count()).collect();
    let mut current_q = level.modularity(&identity(level.len()));

    loop {
        let mut labels = identity(level.len());
        let moved = local_phase(&level, &mut labels, &mut rng, cfg.min_gain);
        if !moved {
            break;
        }
        let (next, dense) = level.aggregate(&labels);
        for l in node_to_final.iter_mut() {
            *l = dense[labels[*l]];
        }
        let new_q = next.modularity(&identity(next.len()));
        level = next;
        if new_q - current_q < cfg.min_gain {
            break;
        }
        current_q = new_q;
    }
    Ok(Partition::from_labels(&node_to_final))
}

/// Runs `runs` independently seeded Louvain passes and keeps the
/// highest-modularity partition (first winner on ties).
pub fn louvain_best_of(g: &Graph, cfg: &LouvainConfig, runs: usize) -> Result<Partition> {
    let runs = runs.max(1);
    let mut best: Option<(f64, Partition)> = None;
    for run in 0..runs {
        let run_cfg = LouvainConfig {
            seed: crate::derive_seed(cfg.seed, run as u64),
            min_gain: cfg.min_gain,
        };
        let p = louvain(g, &run_cfg)?;
        let q = modularity(g, &p)?;
        if best.as_ref().map_or(true, |(bq, _)| q > *bq) {
            best = Some((q, p));
        }
    }
    Ok(best.expect("runs >= 1").1)
}

/// Normalized mutual information `2 I(A;B) / (H(A) + H(B))` over the joint
/// label distribution; 1 when both entropies are zero.
pub fn nmi(a: &Partition, b: &Partition) -> Result<f64> {
    if a.node_count() != b.node_count() {
        return Err(Error::NodeSetMismatch(a.node_count(), b.node_count()));
    }
    let n = a.node_count();
    if n == 0 {
        return Ok(1.0);
    }
    let nf = n as f64;
    let entropy = |sizes: Vec<usize>| -> f64 {
        sizes
            .iter()
            .filter(|&&s| s > 0)
            .map(|&s| {
                let p = s as f64 / nf;
                -p * p.ln()
            })
            .sum()
    };
    let ha = entropy(a.sizes());
    let hb = entropy(b.sizes());
    if ha + hb == 0.0 {
        return Ok(1.0);
    }
    let mut joint: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for node in 0..n {
        *joint.entry((a.label(node), b.label(node))).or_insert(0) += 1;
    }
    let sizes_a = a.sizes();
    let sizes_b = b.sizes();
    let mut mi = 0.0;
    for (&(ca, cb), &count) in &joint {
        let p_ab = count as f64 / nf;
        let p_a = sizes_a[ca] as f64 / nf;
        let p_b = sizes_b[cb] as f64 / nf;
        mi += p_ab * (p_ab / (p_a * p_b)).ln();
    }
    Ok((2.0 * mi / (ha + hb)).clamp(0.0, 1.0))
}

fn identity(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Working graph for one Louvain level. Self-loop entries hold the full
/// ordered-pair value `A_ii` (twice the internal weight folded into a
/// super-node), which keeps modularity invariant under aggregation.
struct LevelGraph {
    adj: Vec<Vec<(usize, f64)>>,
    self_loop: Vec<f64>,
    degree: Vec<f64>,
    m2: f64,
}

impl LevelGraph {
    fn from_graph(g: &Graph) -> Result<Self> {
        let n = g.node_count();
        let mut adj = vec![Vec::new(); n];
        for u in 0..n {
            adj[u] = g
                .neighbors(u)
                .iter()
                .map(|&(v, e)| (v, g.edges()[e].weight))
                .collect();
        }
        let self_loop = vec![0.0; n];
        let lvl = LevelGraph::finish(adj, self_loop)?;
        Ok(lvl)
    }

    fn finish(adj: Vec<Vec<(usize, f64)>>, self_loop: Vec<f64>) -> Result<Self> {
        let degree: Vec<f64> = adj
            .iter()
            .zip(&self_loop)
            .map(|(nbrs, s)| nbrs.iter().map(|&(_, w)| w).sum::<f64>() + s)
            .collect();
        let m2: f64 = degree.iter().sum();
        if m2 <= 0.0 {
            return Err(Error::ZeroTotalWeight);
        }
        Ok(LevelGraph { adj, self_loop, degree, m2 })
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    fn modularity(&self, labels: &[usize]) -> f64 {
        let k = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut internal = vec![0.0; k];
        let mut comm_degree = vec![0.0; k];
        for i in 0..self.len() {
            let c = labels[i];
            comm_degree[c] += self.degree[i];
            internal[c] += self.self_loop[i];
            for &(j, w) in &self.adj[i] {
                if labels[j] == c {
                    internal[c] += w;
                }
            }
        }
        (0..k)
            .map(|c| internal[c] / self.m2 - (comm_degree[c] / self.m2).powi(2))
            .sum()
    }

    /// Collapses communities into super-nodes. Returns the new level and the
    /// dense renumbering of community labels.
    fn aggregate(&self, labels: &[usize]) -> (LevelGraph, Vec<usize>) {
        let mut dense = vec![usize::MAX; self.len()];
        let mut members: Vec<Vec<usize>> = Vec::new();
        for i in 0..self.len() {
            let c = labels[i];
            if dense[c] == usize::MAX {
                dense[c] = members.len();
                members.push(Vec::new());
            }
            members[dense[c]].push(i);
        }

        let k = members.len();
        let mut adj = vec![Vec::new(); k];
        let mut self_loop = vec![0.0; k];
        let mut acc = vec![0.0; k];
        let mut touched = Vec::new();
        for (c, group) in members.iter().enumerate() {
            for &i in group {
                self_loop[c] += self.self_loop[i];
                for &(j, w) in &self.adj[i] {
                    let cj = dense[labels[j]];
                    if cj == c {
                        self_loop[c] += w;
                    } else {
                        if acc[cj] == 0.0 {
                            touched.push(cj);
                        }
                        acc[cj] += w;
                    }
                }
            }
            touched.sort_unstable();
            adj[c] = touched.iter().map(|&cj| (cj, acc[cj])).collect();
            for &cj in &touched {
                acc[cj] = 0.0;
            }
            touched.clear();
        }

        let level = LevelGraph::finish(adj, self_loop).expect("aggregation preserves weight");
        (level, dense)
    }
}

/// One local-move phase: repeated sweeps over all nodes in seeded-shuffled
/// order, moving each to the neighboring community with the best modularity
/// gain (strictly positive; ties to the lowest community id). Stops when a
/// sweep gains less than `min_gain`. Returns whether anything moved.
fn local_phase(
    level: &LevelGraph,
    labels: &mut [usize],
    rng: &mut ChaCha8Rng,
    min_gain: f64,
) -> bool {
    let n = level.len();
    let mut comm_degree = vec![0.0; n];
    for i in 0..n {
        comm_degree[labels[i]] += level.degree[i];
    }

    let mut order: Vec<usize> = (0..n).collect();
    let mut acc = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut moved_any = false;

    loop {
        order.shuffle(rng);
        let mut sweep_gain = 0.0;
        for &i in &order {
            let current = labels[i];
            let k_i = level.degree[i];
            comm_degree[current] -= k_i;

            for &(j, w) in &level.adj[i] {
                let c = labels[j];
                if acc[c] == 0.0 {
                    touched.push(c);
                }
                acc[c] += w;
            }
            touched.sort_unstable();

            let score = |c: usize, acc: &[f64], comm_degree: &[f64]| -> f64 {
                acc[c] - k_i * comm_degree[c] / level.m2
            };
            let stay = score(current, &acc, &comm_degree);
            let mut best = current;
            let mut best_score = stay;
            for &c in &touched {
                if c == current {
                    continue;
                }
                let s = score(c, &acc, &comm_degree);
                if s > best_score {
                    best = c;
                    best_score = s;
                }
            }

            for &c in &touched {
                acc[c] = 0.0;
            }
            touched.clear();

            comm_degree[best] += k_i;
            if best != current {
                labels[i] = best;
                moved_any = true;
                sweep_gain += 2.0 * (best_score - stay) / level.m2;
            }
        }
        if sweep_gain < min_gain {
            break;
        }
    }
    moved_any
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn unit_graph(n: usize, pairs: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, pairs.iter().map(|&(u, v)| (u, v, 1.0))).unwrap()
    }

    fn two_triangles() -> Graph {
        unit_graph(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
    }

    #[test]
    fn modularity_of_two_disjoint_triangles_is_half() {
        // By hand: m = 6, each community has W_in = 3 and degree sum 6.
        let g = two_triangles();
        let p = Partition::from_labels(&[0, 0, 0, 1, 1, 1]);
        let q = modularity(&g, &p).unwrap();
        assert!((q - 0.5).abs() < 1e-12);
    }

    #[test]
    fn modularity_of_single_community_is_zero() {
        let g = two_triangles();
        let p = Partition::from_labels(&[0; 6]);
        assert!(modularity(&g, &p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn modularity_on_complete_graph_is_never_positive() {
        // Brute-force the formula over assorted labelings of K_5.
        let mut edges = Vec::new();
        for u in 0..5 {
            for v in (u + 1)..5 {
                edges.push((u, v));
            }
        }
        let g = unit_graph(5, &edges);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let labels: Vec<usize> = (0..5).map(|_| rng.random_range(0..3)).collect();
            let q = modularity(&g, &Partition::from_labels(&labels)).unwrap();
            assert!(q <= 1e-12, "Q = {q} for labels {labels:?}");
        }
    }

    #[test]
    fn modularity_rejects_zero_total_weight() {
        let g = Graph::from_edges(3, vec![(0, 1, 0.0), (1, 2, 0.0)]).unwrap();
        let p = Partition::singletons(3);
        assert!(matches!(modularity(&g, &p), Err(Error::ZeroTotalWeight)));
    }

    #[test]
    fn louvain_separates_bridged_triangles() {
        // Brute-force over all 203 partitions of 6 nodes confirms the two
        // triangles are the unique maximum, so Louvain must land there.
        let g = unit_graph(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)]);
        for seed in 0..5 {
            let p = louvain(&g, &LouvainConfig::new(seed)).unwrap();
            assert_eq!(p.community_count(), 2, "seed {seed}");
            let comms = p.communities();
            let mut sets: Vec<Vec<usize>> = comms.into_iter().collect();
            sets.sort();
            assert_eq!(sets, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        }
    }

    /// Star on 0..=8 (hub 0) plus a 5-clique on 9..=13, mirroring the toy
    /// comparison of raw counts against cycle-aware weights.
    fn star_and_clique(star_weight: f64, clique_weight: f64) -> Graph {
        let mut edges = Vec::new();
        for leaf in 1..=8 {
            edges.push((0, leaf, star_weight));
        }
        for i in 9..14 {
            for j in (i + 1)..14 {
                edges.push((i, j, clique_weight));
            }
        }
        Graph::from_edges(14, edges).unwrap()
    }

    #[test]
    fn unit_weights_group_star_and_clique_into_two_communities() {
        let g = star_and_clique(1.0, 1.0);
        let p = louvain(&g, &LouvainConfig::new(1)).unwrap();
        assert_eq!(p.community_count(), 2);
        let mut sets = p.communities();
        sets.sort();
        assert_eq!(sets[0], (0..9).collect::<Vec<_>>());
        assert_eq!(sets[1], (9..14).collect::<Vec<_>>());
    }

    #[test]
    fn zero_weight_star_decays_into_singletons() {
        let g = star_and_clique(0.0, 0.1);
        let p = louvain(&g, &LouvainConfig::new(1)).unwrap();
        assert_eq!(p.community_count(), 10);
        let sizes_of_star: Vec<usize> = (0..9).map(|n| p.sizes()[p.label(n)]).collect();
        assert!(sizes_of_star.iter().all(|&s| s == 1));
        let clique_label = p.label(9);
        assert!((10..14).all(|n| p.label(n) == clique_label));
    }

    #[test]
    fn louvain_never_loses_to_the_singleton_partition() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.random_range(4..20);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.random_range(0.0..1.0) < 0.3 {
                        edges.push((u, v, rng.random_range(0.1..2.0)));
                    }
                }
            }
            if edges.is_empty() {
                continue;
            }
            let g = Graph::from_edges(n, edges).unwrap();
            let p = louvain(&g, &LouvainConfig::new(3)).unwrap();
            let q = modularity(&g, &p).unwrap();
            let q0 = modularity(&g, &Partition::singletons(n)).unwrap();
            assert!(q >= q0 - 1e-12);
        }
    }

    #[test]
    fn aggregation_preserves_modularity_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let n = rng.random_range(5..50);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.random_range(0.0..1.0) < 0.2 {
                        edges.push((u, v, rng.random_range(0.5..3.0)));
                    }
                }
            }
            if edges.is_empty() {
                continue;
            }
            let g = Graph::from_edges(n, edges).unwrap();
            let level = LevelGraph::from_graph(&g).unwrap();
            let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..4)).collect();
            let q_before = level.modularity(&labels);
            let (agg, _) = level.aggregate(&labels);
            let q_after = agg.modularity(&identity(agg.len()));
            assert!(
                (q_before - q_after).abs() < 1e-12,
                "Q changed across aggregation: {q_before} vs {q_after}"
            );
        }
    }

    #[test]
    fn louvain_is_deterministic_per_seed() {
        let g = star_and_clique(1.0, 1.0);
        let a = louvain(&g, &LouvainConfig::new(42)).unwrap();
        let b = louvain(&g, &LouvainConfig::new(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn nmi_of_identical_partitions_is_one() {
        let p = Partition::from_labels(&[0, 0, 1, 1, 2]);
        assert_eq!(nmi(&p, &p).unwrap(), 1.0);
    }

    #[test]
    fn nmi_of_singletons_vs_one_block_is_zero() {
        // H(one block) = 0 forces I = 0 while H(singletons) > 0.
        let a = Partition::singletons(6);
        let b = Partition::from_labels(&[0; 6]);
        assert_eq!(nmi(&a, &b).unwrap(), 0.0);
        assert_eq!(nmi(&b, &a).unwrap(), 0.0);
    }

    #[test]
    fn nmi_is_invariant_under_relabeling() {
        let a = Partition::from_labels(&[0, 0, 1, 1, 2, 2]);
        let b = Partition::from_labels(&[5, 5, 9, 9, 1, 1]);
        assert_eq!(nmi(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn nmi_rejects_mismatched_node_sets() {
        let a = Partition::singletons(3);
        let b = Partition::singletons(4);
        assert!(matches!(nmi(&a, &b), Err(Error::NodeSetMismatch(3, 4))));
    }

    #[test]
    fn best_of_runs_never_scores_below_a_single_run() {
        let g = star_and_clique(1.0, 1.0);
        let cfg = LouvainConfig::new(9);
        let single = modularity(&g, &louvain(&g, &LouvainConfig::new(crate::derive_seed(9, 0))).unwrap()).unwrap();
        let best = modularity(&g, &louvain_best_of(&g, &cfg, 5).unwrap()).unwrap();
        assert!(best >= single - 1e-12);
    }
}
