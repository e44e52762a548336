//! Monte Carlo estimation of per-edge cycle-retracing probabilities.
//!
//! Each walk starts on a uniformly random directed edge and steps to a
//! uniformly random neighbor, never returning to the node it just came
//! from. The walk ends when it revisits any node of the current walk; the
//! edge that closed the cycle gets the credit. Tallies normalized by the
//! number of completed cycles estimate the retracing probability of each
//! edge, and multiplying by the collaboration-strength weight yields the
//! combined pre-weighting handed to the community detector.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy)]
pub struct WalkConfig {
    pub total_walks: u64,
    pub seed: u64,
    /// Safety bound on steps per walk; defaults to the node count, which a
    /// simple walk cannot exceed anyway.
    pub max_steps: Option<usize>,
    /// Independent walker streams; results are deterministic for a fixed
    /// (seed, workers) pair.
    pub workers: usize,
}

impl WalkConfig {
    /// Default walk budget of 10 walks per edge.
    pub const WALKS_PER_EDGE: u64 = 10;

    pub fn for_graph(g: &Graph, seed: u64) -> Self {
        WalkConfig {
            total_walks: (g.edge_count() as u64).max(1) * Self::WALKS_PER_EDGE,
            seed,
            max_steps: None,
            workers: 1,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn with_total_walks(mut self, total_walks: u64) -> Self {
        self.total_walks = total_walks.max(1);
        self
    }
}

/// Per-edge counts of cycle closures.
#[derive(Debug, Clone)]
pub struct RetraceCounts {
    tallies: Vec<u64>,
    pub total_walks: u64,
    pub completed_cycles: u64,
}

impl RetraceCounts {
    /// Builds counts from raw tallies; every completed cycle credits exactly
    /// one edge, so the cycle count is the tally sum.
    pub fn from_tallies(tallies: Vec<u64>, total_walks: u64) -> Self {
        let completed_cycles = tallies.iter().sum();
        RetraceCounts { tallies, total_walks, completed_cycles }
    }

    pub fn tallies(&self) -> &[u64] {
        &self.tallies
    }
}

/// Edge weight semantics produced by this module.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    /// Retracing probabilities; sum to 1 whenever any cycle completed.
    Retrace,
    /// Retracing probability times collaboration strength.
    Csrnbrw,
}

#[derive(Debug, Clone)]
pub struct EdgeWeights {
    pub kind: WeightKind,
    values: Vec<f64>,
}

impl EdgeWeights {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Runs the configured number of independent walks and tallies cycle-closing
/// edges. Graphs without cycles (forests) produce all-zero tallies.
pub fn run_walks(g: &Graph, cfg: &WalkConfig) -> RetraceCounts {
    let edge_count = g.edge_count();
    if edge_count == 0 {
        return RetraceCounts { tallies: Vec::new(), total_walks: cfg.total_walks, completed_cycles: 0 };
    }
    let workers = cfg.workers.max(1) as u64;
    let max_steps = cfg.max_steps.unwrap_or(g.node_count().max(1));

    let per_worker: Vec<u64> = (0..workers)
        .map(|w| cfg.total_walks / workers + u64::from(w < cfg.total_walks % workers))
        .collect();

    let partials: Vec<(Vec<u64>, u64)> = per_worker
        .par_iter()
        .enumerate()
        .map(|(worker, &walks)| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(worker as u64);
            walk_batch(g, walks, max_steps, &mut rng)
        })
        .collect();

    let mut tallies = vec![0u64; edge_count];
    let mut completed_cycles = 0;
    for (partial, completed) in partials {
        for (t, p) in tallies.iter_mut().zip(partial) {
            *t += p;
        }
        completed_cycles += completed;
    }
    RetraceCounts { tallies, total_walks: cfg.total_walks, completed_cycles }
}

fn walk_batch(g: &Graph, walks: u64, max_steps: usize, rng: &mut ChaCha8Rng) -> (Vec<u64>, u64) {
    let mut tallies = vec![0u64; g.edge_count()];
    let mut completed = 0u64;
    // Visit stamps instead of a per-walk set; the epoch makes resets O(1).
    let mut stamp = vec![0u64; g.node_count()];
    let mut epoch = 0u64;

    for _ in 0..walks {
        epoch += 1;
        let directed = rng.random_range(0..2 * g.edge_count());
        let edge = &g.edges()[directed / 2];
        let (start, mut current) =
            if directed % 2 == 0 { (edge.u, edge.v) } else { (edge.v, edge.u) };
        let mut previous = start;
        stamp[start] = epoch;
        stamp[current] = epoch;

        for _ in 0..max_steps {
            let neighbors = g.neighbors(current);
            // `previous` is always adjacent, so degree 1 means a dead end.
            if neighbors.len() <= 1 {
                break;
            }
            let skip = neighbors
                .binary_search_by_key(&previous, |&(nbr, _)| nbr)
                .expect("previous node is a neighbor");
            let mut pick = rng.random_range(0..neighbors.len() - 1);
            if pick >= skip {
                pick += 1;
            }
            let (next, edge_idx) = neighbors[pick];
            if stamp[next] == epoch {
                tallies[edge_idx] += 1;
                completed += 1;
                break;
            }
            stamp[next] = epoch;
            previous = current;
            current = next;
        }
    }
    (tallies, completed)
}

/// Normalizes tallies into retracing probabilities `π_e = tally_e / cycles`.
/// All zeros when no walk completed a cycle.
pub fn retrace_probabilities(counts: &RetraceCounts) -> EdgeWeights {
    let values = if counts.completed_cycles == 0 {
        vec![0.0; counts.tallies.len()]
    } else {
        let total = counts.completed_cycles as f64;
        counts.tallies.iter().map(|&t| t as f64 / total).collect()
    };
    EdgeWeights { kind: WeightKind::Retrace, values }
}

/// Combines retracing probabilities with the collaboration-strength weights
/// already on `g`: `weight_e = π_e · SC_e`.
pub fn csrnbrw_weights(pi: &EdgeWeights, g: &Graph) -> Result<EdgeWeights> {
    if pi.values.len() != g.edge_count() {
        return Err(Error::EdgeSetMismatch { got: pi.values.len(), expected: g.edge_count() });
    }
    let values = pi
        .values
        .iter()
        .zip(g.edges())
        .map(|(&p, e)| p * e.weight)
        .collect();
    Ok(EdgeWeights { kind: WeightKind::Csrnbrw, values })
}
