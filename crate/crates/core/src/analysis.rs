//! Post-detection analytics: community size distributions, the community
//! quotient network, power-law fitting, the resolution-limit audit, size-set
//! similarity, and Dunbar-range coverage.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numeric::hurwitz_zeta;
use crate::partition::Partition;

/// Map from community size to the number of communities of that size.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct SizeHistogram(pub BTreeMap<usize, usize>);

impl SizeHistogram {
    pub fn counts(&self) -> &BTreeMap<usize, usize> {
        &self.0
    }

    /// Total node mass: Σ size · count.
    pub fn total_nodes(&self) -> usize {
        self.0.iter().map(|(size, count)| size * count).sum()
    }
}

/// Exact histogram of community sizes.
pub fn community_sizes(p: &Partition) -> SizeHistogram {
    let mut hist = BTreeMap::new();
    for size in p.sizes() {
        *hist.entry(size).or_insert(0) += 1;
    }
    SizeHistogram(hist)
}

/// Quotient graph over communities. Edge weights sum the original weights
/// crossing each community pair; intra-community edges are dropped.
#[derive(Debug, Clone)]
pub struct CommunityNetwork {
    pub graph: Graph,
}

pub fn community_network(g: &Graph, p: &Partition) -> Result<CommunityNetwork> {
    if p.node_count() != g.node_count() {
        return Err(Error::PartitionMismatch { labels: p.node_count(), nodes: g.node_count() });
    }
    let crossing = g.edges().iter().filter_map(|e| {
        let (cu, cv) = (p.label(e.u), p.label(e.v));
        (cu != cv).then_some((cu, cv, e.weight))
    });
    let graph = Graph::from_edges(p.community_count(), crossing)?;
    Ok(CommunityNetwork { graph })
}

/// Two-column histogram of node degrees, suitable for log-log plots.
pub fn degree_histogram(g: &Graph) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for u in 0..g.node_count() {
        *hist.entry(g.degree(u)).or_insert(0) += 1;
    }
    hist
}

/// Discrete power-law fit via maximum likelihood with the cutoff chosen by
/// minimizing the Kolmogorov-Smirnov distance.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub xmin: u64,
    pub ks_distance: f64,
    /// Samples at or above the fitted cutoff.
    pub tail_count: usize,
}

const MIN_SAMPLES: usize = 50;
const MIN_TAIL: usize = 10;

/// Fits `P(x) ∝ x^(-α)` for `x ≥ xmin` over positive integer samples.
///
/// For each candidate cutoff the exponent comes from the discrete MLE
/// `α̂ = 1 + n / Σ ln(x_i / (xmin − ½))`, and the winning cutoff minimizes
/// the KS distance between the empirical tail CDF and the fitted zeta CDF.
pub fn fit_power_law(samples: &[u64]) -> Result<PowerLawFit> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples { got: samples.len(), need: MIN_SAMPLES });
    }
    if samples.iter().any(|&x| x == 0) {
        return Err(Error::NonPositiveSample);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    if sorted.first() == sorted.last() {
        return Err(Error::DegenerateSamples);
    }

    // Suffix sums of ln(x) let each candidate's MLE close in O(1).
    let n = sorted.len();
    let mut ln_suffix = vec![0.0; n + 1];
    for i in (0..n).rev() {
        ln_suffix[i] = ln_suffix[i + 1] + (sorted[i] as f64).ln();
    }

    let mut best: Option<PowerLawFit> = None;
    let mut i = 0;
    while i < n {
        let xmin = sorted[i];
        let tail_count = n - i;
        if tail_count < MIN_TAIL {
            break;
        }
        let alpha = 1.0 + tail_count as f64
            / (ln_suffix[i] - tail_count as f64 * (xmin as f64 - 0.5).ln());
        let ks = ks_distance(&sorted[i..], xmin, alpha);
        if best.as_ref().map_or(true, |b| ks < b.ks_distance) {
            best = Some(PowerLawFit { alpha, xmin, ks_distance: ks, tail_count });
        }
        // Advance past duplicates to the next distinct candidate.
        while i < n && sorted[i] == xmin {
            i += 1;
        }
    }
    best.ok_or(Error::DegenerateSamples)
}

/// KS distance between the empirical CDF of `tail` (sorted, all ≥ xmin) and
/// the zeta-normalized discrete power law, evaluated at the observed values.
fn ks_distance(tail: &[u64], xmin: u64, alpha: f64) -> f64 {
    let norm = hurwitz_zeta(alpha, xmin as f64);
    let n = tail.len() as f64;
    let mut max_dev = 0.0f64;
    let mut i = 0;
    while i < tail.len() {
        let x = tail[i];
        let mut j = i;
        while j < tail.len() && tail[j] == x {
            j += 1;
        }
        let empirical = j as f64 / n;
        let fitted = 1.0 - hurwitz_zeta(alpha, (x + 1) as f64) / norm;
        max_dev = max_dev.max((empirical - fitted).abs());
        // The empirical CDF is flat up to the next observed value while the
        // fitted CDF keeps rising, so check the step's lower edge too.
        let lower = 1.0 - hurwitz_zeta(alpha, x as f64) / norm;
        max_dev = max_dev.max((i as f64 / n - lower).abs());
        i = j;
    }
    max_dev
}

/// Counts of communities exceeding the modularity resolution-limit
/// thresholds: `√(|E|/2)` on node count and `√(2|E|)` on internal edges.
#[derive(Debug, Clone, Serialize)]
pub struct ResolutionAudit {
    pub edge_count: usize,
    pub node_threshold: f64,
    pub edge_threshold: f64,
    pub total_communities: usize,
    pub above_node_threshold: usize,
    pub above_edge_threshold: usize,
    pub node_fraction: f64,
    pub edge_fraction: f64,
}

pub fn resolution_audit(g: &Graph, p: &Partition) -> Result<ResolutionAudit> {
    if p.node_count() != g.node_count() {
        return Err(Error::PartitionMismatch { labels: p.node_count(), nodes: g.node_count() });
    }
    let edge_count = g.edge_count();
    let node_threshold = (edge_count as f64 / 2.0).sqrt();
    let edge_threshold = (2.0 * edge_count as f64).sqrt();

    let mut internal_edges = vec![0usize; p.community_count()];
    for e in g.edges() {
        if p.label(e.u) == p.label(e.v) {
            internal_edges[p.label(e.u)] += 1;
        }
    }
    let sizes = p.sizes();
    let total = p.community_count();
    let above_node = sizes.iter().filter(|&&s| (s as f64) > node_threshold).count();
    let above_edge = internal_edges.iter().filter(|&&m| (m as f64) > edge_threshold).count();
    let frac = |count: usize| if total == 0 { 0.0 } else { count as f64 / total as f64 };
    Ok(ResolutionAudit {
        edge_count,
        node_threshold,
        edge_threshold,
        total_communities: total,
        above_node_threshold: above_node,
        above_edge_threshold: above_edge,
        node_fraction: frac(above_node),
        edge_fraction: frac(above_edge),
    })
}

/// Multiset Jaccard similarity over size histograms:
/// `Σ min(a_s, b_s) / Σ max(a_s, b_s)`; 1 when both are empty.
pub fn size_set_similarity(a: &SizeHistogram, b: &SizeHistogram) -> f64 {
    let keys: std::collections::BTreeSet<usize> =
        a.0.keys().chain(b.0.keys()).copied().collect();
    let mut min_sum = 0usize;
    let mut max_sum = 0usize;
    for k in keys {
        let ca = a.0.get(&k).copied().unwrap_or(0);
        let cb = b.0.get(&k).copied().unwrap_or(0);
        min_sum += ca.min(cb);
        max_sum += ca.max(cb);
    }
    if max_sum == 0 {
        1.0
    } else {
        min_sum as f64 / max_sum as f64
    }
}

/// Fraction of nodes living in communities of size `lo ..= hi`.
pub fn dunbar_coverage(p: &Partition, lo: usize, hi: usize) -> f64 {
    assert!(lo <= hi, "lo must not exceed hi");
    if p.node_count() == 0 {
        return 0.0;
    }
    let covered: usize = p
        .sizes()
        .into_iter()
        .filter(|&s| lo <= s && s <= hi)
        .sum();
    covered as f64 / p.node_count() as f64
}

pub const DUNBAR_LO: usize = 3;
pub const DUNBAR_HI: usize = 150;
