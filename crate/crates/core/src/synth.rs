//! Seeded planted-partition generator for the detection benchmark.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;

/// Balanced planted-partition settings. `mixing` is the expected fraction of
/// a node's edges that leave its community.
#[derive(Debug, Clone, Copy)]
pub struct PlantedSpec {
    pub node_count: usize,
    pub communities: usize,
    pub avg_degree: f64,
    pub mixing: f64,
    pub seed: u64,
}

impl PlantedSpec {
    fn validate(&self) -> Result<(f64, f64)> {
        if self.communities < 2 || self.node_count < self.communities {
            return Err(Error::InvalidSpec(format!(
                "need n >= k >= 2, got n = {}, k = {}",
                self.node_count, self.communities
            )));
        }
        if !(self.avg_degree > 0.0 && self.avg_degree < self.node_count as f64) {
            return Err(Error::InvalidSpec(format!(
                "average degree {} must lie in (0, n)",
                self.avg_degree
            )));
        }
        if !(0.0..1.0).contains(&self.mixing) {
            return Err(Error::InvalidSpec(format!("mixing {} must lie in [0, 1)", self.mixing)));
        }
        let n = self.node_count as f64;
        let mean_size = n / self.communities as f64;
        let intra_degree = (1.0 - self.mixing) * self.avg_degree;
        let p_in = if mean_size > 1.0 {
            intra_degree / (mean_size - 1.0)
        } else if intra_degree > 0.0 {
            return Err(Error::InvalidSpec(
                "singleton communities cannot host intra-community edges".into(),
            ));
        } else {
            0.0
        };
        if p_in > 1.0 {
            return Err(Error::InfeasibleSpec(p_in));
        }
        let p_out = self.mixing * self.avg_degree / (n - mean_size);
        Ok((p_in, p_out.min(1.0)))
    }
}

/// Generates a planted-partition graph and its ground-truth labeling.
///
/// Communities are balanced (sizes differ by at most one); all edge weights
/// are 1. Edges are drawn by geometric skip sampling, so generation is
/// linear in the number of realized edges.
pub fn planted_partition(spec: &PlantedSpec) -> Result<(Graph, Partition)> {
    let (p_in, p_out) = spec.validate()?;
    let n = spec.node_count;
    let k = spec.communities;

    // First (n mod k) blocks get the extra node.
    let base = n / k;
    let remainder = n % k;
    let mut starts = Vec::with_capacity(k + 1);
    let mut acc = 0;
    for b in 0..k {
        starts.push(acc);
        acc += base + usize::from(b < remainder);
    }
    starts.push(acc);
    debug_assert_eq!(acc, n);

    let labels: Vec<usize> = (0..k)
        .flat_map(|b| std::iter::repeat(b).take(starts[b + 1] - starts[b]))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();

    for b in 0..k {
        let size = starts[b + 1] - starts[b];
        let offset = starts[b];
        sample_pairs(size, p_in, &mut rng, |i, j| {
            edges.push((offset + i, offset + j, 1.0));
        });
    }
    sample_pairs(n, p_out, &mut rng, |i, j| {
        if labels[i] != labels[j] {
            edges.push((i, j, 1.0));
        }
    });

    let graph = Graph::from_edges(n, edges)?;
    Ok((graph, Partition::from_labels(&labels)))
}

/// Visits each unordered pair of `0..n` independently with probability `p`,
/// skipping geometrically between hits.
fn sample_pairs<F: FnMut(usize, usize)>(n: usize, p: f64, rng: &mut ChaCha8Rng, mut emit: F) {
    if n < 2 || p <= 0.0 {
        return;
    }
    let total = n as u64 * (n as u64 - 1) / 2;
    if p >= 1.0 {
        for v in 0..total {
            let (i, j) = pair_from_index(v, n as u64);
            emit(i as usize, j as usize);
        }
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut v: u64 = 0;
    loop {
        let r = 1.0 - rng.random::<f64>(); // in (0, 1]
        let skip = (r.ln() / log_q).floor();
        if skip >= (total - v) as f64 {
            break;
        }
        v += skip as u64;
        let (i, j) = pair_from_index(v, n as u64);
        emit(i as usize, j as usize);
        v += 1;
        if v >= total {
            break;
        }
    }
}

/// Maps a linear index into the ordered pair (i, j), i < j, where pairs are
/// laid out row by row: (0,1)..(0,n-1), (1,2)..
fn pair_from_index(v: u64, n: u64) -> (u64, u64) {
    // Row base: base(i) = i*(n-1) - i*(i-1)/2. Invert with a float guess,
    // then correct integrally.
    let base = |i: u64| i * (n - 1) - i * (i - 1) / 2;
    let disc = ((2 * n - 1) as f64).powi(2) - 8.0 * v as f64;
    let mut i = (((2 * n - 1) as f64 - disc.max(0.0).sqrt()) / 2.0).floor() as u64;
    i = i.min(n - 2);
    while base(i) > v {
        i -= 1;
    }
    while i + 1 <= n - 2 && base(i + 1) <= v {
        i += 1;
    }
    let j = v - base(i) + i + 1;
    (i, j)
}
