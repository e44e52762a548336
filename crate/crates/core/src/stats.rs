//! Paired and categorical hypothesis tests: Wilcoxon signed-rank,
//! chi-square homogeneity, and the Bonferroni correction.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{chi_square_sf, normal_cdf};

/// How the Wilcoxon p-value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PValueMethod {
    /// Sign-permutation distribution of the rank sum, exact for small n.
    Exact,
    /// Tie-corrected normal approximation with continuity correction.
    NormalApprox,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct WilcoxonResult {
    /// `W = min(W+, W−)` over the non-zero differences.
    pub statistic: f64,
    pub p_value: f64,
    /// Pairs remaining after zero differences are discarded.
    pub pairs_used: usize,
    pub method: PValueMethod,
}

const MIN_PAIRS: usize = 6;
/// Largest n for which the exact sign-permutation distribution is used; the
/// normal approximation is off by more than 0.01 in the mid-range below ~13
/// pairs, so small samples must go through the exact path.
const EXACT_LIMIT: usize = 25;

/// Two-sided Wilcoxon signed-rank test for matched samples.
///
/// Zero differences are discarded (classic Wilcoxon); absolute differences
/// are midranked. With `n ≤ 25` usable pairs the p-value enumerates the
/// sign-permutation distribution exactly; larger samples use the normal
/// approximation with tie-corrected variance and continuity correction.
pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64]) -> Result<WilcoxonResult> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let diffs: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(a, b)| a - b)
        .filter(|d| *d != 0.0)
        .collect();
    let n = diffs.len();
    if n < MIN_PAIRS {
        return Err(Error::InsufficientPairs { got: n, need: MIN_PAIRS });
    }

    let ranks = midranks(&diffs.iter().map(|d| d.abs()).collect::<Vec<_>>());
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| *r)
        .sum();
    let total: f64 = ranks.iter().sum();
    let w_minus = total - w_plus;
    let w = w_plus.min(w_minus);

    let (p_value, method) = if n <= EXACT_LIMIT {
        (exact_two_sided_p(&ranks, w), PValueMethod::Exact)
    } else {
        (normal_two_sided_p(&ranks, w), PValueMethod::NormalApprox)
    };
    Ok(WilcoxonResult { statistic: w, p_value, pairs_used: n, method })
}

/// Average ranks of `values`, ties sharing their midrank.
fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("no NaN differences"));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // Positions i..j (0-based) share the average of ranks i+1..=j.
        let midrank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = midrank;
        }
        i = j;
    }
    ranks
}

/// Exact two-sided p: P(min(W+, W−) ≤ w) over all 2^n sign assignments of
/// the observed ranks. Ranks are doubled to integers so midranks from ties
/// stay exact; counts stay below 2^n, which f64 holds exactly for n ≤ 25.
fn exact_two_sided_p(ranks: &[f64], w: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; total + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        reach += r;
        for s in (0..=reach - r).rev() {
            if counts[s] > 0.0 {
                counts[s + r] += counts[s];
            }
        }
    }
    let w2 = (w * 2.0).round() as usize;
    let below: f64 = counts[..=w2.min(total)].iter().sum();
    let above: f64 = if total >= w2 { counts[total - w2..].iter().sum() } else { 0.0 };
    let hits = if total - w2 <= w2 {
        // The two tails overlap: every assignment qualifies.
        counts.iter().sum()
    } else {
        below + above
    };
    (hits / 2f64.powi(ranks.len() as i32)).min(1.0)
}

fn normal_two_sided_p(ranks: &[f64], w: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
    // Tie correction: subtract Σ (t³ − t) / 48 over tie groups.
    let mut sorted = ranks.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        variance -= (t * t * t - t) / 48.0;
        i = j;
    }
    let z = (w - mean + 0.5) / variance.sqrt();
    (2.0 * normal_cdf(z)).min(1.0)
}

/// Rectangular table of non-negative counts (rows = categories,
/// columns = groups).
#[derive(Debug, Clone)]
pub struct ContingencyTable {
    counts: Vec<Vec<u64>>,
}

impl ContingencyTable {
    pub fn new(counts: Vec<Vec<u64>>) -> Result<Self> {
        let width = counts.first().map_or(0, Vec::len);
        if width == 0 || counts.iter().any(|row| row.len() != width) {
            return Err(Error::DegenerateTable);
        }
        Ok(ContingencyTable { counts })
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    /// Drops all-zero rows and columns.
    fn pruned(&self) -> Vec<Vec<u64>> {
        let keep_row: Vec<bool> = self.counts.iter().map(|r| r.iter().any(|&c| c > 0)).collect();
        let width = self.counts[0].len();
        let keep_col: Vec<bool> = (0..width)
            .map(|j| self.counts.iter().any(|r| r[j] > 0))
            .collect();
        self.counts
            .iter()
            .zip(&keep_row)
            .filter(|(_, keep)| **keep)
            .map(|(row, _)| {
                row.iter()
                    .zip(&keep_col)
                    .filter(|(_, keep)| **keep)
                    .map(|(&c, _)| c)
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Fraction of cells with expected count below 5, where the asymptotic
    /// approximation becomes shaky.
    pub low_expected_fraction: f64,
}

/// Chi-square test of homogeneity with margins as expected counts.
/// Empty rows and columns are pruned first; fewer than 2 of either is an
/// error.
pub fn chi_square_homogeneity(table: &ContingencyTable) -> Result<ChiSquareResult> {
    let counts = table.pruned();
    let rows = counts.len();
    let cols = counts.first().map_or(0, Vec::len);
    if rows < 2 || cols < 2 {
        return Err(Error::DegenerateTable);
    }
    let row_sums: Vec<f64> = counts.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let col_sums: Vec<f64> = (0..cols)
        .map(|j| counts.iter().map(|r| r[j] as f64).sum())
        .collect();
    let total: f64 = row_sums.iter().sum();

    let mut statistic = 0.0;
    let mut low_cells = 0usize;
    for (i, row) in counts.iter().enumerate() {
        for (j, &obs) in row.iter().enumerate() {
            let expected = row_sums[i] * col_sums[j] / total;
            if expected < 5.0 {
                low_cells += 1;
            }
            let d = obs as f64 - expected;
            statistic += d * d / expected;
        }
    }
    let dof = (rows - 1) * (cols - 1);
    Ok(ChiSquareResult {
        statistic,
        dof,
        p_value: chi_square_sf(statistic, dof),
        low_expected_fraction: low_cells as f64 / (rows * cols) as f64,
    })
}

/// Bonferroni adjustment `p_adj = min(1, p · m)` for `m` comparisons.
pub fn bonferroni(p_values: &[f64], m: usize) -> Vec<f64> {
    assert!(m >= p_values.len(), "m must cover all reported comparisons");
    p_values.iter().map(|p| (p * m as f64).min(1.0)).collect()
}
