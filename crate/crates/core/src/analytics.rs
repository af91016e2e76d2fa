//! Summaries of simulated reserve distributions.
//!
//! Empirical quantiles use linear interpolation between order statistics at
//! `h = (N - 1) p` (0-based), the usual "type 7" rule. Standard deviations use
//! the `N - 1` divisor. Percentages are relative to the chain-ladder reserve.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::sqrt;

/// Probability of the headline tail quantile.
pub const TAIL_PROB: f64 = 0.995;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalyticsError {
    #[error("no samples to summarise")]
    EmptySamples,
    #[error("reference reserve must be positive, got {0}")]
    NonPositiveReserve(f64),
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("invalid bins: {0}")]
    InvalidBins(&'static str),
    #[error("histograms have different edges")]
    EdgeMismatch,
}

/// Binning request for [`histogram`].
#[derive(Debug, Clone, PartialEq)]
pub enum BinSpec {
    /// `k` equal-width bins spanning `[min, max]`.
    Count(usize),
    /// Explicit, strictly increasing edges covering every sample.
    Edges(Vec<f64>),
}

/// Bin edges (`counts.len() + 1` of them) and counts. Bins are right-open
/// except the last, which is closed.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Counts divided by the total.
    pub fn proportions(&self) -> Vec<f64> {
        let total = self.total() as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }

    /// `Σ |p_k - q_k|` between normalised counts on identical edges.
    pub fn l1_distance(&self, other: &Histogram) -> Result<f64, AnalyticsError> {
        if self.edges != other.edges {
            return Err(AnalyticsError::EdgeMismatch);
        }
        Ok(self
            .proportions()
            .iter()
            .zip(other.proportions())
            .map(|(a, b)| (a - b).abs())
            .sum())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DistributionSummary {
    pub count: usize,
    pub mean: f64,
    pub sd: f64,
    /// `sd / R̂` in percent.
    pub msep_pct: f64,
    /// `(p, Q(p))` pairs in the requested order.
    pub quantiles: Vec<(f64, f64)>,
    /// `(Q(0.995) - R̂) / R̂` in percent.
    pub q995_excess_pct: f64,
    pub min: f64,
    pub max: f64,
}

/// Type-7 quantile of already sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h as usize;
    let frac = h - lo as f64;
    if lo + 1 >= sorted.len() {
        sorted[sorted.len() - 1]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

fn sorted_copy(samples: &[f64]) -> Vec<f64> {
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    sorted
}

/// Type-7 quantiles of `samples` at each of `probs`.
pub fn quantiles(samples: &[f64], probs: &[f64]) -> Result<Vec<f64>, AnalyticsError> {
    if samples.is_empty() {
        return Err(AnalyticsError::EmptySamples);
    }
    if let Some(&p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(AnalyticsError::InvalidProbability(p));
    }
    let sorted = sorted_copy(samples);
    Ok(probs.iter().map(|&p| quantile_sorted(&sorted, p)).collect())
}

/// Mean and unbiased standard deviation (two-pass).
pub fn mean_sd(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, sqrt(ss / (n - 1.0)))
}

pub fn summarize(
    samples: &[f64],
    r_hat: f64,
    probs: &[f64],
) -> Result<DistributionSummary, AnalyticsError> {
    if samples.is_empty() {
        return Err(AnalyticsError::EmptySamples);
    }
    if !(r_hat > 0.0) {
        return Err(AnalyticsError::NonPositiveReserve(r_hat));
    }
    if let Some(&p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(AnalyticsError::InvalidProbability(p));
    }
    let sorted = sorted_copy(samples);
    let (mean, sd) = mean_sd(samples);
    let q995 = quantile_sorted(&sorted, TAIL_PROB);
    Ok(DistributionSummary {
        count: samples.len(),
        mean,
        sd,
        msep_pct: 100.0 * sd / r_hat,
        quantiles: probs.iter().map(|&p| (p, quantile_sorted(&sorted, p))).collect(),
        q995_excess_pct: 100.0 * (q995 - r_hat) / r_hat,
        min: sorted[0],
        max: sorted[sorted.len() - 1],
    })
}

pub fn histogram(samples: &[f64], bins: &BinSpec) -> Result<Histogram, AnalyticsError> {
    if samples.is_empty() {
        return Err(AnalyticsError::EmptySamples);
    }
    let (min, max) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let edges = match bins {
        BinSpec::Count(0) => return Err(AnalyticsError::InvalidBins("bin count must be at least 1")),
        BinSpec::Count(k) => {
            let (lo, hi) = if min == max { (min - 0.5, max + 0.5) } else { (min, max) };
            let width = (hi - lo) / *k as f64;
            let mut edges: Vec<f64> = (0..*k).map(|b| lo + b as f64 * width).collect();
            edges.push(hi);
            edges
        }
        BinSpec::Edges(edges) => {
            if edges.len() < 2 {
                return Err(AnalyticsError::InvalidBins("need at least two edges"));
            }
            if edges.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(AnalyticsError::InvalidBins("edges must be strictly increasing"));
            }
            if min < edges[0] || max > edges[edges.len() - 1] {
                return Err(AnalyticsError::InvalidBins("edges do not cover the samples"));
            }
            edges.clone()
        }
    };
    let k = edges.len() - 1;
    let mut counts = vec![0u64; k];
    for &x in samples {
        // First edge strictly greater than x, minus one; clamp the top edge into the last bin.
        let b = edges.partition_point(|&e| e <= x).saturating_sub(1).min(k - 1);
        counts[b] += 1;
    }
    Ok(Histogram { edges, counts })
}
