//! Chain-ladder point estimates and Mack's conditional MSEP.
//!
//! Vectors indexed by development year store year `j` at position `j - 1`.

use alloc::vec::Vec;

use crate::math::sqrt;
use crate::triangle::Triangle;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChainLadderError {
    #[error("the tail rule needs variance estimates for two trailing years, got {0}")]
    TailUndefined(usize),
    #[error("development factor F_{index} = {value} must be positive and finite")]
    InvalidFactor { index: usize, value: f64 },
    #[error("variance parameter Sigma2_{index} = {value} must be non-negative and finite")]
    InvalidVariance { index: usize, value: f64 },
    #[error("expected {expected} variance parameters, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("development indices must satisfy 1 <= s <= j <= {n}, got s = {s}, j = {j}")]
    IndexOutOfRange { s: usize, j: usize, n: usize },
}

/// Where the last variance parameter came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TailSource {
    /// `min(Σ²_{n-2}/Σ_{n-3}, Σ_{n-3}, Σ_{n-2})`.
    MinRule,
    /// `Σ_{n-3} = 0`; the tail is set to zero instead of evaluating `0/0`.
    ZeroTrailingVariance,
    /// Passed in by the caller.
    Supplied,
}

/// Development factors `F_j` and variance parameters `Σ²_j`, `1 <= j <= n-1`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DevParams {
    factors: Vec<f64>,
    sigma2: Vec<f64>,
    tail: TailSource,
}

impl DevParams {
    pub fn new(factors: Vec<f64>, sigma2: Vec<f64>) -> Result<Self, ChainLadderError> {
        Self::with_tail(factors, sigma2, TailSource::Supplied)
    }

    pub(crate) fn with_tail(
        factors: Vec<f64>,
        sigma2: Vec<f64>,
        tail: TailSource,
    ) -> Result<Self, ChainLadderError> {
        if factors.len() != sigma2.len() {
            return Err(ChainLadderError::LengthMismatch {
                expected: factors.len(),
                found: sigma2.len(),
            });
        }
        for (k, (&f, &s)) in factors.iter().zip(&sigma2).enumerate() {
            if !(f > 0.0 && f.is_finite()) {
                return Err(ChainLadderError::InvalidFactor { index: k + 1, value: f });
            }
            if !(s >= 0.0 && s.is_finite()) {
                return Err(ChainLadderError::InvalidVariance { index: k + 1, value: s });
            }
        }
        Ok(Self { factors, sigma2, tail })
    }

    /// Mack's estimators on a triangle, with the min-rule tail.
    pub fn estimate(t: &Triangle) -> Result<Self, ChainLadderError> {
        let factors = dev_factors(t);
        let mut s2 = sigma2(t, &factors);
        let (tail, source) = tail_sigma2(&s2)?;
        s2.push(tail);
        Self::with_tail(factors, s2, source)
    }

    pub fn factors(&self) -> &[f64] {
        &self.factors
    }

    pub fn sigma2(&self) -> &[f64] {
        &self.sigma2
    }

    pub fn tail(&self) -> TailSource {
        self.tail
    }

    /// Number of development years `n` these parameters span.
    pub fn n(&self) -> usize {
        self.factors.len() + 1
    }

    /// `F_j`, 1-based.
    pub fn factor(&self, j: usize) -> f64 {
        self.factors[j - 1]
    }

    /// `Σ²_j`, 1-based.
    pub fn variance(&self, j: usize) -> f64 {
        self.sigma2[j - 1]
    }
}

/// Volume-weighted ratio `Σ next / Σ base`.
pub fn factor_from_pairs(base: &[f64], next: &[f64]) -> f64 {
    let num: f64 = next.iter().sum();
    let den: f64 = base.iter().sum();
    num / den
}

/// `1/(k-1) Σ base_i (next_i/base_i - factor)²` over the `k` pairs.
pub fn sigma2_from_pairs(base: &[f64], next: &[f64], factor: f64) -> f64 {
    let k = base.len();
    let ss: f64 = base
        .iter()
        .zip(next)
        .map(|(&c, &c1)| {
            let d = c1 / c - factor;
            c * d * d
        })
        .sum();
    ss / (k - 1) as f64
}

/// `F̂_j` for `1 <= j <= n-1`.
pub fn dev_factors(t: &Triangle) -> Vec<f64> {
    let n = t.n();
    (1..n)
        .map(|j| {
            let (num, den) = t
                .transitions(j)
                .fold((0.0, 0.0), |(num, den), (c, c1)| (num + c1, den + c));
            num / den
        })
        .collect()
}

/// `Σ̂²_j` for `1 <= j <= n-2`.
pub fn sigma2(t: &Triangle, factors: &[f64]) -> Vec<f64> {
    let n = t.n();
    (1..n - 1)
        .map(|j| {
            let (base, next): (Vec<f64>, Vec<f64>) = t.transitions(j).unzip();
            sigma2_from_pairs(&base, &next, factors[j - 1])
        })
        .collect()
}

/// Extrapolates `Σ̂²_{n-1}` from the estimates for `j <= n-2`.
pub fn tail_sigma2(sigma2: &[f64]) -> Result<(f64, TailSource), ChainLadderError> {
    let k = sigma2.len();
    if k < 2 {
        return Err(ChainLadderError::TailUndefined(k));
    }
    let prev = sqrt(sigma2[k - 2]);
    let last = sqrt(sigma2[k - 1]);
    if prev == 0.0 {
        return Ok((0.0, TailSource::ZeroTrailingVariance));
    }
    let s = (last * last / prev).min(prev).min(last);
    Ok((s * s, TailSource::MinRule))
}

/// Ultimates, per-year reserves and the total reserve.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ReserveSummary {
    pub ultimates: Vec<f64>,
    pub reserves: Vec<f64>,
    pub total: f64,
}

/// Projects `C_{i,n-i+1}` by the factor chain, one multiplication per year.
///
/// The multiplication order is the same one used by the bootstrap kernels so a
/// deterministic replicate reproduces `R̂` bit for bit.
pub fn ultimates_and_reserve(t: &Triangle, factors: &[f64]) -> ReserveSummary {
    let n = t.n();
    let mut ultimates = Vec::with_capacity(n);
    let mut reserves = Vec::with_capacity(n);
    let mut total = 0.0;
    for (i, latest) in t.latest_diagonal() {
        let ultimate = factors[n - i..].iter().fold(latest, |c, f| c * f);
        ultimates.push(ultimate);
        let reserve = ultimate - latest;
        reserves.push(reserve);
        if i >= 2 {
            total += reserve;
        }
    }
    ReserveSummary { ultimates, reserves, total }
}

/// Conditional MSEP of the ultimates and of the total reserve.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MsepResult {
    pub per_year: Vec<f64>,
    pub total: f64,
}

impl MsepResult {
    pub fn total_se(&self) -> f64 {
        sqrt(self.total)
    }
}

/// Mack's (1993) conditional MSEP estimator.
///
/// Per year: `Ĉ²_{i,n} Σ_k Σ²_k/F²_k (1/Ĉ_{i,k} + 1/S_k)` with `S_k = Σ_{m<=n-k} C_{m,k}`.
/// The total adds `Ĉ_{i,n} (Σ_{l>i} Ĉ_{l,n}) Σ_k 2Σ²_k/F²_k / S_k` for every `i`,
/// summing `k` over the future development years of accident year `i`.
pub fn mack_msep(t: &Triangle, p: &DevParams) -> MsepResult {
    let n = t.n();
    let f = p.factors();
    let s2 = p.sigma2();
    let column_sums: Vec<f64> = (1..n).map(|j| t.transition_bases(j).sum()).collect();
    let summary = ultimates_and_reserve(t, f);

    let per_year: Vec<f64> = t
        .latest_diagonal()
        .into_iter()
        .map(|(i, latest)| {
            let ultimate = summary.ultimates[i - 1];
            let mut forecast = latest;
            let mut acc = 0.0;
            for k in n - i + 1..n {
                let fk = f[k - 1];
                acc += s2[k - 1] / (fk * fk) * (1.0 / forecast + 1.0 / column_sums[k - 1]);
                forecast *= fk;
            }
            ultimate * ultimate * acc
        })
        .collect();

    let mut total: f64 = per_year.iter().sum();
    for i in 2..n {
        let later: f64 = summary.ultimates[i..].iter().sum();
        let estimation: f64 = (n - i + 1..n)
            .map(|k| {
                let fk = f[k - 1];
                2.0 * s2[k - 1] / (fk * fk) / column_sums[k - 1]
            })
            .sum();
        total += summary.ultimates[i - 1] * later * estimation;
    }
    MsepResult { per_year, total }
}

/// `E(C_j | C_s)` and `Var(C_j | C_s)` for `1 <= s <= j <= n` under Mack's assumptions.
pub fn propagate_moments(
    c_s: f64,
    s: usize,
    j: usize,
    p: &DevParams,
) -> Result<(f64, f64), ChainLadderError> {
    let n = p.n();
    if s == 0 || s > j || j > n {
        return Err(ChainLadderError::IndexOutOfRange { s, j, n });
    }
    let f = |k: usize| p.factor(k);
    let mean = (s..j).map(f).product::<f64>() * c_s;
    let variance = (s..j)
        .map(|k| {
            let after: f64 = (k + 1..j).map(|l| f(l) * f(l)).product();
            let before: f64 = (s..k).map(f).product();
            after * p.variance(k) * before
        })
        .sum::<f64>()
        * c_s;
    Ok((mean, variance))
}
