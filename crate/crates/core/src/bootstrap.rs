//! Bootstrap estimators of the conditional reserve distribution.
//!
//! Every method runs the same two stages per replicate `m`:
//!
//! 1. Parameter error. Re-simulate each observed transition `(C_{i,j}, C_{i,j+1})`,
//!    `i + j <= n`, from the observed `C_{i,j}`. Then re-estimate `F̂^m_j`,
//!    `(Σ̂^m_j)²` with the chain-ladder estimators and the min-rule tail.
//! 2. Process error. Starting from the latest diagonal, chain one transition
//!    per development year with the replicate parameters. Then record
//!    `R^m = Σ_{i>=2} (C^{i,m}_n - C_{i,n-i+1})`.
//!
//! The methods differ in the one-step law:
//!
//! - [`Method::ContinuousTime`]: the exact compound Poisson-Gamma transition of
//!   the square-root diffusion in both stages. Cells are never negative.
//! - [`Method::MackResidual`]: stage 1 resamples Pearson residuals, stage 2 is
//!   Gaussian.
//! - [`Method::TimeSeries`]: Gaussian in both stages, or in stage 1 a direct
//!   draw of `F̂^m_j ~ N(F̂_j, Σ̂²_j / S_j)` and `(Σ̂^m_j)² ~ Σ̂²_j χ²_k / k`.
//!
//! Gaussian methods can produce negative cells. In the projected lower triangle
//! [`NegativePolicy`] either clamps them to zero (the path is then frozen at
//! zero) or drops the whole replicate. Re-simulated stage-1 cells are
//! pseudo-observations that only feed the estimators; they are used as drawn and
//! merely counted.
//!
//! Replicate `m` draws only from [`replicate_rng`]`(seed, m)`, so results are
//! identical however replicates are spread over workers.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::chain_ladder::{
    factor_from_pairs, sigma2_from_pairs, tail_sigma2, ultimates_and_reserve, ChainLadderError,
    DevParams,
};
use crate::ct_model::{to_ct, Transition, YearDynamics};
use crate::math::{log, sqrt, x_over_expm1};
use crate::stream::{replicate_rng, ReplicateRng};
use crate::triangle::Triangle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    ContinuousTime,
    MackResidual,
    TimeSeries,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::ContinuousTime, Method::MackResidual, Method::TimeSeries];

    pub fn name(self) -> &'static str {
        match self {
            Method::ContinuousTime => "ct",
            Method::MackResidual => "mack",
            Method::TimeSeries => "ts",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum NegativePolicy {
    /// Replace a negative cell by zero and keep simulating.
    #[default]
    ClampZero,
    /// Discard the replicate.
    DropReplicate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TsParamMode {
    /// Gaussian re-simulation of the upper triangle, then re-estimation.
    Resample,
    /// Draw the estimators from their sampling distributions.
    #[default]
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BootstrapConfig {
    pub method: Method,
    pub replicates: u64,
    pub seed: u64,
    /// Ignored by the continuous-time method.
    pub neg_policy: NegativePolicy,
    /// Only used by the time-series method.
    pub ts_param_mode: TsParamMode,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            method: Method::ContinuousTime,
            replicates: 100_000,
            seed: 0,
            neg_policy: NegativePolicy::ClampZero,
            ts_param_mode: TsParamMode::Direct,
        }
    }
}

impl BootstrapConfig {
    pub fn new(method: Method, replicates: u64, seed: u64) -> Self {
        Self { method, replicates, seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), BootstrapError> {
        if self.replicates == 0 {
            return Err(BootstrapError::NoReplicates);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BootstrapError {
    #[error("the number of replicates must be at least 1")]
    NoReplicates,
    #[error(transparent)]
    ChainLadder(#[from] ChainLadderError),
}

/// Outcome of a single replicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Replicate {
    /// `R^m`, or `None` when dropped by [`NegativePolicy::DropReplicate`].
    pub reserve: Option<f64>,
    /// Cells set to zero by [`NegativePolicy::ClampZero`].
    pub clamped: u32,
    /// A projected cell was negative before the policy applied.
    pub touched_negative: bool,
    /// A stage-1 pseudo-observation was negative (kept as drawn).
    pub negative_pseudo_data: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BootstrapResult {
    pub samples: Vec<f64>,
    pub dropped: u64,
    pub zero_clamped: u64,
    /// Replicates with a negative projected cell before the policy applied.
    pub negative_replicates: u64,
    /// Replicates with a negative stage-1 pseudo-observation.
    pub negative_pseudo_data: u64,
    pub config: BootstrapConfig,
}

impl BootstrapResult {
    /// Collects replicates, which must arrive in replicate order.
    pub fn from_replicates<I>(config: BootstrapConfig, replicates: I) -> Self
    where
        I: IntoIterator<Item = Replicate>,
    {
        let mut result = Self {
            samples: Vec::with_capacity(config.replicates as usize),
            dropped: 0,
            zero_clamped: 0,
            negative_replicates: 0,
            negative_pseudo_data: 0,
            config,
        };
        for r in replicates {
            match r.reserve {
                Some(v) => result.samples.push(v),
                None => result.dropped += 1,
            }
            result.zero_clamped += u64::from(r.clamped);
            result.negative_replicates += u64::from(r.touched_negative);
            result.negative_pseudo_data += u64::from(r.negative_pseudo_data);
        }
        result
    }

    /// Share of replicates with a negative projected cell, in percent.
    pub fn negative_incidence_pct(&self) -> f64 {
        100.0 * self.negative_replicates as f64 / self.config.replicates as f64
    }
}

/// `Σ_{i=2}^{n} (C^{i,m}_n - C_{i,n-i+1})`, chaining `step(j, C_j) -> C_{j+1}`
/// from each latest diagonal value.
///
/// `diagonal[i-1]` is `C_{i,n-i+1}`. A `None` from `step` aborts the replicate.
pub fn simulate_reserves<F>(diagonal: &[f64], mut step: F) -> Option<f64>
where
    F: FnMut(usize, f64) -> Option<f64>,
{
    let n = diagonal.len();
    let mut total = 0.0;
    for i in 2..=n {
        let latest = diagonal[i - 1];
        let mut c = latest;
        for j in n - i + 1..n {
            c = step(j, c)?;
        }
        total += c - latest;
    }
    Some(total)
}

/// Parameters re-estimated in stage 1 of one replicate. Unlike [`DevParams`]
/// the factors are not guaranteed positive (Gaussian methods).
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateParams {
    pub factors: Vec<f64>,
    pub sigma2: Vec<f64>,
}

struct NegativeGuard {
    policy: NegativePolicy,
    clamped: u32,
    touched: bool,
    pseudo: bool,
}

impl NegativeGuard {
    fn new(policy: NegativePolicy) -> Self {
        Self { policy, clamped: 0, touched: false, pseudo: false }
    }

    /// Stage-1 cells: counted, never altered.
    fn observe(&mut self, x: f64) -> f64 {
        self.pseudo |= x < 0.0;
        x
    }

    /// Projected cells: the policy applies.
    fn admit(&mut self, x: f64) -> Option<f64> {
        if x >= 0.0 {
            return Some(x);
        }
        self.touched = true;
        match self.policy {
            NegativePolicy::ClampZero => {
                self.clamped += 1;
                Some(0.0)
            }
            NegativePolicy::DropReplicate => None,
        }
    }
}

/// One-year step of the continuous-time replicate dynamics.
#[derive(Clone, Copy)]
enum CtStep {
    Absorb,
    Scale(f64),
    Diffuse(YearDynamics),
}

impl CtStep {
    fn from_discrete(factor: f64, sigma2: f64) -> Self {
        if factor <= 0.0 {
            CtStep::Absorb
        } else if sigma2 == 0.0 {
            CtStep::Scale(factor)
        } else {
            let f = log(factor);
            CtStep::Diffuse(YearDynamics::new(f, sigma2 * x_over_expm1(f) / factor))
        }
    }

    fn apply(&self, c: f64, rng: &mut ReplicateRng) -> f64 {
        match *self {
            CtStep::Absorb => 0.0,
            CtStep::Scale(f) => c * f,
            CtStep::Diffuse(year) => {
                let law = year.transition_law(c, 1.0).expect("unit horizon, positive diffusion");
                let s = law.sample(rng);
                debug_assert!(s >= 0.0);
                s
            }
        }
    }
}

/// A prepared bootstrap on one triangle.
#[derive(Debug, Clone)]
pub struct Bootstrap {
    config: BootstrapConfig,
    point: DevParams,
    reserve: f64,
    diagonal: Vec<f64>,
    /// `bases[j-1]` = `C_{1,j}, ..., C_{n-j,j}`.
    bases: Vec<Vec<f64>>,
    column_sums: Vec<f64>,
    /// Stage-1 continuous-time transitions from each observed `C_{i,j}`.
    ct_upper: Vec<Vec<Transition>>,
    residuals: Vec<f64>,
}

impl Bootstrap {
    pub fn new(t: &Triangle, config: BootstrapConfig) -> Result<Self, BootstrapError> {
        config.validate()?;
        let point = DevParams::estimate(t)?;
        let n = t.n();
        let reserve = ultimates_and_reserve(t, point.factors()).total;
        let diagonal = t.latest_diagonal().into_iter().map(|(_, c)| c).collect();
        let bases: Vec<Vec<f64>> = (1..n).map(|j| t.transition_bases(j).collect()).collect();
        let column_sums = bases.iter().map(|b| b.iter().sum()).collect();

        let ct = to_ct(&point);
        let ct_upper = (1..n)
            .map(|j| {
                let year = ct.year(j);
                bases[j - 1]
                    .iter()
                    .map(|&c| year.transition(c, 1.0).expect("unit horizon"))
                    .collect()
            })
            .collect();

        let residuals = pearson_residuals(t, &point);
        Ok(Self {
            config,
            point,
            reserve,
            diagonal,
            bases,
            column_sums,
            ct_upper,
            residuals,
        })
    }

    pub fn config(&self) -> &BootstrapConfig {
        &self.config
    }

    pub fn point_estimates(&self) -> &DevParams {
        &self.point
    }

    /// Chain-ladder reserve `R̂`.
    pub fn reserve(&self) -> f64 {
        self.reserve
    }

    /// Pooled Pearson residuals used by [`Method::MackResidual`].
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    fn n(&self) -> usize {
        self.diagonal.len()
    }

    /// Runs every replicate in order on the current thread.
    pub fn run(&self) -> BootstrapResult {
        BootstrapResult::from_replicates(
            self.config,
            (0..self.config.replicates).map(|m| self.replicate(m)),
        )
    }

    /// Replicate `index` (0-based), drawn from its own stream.
    pub fn replicate(&self, index: u64) -> Replicate {
        let mut rng = replicate_rng(self.config.seed, index);
        let mut guard = NegativeGuard::new(self.config.neg_policy);
        let params = self.resample_parameters(&mut rng, &mut guard);
        let reserve = self.simulate_lower(&params, &mut rng, &mut guard);
        Replicate {
            reserve,
            clamped: guard.clamped,
            touched_negative: guard.touched,
            negative_pseudo_data: guard.pseudo,
        }
    }

    /// Stage 1 of replicate `index` alone.
    pub fn replicate_parameters(&self, index: u64) -> ReplicateParams {
        let mut rng = replicate_rng(self.config.seed, index);
        let mut guard = NegativeGuard::new(self.config.neg_policy);
        self.resample_parameters(&mut rng, &mut guard)
    }

    fn resample_parameters(
        &self,
        rng: &mut ReplicateRng,
        guard: &mut NegativeGuard,
    ) -> ReplicateParams {
        let n = self.n();
        let mut factors = Vec::with_capacity(n - 1);
        let mut sigma2 = Vec::with_capacity(n - 1);
        let mut next = Vec::with_capacity(n);
        for j in 1..n {
            let f_hat = self.point.factor(j);
            let s2_hat = self.point.variance(j);
            if s2_hat == 0.0 {
                factors.push(f_hat);
                if j < n - 1 {
                    sigma2.push(0.0);
                }
                continue;
            }
            let base = &self.bases[j - 1];
            if self.config.method == Method::TimeSeries
                && self.config.ts_param_mode == TsParamMode::Direct
            {
                let z: f64 = StandardNormal.sample(rng);
                factors.push(f_hat + sqrt(s2_hat / self.column_sums[j - 1]) * z);
                if j < n - 1 {
                    let dof = (n - j - 1) as f64;
                    let chi2: f64 = ChiSquared::new(dof).expect("dof >= 1").sample(rng);
                    sigma2.push(s2_hat * chi2 / dof);
                }
                continue;
            }
            next.clear();
            let sd_hat = sqrt(s2_hat);
            for (i, &c) in base.iter().enumerate() {
                let value = match self.config.method {
                    Method::ContinuousTime => self.ct_upper[j - 1][i].sample(rng),
                    Method::MackResidual => {
                        let r = self.residuals[rng.random_range(0..self.residuals.len())];
                        guard.observe(f_hat * c + sd_hat * sqrt(c) * r)
                    }
                    Method::TimeSeries => {
                        let z: f64 = StandardNormal.sample(rng);
                        guard.observe(f_hat * c + sd_hat * sqrt(c) * z)
                    }
                };
                next.push(value);
            }
            let f_m = factor_from_pairs(base, &next);
            factors.push(f_m);
            if j < n - 1 {
                sigma2.push(sigma2_from_pairs(base, &next, f_m));
            }
        }
        let (tail, _) = tail_sigma2(&sigma2).expect("n >= 4 checked at construction");
        sigma2.push(tail);
        ReplicateParams { factors, sigma2 }
    }

    fn simulate_lower(
        &self,
        params: &ReplicateParams,
        rng: &mut ReplicateRng,
        guard: &mut NegativeGuard,
    ) -> Option<f64> {
        match self.config.method {
            Method::ContinuousTime => {
                let steps: Vec<CtStep> = params
                    .factors
                    .iter()
                    .zip(&params.sigma2)
                    .map(|(&f, &s2)| CtStep::from_discrete(f, s2))
                    .collect();
                simulate_reserves(&self.diagonal, |j, c| Some(steps[j - 1].apply(c, rng)))
            }
            Method::MackResidual | Method::TimeSeries => {
                simulate_reserves(&self.diagonal, |j, c| {
                    let (f, s2) = (params.factors[j - 1], params.sigma2[j - 1]);
                    if s2 == 0.0 || c == 0.0 {
                        return guard.admit(f * c);
                    }
                    let z: f64 = StandardNormal.sample(rng);
                    guard.admit(f * c + sqrt(s2 * c) * z)
                })
            }
        }
    }
}

/// `(C_{i,j+1} - F̂_j C_{i,j}) / (Σ̂_j √C_{i,j})` for every observed transition
/// whose column has `Σ̂_j > 0`; unadjusted and not re-centred.
pub fn pearson_residuals(t: &Triangle, p: &DevParams) -> Vec<f64> {
    let n = t.n();
    (1..n)
        .filter(|&j| p.variance(j) > 0.0)
        .flat_map(|j| {
            let (f, sd) = (p.factor(j), sqrt(p.variance(j)));
            t.transitions(j).map(move |(c, c1)| (c1 - f * c) / (sd * sqrt(c)))
        })
        .collect()
}
