//! Parametric quantiles, method comparison tables and zero-mass diagnostics.

use ctreserve_core::analytics::{AnalyticsError, TAIL_PROB};
use ctreserve_core::parametric::Fitted;
use ctreserve_core::{
    summarize, to_ct, BootstrapConfig, BootstrapResult, DevParams,
    DistributionSummary, Family, ParametricReserve, Triangle,
};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Gamma, LogNormal};

use crate::parallel::run_parallel;
use crate::Error;

/// Exact quantile of a fitted parametric reserve law; `μ_R` for a point mass.
pub fn parametric_quantile(pr: &ParametricReserve, p: f64) -> Result<f64, AnalyticsError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(AnalyticsError::InvalidProbability(p));
    }
    Ok(match pr.fitted {
        Fitted::Lognormal { log_location, log_variance } => {
            LogNormal::new(log_location, log_variance.sqrt())
                .expect("finite location, positive scale")
                .inverse_cdf(p)
        }
        Fitted::Gamma { shape, rate } => {
            Gamma::new(shape, rate).expect("positive shape and rate").inverse_cdf(p)
        }
        Fitted::PointMass { value } => value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantilePoint {
    pub p: f64,
    pub value: f64,
    /// `(value - R̂) / R̂` in percent.
    pub excess_pct: f64,
}

/// One row of a comparison table. `count` is `None` for parametric rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub method: String,
    pub count: Option<usize>,
    pub mean: f64,
    pub sd: f64,
    pub msep_pct: f64,
    pub q995_excess_pct: f64,
    pub quantiles: Vec<QuantilePoint>,
}

fn excess(value: f64, r_hat: f64) -> f64 {
    100.0 * (value - r_hat) / r_hat
}

impl SummaryRow {
    pub fn from_parametric(
        method: impl Into<String>,
        pr: &ParametricReserve,
        r_hat: f64,
        probs: &[f64],
    ) -> Result<Self, AnalyticsError> {
        let quantiles = probs
            .iter()
            .map(|&p| {
                let value = parametric_quantile(pr, p)?;
                Ok(QuantilePoint { p, value, excess_pct: excess(value, r_hat) })
            })
            .collect::<Result<_, AnalyticsError>>()?;
        Ok(Self {
            method: method.into(),
            count: None,
            mean: pr.mean(),
            sd: pr.sd(),
            msep_pct: 100.0 * pr.sd() / r_hat,
            q995_excess_pct: excess(parametric_quantile(pr, TAIL_PROB)?, r_hat),
            quantiles,
        })
    }

    pub fn from_summary(method: impl Into<String>, s: &DistributionSummary, r_hat: f64) -> Self {
        Self {
            method: method.into(),
            count: Some(s.count),
            mean: s.mean,
            sd: s.sd,
            msep_pct: s.msep_pct,
            q995_excess_pct: s.q995_excess_pct,
            quantiles: s
                .quantiles
                .iter()
                .map(|&(p, value)| QuantilePoint { p, value, excess_pct: excess(value, r_hat) })
                .collect(),
        }
    }
}

/// `P(next cell = 0 | current cell)` under the continuous-time transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroMass {
    pub accident_year: usize,
    /// Development year the transition starts from.
    pub development_year: usize,
    pub start: f64,
    /// `log P = -λ`; `None` when the year has no diffusion.
    pub exponent: Option<f64>,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroMassDiagnostics {
    /// First projected transition of each open accident year `2..=n`.
    pub next_year: Vec<ZeroMass>,
    pub max_prob: f64,
    /// The latest accident year's first transition started from the previous
    /// accident year's first cell instead.
    pub substitute: ZeroMass,
}

fn zero_mass(p: &DevParams, accident_year: usize, development_year: usize, start: f64) -> ZeroMass {
    let year = to_ct(p).year(development_year);
    let exponent = year.transition_law(start, 1.0).ok().map(|law| -law.lambda);
    let prob = year.prob_zero(start, 1.0).expect("unit horizon");
    ZeroMass { accident_year, development_year, start, exponent, prob }
}

pub fn zero_mass_diagnostics(t: &Triangle, p: &DevParams) -> ZeroMassDiagnostics {
    let n = t.n();
    let next_year: Vec<ZeroMass> = t
        .latest_diagonal()
        .into_iter()
        .filter(|&(i, _)| i >= 2)
        .map(|(i, c)| zero_mass(p, i, n - i + 1, c))
        .collect();
    let max_prob = next_year.iter().map(|z| z.prob).fold(0.0, f64::max);
    let substitute = zero_mass(p, n, 1, t.cell(n - 1, 1));
    ZeroMassDiagnostics { next_year, max_prob, substitute }
}

/// A bootstrap run and its summary row.
#[derive(Debug, Clone)]
pub struct MethodRun {
    pub row: SummaryRow,
    pub result: BootstrapResult,
}

/// Mack's lognormal row followed by one bootstrap row per config, with the
/// Gamma variant and zero-mass diagnostics alongside.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub reserve: f64,
    pub lognormal: SummaryRow,
    pub gamma: SummaryRow,
    pub runs: Vec<MethodRun>,
    pub zero_mass: ZeroMassDiagnostics,
}

impl Comparison {
    /// Table rows in display order.
    pub fn rows(&self) -> Vec<SummaryRow> {
        std::iter::once(self.lognormal.clone())
            .chain(self.runs.iter().map(|r| r.row.clone()))
            .collect()
    }
}

/// Bootstrap row name for a config, e.g. `ct_bootstrap`.
pub fn bootstrap_row_name(config: &BootstrapConfig) -> String {
    format!("{}_bootstrap", config.method.name())
}

pub fn comparison_table(
    t: &Triangle,
    configs: &[BootstrapConfig],
    probs: &[f64],
    threads: Option<usize>,
) -> Result<Comparison, Error> {
    let p = DevParams::estimate(t)?;
    let lognormal = ctreserve_core::parametric::fit_parametric(t, Family::Lognormal)?;
    let gamma = ParametricReserve::fit(lognormal.mu_r, lognormal.sigma2_r, Family::Gamma);
    let r_hat = lognormal.mu_r;
    let runs = configs
        .iter()
        .map(|&config| {
            let bootstrap = ctreserve_core::Bootstrap::new(t, config)?;
            let result = run_parallel(&bootstrap, threads)?;
            let summary = summarize(&result.samples, r_hat, probs)?;
            let row = SummaryRow::from_summary(bootstrap_row_name(&config), &summary, r_hat);
            Ok(MethodRun { row, result })
        })
        .collect::<Result<_, Error>>()?;
    Ok(Comparison {
        reserve: r_hat,
        lognormal: SummaryRow::from_parametric("mack_lognormal", &lognormal, r_hat, probs)?,
        gamma: SummaryRow::from_parametric("mack_gamma", &gamma, r_hat, probs)?,
        runs,
        zero_mass: zero_mass_diagnostics(t, &p),
    })
}
