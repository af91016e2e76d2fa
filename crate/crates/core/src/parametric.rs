//! Moment-matched parametric reserve distributions.
//!
//! Mean `μ_R = R̂` and variance `σ²_R` = Mack's total MSEP. The Log-normal uses
//! `s² = log(1 + σ²_R / μ²_R)` and location `log μ_R - s²/2`. The Gamma uses
//! shape `μ²_R/σ²_R` and rate `μ_R/σ²_R`. Quantiles need special functions and
//! are computed by the `ctreserve` crate.

use crate::chain_ladder::{mack_msep, ultimates_and_reserve, ChainLadderError, DevParams};
use crate::math::{exp, log, sqrt};
use crate::triangle::Triangle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Family {
    Lognormal,
    Gamma,
}

/// Fitted parameters of one family.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "snake_case"))]
pub enum Fitted {
    Lognormal { log_location: f64, log_variance: f64 },
    Gamma { shape: f64, rate: f64 },
    /// `σ²_R = 0`: all the mass sits at `μ_R`.
    PointMass { value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ParametricReserve {
    pub family: Family,
    pub mu_r: f64,
    pub sigma2_r: f64,
    pub fitted: Fitted,
}

impl ParametricReserve {
    pub fn fit(mu_r: f64, sigma2_r: f64, family: Family) -> Self {
        let fitted = if sigma2_r == 0.0 {
            Fitted::PointMass { value: mu_r }
        } else {
            match family {
                Family::Lognormal => {
                    let log_variance = log(1.0 + sigma2_r / (mu_r * mu_r));
                    Fitted::Lognormal {
                        log_location: log(mu_r) - 0.5 * log_variance,
                        log_variance,
                    }
                }
                Family::Gamma => Fitted::Gamma {
                    shape: mu_r * mu_r / sigma2_r,
                    rate: mu_r / sigma2_r,
                },
            }
        };
        Self { family, mu_r, sigma2_r, fitted }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self.fitted, Fitted::PointMass { .. })
    }

    /// Mean of the fitted law, from its own parameters.
    pub fn mean(&self) -> f64 {
        match self.fitted {
            Fitted::Lognormal { log_location, log_variance } => {
                exp(log_location + 0.5 * log_variance)
            }
            Fitted::Gamma { shape, rate } => shape / rate,
            Fitted::PointMass { value } => value,
        }
    }

    /// Variance of the fitted law, from its own parameters.
    pub fn variance(&self) -> f64 {
        match self.fitted {
            Fitted::Lognormal { log_location, log_variance } => {
                (exp(log_variance) - 1.0) * exp(2.0 * log_location + log_variance)
            }
            Fitted::Gamma { shape, rate } => shape / (rate * rate),
            Fitted::PointMass { .. } => 0.0,
        }
    }

    pub fn sd(&self) -> f64 {
        sqrt(self.variance())
    }
}

/// Fits `family` to `R̂` and Mack's MSEP of the triangle.
pub fn fit_parametric(t: &Triangle, family: Family) -> Result<ParametricReserve, ChainLadderError> {
    let p = DevParams::estimate(t)?;
    let mu = ultimates_and_reserve(t, p.factors()).total;
    let msep = mack_msep(t, &p);
    Ok(ParametricReserve::fit(mu, msep.total, family))
}
