//! Square-root diffusion with coefficients constant on each development year.
//!
//! On `[j, j+1)` the claims amount follows `dC = f_j C dt + σ_j √C dW`. Over a
//! horizon `dt ∈ (0, 1]` the conditional law of `C_{j+dt}` given `C_j` is that
//! of `S = X_1 + ... + X_N` with `N ~ Poisson(λ)` and `X_k ~ Exp(β)` i.i.d.:
//!
//! ```text
//! β = 2 f / (σ² (e^{f dt} - 1)),    λ = β e^{f dt} C_j
//! ```
//!
//! Given `N`, `S` is Gamma with shape `N` and **rate** `β` (mean `N/β`), so
//! `E S = λ/β = e^{f dt} C_j`. Sampling `N` then `S | N` gives exact one-step
//! draws with an atom `e^{-λ}` at zero and no discretisation error.
//!
//! Every expression with `f` in a denominator is rewritten through
//! `(e^x - 1)/x`, which switches to its Taylor series for `|f dt| < 1e-8`.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};

use crate::chain_ladder::{ChainLadderError, DevParams};
use crate::math::{exp, expm1_over, log, x_over_expm1};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CtError {
    #[error("horizon {0} is outside (0, 1]")]
    InvalidHorizon(f64),
    #[error("the transition law needs a positive diffusion coefficient, got {0}")]
    ZeroDiffusion(f64),
    #[error("Laplace argument {z} is outside the domain z > {lower}")]
    DomainViolation { z: f64, lower: f64 },
    #[error("expected {expected} diffusion coefficients, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("diffusion coefficient sigma2_{index} = {value} must be non-negative and finite")]
    InvalidDiffusion { index: usize, value: f64 },
}

/// Drift `f_j` and squared diffusion `σ²_j` for every development year.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CtParams {
    drift: Vec<f64>,
    diffusion: Vec<f64>,
}

impl CtParams {
    pub fn new(drift: Vec<f64>, diffusion: Vec<f64>) -> Result<Self, CtError> {
        if drift.len() != diffusion.len() {
            return Err(CtError::LengthMismatch {
                expected: drift.len(),
                found: diffusion.len(),
            });
        }
        for (k, &s) in diffusion.iter().enumerate() {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(CtError::InvalidDiffusion { index: k + 1, value: s });
            }
        }
        Ok(Self { drift, diffusion })
    }

    pub fn drift(&self) -> &[f64] {
        &self.drift
    }

    pub fn diffusion(&self) -> &[f64] {
        &self.diffusion
    }

    /// Coefficients of development year `j` (1-based).
    pub fn year(&self, j: usize) -> YearDynamics {
        YearDynamics::new(self.drift[j - 1], self.diffusion[j - 1])
    }
}

/// `f_j = log F_j`, `σ²_j = Σ²_j log F_j / (F_j (F_j - 1))`.
pub fn to_ct(p: &DevParams) -> CtParams {
    let (drift, diffusion) = p
        .factors()
        .iter()
        .zip(p.sigma2())
        .map(|(&big_f, &big_s2)| {
            let f = log(big_f);
            // σ² = Σ² f / (F (e^f - 1)), finite at f = 0.
            (f, big_s2 * x_over_expm1(f) / big_f)
        })
        .unzip();
    CtParams { drift, diffusion }
}

/// `F_j = e^{f_j}`, `Σ²_j = σ²_j (e^{2f_j} - e^{f_j}) / f_j`.
pub fn from_ct(c: &CtParams) -> Result<DevParams, ChainLadderError> {
    let (factors, sigma2) = c
        .drift
        .iter()
        .zip(&c.diffusion)
        .map(|(&f, &s2)| {
            let big_f = exp(f);
            (big_f, s2 * big_f * expm1_over(f))
        })
        .unzip();
    DevParams::new(factors, sigma2)
}

/// The diffusion restricted to one development year.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct YearDynamics {
    pub drift: f64,
    pub diffusion: f64,
}

fn check_horizon(dt: f64) -> Result<(), CtError> {
    if dt > 0.0 && dt <= 1.0 {
        Ok(())
    } else {
        Err(CtError::InvalidHorizon(dt))
    }
}

impl YearDynamics {
    pub fn new(drift: f64, diffusion: f64) -> Self {
        Self { drift, diffusion }
    }

    /// Conditional mean and variance of `C_{j+dt}` given `C_j = c`.
    pub fn cond_moments(&self, c: f64, dt: f64) -> Result<(f64, f64), CtError> {
        check_horizon(dt)?;
        let x = self.drift * dt;
        let growth = exp(x);
        // σ² (e^{2x} - e^{x}) / f = σ² dt e^{x} (e^{x} - 1)/x
        let variance = c * self.diffusion * dt * growth * expm1_over(x);
        Ok((c * growth, variance))
    }

    /// `β`, or `None` when `σ² = 0`.
    fn rate(&self, dt: f64) -> Option<f64> {
        if self.diffusion > 0.0 {
            Some(2.0 / (self.diffusion * dt * expm1_over(self.drift * dt)))
        } else {
            None
        }
    }

    /// `E(e^{-z C_{j+dt}} | C_j = c)`, defined for `z > -β`.
    pub fn laplace(&self, z: f64, c: f64, dt: f64) -> Result<f64, CtError> {
        check_horizon(dt)?;
        let beta = self.rate(dt).ok_or(CtError::ZeroDiffusion(self.diffusion))?;
        if !(z > -beta) {
            return Err(CtError::DomainViolation { z, lower: -beta });
        }
        let lambda = beta * exp(self.drift * dt) * c;
        Ok(exp(-lambda * z / (beta + z)))
    }

    /// `P(C_{j+dt} = 0 | C_j = c) = e^{-λ}`.
    pub fn prob_zero(&self, c: f64, dt: f64) -> Result<f64, CtError> {
        check_horizon(dt)?;
        if c == 0.0 {
            return Ok(1.0);
        }
        Ok(match self.rate(dt) {
            Some(beta) => exp(-beta * exp(self.drift * dt) * c),
            None => 0.0,
        })
    }

    /// `(λ, β)` of the compound Poisson-exponential transition law.
    pub fn transition_law(&self, c: f64, dt: f64) -> Result<TransitionLaw, CtError> {
        check_horizon(dt)?;
        let beta = self.rate(dt).ok_or(CtError::ZeroDiffusion(self.diffusion))?;
        Ok(TransitionLaw {
            lambda: beta * exp(self.drift * dt) * c,
            beta,
            horizon: dt,
        })
    }

    /// The transition from `c` over `dt`; deterministic growth when `σ² = 0`.
    pub fn transition(&self, c: f64, dt: f64) -> Result<Transition, CtError> {
        check_horizon(dt)?;
        if self.diffusion > 0.0 {
            self.transition_law(c, dt).map(Transition::Law)
        } else {
            Ok(Transition::Deterministic(c * exp(self.drift * dt)))
        }
    }
}

/// Largest Poisson mean handed to the exact Poisson sampler.
pub const MAX_POISSON_MEAN: f64 = 1.8e19;

/// Compound Poisson(`lambda`) sum of Exp(`beta`) jumps over `horizon` years.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TransitionLaw {
    pub lambda: f64,
    pub beta: f64,
    pub horizon: f64,
}

impl TransitionLaw {
    pub fn mean(&self) -> f64 {
        self.lambda / self.beta
    }

    pub fn variance(&self) -> f64 {
        2.0 * self.lambda / (self.beta * self.beta)
    }

    pub fn prob_zero(&self) -> f64 {
        exp(-self.lambda)
    }

    /// `E e^{-zS} = exp(-λ z / (β + z))`.
    pub fn laplace(&self, z: f64) -> f64 {
        exp(-self.lambda * z / (self.beta + z))
    }

    /// Draws `N ~ Poisson(λ)`, then `Gamma(N, rate β)`; zero when `N = 0`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if !(self.lambda > 0.0) {
            return 0.0;
        }
        let jumps: f64 = if self.lambda < MAX_POISSON_MEAN {
            Poisson::new(self.lambda)
                .expect("lambda is positive and finite")
                .sample(rng)
        } else {
            // Counts this large are not representable exactly in f64; the
            // Poisson law is normal to well below the float spacing here.
            let z: f64 = StandardNormal.sample(rng);
            libm::round(self.lambda + libm::sqrt(self.lambda) * z)
        };
        if jumps == 0.0 {
            return 0.0;
        }
        Gamma::new(jumps, 1.0 / self.beta)
            .expect("shape and scale are positive")
            .sample(rng)
    }
}

/// One-step transition: either a fixed value or the exact random law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transition {
    Deterministic(f64),
    Law(TransitionLaw),
}

impl Transition {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Transition::Deterministic(v) => *v,
            Transition::Law(law) => law.sample(rng),
        }
    }
}

/// Draws one transition from the law; see [`TransitionLaw::sample`].
pub fn sample_transition<R: Rng + ?Sized>(law: &TransitionLaw, rng: &mut R) -> f64 {
    law.sample(rng)
}
