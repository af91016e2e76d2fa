//! Chain-ladder claims reserving with a continuous-time square-root diffusion.
//!
//! Cumulative claims of each accident year are modelled as a Feller diffusion
//! `dC = f C dt + σ √C dW` with coefficients that are constant on every
//! development year. The one-year transition of that diffusion is a compound
//! Poisson sum of exponentials, which makes it possible to bootstrap the reserve
//! distribution without any time discretisation and without ever producing a
//! negative cumulative amount.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of its inputs plus, for the simulation paths, an explicit random
//! stream. IO, parallel drivers and the command line live in the `ctreserve`
//! crate.
//!
//! Modules:
//!
//! - [`triangle`]: run-off triangle model, validation and the two built-in datasets.
//! - [`chain_ladder`]: development factors, variance parameters, tail rule,
//!   reserves and Mack's conditional MSEP.
//! - [`ct_model`]: conversion to the continuous-time coefficients, conditional
//!   moments, Laplace transform and the exact transition sampler.
//! - [`bootstrap`]: the continuous-time, Mack residual and time-series bootstraps.
//! - [`parametric`]: moment-matched Log-normal and Gamma reserve laws.
//! - [`analytics`]: summaries, empirical quantiles and histograms.
//!
//! Indices of accident years `i` and development years `j` are 1-based in the
//! public API.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analytics;
pub mod bootstrap;
pub mod chain_ladder;
pub mod ct_model;
pub mod parametric;
pub mod stream;
pub mod triangle;

mod math;

pub use analytics::{histogram, summarize, BinSpec, DistributionSummary, Histogram};
pub use bootstrap::{
    simulate_reserves, Bootstrap, BootstrapConfig, BootstrapResult, Method, NegativePolicy,
    Replicate, TsParamMode,
};
pub use chain_ladder::{DevParams, MsepResult, ReserveSummary, TailSource};
pub use ct_model::{from_ct, to_ct, CtParams, Transition, TransitionLaw, YearDynamics};
pub use parametric::{Family, ParametricReserve};
pub use triangle::{builtin_dataset, Dataset, Triangle, TriangleError};
