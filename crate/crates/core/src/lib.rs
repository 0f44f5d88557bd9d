//! Workbench for SRAM bitcell-array yield analysis and sizing optimization.
//!
//! The crate is organized around four pillars:
//!
//! * [`circuit`] — array configuration types and deterministic sampling of
//!   per-transistor process variations.
//! * [`netlist`] — hierarchical SPICE netlist and analysis-deck emission, plus
//!   the structural parser used to cross-check emitted documents.
//! * [`surrogate`] — a self-contained analytic evaluator mapping a
//!   configuration and a variation sample to noise margins, delays, power and
//!   area, with no external simulator.
//! * [`estimator`] / [`optimize`] — Monte Carlo and importance-sampling
//!   failure-probability estimators, and constrained sizing optimizers, both
//!   generic over the evaluation backend ([`surrogate`] or [`spice`]).
//!
//! All sampling is counter-based: sample `i` of any stream is a pure function
//! of `(seed, stream label, i)`, so results are independent of batch sizes and
//! thread counts.

pub mod circuit;
pub mod error;
pub mod estimator;
pub mod netlist;
pub mod optimize;
pub mod oracle;
pub mod report;
pub mod rng;
pub mod spice;
pub mod surrogate;

pub use circuit::{default_config, pelgrom_sigma, sample_variations, SramArrayConfig, VariationSample};
pub use error::{Error, Result};
pub use estimator::{estimator_fom, yield_from_pfail, LimitState, StoppingRule, YieldEstimate};
pub use surrogate::{evaluate, pass_fail, MetricsRecord};

/// Tool version recorded in output-file headers.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
