//! Link-level Monte Carlo simulator for cognitive-radio NOMA systems.
//!
//! The crate estimates per-user outage probabilities over Rayleigh fading for
//! several spectrum-sharing schemes (underlay, overlay, and a cooperative
//! NOMA cell), with and without relay assistance, and validates the engine
//! against closed-form baselines.
//!
//! Layering, bottom to top:
//!
//! * [`channel`] — topology description and seeded per-trial fading draws;
//! * [`noma`] — superposition-coding arithmetic (power splits, SIC chains,
//!   diversity combining, relay cascades);
//! * [`schemes`] — one evaluator per access scheme, mapping a channel draw to
//!   per-user outage flags;
//! * [`analytic`] — closed-form Rayleigh outage expressions used as oracles;
//! * [`montecarlo`] — the trial loop, Wilson confidence intervals, SNR sweeps
//!   and CSV export;
//! * [`scenario`] — built-in presets and the TOML scenario-file format.
//!
//! Determinism is a hard guarantee: every trial draws from an RNG stream
//! keyed by `(seed, trial_index)`, so results are bit-identical across worker
//! counts, partitionings, and runs.

pub mod analytic;
pub mod channel;
pub mod error;
pub mod montecarlo;
pub mod noma;
pub mod scenario;
pub mod schemes;

pub use error::{ConfigError, Error};
