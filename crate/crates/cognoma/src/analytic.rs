//! Closed-form Rayleigh outage baselines.
//!
//! These expressions are exact for exponentially distributed power gains and
//! serve as oracles for the Monte Carlo engine: an estimate is accepted only
//! when it agrees with them to within binomial sampling error.

use crate::error::ConfigError;
use crate::noma::{threshold, PowerSplit, RateTarget};

/// A single point-to-point link at transmit SNR `rho` with the given average
/// channel power gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct P2pSpec {
    pub rate: RateTarget,
    pub rho: f64,
    pub mean_gain: f64,
}

/// Outage probability of a point-to-point Rayleigh link:
/// `1 - exp(-gamma / (rho * mean_gain))` with `gamma = 2^(rate/prelog) - 1`.
pub fn p2p_rayleigh_outage(spec: P2pSpec) -> f64 {
    let gamma = threshold(spec.rate);
    outage_from_gain_threshold(gamma, spec.rho, spec.mean_gain)
}

/// Fixed-role two-user downlink NOMA over independent Rayleigh links.
///
/// The weak user holds the larger power fraction and decodes only its own
/// signal; the strong user first decodes and cancels the weak user's signal,
/// then its own. Roles are fixed, not drawn per trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoUserNomaSpec {
    pub rate_weak: RateTarget,
    pub rate_strong: RateTarget,
    pub rho: f64,
    pub mean_gain_weak: f64,
    pub mean_gain_strong: f64,
}

/// Outage probabilities `(p_weak, p_strong)` of fixed-role two-user downlink
/// NOMA.
///
/// With fractions `(a_w, a_s)` and thresholds `(g_w, g_s)`, the weak user
/// fails iff its channel gain falls below `theta_w = g_w / (a_w - g_w*a_s)`
/// (never decodable when `a_w <= g_w*a_s`); the strong user needs its gain to
/// reach both `theta_w` (to cancel the weak signal) and `g_s/a_s`.
///
/// # Panics
/// Panics if `split` does not have exactly two fractions.
pub fn downlink_noma_two_user_outage(split: &PowerSplit, spec: TwoUserNomaSpec) -> (f64, f64) {
    assert_eq!(
        split.num_signals(),
        2,
        "two-user outage needs a two-way power split"
    );
    let a_w = split.fractions()[0];
    let a_s = split.fractions()[1];
    let g_w = threshold(spec.rate_weak);
    let g_s = threshold(spec.rate_strong);

    let theta_w = if g_w == 0.0 {
        0.0
    } else if a_w > g_w * a_s {
        g_w / (a_w - g_w * a_s)
    } else {
        f64::INFINITY
    };
    let theta_own = if g_s == 0.0 { 0.0 } else { g_s / a_s };
    let theta_s = theta_w.max(theta_own);

    (
        outage_from_gain_threshold(theta_w, spec.rho, spec.mean_gain_weak),
        outage_from_gain_threshold(theta_s, spec.rho, spec.mean_gain_strong),
    )
}

/// P(rho * g < theta) for exponential g with the given mean.
fn outage_from_gain_threshold(theta: f64, rho: f64, mean_gain: f64) -> f64 {
    if theta == 0.0 {
        return 0.0;
    }
    if theta.is_infinite() {
        return 1.0;
    }
    let scale = rho * mean_gain;
    if scale == 0.0 {
        return 1.0;
    }
    // 1 - exp(-theta/scale), computed without cancellation.
    -(-theta / scale).exp_m1()
}

/// Convenience constructor used throughout the tests.
pub fn rate(rate: f64, prelog: f64) -> Result<RateTarget, ConfigError> {
    RateTarget::new(rate, prelog)
}
