//! Superposition-coding arithmetic: power splits, rate thresholds, per-stage
//! SINRs, successive interference cancellation, diversity combining, and the
//! amplify-and-forward relay cascade.
//!
//! Throughout, noise power is normalized to one, so transmit power equals
//! transmit SNR `rho` and any extra interference enters as a linear
//! interference-to-noise ratio added to the unit noise.

use crate::error::ConfigError;

/// Power fractions of one superposition, largest first, summing to one.
///
/// Fractions are the squared superposition coefficients, so they add to one
/// within [`PowerSplit::SUM_TOLERANCE`] and are non-increasing: earlier SIC
/// stages carry more power.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSplit {
    fractions: Vec<f64>,
}

impl PowerSplit {
    pub const SUM_TOLERANCE: f64 = 1e-9;

    pub fn new(fractions: Vec<f64>) -> Result<Self, ConfigError> {
        if fractions.is_empty() {
            return Err(ConfigError::EmptySplit);
        }
        for (index, &value) in fractions.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(ConfigError::BadSplitFraction { index, value });
            }
            if index > 0 && value > fractions[index - 1] {
                return Err(ConfigError::SplitNotSorted {
                    index,
                    value,
                    prev: fractions[index - 1],
                });
            }
        }
        let sum: f64 = fractions.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(ConfigError::SplitSum { sum });
        }
        Ok(PowerSplit { fractions })
    }

    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }

    /// Number of superposed signals.
    pub fn num_signals(&self) -> usize {
        self.fractions.len()
    }
}

/// A spectral-efficiency target together with the fraction of channel uses
/// that serve it.
///
/// A signal delivered over half the time slots must double its per-use rate,
/// which the outage threshold reflects through the `prelog`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateTarget {
    rate: f64,
    prelog: f64,
}

impl RateTarget {
    pub fn new(rate: f64, prelog: f64) -> Result<Self, ConfigError> {
        if !rate.is_finite() || rate < 0.0 {
            return Err(ConfigError::BadRate {
                name: "rate".into(),
                value: rate,
            });
        }
        if !prelog.is_finite() || prelog <= 0.0 || prelog > 1.0 {
            return Err(ConfigError::BadRate {
                name: "prelog".into(),
                value: prelog,
            });
        }
        Ok(RateTarget { rate, prelog })
    }

    pub fn rate(self) -> f64 {
        self.rate
    }

    pub fn prelog(self) -> f64 {
        self.prelog
    }
}

/// Minimum SINR at which `target` is decodable: `2^(rate/prelog) - 1`.
pub fn threshold(target: RateTarget) -> f64 {
    (target.rate / target.prelog).exp2() - 1.0
}

/// Per-stage SINRs seen by one receiver of a downlink power-domain
/// superposition.
///
/// The receiver sees the superposed signal through a single channel with
/// power gain `gain` at transmit SNR `rho`, plus interference `inr` over unit
/// noise. Stage `j` treats every not-yet-cancelled (smaller-fraction) stage
/// as interference:
///
/// `sinr[j] = f[j]*rho*gain / (rho*gain*sum(f[j+1..]) + inr + 1)`
pub fn sinr_downlink_noma(split: &PowerSplit, gain: f64, rho: f64, inr: f64) -> Vec<f64> {
    debug_assert!(gain >= 0.0 && rho >= 0.0 && inr >= 0.0);
    let x = rho * gain;
    let f = split.fractions();
    let mut sinrs = Vec::with_capacity(f.len());
    let mut remaining: f64 = f.iter().sum();
    for &fj in f {
        remaining -= fj;
        sinrs.push(fj * x / (x * remaining + inr + 1.0));
    }
    sinrs
}

/// Per-stage SINRs of successive interference cancellation over a
/// multiple-access superposition.
///
/// `received_powers[k]` is the k-th signal's power at the receiver, in
/// decoding order. Stage `k` treats all later signals as interference:
///
/// `sinr[k] = p[k] / (sum(p[k+1..]) + inr + 1)`
pub fn sinr_uplink_noma(received_powers: &[f64], inr: f64) -> Vec<f64> {
    debug_assert!(received_powers.iter().all(|&p| p >= 0.0) && inr >= 0.0);
    let mut sinrs = Vec::with_capacity(received_powers.len());
    let mut remaining: f64 = received_powers.iter().sum();
    for &p in received_powers {
        remaining -= p;
        sinrs.push(p / (remaining + inr + 1.0));
    }
    sinrs
}

/// One SIC stage: the attained SINR and the SINR it must reach.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SicStage {
    pub sinr: f64,
    pub threshold: f64,
}

/// Decode an ordered SIC chain.
///
/// A stage succeeds when its SINR reaches its threshold *and* every earlier
/// stage succeeded — cancellation of an undecoded signal is impossible, so a
/// failure poisons the rest of the chain. The result is therefore
/// prefix-closed: true entries form a prefix.
pub fn decode_chain(stages: &[SicStage]) -> Vec<bool> {
    let mut ok = true;
    stages
        .iter()
        .map(|stage| {
            ok = ok && stage.sinr >= stage.threshold;
            ok
        })
        .collect()
}

/// Post-combining SINR of maximum-ratio combining: the sum of the branch
/// SINRs.
///
/// # Panics
/// Panics if no branches are given.
pub fn mrc_combine(branch_sinrs: &[f64]) -> f64 {
    assert!(
        !branch_sinrs.is_empty(),
        "mrc_combine needs at least one branch"
    );
    branch_sinrs.iter().sum()
}

/// Effective end-to-end SNR of a two-hop, variable-gain amplify-and-forward
/// relay path: `h1*h2 / (h1 + h2 + 1)`.
///
/// The cascade is symmetric, below `min(h1, h2)`, and increasing in each hop.
pub fn af_effective_snr(hop1_snr: f64, hop2_snr: f64) -> f64 {
    debug_assert!(hop1_snr >= 0.0 && hop2_snr >= 0.0);
    hop1_snr * hop2_snr / (hop1_snr + hop2_snr + 1.0)
}
