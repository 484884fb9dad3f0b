//! Underlay schemes: the secondary transmitter shares the band with an
//! always-on primary, so every secondary receiver sees a fixed
//! interference-to-noise ratio on top of unit noise.

use crate::channel::{ChannelDraw, Node};
use crate::noma::{
    af_effective_snr, decode_chain, sinr_downlink_noma, threshold, SicStage,
};
use crate::schemes::{
    link_gain, outage_template, rank_ascending, set_outage, ScenarioConfig, TrialOutcome,
};

/// One-slot downlink NOMA from the secondary transmitter to its receivers.
///
/// Receivers are ordered weakest-first by their instantaneous gain; the
/// receiver ranked `p` holds power fraction `p` of the (descending) split and
/// decodes stages `0..=p` of its own SIC chain.
pub fn eval_underlay_direct(cfg: &ScenarioConfig, draw: &ChannelDraw) -> TrialOutcome {
    let split = cfg.power_split();
    let inr = cfg.interference.inr();
    let gamma = threshold(cfg.rate_target_sr());

    let mut ranked: Vec<_> = cfg
        .sr_users()
        .map(|u| (u, link_gain(draw, Node::St, u.node())))
        .collect();
    rank_ascending(&mut ranked);

    let mut outage = outage_template(cfg.users());
    for (pos, &(user, gain)) in ranked.iter().enumerate() {
        let sinrs = sinr_downlink_noma(split, gain, cfg.rho, inr);
        let stages: Vec<SicStage> = sinrs[..=pos]
            .iter()
            .map(|&sinr| SicStage {
                sinr,
                threshold: gamma,
            })
            .collect();
        let decoded_own = decode_chain(&stages).last().copied().unwrap_or(false);
        set_outage(&mut outage, user, !decoded_own);
    }
    TrialOutcome {
        outage,
        selected_relay: None,
        slot2_mode: None,
    }
}

/// Underlay NOMA through a two-hop variable-gain amplify-and-forward relay.
///
/// The relay hears the superposition at `rho * g / (inr + 1)` and forwards a
/// scaled copy; each receiver then sees an effective end-to-end SNR given by
/// the AF cascade of its two hop SNRs, on which the usual downlink SIC runs.
/// Two slots are spent, which doubles the per-use rate inside the threshold.
pub fn eval_underlay_af(cfg: &ScenarioConfig, draw: &ChannelDraw) -> TrialOutcome {
    let split = cfg.power_split();
    let inr = cfg.interference.inr();
    let gamma = threshold(cfg.rate_target_sr());
    let relay = Node::Relay(1);

    let hop1 = cfg.rho * link_gain(draw, Node::St, relay) / (inr + 1.0);

    let mut ranked: Vec<_> = cfg
        .sr_users()
        .map(|u| (u, link_gain(draw, relay, u.node())))
        .collect();
    rank_ascending(&mut ranked);

    let mut outage = outage_template(cfg.users());
    for (pos, &(user, gain)) in ranked.iter().enumerate() {
        let hop2 = cfg.rho * gain / (inr + 1.0);
        let effective = af_effective_snr(hop1, hop2);
        // The split rides on the effective cascade SNR; interference already
        // entered through the per-hop SNRs.
        let sinrs = sinr_downlink_noma(split, effective, 1.0, 0.0);
        let stages: Vec<SicStage> = sinrs[..=pos]
            .iter()
            .map(|&sinr| SicStage {
                sinr,
                threshold: gamma,
            })
            .collect();
        let decoded_own = decode_chain(&stages).last().copied().unwrap_or(false);
        set_outage(&mut outage, user, !decoded_own);
    }
    TrialOutcome {
        outage,
        selected_relay: Some(relay),
        slot2_mode: None,
    }
}
