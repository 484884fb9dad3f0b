//! Single-cell NOMA downlink with a cognitive power policy: the base station
//! superimposes a high-priority unicast signal (for the primary user) on a
//! multicast signal every secondary receiver wants, giving the unicast signal
//! the large power fraction.
//!
//! The primary receiver decodes only its unicast signal, treating the
//! multicast power as interference; it is never exposed to the external INR.
//! Each secondary receiver runs SIC: unicast first, multicast second.

use crate::channel::{ChannelDraw, Node, UserId};
use crate::noma::{
    decode_chain, mrc_combine, sinr_downlink_noma, threshold, SicStage,
};
use crate::schemes::{
    link_gain, outage_template, set_outage, ScenarioConfig, Slot2Mode, TrialOutcome,
};

/// Direct (single-phase) unicast + multicast superposition.
pub fn eval_crnoma_direct(cfg: &ScenarioConfig, draw: &ChannelDraw) -> TrialOutcome {
    let split = cfg.power_split();
    let inr = cfg.interference.inr();
    let gamma_u = threshold(cfg.rate_target_pr());
    let gamma_m = threshold(cfg.rate_target_sr());

    let mut outage = outage_template(cfg.users());
    set_outage(
        &mut outage,
        UserId::Pr,
        primary_unicast_sinr(split.fractions(), cfg.rho, link_gain(draw, Node::Bs, Node::Pr))
            < gamma_u,
    );
    for user in cfg.sr_users() {
        let sinrs = sinr_downlink_noma(split, link_gain(draw, Node::Bs, user.node()), cfg.rho, inr);
        let flags = decode_chain(&[
            SicStage {
                sinr: sinrs[0],
                threshold: gamma_u,
            },
            SicStage {
                sinr: sinrs[1],
                threshold: gamma_m,
            },
        ]);
        set_outage(&mut outage, user, !flags[1]);
    }
    TrialOutcome {
        outage,
        selected_relay: None,
        slot2_mode: None,
    }
}

/// Cooperative variant: receivers that decoded both signals in phase 1 form
/// the decoding set; the one with the best link to the primary receiver
/// re-broadcasts the same superposition in phase 2.
///
/// The primary receiver maximum-ratio-combines its unicast observations from
/// both phases. Every other secondary receiver combines the two phases per
/// stage before running its SIC chain, so phase 2 can rescue a receiver that
/// missed phase 1. The relay itself has already decoded everything. With an
/// empty decoding set, phase 2 is silent and phase 1 alone decides.
pub fn eval_crnoma_coop(cfg: &ScenarioConfig, draw: &ChannelDraw) -> TrialOutcome {
    let split = cfg.power_split();
    let fractions = split.fractions();
    let inr = cfg.interference.inr();
    let gamma_u = threshold(cfg.rate_target_pr());
    let gamma_m = threshold(cfg.rate_target_sr());
    let rho = cfg.rho;

    let phase1_primary =
        primary_unicast_sinr(fractions, rho, link_gain(draw, Node::Bs, Node::Pr));

    // Phase 1 at each secondary receiver.
    let mut phase1: Vec<(UserId, Vec<f64>, bool)> = Vec::with_capacity(cfg.num_srs as usize);
    for user in cfg.sr_users() {
        let sinrs = sinr_downlink_noma(split, link_gain(draw, Node::Bs, user.node()), rho, inr);
        let flags = decode_chain(&[
            SicStage {
                sinr: sinrs[0],
                threshold: gamma_u,
            },
            SicStage {
                sinr: sinrs[1],
                threshold: gamma_m,
            },
        ]);
        phase1.push((user, sinrs, flags[1]));
    }

    // Relay selection: best link to the primary receiver within the
    // decoding set; ties go to the lower user index.
    let mut relay: Option<(UserId, f64)> = None;
    for &(user, _, decoded) in &phase1 {
        if decoded {
            let g = link_gain(draw, user.node(), Node::Pr);
            if relay.is_none_or(|(_, best)| g > best) {
                relay = Some((user, g));
            }
        }
    }

    let mut outage = outage_template(cfg.users());
    let Some((relay_user, relay_gain_pr)) = relay else {
        // Empty decoding set: phase 1 stands alone.
        set_outage(&mut outage, UserId::Pr, phase1_primary < gamma_u);
        for &(user, _, decoded) in &phase1 {
            set_outage(&mut outage, user, !decoded);
        }
        return TrialOutcome {
            outage,
            selected_relay: None,
            slot2_mode: Some(Slot2Mode::Silent),
        };
    };

    let phase2_primary = primary_unicast_sinr(fractions, rho, relay_gain_pr);
    set_outage(
        &mut outage,
        UserId::Pr,
        mrc_combine(&[phase1_primary, phase2_primary]) < gamma_u,
    );

    for &(user, ref sinrs1, _) in &phase1 {
        if user == relay_user {
            set_outage(&mut outage, user, false);
            continue;
        }
        let sinrs2 = sinr_downlink_noma(
            split,
            link_gain(draw, relay_user.node(), user.node()),
            rho,
            inr,
        );
        let flags = decode_chain(&[
            SicStage {
                sinr: mrc_combine(&[sinrs1[0], sinrs2[0]]),
                threshold: gamma_u,
            },
            SicStage {
                sinr: mrc_combine(&[sinrs1[1], sinrs2[1]]),
                threshold: gamma_m,
            },
        ]);
        set_outage(&mut outage, user, !flags[1]);
    }

    TrialOutcome {
        outage,
        selected_relay: Some(relay_user.node()),
        slot2_mode: Some(Slot2Mode::Noma),
    }
}

/// Orthogonal baseline: the frame is split into `1 + num_srs` equal slots and
/// each user gets one at full power, interference-free.
pub fn eval_oma_tdma(cfg: &ScenarioConfig, draw: &ChannelDraw) -> TrialOutcome {
    let gamma_pr = threshold(cfg.rate_target_pr());
    let gamma_sr = threshold(cfg.rate_target_sr());

    let mut outage = outage_template(cfg.users());
    set_outage(
        &mut outage,
        UserId::Pr,
        cfg.rho * link_gain(draw, Node::Bs, Node::Pr) < gamma_pr,
    );
    for user in cfg.sr_users() {
        set_outage(
            &mut outage,
            user,
            cfg.rho * link_gain(draw, Node::Bs, user.node()) < gamma_sr,
        );
    }
    TrialOutcome {
        outage,
        selected_relay: None,
        slot2_mode: None,
    }
}

/// SINR of the unicast signal at the (interference-free) primary receiver:
/// the multicast fraction is never cancelled there.
fn primary_unicast_sinr(fractions: &[f64], rho: f64, gain: f64) -> f64 {
    let x = rho * gain;
    fractions[0] * x / ((1.0 - fractions[0]) * x + 1.0)
}
