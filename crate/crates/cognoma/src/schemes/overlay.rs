//! Overlay schemes: a secondary system earns spectrum access by relaying the
//! primary transmission, superimposing its own signals on the forwarded one.
//!
//! Both variants span two slots. Slot 1 is the primary broadcast; slot 2 is
//! the cooperative retransmission. The primary receiver is interference-free;
//! every secondary node adds the configured INR to its noise floor.

use crate::channel::{ChannelDraw, Node, UserId};
use crate::noma::{
    decode_chain, mrc_combine, sinr_downlink_noma, sinr_uplink_noma, threshold, SicStage,
};
use crate::schemes::{
    link_gain, outage_template, rank_ascending, set_outage, ScenarioConfig, Slot2Mode,
    TrialOutcome,
};

/// Overlay with the secondary transmitter itself as the relay.
///
/// Slot 1: the primary transmitter broadcasts; the secondary transmitter must
/// decode that signal to proceed. Slot 2 (on success): it retransmits the
/// primary signal superimposed with the secondary ones. The primary receiver
/// maximum-ratio-combines both slots' primary observations, as does each
/// secondary receiver before its SIC chain. If the gate fails, the slot-2
/// transmitter stays silent and only the direct primary branch remains.
pub fn eval_overlay_direct(cfg: &ScenarioConfig, draw: &ChannelDraw) -> TrialOutcome {
    let split = cfg.power_split();
    let fractions = split.fractions();
    let inr = cfg.interference.inr();
    let secondary_noise = inr + 1.0;
    let gamma_p = threshold(cfg.rate_target_pr());
    let gamma_s = threshold(cfg.rate_target_sr());
    let rho = cfg.rho;

    let primary_direct = rho * link_gain(draw, Node::Pt, Node::Pr);
    let mut outage = outage_template(cfg.users());

    // Slot-1 gate: can the secondary transmitter decode the primary signal?
    let gate = rho * link_gain(draw, Node::Pt, Node::St) / secondary_noise;
    if gate < gamma_p {
        set_outage(&mut outage, UserId::Pr, primary_direct < gamma_p);
        return TrialOutcome {
            outage,
            selected_relay: None,
            slot2_mode: Some(Slot2Mode::Silent),
        };
    }

    // Primary receiver: direct branch plus the forwarded primary stage, which
    // sees all secondary fractions as interference (no INR at the primary).
    let g_st_pr = link_gain(draw, Node::St, Node::Pr);
    let secondary_fraction: f64 = fractions[1..].iter().sum();
    let forwarded =
        fractions[0] * rho * g_st_pr / (secondary_fraction * rho * g_st_pr + 1.0);
    let primary_sinr = mrc_combine(&[primary_direct, forwarded]);
    set_outage(&mut outage, UserId::Pr, primary_sinr < gamma_p);

    // Secondary receivers: ranked weakest-first on the slot-2 link. Rank p
    // owns fraction p+1 and decodes stages 0..=p+1; stage 0 (the forwarded
    // primary signal) combines slot 1 and slot 2 observations.
    let mut ranked: Vec<_> = cfg
        .sr_users()
        .map(|u| (u, link_gain(draw, Node::St, u.node())))
        .collect();
    rank_ascending(&mut ranked);
    for (pos, &(user, gain)) in ranked.iter().enumerate() {
        let slot2 = sinr_downlink_noma(split, gain, rho, inr);
        let slot1 = rho * link_gain(draw, Node::Pt, user.node()) / secondary_noise;
        let mut stages = vec![SicStage {
            sinr: mrc_combine(&[slot1, slot2[0]]),
            threshold: gamma_p,
        }];
        stages.extend(slot2[1..=pos + 1].iter().map(|&sinr| SicStage {
            sinr,
            threshold: gamma_s,
        }));
        let decoded_own = decode_chain(&stages).last().copied().unwrap_or(false);
        set_outage(&mut outage, user, !decoded_own);
    }

    TrialOutcome {
        outage,
        selected_relay: None,
        slot2_mode: Some(Slot2Mode::Noma),
    }
}

/// Overlay through a bank of decode-and-forward relays.
///
/// Slot 1: the primary transmitter sends its signal while the secondary
/// transmitter sends the secondary superposition; every relay runs uplink SIC
/// on the sum (primary first, then the secondary fractions in descending
/// order). Relays that decoded everything are preferred; among them the one
/// with the best relay-to-primary link forwards the full superposition
/// (`Noma`). If none decoded everything but some decoded the primary signal,
/// the best of those forwards the primary signal at full power
/// (`OmaPrimaryOnly`) and the secondary users go unserved. Otherwise the
/// second slot is silent.
///
/// The primary receiver combines its direct slot-1 observation with whatever
/// the selected relay forwards. Secondary receivers only hear the slot-2
/// superposition.
pub fn eval_overlay_coop(cfg: &ScenarioConfig, draw: &ChannelDraw) -> TrialOutcome {
    let split = cfg.power_split();
    let fractions = split.fractions();
    let inr = cfg.interference.inr();
    let gamma_p = threshold(cfg.rate_target_pr());
    let gamma_s = threshold(cfg.rate_target_sr());
    let rho = cfg.rho;

    let primary_direct = rho * link_gain(draw, Node::Pt, Node::Pr);
    let mut outage = outage_template(cfg.users());

    // Slot 1 at each relay: uplink SIC over primary + secondary signals.
    let mut best_full: Option<(Node, f64)> = None;
    let mut best_primary: Option<(Node, f64)> = None;
    for n in 1..=cfg.num_relays {
        let relay = Node::Relay(n);
        let g_pt = link_gain(draw, Node::Pt, relay);
        let g_st = link_gain(draw, Node::St, relay);
        let mut powers = Vec::with_capacity(fractions.len());
        powers.push(fractions[0] * rho * g_pt);
        powers.extend(fractions[1..].iter().map(|f| f * rho * g_st));
        let sinrs = sinr_uplink_noma(&powers, inr);
        let stages: Vec<SicStage> = sinrs
            .iter()
            .enumerate()
            .map(|(i, &sinr)| SicStage {
                sinr,
                threshold: if i == 0 { gamma_p } else { gamma_s },
            })
            .collect();
        let flags = decode_chain(&stages);
        let to_pr = link_gain(draw, relay, Node::Pr);
        if flags.iter().all(|&ok| ok) {
            if best_full.is_none_or(|(_, g)| to_pr > g) {
                best_full = Some((relay, to_pr));
            }
        } else if flags[0] && best_primary.is_none_or(|(_, g)| to_pr > g) {
            best_primary = Some((relay, to_pr));
        }
    }

    if let Some((relay, g_r_pr)) = best_full {
        // Full superposition forwarded: primary stage at the primary receiver
        // sees the secondary fractions as interference; secondary receivers
        // run the downlink chain on the relay link.
        let secondary_fraction: f64 = fractions[1..].iter().sum();
        let forwarded =
            fractions[0] * rho * g_r_pr / (secondary_fraction * rho * g_r_pr + 1.0);
        set_outage(
            &mut outage,
            UserId::Pr,
            mrc_combine(&[primary_direct, forwarded]) < gamma_p,
        );

        let mut ranked: Vec<_> = cfg
            .sr_users()
            .map(|u| (u, link_gain(draw, relay, u.node())))
            .collect();
        rank_ascending(&mut ranked);
        for (pos, &(user, gain)) in ranked.iter().enumerate() {
            let sinrs = sinr_downlink_noma(split, gain, rho, inr);
            let mut stages = vec![SicStage {
                sinr: sinrs[0],
                threshold: gamma_p,
            }];
            stages.extend(sinrs[1..=pos + 1].iter().map(|&sinr| SicStage {
                sinr,
                threshold: gamma_s,
            }));
            let decoded_own = decode_chain(&stages).last().copied().unwrap_or(false);
            set_outage(&mut outage, user, !decoded_own);
        }
        TrialOutcome {
            outage,
            selected_relay: Some(relay),
            slot2_mode: Some(Slot2Mode::Noma),
        }
    } else if let Some((relay, g_r_pr)) = best_primary {
        // Primary-only forwarding at full power; secondary users stay in
        // outage this trial.
        let combined = mrc_combine(&[primary_direct, rho * g_r_pr]);
        set_outage(&mut outage, UserId::Pr, combined < gamma_p);
        TrialOutcome {
            outage,
            selected_relay: Some(relay),
            slot2_mode: Some(Slot2Mode::OmaPrimaryOnly),
        }
    } else {
        set_outage(&mut outage, UserId::Pr, primary_direct < gamma_p);
        TrialOutcome {
            outage,
            selected_relay: None,
            slot2_mode: Some(Slot2Mode::Silent),
        }
    }
}
