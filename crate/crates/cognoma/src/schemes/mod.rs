//! Access-scheme evaluators.
//!
//! Each scheme is a pure function from a [`ChannelDraw`] to per-user outage
//! flags. All scheduling decisions a real receiver would make per coherence
//! interval — instantaneous user ordering, relay selection, second-slot mode
//! — happen here, per trial.

mod crnoma;
mod overlay;
mod underlay;

use std::fmt;
use std::str::FromStr;

use crate::channel::{ChannelDraw, InterferenceModel, LinkId, Node, Topology, UserId};
use crate::error::ConfigError;
use crate::noma::{PowerSplit, RateTarget};

/// The access schemes the simulator can evaluate.
///
/// Naming: the prefix picks the spectrum-sharing model (secondary underlay
/// beneath a primary, overlay relaying for spectrum access, or a single-cell
/// unicast/multicast NOMA downlink), the suffix whether a cooperative stage
/// assists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Secondary transmitter serves its receivers in one slot, under primary
    /// interference.
    UnderlayDirect,
    /// Same underlay cell, but through a two-slot amplify-and-forward relay.
    UnderlayAf,
    /// Primary broadcast relayed by the secondary transmitter, which piggybacks
    /// its own superposition in the second slot.
    OverlayDirect,
    /// Overlay with a bank of decode-and-forward relays; the best relay that
    /// decoded everything (or at least the primary signal) retransmits.
    OverlayCoop,
    /// Base station superimposes a unicast (primary) and a multicast stream.
    CrnomaDirect,
    /// As `CrnomaDirect`, with receivers that decoded both streams relaying
    /// them in a second phase.
    CrnomaCoop,
    /// Orthogonal baseline: every user gets a dedicated time slot.
    OmaTdma,
}

impl Scheme {
    pub const ALL: [Scheme; 7] = [
        Scheme::UnderlayDirect,
        Scheme::UnderlayAf,
        Scheme::OverlayDirect,
        Scheme::OverlayCoop,
        Scheme::CrnomaDirect,
        Scheme::CrnomaCoop,
        Scheme::OmaTdma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::UnderlayDirect => "underlay_direct",
            Scheme::UnderlayAf => "underlay_af",
            Scheme::OverlayDirect => "overlay_direct",
            Scheme::OverlayCoop => "overlay_coop",
            Scheme::CrnomaDirect => "crnoma_direct",
            Scheme::CrnomaCoop => "crnoma_coop",
            Scheme::OmaTdma => "oma_tdma",
        }
    }

    /// Does the scheme report the primary user's outage?
    pub fn reports_primary(self) -> bool {
        !matches!(self, Scheme::UnderlayDirect | Scheme::UnderlayAf)
    }

    /// Does a trial outcome carry a second-slot mode?
    pub fn has_slot2_mode(self) -> bool {
        matches!(
            self,
            Scheme::OverlayDirect | Scheme::OverlayCoop | Scheme::CrnomaCoop
        )
    }

    /// Fraction of channel uses available to each served signal.
    ///
    /// Single-slot schemes use the whole slot; every cooperative (two-slot)
    /// scheme halves it; the orthogonal baseline divides the frame among all
    /// `1 + num_srs` users.
    pub fn prelog(self, num_srs: u32) -> f64 {
        match self {
            Scheme::UnderlayDirect | Scheme::CrnomaDirect => 1.0,
            Scheme::UnderlayAf
            | Scheme::OverlayDirect
            | Scheme::OverlayCoop
            | Scheme::CrnomaCoop => 0.5,
            Scheme::OmaTdma => 1.0 / f64::from(1 + num_srs),
        }
    }

    /// Number of power-split fractions the scheme's superposition carries,
    /// or `None` for schemes without superposition coding.
    pub fn split_arity(self, num_srs: u32) -> Option<usize> {
        match self {
            Scheme::UnderlayDirect | Scheme::UnderlayAf => Some(num_srs as usize),
            Scheme::OverlayDirect | Scheme::OverlayCoop => Some(num_srs as usize + 1),
            Scheme::CrnomaDirect | Scheme::CrnomaCoop => Some(2),
            Scheme::OmaTdma => None,
        }
    }

    /// Links the scheme reads from a channel draw, for the given population.
    /// This is the single source of truth for topology validation and for
    /// preset construction.
    pub fn required_links(self, num_srs: u32, num_relays: u32) -> Vec<LinkId> {
        let srs = || (1..=num_srs).map(Node::Sr);
        let mut links = Vec::new();
        match self {
            Scheme::UnderlayDirect => {
                links.extend(srs().map(|sr| LinkId::new(Node::St, sr)));
            }
            Scheme::UnderlayAf => {
                links.push(LinkId::new(Node::St, Node::Relay(1)));
                links.extend(srs().map(|sr| LinkId::new(Node::Relay(1), sr)));
            }
            Scheme::OverlayDirect => {
                links.push(LinkId::new(Node::Pt, Node::Pr));
                links.push(LinkId::new(Node::Pt, Node::St));
                links.push(LinkId::new(Node::St, Node::Pr));
                links.extend(srs().map(|sr| LinkId::new(Node::Pt, sr)));
                links.extend(srs().map(|sr| LinkId::new(Node::St, sr)));
            }
            Scheme::OverlayCoop => {
                links.push(LinkId::new(Node::Pt, Node::Pr));
                for n in 1..=num_relays {
                    let relay = Node::Relay(n);
                    links.push(LinkId::new(Node::Pt, relay));
                    links.push(LinkId::new(Node::St, relay));
                    links.push(LinkId::new(relay, Node::Pr));
                    links.extend(srs().map(|sr| LinkId::new(relay, sr)));
                }
            }
            Scheme::CrnomaDirect | Scheme::OmaTdma => {
                links.push(LinkId::new(Node::Bs, Node::Pr));
                links.extend(srs().map(|sr| LinkId::new(Node::Bs, sr)));
            }
            Scheme::CrnomaCoop => {
                links.push(LinkId::new(Node::Bs, Node::Pr));
                links.extend(srs().map(|sr| LinkId::new(Node::Bs, sr)));
                links.extend(srs().map(|sr| LinkId::new(sr, Node::Pr)));
                for from in srs() {
                    for to in srs() {
                        if from != to {
                            links.push(LinkId::new(from, to));
                        }
                    }
                }
            }
        }
        links
    }

    /// Relay population the scheme supports, as (min, max) inclusive.
    fn relay_bounds(self) -> (u32, u32) {
        match self {
            Scheme::UnderlayAf => (1, 1),
            Scheme::OverlayCoop => (1, u32::MAX),
            _ => (0, 0),
        }
    }

    fn expected_relays_text(self) -> String {
        match self.relay_bounds() {
            (lo, hi) if lo == hi => format!("{lo}"),
            (lo, u32::MAX) => format!(">= {lo}"),
            (lo, hi) => format!("{lo}..={hi}"),
        }
    }

    /// Does the scheme need a primary rate target?
    pub fn needs_primary_rate(self) -> bool {
        self.reports_primary()
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|scheme| scheme.name() == s)
            .ok_or_else(|| ConfigError::UnknownScheme {
                got: s.into(),
                expected: Scheme::ALL.map(Scheme::name).join(", "),
            })
    }
}

/// What happened in the second slot of a two-slot scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot2Mode {
    /// The full superposition was retransmitted.
    Noma,
    /// Only the primary signal could be forwarded.
    OmaPrimaryOnly,
    /// Nothing usable was decoded in the first slot; no retransmission.
    Silent,
}

/// Everything needed to evaluate one scheme at one transmit SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scheme: Scheme,
    pub topology: Topology,
    /// Power split of the scheme's superposition; `None` for `OmaTdma`.
    pub split: Option<PowerSplit>,
    /// Primary user's target rate in bit/s/Hz; required whenever the scheme
    /// serves a primary user.
    pub rate_pr: Option<f64>,
    /// Secondary users' common target rate in bit/s/Hz.
    pub rate_sr: f64,
    pub interference: InterferenceModel,
    /// Linear transmit SNR (every transmitter uses the same power budget).
    pub rho: f64,
    pub num_srs: u32,
    pub num_relays: u32,
}

impl ScenarioConfig {
    /// Check internal consistency: split arity, relay population, required
    /// links, rates, SNR, and interference.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.num_srs == 0 {
            return Err(ConfigError::NoUsers);
        }
        if !self.rho.is_finite() || self.rho < 0.0 {
            return Err(ConfigError::BadSnr { value: self.rho });
        }
        self.interference.validate()?;
        if !self.rate_sr.is_finite() || self.rate_sr < 0.0 {
            return Err(ConfigError::BadRate {
                name: "rate.SR".into(),
                value: self.rate_sr,
            });
        }
        if self.scheme.needs_primary_rate() {
            match self.rate_pr {
                None => {
                    return Err(ConfigError::MissingPrimaryRate {
                        scheme: self.scheme.name().into(),
                    })
                }
                Some(r) if !r.is_finite() || r < 0.0 => {
                    return Err(ConfigError::BadRate {
                        name: "rate.PR".into(),
                        value: r,
                    })
                }
                Some(_) => {}
            }
        }
        let (lo, hi) = self.scheme.relay_bounds();
        if self.num_relays < lo || self.num_relays > hi {
            return Err(ConfigError::RelayCount {
                scheme: self.scheme.name().into(),
                expected: self.scheme.expected_relays_text(),
                got: self.num_relays,
            });
        }
        match (self.scheme.split_arity(self.num_srs), &self.split) {
            (None, Some(_)) => {
                return Err(ConfigError::UnexpectedSplit {
                    scheme: self.scheme.name().into(),
                })
            }
            (None, None) => {}
            (Some(expected), split) => {
                let got = split.as_ref().map_or(0, PowerSplit::num_signals);
                if got != expected {
                    return Err(ConfigError::SplitCount {
                        scheme: self.scheme.name().into(),
                        expected,
                        got,
                    });
                }
            }
        }
        for link in self.scheme.required_links(self.num_srs, self.num_relays) {
            if !self.topology.contains(link) {
                return Err(ConfigError::MissingLink {
                    scheme: self.scheme.name().into(),
                    link: link.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Users whose outage the scheme reports, in reporting order.
    pub fn users(&self) -> Vec<UserId> {
        let mut users = Vec::with_capacity(self.num_srs as usize + 1);
        if self.scheme.reports_primary() {
            users.push(UserId::Pr);
        }
        users.extend((1..=self.num_srs).map(UserId::Sr));
        users
    }

    /// The same scenario at a different transmit SNR.
    pub fn with_rho(&self, rho: f64) -> Self {
        let mut cfg = self.clone();
        cfg.rho = rho;
        cfg
    }

    /// Primary rate with the scheme's prelog applied.
    ///
    /// # Panics
    /// Panics if the scheme has no primary rate (validated configurations
    /// always do when needed).
    pub fn rate_target_pr(&self) -> RateTarget {
        let rate = self.rate_pr.expect("scheme has no primary rate");
        RateTarget::new(rate, self.scheme.prelog(self.num_srs)).expect("validated rate")
    }

    /// Secondary rate with the scheme's prelog applied.
    pub fn rate_target_sr(&self) -> RateTarget {
        RateTarget::new(self.rate_sr, self.scheme.prelog(self.num_srs)).expect("validated rate")
    }

    pub(crate) fn power_split(&self) -> &PowerSplit {
        self.split.as_ref().expect("scheme requires a power split")
    }

    pub(crate) fn sr_users(&self) -> impl Iterator<Item = UserId> {
        (1..=self.num_srs).map(UserId::Sr)
    }
}

/// Per-trial evaluation result.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    /// One flag per reported user, in [`ScenarioConfig::users`] order;
    /// `true` means outage.
    pub outage: Vec<(UserId, bool)>,
    /// The relay (or relaying receiver) chosen this trial, if any.
    pub selected_relay: Option<Node>,
    /// Second-slot decision, for schemes that make one.
    pub slot2_mode: Option<Slot2Mode>,
}

impl TrialOutcome {
    /// Did `user` end the trial in outage?
    pub fn is_outage(&self, user: UserId) -> Option<bool> {
        self.outage
            .iter()
            .find(|(u, _)| *u == user)
            .map(|&(_, o)| o)
    }
}

/// Evaluate one trial of `cfg` on `draw`.
///
/// The configuration must be valid (see [`ScenarioConfig::validate`]) and the
/// draw must cover the scheme's required links.
pub fn evaluate(cfg: &ScenarioConfig, draw: &ChannelDraw) -> TrialOutcome {
    match cfg.scheme {
        Scheme::UnderlayDirect => underlay::eval_underlay_direct(cfg, draw),
        Scheme::UnderlayAf => underlay::eval_underlay_af(cfg, draw),
        Scheme::OverlayDirect => overlay::eval_overlay_direct(cfg, draw),
        Scheme::OverlayCoop => overlay::eval_overlay_coop(cfg, draw),
        Scheme::CrnomaDirect => crnoma::eval_crnoma_direct(cfg, draw),
        Scheme::CrnomaCoop => crnoma::eval_crnoma_coop(cfg, draw),
        Scheme::OmaTdma => crnoma::eval_oma_tdma(cfg, draw),
    }
}

/// Gain of `from -> to`, which validated configurations guarantee exists.
pub(crate) fn link_gain(draw: &ChannelDraw, from: Node, to: Node) -> f64 {
    let link = LinkId::new(from, to);
    draw.gain(link)
        .unwrap_or_else(|| panic!("channel draw is missing link {link}"))
}

/// Stable weakest-first ordering by instantaneous gain; ties keep user order.
pub(crate) fn rank_ascending(users: &mut [(UserId, f64)]) {
    users.sort_by(|a, b| a.1.total_cmp(&b.1));
}

/// All users start in outage; evaluators clear the flags they can.
pub(crate) fn outage_template(users: Vec<UserId>) -> Vec<(UserId, bool)> {
    users.into_iter().map(|u| (u, true)).collect()
}

pub(crate) fn set_outage(outage: &mut [(UserId, bool)], user: UserId, in_outage: bool) {
    let slot = outage
        .iter_mut()
        .find(|(u, _)| *u == user)
        .expect("user not reported by this scenario");
    slot.1 = in_outage;
}
