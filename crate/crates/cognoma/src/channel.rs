//! Fading-channel primitives: node and link identifiers, long-term link
//! statistics, and seeded per-trial Rayleigh draws.
//!
//! Every random quantity in the simulator flows through [`RngStream`], which
//! keys a counter-based generator by `(seed, trial_index)`. A trial's variates
//! are therefore a pure function of those two integers — independent of
//! evaluation order, worker count, or how the trial range is partitioned.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::ConfigError;

/// A terminal that can appear as a link endpoint.
///
/// `Pt`/`Pr` are the primary transmitter and receiver, `St` the secondary
/// (cognitive) transmitter, `Bs` a base station, `Sr(k)` the k-th secondary
/// receiver (1-based), and `Relay(n)` the n-th dedicated relay (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Pt,
    Pr,
    St,
    Bs,
    Sr(u32),
    Relay(u32),
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Pt => write!(f, "PT"),
            Node::Pr => write!(f, "PR"),
            Node::St => write!(f, "ST"),
            Node::Bs => write!(f, "BS"),
            Node::Sr(k) => write!(f, "SR{k}"),
            Node::Relay(n) => write!(f, "R{n}"),
        }
    }
}

impl FromStr for Node {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConfigError::Parse {
            what: "node".into(),
            text: s.into(),
        };
        match s {
            "PT" => Ok(Node::Pt),
            "PR" => Ok(Node::Pr),
            "ST" => Ok(Node::St),
            "BS" => Ok(Node::Bs),
            _ => {
                let (prefix, digits) = if let Some(d) = s.strip_prefix("SR") {
                    ("SR", d)
                } else if let Some(d) = s.strip_prefix('R') {
                    ("R", d)
                } else {
                    return Err(bad());
                };
                let index: u32 = digits.parse().map_err(|_| bad())?;
                if index == 0 {
                    return Err(bad());
                }
                match prefix {
                    "SR" => Ok(Node::Sr(index)),
                    _ => Ok(Node::Relay(index)),
                }
            }
        }
    }
}

/// A user whose outage probability is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UserId {
    Pr,
    Sr(u32),
}

impl UserId {
    /// The node at which this user receives.
    pub fn node(self) -> Node {
        match self {
            UserId::Pr => Node::Pr,
            UserId::Sr(k) => Node::Sr(k),
        }
    }
}

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.node().fmt(f)
    }
}

/// Directed transmitter-to-receiver pair identifying one fading link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkId {
    pub from: Node,
    pub to: Node,
}

impl LinkId {
    pub fn new(from: Node, to: Node) -> Self {
        LinkId { from, to }
    }
}

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.from, self.to)
    }
}

impl FromStr for LinkId {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (from, to) = s.split_once("->").ok_or_else(|| ConfigError::Parse {
            what: "link".into(),
            text: s.into(),
        })?;
        Ok(LinkId::new(from.trim().parse()?, to.trim().parse()?))
    }
}

/// One link's long-term average power gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkStat {
    pub link: LinkId,
    pub mean_gain: f64,
}

impl LinkStat {
    pub fn new(from: Node, to: Node, mean_gain: f64) -> Self {
        LinkStat {
            link: LinkId::new(from, to),
            mean_gain,
        }
    }
}

/// Primary-network interference folded into the noise floor at secondary
/// receivers. The primary receiver is never subject to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InterferenceModel {
    /// Interference-free secondary receivers.
    None,
    /// A fixed linear interference-to-noise ratio added to the unit noise
    /// power at every secondary receiver.
    FixedInr { inr: f64 },
}

impl InterferenceModel {
    /// Linear interference power (in noise units) at a secondary receiver.
    pub fn inr(self) -> f64 {
        match self {
            InterferenceModel::None => 0.0,
            InterferenceModel::FixedInr { inr } => inr,
        }
    }

    pub fn validate(self) -> Result<(), ConfigError> {
        match self {
            InterferenceModel::None => Ok(()),
            InterferenceModel::FixedInr { inr } => {
                if !inr.is_finite() || inr < 0.0 {
                    Err(ConfigError::BadInr { value: inr })
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// A validated set of links with their average gains.
///
/// Links are held in a canonical sorted order; the per-trial draw consumes
/// one uniform variate per link in that order, so two topologies with the
/// same link set produce identical draws for the same stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    links: Vec<LinkStat>,
    index: HashMap<LinkId, usize>,
}

impl Topology {
    pub fn new(mut links: Vec<LinkStat>) -> Result<Self, ConfigError> {
        if links.is_empty() {
            return Err(ConfigError::EmptyTopology);
        }
        links.sort_by_key(|stat| stat.link);
        for pair in links.windows(2) {
            if pair[0].link == pair[1].link {
                return Err(ConfigError::DuplicateLink(pair[0].link.to_string()));
            }
        }
        for stat in &links {
            if !stat.mean_gain.is_finite() || stat.mean_gain < 0.0 {
                return Err(ConfigError::BadMeanGain {
                    link: stat.link.to_string(),
                    value: stat.mean_gain,
                });
            }
        }
        let index = links
            .iter()
            .enumerate()
            .map(|(i, stat)| (stat.link, i))
            .collect();
        Ok(Topology { links, index })
    }

    /// Links in canonical (draw) order.
    pub fn links(&self) -> &[LinkStat] {
        &self.links
    }

    pub fn contains(&self, link: LinkId) -> bool {
        self.index.contains_key(&link)
    }

    pub fn mean_gain(&self, link: LinkId) -> Option<f64> {
        self.index.get(&link).map(|&i| self.links[i].mean_gain)
    }
}

/// Identifies the variate stream of one Monte Carlo trial.
///
/// The sequence of variates produced for a given `(seed, trial_index)` is
/// fixed; nothing about scheduling or parallelism can change it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub trial_index: u64,
}

impl RngStream {
    pub fn new(seed: u64, trial_index: u64) -> Self {
        RngStream { seed, trial_index }
    }

    fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.trial_index);
        rng
    }
}

/// Draw one exponential power gain with the given mean.
///
/// Rayleigh-faded amplitudes give exponentially distributed power gains; the
/// draw inverts the CDF on a single uniform variate. One variate is consumed
/// even when `mean_gain` is zero (the result is then exactly `0.0`), keeping
/// draw sequences aligned across topologies that differ only in gains.
fn exp_gain<R: Rng>(mean_gain: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    if mean_gain == 0.0 {
        return 0.0;
    }
    // -ln(1-u) via ln_1p for precision near u = 0.
    -mean_gain * (-u).ln_1p()
}

/// Draw the Rayleigh power gain of a single link as the first variate of
/// `stream`.
pub fn sample_rayleigh_gain(mean_gain: f64, stream: RngStream) -> f64 {
    exp_gain(mean_gain, &mut stream.rng())
}

/// Instantaneous power gains for every link of one trial.
///
/// Entries are sorted by link id; lookups are by binary search. All gains are
/// finite and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    entries: Vec<(LinkId, f64)>,
}

impl ChannelDraw {
    /// Build a draw by hand (sorted, deduplicated, values checked). Intended
    /// for tests that pin exact gains.
    pub fn from_entries(mut entries: Vec<(LinkId, f64)>) -> Result<Self, ConfigError> {
        if entries.is_empty() {
            return Err(ConfigError::EmptyTopology);
        }
        entries.sort_by_key(|&(link, _)| link);
        for pair in entries.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(ConfigError::DuplicateLink(pair[0].0.to_string()));
            }
        }
        for &(link, gain) in &entries {
            if !gain.is_finite() || gain < 0.0 {
                return Err(ConfigError::BadMeanGain {
                    link: link.to_string(),
                    value: gain,
                });
            }
        }
        Ok(ChannelDraw { entries })
    }

    /// All-zero gains for the links of `topology`; a reusable scratch buffer
    /// for [`draw_scenario_channels_into`].
    pub fn zeroed(topology: &Topology) -> Self {
        ChannelDraw {
            entries: topology
                .links()
                .iter()
                .map(|stat| (stat.link, 0.0))
                .collect(),
        }
    }

    pub fn gain(&self, link: LinkId) -> Option<f64> {
        self.entries
            .binary_search_by_key(&link, |&(l, _)| l)
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn entries(&self) -> &[(LinkId, f64)] {
        &self.entries
    }
}

/// Draw every link's gain for one trial, in canonical link order.
pub fn draw_scenario_channels(topology: &Topology, stream: RngStream) -> ChannelDraw {
    let mut draw = ChannelDraw::zeroed(topology);
    draw_scenario_channels_into(topology, stream, &mut draw);
    draw
}

/// As [`draw_scenario_channels`], overwriting an existing draw to avoid
/// per-trial allocation. `out` must have been created for the same topology.
pub fn draw_scenario_channels_into(topology: &Topology, stream: RngStream, out: &mut ChannelDraw) {
    debug_assert_eq!(out.entries.len(), topology.links().len());
    let mut rng = stream.rng();
    for (stat, entry) in topology.links().iter().zip(out.entries.iter_mut()) {
        debug_assert_eq!(entry.0, stat.link);
        entry.1 = exp_gain(stat.mean_gain, &mut rng);
    }
}
