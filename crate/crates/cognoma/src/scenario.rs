//! Scenario construction: named presets and the TOML scenario-file format.
//!
//! A scenario file holds one or more `[[scenario]]` tables:
//!
//! ```toml
//! [[scenario]]
//! scheme = "underlay_direct"
//! num_srs = 2
//! split = [0.8, 0.2]
//! inr_db = 10.0
//! rate = { SR = 0.5 }
//! link."ST->SR1" = { mean_gain = 1.0 }
//! link."ST->SR2" = { mean_gain = 1.0 }
//! ```
//!
//! `inr_db` is optional (absent means interference-free secondaries);
//! `num_relays` defaults to 0; `rate.PR` is required exactly when the scheme
//! serves the primary user. Every scheme may appear at most once per file.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::channel::{InterferenceModel, LinkId, LinkStat, Topology};
use crate::error::ConfigError;
use crate::montecarlo::{db_to_linear, linear_to_db};
use crate::noma::PowerSplit;
use crate::schemes::{ScenarioConfig, Scheme};

/// A named bundle of scenarios meant to be swept and compared together.
#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub configs: Vec<ScenarioConfig>,
}

pub const PRESET_NAMES: [&str; 3] = ["underlay", "overlay", "crnoma"];

impl Preset {
    /// Look a preset up by name.
    pub fn by_name(name: &str) -> Result<Preset, ConfigError> {
        let configs = match name {
            "underlay" => underlay_preset(),
            "overlay" => overlay_preset(),
            "crnoma" => crnoma_preset(),
            _ => {
                return Err(ConfigError::UnknownPreset {
                    got: name.into(),
                    expected: PRESET_NAMES.join(", "),
                })
            }
        };
        Ok(Preset {
            name: PRESET_NAMES.iter().find(|&&n| n == name).unwrap(),
            configs,
        })
    }

    pub fn all() -> Vec<Preset> {
        PRESET_NAMES
            .iter()
            .map(|name| Preset::by_name(name).unwrap())
            .collect()
    }
}

fn topology(links: &[(&str, f64)]) -> Topology {
    Topology::new(
        links
            .iter()
            .map(|&(text, mean_gain)| LinkStat {
                link: text.parse().expect("preset link id"),
                mean_gain,
            })
            .collect(),
    )
    .expect("preset topology")
}

fn split(fractions: &[f64]) -> Option<PowerSplit> {
    Some(PowerSplit::new(fractions.to_vec()).expect("preset power split"))
}

/// Underlay cell: two secondary receivers served either directly or through
/// one amplify-and-forward relay, both under a 10 dB interference floor.
fn underlay_preset() -> Vec<ScenarioConfig> {
    let interference = InterferenceModel::FixedInr {
        inr: db_to_linear(10.0),
    };
    vec![
        ScenarioConfig {
            scheme: Scheme::UnderlayDirect,
            topology: topology(&[("ST->SR1", 1.0), ("ST->SR2", 1.0)]),
            split: split(&[0.8, 0.2]),
            rate_pr: None,
            rate_sr: 0.5,
            interference,
            rho: 1.0,
            num_srs: 2,
            num_relays: 0,
        },
        ScenarioConfig {
            scheme: Scheme::UnderlayAf,
            topology: topology(&[("ST->R1", 3.0), ("R1->SR1", 3.0), ("R1->SR2", 3.0)]),
            split: split(&[0.8, 0.2]),
            rate_pr: None,
            rate_sr: 0.5,
            interference,
            rho: 1.0,
            num_srs: 2,
            num_relays: 1,
        },
    ]
}

/// Overlay system: the secondary transmitter (or the best of three
/// decode-and-forward relays) forwards the primary signal and piggybacks two
/// secondary streams; all links share the same average gain.
fn overlay_preset() -> Vec<ScenarioConfig> {
    let direct_links = [
        ("PT->PR", 2.0),
        ("PT->ST", 2.0),
        ("PT->SR1", 2.0),
        ("PT->SR2", 2.0),
        ("ST->PR", 2.0),
        ("ST->SR1", 2.0),
        ("ST->SR2", 2.0),
    ];
    let mut coop_links = vec![("PT->PR".to_string(), 2.0)];
    for n in 1..=3 {
        coop_links.push((format!("PT->R{n}"), 2.0));
        coop_links.push((format!("ST->R{n}"), 2.0));
        coop_links.push((format!("R{n}->PR"), 2.0));
        coop_links.push((format!("R{n}->SR1"), 2.0));
        coop_links.push((format!("R{n}->SR2"), 2.0));
    }
    let coop_links: Vec<(&str, f64)> = coop_links
        .iter()
        .map(|(s, g)| (s.as_str(), *g))
        .collect();
    vec![
        ScenarioConfig {
            scheme: Scheme::OverlayDirect,
            topology: topology(&direct_links),
            split: split(&[0.8, 0.15, 0.05]),
            rate_pr: Some(0.8),
            rate_sr: 0.5,
            interference: InterferenceModel::None,
            rho: 1.0,
            num_srs: 2,
            num_relays: 0,
        },
        ScenarioConfig {
            scheme: Scheme::OverlayCoop,
            topology: topology(&coop_links),
            split: split(&[0.8, 0.15, 0.05]),
            rate_pr: Some(0.8),
            rate_sr: 0.5,
            interference: InterferenceModel::None,
            rho: 1.0,
            num_srs: 2,
            num_relays: 3,
        },
    ]
}

/// Single-cell unicast + multicast NOMA downlink with receiver cooperation,
/// plus the orthogonal TDMA baseline.
fn crnoma_preset() -> Vec<ScenarioConfig> {
    let direct_links = [("BS->PR", 0.5), ("BS->SR1", 1.0), ("BS->SR2", 1.0)];
    let coop_links = [
        ("BS->PR", 0.5),
        ("BS->SR1", 1.0),
        ("BS->SR2", 1.0),
        ("SR1->PR", 1.0),
        ("SR2->PR", 1.0),
        ("SR1->SR2", 2.0),
        ("SR2->SR1", 2.0),
    ];
    vec![
        ScenarioConfig {
            scheme: Scheme::CrnomaDirect,
            topology: topology(&direct_links),
            split: split(&[0.8, 0.2]),
            rate_pr: Some(1.0),
            rate_sr: 1.5,
            interference: InterferenceModel::None,
            rho: 1.0,
            num_srs: 2,
            num_relays: 0,
        },
        ScenarioConfig {
            scheme: Scheme::CrnomaCoop,
            topology: topology(&coop_links),
            split: split(&[0.8, 0.2]),
            rate_pr: Some(1.0),
            rate_sr: 1.5,
            interference: InterferenceModel::None,
            rho: 1.0,
            num_srs: 2,
            num_relays: 0,
        },
        ScenarioConfig {
            scheme: Scheme::OmaTdma,
            topology: topology(&direct_links),
            split: None,
            rate_pr: Some(1.0),
            rate_sr: 1.5,
            interference: InterferenceModel::None,
            rho: 1.0,
            num_srs: 2,
            num_relays: 0,
        },
    ]
}

#[derive(Debug, Deserialize, Serialize)]
struct ScenarioDoc {
    #[serde(default)]
    scenario: Vec<RawScenario>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    scheme: String,
    num_srs: u32,
    #[serde(default, skip_serializing_if = "is_zero")]
    num_relays: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inr_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    split: Option<Vec<f64>>,
    rate: BTreeMap<String, f64>,
    link: BTreeMap<String, RawLink>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawLink {
    mean_gain: f64,
}

fn is_zero(n: &u32) -> bool {
    *n == 0
}

/// Parse a scenario file's text into validated configurations.
pub fn parse_scenarios(text: &str) -> Result<Vec<ScenarioConfig>, ConfigError> {
    let doc: ScenarioDoc =
        toml::from_str(text).map_err(|e| ConfigError::FileFormat(e.to_string()))?;
    if doc.scenario.is_empty() {
        return Err(ConfigError::FileFormat(
            "no [[scenario]] tables found".into(),
        ));
    }
    let mut configs = Vec::with_capacity(doc.scenario.len());
    for (index, raw) in doc.scenario.into_iter().enumerate() {
        configs.push(convert_scenario(index, raw)?);
    }
    for (i, cfg) in configs.iter().enumerate() {
        if configs[..i].iter().any(|c| c.scheme == cfg.scheme) {
            return Err(ConfigError::DuplicateScheme(cfg.scheme.name().into()));
        }
    }
    Ok(configs)
}

fn convert_scenario(index: usize, raw: RawScenario) -> Result<ScenarioConfig, ConfigError> {
    let in_scenario = |source: ConfigError| ConfigError::Scenario {
        index,
        source: Box::new(source),
    };
    let scheme: Scheme = raw.scheme.parse().map_err(in_scenario)?;

    for key in raw.rate.keys() {
        if key != "PR" && key != "SR" {
            return Err(ConfigError::UnknownRateKey {
                index,
                key: key.clone(),
            });
        }
    }
    let rate_sr = *raw
        .rate
        .get("SR")
        .ok_or(ConfigError::MissingSecondaryRate { index })?;
    let rate_pr = raw.rate.get("PR").copied();

    let interference = match raw.inr_db {
        None => InterferenceModel::None,
        Some(db) => {
            if !db.is_finite() {
                return Err(in_scenario(ConfigError::BadInr { value: db }));
            }
            InterferenceModel::FixedInr {
                inr: db_to_linear(db),
            }
        }
    };

    let split = raw
        .split
        .map(PowerSplit::new)
        .transpose()
        .map_err(in_scenario)?;

    let mut links = Vec::with_capacity(raw.link.len());
    for (text, raw_link) in &raw.link {
        let link: LinkId = text.parse().map_err(in_scenario)?;
        links.push(LinkStat {
            link,
            mean_gain: raw_link.mean_gain,
        });
    }
    let topology = Topology::new(links).map_err(in_scenario)?;

    let cfg = ScenarioConfig {
        scheme,
        topology,
        split,
        rate_pr,
        rate_sr,
        interference,
        rho: 1.0,
        num_srs: raw.num_srs,
        num_relays: raw.num_relays,
    };
    cfg.validate().map_err(in_scenario)?;
    Ok(cfg)
}

/// Read and parse a scenario file.
pub fn parse_scenario_file(path: &std::path::Path) -> Result<Vec<ScenarioConfig>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::FileRead {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_scenarios(&text)
}

/// Serialize configurations back to scenario-file TOML. Parsing the result
/// reproduces the same configurations (up to the inherent dB/linear float
/// conversion of `inr_db`).
pub fn to_toml_string(configs: &[ScenarioConfig]) -> String {
    let doc = ScenarioDoc {
        scenario: configs
            .iter()
            .map(|cfg| RawScenario {
                scheme: cfg.scheme.name().into(),
                num_srs: cfg.num_srs,
                num_relays: cfg.num_relays,
                inr_db: match cfg.interference {
                    InterferenceModel::None => None,
                    InterferenceModel::FixedInr { inr } => Some(linear_to_db(inr)),
                },
                split: cfg.split.as_ref().map(|s| s.fractions().to_vec()),
                rate: {
                    let mut rate = BTreeMap::new();
                    if let Some(pr) = cfg.rate_pr {
                        rate.insert("PR".into(), pr);
                    }
                    rate.insert("SR".into(), cfg.rate_sr);
                    rate
                },
                link: cfg
                    .topology
                    .links()
                    .iter()
                    .map(|stat| {
                        (
                            stat.link.to_string(),
                            RawLink {
                                mean_gain: stat.mean_gain,
                            },
                        )
                    })
                    .collect(),
            })
            .collect(),
    };
    toml::to_string(&doc).expect("scenario serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Node;

    #[test]
    fn presets_are_valid_and_named() {
        for preset in Preset::all() {
            assert!(!preset.configs.is_empty());
            for cfg in &preset.configs {
                cfg.validate()
                    .unwrap_or_else(|e| panic!("preset {}: {e}", preset.name));
            }
        }
        assert!(Preset::by_name("nope").is_err());
    }

    #[test]
    fn preset_schemes_are_unique() {
        for preset in Preset::all() {
            let mut schemes: Vec<_> = preset.configs.iter().map(|c| c.scheme).collect();
            schemes.sort();
            schemes.dedup();
            assert_eq!(schemes.len(), preset.configs.len());
        }
    }

    #[test]
    fn underlay_preset_details() {
        let preset = Preset::by_name("underlay").unwrap();
        assert_eq!(preset.configs.len(), 2);
        let direct = &preset.configs[0];
        assert_eq!(direct.scheme, Scheme::UnderlayDirect);
        assert_eq!(
            direct.interference,
            InterferenceModel::FixedInr { inr: 10.0 }
        );
        let af = &preset.configs[1];
        assert_eq!(af.scheme, Scheme::UnderlayAf);
        assert_eq!(
            af.topology
                .mean_gain(LinkId::new(Node::St, Node::Relay(1))),
            Some(3.0)
        );
    }

    #[test]
    fn crnoma_preset_details() {
        let preset = Preset::by_name("crnoma").unwrap();
        assert_eq!(preset.configs.len(), 3);
        assert_eq!(preset.configs[2].scheme, Scheme::OmaTdma);
        assert_eq!(preset.configs[2].split, None);
        let coop = &preset.configs[1];
        assert_eq!(
            coop.topology
                .mean_gain(LinkId::new(Node::Sr(1), Node::Sr(2))),
            Some(2.0)
        );
        assert_eq!(coop.rate_pr, Some(1.0));
        assert_eq!(coop.rate_sr, 1.5);
    }

    #[test]
    fn overlay_preset_details() {
        let preset = Preset::by_name("overlay").unwrap();
        let coop = &preset.configs[1];
        assert_eq!(coop.num_relays, 3);
        assert_eq!(coop.topology.links().len(), 16);
        assert!(coop
            .topology
            .links()
            .iter()
            .all(|stat| stat.mean_gain == 2.0));
    }

    #[test]
    fn parse_minimal_file() {
        let text = r#"
            [[scenario]]
            scheme = "underlay_direct"
            num_srs = 2
            split = [0.8, 0.2]
            inr_db = 10.0
            rate = { SR = 0.5 }
            link."ST->SR1" = { mean_gain = 1.0 }
            link."ST->SR2" = { mean_gain = 1.5 }
        "#;
        let configs = parse_scenarios(text).unwrap();
        assert_eq!(configs.len(), 1);
        let cfg = &configs[0];
        assert_eq!(cfg.scheme, Scheme::UnderlayDirect);
        assert_eq!(cfg.num_srs, 2);
        assert_eq!(cfg.interference, InterferenceModel::FixedInr { inr: 10.0 });
        assert_eq!(
            cfg.topology.mean_gain("ST->SR2".parse().unwrap()),
            Some(1.5)
        );
    }

    #[test]
    fn parse_errors_name_the_problem() {
        // Unknown scheme.
        let text = r#"
            [[scenario]]
            scheme = "warp_drive"
            num_srs = 2
            rate = { SR = 0.5 }
            link."ST->SR1" = { mean_gain = 1.0 }
        "#;
        let err = parse_scenarios(text).unwrap_err().to_string();
        assert!(err.contains("warp_drive"), "{err}");
        assert!(err.contains("scenario 0"), "{err}");

        // Missing link for the scheme.
        let text = r#"
            [[scenario]]
            scheme = "underlay_direct"
            num_srs = 2
            split = [0.8, 0.2]
            rate = { SR = 0.5 }
            link."ST->SR1" = { mean_gain = 1.0 }
        "#;
        let err = parse_scenarios(text).unwrap_err().to_string();
        assert!(err.contains("ST->SR2"), "{err}");

        // Unknown rate key.
        let text = r#"
            [[scenario]]
            scheme = "underlay_direct"
            num_srs = 1
            split = [1.0]
            rate = { SR = 0.5, XX = 1.0 }
            link."ST->SR1" = { mean_gain = 1.0 }
        "#;
        let err = parse_scenarios(text).unwrap_err().to_string();
        assert!(err.contains("XX"), "{err}");

        // Bad split sum.
        let text = r#"
            [[scenario]]
            scheme = "underlay_direct"
            num_srs = 2
            split = [0.8, 0.1]
            rate = { SR = 0.5 }
            link."ST->SR1" = { mean_gain = 1.0 }
            link."ST->SR2" = { mean_gain = 1.0 }
        "#;
        let err = parse_scenarios(text).unwrap_err().to_string();
        assert!(err.contains("sum to 1"), "{err}");

        // TOML syntax errors carry position information.
        let err = parse_scenarios("[[scenario]\n").unwrap_err().to_string();
        assert!(err.contains("line 1"), "{err}");

        // Unknown top-level scenario keys are rejected.
        let text = r#"
            [[scenario]]
            scheme = "underlay_direct"
            num_srs = 1
            split = [1.0]
            rate = { SR = 0.5 }
            snr = 10
            link."ST->SR1" = { mean_gain = 1.0 }
        "#;
        assert!(parse_scenarios(text).is_err());
    }

    #[test]
    fn duplicate_schemes_in_one_file_are_rejected() {
        let one = r#"
            [[scenario]]
            scheme = "underlay_direct"
            num_srs = 1
            split = [1.0]
            rate = { SR = 0.5 }
            link."ST->SR1" = { mean_gain = 1.0 }
        "#;
        let text = format!("{one}\n{one}");
        let err = parse_scenarios(&text).unwrap_err();
        assert!(matches!(err, ConfigError::DuplicateScheme(_)));
    }

    #[test]
    fn empty_file_is_an_error() {
        assert!(parse_scenarios("").is_err());
    }

    #[test]
    fn presets_round_trip_through_toml() {
        for preset in Preset::all() {
            let text = to_toml_string(&preset.configs);
            let parsed = parse_scenarios(&text)
                .unwrap_or_else(|e| panic!("round trip of {}: {e}\n{text}", preset.name));
            assert_eq!(parsed, preset.configs, "preset {}", preset.name);
        }
    }
}
