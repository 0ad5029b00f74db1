//! Scenario files: TOML with `[topology]`, `[classifier]`, `[traffic]` and
//! `[mode]` sections. Unknown keys are rejected.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use super::classifier::RuleClassifier;
use crate::error::{invalid, Error, Result};
use crate::protocol::{detection_curve, DetectionGrid, SessionConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Private packets carry a quantum-encryption flag through every switch.
    FlaggedHeaders,
    /// A notification round installs a switch bypass straight to the gateway.
    QanBypass,
    /// Every packet is classically flagged.
    ClassicalOnly,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::FlaggedHeaders, Mode::QanBypass, Mode::ClassicalOnly];
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::FlaggedHeaders => "flagged-headers",
            Mode::QanBypass => "qan-bypass",
            Mode::ClassicalOnly => "classical-only",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown mode '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchSpec {
    pub name: String,
    #[serde(default = "yes")]
    pub honest: bool,
    #[serde(default)]
    pub drop_rate: f64,
    /// Extra ticks added to each flagged packet.
    #[serde(default)]
    pub delay_penalty: u64,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    pub src: String,
    pub dst: String,
    /// Switch names in traversal order; `dst` follows the last one.
    pub path: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Topology {
    pub hosts: Vec<String>,
    pub gateway: String,
    #[serde(default, rename = "switch")]
    pub switches: Vec<SwitchSpec>,
    #[serde(default, rename = "flow")]
    pub flows: Vec<FlowSpec>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifierSpec {
    pub private_markers: Vec<String>,
    #[serde(default)]
    pub case_sensitive: bool,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MessageSpec {
    pub src: String,
    pub dst: String,
    pub text: String,
    #[serde(default = "one")]
    pub count: usize,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrafficSpec {
    /// Ticks between consecutive packet emissions.
    #[serde(default = "one_tick")]
    pub interval: u64,
    #[serde(rename = "message")]
    pub messages: Vec<MessageSpec>,
}

fn one_tick() -> u64 {
    1
}

/// Look up the notification success probability from a simulated detection
/// run with the default four-user noiseless session.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QanDetectionSpec {
    pub pz: f64,
    pub k: usize,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub run: Vec<Mode>,
    pub qan_success_probability: Option<f64>,
    pub qan_detection: Option<QanDetectionSpec>,
    /// Further attempts after a failed first notification.
    #[serde(default = "three")]
    pub qan_retry_limit: u32,
}

fn three() -> u32 {
    3
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub topology: Topology,
    pub classifier: ClassifierSpec,
    pub traffic: TrafficSpec,
    pub mode: ModeSpec,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn classifier(&self) -> RuleClassifier {
        RuleClassifier::new(&self.classifier.private_markers, self.classifier.case_sensitive)
    }

    pub fn switch(&self, name: &str) -> Option<&SwitchSpec> {
        self.topology.switches.iter().find(|s| s.name == name)
    }

    pub fn flow(&self, src: &str, dst: &str) -> Option<&FlowSpec> {
        self.topology.flows.iter().find(|f| f.src == src && f.dst == dst)
    }

    pub fn has_compromised_switch_on_flow(&self) -> bool {
        self.topology
            .flows
            .iter()
            .any(|f| f.path.iter().any(|s| self.switch(s).is_some_and(|s| !s.honest)))
    }

    pub fn validate(&self) -> Result<()> {
        let cfg_err = |m: String| Err(Error::Config(m));
        let t = &self.topology;
        let hosts: HashSet<&str> = t.hosts.iter().map(String::as_str).collect();
        if hosts.len() != t.hosts.len() {
            return cfg_err("topology.hosts contains duplicates".into());
        }
        if hosts.contains(t.gateway.as_str()) {
            return cfg_err("topology.gateway must not also be a host".into());
        }
        let mut names = HashSet::new();
        for s in &t.switches {
            if !names.insert(s.name.as_str()) {
                return cfg_err(format!("duplicate switch '{}'", s.name));
            }
            if !(0.0..=1.0).contains(&s.drop_rate) {
                return cfg_err(format!("switch '{}': drop_rate must be in [0, 1]", s.name));
            }
            if s.honest && (s.drop_rate != 0.0 || s.delay_penalty != 0) {
                return cfg_err(format!(
                    "switch '{}': an honest switch needs drop_rate = 0 and delay_penalty = 0",
                    s.name
                ));
            }
        }
        let mut pairs = HashSet::new();
        for f in &t.flows {
            for end in [&f.src, &f.dst] {
                if !hosts.contains(end.as_str()) {
                    return cfg_err(format!("flow endpoint '{end}' is not a host"));
                }
            }
            if !pairs.insert((f.src.as_str(), f.dst.as_str())) {
                return cfg_err(format!("duplicate flow {} -> {}", f.src, f.dst));
            }
            if f.path.is_empty() {
                return cfg_err(format!("flow {} -> {} has an empty path", f.src, f.dst));
            }
            if let Some(s) = f.path.iter().find(|s| !names.contains(s.as_str())) {
                return cfg_err(format!("flow {} -> {}: unknown switch '{s}'", f.src, f.dst));
            }
        }
        if self.traffic.interval == 0 {
            return cfg_err("traffic.interval must be at least 1".into());
        }
        for m in &self.traffic.messages {
            if self.flow(&m.src, &m.dst).is_none() {
                return cfg_err(format!("unreachable destination: no flow {} -> {}", m.src, m.dst));
            }
        }
        if self.mode.run.is_empty() {
            return cfg_err("mode.run lists no modes".into());
        }
        match (&self.mode.qan_success_probability, &self.mode.qan_detection) {
            (Some(_), Some(_)) => {
                return cfg_err(
                    "mode: give qan_success_probability or qan_detection, not both".into(),
                )
            }
            (Some(p), None) if !(0.0..=1.0).contains(p) => {
                return cfg_err("mode.qan_success_probability must be in [0, 1]".into())
            }
            (None, Some(d)) if !(0.0..=1.0).contains(&d.pz) || d.k == 0 || d.trials == 0 => {
                return cfg_err("mode.qan_detection needs pz in [0, 1], k >= 1, trials >= 1".into())
            }
            (None, None) if self.mode.run.contains(&Mode::QanBypass) => {
                return cfg_err("qan-bypass mode needs qan_success_probability or qan_detection".into())
            }
            _ => {}
        }
        Ok(())
    }

    /// Success probability of one notification attempt.
    pub fn qan_success_probability(&self) -> Result<f64> {
        if let Some(p) = self.mode.qan_success_probability {
            return Ok(p);
        }
        let Some(d) = &self.mode.qan_detection else {
            return invalid("no notification success probability configured");
        };
        let grid = DetectionGrid {
            pz: vec![d.pz],
            k: vec![d.k],
        };
        let points = detection_curve(&SessionConfig::default(), &grid, d.trials, d.seed)?;
        Ok(points[0].prob)
    }
}
