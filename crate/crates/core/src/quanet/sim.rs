//! Event-ordered packet simulation over fixed per-flow switch paths.
//!
//! Each link hop costs one tick. Events at equal times run in scheduling
//! order, so a scenario and stream always replay identically.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::classifier::Classifier;
use super::config::{Mode, ScenarioConfig};
use crate::error::{invalid, Result};
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EncryptionTag {
    ClassicalFlag,
    QuantumFlag,
    Untagged,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PayloadClass {
    Private,
    NonPrivate,
}

impl PayloadClass {
    pub const ALL: [PayloadClass; 2] = [PayloadClass::Private, PayloadClass::NonPrivate];

    pub fn name(self) -> &'static str {
        match self {
            PayloadClass::Private => "private",
            PayloadClass::NonPrivate => "non-private",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fate {
    InFlight,
    Delivered,
    Dropped,
    /// The flow's notification never succeeded, so the packet was not sent.
    Failed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Header {
    pub tag: EncryptionTag,
    pub src: String,
    pub dst: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Packet {
    pub id: usize,
    pub flow: usize,
    pub header: Header,
    /// Ground truth, never read by switches.
    pub payload_class: PayloadClass,
    pub created: u64,
    pub delivered: Option<u64>,
    pub fate: Fate,
    pub delayed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Location {
    Switch(String),
    /// Passed the named ingress switch on a bypass entry without inspection.
    Bypass(String),
    Gateway,
    Host(String),
}

/// One header observation.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceEntry {
    pub time: u64,
    pub packet: usize,
    pub location: Location,
    pub tag: EncryptionTag,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassMetrics {
    pub class: PayloadClass,
    pub sent: usize,
    pub delivered: usize,
    pub dropped: usize,
    pub failed: usize,
    pub delayed: usize,
    pub mean_latency: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioMetrics {
    pub mode: Mode,
    /// Private first, then non-private.
    pub classes: [ClassMetrics; 2],
    /// Recall of the compromised switches on private packets; `None` with no
    /// private traffic on an inspected flow or no compromised switch.
    pub inference_accuracy: Option<f64>,
    /// Private share of traffic on inspected flows.
    pub chance: Option<f64>,
    pub packets: Vec<Packet>,
    pub trace: Vec<TraceEntry>,
}

impl ScenarioMetrics {
    pub fn class(&self, class: PayloadClass) -> &ClassMetrics {
        &self.classes[usize::from(class == PayloadClass::NonPrivate)]
    }

    /// Times a private packet reached a switch carrying the quantum flag.
    pub fn private_flag_exposures(&self) -> usize {
        self.trace
            .iter()
            .filter(|e| {
                matches!(e.location, Location::Switch(_))
                    && e.tag == EncryptionTag::QuantumFlag
                    && self.packets[e.packet].payload_class == PayloadClass::Private
            })
            .count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum EventKind {
    Emit(usize),
    AtSwitch { packet: usize, hop: usize },
    Bypass(usize),
    AtHost(usize),
    AtGateway(usize),
    QanAttempt { flow: usize, attempt: u32 },
    InstallBypass(usize),
}

#[derive(Clone, Debug)]
enum QanState {
    Idle,
    Pending(Vec<usize>),
    Installed,
    Failed,
}

struct Sim<'a> {
    cfg: &'a ScenarioConfig,
    mode: Mode,
    qan_p: f64,
    rng: &'a mut RngStream,
    queue: BinaryHeap<Reverse<(u64, u64, EventKind)>>,
    seq: u64,
    packets: Vec<Packet>,
    flows: Vec<QanState>,
    /// Per switch in config order: honest, drop rate, delay penalty.
    switches: Vec<(String, bool, f64, u64)>,
    flow_paths: Vec<Vec<usize>>,
    flagged_at_adversary: Vec<bool>,
    trace: Vec<TraceEntry>,
}

impl Sim<'_> {
    fn schedule(&mut self, time: u64, kind: EventKind) {
        self.queue.push(Reverse((time, self.seq, kind)));
        self.seq += 1;
    }

    fn observe(&mut self, time: u64, packet: usize, location: Location) {
        let tag = self.packets[packet].header.tag;
        self.trace.push(TraceEntry {
            time,
            packet,
            location,
            tag,
        });
    }

    fn finish(&mut self, time: u64, packet: usize, location: Location) {
        self.observe(time, packet, location);
        let p = &mut self.packets[packet];
        p.delivered = Some(time);
        p.fate = Fate::Delivered;
    }

    fn handle(&mut self, t: u64, kind: EventKind) {
        match kind {
            EventKind::Emit(id) => {
                let private = self.packets[id].payload_class == PayloadClass::Private;
                let tag = match self.mode {
                    Mode::FlaggedHeaders if private => EncryptionTag::QuantumFlag,
                    Mode::QanBypass if private => EncryptionTag::Untagged,
                    _ => EncryptionTag::ClassicalFlag,
                };
                self.packets[id].header.tag = tag;
                if self.mode == Mode::QanBypass && private {
                    let flow = self.packets[id].flow;
                    match &mut self.flows[flow] {
                        QanState::Installed => self.schedule(t + 1, EventKind::Bypass(id)),
                        QanState::Pending(waiting) => waiting.push(id),
                        QanState::Failed => self.packets[id].fate = Fate::Failed,
                        QanState::Idle => {
                            self.flows[flow] = QanState::Pending(vec![id]);
                            self.schedule(t + 1, EventKind::QanAttempt { flow, attempt: 0 });
                        }
                    }
                } else {
                    self.schedule(t + 1, EventKind::AtSwitch { packet: id, hop: 0 });
                }
            }
            EventKind::AtSwitch { packet, hop } => {
                let path = &self.flow_paths[self.packets[packet].flow];
                let last = hop + 1 == path.len();
                let (name, honest, drop, penalty) = self.switches[path[hop]].clone();
                self.observe(t, packet, Location::Switch(name));
                let mut delay = 0;
                if !honest && self.packets[packet].header.tag == EncryptionTag::QuantumFlag {
                    self.flagged_at_adversary[packet] = true;
                    if self.rng.bernoulli(drop) {
                        self.packets[packet].fate = Fate::Dropped;
                        return;
                    }
                    delay = penalty;
                    if penalty > 0 {
                        self.packets[packet].delayed = true;
                    }
                }
                let next = if last {
                    EventKind::AtHost(packet)
                } else {
                    EventKind::AtSwitch {
                        packet,
                        hop: hop + 1,
                    }
                };
                self.schedule(t + 1 + delay, next);
            }
            EventKind::Bypass(packet) => {
                let ingress = self.flow_paths[self.packets[packet].flow][0];
                let name = self.switches[ingress].0.clone();
                self.observe(t, packet, Location::Bypass(name));
                self.schedule(t + 1, EventKind::AtGateway(packet));
            }
            EventKind::AtHost(packet) => {
                let dst = self.packets[packet].header.dst.clone();
                self.finish(t, packet, Location::Host(dst));
            }
            EventKind::AtGateway(packet) => self.finish(t, packet, Location::Gateway),
            EventKind::QanAttempt { flow, attempt } => {
                if self.rng.bernoulli(self.qan_p) {
                    self.schedule(t + 1, EventKind::InstallBypass(flow));
                } else if attempt < self.cfg.mode.qan_retry_limit {
                    self.schedule(
                        t + 1,
                        EventKind::QanAttempt {
                            flow,
                            attempt: attempt + 1,
                        },
                    );
                } else if let QanState::Pending(waiting) =
                    std::mem::replace(&mut self.flows[flow], QanState::Failed)
                {
                    for id in waiting {
                        self.packets[id].fate = Fate::Failed;
                    }
                }
            }
            EventKind::InstallBypass(flow) => {
                if let QanState::Pending(waiting) =
                    std::mem::replace(&mut self.flows[flow], QanState::Installed)
                {
                    for id in waiting {
                        self.schedule(t + 1, EventKind::Bypass(id));
                    }
                }
            }
        }
    }
}

fn class_metrics(packets: &[Packet], class: PayloadClass) -> ClassMetrics {
    let mine: Vec<&Packet> = packets.iter().filter(|p| p.payload_class == class).collect();
    let count = |f: Fate| mine.iter().filter(|p| p.fate == f).count();
    let latencies: Vec<f64> = mine
        .iter()
        .filter_map(|p| p.delivered.map(|d| (d - p.created) as f64))
        .collect();
    ClassMetrics {
        class,
        sent: mine.len(),
        delivered: count(Fate::Delivered),
        dropped: count(Fate::Dropped),
        failed: count(Fate::Failed),
        delayed: mine.iter().filter(|p| p.delayed).count(),
        mean_latency: (!latencies.is_empty())
            .then(|| latencies.iter().sum::<f64>() / latencies.len() as f64),
    }
}

/// Simulates the scenario's traffic under one mode with a given
/// notification success probability.
pub fn run_scenario_with(
    cfg: &ScenarioConfig,
    classifier: &dyn Classifier,
    mode: Mode,
    qan_success_probability: f64,
    rng: &mut RngStream,
) -> Result<ScenarioMetrics> {
    cfg.validate()?;
    if !(0.0..=1.0).contains(&qan_success_probability) {
        return invalid("notification success probability must be in [0, 1]");
    }
    let topo = &cfg.topology;
    let switches: Vec<(String, bool, f64, u64)> = topo
        .switches
        .iter()
        .map(|s| (s.name.clone(), s.honest, s.drop_rate, s.delay_penalty))
        .collect();
    let index_of = |name: &str| switches.iter().position(|s| s.0 == name).expect("validated");
    let flow_paths: Vec<Vec<usize>> = topo
        .flows
        .iter()
        .map(|f| f.path.iter().map(|s| index_of(s)).collect())
        .collect();

    let mut packets = Vec::new();
    for m in &cfg.traffic.messages {
        let flow = topo
            .flows
            .iter()
            .position(|f| f.src == m.src && f.dst == m.dst)
            .expect("validated");
        let payload_class = if classifier.classify(&m.text) == 1 {
            PayloadClass::Private
        } else {
            PayloadClass::NonPrivate
        };
        for _ in 0..m.count {
            let id = packets.len();
            packets.push(Packet {
                id,
                flow,
                header: Header {
                    tag: EncryptionTag::Untagged,
                    src: m.src.clone(),
                    dst: m.dst.clone(),
                },
                payload_class,
                created: id as u64 * cfg.traffic.interval,
                delivered: None,
                fate: Fate::InFlight,
                delayed: false,
            });
        }
    }

    let inspected_flow: Vec<bool> = flow_paths
        .iter()
        .map(|p| p.iter().any(|&s| !switches[s].1))
        .collect();
    let n_packets = packets.len();
    let mut sim = Sim {
        cfg,
        mode,
        qan_p: qan_success_probability,
        rng,
        queue: BinaryHeap::new(),
        seq: 0,
        packets,
        flows: vec![QanState::Idle; topo.flows.len()],
        switches,
        flow_paths,
        flagged_at_adversary: vec![false; n_packets],
        trace: Vec::new(),
    };
    for id in 0..n_packets {
        let created = sim.packets[id].created;
        sim.schedule(created, EventKind::Emit(id));
    }
    while let Some(Reverse((t, _, kind))) = sim.queue.pop() {
        sim.handle(t, kind);
    }
    debug_assert!(sim.packets.iter().all(|p| p.fate != Fate::InFlight));

    // Inference: a flagged private packet is recognised; any other private
    // packet on an inspected flow is guessed at the private prior.
    let on_inspected: Vec<&Packet> = sim
        .packets
        .iter()
        .filter(|p| inspected_flow[p.flow])
        .collect();
    let private_ids: Vec<usize> = on_inspected
        .iter()
        .filter(|p| p.payload_class == PayloadClass::Private)
        .map(|p| p.id)
        .collect();
    let (inference_accuracy, chance) = if private_ids.is_empty() {
        (None, None)
    } else {
        let prior = private_ids.len() as f64 / on_inspected.len() as f64;
        let mut hits = 0usize;
        for &id in &private_ids {
            if sim.flagged_at_adversary[id] || sim.rng.bernoulli(prior) {
                hits += 1;
            }
        }
        (Some(hits as f64 / private_ids.len() as f64), Some(prior))
    };

    let classes = PayloadClass::ALL.map(|c| class_metrics(&sim.packets, c));
    Ok(ScenarioMetrics {
        mode,
        classes,
        inference_accuracy,
        chance,
        packets: sim.packets,
        trace: sim.trace,
    })
}

/// Runs one mode with the scenario's own classifier and success probability.
pub fn run_scenario(cfg: &ScenarioConfig, mode: Mode, rng: &mut RngStream) -> Result<ScenarioMetrics> {
    let p = if mode == Mode::QanBypass {
        cfg.qan_success_probability()?
    } else {
        cfg.mode.qan_success_probability.unwrap_or(1.0)
    };
    run_scenario_with(cfg, &cfg.classifier(), mode, p, rng)
}

/// Every mode listed in the scenario, mode `i` on stream `i`.
pub fn run_all_modes(cfg: &ScenarioConfig, seed: u64) -> Result<Vec<ScenarioMetrics>> {
    cfg.validate()?;
    let p = if cfg.mode.run.contains(&Mode::QanBypass) {
        cfg.qan_success_probability()?
    } else {
        1.0
    };
    let classifier = cfg.classifier();
    cfg.mode
        .run
        .par_iter()
        .enumerate()
        .map(|(i, &mode)| {
            run_scenario_with(cfg, &classifier, mode, p, &mut RngStream::new(seed, i as u64))
        })
        .collect()
}

/// Fraction of private packets on inspected flows that compromised switches
/// identify; `None` when there is no such private traffic.
pub fn inference_accuracy(cfg: &ScenarioConfig, mode: Mode, rng: &mut RngStream) -> Result<Option<f64>> {
    if !cfg.has_compromised_switch_on_flow() {
        return invalid("inference needs a compromised switch on some flow");
    }
    Ok(run_scenario(cfg, mode, rng)?.inference_accuracy)
}
