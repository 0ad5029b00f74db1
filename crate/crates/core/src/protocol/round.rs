//! One notification round: rotations, Hadamards, measurement, broadcast and
//! parity collection for every GHZ state in scope.

use rand::seq::SliceRandom;

use super::assignment::GhzAssignment;
use super::config::{NoiseAccounting, SessionConfig, Variant};
use crate::error::{invalid, Result};
use crate::qsim::{BitString, Circuit, Gate1, Sampler};
use crate::rng::RngStream;
use crate::shares::AngleShareSet;

/// Per-session secrets attached to one GHZ state.
#[derive(Clone, Debug, PartialEq)]
pub struct GhzSetup {
    pub assignment: GhzAssignment,
    pub shares: AngleShareSet,
}

impl GhzSetup {
    pub fn label(&self) -> usize {
        self.assignment.distributor()
    }
}

/// Measurement results for one GHZ state in one round.
#[derive(Clone, Debug, PartialEq)]
pub struct GhzOutcome {
    /// GHZ label, equal to its distributor's user index.
    pub ghz_index: usize,
    pub kick_applied: bool,
    /// Physical outcome in slot order.
    pub slot_bits: BitString,
    /// Physical outcome indexed by user: `m_j^i`.
    pub user_bits: Vec<u8>,
    /// XOR of all `n` physical bits.
    pub parity: u8,
    /// XOR of the broadcast bits carrying this label.
    pub announced_parity: u8,
}

/// What one user broadcast: `(ghz label, bit)` pairs in permuted order.
#[derive(Clone, Debug, PartialEq)]
pub struct BroadcastMessage {
    pub sender: usize,
    /// `permutation[k]` is the held-bit position sent at position `k`.
    pub permutation: Vec<usize>,
    pub entries: Vec<(usize, u8)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundRecord {
    pub round: usize,
    /// Whether the notifier actuated the kick this round.
    pub kick_applied: bool,
    pub ghz: Vec<GhzOutcome>,
    /// Broadcasts in speaking order (user 0 first).
    pub broadcasts: Vec<BroadcastMessage>,
}

impl RoundRecord {
    pub fn outcome(&self, label: usize) -> Option<&GhzOutcome> {
        self.ghz.iter().find(|g| g.ghz_index == label)
    }

    pub fn announced_parity(&self, label: usize) -> Option<u8> {
        self.outcome(label).map(|g| g.announced_parity)
    }
}

/// Hooks through which an adversary alters a round.
pub trait RoundAdversary {
    /// Extra `R_z` angle per (GHZ position in `setups`, user). An empty
    /// vector means no extra rotations.
    fn rotation_offsets(
        &mut self,
        _cfg: &SessionConfig,
        _setups: &[GhzSetup],
        _rng: &mut RngStream,
    ) -> Vec<Vec<f64>> {
        Vec::new()
    }

    /// Called after every user has broadcast and before parities are
    /// collected.
    fn tamper(&mut self, _cfg: &SessionConfig, _record: &mut RoundRecord) {}
}

/// Everyone follows the protocol.
#[derive(Clone, Copy, Debug, Default)]
pub struct Honest;

impl RoundAdversary for Honest {}

/// Gate applied at each slot of a modified-variant GHZ; `None` means the
/// slot holder applies nothing (the distributor skips its own GHZ).
pub(crate) fn modified_slot_gates(
    cfg: &SessionConfig,
    setup: &GhzSetup,
    kick_slot: Option<usize>,
    offsets: Option<&[f64]>,
) -> Result<Vec<Option<Gate1>>> {
    let n = cfg.n;
    (0..n)
        .map(|slot| {
            let user = setup.assignment.user_at(slot);
            let kick = if kick_slot == Some(slot) { cfg.delta } else { 0.0 };
            let extra = offsets.map_or(0.0, |o| o[user]);
            if setup.shares.is_participating(user) {
                Gate1::rz(setup.shares.share(user) + kick + extra).map(Some)
            } else if kick != 0.0 || extra != 0.0 {
                Gate1::rz(kick + extra).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect()
}

/// Baseline: `Z` at the kicked slot, identity elsewhere.
pub(crate) fn baseline_slot_gates(
    cfg: &SessionConfig,
    setup: &GhzSetup,
    kick_slot: Option<usize>,
    offsets: Option<&[f64]>,
) -> Result<Vec<Option<Gate1>>> {
    (0..cfg.n)
        .map(|slot| {
            let user = setup.assignment.user_at(slot);
            let base = if kick_slot == Some(slot) {
                Gate1::pauli_z()
            } else {
                Gate1::identity()
            };
            let extra = offsets.map_or(0.0, |o| o[user]);
            let gate = if extra != 0.0 {
                base.compose(&Gate1::rz(extra)?)
            } else {
                base
            };
            let exempt = cfg.accounting == NoiseAccounting::ExemptIdentity && gate.is_identity();
            Ok((!exempt).then_some(gate))
        })
        .collect()
}

pub(crate) fn slot_gates(
    cfg: &SessionConfig,
    setup: &GhzSetup,
    kick_slot: Option<usize>,
    offsets: Option<&[f64]>,
) -> Result<Vec<Option<Gate1>>> {
    match cfg.variant {
        Variant::Modified => modified_slot_gates(cfg, setup, kick_slot, offsets),
        Variant::Baseline => baseline_slot_gates(cfg, setup, kick_slot, offsets),
    }
}

/// Noisy GHZ preparation, the per-slot gates, then a Hadamard on every slot.
pub(crate) fn round_circuit(cfg: &SessionConfig, gates: &[Option<Gate1>]) -> Result<Circuit> {
    let mut c = Circuit::ghz_preparation(cfg.n, &cfg.noise)?;
    for (slot, g) in gates.iter().enumerate() {
        if let Some(g) = g {
            c.noisy_gate(slot, *g, &cfg.noise);
        }
    }
    for slot in 0..cfg.n {
        c.noisy_gate(slot, Gate1::hadamard(), &cfg.noise);
    }
    Ok(c)
}

pub(crate) fn check_setups(cfg: &SessionConfig, setups: &[GhzSetup]) -> Result<()> {
    let labels: Vec<usize> = setups.iter().map(GhzSetup::label).collect();
    if labels != cfg.ghz_labels() {
        return invalid(format!(
            "GHZ setups {labels:?} do not match scope {:?}",
            cfg.ghz_labels()
        ));
    }
    for s in setups {
        if s.assignment.n() != cfg.n || s.shares.len() != cfg.n {
            return invalid("GHZ setup size does not match the user count");
        }
        if s.shares.excluded() != Some(s.label()) {
            return invalid(format!(
                "share mask for GHZ {} must exclude exactly its distributor",
                s.label()
            ));
        }
    }
    Ok(())
}

/// Runs one round with the given adversary hooks, including broadcast and
/// parity collection.
pub fn run_round(
    cfg: &SessionConfig,
    round: usize,
    setups: &[GhzSetup],
    adversary: &mut dyn RoundAdversary,
    sampler: &mut Sampler,
    rng: &mut RngStream,
) -> Result<RoundRecord> {
    check_setups(cfg, setups)?;
    let kick = rng.bernoulli(cfg.pz);
    let offsets = adversary.rotation_offsets(cfg, setups, rng);
    let notifier_setup = setups
        .iter()
        .find(|s| s.label() == cfg.notifier)
        .expect("scope always contains the notifier's GHZ");
    let receiver_slot = notifier_setup.assignment.slot_of(cfg.receiver);

    let mut ghz = Vec::with_capacity(setups.len());
    for (pos, setup) in setups.iter().enumerate() {
        let kicked = kick && setup.label() == cfg.notifier;
        let kick_slot = kicked.then_some(receiver_slot);
        let gates = slot_gates(cfg, setup, kick_slot, offsets.get(pos).map(Vec::as_slice))?;
        let circuit = round_circuit(cfg, &gates)?;
        let slot_bits = sampler.sample(&circuit, rng)?;
        let user_bits: Vec<u8> = (0..cfg.n)
            .map(|user| slot_bits.bit(setup.assignment.slot_of(user)))
            .collect();
        let parity = slot_bits.parity();
        ghz.push(GhzOutcome {
            ghz_index: setup.label(),
            kick_applied: kicked,
            slot_bits,
            user_bits,
            parity,
            announced_parity: parity,
        });
    }
    let mut record = RoundRecord {
        round,
        kick_applied: kick,
        ghz,
        broadcasts: Vec::new(),
    };
    broadcast(&mut record, rng);
    adversary.tamper(cfg, &mut record);
    collect(&mut record);
    Ok(record)
}

/// Modified variant, honest parties, one round.
pub fn run_round_modified(
    cfg: &SessionConfig,
    setups: &[GhzSetup],
    rng: &mut RngStream,
) -> Result<RoundRecord> {
    let cfg = SessionConfig {
        variant: Variant::Modified,
        ..cfg.clone()
    };
    run_round(&cfg, 0, setups, &mut Honest, &mut Sampler::new(cfg.backend), rng)
}

/// Baseline variant, honest parties, one round. Shares in `setups` are
/// ignored by the baseline circuit.
pub fn run_round_baseline(
    cfg: &SessionConfig,
    setups: &[GhzSetup],
    rng: &mut RngStream,
) -> Result<RoundRecord> {
    let cfg = SessionConfig {
        variant: Variant::Baseline,
        ..cfg.clone()
    };
    run_round(&cfg, 0, setups, &mut Honest, &mut Sampler::new(cfg.backend), rng)
}

/// Each user sends its held bits as labelled pairs in a fresh private order.
pub fn broadcast(record: &mut RoundRecord, rng: &mut RngStream) {
    let n = record.ghz.first().map_or(0, |g| g.user_bits.len());
    record.broadcasts = (0..n)
        .map(|sender| {
            let held: Vec<(usize, u8)> = record
                .ghz
                .iter()
                .map(|g| (g.ghz_index, g.user_bits[sender]))
                .collect();
            let mut permutation: Vec<usize> = (0..held.len()).collect();
            permutation.shuffle(rng);
            let entries = permutation.iter().map(|&k| held[k]).collect();
            BroadcastMessage {
                sender,
                permutation,
                entries,
            }
        })
        .collect();
}

/// Recomputes every announced parity from the broadcast pairs.
pub fn collect(record: &mut RoundRecord) {
    for g in &mut record.ghz {
        g.announced_parity = record
            .broadcasts
            .iter()
            .flat_map(|b| &b.entries)
            .filter(|(label, _)| *label == g.ghz_index)
            .fold(0, |acc, (_, bit)| acc ^ bit);
    }
}

pub fn broadcast_and_collect(mut record: RoundRecord, rng: &mut RngStream) -> RoundRecord {
    broadcast(&mut record, rng);
    collect(&mut record);
    record
}

/// Exact outcome distribution (slot order) of one GHZ state in a round,
/// with an optional kick slot. Ignores `cfg.backend`.
pub fn round_distribution(
    cfg: &SessionConfig,
    setup: &GhzSetup,
    kick_slot: Option<usize>,
) -> Result<Vec<f64>> {
    if setup.assignment.n() != cfg.n || setup.shares.len() != cfg.n {
        return invalid("GHZ setup size does not match the user count");
    }
    if kick_slot.is_some_and(|s| s >= cfg.n) {
        return invalid("kick slot out of range");
    }
    let gates = slot_gates(cfg, setup, kick_slot, None)?;
    let mut sampler = Sampler::new(crate::qsim::Backend::Exact);
    Ok(sampler.distribution(&round_circuit(cfg, &gates)?)?.as_ref().clone())
}
