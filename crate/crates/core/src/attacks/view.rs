//! What a passive adversary sees, and the maximum-likelihood identity guess
//! it can make from that.

use std::collections::HashMap;
use std::sync::Arc;

use itertools::Itertools;

use super::config::{AdversaryConfig, ViewPolicy};
use crate::error::{invalid, Result};
use crate::protocol::{
    round_circuit, slot_gates, GhzAssignment, GhzSetup, NoiseAccounting, Scope, SessionConfig,
    SessionResult, Variant,
};
use crate::qsim::{Backend, NoiseParams, Sampler, EXACT_MAX_QUBITS};
use crate::shares::AngleShareSet;

/// Parameters every party knows. Identities are deliberately absent.
#[derive(Clone, Debug, PartialEq)]
pub struct PublicParams {
    pub n: usize,
    pub pz: f64,
    pub delta: f64,
    pub k_rounds: usize,
    pub noise: NoiseParams,
    pub variant: Variant,
    pub scope: Scope,
    pub accounting: NoiseAccounting,
    pub labels: Vec<usize>,
}

impl PublicParams {
    fn from_config(cfg: &SessionConfig) -> Self {
        Self {
            n: cfg.n,
            pz: cfg.pz,
            delta: cfg.delta,
            k_rounds: cfg.k_rounds,
            noise: cfg.noise,
            variant: cfg.variant,
            scope: cfg.scope,
            accounting: cfg.accounting,
            labels: cfg.ghz_labels(),
        }
    }

    /// Config carrying these parameters; notifier and receiver are
    /// placeholders that gate construction never reads.
    fn circuit_config(&self) -> SessionConfig {
        SessionConfig {
            n: self.n,
            notifier: 0,
            receiver: 1,
            pz: self.pz,
            delta: self.delta,
            k_rounds: self.k_rounds,
            noise: self.noise,
            variant: self.variant,
            scope: self.scope,
            accounting: self.accounting,
            ..SessionConfig::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObservedBroadcast {
    pub sender: usize,
    /// `(ghz label, bit)` pairs in received order.
    pub entries: Vec<(usize, u8)>,
}

/// Private knowledge of one corrupted user.
#[derive(Clone, Debug, PartialEq)]
pub struct CorruptedKnowledge {
    pub user: usize,
    /// `(ghz label, slot)` it was handed.
    pub slots: Vec<(usize, usize)>,
    /// `(ghz label, share)`.
    pub shares: Vec<(usize, f64)>,
    /// Per round, `(ghz label, measured bit)`.
    pub bits: Vec<Vec<(usize, u8)>>,
    /// The mapping of the GHZ state it distributed itself, if in scope.
    pub own_mapping: Option<GhzAssignment>,
    /// Set when this user is the notifier: the receiver it chose.
    pub notified_receiver: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdversaryView {
    pub public: PublicParams,
    /// Per round, broadcasts in speaking order.
    pub rounds: Vec<Vec<ObservedBroadcast>>,
    pub corrupted: Vec<CorruptedKnowledge>,
}

impl AdversaryView {
    /// Builds the coalition's view of a finished session.
    pub fn observe(result: &SessionResult, adv: &AdversaryConfig) -> Result<Self> {
        let cfg = &result.config;
        adv.validate(cfg.n)?;
        let rounds = result
            .records
            .iter()
            .map(|rec| {
                rec.broadcasts
                    .iter()
                    .map(|b| {
                        let hide_self =
                            adv.view_policy == ViewPolicy::Broadcast && !adv.is_corrupted(b.sender);
                        ObservedBroadcast {
                            sender: b.sender,
                            entries: b
                                .entries
                                .iter()
                                .copied()
                                .filter(|&(label, _)| !(hide_self && label == b.sender))
                                .collect(),
                        }
                    })
                    .collect()
            })
            .collect();
        let corrupted = adv
            .corrupted
            .iter()
            .map(|&c| CorruptedKnowledge {
                user: c,
                slots: result
                    .setups
                    .iter()
                    .map(|s| (s.label(), s.assignment.slot_of(c)))
                    .collect(),
                shares: result
                    .setups
                    .iter()
                    .map(|s| (s.label(), s.shares.share(c)))
                    .collect(),
                bits: result
                    .records
                    .iter()
                    .map(|rec| rec.ghz.iter().map(|g| (g.ghz_index, g.user_bits[c])).collect())
                    .collect(),
                own_mapping: result
                    .setups
                    .iter()
                    .find(|s| s.label() == c)
                    .map(|s| s.assignment.clone()),
                notified_receiver: (c == cfg.notifier).then_some(cfg.receiver),
            })
            .collect();
        Ok(Self {
            public: PublicParams::from_config(cfg),
            rounds,
            corrupted,
        })
    }

    /// Labels of GHZ states whose slot mapping the view contains.
    pub fn known_mappings(&self) -> Vec<usize> {
        self.corrupted
            .iter()
            .filter_map(|c| c.own_mapping.as_ref().map(GhzAssignment::distributor))
            .collect()
    }

    fn is_corrupted(&self, user: usize) -> bool {
        self.corrupted.iter().any(|c| c.user == user)
    }

    /// `obs[round][user]`: the bit of GHZ `label` held by `user`, if seen.
    fn observations(&self, label: usize) -> Vec<Vec<Option<u8>>> {
        let n = self.public.n;
        (0..self.rounds.len())
            .map(|r| {
                let mut obs = vec![None; n];
                for b in &self.rounds[r] {
                    for &(l, bit) in &b.entries {
                        if l == label {
                            obs[b.sender] = Some(bit);
                        }
                    }
                }
                for c in &self.corrupted {
                    if let Some(&(_, bit)) = c.bits[r].iter().find(|(l, _)| *l == label) {
                        obs[c.user] = Some(bit);
                    }
                }
                obs
            })
            .collect()
    }

    /// Slot mappings of GHZ `label` consistent with the coalition's knowledge.
    fn consistent_mappings(&self, label: usize) -> Vec<Vec<usize>> {
        let n = self.public.n;
        if let Some(m) = self
            .corrupted
            .iter()
            .filter_map(|c| c.own_mapping.as_ref())
            .find(|m| m.distributor() == label)
        {
            return vec![m.mapping().to_vec()];
        }
        let mut fixed = vec![None; n];
        for c in &self.corrupted {
            if let Some(&(_, slot)) = c.slots.iter().find(|(l, _)| *l == label) {
                fixed[slot] = Some(c.user);
            }
        }
        let free_slots: Vec<usize> = (0..n).filter(|&s| fixed[s].is_none()).collect();
        let free_users: Vec<usize> = (0..n).filter(|&u| !self.is_corrupted(u)).collect();
        free_users
            .iter()
            .copied()
            .permutations(free_users.len())
            .map(|perm| {
                let mut m: Vec<usize> = fixed.iter().map(|u| u.unwrap_or(usize::MAX)).collect();
                for (&slot, user) in free_slots.iter().zip(perm) {
                    m[slot] = user;
                }
                m
            })
            .collect()
    }
}

/// Exact outcome distributions keyed by (distributor slot, kick slot).
#[derive(Debug)]
pub struct LikelihoodModel {
    public: PublicParams,
    cfg: SessionConfig,
    sampler: Sampler,
    cache: HashMap<(usize, Option<usize>), Arc<Vec<f64>>>,
}

impl LikelihoodModel {
    pub fn new(public: &PublicParams) -> Result<Self> {
        if public.n > EXACT_MAX_QUBITS {
            return invalid(format!(
                "likelihood guessing supports n <= {EXACT_MAX_QUBITS}, got {}",
                public.n
            ));
        }
        Ok(Self {
            public: public.clone(),
            cfg: public.circuit_config(),
            sampler: Sampler::new(Backend::Exact),
            cache: HashMap::new(),
        })
    }

    fn distribution(&mut self, dist_slot: usize, kick_slot: Option<usize>) -> Result<Arc<Vec<f64>>> {
        if let Some(d) = self.cache.get(&(dist_slot, kick_slot)) {
            return Ok(d.clone());
        }
        let n = self.cfg.n;
        let setup = GhzSetup {
            assignment: GhzAssignment::identity(n, dist_slot)?,
            shares: AngleShareSet::zero(n, dist_slot, Some(dist_slot))?,
        };
        let gates = slot_gates(&self.cfg, &setup, kick_slot, None)?;
        let d = self.sampler.distribution(&round_circuit(&self.cfg, &gates)?)?;
        self.cache.insert((dist_slot, kick_slot), d.clone());
        Ok(d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IdentityGuess {
    pub notifier: usize,
    pub receiver: usize,
}

/// Probability of the visible bits of one round; unseen bits are summed out.
fn round_probability(dist: &[f64], slot_of: &[usize], obs: &[Option<u8>]) -> f64 {
    let n = obs.len();
    let mut base = 0usize;
    let mut hidden = Vec::new();
    for (user, bit) in obs.iter().enumerate() {
        let shift = n - 1 - slot_of[user];
        match bit {
            Some(b) => base |= (*b as usize) << shift,
            None => hidden.push(shift),
        }
    }
    (0..1usize << hidden.len())
        .map(|combo| {
            let idx = hidden
                .iter()
                .enumerate()
                .fold(base, |acc, (i, &shift)| acc | (((combo >> i) & 1) << shift));
            dist[idx]
        })
        .sum()
}

fn log_mean_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + (xs.iter().map(|x| (x - m).exp()).sum::<f64>() / xs.len() as f64).ln()
}

/// `a` beats `b` by more than a relative tolerance of 1e-9.
fn beats(a: f64, b: f64) -> bool {
    if a == b || a.is_nan() {
        return false;
    }
    if b == f64::NEG_INFINITY {
        return true;
    }
    a - b > 1e-9 * b.abs().max(1.0)
}

fn argmax(scores: &[(usize, f64)]) -> usize {
    let mut best = scores[0];
    for &s in &scores[1..] {
        if beats(s.1, best.1) {
            best = s;
        }
    }
    best.0
}

/// Per GHZ label: log-likelihood with no kick, and with a kick addressed to
/// each possible receiver (`NEG_INFINITY` for the distributor itself).
fn ghz_likelihoods(
    view: &AdversaryView,
    model: &mut LikelihoodModel,
    label: usize,
) -> Result<(f64, Vec<f64>)> {
    let n = view.public.n;
    let pz = view.public.pz;
    let obs = view.observations(label);
    let mappings = view.consistent_mappings(label);
    let mut idle = Vec::with_capacity(mappings.len());
    let mut kicked = vec![Vec::with_capacity(mappings.len()); n];
    for m in &mappings {
        let mut slot_of = vec![0; n];
        for (slot, &user) in m.iter().enumerate() {
            slot_of[user] = slot;
        }
        let d = slot_of[label];
        let none = model.distribution(d, None)?;
        let p_idle: Vec<f64> = obs
            .iter()
            .map(|o| round_probability(&none, &slot_of, o))
            .collect();
        idle.push(p_idle.iter().map(|p| p.ln()).sum());
        for v in (0..n).filter(|&v| v != label) {
            let kick = model.distribution(d, Some(slot_of[v]))?;
            let ll = obs
                .iter()
                .zip(&p_idle)
                .map(|(o, &pi)| ((1.0 - pz) * pi + pz * round_probability(&kick, &slot_of, o)).ln())
                .sum();
            kicked[v].push(ll);
        }
    }
    let kicked = (0..n)
        .map(|v| {
            if v == label {
                f64::NEG_INFINITY
            } else {
                log_mean_exp(&kicked[v])
            }
        })
        .collect();
    Ok((log_mean_exp(&idle), kicked))
}

/// Maximum-likelihood notifier and receiver under a uniform prior over
/// honest candidates, using a caller-held distribution cache.
///
/// Ties go to the lowest user index. A corrupted notifier reveals both
/// identities outright.
pub fn semi_honest_guess_with(
    view: &AdversaryView,
    model: &mut LikelihoodModel,
) -> Result<IdentityGuess> {
    if model.public != view.public {
        *model = LikelihoodModel::new(&view.public)?;
    }
    if let Some(c) = view.corrupted.iter().find(|c| c.notified_receiver.is_some()) {
        return Ok(IdentityGuess {
            notifier: c.user,
            receiver: c.notified_receiver.expect("checked above"),
        });
    }
    let n = view.public.n;
    let labels = view.public.labels.clone();
    let mut idle = HashMap::new();
    let mut kicked = HashMap::new();
    for &j in &labels {
        let (i, k) = ghz_likelihoods(view, model, j)?;
        idle.insert(j, i);
        kicked.insert(j, k);
    }
    let joint = |u: usize, v: usize| -> f64 {
        kicked[&u][v] + labels.iter().filter(|&&j| j != u).map(|j| idle[j]).sum::<f64>()
    };
    let candidates: Vec<usize> = labels
        .iter()
        .copied()
        .filter(|&u| !view.is_corrupted(u))
        .collect();
    if candidates.is_empty() {
        return invalid("no honest candidate distributes a GHZ state in scope");
    }
    let scores: Vec<(usize, f64)> = candidates
        .iter()
        .map(|&u| {
            let per_v: Vec<f64> = (0..n).filter(|&v| v != u).map(|v| joint(u, v)).collect();
            (u, log_mean_exp(&per_v))
        })
        .collect();
    let notifier = argmax(&scores);
    let receivers: Vec<(usize, f64)> = (0..n)
        .filter(|&v| v != notifier)
        .map(|v| (v, joint(notifier, v)))
        .collect();
    Ok(IdentityGuess {
        notifier,
        receiver: argmax(&receivers),
    })
}

pub fn semi_honest_guess(view: &AdversaryView) -> Result<IdentityGuess> {
    semi_honest_guess_with(view, &mut LikelihoodModel::new(&view.public)?)
}

/// Guess accuracy over a batch of sessions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeakageReport {
    pub sessions: usize,
    pub notifier_correct: usize,
    pub receiver_correct: usize,
    /// Accuracy of a guess made without looking at the view.
    pub baseline: f64,
}

impl LeakageReport {
    pub fn guess_accuracy(&self) -> f64 {
        self.notifier_correct as f64 / self.sessions as f64
    }

    pub fn receiver_accuracy(&self) -> f64 {
        self.receiver_correct as f64 / self.sessions as f64
    }

    pub fn advantage(&self) -> f64 {
        self.guess_accuracy() - self.baseline
    }
}
