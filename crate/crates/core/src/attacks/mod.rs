//! Adversary models against the notification protocol: passive observers
//! guessing identities, rotation poisoners and a forging last speaker.

mod active;
mod config;
mod experiments;
mod view;

pub use active::{
    blind_baseline, forge_bit, last_speaker_session_with, majority_vote, mitigation_majority_vote,
    poisoned_session_with, run_last_speaker_session, run_poisoned_session, LastSpeaker, Poisoner,
};
pub use config::{AdversaryConfig, AdversaryModel, ParityGoal, ViewPolicy};
pub use experiments::{last_speaker_attack, poison_sweep, semi_honest_experiment, AttackRow};
pub use view::{
    semi_honest_guess, semi_honest_guess_with, AdversaryView, CorruptedKnowledge, IdentityGuess,
    LeakageReport, LikelihoodModel, ObservedBroadcast, PublicParams,
};
