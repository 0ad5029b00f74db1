//! The notification protocol: per-round rotations and parity checks, `K`-round
//! sessions, and the experiment drivers built on them.

mod assignment;
mod config;
mod experiments;
mod round;
mod session;

pub use assignment::{assign_ghz, GhzAssignment};
pub use config::{AngleMode, NoiseAccounting, Scope, SessionConfig, Variant};
pub use experiments::{
    anonymity_distribution, anonymity_exact, detection_curve, false_positive_compare,
    false_positive_gap, monte_carlo, AnonymityRow, DetectionGrid, DetectionPoint,
    FalsePositiveRow,
};
pub use round::{
    broadcast, broadcast_and_collect, collect, run_round, run_round_baseline, run_round_modified,
    round_distribution, BroadcastMessage, GhzOutcome, GhzSetup, Honest, RoundAdversary, RoundRecord,
};
pub use session::{run_session, run_session_with, setup_session, SessionResult};

pub(crate) use round::{round_circuit, slot_gates};
