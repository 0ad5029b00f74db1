//! Network layer: privacy classification, header-inspecting switches and a
//! notification-triggered bypass to the quantum gateway.

mod classifier;
mod config;
mod sim;

pub use classifier::{Classifier, RuleClassifier};
pub use config::{
    ClassifierSpec, FlowSpec, MessageSpec, Mode, ModeSpec, QanDetectionSpec, ScenarioConfig,
    SwitchSpec, Topology, TrafficSpec,
};
pub use sim::{
    inference_accuracy, run_all_modes, run_scenario, run_scenario_with, ClassMetrics,
    EncryptionTag, Fate, Header, Location, Packet, PayloadClass, ScenarioMetrics, TraceEntry,
};
