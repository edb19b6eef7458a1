//! Experiment harness for the planner-actor-reporter gridworld: configs,
//! seeded sweeps, Wilson-interval summaries, JSONL logs, a templated HTTP
//! completion client, and a mock completion server backed by the oracle.

pub mod config;
pub mod error;
pub mod http;
pub mod human;
pub mod logs;
pub mod metrics;
pub mod mock;
pub mod sweep;
pub mod tables;

pub use config::{EndpointConfig, ExperimentConfig};
pub use error::HarnessError;
pub use metrics::{wilson_interval, MetricsSummary};
pub use sweep::{run_sweep, run_sweep_with, SweepOutcome};
