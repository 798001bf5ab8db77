//! Scenario construction and the Monte Carlo harness.

pub mod config;
pub mod scenario;
pub mod simulate;
pub mod sweep;

pub use config::{ConfigError, PlacementMode, ScenarioConfig, ScenarioKind};
pub use scenario::{channel_gain, Placement};
pub use simulate::{simulate_realization, EmpiricalMse};
pub use sweep::{run_sweep, CurvePoint, MseCurve, SweepOutput, TrialResult};
