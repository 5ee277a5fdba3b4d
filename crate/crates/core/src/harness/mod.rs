//! Scenario execution, experiments, CSV output and calibration.

pub mod calibrate;
pub mod config;
pub mod csv;
pub mod experiment;
pub mod rng;
pub mod runner;
pub mod scenario;
pub mod summary;

pub use config::{Approach, FailureSpec, RoomSensorMode, ScenarioConfig, SensorSettings};
pub use experiment::{run_experiment, ExperimentOptions, ExperimentOutput};
pub use runner::{run_scenario, Event, RunOutput, SwitchError, TraceRow};
pub use summary::{summarize, summarize_file, Summary};
