//! Wildfire disruption scenarios from a four-state cellular automaton.

pub mod env;
pub mod rng;
pub mod scenario;
pub mod simulate;

pub use env::{fault_probability, spread_probability, wind_factor, CellState, EnvLayers, Wind};
pub use rng::{derive_seed, Purpose, RngStream};
pub use scenario::{check_distribution, DisruptionScenario, ScenarioFile, ScenarioHeader, SCENARIO_FILE_VERSION};
pub use simulate::{ignition_prob, EndogenousOutcome, ExogenousOutcome, SimulationMask, Simulator};
