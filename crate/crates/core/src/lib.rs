//! Wildfire-aware de-energization planning for power transmission networks.
//!
//! The crate covers the whole pipeline: network cases, a UTM grid over the
//! network, cellular-automaton disruption scenarios, the two-stage
//! stochastic MILP with its decomposition, benchmark policies and
//! out-of-sample evaluation.

pub mod benchmarks;
pub mod case;
pub mod decomposition;
pub mod error;
pub mod evaluation;
pub mod fire;
pub mod geo;
pub mod milp;

pub use case::{load_case, save_case, ComponentId, ComponentKind, PowerCase};
pub use error::{Error, Result};

/// Scalar used by the geometry and probability helpers when instantiated.
pub type Real = f64;
/// UTM coordinates in the default scalar.
pub type UtmPointF = geo::UtmPoint<Real>;
