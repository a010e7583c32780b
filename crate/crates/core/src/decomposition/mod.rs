//! Cutting-plane decomposition with Lagrangian and square-minimization cuts.

pub mod dual;
pub mod master;
pub mod run;

pub use dual::{solve_dual, solve_smc, DualOptions, DualPoint, DualResult, DualState, SmcResult};
pub use master::{build_master, Cut, CutKind, MasterModel};
pub use run::{
    lc_cut, relative_gap, run, run_from, smc_cut, BoundsEntry, BoundsLog, Checkpoint, DecompositionOptions,
    DecompositionResult,
};
