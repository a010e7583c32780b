//! Linear-model layer, solver backend and the model builders.

pub mod backend;
pub mod extensive;
pub mod model;
pub mod network;
pub mod plan;
pub mod stage;

pub use backend::{backend_by_name, backend_from_env, solve, HighsBackend, SolveLimits, SolveResult, SolveStatus, SolverBackend, SOLVER_ENV};
pub use extensive::{build_extensive, solve_extensive, survival_weights, ExtensiveModel, ExtensiveSolution, ObjectiveMode};
pub use model::{Expr, LinearModel, Row, Var, VarType};
pub use network::{build_flow_block, build_logic_block, PeriodVars};
pub use plan::{dispatch_period, redispatch, ShutoffPlan};
pub use stage::{
    add_recourse, build_first_stage, lagrangian_value, second_stage_value, FirstStage, LagrangianPoint, Recourse,
    SecondStageModel, SecondStageOutcome,
};
