//! Backend abstraction and the HiGHS implementation.

use std::num::NonZeroU32;
use std::time::Instant;

use highs::{ColProblem, HessianFormat, HighsModelStatus, Sense};
use serde::{Deserialize, Serialize};

use super::model::{LinearModel, VarType};
use crate::error::{Error, Result};

/// Environment variable selecting the solver backend.
pub const SOLVER_ENV: &str = "PSPS_SOLVER";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveLimits {
    /// Relative MIP gap.
    pub gap: f64,
    /// Wall-clock limit in seconds.
    pub time: Option<f64>,
}

impl SolveLimits {
    /// Near-exact limits for subproblems whose values feed cuts.
    pub const EXACT: SolveLimits = SolveLimits { gap: 1e-9, time: None };
    pub const SUBPROBLEM: SolveLimits = SolveLimits { gap: 1e-6, time: None };
    pub const EXTENSIVE: SolveLimits = SolveLimits { gap: 1e-2, time: None };

    pub fn with_gap(gap: f64) -> Self {
        SolveLimits { gap, time: None }
    }
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits::SUBPROBLEM
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    /// A feasible point with the reported relative gap.
    Feasible(f64),
    Infeasible,
    Unbounded,
    /// A limit stopped the solver before any feasible point was found.
    Limit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub objective: f64,
    /// Proven lower bound (equals `objective` for LPs and QPs).
    pub bound: f64,
    pub values: Vec<f64>,
    pub seconds: f64,
}

impl SolveResult {
    pub fn has_solution(&self) -> bool {
        matches!(self.status, SolveStatus::Optimal | SolveStatus::Feasible(_))
    }

    /// Fails unless the solve produced a point.
    pub fn require_solution(self, context: &str) -> Result<SolveResult> {
        if self.has_solution() {
            Ok(self)
        } else {
            Err(Error::solver(format!("{context}: solver returned {:?}", self.status)))
        }
    }

    pub fn gap(&self) -> f64 {
        match self.status {
            SolveStatus::Optimal => 0.0,
            SolveStatus::Feasible(g) => g,
            _ => f64::INFINITY,
        }
    }
}

pub trait SolverBackend: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, model: &LinearModel, limits: SolveLimits) -> Result<SolveResult>;
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HighsBackend {
    /// Threads per solve; parallelism normally comes from solving many
    /// models at once.
    pub threads: u32,
    pub seed: i32,
}

impl HighsBackend {
    pub fn new() -> Self {
        HighsBackend { threads: 1, seed: 0 }
    }
}

/// Backend named by `PSPS_SOLVER` (default `highs`).
pub fn backend_from_env() -> Result<Box<dyn SolverBackend>> {
    let name = std::env::var(SOLVER_ENV).unwrap_or_else(|_| "highs".into());
    backend_by_name(&name)
}

pub fn backend_by_name(name: &str) -> Result<Box<dyn SolverBackend>> {
    match name.to_ascii_lowercase().as_str() {
        "highs" | "" => Ok(Box::new(HighsBackend::new())),
        other => Err(Error::validation(format!("unknown solver backend '{other}' (available: highs)"))),
    }
}

/// Solves with the default backend.
pub fn solve(model: &LinearModel, limits: SolveLimits) -> Result<SolveResult> {
    HighsBackend::new().solve(model, limits)
}

impl SolverBackend for HighsBackend {
    fn name(&self) -> &'static str {
        "highs"
    }

    fn solve(&self, model: &LinearModel, limits: SolveLimits) -> Result<SolveResult> {
        model.validate()?;
        let start = Instant::now();
        let n = model.n_vars();
        if n == 0 {
            let feasible = model.rows.iter().all(|r| r.lower <= 1e-9 && r.upper >= -1e-9);
            return Ok(SolveResult {
                status: if feasible { SolveStatus::Optimal } else { SolveStatus::Infeasible },
                objective: model.objective_constant,
                bound: model.objective_constant,
                values: Vec::new(),
                seconds: 0.0,
            });
        }

        let mut pb = ColProblem::new();
        let rows: Vec<_> = model.rows.iter().map(|r| pb.add_row(r.lower..=r.upper)).collect();
        let mut columns: Vec<Vec<(highs::Row, f64)>> = vec![Vec::new(); n];
        for (k, r) in model.rows.iter().enumerate() {
            for &(v, a) in &r.coeffs {
                columns[v.0].push((rows[k], a));
            }
        }
        let mip = model.is_mip() && !model.is_quadratic();
        for (i, col) in columns.into_iter().enumerate() {
            let (lo, hi) = (model.lower[i], model.upper[i]);
            let integer = mip && model.kind[i] == VarType::Binary;
            pb.add_column_with_integrality(model.objective[i], lo..=hi, col, integer);
        }
        let mut m = pb
            .try_optimise(Sense::Minimise)
            .map_err(|e| Error::solver(format!("HiGHS rejected the model: {e:?}")))?;
        m.make_quiet();
        m.set_threads(NonZeroU32::new(self.threads.max(1)).unwrap());
        m.set_option("random_seed", self.seed);
        m.set_option("mip_rel_gap", limits.gap.max(0.0));
        m.set_option("mip_abs_gap", 1e-9);
        if let Some(t) = limits.time {
            m.set_option("time_limit", t.max(0.0));
        }
        if model.is_quadratic() {
            if model.is_mip() {
                return Err(Error::solver("mixed-integer quadratic models are not supported"));
            }
            let cols = model
                .quadratic
                .iter()
                .enumerate()
                .map(|(i, &q)| if q != 0.0 { vec![(i as i32, q)] } else { Vec::new() });
            m.try_pass_hessian(HessianFormat::Triangular, cols)
                .map_err(|e| Error::solver(e.to_string()))?;
        }
        if mip && model.hints.iter().any(Option::is_some) {
            let start: Vec<f64> = (0..n)
                .map(|i| {
                    let h = model.hints[i].unwrap_or(if model.lower[i].is_finite() { model.lower[i] } else { 0.0 });
                    h.clamp(model.lower[i], model.upper[i])
                })
                .collect();
            let _ = m.try_set_solution(Some(&start), None, None, None);
        }

        let solved = m.try_solve().map_err(|e| Error::solver(format!("HiGHS failed: {e:?}")))?;
        let status = solved.status();
        let seconds = start.elapsed().as_secs_f64();
        let has_point = matches!(
            solved.primal_solution_status(),
            highs::HighsSolutionStatus::Feasible
        );
        let mut values = if has_point || status == HighsModelStatus::Optimal {
            solved.get_solution().columns().to_vec()
        } else {
            Vec::new()
        };
        for (i, v) in values.iter_mut().enumerate() {
            if model.kind[i] == VarType::Binary && mip {
                *v = v.round();
            }
        }
        let objective = if values.is_empty() {
            f64::NAN
        } else {
            solved.objective_value() + model.objective_constant
        };
        let bound = if mip {
            solved
                .double_info_value(c"mip_dual_bound")
                .map(|b| b + model.objective_constant)
                .unwrap_or(f64::NEG_INFINITY)
        } else {
            objective
        };
        let status = match status {
            HighsModelStatus::Optimal => SolveStatus::Optimal,
            HighsModelStatus::ModelEmpty => SolveStatus::Optimal,
            HighsModelStatus::Infeasible => SolveStatus::Infeasible,
            HighsModelStatus::Unbounded | HighsModelStatus::UnboundedOrInfeasible => SolveStatus::Unbounded,
            HighsModelStatus::ReachedTimeLimit
            | HighsModelStatus::ReachedIterationLimit
            | HighsModelStatus::ReachedSolutionLimit
            | HighsModelStatus::ReachedInterrupt
            | HighsModelStatus::ReachedMemoryLimit
            | HighsModelStatus::ObjectiveBound
            | HighsModelStatus::ObjectiveTarget => {
                if values.is_empty() {
                    SolveStatus::Limit
                } else {
                    let gap = (objective - bound).abs() / objective.abs().max(1e-10);
                    SolveStatus::Feasible(gap)
                }
            }
            other => return Err(Error::solver(format!("HiGHS returned status {other:?}"))),
        };
        Ok(SolveResult { status, objective, bound: bound.min(objective), values, seconds })
    }
}
