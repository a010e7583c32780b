//! Extensive forms: one MILP with shared first-stage variables and a
//! recourse block per disrupted scenario.

use serde::{Deserialize, Serialize};

use super::backend::{solve, SolveLimits, SolveResult};
use super::model::{Expr, LinearModel, Var};
use super::plan::{redispatch, ShutoffPlan};
use super::stage::{add_recourse, build_first_stage, FirstStage, Recourse};
use crate::case::PowerCase;
use crate::error::{Error, Result};
use crate::fire::DisruptionScenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveMode {
    Expectation,
    EpigraphWorstCase,
}

#[derive(Debug, Clone)]
pub struct ExtensiveModel {
    pub model: LinearModel,
    pub first: FirstStage,
    pub recourse: Vec<Option<Recourse>>,
    /// Total cost expression of every scenario.
    pub scenario_cost: Vec<Expr>,
    pub epigraph: Option<Var>,
}

/// Probability that the plan is still being executed in period `t`, i.e.
/// `Σ_{ω: τ^ω > t} p^ω`.
pub fn survival_weights(case: &PowerCase, scenarios: &[DisruptionScenario]) -> Vec<f64> {
    let t_max = case.horizon();
    (1..=t_max)
        .map(|t| {
            scenarios
                .iter()
                .filter(|s| s.onset(t_max) > t)
                .map(|s| s.probability)
                .sum()
        })
        .collect()
}

pub fn build_extensive(case: &PowerCase, scenarios: &[DisruptionScenario], mode: ObjectiveMode) -> Result<ExtensiveModel> {
    if scenarios.is_empty() {
        return Err(Error::ModelBuild("extensive form needs at least one scenario".into()));
    }
    let t_max = case.horizon();
    let mut model = LinearModel::new();
    let first = build_first_stage(&mut model, case)?;
    let mut recourse = Vec::with_capacity(scenarios.len());
    let mut scenario_cost = Vec::with_capacity(scenarios.len());
    for (w, s) in scenarios.iter().enumerate() {
        let tau = s.onset(t_max);
        let mut cost = Expr::new();
        for t in 1..tau {
            cost.add_expr(&first.period(t).shed_expr(case), 1.0);
        }
        if s.is_disruptive() {
            let anchor = first.state_exprs(tau - 1);
            let r = add_recourse(&mut model, case, s, &anchor, &format!("s{w}_"))?;
            cost.add_expr(&r.cost(), 1.0);
            recourse.push(Some(r));
        } else {
            recourse.push(None);
        }
        scenario_cost.push(cost);
    }
    let epigraph = match mode {
        ObjectiveMode::Expectation => {
            for (s, cost) in scenarios.iter().zip(&scenario_cost) {
                model.add_objective(cost, s.probability);
            }
            None
        }
        ObjectiveMode::EpigraphWorstCase => {
            let phi = model.continuous("worst", 0.0, f64::INFINITY);
            model.set_objective(phi, 1.0);
            for (w, cost) in scenario_cost.iter().enumerate() {
                let e = Expr::var(phi).plus(cost, -1.0);
                model.add_ge(format!("epi[{w}]"), &e, 0.0);
            }
            Some(phi)
        }
    };
    Ok(ExtensiveModel { model, first, recourse, scenario_cost, epigraph })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtensiveSolution {
    pub objective: f64,
    pub bound: f64,
    /// Plan as returned by the solver, before redispatch.
    pub raw_plan: ShutoffPlan,
    pub plan: ShutoffPlan,
    pub seconds: f64,
}

impl ExtensiveModel {
    pub fn solve(&self, case: &PowerCase, limits: SolveLimits) -> Result<(SolveResult, ShutoffPlan)> {
        let r = solve(&self.model, limits)?.require_solution("extensive form")?;
        let plan = ShutoffPlan::from_solution(case, &self.first, &r.values);
        Ok((r, plan))
    }
}

/// Builds and solves the extensive form; the returned plan is redispatched.
pub fn solve_extensive(
    case: &PowerCase,
    scenarios: &[DisruptionScenario],
    mode: ObjectiveMode,
    limits: SolveLimits,
) -> Result<ExtensiveSolution> {
    let ext = build_extensive(case, scenarios, mode)?;
    let (r, raw_plan) = ext.solve(case, limits)?;
    let plan = redispatch(case, &raw_plan)?;
    Ok(ExtensiveSolution { objective: r.objective, bound: r.bound, raw_plan, plan, seconds: r.seconds })
}
