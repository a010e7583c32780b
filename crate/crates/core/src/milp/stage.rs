//! First-stage planning variables and the post-disruption recourse model.

use serde::{Deserialize, Serialize};

use super::backend::{solve, SolveLimits, SolveResult};
use super::model::{Expr, LinearModel, Var};
use super::network::{build_flow_block, build_logic_block, var_on, PeriodVars};
use crate::case::PowerCase;
use crate::error::{Error, Result};
use crate::fire::DisruptionScenario;

/// Shut-off plan variables over the whole horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstStage {
    /// `z[c][t-1]` for t = 1..=T.
    pub z: Vec<Vec<Var>>,
    pub periods: Vec<PeriodVars>,
}

impl FirstStage {
    /// Energization of component `c` at the end of period `t`; period 0 is
    /// the all-energized starting state.
    pub fn z_expr(&self, c: usize, t: usize) -> Expr {
        if t == 0 {
            Expr::constant(1.0)
        } else {
            Expr::var(self.z[c][t - 1])
        }
    }

    pub fn state_exprs(&self, t: usize) -> Vec<Expr> {
        (0..self.z.len()).map(|c| self.z_expr(c, t)).collect()
    }

    pub fn period(&self, t: usize) -> &PeriodVars {
        &self.periods[t - 1]
    }
}

/// Adds `z`, dispatch, flow, logic and monotonicity constraints for all periods.
pub fn build_first_stage(model: &mut LinearModel, case: &PowerCase) -> Result<FirstStage> {
    let horizon = case.horizon();
    let z: Vec<Vec<Var>> = (0..case.n_components())
        .map(|c| (1..=horizon).map(|t| model.binary(format!("z[{c},{t}]"))).collect())
        .collect();
    let mut periods = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        let vars = PeriodVars::add(model, case, t, "");
        let on: Vec<Var> = z.iter().map(|zc| zc[t - 1]).collect();
        let on = var_on(&on);
        build_flow_block(model, case, &vars, &on)?;
        build_logic_block(model, case, &vars, &on)?;
        periods.push(vars);
    }
    for (c, zc) in z.iter().enumerate() {
        for t in 1..horizon {
            model.add_ge(format!("mono[{c},{t}]"), &Expr::var(zc[t - 1]).add(zc[t], -1.0), 0.0);
        }
    }
    Ok(FirstStage { z, periods })
}

/// Recourse variables of one disrupted scenario from `τ` to `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct Recourse {
    pub tau: usize,
    pub y: Vec<Var>,
    pub eta: Vec<Var>,
    pub periods: Vec<PeriodVars>,
    /// Post-disruption shed cost.
    pub shed: Expr,
    /// Damage cost `Σ r_c η_c`.
    pub damage: Expr,
}

impl Recourse {
    pub fn cost(&self) -> Expr {
        self.shed.clone().plus(&self.damage, 1.0)
    }
}

/// Adds the recourse block of a disrupted scenario. `anchor[c]` is the
/// shut-off state the scenario inherits (`z_{c,τ−1}` or a local copy).
pub fn add_recourse(
    model: &mut LinearModel,
    case: &PowerCase,
    scen: &DisruptionScenario,
    anchor: &[Expr],
    tag: &str,
) -> Result<Recourse> {
    let tau = scen
        .tau
        .ok_or_else(|| Error::ModelBuild("recourse requested for a scenario without disruption".into()))?;
    let n = case.n_components();
    if anchor.len() != n {
        return Err(Error::ModelBuild("anchor length differs from component count".into()));
    }
    let y: Vec<Var> = (0..n).map(|c| model.binary(format!("{tag}y[{c}]"))).collect();
    let eta: Vec<Var> = (0..n).map(|c| model.binary(format!("{tag}eta[{c}]"))).collect();
    let on = var_on(&y);
    let mut periods = Vec::new();
    let mut shed = Expr::new();
    for t in tau..=case.horizon() {
        let vars = PeriodVars::add(model, case, t, tag);
        build_flow_block(model, case, &vars, &on)?;
        build_logic_block(model, case, &vars, &on)?;
        shed.add_expr(&vars.shed_expr(case), 1.0);
        periods.push(vars);
    }
    for c in 0..n {
        model.add_le(format!("{tag}keep_off[{c}]"), &Expr::var(y[c]).plus(&anchor[c], -1.0), 0.0);
        model.add_le(format!("{tag}damaged[{c}]"), &Expr::var(y[c]).add(eta[c], 1.0), 1.0);
    }
    for &c in &scen.exogenous {
        model.set_bounds(eta[c], 1.0, 1.0);
    }
    for &c in &scen.faults {
        let reach = scen
            .impact
            .get(&c)
            .ok_or_else(|| Error::ModelBuild(format!("fault at component {c} without impact set")))?;
        for &k in reach {
            let e = Expr::var(eta[k]).plus(&anchor[c], -1.0);
            model.add_ge(format!("{tag}ignite[{c},{k}]"), &e, 0.0);
        }
    }
    let mut damage = Expr::new();
    for (c, &e) in eta.iter().enumerate() {
        damage.push(e, case.damage_cost(case.component_at(c)));
    }
    Ok(Recourse { tau, y, eta, periods, shed, damage })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondStageOutcome {
    pub objective: f64,
    /// Proven lower bound on the objective.
    pub bound: f64,
    pub shed: f64,
    pub damage: f64,
    pub z: Vec<f64>,
    pub y: Vec<f64>,
    pub eta: Vec<f64>,
    /// Served fraction `x[d][t − τ]` for t = τ..=T.
    pub served: Vec<Vec<f64>>,
}

/// Second-stage model with a free binary local copy `z^ω` of the state.
#[derive(Debug, Clone)]
pub struct SecondStageModel {
    pub model: LinearModel,
    pub copy: Vec<Var>,
    pub recourse: Recourse,
}

impl SecondStageModel {
    pub fn build(case: &PowerCase, scen: &DisruptionScenario) -> Result<Self> {
        let mut model = LinearModel::new();
        let copy: Vec<Var> = (0..case.n_components()).map(|c| model.binary(format!("zc[{c}]"))).collect();
        let recourse = add_recourse(&mut model, case, scen, &var_on(&copy), "")?;
        model.add_objective(&recourse.cost(), 1.0);
        Ok(SecondStageModel { model, copy, recourse })
    }

    fn outcome(&self, r: &SolveResult, penalty: f64) -> SecondStageOutcome {
        let x = &r.values;
        let pick = |vs: &[Var]| vs.iter().map(|v| x[v.0]).collect::<Vec<_>>();
        let served = (0..self.recourse.periods.first().map_or(0, |p| p.served.len()))
            .map(|d| self.recourse.periods.iter().map(|p| x[p.served[d].0]).collect())
            .collect();
        let shed = self.recourse.shed.value(x);
        let damage = self.recourse.damage.value(x);
        SecondStageOutcome {
            objective: r.objective - penalty,
            bound: r.bound - penalty,
            shed,
            damage,
            z: pick(&self.copy),
            y: pick(&self.recourse.y),
            eta: pick(&self.recourse.eta),
            served,
        }
    }

    /// `f^ω(ẑ)`: the local copy is fixed to `anchor`.
    pub fn value(&mut self, anchor: &[f64], limits: SolveLimits) -> Result<SecondStageOutcome> {
        self.reset_lagrangian();
        for (c, &v) in self.copy.iter().zip(anchor) {
            self.model.fix(*c, v.round());
        }
        let r = solve(&self.model, limits)?.require_solution("second-stage subproblem")?;
        let out = self.outcome(&r, 0.0);
        self.warm_start(&r.values);
        Ok(out)
    }

    /// Lagrangian relaxation `R^ω(ẑ, λ)` with the copy free.
    pub fn lagrangian(&mut self, anchor: &[f64], lambda: &[f64], limits: SolveLimits) -> Result<LagrangianPoint> {
        for (i, c) in self.copy.iter().enumerate() {
            self.model.set_bounds(*c, 0.0, 1.0);
            self.model.set_objective(*c, -lambda[i]);
        }
        self.model.objective_constant = self.recourse.cost().constant
            + lambda.iter().zip(anchor).map(|(l, z)| l * z).sum::<f64>();
        let r = solve(&self.model, limits)?.require_solution("Lagrangian subproblem")?;
        let z: Vec<f64> = self.copy.iter().map(|v| r.values[v.0]).collect();
        let subgradient: Vec<f64> = anchor.iter().zip(&z).map(|(a, b)| a - b).collect();
        let penalty: f64 = lambda.iter().zip(&subgradient).map(|(l, g)| l * g).sum();
        self.warm_start(&r.values);
        Ok(LagrangianPoint {
            value: r.objective,
            bound: r.bound,
            base: r.objective - penalty,
            z,
            subgradient,
        })
    }

    fn reset_lagrangian(&mut self) {
        for c in &self.copy {
            self.model.set_objective(*c, 0.0);
        }
        self.model.objective_constant = self.recourse.cost().constant;
    }

    fn warm_start(&mut self, x: &[f64]) {
        for (i, &v) in x.iter().enumerate() {
            self.model.hints[i] = Some(v);
        }
    }
}

/// One evaluation of the Lagrangian relaxation.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianPoint {
    /// Objective of the returned point.
    pub value: f64,
    /// Proven lower bound on `R^ω(ẑ, λ)`.
    pub bound: f64,
    /// Second-stage cost of the returned point, i.e. the intercept of the
    /// linearization `base + g·λ` that over-estimates `R^ω(ẑ, ·)`.
    pub base: f64,
    pub z: Vec<f64>,
    pub subgradient: Vec<f64>,
}

/// Solves the second stage with the state fixed at `anchor`.
pub fn second_stage_value(
    case: &PowerCase,
    scen: &DisruptionScenario,
    anchor: &[f64],
    limits: SolveLimits,
) -> Result<SecondStageOutcome> {
    SecondStageModel::build(case, scen)?.value(anchor, limits)
}

/// Evaluates `R^ω(ẑ, λ)`; see [`SecondStageModel::lagrangian`].
pub fn lagrangian_value(
    case: &PowerCase,
    scen: &DisruptionScenario,
    anchor: &[f64],
    lambda: &[f64],
    limits: SolveLimits,
) -> Result<LagrangianPoint> {
    SecondStageModel::build(case, scen)?.lagrangian(anchor, lambda, limits)
}
