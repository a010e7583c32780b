//! Nominal shut-off plans and fixed-plan redispatch.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::backend::{solve, SolveLimits};
use super::model::LinearModel;
use super::network::{build_flow_block, build_logic_block, constant_on, PeriodVars};
use super::stage::FirstStage;
use crate::case::{ComponentId, ComponentKind, PowerCase};
use crate::error::{Error, Result};

/// First-stage schedule. `z[c][t]` covers t = 0..=T with `z[c][0] = 1`;
/// dispatch vectors are indexed `[element][t − 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShutoffPlan {
    pub horizon: usize,
    pub z: Vec<Vec<u8>>,
    pub served: Vec<Vec<f64>>,
    pub theta: Vec<Vec<f64>>,
    pub flow: Vec<Vec<f64>>,
    pub generation: Vec<Vec<f64>>,
}

impl ShutoffPlan {
    /// Every component energized, nothing dispatched.
    pub fn all_on(case: &PowerCase) -> Self {
        let t = case.horizon();
        let zeros = |n: usize| vec![vec![0.0; t]; n];
        ShutoffPlan {
            horizon: t,
            z: vec![vec![1; t + 1]; case.n_components()],
            served: zeros(case.n_loads()),
            theta: zeros(case.n_buses()),
            flow: zeros(case.n_lines()),
            generation: zeros(case.n_generators()),
        }
    }

    /// Builds a plan from a schedule of off-periods: component `c` is
    /// energized through period `off[c] − 1` (`off = T + 1` keeps it on).
    pub fn from_off_periods(case: &PowerCase, off: &[usize]) -> Self {
        let mut plan = ShutoffPlan::all_on(case);
        for (c, &k) in off.iter().enumerate() {
            for t in 1..=plan.horizon {
                plan.z[c][t] = u8::from(t < k);
            }
        }
        plan
    }

    /// Inverse of [`ShutoffPlan::from_off_periods`]: the first period each
    /// component is off, or `T + 1`.
    pub fn off_periods(&self) -> Vec<usize> {
        self.z
            .iter()
            .map(|zc| (1..=self.horizon).find(|&t| zc[t] == 0).unwrap_or(self.horizon + 1))
            .collect()
    }

    pub fn from_solution(case: &PowerCase, fs: &FirstStage, x: &[f64]) -> Self {
        let t_max = case.horizon();
        let mut plan = ShutoffPlan::all_on(case);
        for (c, zc) in fs.z.iter().enumerate() {
            for t in 1..=t_max {
                plan.z[c][t] = u8::from(x[zc[t - 1].0] > 0.5);
            }
        }
        for (k, p) in fs.periods.iter().enumerate() {
            for d in 0..case.n_loads() {
                plan.served[d][k] = x[p.served[d].0];
            }
            for i in 0..case.n_buses() {
                plan.theta[i][k] = x[p.theta[i].0];
            }
            for l in 0..case.n_lines() {
                plan.flow[l][k] = x[p.flow[l].0];
            }
            for g in 0..case.n_generators() {
                plan.generation[g][k] = x[p.gen[g].0];
            }
        }
        plan
    }

    pub fn energized(&self, c: usize, t: usize) -> bool {
        self.z[c][t] == 1
    }

    /// State vector `z_{·,t}` as floats.
    pub fn state(&self, t: usize) -> Vec<f64> {
        self.z.iter().map(|zc| zc[t] as f64).collect()
    }

    /// State inherited by a scenario with onset `tau`.
    pub fn anchor(&self, tau: usize) -> Vec<f64> {
        self.state(tau - 1)
    }

    pub fn period_shed(&self, case: &PowerCase, t: usize) -> f64 {
        case.network
            .loads
            .iter()
            .enumerate()
            .map(|(d, l)| l.priority * (1.0 - self.served[d][t - 1]))
            .sum()
    }

    /// Shed cost over periods `1..tau`.
    pub fn shed_before(&self, case: &PowerCase, tau: usize) -> f64 {
        (1..tau.min(self.horizon + 1)).map(|t| self.period_shed(case, t)).sum()
    }

    pub fn off_count(&self, t: usize) -> usize {
        self.z.iter().filter(|zc| zc[t] == 0).count()
    }

    /// Components of `kind` de-energized at period `t`.
    pub fn off_components(&self, case: &PowerCase, t: usize, kind: ComponentKind) -> Vec<usize> {
        (0..self.z.len())
            .filter(|&c| self.z[c][t] == 0)
            .map(|c| case.component_at(c))
            .filter(|id| id.kind == kind)
            .map(|id| id.index)
            .collect()
    }

    /// Hash of the shut-off schedule only.
    pub fn schedule_hash(&self) -> String {
        let mut h = Sha256::new();
        for zc in &self.z {
            h.update(zc);
        }
        hex::encode(&h.finalize()[..8])
    }

    /// Checks monotonicity, component logic and (to `tol`) the dispatch.
    pub fn validate(&self, case: &PowerCase, tol: f64) -> Result<()> {
        let t_max = case.horizon();
        if self.horizon != t_max || self.z.len() != case.n_components() {
            return Err(Error::validation("plan dimensions do not match the case"));
        }
        for (c, zc) in self.z.iter().enumerate() {
            if zc.len() != t_max + 1 || zc[0] != 1 {
                return Err(Error::validation(format!("component {c}: schedule must start energized")));
            }
            if zc.windows(2).any(|w| w[1] > w[0]) {
                return Err(Error::validation(format!("component {c}: re-energized after shut-off")));
            }
        }
        let mut model = LinearModel::new();
        let mut x = Vec::new();
        for t in 1..=t_max {
            let vars = PeriodVars::add(&mut model, case, t, "");
            let on = constant_on(&self.state(t));
            build_flow_block(&mut model, case, &vars, &on)?;
            build_logic_block(&mut model, case, &vars, &on)?;
            x.resize(model.n_vars(), 0.0);
            let k = t - 1;
            for i in 0..case.n_buses() {
                x[vars.theta[i].0] = self.theta[i][k];
            }
            for l in 0..case.n_lines() {
                x[vars.flow[l].0] = self.flow[l][k];
            }
            for g in 0..case.n_generators() {
                x[vars.gen[g].0] = self.generation[g][k];
            }
            for d in 0..case.n_loads() {
                x[vars.served[d].0] = self.served[d][k];
            }
        }
        let v = model.violation(&x);
        if v > tol {
            return Err(Error::validation(format!("plan violates first-stage constraints by {v:.3e}")));
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Minimum-shed dispatch of period `t` with energization fixed to `on`.
pub fn dispatch_period(case: &PowerCase, t: usize, on: &[f64]) -> Result<(f64, Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
    let mut model = LinearModel::new();
    let vars = PeriodVars::add(&mut model, case, t, "");
    let on = constant_on(on);
    build_flow_block(&mut model, case, &vars, &on)?;
    build_logic_block(&mut model, case, &vars, &on)?;
    model.add_objective(&vars.shed_expr(case), 1.0);
    let r = solve(&model, SolveLimits::EXACT)?.require_solution("dispatch")?;
    let pick = |vs: &[crate::milp::Var]| vs.iter().map(|v| r.values[v.0]).collect::<Vec<_>>();
    Ok((r.objective, pick(&vars.served), pick(&vars.theta), pick(&vars.flow), pick(&vars.gen)))
}

/// Re-optimizes every period's dispatch for minimum shed at the plan's
/// fixed energization. Never increases any period's shed.
pub fn redispatch(case: &PowerCase, plan: &ShutoffPlan) -> Result<ShutoffPlan> {
    let mut out = plan.clone();
    for t in 1..=case.horizon() {
        let (_, x, th, fl, pg) = dispatch_period(case, t, &plan.state(t))?;
        let k = t - 1;
        for d in 0..case.n_loads() {
            out.served[d][k] = x[d];
        }
        for i in 0..case.n_buses() {
            out.theta[i][k] = th[i];
        }
        for l in 0..case.n_lines() {
            out.flow[l][k] = fl[l];
        }
        for g in 0..case.n_generators() {
            out.generation[g][k] = pg[g];
        }
    }
    Ok(out)
}

/// Component count by kind de-energized at `t`, for reporting.
pub fn off_summary(case: &PowerCase, plan: &ShutoffPlan, t: usize) -> [usize; 3] {
    let mut out = [0; 3];
    for c in 0..case.n_components() {
        if plan.z[c][t] == 0 {
            let k = match case.component_at(c) {
                ComponentId { kind: ComponentKind::Bus, .. } => 0,
                ComponentId { kind: ComponentKind::Generator, .. } => 1,
                ComponentId { kind: ComponentKind::Line, .. } => 2,
            };
            out[k] += 1;
        }
    }
    out
}
