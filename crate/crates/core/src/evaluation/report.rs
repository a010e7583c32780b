//! Out-of-sample cost of a fixed plan and the comparison table layout.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::case::PowerCase;
use crate::error::{Error, Result};
use crate::fire::DisruptionScenario;
use crate::milp::{SecondStageModel, ShutoffPlan, SolveLimits};

/// Tolerance used when checking that an evaluated plan is feasible.
const PLAN_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioCost {
    pub scenario: usize,
    pub tau: Option<usize>,
    pub probability: f64,
    /// Shed of the nominal plan before the disruption (whole horizon when benign).
    pub pre_shed: f64,
    pub post_shed: f64,
    pub damage: f64,
}

impl ScenarioCost {
    pub fn total(&self) -> f64 {
        self.pre_shed + self.post_shed + self.damage
    }

    pub fn is_disruptive(&self) -> bool {
        self.tau.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub tag: String,
    pub plan_hash: String,
    pub costs: Vec<ScenarioCost>,
    /// Probability mass of benign scenarios.
    pub nondisruptive_mass: f64,
    /// Conditional mean shed over benign scenarios.
    pub nondisruptive_shed: f64,
    /// Conditional mean shed (pre and post) over disruptive scenarios.
    pub disruptive_shed: f64,
    /// Conditional mean damage over disruptive scenarios.
    pub disruptive_damage: f64,
    pub g_n: f64,
    pub worst_case: f64,
    pub rri: Option<f64>,
}

/// `(g − g_ref) / g_ref`; zero when both vanish.
pub fn relative_improvement(g: f64, g_ref: f64) -> f64 {
    if g_ref.abs() <= f64::EPSILON {
        if g.abs() <= f64::EPSILON {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (g - g_ref) / g_ref
    }
}

impl EvaluationReport {
    pub fn from_costs(tag: impl Into<String>, plan_hash: impl Into<String>, costs: Vec<ScenarioCost>) -> Self {
        let mass = |f: &dyn Fn(&ScenarioCost) -> bool| costs.iter().filter(|c| f(c)).map(|c| c.probability).sum::<f64>();
        let weighted = |f: &dyn Fn(&ScenarioCost) -> f64, disruptive: bool| {
            costs
                .iter()
                .filter(|c| c.is_disruptive() == disruptive)
                .map(|c| c.probability * f(c))
                .sum::<f64>()
        };
        let benign = mass(&|c| !c.is_disruptive());
        let disrupted = mass(&|c| c.is_disruptive());
        let cond = |v: f64, m: f64| if m > 0.0 { v / m } else { 0.0 };
        let g_n = costs.iter().map(|c| c.probability * c.total()).sum();
        let worst_case = costs.iter().map(ScenarioCost::total).fold(f64::NEG_INFINITY, f64::max);
        EvaluationReport {
            tag: tag.into(),
            plan_hash: plan_hash.into(),
            nondisruptive_mass: benign,
            nondisruptive_shed: cond(weighted(&|c| c.pre_shed, false), benign),
            disruptive_shed: cond(weighted(&|c| c.pre_shed + c.post_shed, true), disrupted),
            disruptive_damage: cond(weighted(&|c| c.damage, true), disrupted),
            g_n,
            worst_case: if costs.is_empty() { 0.0 } else { worst_case },
            costs,
            rri: None,
        }
    }

    pub fn set_reference(&mut self, g_ref: f64) {
        self.rri = Some(relative_improvement(self.g_n, g_ref));
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn write_costs_csv(&self, w: impl Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["scenario", "tau", "probability", "pre_shed", "post_shed", "damage", "total"])?;
        for c in &self.costs {
            wtr.write_record([
                c.scenario.to_string(),
                c.tau.map_or_else(String::new, |t| t.to_string()),
                c.probability.to_string(),
                c.pre_shed.to_string(),
                c.post_shed.to_string(),
                c.damage.to_string(),
                c.total().to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Cost of `plan` under one scenario.
pub fn scenario_cost(
    case: &PowerCase,
    plan: &ShutoffPlan,
    index: usize,
    scen: &DisruptionScenario,
    limits: SolveLimits,
) -> Result<ScenarioCost> {
    let tau = scen.onset(case.horizon());
    let pre_shed = plan.shed_before(case, tau);
    let (post_shed, damage) = if scen.is_disruptive() {
        let mut sub = SecondStageModel::build(case, scen)?;
        let out = sub.value(&plan.anchor(tau), limits)?;
        (out.shed, out.damage)
    } else {
        (0.0, 0.0)
    };
    Ok(ScenarioCost { scenario: index, tau: scen.tau, probability: scen.probability, pre_shed, post_shed, damage })
}

/// Per-scenario cost breakdown of `plan`, evaluated in parallel.
pub fn evaluate_plan(
    case: &PowerCase,
    plan: &ShutoffPlan,
    scenarios: &[DisruptionScenario],
    tag: &str,
    limits: SolveLimits,
) -> Result<EvaluationReport> {
    if scenarios.is_empty() {
        return Err(Error::validation("evaluation needs at least one scenario"));
    }
    plan.validate(case, PLAN_TOL)?;
    let costs = scenarios
        .par_iter()
        .enumerate()
        .map(|(w, s)| scenario_cost(case, plan, w, s, limits))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvaluationReport::from_costs(tag, plan.schedule_hash(), costs))
}

/// One row of the plan comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub plan: String,
    pub nondisruptive_shed: f64,
    pub disruptive_shed: f64,
    pub disruptive_damage: f64,
    pub g_n: f64,
    pub rri: f64,
    pub worst_case: f64,
}

pub fn comparison_rows(reports: &[EvaluationReport], reference: &EvaluationReport) -> Vec<ComparisonRow> {
    reports
        .iter()
        .map(|r| ComparisonRow {
            plan: r.tag.clone(),
            nondisruptive_shed: r.nondisruptive_shed,
            disruptive_shed: r.disruptive_shed,
            disruptive_damage: r.disruptive_damage,
            g_n: r.g_n,
            rri: relative_improvement(r.g_n, reference.g_n),
            worst_case: r.worst_case,
        })
        .collect()
}

pub fn write_comparison_csv(rows: &[ComparisonRow], w: impl Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}
