//! Cuts and the lower-approximation master problem.

use serde::{Deserialize, Serialize};

use crate::case::PowerCase;
use crate::error::{Error, Result};
use crate::fire::DisruptionScenario;
use crate::milp::{build_first_stage, survival_weights, Expr, FirstStage, LinearModel, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutKind {
    Lc,
    Smc,
}

/// `V^ω ≥ v + λ·(z_{τ−1} − ẑ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub scenario: usize,
    pub tau: usize,
    pub lambda: Vec<f64>,
    pub intercept: f64,
    pub anchor: Vec<f64>,
    pub iteration: usize,
    pub kind: CutKind,
}

impl Cut {
    pub fn value_at(&self, z: &[f64]) -> f64 {
        self.intercept
            + self
                .lambda
                .iter()
                .zip(z.iter().zip(&self.anchor))
                .map(|(l, (a, b))| l * (a - b))
                .sum::<f64>()
    }
}

#[derive(Debug, Clone)]
pub struct MasterModel {
    pub model: LinearModel,
    pub first: FirstStage,
    /// Value-function approximation per scenario (`None` without disruption).
    pub v: Vec<Option<Var>>,
}

impl MasterModel {
    pub fn add_cut(&mut self, cut: &Cut) -> Result<()> {
        let v = self.v.get(cut.scenario).copied().flatten().ok_or_else(|| {
            Error::ModelBuild(format!("cut references scenario {} without a value variable", cut.scenario))
        })?;
        let mut e = Expr::var(v);
        let mut rhs = cut.intercept;
        for (c, &l) in cut.lambda.iter().enumerate() {
            rhs -= l * cut.anchor[c];
            e.add_expr(&self.first.z_expr(c, cut.tau - 1), -l);
        }
        let k = self.model.n_rows();
        self.model.add_ge(format!("cut[{k}]"), &e, rhs);
        Ok(())
    }
}

/// First-stage constraints, `V^ω ≥ 0` and the cut pool. The objective is
/// the expected pre-disruption shed plus `Σ p^ω V^ω`.
pub fn build_master(case: &PowerCase, scenarios: &[DisruptionScenario], cuts: &[Cut]) -> Result<MasterModel> {
    let mut model = LinearModel::new();
    let first = build_first_stage(&mut model, case)?;
    let weights = survival_weights(case, scenarios);
    for (k, w) in weights.iter().enumerate() {
        if *w > 0.0 {
            model.add_objective(&first.periods[k].shed_expr(case), *w);
        }
    }
    let v = scenarios
        .iter()
        .enumerate()
        .map(|(w, s)| {
            s.is_disruptive().then(|| {
                let var = model.continuous(format!("V[{w}]"), 0.0, f64::INFINITY);
                model.set_objective(var, s.probability);
                var
            })
        })
        .collect();
    let mut master = MasterModel { model, first, v };
    for cut in cuts {
        master.add_cut(cut)?;
    }
    Ok(master)
}
