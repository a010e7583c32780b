//! Comparison policies: deterministic, wait-and-see, risk-based and robust.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::case::PowerCase;
use crate::error::{Error, Result};
use crate::evaluation::scenario_cost;
use crate::fire::DisruptionScenario;
use crate::milp::{
    build_extensive, build_first_stage, redispatch, solve, solve_extensive, Expr, FirstStage, LinearModel,
    ObjectiveMode, ShutoffPlan, SolveLimits,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", content = "alpha", rename_all = "lowercase")]
pub enum BenchmarkTag {
    Det,
    Ws,
    Rb(f64),
    Ro,
}

impl fmt::Display for BenchmarkTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchmarkTag::Det => write!(f, "det"),
            BenchmarkTag::Ws => write!(f, "ws"),
            BenchmarkTag::Rb(a) => write!(f, "rb({a:.1})"),
            BenchmarkTag::Ro => write!(f, "ro"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkResult {
    pub tag: BenchmarkTag,
    /// Nominal plan, or one plan per scenario for wait-and-see.
    pub plans: Vec<ShutoffPlan>,
    /// Optimal value of the benchmark's own objective.
    pub objective: f64,
    pub bound: f64,
    pub seconds: f64,
    /// Per-scenario optima (wait-and-see only).
    pub scenario_values: Vec<f64>,
    /// `Σ p^ω g^{ws,ω}` (wait-and-see only).
    pub ws_value: Option<f64>,
    /// Scenarios in the final appended subset (robust only).
    pub subset: Vec<usize>,
    pub iterations: usize,
}

impl BenchmarkResult {
    fn single(tag: BenchmarkTag, plan: ShutoffPlan, objective: f64, bound: f64, seconds: f64) -> Self {
        BenchmarkResult {
            tag,
            plans: vec![plan],
            objective,
            bound,
            seconds,
            scenario_values: Vec::new(),
            ws_value: None,
            subset: Vec::new(),
            iterations: 1,
        }
    }

    /// The nominal plan (the first per-scenario plan for wait-and-see).
    pub fn plan(&self) -> &ShutoffPlan {
        &self.plans[0]
    }
}

/// Second lexicographic stage shared by the single-plan models: among plans
/// within `tol` of the optimum, keep as many components energized as long
/// as possible.
fn keep_energized(model: &mut LinearModel, first: &FirstStage, objective: &Expr, optimum: f64) -> Expr {
    let tol = 1e-7 * optimum.abs().max(1.0);
    model.add_le("optimality", objective, optimum + tol);
    let mut on = Expr::new();
    for zc in &first.z {
        for &v in zc {
            on.push(v, -1.0);
        }
    }
    on
}

fn solve_lexicographic(
    case: &PowerCase,
    mut model: LinearModel,
    first: &FirstStage,
    objective: Expr,
    limits: SolveLimits,
    context: &str,
) -> Result<(f64, f64, ShutoffPlan, f64)> {
    let start = Instant::now();
    model.set_objective_expr(&objective);
    let r = solve(&model, limits)?.require_solution(context)?;
    let tie = keep_energized(&mut model, first, &objective, r.objective);
    model.set_objective_expr(&tie);
    model.hint_all(&r.values);
    let r2 = solve(&model, limits)?.require_solution(context)?;
    let plan = redispatch(case, &ShutoffPlan::from_solution(case, first, &r2.values))?;
    Ok((r.objective, r.bound, plan, start.elapsed().as_secs_f64()))
}

/// Load-shed minimization over the whole horizon, ignoring fire.
pub fn solve_deterministic(case: &PowerCase, limits: SolveLimits) -> Result<BenchmarkResult> {
    let mut model = LinearModel::new();
    let first = build_first_stage(&mut model, case)?;
    let mut objective = Expr::new();
    for p in &first.periods {
        objective.add_expr(&p.shed_expr(case), 1.0);
    }
    let (obj, bound, plan, seconds) = solve_lexicographic(case, model, &first, objective, limits, "deterministic model")?;
    info!("det: objective {obj:.4}");
    Ok(BenchmarkResult::single(BenchmarkTag::Det, plan, obj, bound, seconds))
}

/// Per-scenario optimum with the disruption known in advance.
pub fn solve_wait_and_see(
    case: &PowerCase,
    scenarios: &[DisruptionScenario],
    limits: SolveLimits,
) -> Result<BenchmarkResult> {
    if scenarios.is_empty() {
        return Err(Error::validation("wait-and-see needs at least one scenario"));
    }
    let start = Instant::now();
    let solved = scenarios
        .par_iter()
        .map(|s| {
            let one = [DisruptionScenario { probability: 1.0, ..s.clone() }];
            solve_extensive(case, &one, ObjectiveMode::Expectation, limits)
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = solved.iter().map(|s| s.objective).collect();
    let ws: f64 = scenarios.iter().zip(&values).map(|(s, v)| s.probability * v).sum();
    let bound: f64 = scenarios.iter().zip(&solved).map(|(s, v)| s.probability * v.bound).sum();
    info!("ws: expected value {ws:.4}");
    Ok(BenchmarkResult {
        tag: BenchmarkTag::Ws,
        plans: solved.into_iter().map(|s| s.plan).collect(),
        objective: ws,
        bound,
        seconds: start.elapsed().as_secs_f64(),
        scenario_values: values,
        ws_value: Some(ws),
        subset: Vec::new(),
        iterations: 1,
    })
}

/// Mean size of the endogenous fire each component starts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskTable {
    /// `r[c][t-1]`.
    pub r: Vec<Vec<f64>>,
    pub r_tot: f64,
    pub d_tot: f64,
}

impl RiskTable {
    pub fn get(&self, c: usize, t: usize) -> f64 {
        self.r[c][t - 1]
    }
}

/// `R_ct = (1/|Ω|) Σ_ω |I_c^ω| u_c^ω`, the same in every period.
pub fn compute_risk_table(case: &PowerCase, scenarios: &[DisruptionScenario]) -> RiskTable {
    let t_max = case.horizon();
    let mut per = vec![0.0; case.n_components()];
    for s in scenarios {
        for &c in &s.faults {
            per[c] += s.impact.get(&c).map_or(0, Vec::len) as f64;
        }
    }
    let n = scenarios.len().max(1) as f64;
    let r: Vec<Vec<f64>> = per.iter().map(|v| vec![v / n; t_max]).collect();
    let r_tot = r.iter().flatten().sum();
    let d_tot = (0..case.n_loads())
        .flat_map(|d| (1..=t_max).map(move |t| (d, t)))
        .map(|(d, t)| case.demand(d, t).unwrap_or(0.0))
        .sum();
    RiskTable { r, r_tot, d_tot }
}

/// Weighted trade-off between energized risk and served load.
pub fn solve_risk_based(case: &PowerCase, risk: &RiskTable, alpha: f64, limits: SolveLimits) -> Result<BenchmarkResult> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::validation(format!("alpha {alpha} outside [0, 1]")));
    }
    if alpha > 0.0 && risk.r_tot <= 0.0 {
        return Err(Error::validation("total wildfire risk is zero; the risk term cannot be normalized"));
    }
    if alpha < 1.0 && risk.d_tot <= 0.0 {
        return Err(Error::validation("total demand is zero; the load term cannot be normalized"));
    }
    if risk.r.len() != case.n_components() {
        return Err(Error::validation("risk table does not match the case"));
    }
    let mut model = LinearModel::new();
    let first = build_first_stage(&mut model, case)?;
    let mut objective = Expr::new();
    for t in 1..=case.horizon() {
        if alpha > 0.0 {
            for (c, zc) in first.z.iter().enumerate() {
                objective.push(zc[t - 1], alpha * risk.get(c, t) / risk.r_tot);
            }
        }
        if alpha < 1.0 {
            for (d, load) in case.network.loads.iter().enumerate() {
                let w = (1.0 - alpha) * load.priority * case.demand(d, t)? / risk.d_tot;
                objective.push(first.period(t).served[d], -w);
            }
        }
    }
    let (obj, bound, plan, seconds) = solve_lexicographic(case, model, &first, objective, limits, "risk-based model")?;
    info!("rb({alpha}): objective {obj:.6}");
    Ok(BenchmarkResult::single(BenchmarkTag::Rb(alpha), plan, obj, bound, seconds))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustOptions {
    /// Starting subset; defaults to the scenario with the largest
    /// wait-and-see cost.
    pub seed_subset: Option<Vec<usize>>,
    pub max_iterations: usize,
    pub limits: SolveLimits,
    pub eval_limits: SolveLimits,
}

impl Default for RobustOptions {
    fn default() -> Self {
        RobustOptions { seed_subset: None, max_iterations: 100, limits: SolveLimits::EXACT, eval_limits: SolveLimits::EXACT }
    }
}

/// Worst-case plan by scenario appending. Returns the incumbent with its
/// certificate gap when the iteration limit is reached.
pub fn solve_robust(case: &PowerCase, scenarios: &[DisruptionScenario], opts: &RobustOptions) -> Result<BenchmarkResult> {
    if scenarios.is_empty() {
        return Err(Error::validation("robust model needs at least one scenario"));
    }
    let start = Instant::now();
    let mut subset = match &opts.seed_subset {
        Some(s) if !s.is_empty() => {
            if s.iter().any(|&w| w >= scenarios.len()) {
                return Err(Error::validation("robust seed subset references a missing scenario"));
            }
            s.clone()
        }
        _ => {
            let ws = solve_wait_and_see(case, scenarios, opts.limits)?;
            let worst = ws
                .scenario_values
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(w, _)| w)
                .expect("nonempty");
            vec![worst]
        }
    };
    let mut iterations = 0;
    loop {
        iterations += 1;
        let picked: Vec<DisruptionScenario> = subset.iter().map(|&w| scenarios[w].clone()).collect();
        let ext = build_extensive(case, &picked, ObjectiveMode::EpigraphWorstCase)?;
        let (r, raw) = ext.solve(case, opts.limits)?;
        let plan = redispatch(case, &raw)?;
        let costs = scenarios
            .par_iter()
            .enumerate()
            .map(|(w, s)| scenario_cost(case, &plan, w, s, opts.eval_limits).map(|c| c.total()))
            .collect::<Result<Vec<_>>>()?;
        let (worst, worst_cost) = costs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(w, c)| (w, *c))
            .expect("nonempty");
        let tol = 1e-6 * worst_cost.abs().max(1.0);
        let done = subset.contains(&worst) || worst_cost <= r.objective + tol;
        info!("ro iteration {iterations}: subset {} worst {worst_cost:.4} epigraph {:.4}", subset.len(), r.objective);
        if done || iterations >= opts.max_iterations {
            if !done {
                log::warn!(
                    "robust appending stopped at the iteration limit: worst {worst_cost:.4}, bound {:.4}",
                    r.bound
                );
            }
            let mut out = BenchmarkResult::single(BenchmarkTag::Ro, plan, worst_cost, r.bound, start.elapsed().as_secs_f64());
            out.subset = subset;
            out.iterations = iterations;
            return Ok(out);
        }
        subset.push(worst);
    }
}

/// Risk-based plans for every `α` in `alphas`.
pub fn alpha_sweep(case: &PowerCase, risk: &RiskTable, alphas: &[f64], limits: SolveLimits) -> Result<Vec<BenchmarkResult>> {
    alphas.iter().map(|&a| solve_risk_based(case, risk, a, limits)).collect()
}

/// Default sweep `0.0, 0.1, …, 0.9`.
pub fn default_alphas() -> Vec<f64> {
    (0..10).map(|k| k as f64 / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub case_hash: String,
    pub results: Vec<BenchmarkResult>,
    /// Failures of individual benchmarks, by tag.
    pub failures: Vec<(String, String)>,
}

impl BenchmarkReport {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn write_summary_csv(&self, w: impl Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["model", "objective", "bound", "seconds", "iterations", "subset_size"])?;
        for r in &self.results {
            wtr.write_record([
                r.tag.to_string(),
                r.objective.to_string(),
                r.bound.to_string(),
                r.seconds.to_string(),
                r.iterations.to_string(),
                r.subset.len().to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}
