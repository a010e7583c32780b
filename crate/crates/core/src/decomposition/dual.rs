//! Lagrangian dual of the nonanticipativity copy: proximal Kelley for the
//! plain Lagrangian cut and row generation for the square-minimization cut.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::milp::{solve, Expr, LagrangianPoint, LinearModel, SecondStageModel, SolveLimits, SolveStatus};

/// A point `(Q_k, z_k)` returned by a Lagrangian subproblem. For any anchor
/// `ẑ`, `R(ẑ, λ) ≤ Q_k + λ·(ẑ − z_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualPoint {
    pub base: f64,
    pub z: Vec<f64>,
}

impl DualPoint {
    pub fn gradient(&self, anchor: &[f64]) -> Vec<f64> {
        anchor.iter().zip(&self.z).map(|(a, z)| a - z).collect()
    }

    pub fn value(&self, anchor: &[f64], lambda: &[f64]) -> f64 {
        self.base + lambda.iter().zip(anchor.iter().zip(&self.z)).map(|(l, (a, z))| l * (a - z)).sum::<f64>()
    }
}

/// Per-scenario cache of subproblem points and of anchors already visited.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DualState {
    pub points: Vec<DualPoint>,
    /// Visited anchors with their second-stage value.
    pub anchors: Vec<(Vec<f64>, f64)>,
    pub best_lambda: Vec<f64>,
}

impl DualState {
    fn add(&mut self, p: &LagrangianPoint) {
        let point = DualPoint { base: p.base, z: p.z.clone() };
        if !self.points.contains(&point) {
            self.points.push(point);
        }
    }

    pub fn cached_value(&self, anchor: &[f64]) -> Option<f64> {
        self.anchors.iter().find(|(a, _)| a == anchor).map(|(_, f)| *f)
    }

    /// Upper model `min_k Q_k + λ·(ẑ − z_k)` of the dual function.
    pub fn model_value(&self, anchor: &[f64], lambda: &[f64]) -> f64 {
        self.points
            .iter()
            .map(|p| p.value(anchor, lambda))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualOptions {
    /// Absolute optimality tolerance of the dual.
    pub tol: f64,
    pub max_iterations: usize,
    /// Initial proximal weight, relative to `1 / max(1, f̂)`.
    pub mu0: f64,
    pub limits: SolveLimits,
}

impl Default for DualOptions {
    fn default() -> Self {
        DualOptions { tol: 1e-6, max_iterations: 200, mu0: 1.0, limits: SolveLimits::EXACT }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualResult {
    pub lambda: Vec<f64>,
    /// Proven lower bound on `R(ẑ, λ)`: a valid cut intercept.
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn evaluate(
    sub: &mut SecondStageModel,
    state: &mut DualState,
    anchor: &[f64],
    lambda: &[f64],
    limits: SolveLimits,
) -> Result<f64> {
    let p = sub.lagrangian(anchor, lambda, limits)?;
    state.add(&p);
    Ok(p.bound)
}

/// Maximizes `R(ẑ, ·)` by proximal cutting planes from `λ = 0`. Stops once
/// the value reaches `target − tol` (the dual optimum equals `f^ω(ẑ)` at
/// binary anchors) or the model predicts no further gain.
pub fn solve_dual(
    sub: &mut SecondStageModel,
    state: &mut DualState,
    anchor: &[f64],
    target: f64,
    opts: &DualOptions,
) -> Result<DualResult> {
    let n = anchor.len();
    let mut center = vec![0.0; n];
    let mut center_value = evaluate(sub, state, anchor, &center, opts.limits)?;
    let mut mu = opts.mu0 / target.abs().max(1.0);
    let mu_floor = mu * 1e-9;
    let mut iterations = 1;
    let mut converged = center_value >= target - opts.tol;
    while !converged && iterations < opts.max_iterations {
        let (cand, predicted) = match proximal_step(state, anchor, &center, mu)? {
            Some(step) => step,
            None => break,
        };
        if predicted - center_value <= opts.tol {
            converged = true;
            break;
        }
        let value = evaluate(sub, state, anchor, &cand, opts.limits)?;
        iterations += 1;
        if value >= center_value + 0.1 * (predicted - center_value) {
            center = cand;
            center_value = value;
        } else {
            mu = (mu * 0.5).max(mu_floor);
        }
        converged = center_value >= target - opts.tol;
    }
    state.best_lambda = center.clone();
    Ok(DualResult { lambda: center, value: center_value, iterations, converged })
}

/// `max t − μ/2 ‖λ − λc‖²` over the cached linearizations.
fn proximal_step(state: &DualState, anchor: &[f64], center: &[f64], mu: f64) -> Result<Option<(Vec<f64>, f64)>> {
    let n = anchor.len();
    let mut m = LinearModel::new();
    let lam: Vec<_> = (0..n)
        .map(|c| m.continuous(format!("lambda[{c}]"), f64::NEG_INFINITY, f64::INFINITY))
        .collect();
    let t = m.continuous("t", f64::NEG_INFINITY, f64::INFINITY);
    m.set_objective(t, -1.0);
    for (c, &v) in lam.iter().enumerate() {
        m.set_quadratic(v, mu);
        m.set_objective(v, -mu * center[c]);
    }
    m.objective_constant = 0.5 * mu * center.iter().map(|x| x * x).sum::<f64>();
    for (k, p) in state.points.iter().enumerate() {
        let mut e = Expr::var(t);
        for (c, g) in p.gradient(anchor).into_iter().enumerate() {
            e.push(lam[c], -g);
        }
        m.add_le(format!("lin[{k}]"), &e, p.base);
    }
    let r = solve(&m, SolveLimits::EXACT)?;
    if r.status != SolveStatus::Optimal {
        return Ok(None);
    }
    let cand: Vec<f64> = lam.iter().map(|v| r.values[v.0]).collect();
    let predicted = state.model_value(anchor, &cand);
    Ok(Some((cand, predicted)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmcResult {
    pub lambda: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// `false` when row generation failed and the caller should fall back
    /// to the plain Lagrangian cut.
    pub success: bool,
}

/// Minimum-norm multiplier with `R(ẑ, λ) ≥ (1 − δ) f̂`, by row generation
/// over the cached linearizations.
pub fn solve_smc(
    sub: &mut SecondStageModel,
    state: &mut DualState,
    anchor: &[f64],
    target_value: f64,
    delta: f64,
    opts: &DualOptions,
) -> Result<SmcResult> {
    let n = anchor.len();
    let zero = vec![0.0; n];
    let r0 = evaluate(sub, state, anchor, &zero, opts.limits)?;
    let target = (1.0 - delta) * target_value;
    if r0 >= target || target_value <= opts.tol {
        return Ok(SmcResult { lambda: zero, value: r0, iterations: 1, success: true });
    }
    let margin = if delta > 0.0 { 1e-3 * delta * target_value } else { 0.0 };
    let mut iterations = 1;
    while iterations < opts.max_iterations {
        let mut m = LinearModel::new();
        let lam: Vec<_> = (0..n)
            .map(|c| m.continuous(format!("lambda[{c}]"), f64::NEG_INFINITY, f64::INFINITY))
            .collect();
        for &v in &lam {
            m.set_quadratic(v, 2.0);
        }
        for (k, p) in state.points.iter().enumerate() {
            let mut e = Expr::constant(p.base);
            for (c, g) in p.gradient(anchor).into_iter().enumerate() {
                e.push(lam[c], g);
            }
            m.add_ge(format!("level[{k}]"), &e, target + margin);
        }
        let r = solve(&m, SolveLimits::EXACT)?;
        if r.status != SolveStatus::Optimal {
            return Ok(SmcResult { lambda: zero, value: r0, iterations, success: false });
        }
        let cand: Vec<f64> = lam.iter().map(|v| r.values[v.0]).collect();
        let before = state.points.len();
        let value = evaluate(sub, state, anchor, &cand, opts.limits)?;
        iterations += 1;
        if value >= target {
            return Ok(SmcResult { lambda: cand, value, iterations, success: true });
        }
        if state.points.len() == before {
            // No new linearization: the QP cannot move any further.
            break;
        }
    }
    Ok(SmcResult { lambda: zero, value: r0, iterations, success: false })
}
