//! DC power-flow and component-logic constraint blocks shared by every model.
//!
//! Energization enters each block as one affine expression per component
//! (flat order: buses, generators, lines), so the same code serves
//! first-stage `z`, second-stage `y` and fixed plans given as constants.
//! Line flow follows `P = s (θ_from − θ_to)` with `s` the line's susceptance
//! magnitude; a line leaves its from-bus and enters its to-bus.

use super::model::{Expr, LinearModel, Var};
use crate::case::{ComponentId, PowerCase};
use crate::error::{Error, Result};

/// Dispatch variables of one period.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodVars {
    pub t: usize,
    pub theta: Vec<Var>,
    pub flow: Vec<Var>,
    pub gen: Vec<Var>,
    pub served: Vec<Var>,
}

impl PeriodVars {
    pub fn add(model: &mut LinearModel, case: &PowerCase, t: usize, tag: &str) -> PeriodVars {
        let inf = f64::INFINITY;
        let theta = (0..case.n_buses())
            .map(|i| model.continuous(format!("{tag}theta[{i},{t}]"), -inf, inf))
            .collect();
        let flow = (0..case.n_lines())
            .map(|l| model.continuous(format!("{tag}pl[{l},{t}]"), -inf, inf))
            .collect();
        let gen = (0..case.n_generators())
            .map(|g| model.continuous(format!("{tag}pg[{g},{t}]"), -inf, inf))
            .collect();
        let served = (0..case.n_loads())
            .map(|d| model.continuous(format!("{tag}x[{d},{t}]"), 0.0, 1.0))
            .collect();
        PeriodVars { t, theta, flow, gen, served }
    }

    /// Weighted load shed `Σ_d w_d (1 − x_d)` of this period.
    pub fn shed_expr(&self, case: &PowerCase) -> Expr {
        let mut e = Expr::new();
        for (d, load) in case.network.loads.iter().enumerate() {
            e.constant += load.priority;
            e.push(self.served[d], -load.priority);
        }
        e
    }
}

fn check_len(on: &[Expr], case: &PowerCase) -> Result<()> {
    if on.len() != case.n_components() {
        return Err(Error::ModelBuild(format!(
            "energization expressions for {} components, case has {}",
            on.len(),
            case.n_components()
        )));
    }
    Ok(())
}

/// Big-M DC flow, thermal limits, nodal balance and generation limits.
pub fn build_flow_block(model: &mut LinearModel, case: &PowerCase, vars: &PeriodVars, on: &[Expr]) -> Result<Vec<usize>> {
    check_len(on, case)?;
    let t = vars.t;
    let env = &case.environment;
    let (lo, hi) = (env.angle_lower, env.angle_upper);
    let mut rows = Vec::new();
    for (l, line) in case.network.lines.iter().enumerate() {
        let (i, j) = case.line_ends(l);
        let s = line.susceptance;
        let z = &on[case.flat_index(ComponentId::line(l))];
        let p = vars.flow[l];
        // P − s(θi − θj) − s·θ̄·(1 − z) ≤ 0
        let base = Expr::var(p).add(vars.theta[i], -s).add(vars.theta[j], s);
        let upper = base.clone().with_constant(-s * hi).plus(z, s * hi);
        rows.push(model.add_le(format!("flow_up[{l},{t}]"), &upper, 0.0));
        let lower = base.with_constant(-s * lo).plus(z, s * lo);
        rows.push(model.add_ge(format!("flow_lo[{l},{t}]"), &lower, 0.0));
        let w = line.thermal_limit;
        rows.push(model.add_le(format!("therm_up[{l},{t}]"), &Expr::var(p).plus(z, -w), 0.0));
        rows.push(model.add_ge(format!("therm_lo[{l},{t}]"), &Expr::var(p).plus(z, w), 0.0));
    }
    let mut balance: Vec<Expr> = vec![Expr::new(); case.n_buses()];
    for g in 0..case.n_generators() {
        balance[case.gen_bus(g)].push(vars.gen[g], 1.0);
    }
    for l in 0..case.n_lines() {
        let (i, j) = case.line_ends(l);
        balance[i].push(vars.flow[l], -1.0);
        balance[j].push(vars.flow[l], 1.0);
    }
    for d in 0..case.n_loads() {
        let demand = case.demand(d, t)?;
        balance[case.load_bus(d)].push(vars.served[d], -demand);
    }
    for (i, e) in balance.iter().enumerate() {
        rows.push(model.add_eq(format!("balance[{i},{t}]"), e, 0.0));
    }
    for (g, gen) in case.network.generators.iter().enumerate() {
        let z = &on[case.flat_index(ComponentId::generator(g))];
        let pg = Expr::var(vars.gen[g]);
        rows.push(model.add_le(format!("gen_up[{g},{t}]"), &pg.clone().plus(z, -gen.p_max), 0.0));
        rows.push(model.add_ge(format!("gen_lo[{g},{t}]"), &pg.plus(z, -gen.p_min), 0.0));
    }
    Ok(rows)
}

/// A bus powers its loads, generators and lines: `on_i ≥ x_d`, `on_i ≥ on_g`,
/// `on_i ≥ on_l` for both line ends.
pub fn build_logic_block(model: &mut LinearModel, case: &PowerCase, vars: &PeriodVars, on: &[Expr]) -> Result<Vec<usize>> {
    check_len(on, case)?;
    let t = vars.t;
    let bus = |i: usize| &on[case.flat_index(ComponentId::bus(i))];
    let mut rows = Vec::new();
    for d in 0..case.n_loads() {
        let e = bus(case.load_bus(d)).clone().add(vars.served[d], -1.0);
        rows.push(model.add_ge(format!("load_logic[{d},{t}]"), &e, 0.0));
    }
    for g in 0..case.n_generators() {
        let e = bus(case.gen_bus(g)).clone().plus(&on[case.flat_index(ComponentId::generator(g))], -1.0);
        rows.push(model.add_ge(format!("gen_logic[{g},{t}]"), &e, 0.0));
    }
    for l in 0..case.n_lines() {
        let (i, j) = case.line_ends(l);
        let zl = &on[case.flat_index(ComponentId::line(l))];
        for (end, b) in [("from", i), ("to", j)] {
            let e = bus(b).clone().plus(zl, -1.0);
            rows.push(model.add_ge(format!("line_logic_{end}[{l},{t}]"), &e, 0.0));
        }
    }
    Ok(rows)
}

/// Constant energization (1 = on) for every component.
pub fn constant_on(values: &[f64]) -> Vec<Expr> {
    values.iter().map(|&v| Expr::constant(v)).collect()
}

pub fn var_on(vars: &[Var]) -> Vec<Expr> {
    vars.iter().map(|&v| Expr::var(v)).collect()
}
