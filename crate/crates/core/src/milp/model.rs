//! Solver-independent linear model: bounded variables, range rows, a linear
//! objective with optional diagonal quadratic part, and warm-start hints.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Var(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarType {
    Continuous,
    Binary,
}

/// Affine expression `Σ a_i x_i + constant`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Expr {
    pub terms: Vec<(Var, f64)>,
    pub constant: f64,
}

impl Expr {
    pub fn new() -> Self {
        Expr::default()
    }

    pub fn constant(c: f64) -> Self {
        Expr { terms: Vec::new(), constant: c }
    }

    pub fn var(v: Var) -> Self {
        Expr { terms: vec![(v, 1.0)], constant: 0.0 }
    }

    pub fn term(v: Var, a: f64) -> Self {
        Expr { terms: vec![(v, a)], constant: 0.0 }
    }

    pub fn add(mut self, v: Var, a: f64) -> Self {
        self.push(v, a);
        self
    }

    pub fn push(&mut self, v: Var, a: f64) {
        if a != 0.0 {
            self.terms.push((v, a));
        }
    }

    pub fn add_expr(&mut self, other: &Expr, scale: f64) {
        for &(v, a) in &other.terms {
            self.push(v, a * scale);
        }
        self.constant += other.constant * scale;
    }

    pub fn plus(mut self, other: &Expr, scale: f64) -> Self {
        self.add_expr(other, scale);
        self
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.constant += c;
        self
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(v, a)| a * x[v.0]).sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub coeffs: Vec<(Var, f64)>,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearModel {
    pub names: Vec<String>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub kind: Vec<VarType>,
    pub objective: Vec<f64>,
    /// Diagonal of the quadratic objective term `½ Σ q_i x_i²`.
    pub quadratic: Vec<f64>,
    pub objective_constant: f64,
    pub rows: Vec<Row>,
    pub hints: Vec<Option<f64>>,
}

impl LinearModel {
    pub fn new() -> Self {
        LinearModel::default()
    }

    pub fn n_vars(&self) -> usize {
        self.names.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64, kind: VarType) -> Var {
        let (lower, upper) = match kind {
            VarType::Binary => (lower.max(0.0), upper.min(1.0)),
            VarType::Continuous => (lower, upper),
        };
        self.names.push(name.into());
        self.lower.push(lower);
        self.upper.push(upper);
        self.kind.push(kind);
        self.objective.push(0.0);
        self.quadratic.push(0.0);
        self.hints.push(None);
        Var(self.names.len() - 1)
    }

    pub fn continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> Var {
        self.add_var(name, lower, upper, VarType::Continuous)
    }

    pub fn binary(&mut self, name: impl Into<String>) -> Var {
        self.add_var(name, 0.0, 1.0, VarType::Binary)
    }

    pub fn fix(&mut self, v: Var, value: f64) {
        self.lower[v.0] = value;
        self.upper[v.0] = value;
    }

    pub fn set_bounds(&mut self, v: Var, lower: f64, upper: f64) {
        self.lower[v.0] = lower;
        self.upper[v.0] = upper;
    }

    pub fn hint(&mut self, v: Var, value: f64) {
        self.hints[v.0] = Some(value);
    }

    /// Hints every variable from a full solution vector.
    pub fn hint_all(&mut self, x: &[f64]) {
        for (h, &v) in self.hints.iter_mut().zip(x) {
            *h = Some(v);
        }
    }

    pub fn clear_hints(&mut self) {
        self.hints.iter_mut().for_each(|h| *h = None);
    }

    pub fn set_objective(&mut self, v: Var, c: f64) {
        self.objective[v.0] = c;
    }

    /// Adds `scale · e` to the objective.
    /// Replaces the linear objective and its constant by `e`.
    pub fn set_objective_expr(&mut self, e: &Expr) {
        self.objective.iter_mut().for_each(|c| *c = 0.0);
        self.objective_constant = 0.0;
        self.add_objective(e, 1.0);
    }

    pub fn add_objective(&mut self, e: &Expr, scale: f64) {
        for &(v, a) in &e.terms {
            self.objective[v.0] += a * scale;
        }
        self.objective_constant += e.constant * scale;
    }

    pub fn set_quadratic(&mut self, v: Var, q: f64) {
        self.quadratic[v.0] = q;
    }

    /// Adds `lower ≤ e ≤ upper`; the constant of `e` moves to the bounds.
    pub fn add_range(&mut self, name: impl Into<String>, e: &Expr, lower: f64, upper: f64) -> usize {
        let mut coeffs: Vec<(Var, f64)> = Vec::with_capacity(e.terms.len());
        for &(v, a) in &e.terms {
            match coeffs.iter_mut().find(|(w, _)| *w == v) {
                Some(slot) => slot.1 += a,
                None => coeffs.push((v, a)),
            }
        }
        coeffs.retain(|(_, a)| *a != 0.0);
        self.rows.push(Row {
            name: name.into(),
            coeffs,
            lower: lower - e.constant,
            upper: upper - e.constant,
        });
        self.rows.len() - 1
    }

    pub fn add_le(&mut self, name: impl Into<String>, e: &Expr, rhs: f64) -> usize {
        self.add_range(name, e, f64::NEG_INFINITY, rhs)
    }

    pub fn add_ge(&mut self, name: impl Into<String>, e: &Expr, rhs: f64) -> usize {
        self.add_range(name, e, rhs, f64::INFINITY)
    }

    pub fn add_eq(&mut self, name: impl Into<String>, e: &Expr, rhs: f64) -> usize {
        self.add_range(name, e, rhs, rhs)
    }

    pub fn is_mip(&self) -> bool {
        self.kind.iter().any(|k| *k == VarType::Binary)
    }

    pub fn is_quadratic(&self) -> bool {
        self.quadratic.iter().any(|q| *q != 0.0)
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective_constant
            + self.objective.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
            + 0.5 * self.quadratic.iter().zip(x).map(|(q, v)| q * v * v).sum::<f64>()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_vars();
        for (i, (&lo, &hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi {
                return Err(Error::ModelBuild(format!("variable {}: invalid bounds [{lo}, {hi}]", self.names[i])));
            }
        }
        for r in &self.rows {
            if let Some((v, _)) = r.coeffs.iter().find(|(v, a)| v.0 >= n || !a.is_finite()) {
                return Err(Error::ModelBuild(format!("row {}: bad reference to column {}", r.name, v.0)));
            }
            if r.lower.is_nan() || r.upper.is_nan() {
                return Err(Error::ModelBuild(format!("row {}: NaN bound", r.name)));
            }
        }
        if self.quadratic.iter().any(|q| *q < 0.0) {
            return Err(Error::ModelBuild("quadratic objective must be convex".into()));
        }
        Ok(())
    }

    /// Maximum violation of bounds, rows and integrality at `x`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n_vars() {
            worst = worst.max(self.lower[i] - x[i]).max(x[i] - self.upper[i]);
            if self.kind[i] == VarType::Binary {
                worst = worst.max((x[i] - x[i].round()).abs());
            }
        }
        for r in &self.rows {
            let a: f64 = r.coeffs.iter().map(|&(v, c)| c * x[v.0]).sum();
            worst = worst.max(r.lower - a).max(a - r.upper);
        }
        worst
    }

    /// CPLEX LP text rendering, for debugging.
    pub fn to_lp_string(&self) -> String {
        let name = |v: Var| sanitize(&self.names[v.0], v.0);
        let mut s = String::from("\\ generated model\nMinimize\n obj:");
        let mut any = false;
        for (i, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                let _ = write!(s, " {} {} {}", sign(c), c.abs(), name(Var(i)));
                any = true;
            }
        }
        if self.is_quadratic() {
            s.push_str(" + [");
            for (i, &q) in self.quadratic.iter().enumerate() {
                if q != 0.0 {
                    let _ = write!(s, " + {} {} ^2", q, name(Var(i)));
                }
            }
            s.push_str(" ] / 2");
            any = true;
        }
        if !any {
            s.push_str(" 0");
        }
        if self.objective_constant != 0.0 {
            let _ = write!(s, " {} {}", sign(self.objective_constant), self.objective_constant.abs());
        }
        s.push_str("\nSubject To\n");
        for (k, r) in self.rows.iter().enumerate() {
            let mut lhs = String::new();
            for &(v, a) in &r.coeffs {
                let _ = write!(lhs, " {} {} {}", sign(a), a.abs(), name(v));
            }
            if lhs.is_empty() {
                lhs.push_str(" 0 ");
                lhs.push_str(&name(Var(0)));
            }
            let rn = sanitize(&r.name, k);
            if r.lower == r.upper {
                let _ = writeln!(s, " {rn}:{lhs} = {}", r.upper);
            } else {
                if r.lower.is_finite() {
                    let _ = writeln!(s, " {rn}_lo:{lhs} >= {}", r.lower);
                }
                if r.upper.is_finite() {
                    let _ = writeln!(s, " {rn}_up:{lhs} <= {}", r.upper);
                }
            }
        }
        s.push_str("Bounds\n");
        for i in 0..self.n_vars() {
            let (lo, hi) = (self.lower[i], self.upper[i]);
            let n = name(Var(i));
            match (lo.is_finite(), hi.is_finite()) {
                (false, false) => {
                    let _ = writeln!(s, " {n} free");
                }
                (true, true) => {
                    let _ = writeln!(s, " {lo} <= {n} <= {hi}");
                }
                (true, false) => {
                    let _ = writeln!(s, " {n} >= {lo}");
                }
                (false, true) => {
                    let _ = writeln!(s, " -inf <= {n} <= {hi}");
                }
            }
        }
        let bins: Vec<String> = (0..self.n_vars())
            .filter(|&i| self.kind[i] == VarType::Binary)
            .map(|i| name(Var(i)))
            .collect();
        if !bins.is_empty() {
            s.push_str("Binaries\n");
            for b in bins {
                let _ = writeln!(s, " {b}");
            }
        }
        s.push_str("End\n");
        s
    }
}

fn sign(a: f64) -> char {
    if a < 0.0 {
        '-'
    } else {
        '+'
    }
}

fn sanitize(name: &str, index: usize) -> String {
    let cleaned: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '.' { c } else { '_' })
        .collect();
    if cleaned.is_empty() || cleaned.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        format!("v{index}_{cleaned}")
    } else {
        cleaned
    }
}
