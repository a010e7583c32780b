//! Sample-average-approximation bounds, probability sensitivity and the
//! exogenous/endogenous interaction experiment.

use std::io::Write;
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::report::{evaluate_plan, EvaluationReport};
use crate::case::PowerCase;
use crate::decomposition::{run, DecompositionOptions};
use crate::error::{Error, Result};
use crate::fire::{derive_seed, DisruptionScenario, SimulationMask, Simulator};
use crate::milp::{ShutoffPlan, SolveLimits};

/// Draws `n` scenarios from the seed it is given.
pub type Sampler<'s> = dyn Fn(usize, u64) -> Result<Vec<DisruptionScenario>> + Sync + 's;

/// Seed tag of the common evaluation set.
pub const EVAL_SEED_TAG: u64 = u64::MAX;

/// Mean and 95% Student-t half-width. The half-width is NaN for fewer than
/// two samples.
pub fn t_interval(values: &[f64]) -> (f64, f64) {
    let k = values.len();
    if k == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / k as f64;
    if k < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    let t = StudentsT::new(0.0, 1.0, (k - 1) as f64)
        .map(|d| d.inverse_cdf(0.975))
        .unwrap_or(f64::NAN);
    (mean, t * (var / k as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaaOptions {
    pub sizes: Vec<usize>,
    pub replicates: usize,
    pub eval_n: usize,
    pub seed: u64,
    pub decomposition: DecompositionOptions,
    pub eval_limits: SolveLimits,
}

impl Default for SaaOptions {
    fn default() -> Self {
        SaaOptions {
            sizes: vec![20, 50, 100, 200],
            replicates: 20,
            eval_n: 1000,
            seed: 0,
            decomposition: DecompositionOptions::default(),
            eval_limits: SolveLimits::EXACT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaaCell {
    pub size: usize,
    pub replicate: usize,
    /// Proven lower bound of the sampled problem.
    pub lower: f64,
    /// Out-of-sample cost of the sampled plan on the common set.
    pub upper: f64,
    pub converged: bool,
    pub seconds: f64,
    pub plan_hash: String,
    pub error: Option<String>,
}

impl SaaCell {
    pub fn ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaaSummary {
    pub size: usize,
    pub completed: usize,
    pub lower_mean: f64,
    pub lower_half_width: f64,
    pub lower_min: f64,
    pub lower_max: f64,
    pub upper_mean: f64,
    pub upper_half_width: f64,
    pub upper_min: f64,
    pub upper_max: f64,
    pub gap_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaaStudy {
    pub sizes: Vec<usize>,
    pub replicates: usize,
    pub eval_n: usize,
    pub seed: u64,
    pub cells: Vec<SaaCell>,
    pub summary: Vec<SaaSummary>,
    /// Replicate of the largest size with the lowest out-of-sample cost.
    pub best: Option<(usize, usize)>,
    pub best_plan: Option<ShutoffPlan>,
}

fn summarize(size: usize, cells: &[&SaaCell]) -> SaaSummary {
    let ok: Vec<&&SaaCell> = cells.iter().filter(|c| c.ok()).collect();
    let lo: Vec<f64> = ok.iter().map(|c| c.lower).collect();
    let up: Vec<f64> = ok.iter().map(|c| c.upper).collect();
    let (lower_mean, lower_half_width) = t_interval(&lo);
    let (upper_mean, upper_half_width) = t_interval(&up);
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    SaaSummary {
        size,
        completed: ok.len(),
        lower_mean,
        lower_half_width,
        lower_min: min(&lo),
        lower_max: max(&lo),
        upper_mean,
        upper_half_width,
        upper_min: min(&up),
        upper_max: max(&up),
        gap_mean: upper_mean - lower_mean,
    }
}

/// Runs every (size, replicate) cell. Replicate `r` draws from the same
/// seed at every size, so sample sets are nested across sizes.
pub fn saa_study(case: &PowerCase, sampler: &Sampler<'_>, opts: &SaaOptions) -> Result<SaaStudy> {
    if opts.sizes.is_empty() || opts.sizes.contains(&0) {
        return Err(Error::validation("sample sizes must be a nonempty list of positive counts"));
    }
    if opts.replicates < 2 {
        return Err(Error::validation("at least two replicates are needed for a confidence interval"));
    }
    let eval = sampler(opts.eval_n, derive_seed(opts.seed, EVAL_SEED_TAG))?;
    let jobs: Vec<(usize, usize)> = opts
        .sizes
        .iter()
        .flat_map(|&n| (0..opts.replicates).map(move |r| (n, r)))
        .collect();
    let results: Vec<(SaaCell, Option<ShutoffPlan>)> = jobs
        .par_iter()
        .map(|&(size, replicate)| {
            let start = Instant::now();
            let outcome = sampler(size, derive_seed(opts.seed, replicate as u64)).and_then(|scens| {
                let r = run(case, &scens, &opts.decomposition)?;
                let rep = evaluate_plan(case, &r.plan, &eval, "saa", opts.eval_limits)?;
                Ok((r, rep))
            });
            let seconds = start.elapsed().as_secs_f64();
            match outcome {
                Ok((r, rep)) => {
                    info!("saa n={size} r={replicate}: lower {:.4} upper {:.4}", r.lower, rep.g_n);
                    let cell = SaaCell {
                        size,
                        replicate,
                        lower: r.lower,
                        upper: rep.g_n,
                        converged: r.converged,
                        seconds,
                        plan_hash: r.plan.schedule_hash(),
                        error: None,
                    };
                    (cell, Some(r.plan))
                }
                Err(e) => {
                    warn!("saa n={size} r={replicate} failed: {e}");
                    let cell = SaaCell {
                        size,
                        replicate,
                        lower: f64::NAN,
                        upper: f64::NAN,
                        converged: false,
                        seconds,
                        plan_hash: String::new(),
                        error: Some(e.to_string()),
                    };
                    (cell, None)
                }
            }
        })
        .collect();
    let summary = opts
        .sizes
        .iter()
        .map(|&n| {
            let cells: Vec<&SaaCell> = results.iter().map(|(c, _)| c).filter(|c| c.size == n).collect();
            summarize(n, &cells)
        })
        .collect();
    let largest = *opts.sizes.iter().max().expect("nonempty sizes");
    let best = results
        .iter()
        .filter(|(c, p)| c.size == largest && c.ok() && p.is_some())
        .min_by(|a, b| a.0.upper.total_cmp(&b.0.upper));
    let (best_id, best_plan) = match best {
        Some((c, p)) => (Some((c.size, c.replicate)), p.clone()),
        None => (None, None),
    };
    Ok(SaaStudy {
        sizes: opts.sizes.clone(),
        replicates: opts.replicates,
        eval_n: opts.eval_n,
        seed: opts.seed,
        cells: results.into_iter().map(|(c, _)| c).collect(),
        summary,
        best: best_id,
        best_plan,
    })
}

impl SaaStudy {
    pub fn write_summary_csv(&self, w: impl Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        for s in &self.summary {
            wtr.serialize(s)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Collapses every benign scenario into one `ω₀` and moves `delta` mass
/// onto it, rescaling the disruptive scenarios proportionally (uniformly
/// when they start out equiprobable). `ω₀` is returned first.
pub fn reweight(base: &[DisruptionScenario], delta: f64) -> Result<Vec<DisruptionScenario>> {
    let p0: f64 = base.iter().filter(|s| !s.is_disruptive()).map(|s| s.probability).sum();
    let pd: f64 = base.iter().filter(|s| s.is_disruptive()).map(|s| s.probability).sum();
    let q0 = p0 + delta;
    if !delta.is_finite() || !(-1e-12..=1.0 + 1e-12).contains(&q0) {
        return Err(Error::validation(format!(
            "no-disruption probability {p0} + {delta} falls outside [0, 1]"
        )));
    }
    let q0 = q0.clamp(0.0, 1.0);
    let scale = if pd > 0.0 {
        (1.0 - q0) / pd
    } else if q0 >= 1.0 - 1e-12 {
        0.0
    } else {
        return Err(Error::validation("no disruptive scenario can absorb the remaining probability"));
    };
    let mut out = vec![DisruptionScenario::benign(q0)];
    out.extend(
        base.iter()
            .filter(|s| s.is_disruptive())
            .map(|s| DisruptionScenario { probability: s.probability * scale, ..s.clone() }),
    );
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub delta_p: f64,
    pub no_disruption_probability: f64,
    /// In-sample optimal value of the reweighted problem.
    pub objective: f64,
    pub lower: f64,
    pub plan_hash: String,
    pub off_components_mid: usize,
    pub report: EvaluationReport,
    pub plan: ShutoffPlan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityTable {
    pub base_no_disruption_probability: f64,
    pub rows: Vec<SensitivityRow>,
}

/// Middle-to-late reporting period `⌈2T/3⌉`.
pub fn mid_period(horizon: usize) -> usize {
    (2 * horizon).div_ceil(3).max(1)
}

/// Re-solves the problem for each `Δp` and evaluates on `eval`.
pub fn sensitivity_dp(
    case: &PowerCase,
    base: &[DisruptionScenario],
    deltas: &[f64],
    eval: &[DisruptionScenario],
    opts: &DecompositionOptions,
    eval_limits: SolveLimits,
) -> Result<SensitivityTable> {
    let p0 = base.iter().filter(|s| !s.is_disruptive()).map(|s| s.probability).sum();
    let sets = deltas.iter().map(|&d| reweight(base, d)).collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(deltas.len());
    for (&delta, scens) in deltas.iter().zip(&sets) {
        let r = run(case, scens, opts)?;
        let report = evaluate_plan(case, &r.plan, eval, &format!("dp={delta}"), eval_limits)?;
        rows.push(SensitivityRow {
            delta_p: delta,
            no_disruption_probability: scens[0].probability,
            objective: r.upper,
            lower: r.lower,
            plan_hash: r.plan.schedule_hash(),
            off_components_mid: r.plan.off_count(mid_period(case.horizon())),
            report,
            plan: r.plan,
        });
    }
    Ok(SensitivityTable { base_no_disruption_probability: p0, rows })
}

impl SensitivityTable {
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record([
            "delta_p",
            "p0",
            "objective",
            "nondisruptive_shed",
            "disruptive_shed",
            "disruptive_damage",
            "g_n",
            "off_mid",
        ])?;
        for r in &self.rows {
            wtr.write_record([
                r.delta_p.to_string(),
                r.no_disruption_probability.to_string(),
                r.objective.to_string(),
                r.report.nondisruptive_shed.to_string(),
                r.report.disruptive_shed.to_string(),
                r.report.disruptive_damage.to_string(),
                r.report.g_n.to_string(),
                r.off_components_mid.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

pub const INTERACTION_LABELS: [&str; 3] = ["exo", "end", "mix"];
pub const INTERACTION_MASKS: [SimulationMask; 3] =
    [SimulationMask::EXOGENOUS_ONLY, SimulationMask::ENDOGENOUS_ONLY, SimulationMask::MIXED];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionStudy {
    pub labels: Vec<String>,
    /// Plans trained on exo-only, endo-only and mixed samples.
    pub plans: Vec<ShutoffPlan>,
    /// `reports[plan][test set]`, both in label order.
    pub reports: Vec<Vec<EvaluationReport>>,
    /// De-energized components of each plan at the reporting period.
    pub off_components_mid: Vec<usize>,
    pub mid_period: usize,
}

/// Trains one plan per simulation mask on `n` scenarios and evaluates all
/// three on `eval_n`-scenario test sets of every mask.
pub fn interaction_study(
    case: &PowerCase,
    simulator: &Simulator<'_>,
    n: usize,
    eval_n: usize,
    seed: u64,
    opts: &DecompositionOptions,
    eval_limits: SolveLimits,
) -> Result<InteractionStudy> {
    let masked = |m: SimulationMask| {
        let mut s = simulator.clone();
        s.mask = m;
        s
    };
    let train_seed = derive_seed(seed, 1);
    let test_seed = derive_seed(seed, EVAL_SEED_TAG);
    let mut plans = Vec::with_capacity(3);
    let mut tests = Vec::with_capacity(3);
    for (label, m) in INTERACTION_LABELS.iter().zip(INTERACTION_MASKS) {
        let sim = masked(m);
        let train = sim.generate(n, train_seed)?;
        let r = run(case, &train, opts)?;
        info!("interaction {label}: objective {:.4}", r.upper);
        plans.push(r.plan);
        tests.push(sim.generate(eval_n, test_seed)?);
    }
    let reports = plans
        .iter()
        .zip(INTERACTION_LABELS)
        .map(|(plan, label)| {
            tests
                .iter()
                .map(|t| evaluate_plan(case, plan, t, label, eval_limits))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mid = mid_period(case.horizon());
    Ok(InteractionStudy {
        labels: INTERACTION_LABELS.iter().map(|s| s.to_string()).collect(),
        off_components_mid: plans.iter().map(|p| p.off_count(mid)).collect(),
        plans,
        reports,
        mid_period: mid,
    })
}

impl InteractionStudy {
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record([
            "plan",
            "test_set",
            "nondisruptive_shed",
            "disruptive_shed",
            "disruptive_damage",
            "g_n",
        ])?;
        for (p, row) in self.reports.iter().enumerate() {
            for (t, r) in row.iter().enumerate() {
                wtr.write_record([
                    self.labels[p].clone(),
                    self.labels[t].clone(),
                    r.nondisruptive_shed.to_string(),
                    r.disruptive_shed.to_string(),
                    r.disruptive_damage.to_string(),
                    r.g_n.to_string(),
                ])?;
            }
        }
        wtr.flush()?;
        Ok(())
    }
}
