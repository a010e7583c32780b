//! The master / subproblem loop with bound tracking and checkpoints.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{debug, info};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dual::{solve_dual, solve_smc, DualOptions, DualState};
use super::master::{build_master, Cut, CutKind};
use crate::case::PowerCase;
use crate::error::{Error, Result};
use crate::fire::{check_distribution, DisruptionScenario};
use crate::milp::{redispatch, solve, SecondStageModel, ShutoffPlan, SolveLimits};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionOptions {
    /// Relative optimality gap.
    pub epsilon: f64,
    /// SMC anchor slack.
    pub delta: f64,
    pub mode: CutKind,
    pub max_iterations: usize,
    /// Wall-clock limit in seconds.
    pub time_limit: Option<f64>,
    pub master_limits: SolveLimits,
    pub sub_limits: SolveLimits,
    pub dual: DualOptions,
    pub checkpoint: Option<PathBuf>,
}

impl Default for DecompositionOptions {
    fn default() -> Self {
        DecompositionOptions {
            epsilon: 0.01,
            delta: 1e-4,
            mode: CutKind::Smc,
            max_iterations: 500,
            time_limit: None,
            master_limits: SolveLimits::EXACT,
            sub_limits: SolveLimits::EXACT,
            dual: DualOptions::default(),
            checkpoint: None,
        }
    }
}

impl DecompositionOptions {
    pub fn exact(mode: CutKind) -> Self {
        DecompositionOptions { epsilon: 0.0, mode, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsEntry {
    pub iteration: usize,
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
    pub incumbent: String,
    pub seconds: f64,
    pub cuts: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundsLog {
    pub entries: Vec<BoundsEntry>,
}

impl BoundsLog {
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        for e in &self.entries {
            wtr.serialize(e)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

pub fn relative_gap(lower: f64, upper: f64) -> f64 {
    if !upper.is_finite() {
        return f64::INFINITY;
    }
    let diff = (upper - lower).max(0.0);
    if diff <= 1e-9 * upper.abs().max(1.0) {
        0.0
    } else {
        diff / upper.abs().max(1e-12)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub case_hash: String,
    pub cuts: Vec<Cut>,
    pub log: BoundsLog,
    pub incumbent: Option<ShutoffPlan>,
    pub lower: f64,
    pub upper: f64,
}

impl Checkpoint {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, serde_json::to_vec(self)?)?;
        std::fs::rename(tmp, path)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_slice(&std::fs::read(path)?)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult {
    /// Incumbent after redispatch.
    pub plan: ShutoffPlan,
    /// Incumbent exactly as returned by the master.
    pub raw_plan: ShutoffPlan,
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub log: BoundsLog,
    pub cuts: Vec<Cut>,
    pub seconds: f64,
}

struct Worker {
    index: usize,
    sub: SecondStageModel,
    state: DualState,
}

/// Generates the Lagrangian cut of one scenario at `anchor`.
fn lagrangian_cut(w: &mut Worker, tau: usize, anchor: &[f64], f_hat: f64, opts: &DecompositionOptions, it: usize) -> Result<Cut> {
    let r = solve_dual(&mut w.sub, &mut w.state, anchor, f_hat, &opts.dual)?;
    if !r.converged {
        debug!("scenario {}: dual stopped after {} iterations", w.index, r.iterations);
    }
    Ok(Cut {
        scenario: w.index,
        tau,
        lambda: r.lambda,
        intercept: r.value,
        anchor: anchor.to_vec(),
        iteration: it,
        kind: CutKind::Lc,
    })
}

fn square_min_cut(w: &mut Worker, tau: usize, anchor: &[f64], f_hat: f64, opts: &DecompositionOptions, it: usize) -> Result<Cut> {
    let r = solve_smc(&mut w.sub, &mut w.state, anchor, f_hat, opts.delta, &opts.dual)?;
    if !r.success {
        debug!("scenario {}: square-minimization fell back to the Lagrangian cut", w.index);
        return lagrangian_cut(w, tau, anchor, f_hat, opts, it);
    }
    Ok(Cut {
        scenario: w.index,
        tau,
        lambda: r.lambda,
        intercept: r.value,
        anchor: anchor.to_vec(),
        iteration: it,
        kind: CutKind::Smc,
    })
}

/// Lagrangian cut of scenario `scen` at `anchor` (stand-alone form).
pub fn lc_cut(case: &PowerCase, index: usize, scen: &DisruptionScenario, anchor: &[f64], opts: &DecompositionOptions) -> Result<Cut> {
    let mut w = Worker { index, sub: SecondStageModel::build(case, scen)?, state: DualState::default() };
    let f = w.sub.value(anchor, opts.sub_limits)?.objective;
    lagrangian_cut(&mut w, scen.onset(case.horizon()), anchor, f, opts, 0)
}

/// Square-minimization cut of scenario `scen` at `anchor` (stand-alone form).
pub fn smc_cut(case: &PowerCase, index: usize, scen: &DisruptionScenario, anchor: &[f64], opts: &DecompositionOptions) -> Result<Cut> {
    let mut w = Worker { index, sub: SecondStageModel::build(case, scen)?, state: DualState::default() };
    let f = w.sub.value(anchor, opts.sub_limits)?.objective;
    square_min_cut(&mut w, scen.onset(case.horizon()), anchor, f, opts, 0)
}

/// Runs the decomposition until the relative gap drops to `epsilon`.
pub fn run(case: &PowerCase, scenarios: &[DisruptionScenario], opts: &DecompositionOptions) -> Result<DecompositionResult> {
    run_from(case, scenarios, opts, None)
}

/// Like [`run`], optionally resuming from a checkpoint.
pub fn run_from(
    case: &PowerCase,
    scenarios: &[DisruptionScenario],
    opts: &DecompositionOptions,
    resume: Option<Checkpoint>,
) -> Result<DecompositionResult> {
    check_distribution(scenarios, 1e-6)?;
    if !(opts.epsilon >= 0.0) || !(0.0..1.0).contains(&opts.delta) {
        return Err(Error::validation("epsilon must be ≥ 0 and delta in [0, 1)"));
    }
    let start = Instant::now();
    let t_max = case.horizon();
    let case_hash = case.hash();

    let mut workers: Vec<Worker> = scenarios
        .iter()
        .enumerate()
        .filter(|(_, s)| s.is_disruptive())
        .map(|(i, s)| Ok(Worker { index: i, sub: SecondStageModel::build(case, s)?, state: DualState::default() }))
        .collect::<Result<_>>()?;

    let (mut cuts, mut log, mut incumbent, mut lower, mut upper) = match resume {
        Some(cp) => {
            if cp.case_hash != case_hash {
                return Err(Error::validation("checkpoint was written for a different case"));
            }
            (cp.cuts, cp.log, cp.incumbent, cp.lower, cp.upper)
        }
        None => (Vec::new(), BoundsLog::default(), None, 0.0, f64::INFINITY),
    };
    let mut master = build_master(case, scenarios, &cuts)?;
    let mut converged = false;
    let mut iteration = log.entries.last().map_or(0, |e| e.iteration);

    loop {
        if iteration >= opts.max_iterations || opts.time_limit.is_some_and(|t| start.elapsed().as_secs_f64() > t) {
            break;
        }
        iteration += 1;
        let r = solve(&master.model, opts.master_limits)?.require_solution("master problem")?;
        lower = lower.max(r.bound.min(r.objective));
        let plan = ShutoffPlan::from_solution(case, &master.first, &r.values);

        // Forward pass: second-stage values at the master's states.
        let forward: Vec<(usize, Vec<f64>, f64, bool)> = workers
            .par_iter_mut()
            .map(|w| {
                let tau = scenarios[w.index].onset(t_max);
                let anchor = plan.anchor(tau);
                match w.state.cached_value(&anchor) {
                    Some(f) => Ok((w.index, anchor, f, true)),
                    None => {
                        let f = w.sub.value(&anchor, opts.sub_limits)?.objective;
                        Ok((w.index, anchor, f, false))
                    }
                }
            })
            .collect::<Result<_>>()?;
        let mut estimate = r.objective;
        for (idx, _, f, _) in &forward {
            let v_hat = r.values[master.v[*idx].expect("disruptive scenario has V").0];
            estimate += scenarios[*idx].probability * (f - v_hat);
        }
        if estimate < upper - 1e-9 {
            upper = estimate;
            incumbent = Some(plan.clone());
        }
        let gap = relative_gap(lower, upper);
        let done = upper - lower <= opts.epsilon * upper.abs() + 1e-9 * upper.abs().max(1.0);

        // Backward pass: one cut per scenario at the current state.
        let mut new_cuts = Vec::new();
        if !done {
            new_cuts = workers
                .par_iter_mut()
                .zip(forward.par_iter())
                .map(|(w, (_, anchor, f, seen))| -> Result<Option<Cut>> {
                    let tau = scenarios[w.index].onset(t_max);
                    if !*seen {
                        w.state.anchors.push((anchor.clone(), *f));
                    }
                    let has_tight = cuts_at(&cuts, w.index, anchor).any(|c| c.kind == CutKind::Lc);
                    if has_tight {
                        return Ok(None);
                    }
                    let cut = match (opts.mode, *seen) {
                        (CutKind::Lc, _) | (CutKind::Smc, true) => lagrangian_cut(w, tau, anchor, *f, opts, iteration)?,
                        (CutKind::Smc, false) => square_min_cut(w, tau, anchor, *f, opts, iteration)?,
                    };
                    Ok(Some(cut))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .collect();
        }
        for c in &new_cuts {
            master.add_cut(c)?;
        }
        let n_new = new_cuts.len();
        cuts.extend(new_cuts);
        log.entries.push(BoundsEntry {
            iteration,
            lower,
            upper,
            gap,
            incumbent: incumbent.as_ref().map(|p| p.schedule_hash()).unwrap_or_default(),
            seconds: start.elapsed().as_secs_f64(),
            cuts: n_new,
        });
        info!("iteration {iteration}: LB {lower:.6} UB {upper:.6} gap {gap:.3e} cuts +{n_new}");
        if let Some(path) = &opts.checkpoint {
            Checkpoint {
                case_hash: case_hash.clone(),
                cuts: cuts.clone(),
                log: log.clone(),
                incumbent: incumbent.clone(),
                lower,
                upper,
            }
            .save(path)?;
        }
        if done {
            converged = true;
            break;
        }
        if n_new == 0 {
            // Every anchor already carries a tight cut: the master value is exact.
            converged = relative_gap(lower, upper) <= opts.epsilon + 1e-9;
            break;
        }
    }

    let raw_plan = incumbent.ok_or_else(|| Error::IterationLimit {
        iterations: iteration,
        context: "decomposition stopped before finding an incumbent".into(),
    })?;
    let plan = redispatch(case, &raw_plan)?;
    Ok(DecompositionResult {
        plan,
        raw_plan,
        lower,
        upper,
        gap: relative_gap(lower, upper),
        iterations: iteration,
        converged,
        log,
        cuts,
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn cuts_at<'a>(cuts: &'a [Cut], scenario: usize, anchor: &'a [f64]) -> impl Iterator<Item = &'a Cut> + 'a {
    cuts.iter().filter(move |c| c.scenario == scenario && c.anchor == anchor)
}
