//! Subcommand implementations.

use std::path::Path;

use log::warn;
use psps_core::benchmarks::{
    compute_risk_table, solve_deterministic, solve_risk_based, solve_robust, solve_wait_and_see, BenchmarkReport,
    BenchmarkResult, RobustOptions,
};
use psps_core::decomposition::{run_from, BoundsEntry, BoundsLog, Checkpoint, CutKind, DecompositionOptions};
use psps_core::evaluation::{
    comparison_rows, evaluate_plan, interaction_study, mid_period, saa_study, scenario_cost, sensitivity_dp,
    write_comparison_csv, EvaluationReport, InteractionStudy, SaaOptions, SaaStudy, SensitivityTable,
};
use psps_core::fire::{DisruptionScenario, EnvLayers, ScenarioFile, ScenarioHeader, SimulationMask, Simulator, SCENARIO_FILE_VERSION};
use psps_core::geo::{build_grid, CellMaps, GridGeometry};
use psps_core::milp::{solve_extensive, ObjectiveMode, ShutoffPlan, SolveLimits};
use psps_core::{load_case, PowerCase};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::artifact::{file_sha256, Artifact, CliError, CliResult, OutputDir, RunConfig};
use crate::plot;
use crate::{
    BenchmarkArgs, DecompArgs, EvaluateArgs, GridArgs, InteractArgs, MaskArg, PlotArgs, PlotKind, SensitivityArgs,
    SimulateArgs, SolveArgs,
};

pub const PLAN_KIND: &str = "plan";
pub const REPORT_KIND: &str = "report";
pub const SAA_KIND: &str = "saa";

/// A solved plan with the bounds that certify it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanRecord {
    pub method: String,
    pub objective: f64,
    pub lower: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub plan: ShutoffPlan,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CheckpointInputs {
    scenarios_sha256: String,
}

fn open_case(config: &RunConfig) -> CliResult<PowerCase> {
    config.validate()?;
    let path = config.case.as_ref().ok_or_else(|| CliError::validation("--case is required"))?;
    Ok(load_case(path)?)
}

struct World {
    geom: GridGeometry,
    maps: CellMaps,
    env: EnvLayers,
}

impl World {
    fn build(case: &PowerCase, grid: &GridArgs) -> CliResult<Self> {
        let (geom, maps) = build_grid(case, grid.cell_size)?;
        let mut env = EnvLayers::uniform(case, &geom);
        if let Some(p) = &grid.raster {
            env.apply_raster(&geom, p)?;
        }
        if let Some(p) = &grid.wind {
            env.apply_wind(case.horizon(), p)?;
        }
        Ok(World { geom, maps, env })
    }

    fn simulator<'a>(&'a self, case: &'a PowerCase) -> CliResult<Simulator<'a>> {
        Ok(Simulator::new(case, &self.geom, &self.maps, &self.env)?)
    }
}

fn grid_config(config: &mut RunConfig, grid: &GridArgs) {
    config.case = Some(grid.case.clone());
    config.cell_size = Some(grid.cell_size);
    config.inputs.extend(grid.raster.iter().chain(&grid.wind).cloned());
}

fn decomp_config(config: &mut RunConfig, d: &DecompArgs) {
    config.epsilon = Some(d.epsilon);
    config.delta = Some(d.delta);
    config.cut = Some(d.cut.name().into());
}

fn decomp_options(d: &DecompArgs) -> DecompositionOptions {
    DecompositionOptions {
        epsilon: d.epsilon,
        delta: d.delta,
        mode: d.cut.kind(),
        max_iterations: d.max_iterations,
        time_limit: d.time_limit,
        ..Default::default()
    }
}

fn load_scenarios(path: &Path, case: &PowerCase) -> CliResult<Vec<DisruptionScenario>> {
    Ok(ScenarioFile::load_for(path, case)?.scenarios)
}

fn disruption_rate(scens: &[DisruptionScenario]) -> f64 {
    scens.iter().filter(|s| s.is_disruptive()).count() as f64 / scens.len().max(1) as f64
}

pub fn simulate(args: &SimulateArgs, mut config: RunConfig) -> CliResult<()> {
    grid_config(&mut config, &args.grid);
    config.scenarios = Some(args.n);
    config.params = json!({ "mask": args.mask.name() });
    let case = open_case(&config)?;
    let world = World::build(&case, &args.grid)?;
    let mask = args.mask.mask();
    let sim = world.simulator(&case)?.with_mask(mask);
    let scenarios = sim.generate(args.n, config.seed)?;
    let mut out = OutputDir::create(config, Some(&case))?;
    let file = ScenarioFile {
        header: ScenarioHeader {
            kind: "header".into(),
            version: SCENARIO_FILE_VERSION,
            seed: out.config.seed,
            count: scenarios.len(),
            case_hash: case.hash(),
            horizon: case.horizon(),
            grid: world.geom.clone(),
            exogenous: mask.exogenous,
            endogenous: mask.endogenous,
            config_hash: Some(out.config_hash.clone()),
        },
        scenarios,
    };
    let path = out.file("scenarios.jsonl");
    file.save(&path)?;
    let rate = disruption_rate(&file.scenarios);
    let disrupted = file.scenarios.iter().filter(|s| s.is_disruptive()).count();
    let mean_onset = file.scenarios.iter().filter_map(|s| s.tau).sum::<usize>() as f64 / disrupted.max(1) as f64;
    println!(
        "{} scenarios over {} cells: {disrupted} disrupted (rate {rate:.4}), mean onset period {mean_onset:.2}",
        file.scenarios.len(),
        world.geom.n_cells()
    );
    println!("wrote {}", path.display());
    out.finish(json!({ "count": file.scenarios.len(), "disrupted": disrupted, "disruption_rate": rate }))
}

pub fn solve(args: &SolveArgs, mut config: RunConfig) -> CliResult<()> {
    config.case = Some(args.case.clone());
    config.inputs.push(args.scenarios.clone());
    decomp_config(&mut config, &args.decomp);
    config.params = json!({ "extensive": args.extensive, "max_iterations": args.decomp.max_iterations });
    let case = open_case(&config)?;
    let scenarios = load_scenarios(&args.scenarios, &case)?;
    let scen_hash = file_sha256(&args.scenarios)?;
    let mut out = OutputDir::create(config, Some(&case))?;

    let (record, log) = if args.extensive {
        if args.resume.is_some() {
            return Err(CliError::validation("--resume applies to the decomposition only"));
        }
        let sol = solve_extensive(&case, &scenarios, ObjectiveMode::Expectation, SolveLimits::with_gap(args.decomp.epsilon))?;
        let gap = psps_core::decomposition::relative_gap(sol.bound, sol.objective);
        let entry = BoundsEntry {
            iteration: 1,
            lower: sol.bound,
            upper: sol.objective,
            gap,
            incumbent: sol.plan.schedule_hash(),
            seconds: sol.seconds,
            cuts: 0,
        };
        let record = PlanRecord {
            method: "extensive".into(),
            objective: sol.objective,
            lower: sol.bound,
            gap,
            iterations: 1,
            converged: gap <= args.decomp.epsilon + 1e-9,
            plan: sol.plan,
        };
        (record, BoundsLog { entries: vec![entry] })
    } else {
        let resume = match &args.resume {
            Some(p) => {
                let sidecar = p.with_extension("inputs.json");
                if sidecar.is_file() {
                    let inputs: Artifact<CheckpointInputs> = Artifact::load(&sidecar, "checkpoint-inputs", Some(&case))?;
                    if inputs.data.scenarios_sha256 != scen_hash {
                        return Err(CliError::validation("checkpoint was written for a different scenario file"));
                    }
                }
                Some(Checkpoint::load(p)?)
            }
            None => None,
        };
        let checkpoint = out.file("checkpoint.json");
        out.save("checkpoint.inputs.json", "checkpoint-inputs", CheckpointInputs { scenarios_sha256: scen_hash })?;
        let opts = DecompositionOptions { checkpoint: Some(checkpoint), ..decomp_options(&args.decomp) };
        let r = run_from(&case, &scenarios, &opts, resume)?;
        let record = PlanRecord {
            method: args.decomp.cut.name().into(),
            objective: r.upper,
            lower: r.lower,
            gap: r.gap,
            iterations: r.iterations,
            converged: r.converged,
            plan: r.plan,
        };
        (record, r.log)
    };

    out.write_csv("bounds.csv", |f| log.write_csv(f))?;
    let summary = json!({
        "method": record.method,
        "objective": record.objective,
        "lower": record.lower,
        "gap": record.gap,
        "iterations": record.iterations,
        "converged": record.converged,
    });
    println!(
        "{}: objective {:.6}, lower bound {:.6}, gap {:.3e}, {} iterations{}",
        record.method,
        record.objective,
        record.lower,
        record.gap,
        record.iterations,
        if record.converged { "" } else { " (limit reached)" }
    );
    let converged = record.converged;
    let (gap, iterations) = (record.gap, record.iterations);
    let path = out.save("plan.json", PLAN_KIND, record)?;
    println!("wrote {}", path.display());
    out.finish(summary)?;
    if converged {
        Ok(())
    } else {
        Err(CliError::limit(format!(
            "stopped at a limit after {iterations} iterations with gap {gap:.3e}; incumbent written"
        )))
    }
}

fn plan_tag(path: &Path, record: &PlanRecord) -> String {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("plan");
    if stem == "plan" {
        record.method.clone()
    } else {
        stem.into()
    }
}

pub fn evaluate(args: &EvaluateArgs, mut config: RunConfig) -> CliResult<()> {
    if args.saa_sizes.is_empty() {
        evaluate_plans(args, config)
    } else {
        grid_config(&mut config, &args.grid);
        decomp_config(&mut config, &args.decomp);
        config.params = json!({
            "sizes": args.saa_sizes,
            "replicates": args.replicates,
            "eval_n": args.eval_n,
            "max_iterations": args.decomp.max_iterations,
        });
        let case = open_case(&config)?;
        let world = World::build(&case, &args.grid)?;
        let sim = world.simulator(&case)?;
        let sampler = |n: usize, seed: u64| sim.generate(n, seed);
        let opts = SaaOptions {
            sizes: args.saa_sizes.clone(),
            replicates: args.replicates,
            eval_n: args.eval_n,
            seed: config.seed,
            decomposition: decomp_options(&args.decomp),
            eval_limits: SolveLimits::EXACT,
        };
        let study = saa_study(&case, &sampler, &opts)?;
        let mut out = OutputDir::create(config, Some(&case))?;
        out.write_csv("saa_summary.csv", |f| study.write_summary_csv(f))?;
        for s in &study.summary {
            println!(
                "n = {:>4}: lower {:.4} ± {:.4}, upper {:.4} ± {:.4}, gap {:.4} ({} of {} replicates)",
                s.size, s.lower_mean, s.lower_half_width, s.upper_mean, s.upper_half_width, s.gap_mean, s.completed, study.replicates
            );
        }
        if let Some(plan) = &study.best_plan {
            let best = study.best.expect("best plan has an id");
            let cell = study.cells.iter().find(|c| (c.size, c.replicate) == best).expect("best cell");
            let record = PlanRecord {
                method: format!("saa-n{}-r{}", best.0, best.1),
                objective: cell.upper,
                lower: cell.lower,
                gap: f64::NAN,
                iterations: 0,
                converged: cell.converged,
                plan: plan.clone(),
            };
            out.save("best_plan.json", PLAN_KIND, record)?;
        }
        out.write_text("saa_ci.svg", &plot::ci_bars(&study.summary))?;
        let summary = serde_json::to_value(&study.summary)?;
        let path = out.save("saa.json", SAA_KIND, study)?;
        println!("wrote {}", path.display());
        out.finish(summary)
    }
}

fn evaluate_plans(args: &EvaluateArgs, mut config: RunConfig) -> CliResult<()> {
    if args.plans.is_empty() {
        return Err(CliError::validation("give at least one --plan, or --saa-sizes for a bound study"));
    }
    let scen_path = args
        .scenarios
        .as_ref()
        .ok_or_else(|| CliError::validation("--scenarios is required to evaluate plans"))?;
    config.case = Some(args.grid.case.clone());
    config.inputs.push(scen_path.clone());
    config.inputs.extend(args.plans.iter().cloned());
    let case = open_case(&config)?;
    let eval = load_scenarios(scen_path, &case)?;
    let mut reports = Vec::new();
    for p in &args.plans {
        let art: Artifact<PlanRecord> = Artifact::load(p, PLAN_KIND, Some(&case))?;
        let tag = plan_tag(p, &art.data);
        reports.push(evaluate_plan(&case, &art.data.plan, &eval, &tag, SolveLimits::EXACT)?);
    }
    let mut out = OutputDir::create(config, Some(&case))?;
    let rows = comparison_rows(&reports, &reports[0]);
    out.write_csv("comparison.csv", |f| write_comparison_csv(&rows, f))?;
    for r in &mut reports {
        let g_ref = rows[0].g_n;
        r.set_reference(g_ref);
    }
    for (k, r) in reports.iter().enumerate() {
        out.write_csv(&format!("costs_{k}_{}.csv", sanitize(&r.tag)), |f| r.write_costs_csv(f))?;
    }
    print_rows(&rows);
    out.write_text("scatter.svg", &plot::scenario_scatter(&reports))?;
    let summary = serde_json::to_value(&rows)?;
    let path = out.save("reports.json", REPORT_KIND, reports)?;
    println!("wrote {}", path.display());
    out.finish(summary)
}

fn sanitize(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' }).collect()
}

fn print_rows(rows: &[psps_core::evaluation::ComparisonRow]) {
    println!(
        "{:<12} {:>12} {:>12} {:>12} {:>12} {:>9} {:>12}",
        "plan", "shed(no-d)", "shed(d)", "damage(d)", "g_n", "RRI", "worst"
    );
    for r in rows {
        println!(
            "{:<12} {:>12.4} {:>12.4} {:>12.4} {:>12.4} {:>9.4} {:>12.4}",
            r.plan, r.nondisruptive_shed, r.disruptive_shed, r.disruptive_damage, r.g_n, r.rri, r.worst_case
        );
    }
}

/// Wait-and-see breakdown: each scenario under its own optimal plan.
fn wait_and_see_report(case: &PowerCase, ws: &BenchmarkResult, eval: &[DisruptionScenario]) -> CliResult<EvaluationReport> {
    let costs = ws
        .plans
        .iter()
        .zip(eval)
        .enumerate()
        .map(|(w, (plan, s))| scenario_cost(case, plan, w, s, SolveLimits::EXACT))
        .collect::<psps_core::Result<Vec<_>>>()?;
    Ok(EvaluationReport::from_costs("ws", "", costs))
}

pub fn benchmark(args: &BenchmarkArgs, mut config: RunConfig) -> CliResult<()> {
    config.case = Some(args.case.clone());
    config.inputs.push(args.scenarios.clone());
    config.inputs.push(args.plan.clone());
    config.inputs.extend(args.eval.iter().cloned());
    config.params = json!({ "alphas": args.alphas, "ro_max_iterations": args.ro_max_iterations });
    let case = open_case(&config)?;
    let scenarios = load_scenarios(&args.scenarios, &case)?;
    let eval = match &args.eval {
        Some(p) => load_scenarios(p, &case)?,
        None => scenarios.clone(),
    };
    let smip: Artifact<PlanRecord> = Artifact::load(&args.plan, PLAN_KIND, Some(&case))?;
    let limits = SolveLimits::EXACT;

    let mut results = Vec::new();
    let mut failures = Vec::new();
    let mut record = |tag: &str, r: psps_core::Result<BenchmarkResult>| match r {
        Ok(b) => results.push(b),
        Err(e) => {
            warn!("benchmark {tag} failed: {e}");
            failures.push((tag.to_string(), e.to_string()));
        }
    };
    record("det", solve_deterministic(&case, limits));
    record("ws", solve_wait_and_see(&case, &eval, limits));
    let risk = compute_risk_table(&case, &scenarios);
    for &a in &args.alphas {
        record(&format!("rb({a:.1})"), solve_risk_based(&case, &risk, a, limits));
    }
    let ro = RobustOptions { max_iterations: args.ro_max_iterations, ..Default::default() };
    record("ro", solve_robust(&case, &scenarios, &ro));

    let mut reports = vec![evaluate_plan(&case, &smip.data.plan, &eval, "smip", limits)?];
    for b in &results {
        let tag = b.tag.to_string();
        let rep = if tag == "ws" {
            wait_and_see_report(&case, b, &eval)
        } else {
            evaluate_plan(&case, b.plan(), &eval, &tag, limits).map_err(CliError::from)
        };
        match rep {
            Ok(r) => reports.push(r),
            Err(e) => {
                warn!("evaluating {tag} failed: {e}");
                failures.push((tag, e.message));
            }
        }
    }
    let rows = comparison_rows(&reports, &reports[0]);
    let mut out = OutputDir::create(config, Some(&case))?;
    let bench = BenchmarkReport { case_hash: case.hash(), results, failures };
    out.write_csv("benchmark_summary.csv", |f| bench.write_summary_csv(f))?;
    out.write_csv("comparison.csv", |f| write_comparison_csv(&rows, f))?;
    print_rows(&rows);
    for (tag, e) in &bench.failures {
        println!("{tag}: FAILED ({e})");
    }
    let bars: Vec<(String, f64)> = rows.iter().map(|r| (r.plan.clone(), r.g_n)).collect();
    out.write_text("comparison.svg", &plot::bars("Expected cost by plan", "g_n", &bars))?;
    let det = reports.iter().position(|r| r.tag == "det");
    let pair: Vec<EvaluationReport> = match det {
        Some(k) => vec![reports[k].clone(), reports[0].clone()],
        None => vec![reports[0].clone()],
    };
    out.write_text("scatter.svg", &plot::scenario_scatter(&pair))?;
    let failed = bench.failures.len();
    out.save("benchmarks.json", "benchmarks", bench)?;
    let summary = serde_json::to_value(&rows)?;
    let path = out.save("reports.json", REPORT_KIND, reports)?;
    println!("wrote {}", path.display());
    out.finish(json!({ "rows": summary, "failures": failed }))
}

pub fn sensitivity(args: &SensitivityArgs, mut config: RunConfig) -> CliResult<()> {
    config.case = Some(args.case.clone());
    config.inputs.push(args.scenarios.clone());
    config.inputs.extend(args.eval.iter().cloned());
    decomp_config(&mut config, &args.decomp);
    config.params = json!({ "deltas": args.deltas, "max_iterations": args.decomp.max_iterations });
    let case = open_case(&config)?;
    let base = load_scenarios(&args.scenarios, &case)?;
    let eval = match &args.eval {
        Some(p) => load_scenarios(p, &case)?,
        None => base.clone(),
    };
    let table: SensitivityTable =
        sensitivity_dp(&case, &base, &args.deltas, &eval, &decomp_options(&args.decomp), SolveLimits::EXACT)?;
    let mut out = OutputDir::create(config, Some(&case))?;
    out.write_csv("sensitivity.csv", |f| table.write_csv(f))?;
    println!("base no-disruption probability {:.4}", table.base_no_disruption_probability);
    println!("{:>8} {:>8} {:>12} {:>12} {:>8}", "dp", "p0", "objective", "g_n", "off@mid");
    for r in &table.rows {
        println!(
            "{:>8.3} {:>8.4} {:>12.4} {:>12.4} {:>8}",
            r.delta_p, r.no_disruption_probability, r.objective, r.report.g_n, r.off_components_mid
        );
    }
    let summary: Vec<_> = table
        .rows
        .iter()
        .map(|r| json!({ "delta_p": r.delta_p, "objective": r.objective, "g_n": r.report.g_n }))
        .collect();
    let path = out.save("sensitivity.json", "sensitivity", table)?;
    println!("wrote {}", path.display());
    out.finish(json!(summary))
}

pub fn interact(args: &InteractArgs, mut config: RunConfig) -> CliResult<()> {
    grid_config(&mut config, &args.grid);
    decomp_config(&mut config, &args.decomp);
    config.scenarios = Some(args.n);
    config.params = json!({ "eval_n": args.eval_n, "max_iterations": args.decomp.max_iterations });
    if args.eval_n == 0 {
        return Err(CliError::validation("--eval-n must be at least 1"));
    }
    let case = open_case(&config)?;
    let world = World::build(&case, &args.grid)?;
    let sim = world.simulator(&case)?;
    let study: InteractionStudy = interaction_study(
        &case,
        &sim,
        args.n,
        args.eval_n,
        config.seed,
        &decomp_options(&args.decomp),
        SolveLimits::EXACT,
    )?;
    let mut out = OutputDir::create(config, Some(&case))?;
    out.write_csv("interaction.csv", |f| study.write_csv(f))?;
    println!("{:<6} {:<6} {:>12} {:>12} {:>12}", "plan", "test", "shed(d)", "damage(d)", "g_n");
    for (p, row) in study.reports.iter().enumerate() {
        for (t, r) in row.iter().enumerate() {
            println!(
                "{:<6} {:<6} {:>12.4} {:>12.4} {:>12.4}",
                study.labels[p], study.labels[t], r.disruptive_shed, r.disruptive_damage, r.g_n
            );
        }
    }
    println!("components off at period {}: {:?}", study.mid_period, study.off_components_mid);
    let summary = json!({ "off_components_mid": study.off_components_mid });
    let path = out.save("interaction.json", "interaction", study)?;
    println!("wrote {}", path.display());
    out.finish(summary)
}

fn require_file(p: &Path) -> CliResult<()> {
    if p.is_file() {
        Ok(())
    } else {
        Err(CliError::io(format!("input file not found: {}", p.display())))
    }
}

pub fn plot(args: &PlotArgs, mut config: RunConfig) -> CliResult<()> {
    match &args.kind {
        PlotKind::Network { case, plan, period } => {
            config.case = Some(case.clone());
            config.inputs.push(plan.clone());
            require_file(plan)?;
            let case = open_case(&config)?;
            let art: Artifact<PlanRecord> = Artifact::load(plan, PLAN_KIND, Some(&case))?;
            let t = period.unwrap_or_else(|| mid_period(case.horizon()));
            if t == 0 || t > case.horizon() {
                return Err(CliError::validation(format!("period {t} outside 1..={}", case.horizon())));
            }
            let svg = plot::network_snapshot(&case, &art.data.plan, t);
            let mut out = OutputDir::create(config, Some(&case))?;
            let path = out.write_text(&format!("network_t{t}.svg"), &svg)?;
            println!("wrote {}", path.display());
            out.finish(json!({ "period": t }))
        }
        PlotKind::Ci { study } => {
            require_file(study)?;
            config.inputs.push(study.clone());
            let art: Artifact<SaaStudy> = Artifact::load(study, SAA_KIND, None)?;
            if art.data.summary.is_empty() {
                return Err(CliError::io(format!("{}: study has no rows to plot", study.display())));
            }
            let mut out = OutputDir::create(config, None)?;
            let path = out.write_text("saa_ci.svg", &plot::ci_bars(&art.data.summary))?;
            println!("wrote {}", path.display());
            out.finish(json!({ "sizes": art.data.sizes }))
        }
        PlotKind::Scatter { reports } => {
            let mut all: Vec<EvaluationReport> = Vec::new();
            for p in reports {
                require_file(p)?;
                config.inputs.push(p.clone());
                let art: Artifact<Vec<EvaluationReport>> = Artifact::load(p, REPORT_KIND, None)?;
                all.extend(art.data);
            }
            if all.is_empty() || all.iter().all(|r| r.costs.is_empty()) {
                return Err(CliError::io("reports hold no scenario costs to plot"));
            }
            let mut out = OutputDir::create(config, None)?;
            let path = out.write_text("scatter.svg", &plot::scenario_scatter(&all))?;
            println!("wrote {}", path.display());
            out.finish(json!({ "series": all.len() }))
        }
    }
}

impl MaskArg {
    fn mask(self) -> SimulationMask {
        match self {
            MaskArg::Mixed => SimulationMask::MIXED,
            MaskArg::Exo => SimulationMask::EXOGENOUS_ONLY,
            MaskArg::Endo => SimulationMask::ENDOGENOUS_ONLY,
        }
    }

    fn name(self) -> &'static str {
        match self {
            MaskArg::Mixed => "mixed",
            MaskArg::Exo => "exo",
            MaskArg::Endo => "endo",
        }
    }
}

impl crate::CutArg {
    fn kind(self) -> CutKind {
        match self {
            crate::CutArg::Lc => CutKind::Lc,
            crate::CutArg::Smc => CutKind::Smc,
        }
    }

    fn name(self) -> &'static str {
        match self {
            crate::CutArg::Lc => "lc",
            crate::CutArg::Smc => "smc",
        }
    }
}

