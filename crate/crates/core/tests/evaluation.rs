mod common;

use common::*;
use psps_core::benchmarks::solve_deterministic;
use psps_core::decomposition::{run, CutKind, DecompositionOptions};
use psps_core::evaluation::*;
use psps_core::fire::{DisruptionScenario, EnvLayers, Simulator};
use psps_core::geo::build_grid;
use psps_core::milp::{ShutoffPlan, SolveLimits};

const EX: SolveLimits = SolveLimits::EXACT;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * a.abs().max(b.abs()).max(1.0)
}

fn smip(case: &psps_core::PowerCase, scens: &[DisruptionScenario]) -> psps_core::decomposition::DecompositionResult {
    run(case, scens, &DecompositionOptions::exact(CutKind::Smc)).unwrap()
}

#[test]
fn all_on_plan_on_benign_set_costs_nothing() {
    let case = toy();
    let det = solve_deterministic(&case, EX).unwrap();
    let benign: Vec<_> = (0..4).map(|_| DisruptionScenario::benign(0.25)).collect();
    let r = evaluate_plan(&case, det.plan(), &benign, "det", EX).unwrap();
    assert_eq!(r.g_n, 0.0);
    assert!(close(r.nondisruptive_mass, 1.0));
}

#[test]
fn in_sample_evaluation_equals_the_optimal_value() {
    let case = toy();
    for scens in [toy_scenarios(), random_toy_scenarios(&case, 4, 9)] {
        let r = smip(&case, &scens);
        let rep = evaluate_plan(&case, &r.plan, &scens, "smip", EX).unwrap();
        assert!(close(rep.g_n, r.upper), "{} vs {}", rep.g_n, r.upper);
    }
}

#[test]
fn cost_decomposition_and_aggregates_are_consistent() {
    let case = toy();
    let scens = toy_scenarios();
    let r = smip(&case, &scens);
    let rep = evaluate_plan(&case, &r.plan, &scens, "smip", EX).unwrap();
    let g: f64 = rep.costs.iter().map(|c| c.probability * (c.pre_shed + c.post_shed + c.damage)).sum();
    assert_eq!(g, rep.g_n);
    let pd: f64 = rep.costs.iter().filter(|c| c.is_disruptive()).map(|c| c.probability).sum();
    let total_from_means = rep.nondisruptive_mass * rep.nondisruptive_shed + pd * (rep.disruptive_shed + rep.disruptive_damage);
    assert!(close(total_from_means, rep.g_n));
    let worst = rep.costs.iter().map(|c| c.total()).fold(f64::MIN, f64::max);
    assert_eq!(worst, rep.worst_case);
    let again = evaluate_plan(&case, &r.plan, &scens, "smip", EX).unwrap();
    assert_eq!(rep, again);
}

#[test]
fn costs_match_the_enumeration_oracle() {
    let case = toy();
    let scens = random_toy_scenarios(&case, 21, 10);
    let mut oracle = Oracle::new(&case);
    for off in [vec![5, 5, 5, 5, 5, 5, 5], vec![5, 3, 5, 5, 2, 2, 1], vec![2, 1, 1, 1, 1, 1, 1]] {
        let plan = psps_core::milp::redispatch(&case, &ShutoffPlan::from_off_periods(&case, &off)).unwrap();
        let rep = evaluate_plan(&case, &plan, &scens, "x", EX).unwrap();
        assert!(close(rep.g_n, oracle.plan_cost(&off, &scens)), "{off:?}");
        assert!(close(rep.worst_case, oracle.plan_worst(&off, &scens)), "{off:?}");
    }
}

#[test]
fn infeasible_plan_is_rejected() {
    let case = toy();
    let mut plan = ShutoffPlan::from_off_periods(&case, &[5, 5, 5, 5, 5, 5, 5]);
    plan.z[B1][2] = 0;
    assert!(evaluate_plan(&case, &plan, &toy_scenarios(), "bad", EX).is_err());
    assert!(evaluate_plan(&case, &ShutoffPlan::all_on(&case), &[], "empty", EX).is_err());
}

#[test]
fn smip_plan_beats_the_deterministic_plan() {
    let case = toy();
    let scens = toy_scenarios();
    let x = smip(&case, &scens);
    let det = solve_deterministic(&case, EX).unwrap();
    let gx = evaluate_plan(&case, &x.plan, &scens, "x", EX).unwrap();
    let mut gd = evaluate_plan(&case, det.plan(), &scens, "det", EX).unwrap();
    gd.set_reference(gx.g_n);
    assert!(gd.g_n > gx.g_n);
    assert!(gd.rri.unwrap() > 0.0);
}

#[test]
fn exogenous_damage_does_not_depend_on_the_plan() {
    let case = toy();
    let scens: Vec<_> = toy_scenarios()
        .into_iter()
        .map(|mut s| {
            s.faults.clear();
            s.impact.clear();
            if s.exogenous.is_empty() && s.tau.is_some() {
                s.exogenous.push(G2);
            }
            s
        })
        .collect();
    let mut damages = Vec::new();
    for off in [vec![5, 5, 5, 5, 5, 5, 5], vec![5, 5, 2, 5, 2, 4, 2], vec![1, 1, 1, 1, 1, 1, 1]] {
        let plan = psps_core::milp::redispatch(&case, &ShutoffPlan::from_off_periods(&case, &off)).unwrap();
        let rep = evaluate_plan(&case, &plan, &scens, "x", EX).unwrap();
        damages.push(rep.costs.iter().map(|c| c.damage).collect::<Vec<_>>());
    }
    assert!(damages.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn student_t_interval_matches_hand_value() {
    // t(0.975, 4) = 2.7764451051977987; s = sqrt(2.5).
    let (m, h) = t_interval(&[1.0, 2.0, 3.0, 4.0, 5.0]);
    assert_eq!(m, 3.0);
    assert!((h - 2.7764451051977987 * (2.5f64 / 5.0).sqrt()).abs() < 1e-9);
    assert!(t_interval(&[4.0]).1.is_nan());
}

#[test]
fn reweighting_rules() {
    let base = toy_scenarios();
    let same = reweight(&base, 0.0).unwrap();
    assert_eq!(same.len(), base.len());
    for (a, b) in same.iter().zip(&base) {
        assert!(close(a.probability, b.probability));
        assert_eq!(a.tau, b.tau);
    }
    let up = reweight(&base, 0.3).unwrap();
    assert!(close(up[0].probability, 0.4));
    assert!(close(up.iter().map(|s| s.probability).sum::<f64>(), 1.0));
    assert!(close(up[1].probability / up[2].probability, base[1].probability / base[2].probability));
    assert!(reweight(&base, -0.2).is_err());
    assert!(reweight(&base, 0.95).is_err());
    let all = reweight(&base, 0.9).unwrap();
    assert!(all[1..].iter().all(|s| s.probability == 0.0));
}

#[test]
fn sensitivity_endpoints() {
    let case = toy();
    let base = toy_scenarios();
    let eval = random_toy_scenarios(&case, 8, 12);
    let opts = DecompositionOptions::exact(CutKind::Smc);
    let table = sensitivity_dp(&case, &base, &[0.0, 0.2, 0.9], &eval, &opts, EX).unwrap();
    let direct = run(&case, &base, &opts).unwrap();
    assert!(close(table.rows[0].objective, direct.upper));
    assert_eq!(table.rows[0].plan_hash, direct.plan.schedule_hash());
    let det = solve_deterministic(&case, EX).unwrap();
    assert!(close(table.rows[2].objective, det.objective));
    let mut csv = Vec::new();
    table.write_csv(&mut csv).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 4);
}

#[test]
fn saa_study_validates_inputs_and_selects_a_plan() {
    let case = toy();
    let (geom, maps) = build_grid(&case, 1000.0).unwrap();
    let env = EnvLayers::uniform(&case, &geom);
    let sim = Simulator::new(&case, &geom, &maps, &env).unwrap();
    let sampler = |n: usize, seed: u64| sim.generate(n, seed);
    let mut opts = SaaOptions {
        sizes: vec![4, 8],
        replicates: 2,
        eval_n: 50,
        seed: 3,
        decomposition: DecompositionOptions::exact(CutKind::Smc),
        eval_limits: EX,
    };
    let st = saa_study(&case, &sampler, &opts).unwrap();
    assert_eq!(st.cells.len(), 4);
    assert_eq!(st.summary.len(), 2);
    assert!(st.cells.iter().all(|c| c.ok() && c.converged));
    let (size, rep) = st.best.unwrap();
    assert_eq!(size, 8);
    let chosen = st.cells.iter().find(|c| c.size == 8 && c.replicate == rep).unwrap();
    assert!(st.cells.iter().filter(|c| c.size == 8).all(|c| c.upper >= chosen.upper));
    assert_eq!(st.best_plan.as_ref().unwrap().schedule_hash(), chosen.plan_hash);
    let again = saa_study(&case, &sampler, &opts).unwrap();
    assert_eq!(st.summary, again.summary);
    opts.replicates = 1;
    assert!(saa_study(&case, &sampler, &opts).is_err());
    opts.replicates = 2;
    opts.sizes.clear();
    assert!(saa_study(&case, &sampler, &opts).is_err());
}

#[test]
fn interaction_study_on_the_toy() {
    let case = toy();
    let (geom, maps) = build_grid(&case, 1000.0).unwrap();
    let env = EnvLayers::uniform(&case, &geom);
    let sim = Simulator::new(&case, &geom, &maps, &env).unwrap();
    let st = interaction_study(&case, &sim, 20, 60, 5, &DecompositionOptions::exact(CutKind::Smc), EX).unwrap();
    assert_eq!(st.reports.len(), 3);
    assert!(st.reports.iter().all(|r| r.len() == 3));
    let exo: Vec<Vec<f64>> = st.reports.iter().map(|r| r[0].costs.iter().map(|c| c.damage).collect()).collect();
    assert!(exo.windows(2).all(|w| w[0] == w[1]));
    let mut csv = Vec::new();
    st.write_csv(&mut csv).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 10);
}
