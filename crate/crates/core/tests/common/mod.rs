//! Shared fixtures and the exhaustive-enumeration oracle.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;

use highs::{HighsModelStatus, RowProblem, Sense};
use psps_core::case::{ComponentId, PowerCase};
use psps_core::fire::{DisruptionScenario, Purpose, RngStream};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn toy() -> PowerCase {
    psps_core::load_case(data_dir().join("toy3.toml")).unwrap()
}

// Flat component order of the toy: b1 b2 b3 g1 g2 l1 l2.
pub const B1: usize = 0;
pub const B2: usize = 1;
pub const B3: usize = 2;
pub const G1: usize = 3;
pub const G2: usize = 4;
pub const L1: usize = 5;
pub const L2: usize = 6;

fn scen(tau: Option<usize>, v: &[usize], faults: &[(usize, &[usize])], p: f64) -> DisruptionScenario {
    let impact: BTreeMap<usize, Vec<usize>> = faults.iter().map(|(c, set)| (*c, set.to_vec())).collect();
    DisruptionScenario {
        tau,
        exogenous: v.to_vec(),
        faults: faults.iter().map(|(c, _)| *c).collect(),
        impact,
        probability: p,
    }
}

/// Six handcrafted scenarios on the toy.
pub fn toy_scenarios() -> Vec<DisruptionScenario> {
    vec![
        scen(None, &[], &[], 0.10),
        scen(Some(2), &[], &[(L1, &[L1, B2, L2])], 0.20),
        scen(Some(3), &[], &[(L2, &[L2, B3, G2])], 0.20),
        scen(Some(1), &[L2], &[(L1, &[L1, B1, G1])], 0.15),
        scen(Some(2), &[B3], &[], 0.20),
        scen(Some(4), &[], &[(L1, &[L1]), (L2, &[L2, B2])], 0.15),
    ]
}

/// Random scenario set on the toy, reproducible from `seed`.
pub fn random_toy_scenarios(case: &PowerCase, seed: u64, n: usize) -> Vec<DisruptionScenario> {
    let rng = RngStream::new(seed, 0, Purpose::Fault, 99);
    let t_max = case.horizon();
    let nc = case.n_components();
    let mut k = 0u64;
    let mut next = || {
        k += 1;
        rng.uniform(k, 0)
    };
    let mut raw: Vec<f64> = Vec::new();
    let mut out = Vec::new();
    for _ in 0..n {
        let w = 0.2 + next();
        raw.push(w);
        if next() < 0.15 {
            out.push(DisruptionScenario::benign(0.0));
            continue;
        }
        let tau = 1 + (next() * t_max as f64) as usize;
        let mut exogenous = Vec::new();
        let mut faults = Vec::new();
        let mut impact = BTreeMap::new();
        for c in 0..nc {
            if next() < 0.12 {
                exogenous.push(c);
            }
        }
        for l in 0..case.n_lines() {
            let c = case.flat_index(ComponentId::line(l));
            if next() < 0.5 {
                faults.push(c);
                let mut set = vec![c];
                for k2 in 0..nc {
                    if k2 != c && next() < 0.3 {
                        set.push(k2);
                    }
                }
                set.sort();
                impact.insert(c, set);
            }
        }
        if exogenous.is_empty() && faults.is_empty() {
            faults.push(case.flat_index(ComponentId::line(0)));
            impact.insert(faults[0], vec![faults[0]]);
        }
        out.push(DisruptionScenario { tau: Some(tau), exogenous, faults, impact, probability: 0.0 });
    }
    let total: f64 = raw.iter().sum();
    for (s, w) in out.iter_mut().zip(raw) {
        s.probability = w / total;
    }
    out
}

/// Exhaustive reference solver, independent of the crate's model builders.
pub struct Oracle<'a> {
    pub case: &'a PowerCase,
    shed: HashMap<(u32, usize), f64>,
    value: HashMap<(usize, u32), f64>,
}

impl<'a> Oracle<'a> {
    pub fn new(case: &'a PowerCase) -> Self {
        assert!(case.n_components() <= 31);
        Oracle { case, shed: HashMap::new(), value: HashMap::new() }
    }

    pub fn bits(on: &[f64]) -> u32 {
        on.iter().enumerate().fold(0, |m, (c, &v)| if v > 0.5 { m | (1 << c) } else { m })
    }

    fn is_on(mask: u32, c: usize) -> bool {
        mask & (1 << c) != 0
    }

    /// Minimum shed of period `t` with energization `mask`, solved as an LP
    /// written straight against HiGHS.
    pub fn period_shed(&mut self, mask: u32, t: usize) -> f64 {
        if let Some(v) = self.shed.get(&(mask, t)) {
            return *v;
        }
        let weights: Vec<f64> = self.case.network.loads.iter().map(|l| l.priority).collect();
        let v = self.weighted_shed(mask, t, &weights);
        self.shed.insert((mask, t), v);
        v
    }

    /// `min Σ_d weights[d] (1 − x_d)` over period `t`'s dispatch.
    pub fn weighted_shed(&self, mask: u32, t: usize, weights: &[f64]) -> f64 {
        let case = self.case;
        let nb = case.n_buses();
        let ng = case.n_generators();
        let bus_on = |i: usize| Self::is_on(mask, i);
        let mut pb = RowProblem::new();
        let theta: Vec<_> = (0..nb).map(|_| pb.add_column(0.0, f64::NEG_INFINITY..f64::INFINITY)).collect();
        let mut balance: Vec<Vec<(highs::Col, f64)>> = vec![Vec::new(); nb];
        for (g, gen) in case.network.generators.iter().enumerate() {
            let i = case.gen_bus(g);
            let on = bus_on(i) && Self::is_on(mask, nb + g);
            let (lo, hi) = if on { (gen.p_min, gen.p_max) } else { (0.0, 0.0) };
            let col = pb.add_column(0.0, lo..=hi);
            balance[i].push((col, 1.0));
        }
        for (l, line) in case.network.lines.iter().enumerate() {
            let (i, j) = case.line_ends(l);
            let on = bus_on(i) && bus_on(j) && Self::is_on(mask, nb + ng + l);
            if !on {
                continue;
            }
            let w = line.thermal_limit;
            let p = pb.add_column(0.0, -w..=w);
            pb.add_row(0.0..=0.0, [(p, 1.0), (theta[i], -line.susceptance), (theta[j], line.susceptance)]);
            balance[i].push((p, -1.0));
            balance[j].push((p, 1.0));
        }
        let mut constant = 0.0;
        for d in 0..case.n_loads() {
            let i = case.load_bus(d);
            constant += weights[d];
            let hi = if bus_on(i) { 1.0 } else { 0.0 };
            let x = pb.add_column(-weights[d], 0.0..=hi);
            balance[i].push((x, -case.demand(d, t).unwrap()));
        }
        for row in balance {
            pb.add_row(0.0..=0.0, row);
        }
        let mut model = pb.optimise(Sense::Minimise);
        model.make_quiet();
        let solved = model.solve();
        assert_eq!(solved.status(), HighsModelStatus::Optimal);
        constant + solved.objective_value()
    }

    fn logic_ok(&self, mask: u32) -> bool {
        let case = self.case;
        let nb = case.n_buses();
        let ng = case.n_generators();
        (0..ng).all(|g| !Self::is_on(mask, nb + g) || Self::is_on(mask, case.gen_bus(g)))
            && (0..case.n_lines()).all(|l| {
                let (i, j) = case.line_ends(l);
                !Self::is_on(mask, nb + ng + l) || (Self::is_on(mask, i) && Self::is_on(mask, j))
            })
    }

    /// `f^ω` at `anchor` by enumerating the functional set `y`.
    pub fn second_stage(&mut self, w: usize, s: &DisruptionScenario, anchor: &[f64]) -> f64 {
        let am = Self::bits(anchor);
        if let Some(v) = self.value.get(&(w, am)) {
            return *v;
        }
        let case = self.case;
        let n = case.n_components();
        let mut eta = vec![false; n];
        for &c in &s.exogenous {
            eta[c] = true;
        }
        for &c in &s.faults {
            if anchor[c] > 0.5 {
                for &k in &s.impact[&c] {
                    eta[k] = true;
                }
            }
        }
        let damage: f64 = (0..n)
            .filter(|&c| eta[c])
            .map(|c| case.damage_cost(case.component_at(c)))
            .sum();
        let allowed = (0..n).fold(0u32, |m, c| if anchor[c] > 0.5 && !eta[c] { m | (1 << c) } else { m });
        let tau = s.tau.unwrap();
        let mut best = f64::INFINITY;
        let mut sub = allowed;
        loop {
            if self.logic_ok(sub) {
                let shed: f64 = (tau..=case.horizon()).map(|t| self.period_shed(sub, t)).sum();
                best = best.min(shed + damage);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & allowed;
        }
        self.value.insert((w, am), best);
        best
    }

    /// Every monotone, logic-consistent schedule as off-periods per component.
    pub fn plans(&self) -> Vec<Vec<usize>> {
        let n = self.case.n_components();
        let t_max = self.case.horizon();
        let mut out = Vec::new();
        let mut off = vec![1usize; n];
        loop {
            let ok = (1..=t_max).all(|t| {
                let mask = (0..n).fold(0u32, |m, c| if t < off[c] { m | (1 << c) } else { m });
                self.logic_ok(mask)
            });
            if ok {
                out.push(off.clone());
            }
            let mut c = 0;
            loop {
                if c == n {
                    return out;
                }
                off[c] += 1;
                if off[c] <= t_max + 1 {
                    break;
                }
                off[c] = 1;
                c += 1;
            }
        }
    }

    pub fn state(off: &[usize], t: usize) -> Vec<f64> {
        off.iter().map(|&k| if t < k { 1.0 } else { 0.0 }).collect()
    }

    /// Expected cost of a schedule under `scenarios` with optimal dispatch.
    pub fn plan_cost(&mut self, off: &[usize], scenarios: &[DisruptionScenario]) -> f64 {
        let t_max = self.case.horizon();
        let mut total = 0.0;
        for (w, s) in scenarios.iter().enumerate() {
            if s.probability == 0.0 {
                continue;
            }
            let tau = s.onset(t_max);
            let mut cost = 0.0;
            for t in 1..tau {
                cost += self.period_shed(Self::bits(&Self::state(off, t)), t);
            }
            if s.is_disruptive() {
                cost += self.second_stage(w, s, &Self::state(off, tau - 1));
            }
            total += s.probability * cost;
        }
        total
    }

    /// Worst-case cost of a schedule over `scenarios`.
    pub fn plan_worst(&mut self, off: &[usize], scenarios: &[DisruptionScenario]) -> f64 {
        let t_max = self.case.horizon();
        let mut worst = f64::NEG_INFINITY;
        for (w, s) in scenarios.iter().enumerate() {
            let tau = s.onset(t_max);
            let mut cost: f64 = (1..tau).map(|t| self.period_shed(Self::bits(&Self::state(off, t)), t)).sum();
            if s.is_disruptive() {
                cost += self.second_stage(w, s, &Self::state(off, tau - 1));
            }
            worst = worst.max(cost);
        }
        worst
    }

    /// Exhaustive optimum of the expected-cost model.
    pub fn optimum(&mut self, scenarios: &[DisruptionScenario]) -> (f64, Vec<usize>) {
        let mut best = (f64::INFINITY, Vec::new());
        for off in self.plans() {
            let v = self.plan_cost(&off, scenarios);
            if v < best.0 {
                best = (v, off);
            }
        }
        best
    }
}
