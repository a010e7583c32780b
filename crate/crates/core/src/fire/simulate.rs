//! Four-state cellular automaton for exogenous and endogenous fires.
//!
//! Within a period the update is synchronous: ignited cells start burning,
//! every burning cell then tries once to ignite each fuel neighbour, and
//! fuel cells may ignite exogenously. A cell that ignites in period `t`
//! burns from `t + 1` on.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::env::{fault_probability, CellState, EnvLayers};
use super::rng::{Purpose, RngStream};
use super::scenario::DisruptionScenario;
use crate::case::{ComponentId, PowerCase};
use crate::error::{Error, Result};
use crate::geo::{CellMaps, GridGeometry};

/// Share of network WFPI carried by the lines crossing cell `k`.
pub fn ignition_prob(case: &PowerCase, maps: &CellMaps, k: usize) -> Result<f64> {
    let total = case.total_wfpi();
    if !(total > 0.0) {
        return Err(Error::validation("total WFPI is zero; ignition probabilities undefined"));
    }
    let lines = maps
        .cell_lines
        .get(k)
        .ok_or_else(|| Error::OutOfRange(format!("cell index {k}")))?;
    Ok(lines.iter().map(|&l| case.network.lines[l].wfpi).sum::<f64>() / total)
}

/// Which fire processes a simulation includes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationMask {
    pub exogenous: bool,
    pub endogenous: bool,
}

impl SimulationMask {
    pub const MIXED: SimulationMask = SimulationMask { exogenous: true, endogenous: true };
    pub const EXOGENOUS_ONLY: SimulationMask = SimulationMask { exogenous: true, endogenous: false };
    pub const ENDOGENOUS_ONLY: SimulationMask = SimulationMask { exogenous: false, endogenous: true };
}

impl Default for SimulationMask {
    fn default() -> Self {
        SimulationMask::MIXED
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExogenousOutcome {
    pub damaged: Vec<bool>,
    pub first_ignition: Option<usize>,
    /// Cell states after each period (index t-1); only filled when tracing.
    pub trace: Vec<Vec<CellState>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EndogenousOutcome {
    pub fault_period: BTreeMap<usize, usize>,
    pub impact: BTreeMap<usize, Vec<usize>>,
    pub first_fault: Option<usize>,
}

#[derive(Clone)]
pub struct Simulator<'a> {
    case: &'a PowerCase,
    geom: &'a GridGeometry,
    maps: &'a CellMaps,
    env: &'a EnvLayers,
    /// Exogenous ignition probability per cell.
    ignition: Vec<f64>,
    /// Per-period fault probability per flat component.
    fault: Vec<f64>,
    /// Flat components located in each cell.
    cell_components: Vec<Vec<usize>>,
    neighbors: Vec<[u32; 8]>,
    pub mask: SimulationMask,
}

const NO_NEIGHBOR: u32 = u32::MAX;

impl<'a> Simulator<'a> {
    pub fn new(case: &'a PowerCase, geom: &'a GridGeometry, maps: &'a CellMaps, env: &'a EnvLayers) -> Result<Self> {
        let n = geom.n_cells();
        if env.fuel.len() != n {
            return Err(Error::validation("environment layers do not match grid size"));
        }
        let mut ignition = vec![0.0; n];
        let total = case.total_wfpi();
        if total > 0.0 {
            for &k in maps.cells_with_line.union(&maps.cells_with_bus) {
                ignition[k] = (env.ignition_scale * ignition_prob(case, maps, k)?).min(1.0);
            }
        }
        let mut fault = vec![0.0; case.n_components()];
        for l in 0..case.n_lines() {
            fault[case.flat_index(ComponentId::line(l))] = fault_probability(case.fault_rate(l));
        }
        let mut cell_components = vec![Vec::new(); n];
        for c in case.components() {
            for k in maps.component_cells(case, c) {
                cell_components[k].push(case.flat_index(c));
            }
        }
        let neighbors = (0..n)
            .map(|k| {
                let mut out = [NO_NEIGHBOR; 8];
                let (col, row) = ((k % geom.n_cols) as i64, (k / geom.n_cols) as i64);
                for (slot, (dc, dr)) in OFFSETS.iter().enumerate() {
                    let (c, r) = (col + dc, row + dr);
                    if c >= 0 && r >= 0 && (c as usize) < geom.n_cols && (r as usize) < geom.n_rows {
                        out[slot] = (r as usize * geom.n_cols + c as usize) as u32;
                    }
                }
                out
            })
            .collect();
        Ok(Simulator {
            case,
            geom,
            maps,
            env,
            ignition,
            fault,
            cell_components,
            neighbors,
            mask: SimulationMask::MIXED,
        })
    }

    pub fn with_mask(mut self, mask: SimulationMask) -> Self {
        self.mask = mask;
        self
    }

    pub fn ignition_probabilities(&self) -> &[f64] {
        &self.ignition
    }

    pub fn set_ignition_probabilities(&mut self, p: Vec<f64>) -> Result<()> {
        if p.len() != self.geom.n_cells() || p.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::validation("ignition probabilities must be per cell and within [0, 1]"));
        }
        self.ignition = p;
        Ok(())
    }

    pub fn set_fault_probability(&mut self, c: ComponentId, p: f64) {
        let i = self.case.flat_index(c);
        self.fault[i] = p;
    }

    pub fn fault_probabilities(&self) -> &[f64] {
        &self.fault
    }

    fn initial_states(&self) -> Vec<CellState> {
        self.env
            .fuel
            .iter()
            .map(|&f| if f { CellState::Fuel } else { CellState::NoFuel })
            .collect()
    }

    /// Exogenous fire over the whole horizon for scenario `stream`.
    pub fn simulate_exogenous(&self, seed: u64, stream: u64, trace: bool) -> ExogenousOutcome {
        let horizon = self.case.horizon();
        let ign = RngStream::new(seed, stream, Purpose::ExogenousIgnition, 0);
        let spread = RngStream::new(seed, stream, Purpose::ExogenousSpread, 0);
        let ignitable: Vec<(usize, f64)> = self
            .ignition
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(k, &p)| (k, p))
            .collect();

        let mut fire = FireFront::new(self.initial_states());
        let mut first_ignition = None;
        let mut history = Vec::new();
        for t in 1..=horizon {
            let mut fresh = fire.advance(self, t, &spread);
            let mut exo = false;
            for &(k, p) in &ignitable {
                if fire.states[k] == CellState::Fuel && ign.bernoulli(p, t as u64, k as u64) {
                    fresh.push(k);
                    exo = true;
                }
            }
            fire.ignite(fresh);
            if exo && first_ignition.is_none() {
                first_ignition = Some(t);
            }
            if trace {
                history.push(fire.states.clone());
            }
        }
        ExogenousOutcome {
            damaged: self.damaged_components(&fire.fired),
            first_ignition,
            trace: history,
        }
    }

    /// Fire started by a fault at component `c` (flat index) in period
    /// `start`, propagated to the end of the horizon on its own sub-stream.
    /// Returns the sorted set of reached components, `c` included.
    pub fn endogenous_fire(&self, seed: u64, stream: u64, c: usize, start: usize) -> Vec<usize> {
        self.endogenous_fire_traced(seed, stream, c, start, false).0
    }

    pub fn endogenous_fire_traced(
        &self,
        seed: u64,
        stream: u64,
        c: usize,
        start: usize,
        trace: bool,
    ) -> (Vec<usize>, Vec<Vec<CellState>>) {
        let spread = RngStream::new(seed, stream, Purpose::EndogenousSpread, c as u64);
        let mut fire = FireFront::new(self.initial_states());
        let origin = self.maps.component_cells(self.case, self.case.component_at(c));
        fire.ignite(origin);
        let mut history = Vec::new();
        for t in start + 1..=self.case.horizon() {
            let fresh = fire.advance(self, t, &spread);
            fire.ignite(fresh);
            if trace {
                history.push(fire.states.clone());
            }
        }
        let mut reached: BTreeSet<usize> = self.damaged_components(&fire.fired)
            .into_iter()
            .enumerate()
            .filter(|(_, d)| *d)
            .map(|(i, _)| i)
            .collect();
        reached.insert(c);
        (reached.into_iter().collect(), history)
    }

    /// Fault sampling followed by one independent fire per faulted component.
    pub fn simulate_endogenous(&self, seed: u64, stream: u64) -> EndogenousOutcome {
        let draws = RngStream::new(seed, stream, Purpose::Fault, 0);
        let mut fault_period = BTreeMap::new();
        for t in 1..=self.case.horizon() {
            for (c, &p) in self.fault.iter().enumerate() {
                if p > 0.0 && !fault_period.contains_key(&c) && draws.bernoulli(p, t as u64, c as u64) {
                    fault_period.insert(c, t);
                }
            }
        }
        let impact = fault_period
            .iter()
            .map(|(&c, &t)| (c, self.endogenous_fire(seed, stream, c, t)))
            .collect();
        let first_fault = fault_period.values().copied().min();
        EndogenousOutcome { fault_period, impact, first_fault }
    }

    pub fn simulate_scenario(&self, seed: u64, stream: u64, probability: f64) -> DisruptionScenario {
        let (exogenous, first_exo) = if self.mask.exogenous {
            let out = self.simulate_exogenous(seed, stream, false);
            let v = out.damaged.iter().enumerate().filter(|(_, d)| **d).map(|(i, _)| i).collect();
            (v, out.first_ignition)
        } else {
            (Vec::new(), None)
        };
        let (faults, impact, first_fault) = if self.mask.endogenous {
            let out = self.simulate_endogenous(seed, stream);
            (out.fault_period.keys().copied().collect(), out.impact, out.first_fault)
        } else {
            (Vec::new(), BTreeMap::new(), None)
        };
        let tau = match (first_exo, first_fault) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        DisruptionScenario { tau, exogenous, faults, impact, probability }
    }

    /// `n` equally weighted scenarios; scenario `i` uses stream `i`.
    pub fn generate(&self, n: usize, seed: u64) -> Result<Vec<DisruptionScenario>> {
        if n == 0 {
            return Err(Error::validation("scenario count must be at least 1"));
        }
        let p = 1.0 / n as f64;
        Ok((0..n as u64)
            .into_par_iter()
            .map(|i| self.simulate_scenario(seed, i, p))
            .collect())
    }

    fn damaged_components(&self, fired: &[usize]) -> Vec<bool> {
        let mut out = vec![false; self.case.n_components()];
        for &k in fired {
            for &c in &self.cell_components[k] {
                out[c] = true;
            }
        }
        out
    }
}

const OFFSETS: [(i64, i64); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];

struct FireFront {
    states: Vec<CellState>,
    ignited: Vec<usize>,
    /// Burning cells that still have a fuel neighbour.
    active: Vec<usize>,
    fired: Vec<usize>,
}

impl FireFront {
    fn new(states: Vec<CellState>) -> Self {
        FireFront { states, ignited: Vec::new(), active: Vec::new(), fired: Vec::new() }
    }

    /// Ignited cells start burning; burning cells try each fuel neighbour
    /// once. Returns the cells ignited by spread this period.
    fn advance(&mut self, sim: &Simulator<'_>, t: usize, rng: &RngStream) -> Vec<usize> {
        for k in std::mem::take(&mut self.ignited) {
            self.states[k] = CellState::Burning;
            self.active.push(k);
        }
        let mut fresh = Vec::new();
        let states = &self.states;
        self.active.retain(|&b| {
            let mut has_fuel = false;
            for (slot, &k) in sim.neighbors[b].iter().enumerate() {
                if k == NO_NEIGHBOR || states[k as usize] != CellState::Fuel {
                    continue;
                }
                has_fuel = true;
                let k = k as usize;
                let q = sim.env.spread_prob(t, b, k);
                if rng.bernoulli(q, t as u64, (b * 8 + slot) as u64) {
                    fresh.push(k);
                }
            }
            has_fuel
        });
        fresh
    }

    fn ignite(&mut self, cells: Vec<usize>) {
        for k in cells {
            if !self.states[k].on_fire() {
                self.states[k] = CellState::Ignited;
                self.ignited.push(k);
                self.fired.push(k);
            }
        }
    }
}
