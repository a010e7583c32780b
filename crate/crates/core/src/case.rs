//! Power network data model: buses, generators, lines and loads with their
//! cost ratings, fire-related attributes and the peak/off-peak demand profile.
//!
//! Cases are stored as TOML documents with four sections (`network`,
//! `costs`, `environment`, `demand`). See `docs/case-format.md` for the
//! schema.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const DEFAULT_CASE_VERSION: u32 = 1;
pub const LINE_COST_PER_KM: f64 = 0.285;
pub const BUS_DAMAGE_COST: f64 = 50.0;
pub const MIN_LOAD_PRIORITY: f64 = 50.0;
pub const MAX_LOAD_PRIORITY: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FuelKind {
    Wind,
    #[default]
    Thermal,
    Nuclear,
}

impl FuelKind {
    pub fn default_damage_cost(self) -> f64 {
        match self {
            FuelKind::Wind => 50.0,
            FuelKind::Thermal => 1000.0,
            FuelKind::Nuclear => 2500.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: String,
    pub latitude: f64,
    pub longitude: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damage_cost: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub id: String,
    pub bus: String,
    pub p_min: f64,
    pub p_max: f64,
    #[serde(default)]
    pub fuel: FuelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damage_cost: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub id: String,
    pub from: String,
    pub to: String,
    pub susceptance: f64,
    pub thermal_limit: f64,
    pub length_km: f64,
    pub wfpi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damage_cost: Option<f64>,
    /// Hourly fault rate; falls back to `environment.default_fault_rate`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Load {
    pub id: String,
    pub bus: String,
    pub base_demand: f64,
    pub priority: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Network {
    #[serde(default)]
    pub buses: Vec<Bus>,
    #[serde(default)]
    pub generators: Vec<Generator>,
    #[serde(default)]
    pub lines: Vec<Line>,
    #[serde(default)]
    pub loads: Vec<Load>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Costs {
    #[serde(default = "default_bus_cost")]
    pub bus_damage_cost: f64,
    #[serde(default = "default_line_cost_per_km")]
    pub line_cost_per_km: f64,
}

fn default_bus_cost() -> f64 {
    BUS_DAMAGE_COST
}

fn default_line_cost_per_km() -> f64 {
    LINE_COST_PER_KM
}

impl Default for Costs {
    fn default() -> Self {
        Costs {
            bus_damage_cost: BUS_DAMAGE_COST,
            line_cost_per_km: LINE_COST_PER_KM,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    /// Uniform hourly fault rate applied to lines without an explicit rate.
    #[serde(default)]
    pub default_fault_rate: f64,
    #[serde(default = "default_angle_lower")]
    pub angle_lower: f64,
    #[serde(default = "default_angle_upper")]
    pub angle_upper: f64,
    /// Multiplier on the WFPI-share ignition probability of each cell.
    #[serde(default = "one")]
    pub ignition_scale: f64,
    /// Uniform spread-layer defaults; a raster file may override per cell.
    #[serde(default = "default_q0")]
    pub spread_reference: f64,
    #[serde(default)]
    pub vegetation: f64,
    #[serde(default)]
    pub density: f64,
    #[serde(default = "one")]
    pub slope_factor: f64,
}

fn default_q0() -> f64 {
    0.58
}

fn default_angle_lower() -> f64 {
    -std::f64::consts::FRAC_PI_2
}

fn default_angle_upper() -> f64 {
    std::f64::consts::FRAC_PI_2
}

impl Default for Environment {
    fn default() -> Self {
        Environment {
            default_fault_rate: 0.0,
            angle_lower: default_angle_lower(),
            angle_upper: default_angle_upper(),
            ignition_scale: 1.0,
            spread_reference: default_q0(),
            vegetation: 0.0,
            density: 0.0,
            slope_factor: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandProfile {
    pub horizon: usize,
    #[serde(default)]
    pub peak_periods: BTreeSet<usize>,
    #[serde(default = "one")]
    pub peak_factor: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CaseFile {
    #[serde(default = "default_version")]
    version: u32,
    #[serde(default)]
    name: String,
    network: Network,
    #[serde(default)]
    costs: Costs,
    #[serde(default)]
    environment: Environment,
    demand: DemandProfile,
}

fn default_version() -> u32 {
    DEFAULT_CASE_VERSION
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentKind {
    Bus,
    Generator,
    Line,
}

/// A component of the network. Buses, generators and lines together form the
/// component set; loads are not components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ComponentId {
    pub kind: ComponentKind,
    pub index: usize,
}

impl ComponentId {
    pub fn bus(index: usize) -> Self {
        ComponentId { kind: ComponentKind::Bus, index }
    }
    pub fn generator(index: usize) -> Self {
        ComponentId { kind: ComponentKind::Generator, index }
    }
    pub fn line(index: usize) -> Self {
        ComponentId { kind: ComponentKind::Line, index }
    }
}

impl fmt::Display for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            ComponentKind::Bus => "bus",
            ComponentKind::Generator => "gen",
            ComponentKind::Line => "line",
        };
        write!(f, "{tag}#{}", self.index)
    }
}

/// Validated, immutable network description.
///
/// Generator, line and load references are resolved to bus indices at load
/// time; `gen_bus[g]`, `line_ends[l]` and `load_bus[d]` hold them.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerCase {
    pub name: String,
    pub network: Network,
    pub costs: Costs,
    pub environment: Environment,
    pub demand: DemandProfile,
    gen_bus: Vec<usize>,
    line_ends: Vec<(usize, usize)>,
    load_bus: Vec<usize>,
}

impl PowerCase {
    pub fn new(
        name: impl Into<String>,
        network: Network,
        costs: Costs,
        environment: Environment,
        demand: DemandProfile,
    ) -> Result<Self> {
        let bus_index: HashMap<&str, usize> = network
            .buses
            .iter()
            .enumerate()
            .map(|(i, b)| (b.id.as_str(), i))
            .collect();
        if bus_index.len() != network.buses.len() {
            return Err(Error::validation("duplicate bus id"));
        }
        let lookup = |what: &str, id: &str, bus: &str| -> Result<usize> {
            bus_index
                .get(bus)
                .copied()
                .ok_or_else(|| Error::validation(format!("{what} {id}: bus {bus} not found")))
        };
        let gen_bus = network
            .generators
            .iter()
            .map(|g| lookup("generator", &g.id, &g.bus))
            .collect::<Result<Vec<_>>>()?;
        let line_ends = network
            .lines
            .iter()
            .map(|l| Ok((lookup("line", &l.id, &l.from)?, lookup("line", &l.id, &l.to)?)))
            .collect::<Result<Vec<_>>>()?;
        let load_bus = network
            .loads
            .iter()
            .map(|d| lookup("load", &d.id, &d.bus))
            .collect::<Result<Vec<_>>>()?;

        let case = PowerCase {
            name: name.into(),
            network,
            costs,
            environment,
            demand,
            gen_bus,
            line_ends,
            load_bus,
        };
        case.validate()?;
        Ok(case)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Validation(msg));
        if self.network.buses.is_empty() {
            return bad("case has no buses".into());
        }
        for b in &self.network.buses {
            if !b.latitude.is_finite() || !b.longitude.is_finite() {
                return bad(format!("bus {}: missing or non-finite coordinates", b.id));
            }
            if b.damage_cost.is_some_and(|c| c < 0.0) {
                return bad(format!("bus {}: negative damage cost", b.id));
            }
        }
        for g in &self.network.generators {
            if !(g.p_min <= g.p_max) {
                return bad(format!("generator {}: p_min exceeds p_max", g.id));
            }
            if g.damage_cost.is_some_and(|c| c < 0.0) {
                return bad(format!("generator {}: negative damage cost", g.id));
            }
        }
        for l in &self.network.lines {
            if !(l.susceptance > 0.0) {
                return bad(format!("line {}: susceptance magnitude must be positive", l.id));
            }
            if !(l.thermal_limit > 0.0) {
                return bad(format!("line {}: thermal limit must be positive", l.id));
            }
            if !(l.wfpi >= 0.0) {
                return bad(format!("line {}: negative wfpi", l.id));
            }
            if l.fault_rate.is_some_and(|r| !(r >= 0.0)) {
                return bad(format!("line {}: negative fault rate", l.id));
            }
            if l.damage_cost.is_some_and(|c| c < 0.0) {
                return bad(format!("line {}: negative damage cost", l.id));
            }
            if !(l.length_km >= 0.0) {
                return bad(format!("line {}: negative length", l.id));
            }
        }
        for d in &self.network.loads {
            if !(d.priority > 0.0) {
                return bad(format!("load {}: priority must be positive", d.id));
            }
            if !(d.base_demand >= 0.0) {
                return bad(format!("load {}: negative demand", d.id));
            }
        }
        let env = &self.environment;
        if !(env.default_fault_rate >= 0.0) {
            return bad("environment: negative default fault rate".into());
        }
        if !(env.angle_lower < 0.0 && 0.0 < env.angle_upper) {
            return bad("environment: angle bounds must satisfy lower < 0 < upper".into());
        }
        if !(env.ignition_scale >= 0.0) {
            return bad("environment: negative ignition scale".into());
        }
        if !(0.0..=1.0).contains(&env.spread_reference) {
            return bad("environment: spread reference probability outside [0, 1]".into());
        }
        if !(self.costs.bus_damage_cost >= 0.0) {
            return bad("costs: negative bus damage cost".into());
        }
        if self.demand.horizon == 0 {
            return bad("demand: horizon must be at least one period".into());
        }
        if let Some(&p) = self.demand.peak_periods.iter().find(|&&p| p == 0 || p > self.demand.horizon) {
            return bad(format!("demand: peak period {p} outside 1..={}", self.demand.horizon));
        }
        if !(self.demand.peak_factor > 0.0) {
            return bad("demand: peak factor must be positive".into());
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: CaseFile = toml::from_str(text).map_err(|e| Error::parse(e.to_string()))?;
        if file.version != DEFAULT_CASE_VERSION {
            return Err(Error::parse(format!("unsupported case version {}", file.version)));
        }
        PowerCase::new(file.name, file.network, file.costs, file.environment, file.demand)
    }

    pub fn to_toml_string(&self) -> String {
        let file = CaseFile {
            version: DEFAULT_CASE_VERSION,
            name: self.name.clone(),
            network: self.network.clone(),
            costs: self.costs.clone(),
            environment: self.environment.clone(),
            demand: self.demand.clone(),
        };
        toml::to_string_pretty(&file).expect("case serializes")
    }

    /// Hex SHA-256 of the canonical serialization; embedded in downstream
    /// artifacts so they can refuse a mismatched case.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml_string().as_bytes()))
    }

    pub fn horizon(&self) -> usize {
        self.demand.horizon
    }

    pub fn n_buses(&self) -> usize {
        self.network.buses.len()
    }

    pub fn n_generators(&self) -> usize {
        self.network.generators.len()
    }

    pub fn n_lines(&self) -> usize {
        self.network.lines.len()
    }

    pub fn n_loads(&self) -> usize {
        self.network.loads.len()
    }

    pub fn n_components(&self) -> usize {
        self.n_buses() + self.n_generators() + self.n_lines()
    }

    pub fn gen_bus(&self, g: usize) -> usize {
        self.gen_bus[g]
    }

    pub fn line_ends(&self, l: usize) -> (usize, usize) {
        self.line_ends[l]
    }

    pub fn load_bus(&self, d: usize) -> usize {
        self.load_bus[d]
    }

    /// Components in flat order: buses, then generators, then lines.
    pub fn components(&self) -> impl Iterator<Item = ComponentId> + '_ {
        let (nb, ng, nl) = (self.n_buses(), self.n_generators(), self.n_lines());
        (0..nb)
            .map(ComponentId::bus)
            .chain((0..ng).map(ComponentId::generator))
            .chain((0..nl).map(ComponentId::line))
    }

    pub fn flat_index(&self, c: ComponentId) -> usize {
        match c.kind {
            ComponentKind::Bus => c.index,
            ComponentKind::Generator => self.n_buses() + c.index,
            ComponentKind::Line => self.n_buses() + self.n_generators() + c.index,
        }
    }

    pub fn component_at(&self, flat: usize) -> ComponentId {
        let (nb, ng) = (self.n_buses(), self.n_generators());
        if flat < nb {
            ComponentId::bus(flat)
        } else if flat < nb + ng {
            ComponentId::generator(flat - nb)
        } else {
            ComponentId::line(flat - nb - ng)
        }
    }

    pub fn component_name(&self, c: ComponentId) -> &str {
        match c.kind {
            ComponentKind::Bus => &self.network.buses[c.index].id,
            ComponentKind::Generator => &self.network.generators[c.index].id,
            ComponentKind::Line => &self.network.lines[c.index].id,
        }
    }

    /// Damage cost r_c, using the default rating when the case leaves it unset.
    pub fn damage_cost(&self, c: ComponentId) -> f64 {
        match c.kind {
            ComponentKind::Bus => self.network.buses[c.index]
                .damage_cost
                .unwrap_or(self.costs.bus_damage_cost),
            ComponentKind::Generator => {
                let g = &self.network.generators[c.index];
                g.damage_cost.unwrap_or_else(|| g.fuel.default_damage_cost())
            }
            ComponentKind::Line => {
                let l = &self.network.lines[c.index];
                l.damage_cost.unwrap_or(self.costs.line_cost_per_km * l.length_km)
            }
        }
    }

    pub fn fault_rate(&self, line: usize) -> f64 {
        self.network.lines[line]
            .fault_rate
            .unwrap_or(self.environment.default_fault_rate)
    }

    pub fn is_peak(&self, t: usize) -> bool {
        self.demand.peak_periods.contains(&t)
    }

    /// Demand of load `d` in period `t` (1-based).
    pub fn demand(&self, d: usize, t: usize) -> Result<f64> {
        if t == 0 || t > self.horizon() {
            return Err(Error::OutOfRange(format!("period {t} outside 1..={}", self.horizon())));
        }
        let load = self
            .network
            .loads
            .get(d)
            .ok_or_else(|| Error::OutOfRange(format!("load index {d}")))?;
        Ok(self.demand_unchecked(load.base_demand, t))
    }

    pub(crate) fn demand_unchecked(&self, base: f64, t: usize) -> f64 {
        if self.is_peak(t) {
            base * self.demand.peak_factor
        } else {
            base
        }
    }

    /// Returns a copy with every unset damage cost materialized and load
    /// priorities clamped into the supported rating range.
    pub fn default_cost_ratings(&self) -> PowerCase {
        let mut out = self.clone();
        for i in 0..out.n_buses() {
            let c = self.damage_cost(ComponentId::bus(i));
            out.network.buses[i].damage_cost = Some(c);
        }
        for g in 0..out.n_generators() {
            let c = self.damage_cost(ComponentId::generator(g));
            out.network.generators[g].damage_cost = Some(c);
        }
        for l in 0..out.n_lines() {
            let c = self.damage_cost(ComponentId::line(l));
            out.network.lines[l].damage_cost = Some(c);
        }
        for d in &mut out.network.loads {
            d.priority = d.priority.clamp(MIN_LOAD_PRIORITY, MAX_LOAD_PRIORITY);
        }
        out
    }

    pub fn total_wfpi(&self) -> f64 {
        self.network.lines.iter().map(|l| l.wfpi).sum()
    }

    pub fn buses_lines(&self, bus: usize) -> impl Iterator<Item = usize> + '_ {
        self.line_ends
            .iter()
            .enumerate()
            .filter(move |(_, &(i, j))| i == bus || j == bus)
            .map(|(l, _)| l)
    }
}

pub fn load_case(path: impl AsRef<Path>) -> Result<PowerCase> {
    let text = std::fs::read_to_string(path.as_ref())?;
    PowerCase::from_toml_str(&text)
}

pub fn save_case(case: &PowerCase, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, case.to_toml_string())?;
    Ok(())
}
