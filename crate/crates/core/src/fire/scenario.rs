//! Disruption scenarios and the line-delimited scenario file.
//!
//! File layout: the first line is a JSON header (`"kind": "header"`) with
//! the seed, scenario count, case hash and grid geometry; every following
//! line is one scenario record with sparse `v`, `u` and `I` lists.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::case::PowerCase;
use crate::error::{Error, Result};
use crate::geo::GridGeometry;

pub const SCENARIO_FILE_VERSION: u32 = 1;

/// One realisation of the disruption: onset period, exogenous damage,
/// faults and the component sets each fault's fire would reach.
/// Component references are flat indices (buses, generators, lines).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisruptionScenario {
    /// Onset period; `None` for a scenario without disruption.
    pub tau: Option<usize>,
    /// Components damaged by exogenous fire.
    #[serde(rename = "v")]
    pub exogenous: Vec<usize>,
    /// Components that fault.
    #[serde(rename = "u")]
    pub faults: Vec<usize>,
    /// Components reached by the fire started at each faulted component.
    #[serde(rename = "I")]
    pub impact: BTreeMap<usize, Vec<usize>>,
    #[serde(rename = "p")]
    pub probability: f64,
}

impl DisruptionScenario {
    pub fn benign(probability: f64) -> Self {
        DisruptionScenario {
            tau: None,
            exogenous: Vec::new(),
            faults: Vec::new(),
            impact: BTreeMap::new(),
            probability,
        }
    }

    pub fn is_disruptive(&self) -> bool {
        self.tau.is_some()
    }

    /// Onset period with `horizon + 1` standing in for "no disruption".
    pub fn onset(&self, horizon: usize) -> usize {
        self.tau.unwrap_or(horizon + 1)
    }

    pub fn exogenous_dense(&self, n: usize) -> Vec<bool> {
        let mut v = vec![false; n];
        for &c in &self.exogenous {
            v[c] = true;
        }
        v
    }

    pub fn validate(&self, case: &PowerCase) -> Result<()> {
        let n = case.n_components();
        let t_max = case.horizon();
        if let Some(t) = self.tau {
            if t == 0 || t > t_max {
                return Err(Error::validation(format!("scenario onset {t} outside 1..={t_max}")));
            }
        } else if !self.exogenous.is_empty() || !self.faults.is_empty() {
            return Err(Error::validation("scenario without onset carries damage"));
        }
        let in_range = |c: &usize| *c < n;
        if !self.exogenous.iter().all(in_range) || !self.faults.iter().all(in_range) {
            return Err(Error::validation("scenario references unknown component"));
        }
        for &c in &self.faults {
            match self.impact.get(&c) {
                Some(set) if set.contains(&c) && set.iter().all(in_range) => {}
                _ => return Err(Error::validation(format!("fault at component {c} lacks a valid impact set"))),
            }
        }
        if !(self.probability >= 0.0 && self.probability <= 1.0) {
            return Err(Error::validation(format!("scenario probability {} outside [0, 1]", self.probability)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioHeader {
    pub kind: String,
    pub version: u32,
    pub seed: u64,
    pub count: usize,
    pub case_hash: String,
    pub horizon: usize,
    pub grid: GridGeometry,
    pub exogenous: bool,
    pub endogenous: bool,
    /// Hash of the run configuration that produced the file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub header: ScenarioHeader,
    pub scenarios: Vec<DisruptionScenario>,
}

impl ScenarioFile {
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        serde_json::to_writer(&mut w, &self.header)?;
        w.write_all(b"\n")?;
        for s in &self.scenarios {
            serde_json::to_writer(&mut w, s)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut f)?;
        f.flush()?;
        Ok(())
    }

    pub fn read_from(r: impl std::io::Read) -> Result<Self> {
        let mut lines = BufReader::new(r).lines();
        let first = lines.next().ok_or_else(|| Error::parse("empty scenario file"))??;
        let header: ScenarioHeader = serde_json::from_str(&first)?;
        if header.kind != "header" || header.version != SCENARIO_FILE_VERSION {
            return Err(Error::parse("unrecognised scenario file header"));
        }
        let mut scenarios = Vec::with_capacity(header.count);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            scenarios.push(serde_json::from_str(&line)?);
        }
        if scenarios.len() != header.count {
            return Err(Error::parse(format!(
                "header announces {} scenarios, file holds {}",
                header.count,
                scenarios.len()
            )));
        }
        Ok(ScenarioFile { header, scenarios })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(std::fs::File::open(path)?)
    }

    /// Loads and checks the file against `case`.
    pub fn load_for(path: impl AsRef<Path>, case: &PowerCase) -> Result<Self> {
        let file = Self::load(path)?;
        if file.header.case_hash != case.hash() {
            return Err(Error::validation("scenario file was generated for a different case (hash mismatch)"));
        }
        for s in &file.scenarios {
            s.validate(case)?;
        }
        Ok(file)
    }
}

/// Checks that probabilities sum to one (within `tol`).
pub fn check_distribution(scenarios: &[DisruptionScenario], tol: f64) -> Result<()> {
    if scenarios.is_empty() {
        return Err(Error::validation("scenario set is empty"));
    }
    let total: f64 = scenarios.iter().map(|s| s.probability).sum();
    if (total - 1.0).abs() > tol {
        return Err(Error::validation(format!("scenario probabilities sum to {total}")));
    }
    Ok(())
}
