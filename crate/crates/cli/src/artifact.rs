//! Run configuration, stamped artifacts and the output manifest.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use psps_core::{Error, PowerCase};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const MANIFEST: &str = "manifest.json";

/// Process exit codes.
pub mod code {
    pub const LIMIT: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const IO: i32 = 3;
    pub const SOLVER: i32 = 4;
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError { code: code::VALIDATION, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError { code: code::IO, message: message.into() }
    }

    pub fn limit(message: impl Into<String>) -> Self {
        CliError { code: code::LIMIT, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io(_) => code::IO,
            Error::Solver(_) | Error::ModelBuild(_) => code::SOLVER,
            Error::IterationLimit { .. } => code::LIMIT,
            Error::Parse(_) | Error::Validation(_) | Error::OutOfRange(_) | Error::OutOfDomain(_) => code::VALIDATION,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::validation(format!("malformed JSON: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Everything that determines a run's results, plus the plumbing fields
/// (`threads`, `out`) that do not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub case: Option<PathBuf>,
    pub seed: u64,
    pub scenarios: Option<usize>,
    pub cell_size: Option<f64>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub cut: Option<String>,
    pub solver: String,
    pub threads: usize,
    pub out: PathBuf,
    /// Input files other than the case.
    pub inputs: Vec<PathBuf>,
    pub params: Value,
}

impl RunConfig {
    pub fn new(command: &str, seed: u64, solver: &str, threads: usize, out: &Path) -> Self {
        RunConfig {
            command: command.into(),
            case: None,
            seed,
            scenarios: None,
            cell_size: None,
            epsilon: None,
            delta: None,
            cut: None,
            solver: solver.into(),
            threads,
            out: out.to_path_buf(),
            inputs: Vec::new(),
            params: Value::Null,
        }
    }

    /// Checks that referenced files exist and numeric fields are in range.
    pub fn validate(&self) -> CliResult<()> {
        for p in self.case.iter().chain(&self.inputs) {
            if !p.is_file() {
                return Err(CliError::io(format!("input file not found: {}", p.display())));
            }
        }
        if self.scenarios == Some(0) {
            return Err(CliError::validation("scenario count must be at least 1"));
        }
        if let Some(s) = self.cell_size {
            if !(s.is_finite() && s > 0.0) {
                return Err(CliError::validation("cell size must be positive"));
            }
        }
        if let Some(e) = self.epsilon {
            if !(e.is_finite() && e >= 0.0) {
                return Err(CliError::validation("epsilon must be a finite value ≥ 0"));
            }
        }
        if let Some(d) = self.delta {
            if !(0.0..1.0).contains(&d) {
                return Err(CliError::validation("delta must lie in [0, 1)"));
            }
        }
        psps_core::milp::backend_by_name(&self.solver)?;
        Ok(())
    }

    /// Hash over the result-determining fields: file contents replace
    /// paths, and thread count and output directory are left out.
    pub fn hash(&self, case: Option<&PowerCase>) -> CliResult<String> {
        let inputs = self.inputs.iter().map(|p| file_sha256(p)).collect::<CliResult<Vec<_>>>()?;
        let view = serde_json::json!({
            "command": self.command,
            "case": case.map(PowerCase::hash),
            "seed": self.seed,
            "scenarios": self.scenarios,
            "cell_size": self.cell_size,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "cut": self.cut,
            "solver": self.solver,
            "inputs": inputs,
            "params": self.params,
        });
        Ok(hex::encode(Sha256::digest(view.to_string().as_bytes())))
    }
}

pub fn file_sha256(path: &Path) -> CliResult<String> {
    let bytes = fs::read(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stamp {
    pub kind: String,
    pub tool_version: String,
    pub config_hash: String,
    pub case_hash: String,
}

/// A JSON artifact carrying the hashes of the run that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Artifact<T> {
    pub stamp: Stamp,
    pub data: T,
}

impl<T: Serialize + DeserializeOwned> Artifact<T> {
    pub fn new(kind: &str, config_hash: &str, case_hash: &str, data: T) -> Self {
        Artifact {
            stamp: Stamp {
                kind: kind.into(),
                tool_version: env!("CARGO_PKG_VERSION").into(),
                config_hash: config_hash.into(),
                case_hash: case_hash.into(),
            },
            data,
        }
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    /// Loads an artifact of `kind`, refusing one produced for another case.
    pub fn load(path: &Path, kind: &str, case: Option<&PowerCase>) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        let art: Artifact<T> = serde_json::from_str(&text)
            .map_err(|e| CliError::validation(format!("{}: not a {kind} artifact ({e})", path.display())))?;
        if art.stamp.kind != kind {
            return Err(CliError::validation(format!(
                "{}: expected a {kind} artifact, found {}",
                path.display(),
                art.stamp.kind
            )));
        }
        if let Some(case) = case {
            if art.stamp.case_hash != case.hash() {
                return Err(CliError::validation(format!(
                    "{}: produced for a different case (hash mismatch)",
                    path.display()
                )));
            }
        }
        Ok(art)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileRef {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: RunConfig,
    pub config_hash: String,
    pub case_hash: Option<String>,
    pub outputs: Vec<FileRef>,
    pub summary: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    /// Latest run of each subcommand into this directory.
    pub runs: BTreeMap<String, RunRecord>,
}

/// Collects outputs of one run and records them in the manifest.
pub struct OutputDir {
    pub dir: PathBuf,
    pub config: RunConfig,
    pub config_hash: String,
    pub case_hash: Option<String>,
    outputs: Vec<String>,
}

impl OutputDir {
    pub fn create(config: RunConfig, case: Option<&PowerCase>) -> CliResult<Self> {
        let config_hash = config.hash(case)?;
        let dir = config.out.clone();
        fs::create_dir_all(&dir).map_err(|e| CliError::io(format!("{}: {e}", dir.display())))?;
        Ok(OutputDir { dir, config, config_hash, case_hash: case.map(PowerCase::hash), outputs: Vec::new() })
    }

    /// Path of a new output file, registered for the manifest.
    pub fn file(&mut self, name: &str) -> PathBuf {
        if !self.outputs.iter().any(|o| o == name) {
            self.outputs.push(name.into());
        }
        self.dir.join(name)
    }

    pub fn save<T: Serialize + DeserializeOwned>(&mut self, name: &str, kind: &str, data: T) -> CliResult<PathBuf> {
        let path = self.file(name);
        let case_hash = self.case_hash.clone().unwrap_or_default();
        Artifact::new(kind, &self.config_hash, &case_hash, data).save(&path)?;
        Ok(path)
    }

    pub fn write_csv(&mut self, name: &str, f: impl FnOnce(fs::File) -> psps_core::Result<()>) -> CliResult<PathBuf> {
        let path = self.file(name);
        f(fs::File::create(&path)?)?;
        Ok(path)
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> CliResult<PathBuf> {
        let path = self.file(name);
        fs::write(&path, text)?;
        Ok(path)
    }

    pub fn finish(self, summary: Value) -> CliResult<()> {
        let path = self.dir.join(MANIFEST);
        let mut manifest = match fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str(&text)?,
            Err(_) => Manifest { tool: "psps".into(), version: env!("CARGO_PKG_VERSION").into(), runs: BTreeMap::new() },
        };
        let outputs = self
            .outputs
            .iter()
            .map(|f| Ok(FileRef { file: f.clone(), sha256: file_sha256(&self.dir.join(f))? }))
            .collect::<CliResult<Vec<_>>>()?;
        manifest.runs.insert(
            self.config.command.clone(),
            RunRecord {
                config: self.config,
                config_hash: self.config_hash,
                case_hash: self.case_hash,
                outputs,
                summary,
            },
        );
        fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
        Ok(())
    }
}
