//! JSON experiment configurations, validated before any computation.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use unigate_core::compile::{CompileOptions, DEFAULT_BUDGET_BYTES};
use unigate_core::qec::{EpsilonSampling, NoiseSites, Protocol};
use unigate_core::{IndexMode, IndexParams, VariantMode};

use crate::error::{CliError, Result};

pub const CONFIG_VERSION: u32 = 1;

fn config_err(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("`{field}`: {reason}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    Four,
    Two,
}

impl From<ModeName> for VariantMode {
    fn from(m: ModeName) -> Self {
        match m {
            ModeName::Four => VariantMode::Four,
            ModeName::Two => VariantMode::Two,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexKind {
    Exact,
    Approx,
}

impl From<IndexKind> for IndexMode {
    fn from(k: IndexKind) -> Self {
        match k {
            IndexKind::Exact => IndexMode::Exact,
            IndexKind::Approx => IndexMode::Approximate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexConfig {
    #[serde(default = "default_index_kind")]
    pub mode: IndexKind,
    #[serde(default = "defaults::max_degree")]
    pub max_degree: usize,
    #[serde(default = "defaults::build_beam")]
    pub build_beam: usize,
    #[serde(default = "defaults::query_beam")]
    pub query_beam: usize,
    #[serde(default = "defaults::rerank")]
    pub rerank: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_index_kind() -> IndexKind {
    IndexKind::Exact
}

mod defaults {
    use unigate_core::IndexParams;

    pub fn max_degree() -> usize {
        IndexParams::default().max_degree
    }
    pub fn build_beam() -> usize {
        IndexParams::default().build_beam
    }
    pub fn query_beam() -> usize {
        IndexParams::default().query_beam
    }
    pub fn rerank() -> usize {
        IndexParams::default().rerank
    }
    pub fn budget() -> u64 {
        super::DEFAULT_BUDGET_BYTES
    }
}

impl Default for IndexConfig {
    fn default() -> Self {
        let p = IndexParams::default();
        IndexConfig {
            mode: IndexKind::Exact,
            max_degree: p.max_degree,
            build_beam: p.build_beam,
            query_beam: p.query_beam,
            rerank: p.rerank,
            seed: p.seed,
        }
    }
}

impl IndexConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("index.max_degree", self.max_degree),
            ("index.build_beam", self.build_beam),
            ("index.query_beam", self.query_beam),
            ("index.rerank", self.rerank),
        ] {
            if v == 0 {
                return Err(config_err(name, "must be at least 1"));
            }
        }
        if self.max_degree < 2 {
            return Err(config_err("index.max_degree", "must be at least 2"));
        }
        Ok(())
    }

    pub fn params(&self) -> IndexParams {
        IndexParams {
            max_degree: self.max_degree,
            build_beam: self.build_beam,
            query_beam: self.query_beam,
            rerank: self.rerank,
            seed: self.seed,
        }
    }

    pub fn compile_options(&self, budget_bytes: u64) -> CompileOptions {
        CompileOptions {
            mode: self.mode.into(),
            params: self.params(),
            budget_bytes,
            early_exit: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub version: u32,
    pub mode: ModeName,
    /// `cnot`, `swap`, `identity`, or a JSON matrix path.
    #[serde(default = "default_target")]
    pub target: String,
    pub seeds: Vec<u64>,
    pub depths: Vec<usize>,
    #[serde(default)]
    pub index: IndexConfig,
    #[serde(default = "defaults::budget")]
    pub budget_bytes: u64,
    pub output: PathBuf,
    /// Fit summary JSON; defaults to the output path with a `.json` extension.
    #[serde(default)]
    pub summary: Option<PathBuf>,
}

fn default_target() -> String {
    "cnot".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub version: u32,
    pub mode: ModeName,
    pub gate_set_seed: u64,
    pub half_depths: Vec<usize>,
    pub n_targets: usize,
    #[serde(default)]
    pub target_seed: u64,
    #[serde(default)]
    pub index: IndexConfig,
    #[serde(default = "defaults::budget")]
    pub budget_bytes: u64,
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingName {
    Grid,
    LogUniformCell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QecConfig {
    pub version: u32,
    #[serde(default = "all_protocols")]
    pub protocols: Vec<String>,
    /// Explicit ε values; exclusive with `epsilon_grid`.
    #[serde(default)]
    pub epsilons: Option<Vec<f64>>,
    #[serde(default)]
    pub epsilon_grid: Option<GridSpec>,
    pub samples_per_point: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_sites")]
    pub sites: String,
    #[serde(default = "default_sampling")]
    pub sampling: SamplingName,
    pub output: PathBuf,
}

fn all_protocols() -> Vec<String> {
    Protocol::ALL.iter().map(|p| p.as_str().to_string()).collect()
}

fn default_sites() -> String {
    NoiseSites::LogicalOpsOnly.as_str().into()
}

fn default_sampling() -> SamplingName {
    SamplingName::LogUniformCell
}

fn check_version(v: u32) -> Result<()> {
    if v != CONFIG_VERSION {
        return Err(config_err(
            "version",
            format!("{v} is not supported (expected {CONFIG_VERSION})"),
        ));
    }
    Ok(())
}

fn check_budget(b: u64) -> Result<()> {
    if b == 0 {
        return Err(config_err("budget_bytes", "must be positive"));
    }
    Ok(())
}

impl ScalingConfig {
    pub fn validate(&self) -> Result<()> {
        check_version(self.version)?;
        if self.seeds.is_empty() {
            return Err(config_err("seeds", "must not be empty"));
        }
        if self.depths.is_empty() {
            return Err(config_err("depths", "must not be empty"));
        }
        if let Some(d) = self.depths.iter().find(|&&d| d % 2 == 1) {
            return Err(config_err("depths", format!("{d} is odd")));
        }
        if self.depths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config_err("depths", "must be strictly ascending"));
        }
        check_budget(self.budget_bytes)?;
        self.index.validate()
    }

    pub fn summary_path(&self) -> PathBuf {
        self.summary
            .clone()
            .unwrap_or_else(|| self.output.with_extension("json"))
    }
}

impl MeshConfig {
    pub fn validate(&self) -> Result<()> {
        check_version(self.version)?;
        if self.half_depths.is_empty() {
            return Err(config_err("half_depths", "must not be empty"));
        }
        if self.n_targets == 0 {
            return Err(config_err("n_targets", "must be at least 1"));
        }
        check_budget(self.budget_bytes)?;
        self.index.validate()
    }
}

impl QecConfig {
    pub fn validate(&self) -> Result<()> {
        check_version(self.version)?;
        self.protocols()?;
        self.sites()?;
        let eps = self.epsilons()?;
        if eps.is_empty() {
            return Err(config_err("epsilons", "must not be empty"));
        }
        if let Some(e) = eps.iter().find(|e| !(0.0..1.0).contains(*e)) {
            return Err(config_err("epsilons", format!("{e} is outside [0, 1)")));
        }
        if self.samples_per_point == 0 {
            return Err(config_err("samples_per_point", "must be at least 1"));
        }
        Ok(())
    }

    pub fn protocols(&self) -> Result<Vec<Protocol>> {
        if self.protocols.is_empty() {
            return Err(config_err("protocols", "must not be empty"));
        }
        self.protocols
            .iter()
            .map(|p| {
                p.parse()
                    .map_err(|_| config_err("protocols", format!("unknown protocol `{p}`")))
            })
            .collect()
    }

    pub fn sites(&self) -> Result<NoiseSites> {
        self.sites
            .parse()
            .map_err(|_| config_err("sites", format!("unknown value `{}`", self.sites)))
    }

    pub fn sampling(&self) -> EpsilonSampling {
        match self.sampling {
            SamplingName::Grid => EpsilonSampling::Grid,
            SamplingName::LogUniformCell => EpsilonSampling::LogUniformCell,
        }
    }

    pub fn epsilons(&self) -> Result<Vec<f64>> {
        match (&self.epsilons, &self.epsilon_grid) {
            (Some(e), None) => Ok(e.clone()),
            (None, Some(g)) => {
                unigate_core::qec::log_grid(g.lo, g.hi, g.points).map_err(|e| config_err("epsilon_grid", e))
            }
            _ => Err(config_err(
                "epsilons",
                "give exactly one of `epsilons` and `epsilon_grid`",
            )),
        }
    }
}

/// Parses and validates a config file.
pub fn load<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Short hex digest of the canonical JSON form of a config.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    let canonical = serde_json::to_vec(config).expect("configs serialize");
    let digest = Sha256::digest(&canonical);
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scaling(json: &str) -> Result<ScalingConfig> {
        let c: ScalingConfig = serde_json::from_str(json).map_err(|e| CliError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    #[test]
    fn minimal_scaling_config() {
        let c = scaling(r#"{"version":1,"mode":"four","seeds":[1,2],"depths":[2,4],"output":"o.csv"}"#).unwrap();
        assert_eq!(c.index, IndexConfig::default());
        assert_eq!(c.target, "cnot");
        assert_eq!(c.summary_path(), PathBuf::from("o.json"));
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            (
                r#"{"version":1,"mode":"four","seeds":[1],"depths":[2],"output":"o","bogus":1}"#,
                "bogus",
            ),
            (
                r#"{"version":1,"mode":"five","seeds":[1],"depths":[2],"output":"o"}"#,
                "five",
            ),
            (
                r#"{"version":2,"mode":"four","seeds":[1],"depths":[2],"output":"o"}"#,
                "version",
            ),
            (
                r#"{"version":1,"mode":"four","seeds":[1],"depths":[3],"output":"o"}"#,
                "depths",
            ),
            (
                r#"{"version":1,"mode":"four","seeds":[],"depths":[2],"output":"o"}"#,
                "seeds",
            ),
            (
                r#"{"version":1,"mode":"four","seeds":[1],"depths":[2],"output":"o","index":{"rerank":0}}"#,
                "index.rerank",
            ),
        ];
        for (json, field) in cases {
            let msg = scaling(json).unwrap_err().to_string();
            assert!(msg.contains(field), "{msg} should mention {field}");
        }
    }

    #[test]
    fn qec_epsilon_sources() {
        let base = r#""version":1,"samples_per_point":3,"output":"q.csv""#;
        let c: QecConfig = serde_json::from_str(&format!("{{{base},\"epsilons\":[0.001]}}")).unwrap();
        c.validate().unwrap();
        assert_eq!(c.protocols().unwrap().len(), 3);
        let g: QecConfig = serde_json::from_str(&format!(
            "{{{base},\"epsilon_grid\":{{\"lo\":1e-4,\"hi\":1e-2,\"points\":3}}}}"
        ))
        .unwrap();
        assert_eq!(g.epsilons().unwrap().len(), 3);
        let none: QecConfig = serde_json::from_str(&format!("{{{base}}}")).unwrap();
        assert!(none.validate().unwrap_err().to_string().contains("epsilons"));
        let bad: QecConfig =
            serde_json::from_str(&format!("{{{base},\"epsilons\":[0.1],\"protocols\":[\"x\"]}}")).unwrap();
        assert!(bad.validate().unwrap_err().to_string().contains("protocols"));
    }

    #[test]
    fn hash_is_stable() {
        let c = scaling(r#"{"version":1,"mode":"two","seeds":[1],"depths":[2],"output":"o"}"#).unwrap();
        assert_eq!(config_hash(&c), config_hash(&c.clone()));
        assert_eq!(config_hash(&c).len(), 16);
    }
}
