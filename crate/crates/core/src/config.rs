//! Tool configuration: a versioned TOML file plus flag overrides.
//!
//! Flags always win over file values; the file covers everything a CI run
//! needs to be reproducible, including the probe block that has no flag
//! equivalent.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::probe::{ProbeSpec, SuccessCriterion};
use crate::graph::algo::DEFAULT_CYCLE_CAP;
use crate::graph::extract::Grammar;

pub const CONFIG_SCHEMA: &str = "config/v1";

/// Environment variable consulted when no `--config` flag is given.
pub const CONFIG_ENV_VAR: &str = "MEREOSCAN_CONFIG";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config `{path}`: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("unsupported config schema `{0}` (expected `config/v1`)")]
    BadSchema(String),
    #[error("unknown grammar `{0}` (known: python, c)")]
    UnknownGrammar(String),
    #[error("cycle cap must be at least 1")]
    ZeroCycleCap,
    #[error("at least one grammar or a manifest must be enabled")]
    NothingEnabled,
    #[error("unknown output format `{0}` (known: human, structured)")]
    UnknownFormat(String),
    #[error("unknown analysis mode `{0}` (known: source, compiled)")]
    UnknownMode(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Human,
    Structured,
}

impl OutputFormat {
    pub fn parse(name: &str) -> Result<Self, ConfigError> {
        match name {
            "human" => Ok(OutputFormat::Human),
            "structured" => Ok(OutputFormat::Structured),
            other => Err(ConfigError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnalysisMode {
    Source,
    Compiled,
}

impl AnalysisMode {
    /// Name of the unifying relation this mode reports.
    pub fn binding_name(self) -> &'static str {
        match self {
            AnalysisMode::Source => "SCgraphPath",
            AnalysisMode::Compiled => "linked",
        }
    }

    pub fn parse(name: &str) -> Result<Self, ConfigError> {
        match name {
            "source" => Ok(AnalysisMode::Source),
            "compiled" => Ok(AnalysisMode::Compiled),
            other => Err(ConfigError::UnknownMode(other.to_string())),
        }
    }
}

/// Probe block of the config file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub command: String,
    pub timeout_s: u64,
    #[serde(default)]
    pub success: SuccessCriterion,
    #[serde(default)]
    pub staging_prefix: Option<PathBuf>,
    /// Replacement stubs, file path -> stub file.
    #[serde(default)]
    pub replacements: BTreeMap<String, PathBuf>,
}

impl ProbeConfig {
    pub fn to_spec(&self) -> ProbeSpec {
        ProbeSpec {
            command: self.command.clone(),
            staging_prefix: self.staging_prefix.clone(),
            success: self.success.clone(),
            timeout: Duration::from_secs(self.timeout_s),
        }
    }
}

/// On-disk form; every field optional so flags can fill the gaps.
#[derive(Debug, Clone, Default, Deserialize)]
struct ConfigFile {
    schema: Option<String>,
    grammars: Option<Vec<String>>,
    manifest: Option<PathBuf>,
    entries: Option<Vec<String>>,
    include_loose: Option<bool>,
    orphans_standalone: Option<bool>,
    cycle_cap: Option<usize>,
    format: Option<String>,
    mode: Option<String>,
    probe: Option<ProbeConfig>,
}

/// Fully resolved configuration used by every command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToolConfig {
    pub grammars: Vec<Grammar>,
    pub manifest: Option<PathBuf>,
    /// `None`: auto-detect entry points; `Some(v)`: declared verbatim
    /// (possibly empty).
    pub entries: Option<Vec<String>>,
    pub include_loose: bool,
    pub orphans_standalone: bool,
    pub cycle_cap: usize,
    pub format: OutputFormat,
    pub mode: AnalysisMode,
    pub probe: Option<ProbeConfig>,
}

impl Default for ToolConfig {
    fn default() -> Self {
        Self {
            grammars: Grammar::ALL.to_vec(),
            manifest: None,
            entries: None,
            include_loose: false,
            orphans_standalone: false,
            cycle_cap: DEFAULT_CYCLE_CAP,
            format: OutputFormat::Human,
            mode: AnalysisMode::Source,
            probe: None,
        }
    }
}

/// Flag-level overrides; `None` means "not given on the command line".
#[derive(Debug, Clone, Default)]
pub struct ConfigOverrides {
    pub grammars: Option<Vec<String>>,
    pub manifest: Option<PathBuf>,
    pub entries: Option<Vec<String>>,
    pub no_entries: bool,
    pub include_loose: bool,
    pub orphans_standalone: bool,
    pub cycle_cap: Option<usize>,
    pub format: Option<String>,
    pub mode: Option<String>,
    pub staging_prefix: Option<PathBuf>,
}

impl ToolConfig {
    /// Loads the config file (when given), applies flag overrides, validates.
    pub fn resolve(
        file: Option<&Path>,
        overrides: &ConfigOverrides,
    ) -> Result<ToolConfig, ConfigError> {
        let file_cfg = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
                    path: path.to_path_buf(),
                    source,
                })?;
                let mut parsed: ConfigFile = toml::from_str(&text)?;
                if let Some(schema) = &parsed.schema {
                    if schema != CONFIG_SCHEMA {
                        return Err(ConfigError::BadSchema(schema.clone()));
                    }
                }
                // relative file paths in the config resolve against its own
                // directory, so a checked-in config works from any cwd
                if let Some(base) = path.parent() {
                    let rebase = |p: &mut PathBuf| {
                        if p.is_relative() {
                            *p = base.join(&p);
                        }
                    };
                    if let Some(m) = &mut parsed.manifest {
                        rebase(m);
                    }
                    if let Some(probe) = &mut parsed.probe {
                        if let Some(prefix) = &mut probe.staging_prefix {
                            rebase(prefix);
                        }
                        for stub in probe.replacements.values_mut() {
                            rebase(stub);
                        }
                    }
                }
                parsed
            }
            None => ConfigFile::default(),
        };

        let mut cfg = ToolConfig::default();

        let grammar_names = overrides
            .grammars
            .clone()
            .or(file_cfg.grammars)
            .unwrap_or_else(|| vec!["python".to_string(), "c".to_string()]);
        cfg.grammars = grammar_names
            .iter()
            .map(|n| Grammar::parse_name(n).ok_or_else(|| ConfigError::UnknownGrammar(n.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        cfg.grammars.sort();
        cfg.grammars.dedup();

        cfg.manifest = overrides.manifest.clone().or(file_cfg.manifest);
        cfg.entries = if overrides.no_entries {
            Some(Vec::new())
        } else {
            overrides.entries.clone().or(file_cfg.entries)
        };
        cfg.include_loose = overrides.include_loose || file_cfg.include_loose.unwrap_or(false);
        cfg.orphans_standalone =
            overrides.orphans_standalone || file_cfg.orphans_standalone.unwrap_or(false);
        cfg.cycle_cap = overrides
            .cycle_cap
            .or(file_cfg.cycle_cap)
            .unwrap_or(DEFAULT_CYCLE_CAP);
        if let Some(format) = overrides.format.as_deref().or(file_cfg.format.as_deref()) {
            cfg.format = OutputFormat::parse(format)?;
        }
        if let Some(mode) = overrides.mode.as_deref().or(file_cfg.mode.as_deref()) {
            cfg.mode = AnalysisMode::parse(mode)?;
        }
        cfg.probe = file_cfg.probe;
        if let (Some(prefix), Some(probe)) = (&overrides.staging_prefix, &mut cfg.probe) {
            probe.staging_prefix = Some(prefix.clone());
        }

        if cfg.cycle_cap == 0 {
            return Err(ConfigError::ZeroCycleCap);
        }
        if cfg.grammars.is_empty() && cfg.manifest.is_none() {
            return Err(ConfigError::NothingEnabled);
        }
        Ok(cfg)
    }
}
