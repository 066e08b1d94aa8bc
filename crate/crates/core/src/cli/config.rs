//! Experiment configs: TOML files with one `[[experiment]]` table per run.

use super::registry::{self, Kind};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A registry component: `name` plus free-form parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub name: String,
    #[serde(flatten)]
    pub params: toml::Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    pub name: String,
    pub sequence: Component,
    pub flow: Component,
    pub observable: Component,
    pub start: toml::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(rename = "experiment")]
    pub experiments: Vec<Experiment>,
}

/// A config error with a 1-based source position when one is known.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map(|i| before.len() - i).unwrap_or(before.len() + 1);
    (line, column)
}

fn locate(text: &str, needle: &str, message: String) -> ConfigError {
    let (line, column) = text.find(needle).map(|o| position(text, o)).unwrap_or((1, 1));
    ConfigError { line, column, message }
}

impl ExperimentConfig {
    /// Parses and validates names and parameters against the registry.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map(|s| position(text, s.start)).unwrap_or((1, 1));
            ConfigError { line, column, message: e.message().trim().to_string() }
        })?;
        cfg.validate(text)?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    fn validate(&self, text: &str) -> Result<(), ConfigError> {
        if self.experiments.is_empty() {
            return Err(ConfigError { line: 1, column: 1, message: "no [[experiment]] tables".into() });
        }
        let mut seen = std::collections::BTreeSet::new();
        for ex in &self.experiments {
            let quoted = format!("\"{}\"", ex.name);
            if ex.name.is_empty() || !ex.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
                return Err(locate(text, &quoted, format!("experiment name `{}` must use [A-Za-z0-9_-]", ex.name)));
            }
            if !seen.insert(ex.name.clone()) {
                return Err(locate(text, &quoted, format!("duplicate experiment name `{}`", ex.name)));
            }
            for (kind, comp) in [(Kind::Sequence, &ex.sequence), (Kind::Flow, &ex.flow), (Kind::Observable, &ex.observable)] {
                registry::check_component(kind, comp).map_err(|m| locate(text, &format!("\"{}\"", comp.name), m))?;
            }
            registry::check_observable_fits(&ex.flow.name, &ex.observable.name)
                .map_err(|m| locate(text, &format!("\"{}\"", ex.observable.name), m))?;
            if let Some(cps) = &ex.checkpoints {
                if cps.is_empty() || cps[0] == 0 || cps.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(locate(text, "checkpoints", "checkpoints must be positive and strictly increasing".into()));
                }
            }
        }
        Ok(())
    }
}
