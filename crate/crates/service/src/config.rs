//! Service and CLI settings: a TOML file plus `CONCEPTMAP_*` environment overrides.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use conceptmap_core::dominate::{Rule, RuleSet};
use conceptmap_core::extract::{Extractor, Lexicon};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub host: String,
    pub port: u16,
    /// Directory holding staged documents and one subdirectory per run.
    pub store: PathBuf,
    /// Per-file lexicon and gazetteer overrides.
    pub gazetteer_dir: Option<PathBuf>,
    /// Coreference lookback, in sentences.
    pub coref_window: usize,
    pub prune: PruneToggles,
    pub max_upload_bytes: usize,
    /// Built web client, served under `/` when set.
    pub static_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PruneToggles {
    pub r1: bool,
    pub r2: bool,
    pub r3: bool,
    pub r4: bool,
}

impl Default for PruneToggles {
    fn default() -> Self {
        PruneToggles {
            r1: true,
            r2: true,
            r3: true,
            r4: true,
        }
    }
}

impl Default for Config {
    fn default() -> Self {
        Config {
            host: "127.0.0.1".into(),
            port: 8080,
            store: PathBuf::from("conceptmap-store"),
            gazetteer_dir: None,
            coref_window: conceptmap_core::extract::DEFAULT_WINDOW,
            prune: PruneToggles::default(),
            max_upload_bytes: 32 * 1024 * 1024,
            static_dir: None,
        }
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        other => bail!("{key}: expected a boolean, got {other:?}"),
    }
}

impl Config {
    /// Reads `path` if given (defaults otherwise), then applies overrides
    /// from the process environment.
    pub fn load(path: Option<&Path>) -> Result<Config> {
        let mut config = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading {}", p.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
            }
            None => Config::default(),
        };
        config.apply_env(std::env::vars())?;
        Ok(config)
    }

    /// Applies `CONCEPTMAP_*` variables from `vars`; others are ignored.
    pub fn apply_env(&mut self, vars: impl IntoIterator<Item = (String, String)>) -> Result<()> {
        for (key, value) in vars {
            let Some(name) = key.strip_prefix("CONCEPTMAP_") else {
                continue;
            };
            match name {
                "HOST" => self.host = value,
                "PORT" => self.port = value.parse().with_context(|| format!("{key}={value}"))?,
                "STORE" => self.store = PathBuf::from(value),
                "GAZETTEER_DIR" => self.gazetteer_dir = Some(PathBuf::from(value)),
                "COREF_WINDOW" => {
                    self.coref_window = value.parse().with_context(|| format!("{key}={value}"))?
                }
                "MAX_UPLOAD_BYTES" => {
                    self.max_upload_bytes =
                        value.parse().with_context(|| format!("{key}={value}"))?
                }
                "STATIC_DIR" => self.static_dir = Some(PathBuf::from(value)),
                "PRUNE_R1" => self.prune.r1 = parse_bool(&key, &value)?,
                "PRUNE_R2" => self.prune.r2 = parse_bool(&key, &value)?,
                "PRUNE_R3" => self.prune.r3 = parse_bool(&key, &value)?,
                "PRUNE_R4" => self.prune.r4 = parse_bool(&key, &value)?,
                _ => log::warn!("ignoring unknown setting {key}"),
            }
        }
        Ok(())
    }

    pub fn rules(&self) -> RuleSet {
        let mut rules = RuleSet::default();
        rules.set(Rule::R1, self.prune.r1);
        rules.set(Rule::R2, self.prune.r2);
        rules.set(Rule::R3, self.prune.r3);
        rules.set(Rule::R4, self.prune.r4);
        rules
    }

    pub fn extractor(&self) -> Result<Extractor> {
        let lexicon = match &self.gazetteer_dir {
            Some(dir) => Lexicon::from_dir(dir)
                .with_context(|| format!("loading lexicon from {}", dir.display()))?,
            None => Lexicon::default(),
        };
        Ok(Extractor::new(lexicon).with_window(self.coref_window))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn file_then_environment() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(
            &path,
            "port = 9000\ncoref_window = 3\n[prune]\nr4 = false\n",
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut c: Config = toml::from_str(&text).unwrap();
        assert_eq!(
            (c.port, c.coref_window, c.prune.r4, c.prune.r1),
            (9000, 3, false, true)
        );
        c.apply_env(env(&[
            ("CONCEPTMAP_PORT", "9100"),
            ("CONCEPTMAP_PRUNE_R1", "off"),
            ("HOME", "/x"),
        ]))
        .unwrap();
        assert_eq!(c.port, 9100);
        assert!(!c.rules().contains(Rule::R1));
        assert!(!c.rules().contains(Rule::R4));
        assert!(c.rules().contains(Rule::R2));
    }

    #[test]
    fn bad_values_are_errors() {
        let mut c = Config::default();
        assert!(c.apply_env(env(&[("CONCEPTMAP_PORT", "many")])).is_err());
        assert!(c
            .apply_env(env(&[("CONCEPTMAP_PRUNE_R2", "maybe")]))
            .is_err());
        assert!(toml::from_str::<Config>("colour = 1").is_err());
    }
}
