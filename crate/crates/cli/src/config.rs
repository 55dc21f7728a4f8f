//! Run configuration: defaults, a flat key-value config file, and flag
//! overrides. Unknown keys and out-of-range values are rejected up front
//! (usage errors, exit code 2).

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use qexch_core::algebra::HeckeVariant;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("config line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("invalid value for `{key}`: {reason}")]
    BadValue { key: String, reason: String },
}

/// Where the local two-site Hamiltonian comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelSource {
    /// the built-in two-species exclusion model (n = 2, J = 1)
    Asep,
    /// an operator triplet file
    File(PathBuf),
}

impl fmt::Display for ModelSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSource::Asep => write!(f, "asep"),
            ModelSource::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ModelConfig {
    pub model: ModelSource,
    pub n: usize,
    pub j: u32,
    pub c: i64,
    pub l: usize,
    pub q0: Vec<f64>,
    pub events: u64,
    pub seed: u64,
    pub variant: HeckeVariant,
    pub d: usize,
    /// restrict simulation/export to one conservation sector
    pub sector: Option<Vec<u32>>,
    /// fraction of leading events discarded before occupation statistics
    pub burn_in: f64,
    /// initial state index within the sector; lowest index when absent
    pub x0: Option<usize>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            model: ModelSource::Asep,
            n: 2,
            j: 1,
            c: 2,
            l: 4,
            q0: vec![0.7],
            events: 100_000,
            seed: 7,
            variant: HeckeVariant::Corrected,
            d: 2,
            sector: None,
            burn_in: 0.1,
            x0: None,
        }
    }
}

fn bad(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_string(),
        reason: reason.into(),
    }
}

impl ModelConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Malformed {
                line: lineno + 1,
                text: line.to_string(),
            })?;
            let key = key.trim();
            let value = value.trim();
            cfg.set(key, value).map_err(|e| match e {
                ConfigError::UnknownKey { key, .. } => ConfigError::UnknownKey {
                    line: lineno + 1,
                    key,
                },
                other => other,
            })?;
        }
        Ok(cfg)
    }

    /// Applies one key-value pair; config files and flag overrides both
    /// funnel through here so the vocabulary stays identical.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "model" => {
                self.model = if value == "asep" {
                    ModelSource::Asep
                } else if let Some(path) = value.strip_prefix("file:") {
                    ModelSource::File(PathBuf::from(path))
                } else {
                    return Err(bad("model", format!("expected `asep` or `file:<path>`, got `{value}`")));
                };
            }
            "n" => self.n = parse_num(key, value)?,
            "J" => self.j = parse_num(key, value)?,
            "c" => self.c = parse_num(key, value)?,
            "L" => self.l = parse_num(key, value)?,
            "q0" => {
                let mut out = Vec::new();
                for part in value.split(',') {
                    let v: f64 = part
                        .trim()
                        .parse()
                        .map_err(|_| bad("q0", format!("`{part}` is not a number")))?;
                    out.push(v);
                }
                self.q0 = out;
            }
            "events" => self.events = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "variant" => {
                self.variant = match value {
                    "corrected" => HeckeVariant::Corrected,
                    "paper-literal" => HeckeVariant::PaperLiteral,
                    other => {
                        return Err(bad(
                            "variant",
                            format!("expected `corrected` or `paper-literal`, got `{other}`"),
                        ))
                    }
                };
            }
            "d" => self.d = parse_num(key, value)?,
            "sector" => {
                let mut out = Vec::new();
                for part in value.split(',') {
                    out.push(
                        part.trim()
                            .parse()
                            .map_err(|_| bad("sector", format!("`{part}` is not a count")))?,
                    );
                }
                self.sector = Some(out);
            }
            "burn_in" => {
                self.burn_in = value
                    .parse()
                    .map_err(|_| bad("burn_in", "not a number"))?;
            }
            "x0" => self.x0 = Some(parse_num(key, value)?),
            other => {
                return Err(ConfigError::UnknownKey {
                    line: 0,
                    key: other.to_string(),
                })
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n < 1 {
            return Err(bad("n", "need at least one species"));
        }
        if self.l < 2 {
            return Err(bad("L", "need at least two sites"));
        }
        if self.q0.is_empty() {
            return Err(bad("q0", "need at least one evaluation point"));
        }
        for &q in &self.q0 {
            if !(q > 0.0) || !q.is_finite() {
                return Err(bad("q0", format!("{q} is not positive and finite")));
            }
        }
        if self.d < 2 {
            return Err(bad("d", "leg dimension must be at least 2"));
        }
        if !(0.0..1.0).contains(&self.burn_in) {
            return Err(bad("burn_in", "must be in [0, 1)"));
        }
        if let Some(s) = &self.sector {
            if s.len() != self.n {
                return Err(bad("sector", format!("expected {} counts, got {}", self.n, s.len())));
            }
        }
        Ok(())
    }

    /// Deterministic echo of the effective configuration for reports.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("model".into(), self.model.to_string());
        m.insert("n".into(), self.n.to_string());
        m.insert("J".into(), self.j.to_string());
        m.insert("c".into(), self.c.to_string());
        m.insert("L".into(), self.l.to_string());
        m.insert(
            "q0".into(),
            self.q0
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        m.insert("events".into(), self.events.to_string());
        m.insert("seed".into(), self.seed.to_string());
        m.insert("variant".into(), self.variant.name().to_string());
        m.insert("d".into(), self.d.to_string());
        if let Some(s) = &self.sector {
            m.insert(
                "sector".into(),
                s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
            );
        }
        m.insert("burn_in".into(), self.burn_in.to_string());
        if let Some(x0) = self.x0 {
            m.insert("x0".into(), x0.to_string());
        }
        m
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| bad(key, format!("`{value}` is not a valid number")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn defaults_validate() {
        ModelConfig::default().validate().unwrap();
    }

    #[test]
    fn unknown_key_is_rejected() {
        let mut f = tempfile_path("unknown");
        writeln!(f.1, "frobnicate = 3").unwrap();
        let err = ModelConfig::from_file(&f.0).unwrap_err();
        assert!(matches!(err, ConfigError::UnknownKey { .. }));
    }

    #[test]
    fn file_values_are_applied() {
        let mut f = tempfile_path("applied");
        writeln!(f.1, "# comment\nL = 3\nq0 = 0.5, 1.0\nseed = 99").unwrap();
        let cfg = ModelConfig::from_file(&f.0).unwrap();
        assert_eq!(cfg.l, 3);
        assert_eq!(cfg.q0, vec![0.5, 1.0]);
        assert_eq!(cfg.seed, 99);
    }

    #[test]
    fn zero_q0_is_invalid() {
        let mut cfg = ModelConfig::default();
        cfg.set("q0", "0").unwrap();
        assert!(cfg.validate().is_err());
    }

    fn tempfile_path(tag: &str) -> (PathBuf, std::fs::File) {
        let path = std::env::temp_dir().join(format!("qexch-config-test-{tag}-{}", std::process::id()));
        let file = std::fs::File::create(&path).unwrap();
        (path, file)
    }
}
