//! Service configuration.
//!
//! Values are layered: command-line flags override `LINEUP_*` environment
//! variables, which override the TOML file, which overrides the defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config file {path}: {source}")]
    Parse {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("invalid value {value:?} for {var}")]
    Env { var: &'static str, value: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub data_dir: PathBuf,
    pub k: usize,
    pub lambda: f64,
    pub beta: f64,
    pub seed: u64,
    pub listen: String,
    /// Hide recommendation provenance from every API response.
    pub study_mode: bool,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            data_dir: PathBuf::from("data"),
            k: 20,
            lambda: 0.5,
            beta: 0.5,
            seed: 0,
            listen: "127.0.0.1:8080".into(),
            study_mode: false,
        }
    }
}

/// Partial configuration; `None` leaves the lower layer untouched.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub data_dir: Option<PathBuf>,
    pub k: Option<usize>,
    pub lambda: Option<f64>,
    pub beta: Option<f64>,
    pub seed: Option<u64>,
    pub listen: Option<String>,
    pub study_mode: Option<bool>,
}

impl Overrides {
    /// Reads `LINEUP_DATA_DIR`, `LINEUP_K`, `LINEUP_LAMBDA`, `LINEUP_BETA`,
    /// `LINEUP_SEED`, `LINEUP_LISTEN` and `LINEUP_STUDY_MODE` through `get`.
    pub fn from_env(get: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        fn parse<T: std::str::FromStr>(
            var: &'static str,
            v: Option<String>,
        ) -> Result<Option<T>, ConfigError> {
            v.map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| ConfigError::Env { var, value: s })
            })
            .transpose()
        }
        let study_mode = match get("LINEUP_STUDY_MODE") {
            None => None,
            Some(v) => Some(match v.trim().to_ascii_lowercase().as_str() {
                "1" | "true" | "yes" | "on" => true,
                "0" | "false" | "no" | "off" | "" => false,
                _ => {
                    return Err(ConfigError::Env {
                        var: "LINEUP_STUDY_MODE",
                        value: v,
                    })
                }
            }),
        };
        Ok(Overrides {
            data_dir: get("LINEUP_DATA_DIR").map(PathBuf::from),
            k: parse("LINEUP_K", get("LINEUP_K"))?,
            lambda: parse("LINEUP_LAMBDA", get("LINEUP_LAMBDA"))?,
            beta: parse("LINEUP_BETA", get("LINEUP_BETA"))?,
            seed: parse("LINEUP_SEED", get("LINEUP_SEED"))?,
            listen: get("LINEUP_LISTEN"),
            study_mode,
        })
    }

    fn apply(self, c: &mut ServiceConfig) {
        if let Some(v) = self.data_dir {
            c.data_dir = v;
        }
        if let Some(v) = self.k {
            c.k = v;
        }
        if let Some(v) = self.lambda {
            c.lambda = v;
        }
        if let Some(v) = self.beta {
            c.beta = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.listen {
            c.listen = v;
        }
        if let Some(v) = self.study_mode {
            c.study_mode = v;
        }
    }
}

impl ServiceConfig {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    /// Resolves the layers in precedence order and validates the result.
    pub fn resolve(
        file: Option<&Path>,
        env: Overrides,
        flags: Overrides,
    ) -> Result<Self, ConfigError> {
        let mut c = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
                    path: path.to_path_buf(),
                    source,
                })?;
                Self::from_toml(&text).map_err(|source| ConfigError::Parse {
                    path: path.to_path_buf(),
                    source,
                })?
            }
            None => ServiceConfig::default(),
        };
        env.apply(&mut c);
        flags.apply(&mut c);
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.k == 0 {
            return Err(ConfigError::Invalid("k must be at least 1".into()));
        }
        for (name, v) in [("lambda", self.lambda), ("beta", self.beta)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(ConfigError::Invalid(format!("{name} {v} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn persons_path(&self) -> PathBuf {
        self.data_dir.join("persons.jsonl")
    }

    pub fn descriptors_path(&self) -> PathBuf {
        self.data_dir.join("descriptors.bin")
    }

    pub fn sessions_dir(&self) -> PathBuf {
        self.data_dir.join("sessions")
    }

    pub fn exports_dir(&self) -> PathBuf {
        self.data_dir.join("exports")
    }
}
