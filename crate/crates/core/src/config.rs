use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::distance::DistanceParams;
use crate::error::{Error, Result};
use crate::smc::SmcParams;
use crate::text::Stoplist;

pub const DEFAULT_FALLBACK: &str = "I could not find that in the leaflet.";

/// Model configuration. Missing fields take their default values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub a: f64,
    pub b: f64,
    pub r_a: f64,
    pub r_b: f64,
    pub epsilon: f64,
    pub m: f64,
    /// Stoplist file, one word per line. The bundled English list is used
    /// when absent.
    pub stoplist_path: Option<PathBuf>,
    pub top_k: usize,
    pub fallback_text: String,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let d = DistanceParams::default();
        let s = SmcParams::default();
        Self {
            a: d.a,
            b: d.b,
            r_a: s.r_a,
            r_b: s.r_b,
            epsilon: s.epsilon,
            m: s.m,
            stoplist_path: None,
            top_k: 3,
            fallback_text: DEFAULT_FALLBACK.to_string(),
        }
    }
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn distance_params(&self) -> DistanceParams {
        DistanceParams {
            a: self.a,
            b: self.b,
        }
    }

    pub fn smc_params(&self) -> SmcParams {
        SmcParams {
            r_a: self.r_a,
            r_b: self.r_b,
            epsilon: self.epsilon,
            m: self.m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.distance_params().validate()?;
        self.smc_params().validate()?;
        if self.top_k == 0 {
            return Err(Error::InvalidParam {
                name: "top_k",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }

    pub fn stoplist(&self) -> Result<Stoplist> {
        match &self.stoplist_path {
            Some(path) => Stoplist::from_reader(BufReader::new(File::open(path)?)),
            None => Ok(Stoplist::english()),
        }
    }
}
