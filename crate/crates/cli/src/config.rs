use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub p: u32,
    pub prec: u32,
    pub deg: usize,
    pub tdeg: usize,
    pub level: u32,
    pub seed: u64,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { p: 5, prec: 30, deg: 64, tdeg: 32, level: 3, seed: 0, format: Format::Json }
    }
}

/// Keys of a config file; absent keys keep their defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub p: Option<u32>,
    pub prec: Option<u32>,
    pub deg: Option<usize>,
    pub tdeg: Option<usize>,
    pub level: Option<u32>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn apply(&mut self, o: &PartialConfig) {
        if let Some(v) = o.p {
            self.p = v;
        }
        if let Some(v) = o.prec {
            self.prec = v;
        }
        if let Some(v) = o.deg {
            self.deg = v;
        }
        if let Some(v) = o.tdeg {
            self.tdeg = v;
        }
        if let Some(v) = o.level {
            self.level = v;
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.format {
            self.format = v;
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let p = self.p;
        if p < 3 || (2..p).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(format!("p must be an odd prime, got {p}"));
        }
        if self.prec < 4 || self.deg < 4 || self.tdeg < 4 {
            return Err("precision and degrees must be at least 4".into());
        }
        Ok(())
    }
}

pub fn load_file(path: &Path) -> Result<PartialConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
}
