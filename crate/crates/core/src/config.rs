//! TOML experiment configuration.
//!
//! ```toml
//! seed = 7
//!
//! [registry]
//! alphabet = 2
//! hash = "…"            # optional pin, must match the built registry
//!
//! [horizon]
//! L = 12
//! S = 256
//! depth = 6
//! n = 10
//!
//! [[class]]
//! name = "pair"
//! models = ["ber:1/3", "ber:2/3"]
//! weights = ["1/2", "1/2"]   # optional, uniform otherwise
//!
//! [reports]
//! suite = "exact"
//! select = ["dominance", "thm1"]   # optional
//!
//! [output]
//! dir = "out"
//! format = "json"
//! ```

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::catalog::{self, NamedClass};
use crate::error::{Error, Result};
use crate::machines::{Horizon, MachineRegistry};
use crate::measures::Alphabet;

/// Hard caps on configured horizons.
pub const MAX_L: usize = 20;
pub const MAX_S: u64 = 1 << 16;
pub const MAX_DEPTH: usize = 8;
pub const MAX_N: usize = 16;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    #[default]
    Exact,
    Registry,
    All,
}

impl Suite {
    pub fn exact(self) -> bool {
        matches!(self, Suite::Exact | Suite::All)
    }

    pub fn registry(self) -> bool {
        matches!(self, Suite::Registry | Suite::All)
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Suite::Exact),
            "registry" => Ok(Suite::Registry),
            "all" => Ok(Suite::All),
            other => Err(Error::Config(format!("unknown suite {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegistryConfig {
    #[serde(default = "default_alphabet")]
    pub alphabet: usize,
    /// Base names to keep enabled; all when absent.
    pub bases: Option<Vec<String>>,
    pub hash: Option<String>,
}

fn default_alphabet() -> usize {
    2
}

impl Default for RegistryConfig {
    fn default() -> Self {
        RegistryConfig { alphabet: 2, bases: None, hash: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HorizonConfig {
    #[serde(rename = "L", default = "default_l")]
    pub max_len: usize,
    #[serde(rename = "S", default = "default_s")]
    pub max_steps: u64,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default = "default_n")]
    pub n: usize,
}

fn default_l() -> usize {
    12
}
fn default_s() -> u64 {
    256
}
fn default_depth() -> usize {
    6
}
fn default_n() -> usize {
    10
}

impl Default for HorizonConfig {
    fn default() -> Self {
        HorizonConfig { max_len: default_l(), max_steps: default_s(), depth: default_depth(), n: default_n() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassConfig {
    pub name: String,
    pub models: Vec<String>,
    pub weights: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportsConfig {
    #[serde(default)]
    pub suite: Suite,
    /// Report families to run; all when absent.
    pub select: Option<Vec<String>>,
    #[serde(default = "default_fuzz")]
    pub fuzz_cases: usize,
}

fn default_fuzz() -> usize {
    10_000
}

impl Default for ReportsConfig {
    fn default() -> Self {
        ReportsConfig { suite: Suite::Exact, select: None, fuzz_cases: default_fuzz() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub registry: RegistryConfig,
    #[serde(default)]
    pub horizon: HorizonConfig,
    #[serde(default, rename = "class")]
    pub classes: Vec<ClassConfig>,
    #[serde(default)]
    pub reports: ReportsConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        ExperimentConfig::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let h = &self.horizon;
        let bad = |what: &str, v: String, cap: String| Err(Error::Config(format!("{what} = {v} exceeds the cap {cap}")));
        if h.max_len > MAX_L {
            return bad("L", h.max_len.to_string(), MAX_L.to_string());
        }
        if h.max_steps > MAX_S {
            return bad("S", h.max_steps.to_string(), MAX_S.to_string());
        }
        if h.depth > MAX_DEPTH {
            return bad("depth", h.depth.to_string(), MAX_DEPTH.to_string());
        }
        if h.n > MAX_N {
            return bad("n", h.n.to_string(), MAX_N.to_string());
        }
        if h.max_len == 0 || h.max_steps == 0 || h.n == 0 {
            return Err(Error::Config("L, S and n must be positive".into()));
        }
        self.registry()?;
        self.named_classes()?;
        Ok(())
    }

    /// Registry after base selection, checked against the hash pin.
    pub fn registry(&self) -> Result<Arc<MachineRegistry>> {
        let alphabet = Alphabet::new(self.registry.alphabet).map_err(|e| Error::Config(e.to_string()))?;
        let mut reg = MachineRegistry::canonical(alphabet);
        if let Some(names) = &self.registry.bases {
            let known: Vec<&str> = reg.bases().iter().map(|b| b.name()).collect();
            if let Some(bad) = names.iter().find(|n| !known.contains(&n.as_str())) {
                return Err(Error::Config(format!("unknown base {bad:?}")));
            }
            let names: Vec<&str> = names.iter().map(String::as_str).collect();
            reg = reg.restrict(&names);
        }
        if let Some(pin) = &self.registry.hash {
            let actual = reg.hash();
            if *pin != actual {
                return Err(Error::Config(format!("registry hash pin {pin} does not match the built registry {actual}")));
            }
        }
        Ok(Arc::new(reg))
    }

    pub fn machine_horizon(&self) -> Horizon {
        Horizon::new(self.horizon.max_len, self.horizon.max_steps)
    }

    /// Configured classes, or the built-in catalog when none are given.
    pub fn named_classes(&self) -> Result<Vec<NamedClass>> {
        if self.classes.is_empty() {
            return catalog::classes();
        }
        self.classes
            .iter()
            .map(|c| {
                let models: Vec<&str> = c.models.iter().map(String::as_str).collect();
                let weights: Option<Vec<&str>> = c.weights.as_ref().map(|w| w.iter().map(String::as_str).collect());
                catalog::build_class(&c.name, &models, weights.as_deref())
                    .map_err(|e| Error::Config(format!("class {:?}: {e}", c.name)))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_round_trip() {
        let cfg = ExperimentConfig::from_toml_str("").unwrap();
        assert_eq!(cfg.horizon.max_len, 12);
        assert!(cfg.named_classes().unwrap().len() >= 5);
        let again = ExperimentConfig::from_toml_str(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn pin_and_caps() {
        let hash = MachineRegistry::canonical(Alphabet::BINARY).hash();
        let ok = format!("[registry]\nhash = \"{hash}\"\n");
        assert!(ExperimentConfig::from_toml_str(&ok).is_ok());
        let bad = ExperimentConfig::from_toml_str("[registry]\nhash = \"00\"\n");
        assert!(matches!(bad, Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::from_toml_str("[horizon]\nL = 40\n"), Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::from_toml_str("bogus = 1\n"), Err(Error::Config(_))));
    }

    #[test]
    fn custom_class() {
        let text = "[[class]]\nname = \"p\"\nmodels = [\"ber:1/3\", \"ber:2/3\"]\nweights = [\"1/4\", \"3/4\"]\n";
        let cfg = ExperimentConfig::from_toml_str(text).unwrap();
        let cs = cfg.named_classes().unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].class.weights()[1], crate::rational::q(3, 4));
        let bad = "[[class]]\nname = \"p\"\nmodels = [\"ber:7/3\"]\n";
        assert!(ExperimentConfig::from_toml_str(bad).is_err());
    }
}
