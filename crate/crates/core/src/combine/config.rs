use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lsa::DEFAULT_GAMMA;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Baseline,
    Cache,
    #[serde(alias = "semcache")]
    SemanticCache,
    Rerank,
    Li,
    Gi,
    Cwli,
    Cwgi,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Baseline,
        Method::Cache,
        Method::Li,
        Method::Gi,
        Method::Cwli,
        Method::Cwgi,
        Method::Rerank,
        Method::SemanticCache,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Baseline => "baseline",
            Method::Cache => "cache",
            Method::SemanticCache => "semantic-cache",
            Method::Rerank => "rerank",
            Method::Li => "li",
            Method::Gi => "gi",
            Method::Cwli => "cwli",
            Method::Cwgi => "cwgi",
        }
    }

    /// Whether the method reads the semantic space.
    pub fn needs_space(self) -> bool {
        !matches!(self, Method::Baseline | Method::Cache)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "baseline" => Ok(Method::Baseline),
            "cache" => Ok(Method::Cache),
            "semantic-cache" | "semcache" => Ok(Method::SemanticCache),
            "rerank" => Ok(Method::Rerank),
            "li" => Ok(Method::Li),
            "gi" => Ok(Method::Gi),
            "cwli" => Ok(Method::Cwli),
            "cwgi" => Ok(Method::Cwgi),
            _ => Err(Error::invalid(format!("unknown combination method `{s}`"))),
        }
    }
}

/// Settings for one combination method. `lambda` is the weight of the
/// n-gram model in LI/GI, so an LSA weight of 0.11 is `lambda = 0.89`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig")]
pub struct CombinerConfig {
    pub v: u32,
    pub name: String,
    pub method: Method,
    pub lambda: f64,
    pub gamma: f64,
    pub beta: f64,
    /// Cache length l.
    pub cache_size: usize,
    /// Decay peak position.
    pub mu: f64,
    /// Neighbours added per occurred word by the semantic cache.
    pub neighbors: usize,
    pub theta: f64,
    pub n_best: usize,
    pub list_size: usize,
    /// Caps the n-gram order used at prediction time.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    /// Only the last this-many words feed the context vector.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub context_window: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    v: Option<u32>,
    #[serde(default)]
    name: Option<String>,
    method: Method,
    lambda: Option<f64>,
    gamma: Option<f64>,
    beta: Option<f64>,
    cache_size: Option<usize>,
    mu: Option<f64>,
    neighbors: Option<usize>,
    theta: Option<f64>,
    n_best: Option<usize>,
    list_size: Option<usize>,
    order: Option<usize>,
    context_window: Option<usize>,
}

impl TryFrom<RawConfig> for CombinerConfig {
    type Error = Error;

    fn try_from(raw: RawConfig) -> Result<Self> {
        if let Some(v) = raw.v {
            if v != CONFIG_VERSION {
                return Err(Error::invalid(format!("unsupported config version {v}")));
            }
        }
        let d = CombinerConfig::defaults(raw.method);
        let config = CombinerConfig {
            v: CONFIG_VERSION,
            name: raw.name.unwrap_or(d.name),
            method: raw.method,
            lambda: raw.lambda.unwrap_or(d.lambda),
            gamma: raw.gamma.unwrap_or(d.gamma),
            beta: raw.beta.unwrap_or(d.beta),
            cache_size: raw.cache_size.unwrap_or(d.cache_size),
            mu: raw.mu.unwrap_or(d.mu),
            neighbors: raw.neighbors.unwrap_or(d.neighbors),
            theta: raw.theta.unwrap_or(d.theta),
            n_best: raw.n_best.unwrap_or(d.n_best),
            list_size: raw.list_size.unwrap_or(d.list_size),
            order: raw.order,
            context_window: raw.context_window,
        };
        config.validate()?;
        Ok(config)
    }
}

impl CombinerConfig {
    /// Default parameters of a method.
    pub fn defaults(method: Method) -> Self {
        let mut c = CombinerConfig {
            v: CONFIG_VERSION,
            name: method.as_str().to_string(),
            method,
            lambda: 1.0,
            gamma: DEFAULT_GAMMA,
            beta: 0.0,
            cache_size: 400,
            mu: 20.0,
            neighbors: 10,
            theta: 0.4,
            n_best: 1000,
            list_size: 5,
            order: None,
            context_window: None,
        };
        match method {
            Method::Baseline => {}
            Method::Cache => c.beta = 0.1 / 400.0,
            Method::SemanticCache => {
                c.cache_size = 4000;
                c.beta = 0.0001;
            }
            Method::Rerank => c.beta = 0.001,
            Method::Li => c.lambda = 0.89,
            Method::Gi => c.lambda = 0.93,
            Method::Cwli | Method::Cwgi => c.beta = 0.4,
        }
        c
    }

    /// The eight shipped settings, keyed by preset name.
    pub fn presets() -> BTreeMap<String, CombinerConfig> {
        Method::ALL
            .iter()
            .map(|&m| {
                let mut c = Self::defaults(m);
                if m == Method::SemanticCache {
                    c.name = "semcache".into();
                }
                (c.name.clone(), c)
            })
            .collect()
    }

    pub fn preset(name: &str) -> Result<Self> {
        Self::presets()
            .remove(name)
            .ok_or_else(|| Error::UnknownPreset(name.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::invalid(format!("config `{}`: {what}", self.name)))
            }
        };
        check((0.0..=1.0).contains(&self.lambda), "lambda must lie in [0, 1]")?;
        check(self.gamma > 0.0 && self.gamma.is_finite(), "gamma must be positive")?;
        check(self.beta >= 0.0 && self.beta.is_finite(), "beta must be non-negative")?;
        check(self.cache_size >= 1, "cache_size must be at least 1")?;
        check(self.mu > 0.0 && self.mu.is_finite(), "mu must be positive")?;
        check((-1.0..=1.0).contains(&self.theta), "theta must lie in [-1, 1]")?;
        check(self.n_best >= 1, "n_best must be at least 1")?;
        check(self.list_size >= 1, "list_size must be at least 1")?;
        check(self.order != Some(0), "order must be at least 1")?;
        check(self.context_window != Some(0), "context_window must be at least 1")?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Reads a config file; the preset name defaults to the file stem.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Load {
            path: path.to_path_buf(),
            source,
        })?;
        let mut value: serde_json::Value = serde_json::from_str(&text)?;
        if let (Some(obj), Some(stem)) = (value.as_object_mut(), path.file_stem()) {
            obj.entry("name")
                .or_insert_with(|| stem.to_string_lossy().into_owned().into());
        }
        Ok(serde_json::from_value(value)?)
    }

    /// Every `*.json` in a directory, keyed by config name.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<BTreeMap<String, CombinerConfig>> {
        let dir = dir.as_ref();
        let entries = fs::read_dir(dir).map_err(|source| Error::Load {
            path: dir.to_path_buf(),
            source,
        })?;
        let mut out = BTreeMap::new();
        for entry in entries {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "json") {
                let c = Self::load(&path)?;
                out.insert(c.name.clone(), c);
            }
        }
        Ok(out)
    }
}
