//! Run configuration: built-in defaults, overridden by a `key=value` file,
//! overridden by command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};

use henon_core::continuation::MapKind;
use henon_core::{MapParams2D, MapParams4D};
use serde::Serialize;

pub const OUT_DIR_ENV: &str = "HENON_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "henon-out";
pub const MAX_ORDER: usize = 400;

pub const KEYS: [&str; 11] = [
    "map", "c", "delta", "b", "order", "epsilon", "tol", "max_iters", "seed", "threads", "out",
];

/// Invalid configuration; reported with exit status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_err(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub map: Option<MapKind>,
    pub c: Option<f64>,
    pub delta: Option<f64>,
    pub b: Option<f64>,
    pub order: Option<usize>,
    pub epsilon: Option<f64>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| ConfigError(format!("cannot parse {key} = {value:?}")))
}

pub fn parse_map(value: &str) -> Result<MapKind, ConfigError> {
    match value {
        "2d" => Ok(MapKind::Planar),
        "4d" => Ok(MapKind::Coupled),
        _ => Err(ConfigError(format!("map must be 2d or 4d, got {value:?}"))),
    }
}

impl Overrides {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "map" => self.map = Some(parse_map(value)?),
            "c" => self.c = Some(parse(key, value)?),
            "delta" => self.delta = Some(parse(key, value)?),
            "b" => self.b = Some(parse(key, value)?),
            "order" => self.order = Some(parse(key, value)?),
            "epsilon" => self.epsilon = Some(parse(key, value)?),
            "tol" => self.tol = Some(parse(key, value)?),
            "max_iters" => self.max_iters = Some(parse(key, value)?),
            "seed" => self.seed = Some(parse(key, value)?),
            "threads" => self.threads = Some(parse(key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            _ => {
                return Err(ConfigError(format!(
                    "unknown key {key:?} (known: {})",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Parses `key = value` lines; blank lines and `#` comments are skipped.
    pub fn parse_file(text: &str) -> Result<Self, ConfigError> {
        let mut o = Self::default();
        let mut seen = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected key = value", k + 1)))?;
            let key = key.trim();
            if seen.contains(&key) {
                return Err(ConfigError(format!("line {}: duplicate key {key:?}", k + 1)));
            }
            seen.push(key);
            o.set(key, value.trim())
                .map_err(|e| ConfigError(format!("line {}: {}", k + 1, e.0)))?;
        }
        Ok(o)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_file(&text)
    }

    /// Fields set in `self` win over those of `base`.
    pub fn over(self, base: Overrides) -> Overrides {
        Overrides {
            map: self.map.or(base.map),
            c: self.c.or(base.c),
            delta: self.delta.or(base.delta),
            b: self.b.or(base.b),
            order: self.order.or(base.order),
            epsilon: self.epsilon.or(base.epsilon),
            tol: self.tol.or(base.tol),
            max_iters: self.max_iters.or(base.max_iters),
            seed: self.seed.or(base.seed),
            threads: self.threads.or(base.threads),
            out: self.out.or(base.out),
        }
    }
}

/// Fully resolved configuration. The output directory and thread count do
/// not influence results and are left out of the serialized form.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub map: MapKind,
    pub c: f64,
    pub delta: f64,
    pub b: f64,
    pub order: usize,
    pub epsilon: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
    #[serde(skip)]
    pub threads: Option<usize>,
    #[serde(skip)]
    pub out: PathBuf,
}

impl RunConfig {
    pub fn resolve(o: Overrides, env_out: Option<PathBuf>) -> Result<Self, ConfigError> {
        let map = o.map.unwrap_or(MapKind::Planar);
        let cfg = RunConfig {
            map,
            c: o.c.unwrap_or(-2.5),
            delta: o.delta.unwrap_or(1.0),
            b: o.b.unwrap_or(0.1),
            order: o.order.unwrap_or(match map {
                MapKind::Planar => 100,
                MapKind::Coupled => 50,
            }),
            epsilon: o.epsilon.unwrap_or(1e-15),
            tol: o.tol.unwrap_or(henon_core::homoclinic::DEFAULT_TOL),
            max_iters: o.max_iters.unwrap_or(henon_core::homoclinic::DEFAULT_MAX_ITERS),
            seed: o.seed.unwrap_or(0),
            threads: o.threads,
            out: o
                .out
                .or(env_out)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        for (name, v) in [("c", self.c), ("delta", self.delta), ("b", self.b)] {
            if !v.is_finite() {
                return Err(ConfigError(format!("{name} must be finite")));
            }
        }
        if !(1..=MAX_ORDER).contains(&self.order) {
            return Err(ConfigError(format!("order must be in 1..={MAX_ORDER}")));
        }
        if !(self.epsilon > 0.0) {
            return Err(ConfigError("epsilon must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(ConfigError("tol must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(ConfigError("max_iters must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(ConfigError("threads must be at least 1".into()));
        }
        let check = match self.map {
            MapKind::Planar => MapParams2D::new(self.c, self.delta).validate(),
            MapKind::Coupled => MapParams4D::new(self.c, self.delta, self.b).validate(),
        };
        check.map_err(|e| ConfigError(e.to_string()))
    }

    pub fn params_2d(&self) -> MapParams2D {
        MapParams2D::new(self.c, self.delta)
    }

    pub fn params_4d(&self) -> MapParams4D {
        MapParams4D::new(self.c, self.delta, self.b)
    }
}
