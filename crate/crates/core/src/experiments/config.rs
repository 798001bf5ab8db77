//! Experiment configuration: a JSON document layered over per-kind defaults.
//!
//! Resolution order is defaults, then the file, then `key=value`
//! overrides. Every constant of the simulation is a named key.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::bayes::GaussianBelief;
use crate::relay::Budgets;
use crate::sca::ScaOptions;
use crate::strategy::{ONE_HOP_OPT, ONE_HOP_UNIFORM, TWO_HOP_OPT, TWO_HOP_UNIFORM};

/// Per-channel observation gains of the scalar scenario.
pub const SCALAR_GAINS: [f64; 10] = [1.00, 1.11, 1.22, 1.33, 1.44, 1.55, 1.66, 1.77, 1.88, 2.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// One scalar target observed through fixed per-channel gains.
    Scalar,
    /// 3-D position observed through linearized range and angle measurements.
    Vector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacementMode {
    /// One layout drawn from the seed, re-permuted across channels per trial.
    Permutation,
    /// Fresh positions on the sphere for every trial.
    Resample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    /// Physical sensors; the vector scenario has three channels per sensor.
    pub sensor_count: usize,
    /// Scalar scenario only: observation gain of each channel.
    pub gains: Vec<f64>,
    pub prior_mean: Vec<f64>,
    pub prior_cov: Vec<Vec<f64>>,
    /// Variance of each sensor's measurement noise.
    pub observation_noise: f64,
    /// Noise power at the relay receiver.
    pub relay_noise: f64,
    /// Noise power at the fusion-center receiver.
    pub fc_noise: f64,
    /// Carrier wavelength in meters.
    pub wavelength: f64,
    /// Linear SNR factor of the path-loss law.
    pub snr: f64,
    /// Distance from the placement center to the fusion center.
    pub one_hop_distance: f64,
    /// Distance from the placement center to the relay.
    pub two_hop_distance: f64,
    pub placement_radius: f64,
    pub placement: PlacementMode,
    /// Multiply every link gain by an independent unit-mean exponential draw.
    pub fading: bool,
    pub p_t_grid: Vec<f64>,
    pub p_r: f64,
    pub trials: usize,
    pub seed: u64,
    pub methods: Vec<String>,
    pub optimizer: ScaOptions,
}

impl ScenarioConfig {
    pub fn defaults(kind: ScenarioKind) -> Self {
        let common = Self {
            kind,
            sensor_count: 10,
            gains: Vec::new(),
            prior_mean: vec![1.0],
            prior_cov: vec![vec![1.0]],
            observation_noise: 1.0,
            relay_noise: 1.0,
            fc_noise: 1.0,
            wavelength: 0.125,
            snr: 1e10,
            one_hop_distance: 400.0,
            two_hop_distance: 200.0,
            placement_radius: 20.0,
            placement: PlacementMode::Permutation,
            fading: false,
            p_t_grid: (1..=10).map(|k| k as f64 / 10.0).collect(),
            p_r: 5.0,
            trials: 10_000,
            seed: 1,
            methods: [TWO_HOP_OPT, TWO_HOP_UNIFORM, ONE_HOP_OPT, ONE_HOP_UNIFORM].map(String::from).to_vec(),
            optimizer: ScaOptions::default(),
        };
        match kind {
            ScenarioKind::Scalar => Self { gains: SCALAR_GAINS.to_vec(), ..common },
            ScenarioKind::Vector => Self {
                prior_mean: vec![30.0, 30.0, 10.0],
                prior_cov: vec![vec![4.0, 0.0, 0.0], vec![0.0, 4.0, 0.0], vec![0.0, 0.0, 1.0]],
                placement: PlacementMode::Resample,
                ..common
            },
        }
    }

    /// Builds a config from user-supplied JSON plus dotted-path overrides.
    pub fn from_value(user: Value, overrides: &[(String, Value)]) -> Result<Self, ConfigError> {
        let mut user = match user {
            Value::Object(_) => user,
            Value::Null => Value::Object(Map::new()),
            _ => return Err(ConfigError::field("<root>", "config must be a JSON object")),
        };
        for (key, value) in overrides {
            set_path(&mut user, key, value.clone())?;
        }
        let kind = match user.get("kind") {
            None => ScenarioKind::Scalar,
            Some(v) => serde_json::from_value(v.clone())
                .map_err(|e| ConfigError::field("kind", e.to_string()))?,
        };
        let mut merged = serde_json::to_value(Self::defaults(kind)).expect("defaults serialize");
        merge(&mut merged, user);
        let cfg: Self = serde_path_to_error::deserialize(merged).map_err(|e| {
            let path = e.path().to_string();
            ConfigError::field(if path.is_empty() { "<root>".into() } else { path }, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_str(text: &str, overrides: &[(String, Value)]) -> Result<Self, ConfigError> {
        let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_value(value, overrides)
    }

    pub fn load(path: &Path, overrides: &[(String, Value)]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text, overrides)
    }

    /// Number of independently powered channels.
    pub fn channel_count(&self) -> usize {
        match self.kind {
            ScenarioKind::Scalar => self.gains.len(),
            ScenarioKind::Vector => 3 * self.sensor_count,
        }
    }

    pub fn target_dim(&self) -> usize {
        match self.kind {
            ScenarioKind::Scalar => 1,
            ScenarioKind::Vector => 3,
        }
    }

    pub fn prior(&self) -> crate::Result<GaussianBelief> {
        let n = self.prior_mean.len();
        let cov = nalgebra::DMatrix::from_fn(n, n, |i, j| self.prior_cov[i][j]);
        GaussianBelief::new(nalgebra::DVector::from_column_slice(&self.prior_mean), cov)
    }

    pub fn budgets(&self, p_t: f64) -> crate::Result<Budgets> {
        Budgets::new(p_t, self.p_r)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("observation_noise", self.observation_noise),
            ("relay_noise", self.relay_noise),
            ("fc_noise", self.fc_noise),
            ("wavelength", self.wavelength),
            ("snr", self.snr),
            ("one_hop_distance", self.one_hop_distance),
            ("two_hop_distance", self.two_hop_distance),
            ("placement_radius", self.placement_radius),
            ("p_r", self.p_r),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::field(name, format!("must be positive and finite, got {v}")));
            }
        }
        if self.two_hop_distance <= self.placement_radius {
            return Err(ConfigError::field("two_hop_distance", "must exceed placement_radius so no sensor sits on the relay"));
        }
        if self.one_hop_distance <= self.two_hop_distance {
            return Err(ConfigError::field("one_hop_distance", "must exceed two_hop_distance so the relay lies between sensors and fusion center"));
        }
        if self.sensor_count == 0 {
            return Err(ConfigError::field("sensor_count", "must be at least 1"));
        }
        if self.trials == 0 {
            return Err(ConfigError::field("trials", "must be at least 1"));
        }
        if self.p_t_grid.is_empty() {
            return Err(ConfigError::field("p_t_grid", "must not be empty"));
        }
        if self.p_t_grid.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(ConfigError::field("p_t_grid", "entries must be positive and finite"));
        }
        if self.p_t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError::field("p_t_grid", "must be strictly ascending"));
        }
        if self.methods.is_empty() {
            return Err(ConfigError::field("methods", "must name at least one method"));
        }
        let n = self.target_dim();
        if self.prior_mean.len() != n {
            return Err(ConfigError::field("prior_mean", format!("expected {n} entries for this kind, got {}", self.prior_mean.len())));
        }
        if self.prior_cov.len() != n || self.prior_cov.iter().any(|r| r.len() != n) {
            return Err(ConfigError::field("prior_cov", format!("expected a {n}x{n} matrix")));
        }
        self.prior().map_err(|e| ConfigError::field("prior_cov", e.to_string()))?;
        if self.kind == ScenarioKind::Scalar {
            if self.gains.len() != self.sensor_count {
                return Err(ConfigError::field(
                    "gains",
                    format!("expected sensor_count = {} entries, got {}", self.sensor_count, self.gains.len()),
                ));
            }
            if self.gains.iter().any(|g| !g.is_finite() || *g == 0.0) {
                return Err(ConfigError::field("gains", "entries must be finite and nonzero"));
            }
        }
        self.optimizer.validate().map_err(|e| ConfigError::field("optimizer", e.to_string()))?;
        Ok(())
    }
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self::defaults(ScenarioKind::Scalar)
    }
}

/// Parses `key=value`; the value is read as JSON and falls back to a string.
pub fn parse_override(text: &str) -> Result<(String, Value), ConfigError> {
    let (key, raw) = text
        .split_once('=')
        .ok_or_else(|| ConfigError::field(text, "override must have the form key=value"))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(ConfigError::field(text, "override key is empty"));
    }
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()));
    Ok((key.to_string(), value))
}

fn set_path(root: &mut Value, key: &str, value: Value) -> Result<(), ConfigError> {
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| ConfigError::field(key, format!("`{}` is not an object", parts[..i].join("."))))?;
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        node = obj.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()));
    }
    unreachable!("split yields at least one part")
}

/// Objects merge key by key; everything else is replaced.
fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Recursively key-sorted JSON, stable under key reordering in the source.
pub fn canonical_json(value: &Value) -> String {
    fn sort(v: &Value) -> Value {
        match v {
            Value::Object(m) => {
                let mut keys: Vec<&String> = m.keys().collect();
                keys.sort();
                Value::Object(keys.into_iter().map(|k| (k.clone(), sort(&m[k]))).collect())
            }
            Value::Array(a) => Value::Array(a.iter().map(sort).collect()),
            other => other.clone(),
        }
    }
    serde_json::to_string(&sort(value)).expect("json values serialize")
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Io(String),
    Syntax { line: usize, column: usize, message: String },
    Field { field: String, message: String },
}

impl ConfigError {
    pub fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Field { field: field.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Io(m) => write!(f, "cannot read config: {m}"),
            Self::Syntax { line, column, message } => {
                write!(f, "config syntax error at line {line}, column {column}: {message}")
            }
            Self::Field { field, message } => write!(f, "config field `{field}`: {message}"),
        }
    }
}

impl std::error::Error for ConfigError {}
