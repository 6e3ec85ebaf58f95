//! JSON scenario files.
//!
//! A scenario file describes one network family plus the grid of parameters to
//! sweep. Any numeric field marked as an axis accepts a single number, a list,
//! or a grid object `{"start", "stop", "points", "spacing"}` with spacing
//! `"linear"` (default) or `"geometric"`.
//!
//! ```json
//! {
//!   "radio": { "power": { "start": 20, "stop": 46, "points": 14 }, "power_unit": "dBm", "kappa": 1 },
//!   "battery": { "capacity": 2e-5, "levels": [10, 50, 200], "alpha": 1e-7 },
//!   "topology": { "d_sd": 20, "omega": 3, "m": 2, "d_sr": [5, 5.5, 6, 6, 6, 6, 6.5, 7] },
//!   "policy": { "chi": [3e-6, 3e-6, 3e-6, 3e-6, 3e-6, 3e-6, 4e-6, 4e-6], "threshold_rounding": "ceil" },
//!   "sim": { "blocks": 1000000, "seed": 7 }
//! }
//! ```
//!
//! Defaults: `noise_power` 1e-12 W (−90 dBm), `kappa` 1, `eta` 0.5, `d_sd` 20 m,
//! `omega` 3, `m` 2, `threshold_rounding` `"exact"`.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Deserializer};

use crate::analysis::{NetworkScenario, Relay};
use crate::battery::{BatterySpec, RelayEnergyPolicy, ThresholdRounding};
use crate::channel::{dbm_to_watts, NakagamiLink, RadioParams, RayleighLink, Topology};
use crate::error::Error;
use crate::optimizer::FULL_SEARCH_LIMIT;
use crate::simulator::{BatteryMode, SimConfig};

/// Failure to turn a file into sweep points.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{} problem(s) in scenario:\n{}", .0.len(), render(.0))]
    Invalid(Vec<Diagnostic>),
}

fn render(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n")
}

/// One problem found by [`ScenarioFile::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    /// Dotted path of the offending field.
    pub field: String,
    pub message: String,
    /// The model error behind the message, when there is one.
    pub error: Option<Error>,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl Diagnostic {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
            error: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Value(f64),
    List(Vec<f64>),
    Grid(Grid),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Geometric,
}

impl Axis {
    pub fn values(&self) -> Result<Vec<f64>, String> {
        let v = match self {
            Axis::Value(x) => vec![*x],
            Axis::List(xs) if xs.is_empty() => return Err("list must hold at least one value".into()),
            Axis::List(xs) => xs.clone(),
            Axis::Grid(g) => g.values()?,
        };
        if v.iter().any(|x| !x.is_finite()) {
            return Err("values must be finite".into());
        }
        Ok(v)
    }
}

impl Grid {
    pub fn values(&self) -> Result<Vec<f64>, String> {
        let n = self.points;
        if n == 0 {
            return Err("grid needs at least one point".into());
        }
        if n == 1 {
            return Ok(vec![self.start]);
        }
        let last = (n - 1) as f64;
        match self.spacing {
            Spacing::Linear => Ok((0..n)
                .map(|i| if i + 1 == n { self.stop } else { self.start + (self.stop - self.start) * i as f64 / last })
                .collect()),
            Spacing::Geometric => {
                if !(self.start > 0.0 && self.stop > 0.0) {
                    return Err("geometric grid needs positive endpoints".into());
                }
                let ratio = self.stop / self.start;
                Ok((0..n)
                    .map(|i| if i + 1 == n { self.stop } else { self.start * ratio.powf(i as f64 / last) })
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
pub enum PowerUnit {
    #[default]
    W,
    #[serde(rename = "dBm")]
    Dbm,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioSection {
    pub power: Axis,
    #[serde(default)]
    pub power_unit: PowerUnit,
    #[serde(default = "default_noise")]
    pub noise_power: f64,
    #[serde(default = "default_kappa")]
    pub kappa: Axis,
    #[serde(default = "default_eta")]
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatterySection {
    pub capacity: Axis,
    #[serde(default)]
    pub levels: Option<Axis>,
    /// Fixed `ε₁`; the level count then follows the capacity.
    #[serde(default)]
    pub level_energy: Option<f64>,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologySection {
    #[serde(default = "default_d_sd")]
    pub d_sd: f64,
    #[serde(default = "default_omega")]
    pub omega: f64,
    #[serde(default = "default_m")]
    pub m: f64,
    #[serde(default, deserialize_with = "non_empty")]
    pub d_sr: Option<Vec<f64>>,
    /// Identical relays co-located at one distance.
    #[serde(default)]
    pub cluster: Option<ClusterSection>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterSection {
    pub relays: Axis,
    pub d_sr: Axis,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitRelay {
    pub lambda_sr: f64,
    pub lambda_rd: f64,
    #[serde(default = "default_m")]
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum PolicySection {
    /// `"optimize:iid"`, `"optimize:full"`, `"optimize:heuristic"` or `"optimize:common"`.
    Shorthand(String),
    Table(PolicyTable),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyTable {
    /// One threshold per relay, in joules.
    #[serde(default, deserialize_with = "non_empty")]
    pub chi: Option<Vec<f64>>,
    /// Common threshold for every relay, in joules.
    #[serde(default)]
    pub iid_chi: Option<Axis>,
    #[serde(default)]
    pub optimize: Option<OneOrMany>,
    #[serde(default)]
    pub threshold_rounding: ThresholdRounding,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSection {
    pub blocks: u64,
    pub seed: u64,
    pub battery_mode: BatteryMode,
    pub warmup: u64,
    pub streams: usize,
}

impl Default for SimSection {
    fn default() -> Self {
        let d = SimConfig::default();
        Self {
            blocks: d.blocks,
            seed: d.seed,
            battery_mode: d.battery_mode,
            warmup: d.warmup,
            streams: d.streams,
        }
    }
}

impl From<SimSection> for SimConfig {
    fn from(s: SimSection) -> Self {
        SimConfig {
            blocks: s.blocks,
            seed: s.seed,
            battery_mode: s.battery_mode,
            warmup: s.warmup,
            streams: s.streams,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub radio: RadioSection,
    pub battery: BatterySection,
    #[serde(default)]
    pub topology: Option<TopologySection>,
    #[serde(default, deserialize_with = "non_empty")]
    pub relays: Option<Vec<ExplicitRelay>>,
    pub policy: PolicySection,
    #[serde(default)]
    pub sim: Option<SimSection>,
}

fn non_empty<'de, D, T>(d: D) -> Result<Option<Vec<T>>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    let v = Vec::<T>::deserialize(d)?;
    if v.is_empty() {
        return Err(serde::de::Error::invalid_length(0, &"at least one entry"));
    }
    Ok(Some(v))
}

fn default_noise() -> f64 {
    1e-12
}
fn default_kappa() -> Axis {
    Axis::Value(1.0)
}
fn default_eta() -> f64 {
    0.5
}
fn default_d_sd() -> f64 {
    20.0
}
fn default_omega() -> f64 {
    3.0
}
fn default_m() -> f64 {
    2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizeMethod {
    Iid,
    Full,
    Heuristic,
    Common,
}

impl OptimizeMethod {
    pub fn parse(s: &str) -> Option<Self> {
        match s.strip_prefix("optimize:").unwrap_or(s) {
            "iid" => Some(Self::Iid),
            "full" => Some(Self::Full),
            "heuristic" => Some(Self::Heuristic),
            "common" => Some(Self::Common),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Iid => "optimize:iid",
            Self::Full => "optimize:full",
            Self::Heuristic => "optimize:heuristic",
            Self::Common => "optimize:common",
        }
    }
}

/// How thresholds are chosen at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicyChoice {
    PerRelay(Vec<f64>),
    Iid(f64),
    Optimize(OptimizeMethod),
}

impl PolicyChoice {
    pub fn label(&self) -> String {
        match self {
            Self::PerRelay(_) => "fixed".into(),
            Self::Iid(_) => "iid".into(),
            Self::Optimize(m) => m.as_str().into(),
        }
    }
}

/// Where the relays sit.
#[derive(Debug, Clone, PartialEq)]
pub enum RelaySet {
    Linear { d_sd: f64, omega: f64, m: f64, d_sr: Vec<f64> },
    Explicit(Vec<ExplicitRelay>),
}

impl RelaySet {
    pub fn len(&self) -> usize {
        match self {
            Self::Linear { d_sr, .. } => d_sr.len(),
            Self::Explicit(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Semicolon-separated distances, or `explicit` for gain lists.
    pub fn describe(&self) -> String {
        match self {
            Self::Linear { d_sr, .. } => d_sr.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(";"),
            Self::Explicit(_) => "explicit".into(),
        }
    }
}

/// Fully resolved coordinates of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub index: usize,
    /// Source power in watts.
    pub power: f64,
    pub noise_power: f64,
    pub kappa: f64,
    pub eta: f64,
    pub capacity: f64,
    pub levels: usize,
    pub alpha: f64,
    pub relays: RelaySet,
    pub policy: PolicyChoice,
    pub rounding: ThresholdRounding,
}

impl SweepPoint {
    pub fn radio(&self) -> crate::Result<RadioParams> {
        RadioParams::new(self.power, self.noise_power, self.kappa, self.eta)
    }

    pub fn battery(&self) -> crate::Result<BatterySpec> {
        BatterySpec::new(self.capacity, self.levels, self.alpha)
    }

    /// The scenario at this point. Optimized points start from the lowest threshold.
    pub fn scenario(&self) -> crate::Result<NetworkScenario> {
        let radio = self.radio()?;
        let battery = self.battery()?;
        let n = self.relays.len();
        let policies = match &self.policy {
            PolicyChoice::PerRelay(chis) => {
                if chis.len() != n {
                    return Err(Error::InvalidParameter {
                        name: "policy.chi",
                        reason: format!("{} thresholds for {} relays", chis.len(), n),
                    });
                }
                chis.iter()
                    .map(|&c| RelayEnergyPolicy::from_joules(&battery, c, self.rounding))
                    .collect::<crate::Result<Vec<_>>>()?
            }
            PolicyChoice::Iid(chi) => vec![RelayEnergyPolicy::from_joules(&battery, *chi, self.rounding)?; n],
            PolicyChoice::Optimize(_) => {
                vec![RelayEnergyPolicy::from_chi_levels(&battery, battery.threshold_range().0)?; n]
            }
        };
        match &self.relays {
            RelaySet::Linear { d_sd, omega, m, d_sr } => {
                let topology = Topology::new(*d_sd, d_sr.clone(), *omega)?;
                NetworkScenario::from_topology(&topology, *m, radio, battery, &policies)
            }
            RelaySet::Explicit(list) => {
                let relays = list
                    .iter()
                    .zip(policies)
                    .map(|(r, policy)| {
                        Ok(Relay {
                            source_link: NakagamiLink::new(r.m, r.lambda_sr)?,
                            destination_link: RayleighLink::new(r.lambda_rd)?,
                            policy,
                        })
                    })
                    .collect::<crate::Result<Vec<_>>>()?;
                NetworkScenario::new(relays, radio, battery)
            }
        }
    }

    fn context(&self) -> String {
        format!(
            "P = {} W, C = {} J, L = {}, N = {}",
            self.power,
            self.capacity,
            self.levels,
            self.relays.len()
        )
    }
}

/// Reads and parses a scenario file.
pub fn load(path: impl AsRef<Path>) -> Result<ScenarioFile, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ScenarioFile::from_json(&text)
}

/// Field name under which a model error is reported.
fn error_field(e: &Error) -> String {
    match e {
        Error::InvalidParameter { name, .. } => (*name).to_string(),
        Error::AlphaExceedsCapacity { .. } => "battery.alpha".into(),
        Error::OffLatticeThreshold { .. } | Error::ThresholdOutOfRange { .. } => "policy.chi".into(),
        Error::TooManyRelays { .. } => "relays".into(),
        Error::SearchSpaceTooLarge { .. } => "policy.optimize".into(),
        Error::SingularSystem => "scenario".into(),
    }
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Simulation settings, if the file asks for Monte Carlo.
    pub fn sim_config(&self) -> Option<SimConfig> {
        self.sim.map(SimConfig::from)
    }

    fn axis(field: &str, axis: &Axis, diags: &mut Vec<Diagnostic>) -> Vec<f64> {
        axis.values().unwrap_or_else(|e| {
            diags.push(Diagnostic::new(field, e));
            Vec::new()
        })
    }

    fn relay_sets(&self, diags: &mut Vec<Diagnostic>) -> Vec<RelaySet> {
        match (&self.topology, &self.relays) {
            (Some(_), Some(_)) => {
                diags.push(Diagnostic::new("topology", "give either `topology` or `relays`, not both"));
                Vec::new()
            }
            (None, None) => {
                diags.push(Diagnostic::new("topology", "one of `topology` or `relays` is required"));
                Vec::new()
            }
            (None, Some(list)) => vec![RelaySet::Explicit(list.clone())],
            (Some(t), None) => match (&t.d_sr, &t.cluster) {
                (Some(d_sr), None) => vec![RelaySet::Linear {
                    d_sd: t.d_sd,
                    omega: t.omega,
                    m: t.m,
                    d_sr: d_sr.clone(),
                }],
                (None, Some(c)) => {
                    let counts = Self::axis("topology.cluster.relays", &c.relays, diags);
                    let dists = Self::axis("topology.cluster.d_sr", &c.d_sr, diags);
                    let mut sets = Vec::new();
                    for &n in &counts {
                        if n < 1.0 || n.fract() != 0.0 {
                            diags.push(Diagnostic::new(
                                "topology.cluster.relays",
                                format!("relay count must be a positive integer, got {n}"),
                            ));
                            continue;
                        }
                        for &d in &dists {
                            sets.push(RelaySet::Linear {
                                d_sd: t.d_sd,
                                omega: t.omega,
                                m: t.m,
                                d_sr: vec![d; n as usize],
                            });
                        }
                    }
                    sets
                }
                _ => {
                    diags.push(Diagnostic::new("topology", "give exactly one of `d_sr` or `cluster`"));
                    Vec::new()
                }
            },
        }
    }

    fn policies(&self, diags: &mut Vec<Diagnostic>) -> (Vec<PolicyChoice>, ThresholdRounding) {
        let table = match &self.policy {
            PolicySection::Shorthand(s) => {
                return match OptimizeMethod::parse(s) {
                    Some(m) => (vec![PolicyChoice::Optimize(m)], ThresholdRounding::Exact),
                    None => {
                        diags.push(Diagnostic::new("policy", format!("unknown policy `{s}`")));
                        (Vec::new(), ThresholdRounding::Exact)
                    }
                };
            }
            PolicySection::Table(t) => t,
        };
        let given = [table.chi.is_some(), table.iid_chi.is_some(), table.optimize.is_some()];
        if given.iter().filter(|&&g| g).count() != 1 {
            diags.push(Diagnostic::new(
                "policy",
                "give exactly one of `chi`, `iid_chi` or `optimize`",
            ));
            return (Vec::new(), table.threshold_rounding);
        }
        let choices = if let Some(chi) = &table.chi {
            vec![PolicyChoice::PerRelay(chi.clone())]
        } else if let Some(axis) = &table.iid_chi {
            Self::axis("policy.iid_chi", axis, diags)
                .into_iter()
                .map(PolicyChoice::Iid)
                .collect()
        } else {
            let names = match table.optimize.as_ref().expect("checked above") {
                OneOrMany::One(s) => vec![s.clone()],
                OneOrMany::Many(v) => v.clone(),
            };
            if names.is_empty() {
                diags.push(Diagnostic::new("policy.optimize", "list must hold at least one method"));
            }
            names
                .iter()
                .filter_map(|s| match OptimizeMethod::parse(s) {
                    Some(m) => Some(PolicyChoice::Optimize(m)),
                    None => {
                        diags.push(Diagnostic::new("policy.optimize", format!("unknown method `{s}`")));
                        None
                    }
                })
                .collect()
        };
        (choices, table.threshold_rounding)
    }

    fn level_counts(&self, capacity: f64, diags: &mut Vec<Diagnostic>) -> Vec<usize> {
        let b = &self.battery;
        match (&b.levels, b.level_energy) {
            (Some(axis), None) => Self::axis("battery.levels", axis, diags)
                .into_iter()
                .filter_map(|l| {
                    if l >= 1.0 && l.fract() == 0.0 {
                        Some(l as usize)
                    } else {
                        diags.push(Diagnostic::new(
                            "battery.levels",
                            format!("level count must be a positive integer, got {l}"),
                        ));
                        None
                    }
                })
                .collect(),
            (None, Some(e)) => {
                let ratio = capacity / e;
                let l = ratio.round();
                if !(e > 0.0) || l < 1.0 || (ratio - l).abs() > 1e-9 * l {
                    diags.push(Diagnostic::new(
                        "battery.level_energy",
                        format!("capacity {capacity:e} J is not a positive multiple of {e:e} J"),
                    ));
                    Vec::new()
                } else {
                    vec![l as usize]
                }
            }
            _ => {
                diags.push(Diagnostic::new("battery", "give exactly one of `levels` or `level_energy`"));
                Vec::new()
            }
        }
    }

    fn expand(&self, diags: &mut Vec<Diagnostic>) -> Vec<SweepPoint> {
        let r = &self.radio;
        let powers: Vec<f64> = Self::axis("radio.power", &r.power, diags)
            .into_iter()
            .map(|p| match r.power_unit {
                PowerUnit::W => p,
                PowerUnit::Dbm => dbm_to_watts(p),
            })
            .collect();
        let kappas = Self::axis("radio.kappa", &r.kappa, diags);
        let capacities = Self::axis("battery.capacity", &self.battery.capacity, diags);
        let sets = self.relay_sets(diags);
        let (policies, rounding) = self.policies(diags);
        if let Some(sim) = self.sim_config() {
            if let Err(e) = sim.validate() {
                diags.push(Diagnostic {
                    field: format!("sim.{}", error_field(&e)),
                    message: e.to_string(),
                    error: Some(e),
                });
            }
        }

        let mut points = Vec::new();
        for set in &sets {
            for &capacity in &capacities {
                for levels in self.level_counts(capacity, diags) {
                    for &kappa in &kappas {
                        for &power in &powers {
                            for policy in &policies {
                                points.push(SweepPoint {
                                    index: points.len(),
                                    power,
                                    noise_power: r.noise_power,
                                    kappa,
                                    eta: r.eta,
                                    capacity,
                                    levels,
                                    alpha: self.battery.alpha,
                                    relays: set.clone(),
                                    policy: policy.clone(),
                                    rounding,
                                });
                            }
                        }
                    }
                }
            }
        }
        points
    }

    /// Checks every point of the sweep without running it and lists each
    /// distinct problem once. An empty list means the file is runnable.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        let points = self.expand(&mut diags);
        for point in &points {
            let result = point.scenario().and_then(|s| {
                if point.policy == PolicyChoice::Optimize(OptimizeMethod::Full) {
                    let (min, max) = s.battery().threshold_range();
                    let evaluations = ((max - min + 1) as u128)
                        .checked_pow(s.relay_count() as u32)
                        .unwrap_or(u128::MAX);
                    if evaluations > FULL_SEARCH_LIMIT {
                        return Err(Error::SearchSpaceTooLarge {
                            evaluations,
                            limit: FULL_SEARCH_LIMIT,
                        });
                    }
                }
                if point.policy == PolicyChoice::Optimize(OptimizeMethod::Iid) && !s.is_homogeneous() {
                    return Err(Error::InvalidParameter {
                        name: "policy.optimize",
                        reason: "optimize:iid needs identical relays; use optimize:common".into(),
                    });
                }
                Ok(())
            });
            if let Err(e) = result {
                let field = error_field(&e);
                let message = e.to_string();
                if !diags.iter().any(|d| d.field == field && d.message.starts_with(&message)) {
                    diags.push(Diagnostic {
                        field,
                        message: format!("{message} (first at {})", point.context()),
                        error: Some(e),
                    });
                }
            }
        }
        diags
    }

    /// All sweep points in output order, or every problem found.
    pub fn points(&self) -> Result<Vec<SweepPoint>, ConfigError> {
        let diags = self.validate();
        if !diags.is_empty() {
            return Err(ConfigError::Invalid(diags));
        }
        Ok(self.expand(&mut Vec::new()))
    }
}
