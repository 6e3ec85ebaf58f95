//! Discrete battery model of one relay and its Markov chain.
//!
//! A battery of capacity `C` has `L + 1` levels `ε_i = i C / L`. Harvested energy
//! is floored to a level, the circuit cost is ceiled to a level, and thresholds
//! are kept as integer level indices so the index arithmetic in the transition
//! structure is exact.
//!
//! Below its threshold a relay harvests (EH mode, the battery never discharges);
//! at or above it the relay tries to decode (IF mode): it pays `α` always and
//! additionally `β` when it decodes and forwards.

use nalgebra::{DMatrix, DVector};

use crate::channel::{decode_failure_prob, NakagamiLink, RadioParams};
use crate::error::{invalid, Error, Result};

/// Relative slack used when snapping joule values onto the level lattice.
const LATTICE_TOLERANCE: f64 = 1e-9;

/// Residual above which a stationary solve is treated as failed.
const SOLVE_RESIDUAL_LIMIT: f64 = 1e-8;

fn snap(x: f64) -> Option<f64> {
    let r = x.round();
    ((x - r).abs() <= LATTICE_TOLERANCE * x.abs().max(1.0)).then_some(r)
}

fn ceil_on_lattice(x: f64) -> f64 {
    snap(x).unwrap_or_else(|| x.ceil())
}

/// Capacity, level count and discretized circuit cost shared by all relays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatterySpec {
    capacity: f64,
    levels: usize,
    alpha_raw: f64,
    alpha_levels: usize,
}

impl BatterySpec {
    pub fn new(capacity: f64, levels: usize, alpha_raw: f64) -> Result<Self> {
        if !(capacity > 0.0) || !capacity.is_finite() {
            return Err(invalid("capacity", format!("must be > 0 J, got {capacity}")));
        }
        if levels == 0 {
            return Err(invalid("levels", "at least one non-empty level is required"));
        }
        let alpha_levels = discretize_alpha(alpha_raw, capacity, levels)?;
        if alpha_levels >= levels {
            return Err(Error::AlphaExceedsCapacity {
                alpha: alpha_raw,
                capacity,
            });
        }
        Ok(Self {
            capacity,
            levels,
            alpha_raw,
            alpha_levels,
        })
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    /// `L`, the number of levels above empty.
    pub fn levels(&self) -> usize {
        self.levels
    }

    /// `ε₁ = C / L`.
    pub fn level_energy(&self) -> f64 {
        self.capacity / self.levels as f64
    }

    /// `ε_i = i C / L`.
    pub fn epsilon(&self, i: usize) -> f64 {
        i as f64 * self.capacity / self.levels as f64
    }

    pub fn alpha_raw(&self) -> f64 {
        self.alpha_raw
    }

    /// Discretized circuit cost in levels.
    pub fn alpha_levels(&self) -> usize {
        self.alpha_levels
    }

    pub fn alpha(&self) -> f64 {
        self.epsilon(self.alpha_levels)
    }

    /// Smallest and largest admissible threshold level.
    pub fn threshold_range(&self) -> (usize, usize) {
        (self.alpha_levels + 1, self.levels)
    }

    /// Harvested energy floored to a level index, capped at `L`.
    pub fn discretize_harvest(&self, e_raw: f64) -> usize {
        discretize_harvest(e_raw, self)
    }
}

/// Largest level `j` with `ε_j ≤ e_raw`, capped at `L`.
pub fn discretize_harvest(e_raw: f64, spec: &BatterySpec) -> usize {
    if !(e_raw > 0.0) {
        return 0;
    }
    let x = e_raw * spec.levels as f64 / spec.capacity;
    if x >= spec.levels as f64 {
        spec.levels
    } else {
        x.floor() as usize
    }
}

/// Smallest level `j` with `ε_j ≥ alpha_raw`.
pub fn discretize_alpha(alpha_raw: f64, capacity: f64, levels: usize) -> Result<usize> {
    if !(alpha_raw >= 0.0) || !alpha_raw.is_finite() {
        return Err(invalid("alpha", format!("must be ≥ 0 J, got {alpha_raw}")));
    }
    if alpha_raw > capacity {
        return Err(Error::AlphaExceedsCapacity {
            alpha: alpha_raw,
            capacity,
        });
    }
    Ok(ceil_on_lattice(alpha_raw * levels as f64 / capacity) as usize)
}

/// How a joule-valued threshold is mapped onto the level lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdRounding {
    /// The threshold must already be a level multiple.
    #[default]
    Exact,
    /// Smallest admissible level at or above the threshold, clamped to the feasible range.
    Ceil,
}

/// Per-relay energy threshold `χ = α + β`, stored as level indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelayEnergyPolicy {
    chi_levels: usize,
    beta_levels: usize,
}

impl RelayEnergyPolicy {
    pub fn from_chi_levels(spec: &BatterySpec, chi_levels: usize) -> Result<Self> {
        let (min, max) = spec.threshold_range();
        if chi_levels < min || chi_levels > max {
            return Err(Error::ThresholdOutOfRange {
                chi_level: chi_levels,
                min,
                max,
            });
        }
        Ok(Self {
            chi_levels,
            beta_levels: chi_levels - spec.alpha_levels,
        })
    }

    pub fn from_beta_levels(spec: &BatterySpec, beta_levels: usize) -> Result<Self> {
        Self::from_chi_levels(spec, spec.alpha_levels + beta_levels)
    }

    /// Maps a threshold in joules onto the lattice.
    pub fn from_joules(spec: &BatterySpec, chi: f64, rounding: ThresholdRounding) -> Result<Self> {
        if !(chi > 0.0) || !chi.is_finite() {
            return Err(invalid("chi", format!("threshold must be > 0 J, got {chi}")));
        }
        let x = chi / spec.level_energy();
        let (min, max) = spec.threshold_range();
        match rounding {
            ThresholdRounding::Exact => match snap(x) {
                Some(level) => Self::from_chi_levels(spec, level as usize),
                None => Err(Error::OffLatticeThreshold {
                    chi,
                    below: spec.epsilon(x.floor() as usize),
                    above: spec.epsilon(x.ceil() as usize),
                }),
            },
            ThresholdRounding::Ceil => {
                let level = (ceil_on_lattice(x) as usize).clamp(min, max);
                Self::from_chi_levels(spec, level)
            }
        }
    }

    /// Threshold `χ / ε₁`.
    pub fn chi_levels(&self) -> usize {
        self.chi_levels
    }

    /// Forwarding energy `β / ε₁`.
    pub fn beta_levels(&self) -> usize {
        self.beta_levels
    }

    pub fn chi(&self, spec: &BatterySpec) -> f64 {
        spec.epsilon(self.chi_levels)
    }

    pub fn beta(&self, spec: &BatterySpec) -> f64 {
        spec.epsilon(self.beta_levels)
    }
}

/// Dense `(L+1)×(L+1)` row-stochastic transition matrix of one relay's battery.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl TransitionMatrix {
    /// Wraps a row-major square matrix; rows must be probability vectors.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let size = rows.len();
        if size == 0 || rows.iter().any(|r| r.len() != size) {
            return Err(invalid("transition", "matrix must be square and non-empty"));
        }
        for (i, row) in rows.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) || (sum - 1.0).abs() > 1e-9 {
                return Err(invalid("transition", format!("row {i} is not a probability vector")));
            }
        }
        Ok(Self {
            size,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.size..(i + 1) * self.size]
    }

    fn set(&mut self, i: usize, j: usize, p: f64) {
        self.entries[i * self.size + j] = p;
    }
}

/// Probability that the floored harvest equals exactly `k` levels, for `k < L`,
/// and the tail probability of harvesting at least `k` levels, for `k ≤ L`.
struct HarvestLevels {
    exact: Vec<f64>,
    at_least: Vec<f64>,
}

fn harvest_levels(link: &NakagamiLink, radio: &RadioParams, spec: &BatterySpec) -> HarvestLevels {
    let l = spec.levels;
    // ½ηPH ≥ kε₁  ⇔  H ≥ 2kC / (ηPL)
    let unit = 2.0 * spec.level_energy() / (radio.eta() * radio.source_power());
    let (cdf, ccdf): (Vec<f64>, Vec<f64>) = (0..=l)
        .map(|k| {
            if k == 0 {
                (0.0, 1.0)
            } else {
                let t = k as f64 * unit;
                (link.cdf(t), link.ccdf(t))
            }
        })
        .unzip();
    let exact = (0..l)
        .map(|k| {
            // difference taken on whichever tail is small
            if cdf[k + 1] <= 0.5 {
                cdf[k + 1] - cdf[k]
            } else {
                ccdf[k] - ccdf[k + 1]
            }
            .max(0.0)
        })
        .collect();
    HarvestLevels {
        exact,
        at_least: ccdf,
    }
}

/// Builds `Z_u` for one relay under its energy policy.
pub fn build_transition_matrix(
    link: &NakagamiLink,
    radio: &RadioParams,
    spec: &BatterySpec,
    policy: &RelayEnergyPolicy,
) -> Result<TransitionMatrix> {
    let (min, max) = spec.threshold_range();
    if policy.chi_levels < min || policy.chi_levels > max || policy.chi_levels - policy.beta_levels != spec.alpha_levels {
        return Err(Error::ThresholdOutOfRange {
            chi_level: policy.chi_levels,
            min,
            max,
        });
    }
    let l = spec.levels;
    let size = l + 1;
    let mut z = TransitionMatrix {
        size,
        entries: vec![0.0; size * size],
    };
    let harvest = harvest_levels(link, radio, spec);
    let chi = policy.chi_levels;
    for i in 0..chi {
        for j in i..l {
            z.set(i, j, harvest.exact[j - i]);
        }
        z.set(i, l, harvest.at_least[l - i]);
    }
    let fail = decode_failure_prob(link, radio);
    let alpha = spec.alpha_levels;
    for i in chi..=l {
        z.set(i, i - alpha, fail);
        let j = i - chi;
        z.set(i, j, z.get(i, j) + (1.0 - fail));
    }
    Ok(z)
}

/// Long-run occupancy `π` of the battery levels.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution {
    pi: Vec<f64>,
}

impl StationaryDistribution {
    pub fn from_vec(pi: Vec<f64>) -> Result<Self> {
        let sum: f64 = pi.iter().sum();
        if pi.is_empty() || pi.iter().any(|&p| !(p >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(invalid("pi", "not a probability vector"));
        }
        Ok(Self { pi })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.pi
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    /// `‖Zᵀπ − π‖∞`.
    pub fn balance_residual(&self, z: &TransitionMatrix) -> f64 {
        (0..z.size)
            .map(|j| {
                let inflow: f64 = (0..z.size).map(|i| z.get(i, j) * self.pi[i]).sum();
                (inflow - self.pi[j]).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Solves `(Zᵀ − I + B) π = b` with `B` all ones and `b` the ones vector.
pub fn stationary_distribution(z: &TransitionMatrix) -> Result<StationaryDistribution> {
    match lu_stationary(z) {
        Ok(dist) => Ok(dist),
        Err(_) => {
            let dist = gth_stationary(z)?;
            if dist.balance_residual(z) > SOLVE_RESIDUAL_LIMIT {
                return Err(Error::SingularSystem);
            }
            Ok(dist)
        }
    }
}

/// Grassmann-Taksar-Heyman state reduction. Free of subtractions, so it stays
/// accurate when transition rates out of a level are far below machine epsilon.
fn gth_stationary(z: &TransitionMatrix) -> Result<StationaryDistribution> {
    let n = z.size;
    let mut p = z.entries.clone();
    let mut out = vec![0.0; n];
    for k in (1..n).rev() {
        let s: f64 = p[k * n..k * n + k].iter().sum();
        if !(s > 0.0) {
            return Err(Error::SingularSystem);
        }
        out[k] = s;
        for i in 0..k {
            let f = p[i * n + k] / s;
            if f == 0.0 {
                continue;
            }
            for j in 0..k {
                p[i * n + j] += f * p[k * n + j];
            }
        }
    }
    let mut pi = vec![0.0; n];
    pi[0] = 1.0;
    for k in 1..n {
        let inflow: f64 = (0..k).map(|i| pi[i] * p[i * n + k]).sum();
        pi[k] = inflow / out[k];
    }
    let total: f64 = pi.iter().sum();
    if !total.is_finite() || !(total > 0.0) {
        return Err(Error::SingularSystem);
    }
    pi.iter_mut().for_each(|x| *x /= total);
    Ok(StationaryDistribution { pi })
}

fn lu_stationary(z: &TransitionMatrix) -> Result<StationaryDistribution> {
    let n = z.size;
    let a = DMatrix::from_fn(n, n, |r, c| {
        z.get(c, r) + 1.0 - if r == c { 1.0 } else { 0.0 }
    });
    let b = DVector::from_element(n, 1.0);
    let lu = a.clone().lu();
    let mut pi = lu.solve(&b).ok_or(Error::SingularSystem)?;
    // one step of iterative refinement
    let r = &b - &a * &pi;
    if let Some(delta) = lu.solve(&r) {
        pi += delta;
    }
    if pi.iter().any(|p| !p.is_finite()) {
        return Err(Error::SingularSystem);
    }
    let mut pi: Vec<f64> = pi.iter().map(|&p| p.max(0.0)).collect();
    let total: f64 = pi.iter().sum();
    if !(total > 0.0) {
        return Err(Error::SingularSystem);
    }
    pi.iter_mut().for_each(|p| *p /= total);
    let dist = StationaryDistribution { pi };
    if dist.balance_residual(z) > SOLVE_RESIDUAL_LIMIT {
        return Err(Error::SingularSystem);
    }
    Ok(dist)
}

/// Long-run probabilities of the two operating modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeProbabilities {
    pub harvesting: f64,
    pub forwarding: f64,
}

/// Splits `π` at the threshold: levels `≥ χ/ε₁` are IF, the rest EH.
pub fn mode_probabilities(pi: &StationaryDistribution, policy: &RelayEnergyPolicy) -> ModeProbabilities {
    let chi = policy.chi_levels.min(pi.pi.len());
    ModeProbabilities {
        harvesting: pi.pi[..chi].iter().sum(),
        forwarding: pi.pi[chi..].iter().sum(),
    }
}

/// Chain and stationary solution of one relay, solved in one go.
#[derive(Debug, Clone)]
pub struct RelayChain {
    pub matrix: TransitionMatrix,
    pub stationary: StationaryDistribution,
    pub modes: ModeProbabilities,
    pub decode_failure: f64,
}

impl RelayChain {
    pub fn solve(
        link: &NakagamiLink,
        radio: &RadioParams,
        spec: &BatterySpec,
        policy: &RelayEnergyPolicy,
    ) -> Result<Self> {
        let matrix = build_transition_matrix(link, radio, spec, policy)?;
        let stationary = stationary_distribution(&matrix)?;
        let modes = mode_probabilities(&stationary, policy);
        Ok(Self {
            matrix,
            stationary,
            modes,
            decode_failure: decode_failure_prob(link, radio),
        })
    }
}
