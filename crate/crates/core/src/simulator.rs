//! Block-level Monte Carlo simulation of the relay protocol.
//!
//! Every block each relay looks at its own battery. Below its threshold it
//! harvests `½ηPH` during the first slot; at or above it, it spends `α` on
//! decoding and, if `H ≥ vN₀/P`, a further `β` on forwarding. Decoders beamform
//! coherently, so the destination SNR is `(Σ √(2β_u) |g_u|)² / N₀`. Relays that
//! are not forwarding harvest nothing in the second slot.
//!
//! The block budget is split into `streams` independent chains. Stream `s` uses
//! `ChaCha8Rng::seed_from_u64(seed)` with `set_stream(s)`, starts from empty
//! batteries and discards its own `warmup` blocks. Counters are merged in stream
//! order, so results depend on the seed and stream count but never on how many
//! threads execute the streams.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{NetworkScenario, Relay};
use crate::battery::BatterySpec;
use crate::channel::RadioParams;
use crate::error::{invalid, Result};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BatteryMode {
    /// Harvest floored to levels: the exact Markov chain of the analysis.
    #[default]
    Discrete,
    /// Unquantized charging (the `L → ∞` reference).
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Counted blocks, summed over all streams.
    pub blocks: u64,
    pub seed: u64,
    pub battery_mode: BatteryMode,
    /// Blocks discarded at the start of every stream.
    pub warmup: u64,
    pub streams: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            blocks: 1_000_000,
            seed: 0,
            battery_mode: BatteryMode::Discrete,
            warmup: 10_000,
            streams: 16,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.blocks == 0 {
            return Err(invalid("blocks", "at least one block is required"));
        }
        if self.warmup >= self.blocks {
            return Err(invalid("warmup", format!("{} must be below blocks ({})", self.warmup, self.blocks)));
        }
        if self.streams == 0 || self.streams as u64 > self.blocks {
            return Err(invalid("streams", format!("must lie in [1, blocks], got {}", self.streams)));
        }
        Ok(())
    }

    fn stream_blocks(&self, s: usize) -> u64 {
        let n = self.streams as u64;
        self.blocks / n + u64::from((s as u64) < self.blocks % n)
    }
}

/// Residual energy of one battery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Energy {
    Levels(usize),
    Joules(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Harvesting,
    Forwarding,
}

/// Energy bookkeeping of a single block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockStep {
    pub mode: Mode,
    pub decoded: bool,
    /// Energy actually stored (after flooring and the capacity cap).
    pub credited: f64,
    pub spent: f64,
}

/// Per-relay constants, precomputed for the inner loop.
#[derive(Debug, Clone)]
struct RelayRuntime {
    chi_levels: usize,
    alpha_levels: usize,
    beta_levels: usize,
    chi: f64,
    alpha: f64,
    beta: f64,
    beamforming_gain: f64,
}

impl RelayRuntime {
    fn new(relay: &Relay, battery: &BatterySpec) -> Self {
        let p = &relay.policy;
        Self {
            chi_levels: p.chi_levels(),
            alpha_levels: battery.alpha_levels(),
            beta_levels: p.beta_levels(),
            chi: p.chi(battery),
            alpha: battery.alpha(),
            beta: p.beta(battery),
            beamforming_gain: (2.0 * p.beta(battery)).sqrt(),
        }
    }
}

/// Battery state of one relay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayState {
    pub energy: Energy,
}

impl RelayState {
    pub fn empty(mode: BatteryMode) -> Self {
        Self {
            energy: match mode {
                BatteryMode::Discrete => Energy::Levels(0),
                BatteryMode::Continuous => Energy::Joules(0.0),
            },
        }
    }

    /// Stored energy in joules.
    pub fn joules(&self, battery: &BatterySpec) -> f64 {
        match self.energy {
            Energy::Levels(i) => battery.epsilon(i),
            Energy::Joules(e) => e,
        }
    }

    /// Battery level, floored for continuous storage.
    pub fn level(&self, battery: &BatterySpec) -> usize {
        match self.energy {
            Energy::Levels(i) => i,
            Energy::Joules(e) => battery.discretize_harvest(e),
        }
    }

    /// Mode chosen at the start of a block: IF iff the stored energy reaches `χ`.
    fn mode(&self, rt: &RelayRuntime) -> Mode {
        let ready = match self.energy {
            Energy::Levels(i) => i >= rt.chi_levels,
            Energy::Joules(e) => e >= rt.chi,
        };
        if ready {
            Mode::Forwarding
        } else {
            Mode::Harvesting
        }
    }

    fn step(&mut self, rt: &RelayRuntime, h: f64, radio: &RadioParams, battery: &BatterySpec) -> BlockStep {
        let mode = self.mode(rt);
        let before = self.joules(battery);
        let mut decoded = false;
        match (mode, &mut self.energy) {
            (Mode::Harvesting, Energy::Levels(i)) => {
                let gained = battery.discretize_harvest(radio.harvested_energy(h));
                *i = (*i + gained).min(battery.levels());
            }
            (Mode::Harvesting, Energy::Joules(e)) => {
                *e = (*e + radio.harvested_energy(h)).min(battery.capacity());
            }
            (Mode::Forwarding, energy) => {
                decoded = h >= radio.decode_gain_threshold();
                match energy {
                    Energy::Levels(i) => {
                        *i -= if decoded { rt.alpha_levels + rt.beta_levels } else { rt.alpha_levels };
                    }
                    Energy::Joules(e) => {
                        *e -= if decoded { rt.alpha + rt.beta } else { rt.alpha };
                        // χ = α + β, so this only absorbs rounding
                        *e = e.max(0.0);
                    }
                }
            }
        }
        let after = self.joules(battery);
        let (credited, spent) = match mode {
            Mode::Harvesting => (after - before, 0.0),
            Mode::Forwarding => (0.0, before - after),
        };
        BlockStep {
            mode,
            decoded,
            credited,
            spent,
        }
    }
}

/// Per-relay statistics of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaySimStats {
    pub forwarding_blocks: u64,
    pub decoding_blocks: u64,
    /// Battery level at the start of each counted block.
    pub level_histogram: Vec<u64>,
    pub energy_harvested: f64,
    pub energy_consumed: f64,
    pub initial_energy: f64,
    pub final_energy: f64,
}

impl RelaySimStats {
    fn new(levels: usize) -> Self {
        Self {
            forwarding_blocks: 0,
            decoding_blocks: 0,
            level_histogram: vec![0; levels + 1],
            energy_harvested: 0.0,
            energy_consumed: 0.0,
            initial_energy: 0.0,
            final_energy: 0.0,
        }
    }

    fn merge(&mut self, other: &Self) {
        self.forwarding_blocks += other.forwarding_blocks;
        self.decoding_blocks += other.decoding_blocks;
        for (a, b) in self.level_histogram.iter_mut().zip(&other.level_histogram) {
            *a += b;
        }
        self.energy_harvested += other.energy_harvested;
        self.energy_consumed += other.energy_consumed;
        self.initial_energy += other.initial_energy;
        self.final_energy += other.final_energy;
    }
}

/// Aggregated outcome of [`simulate`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub blocks: u64,
    pub outages: u64,
    pub empty_sets: u64,
    pub relays: Vec<RelaySimStats>,
    /// Counted blocks per decoding set (bitmask, `0` is the empty set).
    pub subset_counts: BTreeMap<u32, u64>,
}

impl SimReport {
    pub fn outage_rate(&self) -> f64 {
        self.outages as f64 / self.blocks as f64
    }

    pub fn empty_set_rate(&self) -> f64 {
        self.empty_sets as f64 / self.blocks as f64
    }

    /// Binomial standard error of the outage rate.
    pub fn outage_std_error(&self) -> f64 {
        let p = self.outage_rate();
        (p * (1.0 - p) / self.blocks as f64).sqrt()
    }

    /// Half-width of the 95% normal-approximation interval.
    pub fn outage_ci_half_width(&self) -> f64 {
        Z_95 * self.outage_std_error()
    }

    pub fn forwarding_rate(&self, u: usize) -> f64 {
        self.relays[u].forwarding_blocks as f64 / self.blocks as f64
    }

    pub fn subset_frequency(&self, mask: u32) -> f64 {
        self.subset_counts.get(&mask).copied().unwrap_or(0) as f64 / self.blocks as f64
    }

    fn merge(&mut self, other: &Self) {
        self.blocks += other.blocks;
        self.outages += other.outages;
        self.empty_sets += other.empty_sets;
        for (a, b) in self.relays.iter_mut().zip(&other.relays) {
            a.merge(b);
        }
        for (&mask, &count) in &other.subset_counts {
            *self.subset_counts.entry(mask).or_insert(0) += count;
        }
    }
}

fn stream_rng(seed: u64, stream: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

fn run_stream(scenario: &NetworkScenario, runtime: &[RelayRuntime], cfg: &SimConfig, stream: usize) -> SimReport {
    let radio = scenario.radio();
    let battery = scenario.battery();
    let relays = scenario.relays();
    let v = radio.snr_threshold();
    let noise = radio.noise_power();
    let counted = cfg.stream_blocks(stream);
    let mut rng = stream_rng(cfg.seed, stream);
    let mut states = vec![RelayState::empty(cfg.battery_mode); relays.len()];
    let mut report = SimReport {
        blocks: counted,
        outages: 0,
        empty_sets: 0,
        relays: vec![RelaySimStats::new(battery.levels()); relays.len()],
        subset_counts: BTreeMap::new(),
    };
    let mut block_counts: BTreeMap<u32, u64> = BTreeMap::new();
    for block in 0..cfg.warmup + counted {
        let counting = block >= cfg.warmup;
        if block == cfg.warmup {
            for (stats, state) in report.relays.iter_mut().zip(&states) {
                stats.initial_energy = state.joules(battery);
            }
        }
        let mut mask = 0u32;
        for (u, relay) in relays.iter().enumerate() {
            let level = states[u].level(battery);
            let h = relay.source_link.sample_power(&mut rng);
            let step = states[u].step(&runtime[u], h, radio, battery);
            if step.decoded {
                mask |= 1 << u;
            }
            if counting {
                let stats = &mut report.relays[u];
                stats.level_histogram[level] += 1;
                stats.forwarding_blocks += u64::from(step.mode == Mode::Forwarding);
                stats.decoding_blocks += u64::from(step.decoded);
                stats.energy_harvested += step.credited;
                stats.energy_consumed += step.spent;
            }
        }
        let outage = if mask == 0 {
            true
        } else {
            let mut amplitude = 0.0;
            for (u, relay) in relays.iter().enumerate() {
                if mask >> u & 1 == 1 {
                    amplitude += runtime[u].beamforming_gain * relay.destination_link.sample_amplitude(&mut rng);
                }
            }
            amplitude * amplitude / noise < v
        };
        if counting {
            report.outages += u64::from(outage);
            report.empty_sets += u64::from(mask == 0);
            *block_counts.entry(mask).or_insert(0) += 1;
        }
    }
    for (stats, state) in report.relays.iter_mut().zip(&states) {
        stats.final_energy = state.joules(battery);
    }
    report.subset_counts = block_counts;
    report
}

/// Runs the protocol for `cfg.blocks` counted blocks.
pub fn simulate(scenario: &NetworkScenario, cfg: &SimConfig) -> Result<SimReport> {
    cfg.validate()?;
    let runtime: Vec<RelayRuntime> = scenario
        .relays()
        .iter()
        .map(|r| RelayRuntime::new(r, scenario.battery()))
        .collect();
    let parts: Vec<SimReport> = (0..cfg.streams)
        .into_par_iter()
        .map(|s| run_stream(scenario, &runtime, cfg, s))
        .collect();
    let mut parts = parts.into_iter();
    let mut total = parts.next().expect("at least one stream");
    for part in parts {
        total.merge(&part);
    }
    Ok(total)
}

/// Empirical battery-level occupancy of a single relay's chain (discrete storage).
pub fn simulate_chain_occupancy(
    relay: &Relay,
    radio: &RadioParams,
    battery: &BatterySpec,
    cfg: &SimConfig,
) -> Result<Vec<u64>> {
    let cfg = SimConfig {
        battery_mode: BatteryMode::Discrete,
        ..*cfg
    };
    cfg.validate()?;
    let rt = RelayRuntime::new(relay, battery);
    let parts: Vec<Vec<u64>> = (0..cfg.streams)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream_rng(cfg.seed, s);
            let mut state = RelayState::empty(BatteryMode::Discrete);
            let mut hist = vec![0u64; battery.levels() + 1];
            for block in 0..cfg.warmup + cfg.stream_blocks(s) {
                if block >= cfg.warmup {
                    hist[state.level(battery)] += 1;
                }
                let h = relay.source_link.sample_power(&mut rng);
                state.step(&rt, h, radio, battery);
            }
            hist
        })
        .collect();
    let mut total = vec![0u64; battery.levels() + 1];
    for part in parts {
        for (t, c) in total.iter_mut().zip(part) {
            *t += c;
        }
    }
    Ok(total)
}
