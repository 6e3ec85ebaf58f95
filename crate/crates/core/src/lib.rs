//! Outage analysis of wireless-powered cooperative relay networks under
//! energy-threshold multi-relay selection.
//!
//! Each decode-and-forward relay runs on energy harvested from the source and
//! switches to information forwarding once its battery reaches a private
//! threshold `χ_u = α + β_u`. The crate covers the whole pipeline:
//!
//! - [`channel`]: Nakagami-m / Rayleigh statistics, samplers and path loss.
//! - [`battery`]: the per-relay battery Markov chain and its stationary law.
//! - [`analysis`]: the exact decoding-set expansion of the outage probability.
//! - [`bounds`]: the infinite-battery bound from flow conservation.
//! - [`optimizer`]: exhaustive and heuristic threshold selection.
//! - [`simulator`]: a block-level Monte Carlo oracle.
//! - [`config`] and [`sweep`]: scenario files, validation and CSV sweeps.
//!
//! ```
//! use etmrs::{BatterySpec, NetworkScenario, RadioParams, RelayEnergyPolicy, Topology};
//!
//! let radio = RadioParams::new(1.0, 1e-12, 1.0, 0.5)?;
//! let battery = BatterySpec::new(2e-5, 200, 1e-7)?;
//! let topology = Topology::new(20.0, vec![5.0, 6.0, 7.0], 3.0)?;
//! let chi = RelayEnergyPolicy::from_chi_levels(&battery, 30)?;
//! let scenario = NetworkScenario::from_topology(&topology, 2.0, radio, battery, &[chi; 3])?;
//! let report = scenario.outage()?;
//! assert!(report.p_out >= report.p_empty);
//! # Ok::<(), etmrs::Error>(())
//! ```

pub mod analysis;
pub mod battery;
pub mod bounds;
pub mod channel;
pub mod config;
mod error;
pub mod optimizer;
pub mod simulator;
pub mod special;
pub mod sweep;

pub use analysis::{NetworkScenario, OutageReport, Relay};
pub use battery::{BatterySpec, RelayEnergyPolicy, ThresholdRounding};
pub use channel::{NakagamiLink, RadioParams, RayleighLink, Topology};
pub use error::{Error, Result};
pub use simulator::{BatteryMode, SimConfig, SimReport};
