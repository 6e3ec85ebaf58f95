//! Runs a scenario file point by point and writes one CSV row per point.
//!
//! Rows are written and flushed in sweep order as soon as each point is done,
//! so an interrupted sweep leaves a valid prefix. Floats use 17 significant
//! digits. Monte Carlo seeds are derived from the base seed and the point
//! index, so a row never depends on which other points ran.

use std::io::Write;
use std::time::{Duration, Instant};

use crate::bounds::upper_bound_outage;
use crate::config::{ConfigError, OptimizeMethod, PolicyChoice, ScenarioFile, SweepPoint};
use crate::error::Error;
use crate::optimizer::{search_common, search_full, search_heuristic, search_iid};
use crate::simulator::{simulate, SimConfig};

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("sweep point {index}: {source}")]
    Model {
        index: usize,
        #[source]
        source: Error,
    },
    #[error("writing results: {0}")]
    Io(#[from] std::io::Error),
}

impl SweepError {
    /// 2 for configuration problems, 3 for numerical or feasibility failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            SweepError::Config(_) | SweepError::Io(_) => 2,
            SweepError::Model { .. } => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SweepOptions {
    /// Monte Carlo settings; `None` skips simulation.
    pub monte_carlo: Option<SimConfig>,
    /// Append a wall-time column. Off by default so reruns are byte-identical.
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloColumns {
    pub outage_rate: f64,
    pub ci95_half_width: f64,
    pub blocks: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub point: SweepPoint,
    /// Chosen threshold per relay, in joules.
    pub thresholds: Vec<f64>,
    pub p_out_analytic: f64,
    pub p_empty: f64,
    pub p_out_ub: f64,
    pub mc: Option<MonteCarloColumns>,
    pub wall_time: Duration,
}

const COLUMNS: &[&str] = &[
    "point",
    "power_w",
    "power_dbm",
    "kappa",
    "capacity",
    "levels",
    "alpha",
    "relays",
    "d_sr",
    "policy",
    "thresholds",
    "p_out_analytic",
    "p_empty",
    "p_out_ub",
    "p_out_mc",
    "mc_ci95",
    "mc_blocks",
];

pub fn header(timing: bool) -> String {
    let mut h = COLUMNS.join(",");
    if timing {
        h.push_str(",wall_time_s");
    }
    h
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

impl ResultRow {
    pub fn to_csv(&self, timing: bool) -> String {
        let p = &self.point;
        let thresholds: Vec<String> = self.thresholds.iter().map(|&c| num(c)).collect();
        let (mc, ci, blocks) = match &self.mc {
            Some(m) => (num(m.outage_rate), num(m.ci95_half_width), m.blocks.to_string()),
            None => (String::new(), String::new(), String::new()),
        };
        let mut fields = vec![
            p.index.to_string(),
            num(p.power),
            num(10.0 * (p.power * 1e3).log10()),
            num(p.kappa),
            num(p.capacity),
            p.levels.to_string(),
            num(p.alpha),
            p.relays.len().to_string(),
            p.relays.describe(),
            p.policy.label(),
            thresholds.join(";"),
            num(self.p_out_analytic),
            num(self.p_empty),
            num(self.p_out_ub),
            mc,
            ci,
            blocks,
        ];
        if timing {
            fields.push(format!("{:.6}", self.wall_time.as_secs_f64()));
        }
        fields.join(",")
    }
}

/// Seed for the simulation at one point.
pub fn point_seed(base: u64, index: usize) -> u64 {
    // SplitMix64 finalizer over the point index
    let mut z = base ^ (index as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Analysis, bound and optional simulation at one point.
pub fn evaluate(point: &SweepPoint, monte_carlo: Option<&SimConfig>) -> crate::Result<ResultRow> {
    let start = Instant::now();
    let mut scenario = point.scenario()?;
    if let PolicyChoice::Optimize(method) = point.policy {
        let found = match method {
            OptimizeMethod::Iid => {
                if !scenario.is_homogeneous() {
                    return Err(Error::InvalidParameter {
                        name: "policy.optimize",
                        reason: "optimize:iid needs identical relays; use optimize:common".into(),
                    });
                }
                search_iid(
                    scenario.relay_count(),
                    &scenario.relays()[0],
                    scenario.radio(),
                    scenario.battery(),
                )?
            }
            OptimizeMethod::Full => search_full(&scenario)?,
            OptimizeMethod::Heuristic => search_heuristic(&scenario)?,
            OptimizeMethod::Common => search_common(&scenario)?,
        };
        scenario = scenario.with_policies(&found.best_policies)?;
    }
    let report = scenario.outage()?;
    let bound = upper_bound_outage(&scenario)?;
    let mc = match monte_carlo {
        Some(cfg) => {
            let cfg = SimConfig {
                seed: point_seed(cfg.seed, point.index),
                ..*cfg
            };
            let sim = simulate(&scenario, &cfg)?;
            Some(MonteCarloColumns {
                outage_rate: sim.outage_rate(),
                ci95_half_width: sim.outage_ci_half_width(),
                blocks: sim.blocks,
            })
        }
        None => None,
    };
    let battery = scenario.battery();
    Ok(ResultRow {
        point: point.clone(),
        thresholds: scenario.relays().iter().map(|r| r.policy.chi(battery)).collect(),
        p_out_analytic: report.p_out,
        p_empty: report.p_empty,
        p_out_ub: bound.p_out_ub,
        mc,
        wall_time: start.elapsed(),
    })
}

/// Runs every point of `file`, writing the CSV to `out`. Returns the row count.
///
/// `on_row` sees each row after it has been written.
pub fn run_sweep<W: Write>(
    file: &ScenarioFile,
    options: &SweepOptions,
    out: &mut W,
    mut on_row: impl FnMut(&ResultRow),
) -> Result<usize, SweepError> {
    let points = file.points()?;
    writeln!(out, "{}", header(options.timing))?;
    out.flush()?;
    for point in &points {
        let row = evaluate(point, options.monte_carlo.as_ref()).map_err(|source| SweepError::Model {
            index: point.index,
            source,
        })?;
        writeln!(out, "{}", row.to_csv(options.timing))?;
        out.flush()?;
        on_row(&row);
    }
    Ok(points.len())
}
