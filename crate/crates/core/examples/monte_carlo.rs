//! Block-level simulation against the analysis, in both battery modes.
//! The same seed gives the same numbers whatever the thread count.

use etmrs::channel::dbm_to_watts;
use etmrs::simulator::simulate;
use etmrs::{
    BatteryMode, BatterySpec, NetworkScenario, RadioParams, RelayEnergyPolicy, SimConfig, ThresholdRounding,
    Topology,
};

fn main() -> etmrs::Result<()> {
    let battery = BatterySpec::new(2e-5, 200, 1e-7)?;
    let topology = Topology::new(20.0, vec![5.0, 6.0, 6.0, 7.0], 3.0)?;
    let policies = [3e-6, 3e-6, 4e-6, 4e-6]
        .iter()
        .map(|&chi| RelayEnergyPolicy::from_joules(&battery, chi, ThresholdRounding::Exact))
        .collect::<etmrs::Result<Vec<_>>>()?;
    let radio = RadioParams::new(dbm_to_watts(36.0), 1e-12, 1.0, 0.5)?;
    let scenario = NetworkScenario::from_topology(&topology, 2.0, radio, battery, &policies)?;
    let report = scenario.outage()?;
    println!("analysis: P_out {:.5}, empty set {:.5}", report.p_out, report.p_empty);

    for mode in [BatteryMode::Discrete, BatteryMode::Continuous] {
        let cfg = SimConfig {
            blocks: 1_000_000,
            seed: 42,
            battery_mode: mode,
            ..Default::default()
        };
        let sim = simulate(&scenario, &cfg)?;
        println!(
            "{mode:?}: P_out {:.5} ± {:.5}, empty set {:.5}, IF rate of relay 1 {:.4}",
            sim.outage_rate(),
            sim.outage_ci_half_width(),
            sim.empty_set_rate(),
            sim.forwarding_rate(0)
        );
    }

    let cfg = SimConfig {
        blocks: 200_000,
        seed: 7,
        ..Default::default()
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let single = pool.install(|| simulate(&scenario, &cfg))?;
    let multi = simulate(&scenario, &cfg)?;
    println!("1 thread vs default pool identical: {}", single == multi);
    Ok(())
}
