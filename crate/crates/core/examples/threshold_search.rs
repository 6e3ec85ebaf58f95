//! Threshold selection: 1-D search for identical relays, then exhaustive,
//! heuristic and common-threshold searches for relays at different distances.

use std::time::Instant;

use etmrs::channel::dbm_to_watts;
use etmrs::optimizer::{search_common, search_full, search_heuristic, search_iid, ThresholdSearchResult};
use etmrs::{BatterySpec, NetworkScenario, RadioParams, RelayEnergyPolicy, Topology};

fn show(name: &str, r: &ThresholdSearchResult, battery: &BatterySpec, started: Instant) {
    let chis: Vec<String> = r.best_policies.iter().map(|p| format!("{:.1e}", p.chi(battery))).collect();
    println!(
        "  {name:<10} P_out {:.5e}  χ = [{}]  ({} evaluations, {:?})",
        r.best_outage,
        chis.join(", "),
        r.evaluations,
        started.elapsed()
    );
}

fn main() -> etmrs::Result<()> {
    let radio = RadioParams::new(dbm_to_watts(35.0), 1e-12, 1.0, 0.5)?;

    let battery = BatterySpec::new(2e-5, 200, 1e-7)?;
    let lowest = RelayEnergyPolicy::from_chi_levels(&battery, battery.threshold_range().0)?;
    for n in [2, 4, 8] {
        let topology = Topology::new(20.0, vec![5.0; n], 3.0)?;
        let scenario = NetworkScenario::from_topology(&topology, 2.0, radio, battery, &vec![lowest; n])?;
        let t = Instant::now();
        let r = search_iid(n, &scenario.relays()[0], &radio, &battery)?;
        show(&format!("iid N={n}"), &r, &battery, t);
    }

    let battery = BatterySpec::new(2e-5, 20, 1e-7)?;
    let lowest = RelayEnergyPolicy::from_chi_levels(&battery, battery.threshold_range().0)?;
    let topology = Topology::new(20.0, vec![2.0, 5.0, 8.0], 3.0)?;
    let scenario = NetworkScenario::from_topology(&topology, 2.0, radio, battery, &[lowest; 3])?;
    println!("d_sr = [2, 5, 8], L = 20");
    let t = Instant::now();
    show("full", &search_full(&scenario)?, &battery, t);
    let t = Instant::now();
    show("heuristic", &search_heuristic(&scenario)?, &battery, t);
    let t = Instant::now();
    show("common", &search_common(&scenario)?, &battery, t);
    Ok(())
}
