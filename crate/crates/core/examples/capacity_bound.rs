//! How far a finite battery is from the infinite-capacity bound, for growing C.

use etmrs::analysis::system_outage_iid;
use etmrs::battery::RelayChain;
use etmrs::bounds::upper_bound_outage_iid;
use etmrs::channel::dbm_to_watts;
use etmrs::{BatterySpec, NetworkScenario, RadioParams, RelayEnergyPolicy, ThresholdRounding, Topology};

fn main() -> etmrs::Result<()> {
    let n = 4;
    let topology = Topology::new(20.0, vec![5.0; n], 3.0)?;
    // fixed level size, so L grows with C
    let level_energy = 1e-7;
    for dbm in [35.0, 40.0] {
        let radio = RadioParams::new(dbm_to_watts(dbm), 1e-12, 1.0, 0.5)?;
        println!("{dbm} dBm, N = {n}, d_sr = 5 m");
        for k in 0..6 {
            let capacity = 5e-6 * 2f64.powi(k);
            let battery = BatterySpec::new(capacity, (capacity / level_energy).round() as usize, 1e-7)?;
            let policy = RelayEnergyPolicy::from_joules(&battery, 4e-6, ThresholdRounding::Exact)?;
            let scenario = NetworkScenario::from_topology(&topology, 2.0, radio, battery, &vec![policy; n])?;
            let relay = &scenario.relays()[0];
            let chain = RelayChain::solve(&relay.source_link, &radio, &battery, &relay.policy)?;
            let finite = system_outage_iid(n, relay, &radio, &battery, &chain.stationary)?.p_out;
            let bound = upper_bound_outage_iid(n, relay, &radio, &battery)?;
            println!(
                "  C = {capacity:.1e} (L = {:>4}): P_out {finite:.4e}, bound {:.4e}, ratio {:.4}, q = {:.4}",
                battery.levels(),
                bound.p_out_ub,
                bound.p_out_ub / finite,
                bound.q[0]
            );
        }
    }
    Ok(())
}
