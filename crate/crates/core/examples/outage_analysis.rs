//! System outage of the Fig. 3 network and the decoding sets that dominate it.

use etmrs::analysis::SubsetLabel;
use etmrs::channel::dbm_to_watts;
use etmrs::{BatterySpec, NetworkScenario, RadioParams, RelayEnergyPolicy, ThresholdRounding, Topology};

fn main() -> etmrs::Result<()> {
    let battery = BatterySpec::new(2e-5, 200, 1e-7)?;
    let topology = Topology::new(20.0, vec![5.0, 5.5, 6.0, 6.0, 6.0, 6.0, 6.5, 7.0], 3.0)?;
    let policies = [3e-6, 3e-6, 3e-6, 3e-6, 3e-6, 3e-6, 4e-6, 4e-6]
        .iter()
        .map(|&chi| RelayEnergyPolicy::from_joules(&battery, chi, ThresholdRounding::Exact))
        .collect::<etmrs::Result<Vec<_>>>()?;

    for dbm in [26.0, 30.0, 34.0, 38.0] {
        let radio = RadioParams::new(dbm_to_watts(dbm), 1e-12, 1.0, 0.5)?;
        let scenario = NetworkScenario::from_topology(&topology, 2.0, radio, battery, &policies)?;
        let report = scenario.outage()?;
        println!("{dbm} dBm: P_out = {:.5e}, empty set {:.5e}", report.p_out, report.p_empty);

        let mut terms = report.terms.clone();
        terms.sort_by(|a, b| {
            (b.probability * b.conditional_outage).total_cmp(&(a.probability * a.conditional_outage))
        });
        for t in terms.iter().take(3) {
            if let SubsetLabel::Members(mask) = t.subset {
                let members: Vec<usize> = (0..8).filter(|u| mask >> u & 1 == 1).map(|u| u + 1).collect();
                println!(
                    "    relays {members:?}: Pr{{Φ}} {:.3e} × Pr{{O|Φ}} {:.3e}",
                    t.probability, t.conditional_outage
                );
            }
        }
    }
    Ok(())
}
