//! One relay's battery as a Markov chain: transition matrix, stationary
//! distribution, and the EH/IF split at the threshold.

use etmrs::battery::{build_transition_matrix, mode_probabilities, stationary_distribution};
use etmrs::channel::{dbm_to_watts, path_loss_gain};
use etmrs::{BatterySpec, NakagamiLink, RadioParams, RelayEnergyPolicy, ThresholdRounding};

fn main() -> etmrs::Result<()> {
    let battery = BatterySpec::new(2e-5, 50, 1e-7)?;
    let policy = RelayEnergyPolicy::from_joules(&battery, 4e-6, ThresholdRounding::Exact)?;
    let link = NakagamiLink::new(2.0, path_loss_gain(5.0, 3.0))?;
    println!(
        "ε₁ = {:.1e} J, α → {} level(s), χ → level {}, β → {} level(s)",
        battery.level_energy(),
        battery.alpha_levels(),
        policy.chi_levels(),
        policy.beta_levels()
    );

    for dbm in [25.0, 30.0, 35.0] {
        let radio = RadioParams::new(dbm_to_watts(dbm), 1e-12, 1.0, 0.5)?;
        let z = build_transition_matrix(&link, &radio, &battery, &policy)?;
        let pi = stationary_distribution(&z)?;
        let modes = mode_probabilities(&pi, &policy);
        let mean: f64 = pi.as_slice().iter().enumerate().map(|(i, p)| i as f64 * p).sum();
        println!(
            "{dbm} dBm: p_EH {:.4} p_IF {:.4}, mean level {:.2}, π_L {:.3e}, residual {:.1e}",
            modes.harvesting,
            modes.forwarding,
            mean,
            pi.as_slice()[battery.levels()],
            pi.balance_residual(&z)
        );
    }
    Ok(())
}
