//! Link statistics for the Fig. 3 line topology: path-loss gains, fading CDFs,
//! decode-failure probabilities, and a sampling sanity check.

use etmrs::channel::{decode_failure_prob, dbm_to_watts};
use etmrs::{NakagamiLink, RadioParams, RayleighLink, Topology};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> etmrs::Result<()> {
    let topology = Topology::new(20.0, vec![5.0, 5.5, 6.0, 6.5, 7.0], 3.0)?;
    let radio = RadioParams::new(dbm_to_watts(30.0), 1e-12, 1.0, 0.5)?;
    println!("v = {} (κ = {})", radio.snr_threshold(), radio.kappa());
    println!("{:>6} {:>12} {:>12} {:>12} {:>14}", "d_sr", "λ_SR", "λ_RD", "σ_RD", "Pr{φ=0} @30dBm");
    for (d, (sr, rd)) in topology.d_sr().iter().zip(topology.gains()) {
        let link = NakagamiLink::new(2.0, sr)?;
        let second = RayleighLink::new(rd)?;
        println!(
            "{d:>6} {sr:>12.4e} {rd:>12.4e} {:>12.4e} {:>14.4e}",
            second.sigma(),
            decode_failure_prob(&link, &radio)
        );
    }

    let link = NakagamiLink::new(2.0, 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 1_000_000;
    let mut below = 0;
    let mut sum = 0.0;
    for _ in 0..n {
        let h = link.sample_power(&mut rng);
        sum += h;
        below += (h <= 1.0) as usize;
    }
    println!(
        "m=2, λ=1: mean {:.4} (1), P(H≤1) {:.4} vs cdf {:.4}",
        sum / n as f64,
        below as f64 / n as f64,
        link.cdf(1.0)
    );
    Ok(())
}
