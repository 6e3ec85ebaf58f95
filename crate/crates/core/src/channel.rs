//! Fading statistics and deployment geometry.
//!
//! The source→relay hop is Nakagami-m: the power gain `H` is gamma distributed
//! with shape `m` and mean `λ`, so `F_H(x) = P(m, m x / λ)`. The relay→destination
//! hop is Rayleigh: the amplitude `|g|` has scale `σ = sqrt(λ / 2)`.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};

use crate::error::{invalid, Result};
use crate::special;

/// Smallest admissible Nakagami shape.
pub const MIN_NAKAGAMI_M: f64 = 0.5;

/// Source→relay link with Nakagami-m fading.
#[derive(Debug, Clone)]
pub struct NakagamiLink {
    m: f64,
    lambda: f64,
    rate: f64,
    sampler: Gamma<f64>,
}

impl NakagamiLink {
    pub fn new(m: f64, lambda: f64) -> Result<Self> {
        if !(m >= MIN_NAKAGAMI_M) || !m.is_finite() {
            return Err(invalid("m", format!("Nakagami shape must be ≥ 0.5, got {m}")));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(invalid("lambda_sr", format!("average gain must be > 0, got {lambda}")));
        }
        let sampler = Gamma::new(m, lambda / m)
            .map_err(|e| invalid("m", format!("gamma sampler rejected parameters: {e}")))?;
        Ok(Self {
            m,
            lambda,
            rate: m / lambda,
            sampler,
        })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// Average channel power gain `E[H]`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Gamma rate `b = m / λ`.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// `F_H(x) = γ(m, b x) / Γ(m)`.
    pub fn cdf(&self, x: f64) -> f64 {
        special::gamma_p(self.m, self.rate * x)
    }

    /// `1 - F_H(x)`, evaluated without cancellation.
    pub fn ccdf(&self, x: f64) -> f64 {
        special::gamma_q(self.m, self.rate * x)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x == 0.0 {
            return match self.m {
                m if m < 1.0 => f64::INFINITY,
                m if m == 1.0 => self.rate,
                _ => 0.0,
            };
        }
        let ln = self.m * self.rate.ln() + (self.m - 1.0) * x.ln() - self.rate * x
            - special::ln_gamma(self.m);
        ln.exp()
    }

    /// Draws one channel power gain `H`.
    pub fn sample_power<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler.sample(rng)
    }
}

impl PartialEq for NakagamiLink {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.lambda == other.lambda
    }
}

/// Relay→destination link with Rayleigh fading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayleighLink {
    lambda: f64,
}

impl RayleighLink {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(invalid("lambda_rd", format!("average gain must be > 0, got {lambda}")));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Squared amplitude scale `σ² = λ / 2`.
    pub fn sigma_sq(&self) -> f64 {
        self.lambda / 2.0
    }

    pub fn sigma(&self) -> f64 {
        self.sigma_sq().sqrt()
    }

    /// Draws one amplitude `|g|`; `|g|²` is exponential with mean `λ`.
    pub fn sample_amplitude<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let e: f64 = Exp1.sample(rng);
        (self.lambda * e).sqrt()
    }
}

/// Source power, noise, target rate and harvesting efficiency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    source_power: f64,
    noise_power: f64,
    kappa: f64,
    eta: f64,
}

impl RadioParams {
    /// `source_power` may be zero (a silent source); everything else must be positive.
    pub fn new(source_power: f64, noise_power: f64, kappa: f64, eta: f64) -> Result<Self> {
        if !(source_power >= 0.0) || !source_power.is_finite() {
            return Err(invalid("power", format!("must be ≥ 0 W, got {source_power}")));
        }
        if !(noise_power > 0.0) || !noise_power.is_finite() {
            return Err(invalid("noise_power", format!("must be > 0 W, got {noise_power}")));
        }
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(invalid("kappa", format!("rate must be > 0, got {kappa}")));
        }
        if !(eta > 0.0 && eta < 1.0) {
            return Err(invalid("eta", format!("efficiency must lie in (0, 1), got {eta}")));
        }
        Ok(Self {
            source_power,
            noise_power,
            kappa,
            eta,
        })
    }

    pub fn with_power(self, source_power: f64) -> Result<Self> {
        Self::new(source_power, self.noise_power, self.kappa, self.eta)
    }

    pub fn source_power(&self) -> f64 {
        self.source_power
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Outage SNR threshold `v = 2^{2κ} - 1` (two-slot half-duplex rate).
    pub fn snr_threshold(&self) -> f64 {
        (2.0 * self.kappa * std::f64::consts::LN_2).exp_m1()
    }

    /// Minimum first-hop power gain a relay needs to decode: `v N₀ / P`.
    pub fn decode_gain_threshold(&self) -> f64 {
        if self.source_power == 0.0 {
            return f64::INFINITY;
        }
        self.snr_threshold() * self.noise_power / self.source_power
    }

    /// Energy harvested in the first slot from power gain `h`: `½ η P h`.
    pub fn harvested_energy(&self, h: f64) -> f64 {
        0.5 * self.eta * self.source_power * h
    }
}

/// Converts dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Average power gain at distance `d`: `10⁻³ / (1 + d^ω)`.
pub fn path_loss_gain(d: f64, omega: f64) -> f64 {
    1e-3 / (1.0 + d.powf(omega))
}

/// Probability that a relay in IF mode fails to decode: `F_H(v N₀ / P)`.
pub fn decode_failure_prob(link: &NakagamiLink, radio: &RadioParams) -> f64 {
    link.cdf(radio.decode_gain_threshold())
}

/// Relays on the straight line between source and destination.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    d_sd: f64,
    d_sr: Vec<f64>,
    omega: f64,
}

impl Topology {
    pub fn new(d_sd: f64, d_sr: Vec<f64>, omega: f64) -> Result<Self> {
        if !(d_sd > 0.0) {
            return Err(invalid("d_sd", format!("must be > 0 m, got {d_sd}")));
        }
        if !(2.0..=5.0).contains(&omega) {
            return Err(invalid("omega", format!("path-loss exponent must lie in [2, 5], got {omega}")));
        }
        if d_sr.is_empty() {
            return Err(invalid("d_sr", "at least one relay is required"));
        }
        if let Some(d) = d_sr.iter().find(|&&d| !(d > 0.0 && d < d_sd)) {
            return Err(invalid("d_sr", format!("relay distance {d} must lie in (0, {d_sd})")));
        }
        Ok(Self { d_sd, d_sr, omega })
    }

    pub fn relay_count(&self) -> usize {
        self.d_sr.len()
    }

    pub fn d_sd(&self) -> f64 {
        self.d_sd
    }

    pub fn d_sr(&self) -> &[f64] {
        &self.d_sr
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `(λ_SR, λ_RD)` for every relay.
    pub fn gains(&self) -> Vec<(f64, f64)> {
        self.d_sr
            .iter()
            .map(|&d| {
                (
                    path_loss_gain(d, self.omega),
                    path_loss_gain(self.d_sd - d, self.omega),
                )
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cdf_examples() {
        let l = NakagamiLink::new(2.0, 1.0).unwrap();
        assert_eq!(l.cdf(0.0), 0.0);
        assert!((l.cdf(1.0) - (1.0 - 3.0 * (-2.0f64).exp())).abs() < 1e-14);
        let e = NakagamiLink::new(1.0, 2.0).unwrap();
        assert!((e.cdf(2.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-14);
    }

    #[test]
    fn cdf_derivative_matches_pdf() {
        for &(m, lambda) in &[(0.5, 1.0), (2.0, 1.0), (3.7, 0.2), (1.0, 5.0)] {
            let link = NakagamiLink::new(m, lambda).unwrap();
            for &x in &[0.05, 0.3, 1.0, 2.2] {
                let h = 1e-5 * x;
                let fd = (link.ccdf(x - h) - link.ccdf(x + h)) / (2.0 * h);
                let pdf = link.pdf(x);
                assert!((fd - pdf).abs() <= 1e-6 * pdf, "m={m} λ={lambda} x={x}");
            }
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(NakagamiLink::new(0.49, 1.0).is_err());
        assert!(NakagamiLink::new(0.5, 1.0).is_ok());
        assert!(NakagamiLink::new(2.0, 0.0).is_err());
        assert!(RayleighLink::new(-1.0).is_err());
        assert!(RadioParams::new(1.0, 1e-12, 1.0, 1.0).is_err());
        assert!(RadioParams::new(-1.0, 1e-12, 1.0, 0.5).is_err());
        assert!(Topology::new(20.0, vec![5.0, 20.0], 3.0).is_err());
        assert!(Topology::new(20.0, vec![5.0], 1.5).is_err());
    }

    #[test]
    fn rayleigh_scale() {
        let l = RayleighLink::new(3.0).unwrap();
        assert_eq!(l.sigma_sq(), 1.5);
    }

    #[test]
    fn snr_threshold_value() {
        let r = RadioParams::new(1.0, 1e-12, 1.0, 0.5).unwrap();
        assert!((r.snr_threshold() - 3.0).abs() < 1e-15);
        let r = RadioParams::new(1.0, 1e-12, 0.5, 0.5).unwrap();
        assert!((r.snr_threshold() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn path_loss_examples() {
        assert!((path_loss_gain(20.0, 3.0) - 1e-3 / 8001.0).abs() < 1e-22);
        assert!((path_loss_gain(5.0, 3.0) - 1e-3 / 126.0).abs() < 1e-20);
        assert!((path_loss_gain(1e-9, 3.0) - 1e-3).abs() < 1e-15);
        assert!(path_loss_gain(3.0, 3.0) > path_loss_gain(3.5, 3.0));
        assert!(path_loss_gain(3.0, 3.0) > path_loss_gain(3.0, 4.0));
    }

    #[test]
    fn decode_failure_limits() {
        let link = NakagamiLink::new(2.0, 7.94e-6).unwrap();
        let weak = RadioParams::new(1e-9, 1e-12, 1.0, 0.5).unwrap();
        let strong = RadioParams::new(1e9, 1e-12, 1.0, 0.5).unwrap();
        let tiny_rate = RadioParams::new(1.0, 1e-12, 1e-12, 0.5).unwrap();
        assert!(decode_failure_prob(&link, &strong) < 1e-20);
        assert!(decode_failure_prob(&link, &tiny_rate) < 1e-20);
        assert!(decode_failure_prob(&link, &weak) > decode_failure_prob(&link, &strong));
        let silent = RadioParams::new(0.0, 1e-12, 1.0, 0.5).unwrap();
        assert_eq!(decode_failure_prob(&link, &silent), 1.0);
    }

    #[test]
    fn samplers_are_deterministic() {
        let n = NakagamiLink::new(2.0, 1.0).unwrap();
        let r = RayleighLink::new(1.0).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..16)
                .map(|_| (n.sample_power(&mut rng), r.sample_amplitude(&mut rng)))
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(7), draw(7));
        assert_ne!(draw(7), draw(8));
    }

    #[test]
    fn minimum_shape_samples() {
        let n = NakagamiLink::new(0.5, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..100).map(|_| n.sample_power(&mut rng)).all(|h| h >= 0.0));
    }
}
