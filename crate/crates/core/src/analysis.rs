//! Analytical system outage probability.
//!
//! The outage probability is expanded over every possible decoding set `Φ`:
//! the empty set always causes outage, and a non-empty set of `k` relays fails
//! when the beamformed SNR `(Σ √(2β_u) |g_u|)² / N₀` falls below `v`. That SNR is
//! approximated by a gamma law with integer shape `k` and rate
//! `a = N₀ / (4 Σ β_u σ_u²)`, whose CDF is the Erlang form
//! `1 − e^{−av} Σ_{i<k} (av)^i / i!`.
//!
//! Relays act on purely local state, so a relay's membership probability
//! factorizes: it is in `Φ` with probability `(1 − Pr{φ=0}) p_IF` and outside
//! with `Pr{φ=0} p_IF + p_EH`.

use rayon::prelude::*;

use crate::battery::{
    mode_probabilities, BatterySpec, RelayChain, RelayEnergyPolicy, StationaryDistribution,
};
use crate::channel::{decode_failure_prob, NakagamiLink, RadioParams, RayleighLink, Topology};
use crate::error::{invalid, Error, Result};

/// Largest relay count for which decoding sets are enumerated exactly.
pub const MAX_ENUMERATED_RELAYS: usize = 20;

/// One relay: its two links and its energy policy.
#[derive(Debug, Clone, PartialEq)]
pub struct Relay {
    pub source_link: NakagamiLink,
    pub destination_link: RayleighLink,
    pub policy: RelayEnergyPolicy,
}

/// A complete network: relays, radio parameters and the shared battery.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkScenario {
    relays: Vec<Relay>,
    radio: RadioParams,
    battery: BatterySpec,
}

impl NetworkScenario {
    pub fn new(relays: Vec<Relay>, radio: RadioParams, battery: BatterySpec) -> Result<Self> {
        if relays.is_empty() {
            return Err(invalid("relays", "at least one relay is required"));
        }
        if relays.len() > MAX_ENUMERATED_RELAYS {
            return Err(Error::TooManyRelays {
                relays: relays.len(),
                max: MAX_ENUMERATED_RELAYS,
            });
        }
        for r in &relays {
            RelayEnergyPolicy::from_chi_levels(&battery, r.policy.chi_levels())?;
            if r.policy.chi_levels() - r.policy.beta_levels() != battery.alpha_levels() {
                return Err(invalid("policy", "threshold was built for a different battery"));
            }
        }
        Ok(Self {
            relays,
            radio,
            battery,
        })
    }

    /// Linear topology with path-loss gains and a common Nakagami shape.
    pub fn from_topology(
        topology: &Topology,
        m: f64,
        radio: RadioParams,
        battery: BatterySpec,
        policies: &[RelayEnergyPolicy],
    ) -> Result<Self> {
        if policies.len() != topology.relay_count() {
            return Err(invalid(
                "policy",
                format!("{} thresholds for {} relays", policies.len(), topology.relay_count()),
            ));
        }
        let relays = topology
            .gains()
            .into_iter()
            .zip(policies)
            .map(|((sr, rd), &policy)| {
                Ok(Relay {
                    source_link: NakagamiLink::new(m, sr)?,
                    destination_link: RayleighLink::new(rd)?,
                    policy,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(relays, radio, battery)
    }

    pub fn relays(&self) -> &[Relay] {
        &self.relays
    }

    pub fn relay_count(&self) -> usize {
        self.relays.len()
    }

    pub fn radio(&self) -> &RadioParams {
        &self.radio
    }

    pub fn battery(&self) -> &BatterySpec {
        &self.battery
    }

    pub fn policies(&self) -> Vec<RelayEnergyPolicy> {
        self.relays.iter().map(|r| r.policy).collect()
    }

    pub fn with_policies(&self, policies: &[RelayEnergyPolicy]) -> Result<Self> {
        if policies.len() != self.relays.len() {
            return Err(invalid("policy", "one threshold per relay is required"));
        }
        let relays = self
            .relays
            .iter()
            .zip(policies)
            .map(|(r, &policy)| Relay { policy, ..r.clone() })
            .collect();
        Self::new(relays, self.radio, self.battery)
    }

    pub fn with_radio(&self, radio: RadioParams) -> Self {
        Self { radio, ..self.clone() }
    }

    /// True when every relay has identical links and threshold.
    pub fn is_homogeneous(&self) -> bool {
        self.relays.windows(2).all(|w| w[0] == w[1])
    }

    /// Builds and solves every relay's battery chain (in parallel). Relays with
    /// the same first-hop link and threshold share one solve.
    pub fn relay_chains(&self) -> Result<Vec<RelayChain>> {
        let mut distinct: Vec<&Relay> = Vec::new();
        let index: Vec<usize> = self
            .relays
            .iter()
            .map(|r| {
                let same = |d: &&Relay| d.source_link == r.source_link && d.policy == r.policy;
                distinct.iter().position(same).unwrap_or_else(|| {
                    distinct.push(r);
                    distinct.len() - 1
                })
            })
            .collect();
        let solved = distinct
            .par_iter()
            .map(|r| RelayChain::solve(&r.source_link, &self.radio, &self.battery, &r.policy))
            .collect::<Result<Vec<_>>>()?;
        Ok(index.into_iter().map(|i| solved[i].clone()).collect())
    }

    pub fn stationary_distributions(&self) -> Result<Vec<StationaryDistribution>> {
        Ok(self.relay_chains()?.into_iter().map(|c| c.stationary).collect())
    }

    /// Solves the chains and expands the outage probability.
    pub fn outage(&self) -> Result<OutageReport> {
        system_outage(self, &self.stationary_distributions()?)
    }
}

/// Per-relay ingredients of the subset expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayTerms {
    /// Probability the relay is in the decoding set.
    pub member: f64,
    /// Probability it is not.
    pub non_member: f64,
    /// `β_u σ_u²`, the relay's contribution to the SNR scale.
    pub weight: f64,
}

impl RelayTerms {
    pub fn from_modes(
        relay: &Relay,
        battery: &BatterySpec,
        decode_failure: f64,
        forwarding: f64,
        harvesting: f64,
    ) -> Self {
        Self {
            member: (1.0 - decode_failure) * forwarding,
            non_member: decode_failure * forwarding + harvesting,
            weight: relay.policy.beta(battery) * relay.destination_link.sigma_sq(),
        }
    }

    fn for_relay(scenario: &NetworkScenario, u: usize, pi: &StationaryDistribution) -> Self {
        let relay = &scenario.relays[u];
        let modes = mode_probabilities(pi, &relay.policy);
        let fail = decode_failure_prob(&relay.source_link, &scenario.radio);
        Self::from_modes(relay, &scenario.battery, fail, modes.forwarding, modes.harvesting)
    }
}

/// A non-empty decoding set given as a bitmask over relay indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodingSubset {
    mask: u32,
    size: usize,
    rate: f64,
}

impl DecodingSubset {
    pub fn new(scenario: &NetworkScenario, mask: u32) -> Result<Self> {
        let n = scenario.relay_count();
        if mask == 0 || (n < 32 && mask >> n != 0) {
            return Err(invalid("subset", format!("mask {mask:#b} is not a non-empty subset of {n} relays")));
        }
        let weight: f64 = members(mask)
            .map(|u| {
                let r = &scenario.relays[u];
                r.policy.beta(&scenario.battery) * r.destination_link.sigma_sq()
            })
            .sum();
        Ok(Self::from_weight(mask, mask.count_ones() as usize, weight, scenario.radio.noise_power()))
    }

    fn from_weight(mask: u32, size: usize, weight: f64, noise: f64) -> Self {
        Self {
            mask,
            size,
            rate: noise / (4.0 * weight),
        }
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Gamma rate `a = N₀ / (4 Σ β_u σ_u²)`.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn contains(&self, u: usize) -> bool {
        self.mask >> u & 1 == 1
    }
}

fn members(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |u| mask >> u & 1 == 1)
}

/// Which decoding sets a [`SubsetTerm`] covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetLabel {
    /// One specific set of relays.
    Members(u32),
    /// All sets of this size, aggregated (identical relays).
    Size(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsetTerm {
    pub subset: SubsetLabel,
    /// `Pr{Φ}` (summed over the covered sets).
    pub probability: f64,
    /// `Pr{O | Φ}`.
    pub conditional_outage: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutageMethod {
    General,
    Iid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutageReport {
    pub p_out: f64,
    pub p_empty: f64,
    pub terms: Vec<SubsetTerm>,
    pub method: OutageMethod,
}

impl OutageReport {
    /// `Pr{∅} + Σ Pr{Φ}`; equals one up to rounding.
    pub fn total_probability(&self) -> f64 {
        let mut acc = CompensatedSum::new(self.p_empty);
        self.terms.iter().for_each(|t| acc.add(t.probability));
        acc.value()
    }
}

/// Neumaier summation; the result depends only on the order terms are added.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn new(start: f64) -> Self {
        Self { sum: start, carry: 0.0 }
    }

    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// CDF of the gamma law with integer shape `k` and unit rate at `x`:
/// `1 − e^{−x} Σ_{i<k} x^i / i!`.
///
/// For `x < k` the complement is close to one, so the value is taken from the
/// equivalent tail series `e^{−x} Σ_{i≥k} x^i / i!` instead.
pub fn erlang_cdf(k: usize, x: f64) -> f64 {
    assert!(k >= 1, "decoding set must be non-empty");
    if !(x > 0.0) {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    if x < k as f64 {
        // first tail term x^k e^{-x} / k!, then ratios x / (k + n)
        let mut ln_term = k as f64 * x.ln() - x;
        for i in 1..=k {
            ln_term -= (i as f64).ln();
        }
        let mut term = ln_term.exp();
        let mut sum = term;
        let mut n = k as f64;
        while term > sum * 1e-17 {
            n += 1.0;
            term *= x / n;
            sum += term;
        }
        sum.min(1.0)
    } else {
        let mut term = (-x).exp();
        let mut upper = term;
        for i in 1..k {
            term *= x / i as f64;
            upper += term;
        }
        (1.0 - upper).max(0.0)
    }
}

/// `Pr{O | Φ}` under the gamma approximation.
pub fn conditional_outage(subset: &DecodingSubset, radio: &RadioParams) -> f64 {
    erlang_cdf(subset.size, subset.rate * radio.snr_threshold())
}

/// `Pr{∅} = Π_u (Pr{φ_u=0} p_IF,u + p_EH,u)`.
pub fn empty_set_probability(scenario: &NetworkScenario, stationaries: &[StationaryDistribution]) -> f64 {
    (0..scenario.relay_count())
        .map(|u| RelayTerms::for_relay(scenario, u, &stationaries[u]).non_member)
        .product()
}

/// `Pr{Φ}` for one non-empty decoding set.
pub fn subset_probability(
    scenario: &NetworkScenario,
    stationaries: &[StationaryDistribution],
    subset: &DecodingSubset,
) -> f64 {
    (0..scenario.relay_count())
        .map(|u| {
            let t = RelayTerms::for_relay(scenario, u, &stationaries[u]);
            if subset.contains(u) {
                t.member
            } else {
                t.non_member
            }
        })
        .product()
}

/// Exact expansion over all `2^N` decoding sets.
///
/// `record` controls whether the per-subset breakdown is kept; the returned
/// `p_out` is bit-identical either way.
pub fn expand_outage(terms: &[RelayTerms], radio: &RadioParams, record: bool) -> Result<OutageReport> {
    let n = terms.len();
    if n > MAX_ENUMERATED_RELAYS {
        return Err(Error::TooManyRelays {
            relays: n,
            max: MAX_ENUMERATED_RELAYS,
        });
    }
    let v = radio.snr_threshold();
    let noise = radio.noise_power();
    let p_empty: f64 = terms.iter().map(|t| t.non_member).product();
    let mut p_out = CompensatedSum::new(p_empty);
    let mut recorded = Vec::with_capacity(if record { (1usize << n) - 1 } else { 0 });
    for mask in 1u32..(1u32 << n) {
        let mut probability = 1.0;
        let mut weight = 0.0;
        for (u, t) in terms.iter().enumerate() {
            if mask >> u & 1 == 1 {
                probability *= t.member;
                weight += t.weight;
            } else {
                probability *= t.non_member;
            }
        }
        let subset = DecodingSubset::from_weight(mask, mask.count_ones() as usize, weight, noise);
        let conditional = erlang_cdf(subset.size, subset.rate * v);
        p_out.add(probability * conditional);
        if record {
            recorded.push(SubsetTerm {
                subset: SubsetLabel::Members(mask),
                probability,
                conditional_outage: conditional,
            });
        }
    }
    Ok(OutageReport {
        p_out: p_out.value(),
        p_empty,
        terms: recorded,
        method: OutageMethod::General,
    })
}

/// Outage probability of an i.n.i.d. network from solved stationary distributions.
pub fn system_outage(scenario: &NetworkScenario, stationaries: &[StationaryDistribution]) -> Result<OutageReport> {
    if stationaries.len() != scenario.relay_count() {
        return Err(invalid("stationaries", "one distribution per relay is required"));
    }
    let terms: Vec<RelayTerms> = (0..scenario.relay_count())
        .map(|u| RelayTerms::for_relay(scenario, u, &stationaries[u]))
        .collect();
    expand_outage(&terms, &scenario.radio, true)
}

/// Binomial coefficients `C(n, 0..=n)` as floats.
pub(crate) fn binomial_row(n: usize) -> Vec<f64> {
    let mut row = vec![1.0; n + 1];
    for k in 1..=n {
        row[k] = row[k - 1] * (n - k + 1) as f64 / k as f64;
    }
    row
}

/// Collapsed expansion for `n` identical relays: `N + 1` terms instead of `2^N`.
pub fn expand_outage_iid(n: usize, terms: RelayTerms, radio: &RadioParams) -> Result<OutageReport> {
    if n == 0 {
        return Err(invalid("relays", "at least one relay is required"));
    }
    let v = radio.snr_threshold();
    let noise = radio.noise_power();
    let p_empty = terms.non_member.powi(n as i32);
    let binom = binomial_row(n);
    let mut p_out = CompensatedSum::new(p_empty);
    let mut recorded = Vec::with_capacity(n);
    for k in 1..=n {
        let probability = binom[k] * terms.member.powi(k as i32) * terms.non_member.powi((n - k) as i32);
        let rate = noise / (4.0 * k as f64 * terms.weight);
        let conditional = erlang_cdf(k, rate * v);
        p_out.add(probability * conditional);
        recorded.push(SubsetTerm {
            subset: SubsetLabel::Size(k),
            probability,
            conditional_outage: conditional,
        });
    }
    Ok(OutageReport {
        p_out: p_out.value(),
        p_empty,
        terms: recorded,
        method: OutageMethod::Iid,
    })
}

/// Outage probability for `n` relays sharing `relay`'s links and threshold.
pub fn system_outage_iid(
    n: usize,
    relay: &Relay,
    radio: &RadioParams,
    battery: &BatterySpec,
    pi: &StationaryDistribution,
) -> Result<OutageReport> {
    let modes = mode_probabilities(pi, &relay.policy);
    let fail = decode_failure_prob(&relay.source_link, radio);
    let terms = RelayTerms::from_modes(relay, battery, fail, modes.forwarding, modes.harvesting);
    expand_outage_iid(n, terms, radio)
}
