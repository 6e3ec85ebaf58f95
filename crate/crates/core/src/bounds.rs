//! Infinite-capacity performance bound.
//!
//! Without a capacity cap nothing overflows, so in steady state a relay's mean
//! harvested energy equals its mean spend. With `p` the EH probability, `Ē =
//! ½ηPλ_SR` the mean harvest per EH block and `q = (1 − p)(1 − Pr{φ=0})` the
//! probability of being in the decoding set, the balance
//! `p Ē = (1 − p) α + q β` gives `q` in closed form. The subset expansion is then
//! identical to the finite case with membership probabilities `q_u`.

use crate::analysis::{expand_outage, expand_outage_iid, NetworkScenario, OutageReport, Relay, RelayTerms};
use crate::battery::{BatterySpec, RelayEnergyPolicy};
use crate::channel::{decode_failure_prob, NakagamiLink, RadioParams};
use crate::error::Result;

/// Outcome of the flow-conservation analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowConservationResult {
    /// Decoding-set probability per relay.
    pub q: Vec<f64>,
    /// EH-mode probability per relay.
    pub p_eh: Vec<f64>,
    pub p_out_ub: f64,
    pub report: OutageReport,
}

/// Mean energy harvested in one EH block, `½ η P λ_SR`.
pub fn mean_harvest(link: &NakagamiLink, radio: &RadioParams) -> f64 {
    radio.harvested_energy(link.lambda())
}

/// `q_u` for an infinite battery. Zero when decoding never succeeds.
pub fn decoding_probability_infinite(
    link: &NakagamiLink,
    radio: &RadioParams,
    battery: &BatterySpec,
    policy: &RelayEnergyPolicy,
) -> f64 {
    let success = 1.0 - decode_failure_prob(link, radio);
    let harvest = 2.0 * mean_harvest(link, radio);
    if !(success > 0.0) || !(harvest > 0.0) {
        return 0.0;
    }
    let alpha = battery.alpha();
    let beta = policy.beta(battery);
    1.0 / (1.0 / success + (2.0 * alpha + 2.0 * beta * success) / (harvest * success))
}

/// EH probability implied by `q`: `p = 1 − q / (1 − Pr{φ=0})`.
pub fn harvesting_probability_infinite(q: f64, link: &NakagamiLink, radio: &RadioParams) -> f64 {
    let success = 1.0 - decode_failure_prob(link, radio);
    if success > 0.0 {
        1.0 - q / success
    } else {
        1.0
    }
}

fn bound_terms(relay: &Relay, radio: &RadioParams, battery: &BatterySpec) -> RelayTerms {
    let q = decoding_probability_infinite(&relay.source_link, radio, battery, &relay.policy);
    RelayTerms {
        member: q,
        non_member: 1.0 - q,
        weight: relay.policy.beta(battery) * relay.destination_link.sigma_sq(),
    }
}

/// Outage upper bound (lowest achievable outage) for a general network.
pub fn upper_bound_outage(scenario: &NetworkScenario) -> Result<FlowConservationResult> {
    let radio = scenario.radio();
    let battery = scenario.battery();
    let terms: Vec<RelayTerms> = scenario
        .relays()
        .iter()
        .map(|r| bound_terms(r, radio, battery))
        .collect();
    let report = expand_outage(&terms, radio, true)?;
    let q: Vec<f64> = terms.iter().map(|t| t.member).collect();
    let p_eh = scenario
        .relays()
        .iter()
        .zip(&q)
        .map(|(r, &q)| harvesting_probability_infinite(q, &r.source_link, radio))
        .collect();
    Ok(FlowConservationResult {
        q,
        p_eh,
        p_out_ub: report.p_out,
        report,
    })
}

/// Binomial form of the bound for `n` identical relays.
pub fn upper_bound_outage_iid(
    n: usize,
    relay: &Relay,
    radio: &RadioParams,
    battery: &BatterySpec,
) -> Result<FlowConservationResult> {
    let terms = bound_terms(relay, radio, battery);
    let report = expand_outage_iid(n, terms, radio)?;
    let p_eh = harvesting_probability_infinite(terms.member, &relay.source_link, radio);
    Ok(FlowConservationResult {
        q: vec![terms.member; n],
        p_eh: vec![p_eh; n],
        p_out_ub: report.p_out,
        report,
    })
}
