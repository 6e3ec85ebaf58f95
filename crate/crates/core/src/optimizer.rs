//! Energy-threshold selection.
//!
//! A relay's battery chain depends only on its own link and threshold, so the
//! per-relay terms of the outage expansion are memoized per `(relay, χ)` pair.
//! The full lattice search then costs `N (L − α/ε₁)` chain solves plus one cheap
//! subset expansion per lattice point.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::analysis::{expand_outage, expand_outage_iid, NetworkScenario, Relay, RelayTerms};
use crate::battery::{BatterySpec, RelayChain, RelayEnergyPolicy};
use crate::channel::RadioParams;
use crate::error::{Error, Result};

/// Lattice points the full search may visit.
pub const FULL_SEARCH_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMethod {
    IidExhaustive,
    FullExhaustive,
    HeuristicZ,
    CommonThreshold,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSearchResult {
    pub best_policies: Vec<RelayEnergyPolicy>,
    pub best_outage: f64,
    pub evaluations: usize,
    pub method: SearchMethod,
}

fn relay_terms(relay: &Relay, radio: &RadioParams, battery: &BatterySpec, chi: usize) -> Result<RelayTerms> {
    let policy = RelayEnergyPolicy::from_chi_levels(battery, chi)?;
    let relay = Relay { policy, ..relay.clone() };
    let chain = RelayChain::solve(&relay.source_link, radio, battery, &relay.policy)?;
    Ok(RelayTerms::from_modes(
        &relay,
        battery,
        chain.decode_failure,
        chain.modes.forwarding,
        chain.modes.harvesting,
    ))
}

/// Memo of relay terms keyed by `(relay index, χ level)`.
struct TermCache<'a> {
    scenario: &'a NetworkScenario,
    terms: HashMap<(usize, usize), RelayTerms>,
}

impl<'a> TermCache<'a> {
    fn new(scenario: &'a NetworkScenario) -> Self {
        Self {
            scenario,
            terms: HashMap::new(),
        }
    }

    /// Solves every listed pair not yet cached, in parallel.
    fn fill(&mut self, keys: &[(usize, usize)]) -> Result<()> {
        let missing: Vec<(usize, usize)> = keys
            .iter()
            .copied()
            .filter(|k| !self.terms.contains_key(k))
            .collect();
        let scenario = self.scenario;
        let solved = missing
            .par_iter()
            .map(|&(u, chi)| {
                relay_terms(&scenario.relays()[u], scenario.radio(), scenario.battery(), chi).map(|t| ((u, chi), t))
            })
            .collect::<Result<Vec<_>>>()?;
        self.terms.extend(solved);
        Ok(())
    }

    fn get(&self, u: usize, chi: usize) -> RelayTerms {
        self.terms[&(u, chi)]
    }
}

/// One-dimensional search over a common threshold for `n` identical relays.
///
/// `relay` supplies the links; its own policy is ignored.
pub fn search_iid(
    n: usize,
    relay: &Relay,
    radio: &RadioParams,
    battery: &BatterySpec,
) -> Result<ThresholdSearchResult> {
    let (min, max) = battery.threshold_range();
    let outages = (min..=max)
        .into_par_iter()
        .map(|chi| {
            let terms = relay_terms(relay, radio, battery, chi)?;
            Ok((chi, expand_outage_iid(n, terms, radio)?.p_out))
        })
        .collect::<Result<Vec<_>>>()?;
    let (best_chi, best_outage) = argmin(outages.iter().copied());
    Ok(ThresholdSearchResult {
        best_policies: vec![RelayEnergyPolicy::from_chi_levels(battery, best_chi)?; n],
        best_outage,
        evaluations: outages.len(),
        method: SearchMethod::IidExhaustive,
    })
}

/// First minimum in iteration order (strict improvement only).
fn argmin<T: Copy>(mut items: impl Iterator<Item = (T, f64)>) -> (T, f64) {
    let first = items.next().expect("search space is never empty");
    items.fold(first, |best, cand| if cand.1 < best.1 { cand } else { best })
}

/// Exhaustive search over all threshold vectors.
///
/// Ties go to the lexicographically smallest threshold vector.
pub fn search_full(scenario: &NetworkScenario) -> Result<ThresholdSearchResult> {
    let battery = scenario.battery();
    let (min, max) = battery.threshold_range();
    let width = (max - min + 1) as u128;
    let n = scenario.relay_count();
    let evaluations = width.checked_pow(n as u32).unwrap_or(u128::MAX);
    if evaluations > FULL_SEARCH_LIMIT {
        return Err(Error::SearchSpaceTooLarge {
            evaluations,
            limit: FULL_SEARCH_LIMIT,
        });
    }
    let mut cache = TermCache::new(scenario);
    let keys: Vec<_> = (0..n).flat_map(|u| (min..=max).map(move |c| (u, c))).collect();
    cache.fill(&keys)?;

    let width = width as u64;
    let decode = |mut index: u64| -> Vec<usize> {
        // first relay is the most significant digit → lexicographic order
        let mut chis = vec![0; n];
        for slot in chis.iter_mut().rev() {
            *slot = min + (index % width) as usize;
            index /= width;
        }
        chis
    };
    let radio = scenario.radio();
    let cache = &cache;
    let (best_index, best_outage) = (0..evaluations as u64)
        .into_par_iter()
        .map(|index| {
            let terms: Vec<RelayTerms> = decode(index)
                .iter()
                .enumerate()
                .map(|(u, &chi)| cache.get(u, chi))
                .collect();
            let p = expand_outage(&terms, radio, false).map(|r| r.p_out).unwrap_or(f64::INFINITY);
            (index, p)
        })
        .reduce(
            || (u64::MAX, f64::INFINITY),
            |a, b| {
                if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) {
                    b
                } else {
                    a
                }
            },
        );
    let best_policies = decode(best_index)
        .into_iter()
        .map(|chi| RelayEnergyPolicy::from_chi_levels(battery, chi))
        .collect::<Result<Vec<_>>>()?;
    Ok(ThresholdSearchResult {
        best_policies,
        best_outage,
        evaluations: evaluations as usize,
        method: SearchMethod::FullExhaustive,
    })
}

/// The one-dimensional `z` grid of the heuristic search.
///
/// Forwarding energies are set proportional to `λ_SR / λ_RD`: `β̃_u = z λ_SR,u / λ_RD,u`,
/// ceiled to a level and capped at `C − α`. The grid runs from `ε₁ / λ_max` to
/// `ε_L / λ_min` in steps of `ε₁ / λ_max`, where `λ_max`, `λ_min` are the extreme ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicGrid {
    ratios: Vec<f64>,
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub step: f64,
    pub points: usize,
    level_energy: f64,
    max_beta_levels: usize,
}

impl HeuristicGrid {
    pub fn new(scenario: &NetworkScenario) -> Self {
        let ratios: Vec<f64> = scenario
            .relays()
            .iter()
            .map(|r| r.source_link.lambda() / r.destination_link.lambda())
            .collect();
        let lambda_max = ratios.iter().copied().fold(f64::MIN, f64::max);
        let lambda_min = ratios.iter().copied().fold(f64::MAX, f64::min);
        let battery = scenario.battery();
        let levels = battery.levels();
        let span = levels as f64 * lambda_max / lambda_min;
        let points = (span - 1e-9 * span).ceil().max(1.0) as usize;
        Self {
            ratios,
            lambda_max,
            lambda_min,
            step: battery.level_energy() / lambda_max,
            points,
            level_energy: battery.level_energy(),
            max_beta_levels: levels - battery.alpha_levels(),
        }
    }

    /// `z` at grid point `k` (1-based).
    pub fn z(&self, k: usize) -> f64 {
        k as f64 * self.step
    }

    /// Forwarding energy levels `min(⌈z λ_SR / (λ_RD ε₁)⌉, L − α/ε₁)` for an arbitrary `z`.
    pub fn beta_levels_for(&self, z: f64) -> Vec<usize> {
        self.ratios
            .iter()
            .map(|&r| ceil_levels(z * r / self.level_energy).clamp(1, self.max_beta_levels))
            .collect()
    }

    /// Same as [`Self::beta_levels_for`] at grid point `k`, computed in ratio form
    /// so that on-grid points land exactly on levels.
    pub fn beta_levels_at(&self, k: usize) -> Vec<usize> {
        self.ratios
            .iter()
            .map(|&r| ceil_levels(k as f64 * (r / self.lambda_max)).clamp(1, self.max_beta_levels))
            .collect()
    }
}

fn ceil_levels(x: f64) -> usize {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r as usize
    } else {
        x.ceil() as usize
    }
}

/// One shared threshold for every relay, evaluated on the general expansion.
///
/// This is the common-threshold baseline for non-identical relays; on a
/// homogeneous scenario it visits the same points as [`search_iid`].
pub fn search_common(scenario: &NetworkScenario) -> Result<ThresholdSearchResult> {
    let battery = scenario.battery();
    let (min, max) = battery.threshold_range();
    let n = scenario.relay_count();
    let mut cache = TermCache::new(scenario);
    let keys: Vec<_> = (min..=max).flat_map(|chi| (0..n).map(move |u| (u, chi))).collect();
    cache.fill(&keys)?;
    let radio = scenario.radio();
    let outages = (min..=max)
        .map(|chi| {
            let terms: Vec<RelayTerms> = (0..n).map(|u| cache.get(u, chi)).collect();
            expand_outage(&terms, radio, false).map(|r| (chi, r.p_out))
        })
        .collect::<Result<Vec<_>>>()?;
    let (best_chi, best_outage) = argmin(outages.iter().copied());
    Ok(ThresholdSearchResult {
        best_policies: vec![RelayEnergyPolicy::from_chi_levels(battery, best_chi)?; n],
        best_outage,
        evaluations: outages.len(),
        method: SearchMethod::CommonThreshold,
    })
}

/// Heuristic search over the scalar `z`.
pub fn search_heuristic(scenario: &NetworkScenario) -> Result<ThresholdSearchResult> {
    let grid = HeuristicGrid::new(scenario);
    let battery = scenario.battery();
    let n = scenario.relay_count();

    let mut candidates: Vec<Vec<usize>> = Vec::new();
    for k in 1..=grid.points {
        let chis: Vec<usize> = grid
            .beta_levels_at(k)
            .into_iter()
            .map(|b| b + battery.alpha_levels())
            .collect();
        if candidates.last() != Some(&chis) {
            candidates.push(chis);
        }
    }
    let mut cache = TermCache::new(scenario);
    let keys: Vec<_> = candidates
        .iter()
        .flat_map(|chis| chis.iter().enumerate().map(|(u, &c)| (u, c)))
        .collect();
    cache.fill(&keys)?;
    let radio = scenario.radio();
    let outages = candidates
        .iter()
        .map(|chis| {
            let terms: Vec<RelayTerms> = (0..n).map(|u| cache.get(u, chis[u])).collect();
            expand_outage(&terms, radio, false).map(|r| r.p_out)
        })
        .collect::<Result<Vec<_>>>()?;
    let (best, best_outage) = argmin(outages.iter().copied().enumerate());
    let best_policies = candidates[best]
        .iter()
        .map(|&chi| RelayEnergyPolicy::from_chi_levels(battery, chi))
        .collect::<Result<Vec<_>>>()?;
    Ok(ThresholdSearchResult {
        best_policies,
        best_outage,
        evaluations: candidates.len(),
        method: SearchMethod::HeuristicZ,
    })
}
