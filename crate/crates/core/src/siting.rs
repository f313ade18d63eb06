//! Siting: expansion probabilities from sentiment evidence, and the
//! allocation of firm-level energy to regions.
//!
//! Negative sentiment is rectified before normalization. A region with
//! negative tone therefore gets zero probability instead of a negative
//! one, and the output is always a valid distribution.
//!
//! Probabilities act at the site-selection stage ([`select_sites`]): they
//! decide which candidate locations receive new AI load on a given path.
//! They never rescale the AI weights, which already carry modelled
//! location-level energy.

use std::collections::{BTreeMap, BTreeSet};

use crate::domain::{
    AllocationWeights, FirmId, FirmTrajectory, LocationId, RegionId, RegionMap, SiteInventory,
    SitingEvidence, WeightKind,
};
use crate::error::{Error, Result};
use crate::units::Energy;

/// Proportional normalization with a uniform fallback when no mass exists.
/// Sums run in key order so the result does not depend on input order.
fn normalize<K: Ord + Clone>(mass: &BTreeMap<K, f64>) -> BTreeMap<K, f64> {
    let total: f64 = mass.values().sum();
    if total > 0.0 {
        mass.iter().map(|(k, v)| (k.clone(), v / total)).collect()
    } else {
        let uniform = 1.0 / mass.len() as f64;
        mass.keys().map(|k| (k.clone(), uniform)).collect()
    }
}

/// Expansion probability per region: rectified sentiment times relevance,
/// normalized. Several records for one region add up.
pub fn expansion_probabilities(evidence: &[SitingEvidence]) -> Result<BTreeMap<RegionId, f64>> {
    if evidence.is_empty() {
        return Err(Error::Empty("siting evidence"));
    }
    let mut products: BTreeMap<RegionId, Vec<f64>> = BTreeMap::new();
    for e in evidence {
        if !(-1.0..=1.0).contains(&e.sentiment) || !(0.0..=1.0).contains(&e.relevance) {
            return Err(Error::domain(format!(
                "evidence for {}/{} out of bounds (S={}, R={})",
                e.firm, e.region, e.sentiment, e.relevance
            )));
        }
        products
            .entry(e.region.clone())
            .or_default()
            .push(e.sentiment.max(0.0) * e.relevance);
    }
    let mass = products
        .into_iter()
        .map(|(region, mut v)| {
            v.sort_by(f64::total_cmp);
            (region, v.iter().sum())
        })
        .collect();
    Ok(normalize(&mass))
}

/// Candidate locations whose region has expansion probability above
/// `threshold`. Falls back to every candidate when none qualifies, and
/// keeps candidates whose region carries no evidence only in that case.
pub fn select_sites<'a>(
    candidates: impl IntoIterator<Item = &'a LocationId>,
    probabilities: &BTreeMap<RegionId, f64>,
    region_map: &RegionMap,
    threshold: f64,
) -> BTreeSet<LocationId> {
    let all: BTreeSet<LocationId> = candidates.into_iter().cloned().collect();
    let chosen: BTreeSet<LocationId> = all
        .iter()
        .filter(|loc| {
            region_map
                .region_of(loc)
                .and_then(|r| probabilities.get(r))
                .is_some_and(|&p| p > threshold)
        })
        .cloned()
        .collect();
    if chosen.is_empty() {
        all
    } else {
        chosen
    }
}

/// AI weights proportional to modelled AI energy per location.
pub fn ai_weights(
    firm: &FirmId,
    year: i32,
    site_energies: impl IntoIterator<Item = (LocationId, Energy)>,
) -> Result<AllocationWeights> {
    let mut mass = BTreeMap::new();
    for (loc, e) in site_energies {
        if !(e.is_finite() && e >= Energy::ZERO) {
            return Err(Error::domain(format!(
                "AI energy at {loc} must be non-negative, got {e}"
            )));
        }
        if mass.insert(loc.clone(), e.mwh()).is_some() {
            return Err(Error::DuplicateKey(format!("{firm}/{loc}")));
        }
    }
    if mass.is_empty() {
        return Err(Error::Empty("AI siting locations"));
    }
    Ok(AllocationWeights {
        kind: WeightKind::Ai,
        firm: firm.clone(),
        year: Some(year),
        weights: normalize(&mass),
    })
}

/// Historical weights proportional to end-2024 campus counts.
pub fn hist_weights(inventory: &[SiteInventory], firm: &FirmId) -> Result<AllocationWeights> {
    let mut mass = BTreeMap::new();
    for site in inventory.iter().filter(|s| &s.firm == firm) {
        if mass
            .insert(site.location.clone(), site.site_count as f64)
            .is_some()
        {
            return Err(Error::DuplicateKey(format!("{firm}/{}", site.location)));
        }
    }
    if mass.is_empty() {
        return Err(Error::Missing {
            kind: "firm in inventory",
            key: firm.to_string(),
        });
    }
    Ok(AllocationWeights {
        kind: WeightKind::Historical,
        firm: firm.clone(),
        year: None,
        weights: normalize(&mass),
    })
}

/// Splits one firm's demand in `year` across regions: AI load follows the
/// AI weights, non-AI new load and stock follow the historical weights.
pub fn allocate_regional(
    trajectory: &FirmTrajectory,
    year: i32,
    w_ai: &AllocationWeights,
    w_hist: &AllocationWeights,
    region_map: &RegionMap,
) -> Result<BTreeMap<RegionId, Energy>> {
    for w in [w_ai, w_hist] {
        if w.firm != trajectory.firm {
            return Err(Error::domain(format!(
                "weights for {} applied to trajectory of {}",
                w.firm, trajectory.firm
            )));
        }
    }
    let point = trajectory.at(year).ok_or_else(|| Error::Missing {
        kind: "trajectory year",
        key: year.to_string(),
    })?;
    let ai = point.e_ai_new;
    let legacy = point.e_nonai_new() + point.e_stock;

    let locations: BTreeSet<&LocationId> =
        w_ai.weights.keys().chain(w_hist.weights.keys()).collect();
    let mut out = BTreeMap::new();
    for loc in locations {
        let region = region_map.region_of(loc).ok_or_else(|| Error::Missing {
            kind: "location in region map",
            key: loc.to_string(),
        })?;
        let share = ai * w_ai.get(loc) + legacy * w_hist.get(loc);
        *out.entry(region.clone()).or_insert(Energy::ZERO) += share;
    }
    Ok(out)
}

/// Element-wise sum of per-firm regional maps, in firm then region order.
pub fn regional_totals(
    per_firm: &BTreeMap<FirmId, BTreeMap<RegionId, Energy>>,
) -> BTreeMap<RegionId, Energy> {
    let mut out = BTreeMap::new();
    for regions in per_firm.values() {
        for (region, &e) in regions {
            *out.entry(region.clone()).or_insert(Energy::ZERO) += e;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{ScenarioId, YearPoint};
    use approx::assert_relative_eq;

    fn firm(s: &str) -> FirmId {
        FirmId::new(s).unwrap()
    }
    fn loc(s: &str) -> LocationId {
        LocationId::new(s).unwrap()
    }
    fn region(s: &str) -> RegionId {
        RegionId::new(s).unwrap()
    }
    fn ev(r: &str, s: f64, rel: f64) -> SitingEvidence {
        SitingEvidence::new(firm("Google"), region(r), s, rel).unwrap()
    }

    #[test]
    fn single_region_gets_everything() {
        let p = expansion_probabilities(&[ev("ireland", 0.6, 0.9)]).unwrap();
        assert_eq!(p[&region("ireland")], 1.0);
    }

    #[test]
    fn two_regions_proportional() {
        let p = expansion_probabilities(&[ev("a", 0.8, 0.5), ev("b", 0.4, 0.5)]).unwrap();
        assert_relative_eq!(p[&region("a")], 2.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(p[&region("b")], 1.0 / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn all_negative_falls_back_to_uniform() {
        let p = expansion_probabilities(&[ev("a", -0.3, 0.5), ev("b", 0.0, 0.9)]).unwrap();
        assert_eq!(p[&region("a")], 0.5);
        assert_eq!(p[&region("b")], 0.5);
    }

    #[test]
    fn negative_tone_zeroes_region() {
        let p = expansion_probabilities(&[ev("a", -0.5, 0.9), ev("b", 0.5, 0.9)]).unwrap();
        assert_eq!(p[&region("a")], 0.0);
        assert_eq!(p[&region("b")], 1.0);
    }

    #[test]
    fn empty_evidence_is_an_error() {
        assert!(expansion_probabilities(&[]).is_err());
    }

    #[test]
    fn site_selection_with_fallback() {
        let map: RegionMap = [(loc("x"), region("a")), (loc("y"), region("b"))]
            .into_iter()
            .collect();
        let cands = [loc("x"), loc("y")];
        let probs: BTreeMap<_, _> = [(region("a"), 0.0), (region("b"), 1.0)].into();
        assert_eq!(
            select_sites(&cands, &probs, &map, 0.0),
            [loc("y")].into_iter().collect()
        );
        let none: BTreeMap<RegionId, f64> = BTreeMap::new();
        assert_eq!(select_sites(&cands, &none, &map, 0.0).len(), 2);
    }

    #[test]
    fn ai_weights_proportional() {
        let w = ai_weights(
            &firm("F"),
            2030,
            [
                (loc("a"), Energy::from_twh(3.0)),
                (loc("b"), Energy::from_twh(1.0)),
            ],
        )
        .unwrap();
        assert_eq!(w.get(&loc("a")), 0.75);
        assert_eq!(w.get(&loc("b")), 0.25);

        let single = ai_weights(&firm("F"), 2030, [(loc("a"), Energy::from_twh(2.0))]).unwrap();
        assert_eq!(single.get(&loc("a")), 1.0);

        let equal = ai_weights(
            &firm("F"),
            2030,
            (0..4).map(|i| (loc(&format!("l{i}")), Energy::from_twh(1.5))),
        )
        .unwrap();
        assert!(equal.weights.values().all(|&w| w == 0.25));
    }

    #[test]
    fn ai_weights_errors() {
        assert!(ai_weights(&firm("F"), 2030, []).is_err());
        let dup = [
            (loc("a"), Energy::from_twh(1.0)),
            (loc("a"), Energy::from_twh(1.0)),
        ];
        assert!(ai_weights(&firm("F"), 2030, dup).is_err());
        assert!(ai_weights(&firm("F"), 2030, [(loc("a"), Energy::from_twh(-1.0))]).is_err());
    }

    fn site(f: &str, l: &str, n: u64) -> SiteInventory {
        SiteInventory {
            firm: firm(f),
            location: loc(l),
            site_count: n,
            e_ai_loc: None,
        }
    }

    #[test]
    fn hist_weights_from_counts() {
        let inv = [site("F", "a", 3), site("F", "b", 1), site("G", "c", 9)];
        let w = hist_weights(&inv, &firm("F")).unwrap();
        assert_eq!(w.get(&loc("a")), 0.75);
        assert_eq!(w.get(&loc("b")), 0.25);
        assert_eq!(w.get(&loc("c")), 0.0);

        let one = hist_weights(&inv, &firm("G")).unwrap();
        assert_eq!(one.get(&loc("c")), 1.0);

        let even = [site("F", "a", 2), site("F", "b", 2), site("F", "c", 2)];
        let w = hist_weights(&even, &firm("F")).unwrap();
        assert!(w.weights.values().all(|&v| v == 1.0 / 3.0));

        assert!(hist_weights(&inv, &firm("Nobody")).is_err());
    }

    fn trajectory(ai: f64, new: f64, stock: f64) -> FirmTrajectory {
        let p = YearPoint {
            e_stock: Energy::from_twh(stock),
            e_ai_new: Energy::from_twh(ai),
            e_new: Energy::from_twh(new),
            e_tot: Energy::from_twh(stock + new),
        };
        FirmTrajectory {
            firm: firm("F"),
            scenario: ScenarioId::Neutral,
            series: [(2025, p)].into(),
        }
    }

    fn weights(kind: WeightKind, pairs: &[(&str, f64)]) -> AllocationWeights {
        AllocationWeights {
            kind,
            firm: firm("F"),
            year: None,
            weights: pairs.iter().map(|&(l, w)| (loc(l), w)).collect(),
        }
    }

    #[test]
    fn allocation_term_by_term() {
        let t = trajectory(2.5, 6.25, 11.0);
        let map: RegionMap = [(loc("A"), region("R1")), (loc("B"), region("R2"))]
            .into_iter()
            .collect();
        let out = allocate_regional(
            &t,
            2025,
            &weights(WeightKind::Ai, &[("A", 1.0), ("B", 0.0)]),
            &weights(WeightKind::Historical, &[("A", 0.0), ("B", 1.0)]),
            &map,
        )
        .unwrap();
        assert_relative_eq!(out[&region("R1")].twh(), 2.5, max_relative = 1e-12);
        assert_relative_eq!(out[&region("R2")].twh(), 14.75, max_relative = 1e-12);
    }

    #[test]
    fn single_bucket_conserves() {
        let t = trajectory(2.5, 6.25, 11.0);
        let map: RegionMap = [(loc("A"), region("R"))].into_iter().collect();
        let out = allocate_regional(
            &t,
            2025,
            &weights(WeightKind::Ai, &[("A", 1.0)]),
            &weights(WeightKind::Historical, &[("A", 1.0)]),
            &map,
        )
        .unwrap();
        assert_relative_eq!(out[&region("R")].twh(), 17.25, max_relative = 1e-12);
    }

    #[test]
    fn same_region_locations_merge_additively() {
        let t = trajectory(2.5, 6.25, 11.0);
        let split: RegionMap = [(loc("A"), region("R1")), (loc("B"), region("R2"))]
            .into_iter()
            .collect();
        let merged: RegionMap = [(loc("A"), region("R")), (loc("B"), region("R"))]
            .into_iter()
            .collect();
        let w_ai = weights(WeightKind::Ai, &[("A", 0.3), ("B", 0.7)]);
        let w_hist = weights(WeightKind::Historical, &[("A", 0.6), ("B", 0.4)]);
        let a = allocate_regional(&t, 2025, &w_ai, &w_hist, &split).unwrap();
        let b = allocate_regional(&t, 2025, &w_ai, &w_hist, &merged).unwrap();
        assert_relative_eq!(
            b[&region("R")].twh(),
            (a[&region("R1")] + a[&region("R2")]).twh(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn unmapped_weight_location_is_an_error() {
        let t = trajectory(1.0, 2.0, 3.0);
        let map = RegionMap::new();
        let w = weights(WeightKind::Ai, &[("A", 1.0)]);
        assert!(allocate_regional(&t, 2025, &w, &w, &map).is_err());
        assert!(allocate_regional(&t, 2031, &w, &w, &map).is_err());
    }

    #[test]
    fn totals_sum_over_firms() {
        let five = Energy::from_twh(5.0);
        let per_firm: BTreeMap<FirmId, BTreeMap<RegionId, Energy>> = [
            (firm("F"), [(region("R"), five)].into()),
            (firm("G"), [(region("R"), five)].into()),
        ]
        .into();
        assert_eq!(regional_totals(&per_firm)[&region("R")].twh(), 10.0);
    }
}
