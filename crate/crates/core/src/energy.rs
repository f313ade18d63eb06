//! Site-level IT and facility energy, and year-over-year evolution of the
//! fleet parameters that drive them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::{BaselineParams, ANCHOR_YEAR};
use crate::error::{Error, Result};
use crate::units::Energy;

/// IT-load and facility energy for one site and period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyRecord {
    pub e_it: Energy,
    pub e_dc: Energy,
    pub pue_used: f64,
}

/// IT-load energy: accelerator count × kW × utilization × hours, summed over
/// the training and inference fleets. kWh / 1000 gives MWh.
pub fn compute_e_it(params: &BaselineParams) -> Energy {
    let train = params.n_train as f64 * params.p_avg_train * params.u_train * params.h_train;
    let inference = params.n_inference as f64
        * params.p_avg_inference
        * params.u_inference
        * params.h_inference;
    Energy::from_mwh((train + inference) / 1000.0)
}

/// Facility energy, the IT load scaled by PUE.
pub fn compute_e_dc(params: &BaselineParams) -> EnergyRecord {
    debug_assert!(params.pue >= 1.0, "PUE below 1 must be rejected upstream");
    let e_it = compute_e_it(params);
    EnergyRecord {
        e_it,
        e_dc: e_it * params.pue,
        pue_used: params.pue,
    }
}

pub const CAPACITY_GROWTH_BAND: (f64, f64) = (0.10, 0.20);
pub const EFFICIENCY_GAIN_BAND: (f64, f64) = (0.01, 0.03);

/// Annual rates at which site parameters evolve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRates")]
pub struct EvolutionRates {
    capacity_growth: f64,
    efficiency_gain: f64,
    utilization_drift: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRates {
    #[serde(default = "default_capacity_growth")]
    capacity_growth: f64,
    #[serde(default = "default_efficiency_gain")]
    efficiency_gain: f64,
    #[serde(default)]
    utilization_drift: f64,
}

fn default_capacity_growth() -> f64 {
    0.15
}

fn default_efficiency_gain() -> f64 {
    0.02
}

impl TryFrom<RawRates> for EvolutionRates {
    type Error = Error;
    fn try_from(raw: RawRates) -> Result<Self> {
        EvolutionRates::new(
            raw.capacity_growth,
            raw.efficiency_gain,
            raw.utilization_drift,
        )
    }
}

impl Default for EvolutionRates {
    fn default() -> Self {
        EvolutionRates {
            capacity_growth: default_capacity_growth(),
            efficiency_gain: default_efficiency_gain(),
            utilization_drift: 0.0,
        }
    }
}

impl EvolutionRates {
    /// Rates must sit inside the observed hyperscale bands: 10-20 % capacity
    /// growth and 1-3 % efficiency gain per year. Utilization drift is any
    /// non-negative step up to 1.
    pub fn new(capacity_growth: f64, efficiency_gain: f64, utilization_drift: f64) -> Result<Self> {
        let in_band = |v: f64, (lo, hi): (f64, f64)| v >= lo && v <= hi;
        if !in_band(capacity_growth, CAPACITY_GROWTH_BAND) {
            return Err(Error::domain(format!(
                "capacity_growth {capacity_growth} outside [{}, {}]",
                CAPACITY_GROWTH_BAND.0, CAPACITY_GROWTH_BAND.1
            )));
        }
        if !in_band(efficiency_gain, EFFICIENCY_GAIN_BAND) {
            return Err(Error::domain(format!(
                "efficiency_gain {efficiency_gain} outside [{}, {}]",
                EFFICIENCY_GAIN_BAND.0, EFFICIENCY_GAIN_BAND.1
            )));
        }
        if !(0.0..=1.0).contains(&utilization_drift) {
            return Err(Error::domain(format!(
                "utilization_drift {utilization_drift} outside [0, 1]"
            )));
        }
        Ok(EvolutionRates {
            capacity_growth,
            efficiency_gain,
            utilization_drift,
        })
    }

    pub fn capacity_growth(&self) -> f64 {
        self.capacity_growth
    }

    pub fn efficiency_gain(&self) -> f64 {
        self.efficiency_gain
    }

    pub fn utilization_drift(&self) -> f64 {
        self.utilization_drift
    }
}

fn round_half_up(x: f64) -> u64 {
    (x + 0.5).floor() as u64
}

/// Advances site parameters by `years`.
///
/// Counts compound with capacity growth and are rounded half-up; power per
/// accelerator decays with efficiency gain; utilization rises linearly and
/// is clamped at 1. Hours and PUE are unchanged.
pub fn evolve_baseline(
    params: &BaselineParams,
    rates: &EvolutionRates,
    years: u32,
) -> BaselineParams {
    if years == 0 {
        return params.clone();
    }
    let n = years as i32;
    let growth = (1.0 + rates.capacity_growth).powi(n);
    let decay = (1.0 - rates.efficiency_gain).powi(n);
    let drift = rates.utilization_drift * f64::from(years);
    BaselineParams {
        n_train: round_half_up(params.n_train as f64 * growth),
        n_inference: round_half_up(params.n_inference as f64 * growth),
        p_avg_train: params.p_avg_train * decay,
        p_avg_inference: params.p_avg_inference * decay,
        u_train: (params.u_train + drift).min(1.0),
        u_inference: (params.u_inference + drift).min(1.0),
        h_train: params.h_train,
        h_inference: params.h_inference,
        pue: params.pue,
    }
}

/// A site's anchor-year parameters, their evolution, and an optional
/// per-year PUE override table.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteModel {
    pub params: BaselineParams,
    pub rates: EvolutionRates,
    pub pue_by_year: BTreeMap<i32, f64>,
}

impl SiteModel {
    pub fn new(params: BaselineParams, rates: EvolutionRates) -> Self {
        SiteModel {
            params,
            rates,
            pue_by_year: BTreeMap::new(),
        }
    }

    pub fn with_pue(mut self, year: i32, pue: f64) -> Self {
        self.pue_by_year.insert(year, pue);
        self
    }

    /// Parameters in effect for `year`.
    pub fn params_in(&self, year: i32) -> Result<BaselineParams> {
        if year < ANCHOR_YEAR {
            return Err(Error::domain(format!(
                "site parameters are anchored at {ANCHOR_YEAR}; cannot evaluate {year}"
            )));
        }
        let mut p = evolve_baseline(&self.params, &self.rates, (year - ANCHOR_YEAR) as u32);
        if let Some(&pue) = self.pue_by_year.get(&year) {
            p.pue = pue;
        }
        p.check()?;
        Ok(p)
    }

    pub fn energy_in(&self, year: i32) -> Result<EnergyRecord> {
        Ok(compute_e_dc(&self.params_in(year)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference() -> BaselineParams {
        BaselineParams::annual(1000, 0.7, 0.8, 2000, 0.3, 0.3, 1.2)
    }

    #[test]
    fn it_load_matches_hand_arithmetic() {
        // 1000·0.7·0.8·8760 = 4,905,600 kWh; 2000·0.3·0.3·8760 = 1,576,800 kWh
        assert_eq!(compute_e_it(&reference()).mwh(), 6482.4);
    }

    #[test]
    fn training_only_fleet() {
        let mut p = reference();
        p.n_inference = 0;
        assert_eq!(compute_e_it(&p).mwh(), 4905.6);
    }

    #[test]
    fn idle_fleet_draws_nothing() {
        let mut p = reference();
        p.u_train = 0.0;
        p.u_inference = 0.0;
        assert_eq!(compute_e_it(&p), Energy::ZERO);
        assert_eq!(compute_e_dc(&p).e_dc, Energy::ZERO);
    }

    #[test]
    fn facility_energy_scales_by_pue() {
        let rec = compute_e_dc(&reference());
        assert_relative_eq!(rec.e_dc.mwh(), 7778.88, max_relative = 1e-12);
        let mut p = reference();
        p.pue = 1.0;
        let rec = compute_e_dc(&p);
        assert_eq!(rec.e_dc, rec.e_it);
    }

    #[test]
    fn zero_horizon_is_identity() {
        let p = reference();
        assert_eq!(evolve_baseline(&p, &EvolutionRates::default(), 0), p);
    }

    #[test]
    fn counts_compound_then_round_half_up() {
        let mut p = reference();
        p.n_train = 100;
        let rates = EvolutionRates::new(0.15, 0.02, 0.0).unwrap();
        assert_eq!(evolve_baseline(&p, &rates, 2).n_train, 132);
    }

    #[test]
    fn power_decays_with_efficiency() {
        let mut p = reference();
        p.p_avg_train = 1.0;
        let rates = EvolutionRates::new(0.15, 0.02, 0.0).unwrap();
        assert_relative_eq!(
            evolve_baseline(&p, &rates, 3).p_avg_train,
            0.941192,
            max_relative = 1e-12
        );
    }

    #[test]
    fn utilization_is_clamped() {
        let rates = EvolutionRates::new(0.15, 0.02, 0.1).unwrap();
        let evolved = evolve_baseline(&reference(), &rates, 5);
        assert_eq!(evolved.u_train, 1.0);
        assert_relative_eq!(evolved.u_inference, 0.8, max_relative = 1e-12);
    }

    #[test]
    fn rates_outside_bands_rejected() {
        assert!(EvolutionRates::new(0.25, 0.02, 0.0).is_err());
        assert!(EvolutionRates::new(0.15, 0.005, 0.0).is_err());
        assert!(EvolutionRates::new(0.15, 0.02, -0.1).is_err());
        let d = EvolutionRates::default();
        assert_eq!(
            (
                d.capacity_growth(),
                d.efficiency_gain(),
                d.utilization_drift()
            ),
            (0.15, 0.02, 0.0)
        );
    }

    #[test]
    fn site_model_applies_pue_override() {
        let model = SiteModel::new(reference(), EvolutionRates::default()).with_pue(2026, 1.1);
        assert_eq!(model.params_in(2025).unwrap().pue, 1.2);
        assert_eq!(model.params_in(2026).unwrap().pue, 1.1);
        assert!(model.params_in(2023).is_err());
        let bad = SiteModel::new(reference(), EvolutionRates::default()).with_pue(2027, 0.8);
        assert!(bad.energy_in(2027).is_err());
    }
}
