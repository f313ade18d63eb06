//! Firm-level electricity projection under growth scenarios and the
//! aggregation of projection paths into ensemble statistics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::{
    AiShareSchedule, EnsembleResult, FirmId, FirmTrajectory, Scenario, ScenarioId, YearPoint,
    ANCHOR_YEAR, FIRST_FORECAST_YEAR,
};
use crate::error::{Error, Result};
use crate::units::Energy;

/// Observed anchor-year split of a firm's consumption.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirmAnchors {
    pub e_stock: Energy,
    pub e_ai_new: Energy,
}

impl FirmAnchors {
    pub fn from_twh(e_stock: f64, e_ai_new: f64) -> Self {
        FirmAnchors {
            e_stock: Energy::from_twh(e_stock),
            e_ai_new: Energy::from_twh(e_ai_new),
        }
    }
}

/// AI share of new-site load in `year`.
pub fn ai_share(schedule: &AiShareSchedule, year: i32) -> Result<f64> {
    match year {
        y if y < FIRST_FORECAST_YEAR => Err(Error::domain(format!(
            "AI share schedule starts in {FIRST_FORECAST_YEAR}, got {y}"
        ))),
        FIRST_FORECAST_YEAR => Ok(schedule.p1),
        y if y <= FIRST_FORECAST_YEAR + 2 => Ok(schedule.p2),
        _ => Ok(schedule.p3),
    }
}

/// Existing stock compounded from the anchor year.
pub fn project_stock(e_stock_anchor: Energy, g_stock: f64, year: i32) -> Result<Energy> {
    if year < ANCHOR_YEAR {
        return Err(Error::domain(format!(
            "stock projection starts at {ANCHOR_YEAR}, got {year}"
        )));
    }
    Ok(e_stock_anchor * (1.0 + g_stock).powi(year - ANCHOR_YEAR))
}

/// One year of compounding of new AI load.
pub fn project_ai_new(e_ai_prev: Energy, g_new: f64) -> Energy {
    e_ai_prev * (1.0 + g_new)
}

/// Grosses AI load up to total new-site load.
pub fn new_total_from_ai(e_ai_new: Energy, p_ai: f64) -> Result<Energy> {
    if !(p_ai > 0.0 && p_ai <= 1.0) {
        return Err(Error::domain(format!(
            "AI share must lie in (0, 1], got {p_ai}"
        )));
    }
    Ok(e_ai_new / p_ai)
}

/// Yearly trajectory from the anchor year through `horizon`.
///
/// The anchor-year entry carries the anchors unchanged; its new-site total
/// uses the first-phase share `p1`.
pub fn project_firm(
    firm: &FirmId,
    scenario: &Scenario,
    anchors: FirmAnchors,
    schedule: &AiShareSchedule,
    horizon: i32,
) -> Result<FirmTrajectory> {
    if anchors.e_stock < Energy::ZERO || anchors.e_ai_new < Energy::ZERO {
        return Err(Error::domain(format!("negative anchors for {firm}")));
    }
    if horizon < ANCHOR_YEAR {
        return Err(Error::domain(format!(
            "horizon {horizon} precedes anchor year {ANCHOR_YEAR}"
        )));
    }

    let mut series = BTreeMap::new();
    let e_new = new_total_from_ai(anchors.e_ai_new, schedule.p1)?;
    series.insert(
        ANCHOR_YEAR,
        YearPoint {
            e_stock: anchors.e_stock,
            e_ai_new: anchors.e_ai_new,
            e_new,
            e_tot: anchors.e_stock + e_new,
        },
    );

    let mut e_ai = anchors.e_ai_new;
    for year in FIRST_FORECAST_YEAR..=horizon {
        let e_stock = project_stock(anchors.e_stock, scenario.g_stock, year)?;
        e_ai = project_ai_new(e_ai, scenario.g_new);
        let e_new = new_total_from_ai(e_ai, ai_share(schedule, year)?)?;
        series.insert(
            year,
            YearPoint {
                e_stock,
                e_ai_new: e_ai,
                e_new,
                e_tot: e_stock + e_new,
            },
        );
    }

    Ok(FirmTrajectory {
        firm: firm.clone(),
        scenario: scenario.id,
        series,
    })
}

/// Global total per year for one projection path.
pub type PathTotals = BTreeMap<i32, Energy>;

/// Sums firm totals per year, in firm order.
pub fn global_totals<'a>(trajectories: impl IntoIterator<Item = &'a FirmTrajectory>) -> PathTotals {
    let mut sorted: Vec<&FirmTrajectory> = trajectories.into_iter().collect();
    sorted.sort_by(|a, b| a.firm.cmp(&b.firm));
    let mut totals = PathTotals::new();
    for t in sorted {
        for (&year, point) in &t.series {
            *totals.entry(year).or_insert(Energy::ZERO) += point.e_tot;
        }
    }
    totals
}

/// Per-year mean, min and max over projection paths.
pub fn ensemble_aggregate(
    scenario: ScenarioId,
    paths: &[PathTotals],
) -> Result<Vec<EnsembleResult>> {
    let first = paths.first().ok_or(Error::Empty("ensemble paths"))?;
    let grid: Vec<i32> = first.keys().copied().collect();
    for (i, p) in paths.iter().enumerate() {
        if !p.keys().copied().eq(grid.iter().copied()) {
            return Err(Error::domain(format!(
                "path {} does not share the year grid of path 0",
                i
            )));
        }
    }

    let out = grid
        .iter()
        .map(|year| {
            let values: Vec<Energy> = paths.iter().map(|p| p[year]).collect();
            let min = values.iter().copied().fold(values[0], Energy::min);
            let max = values.iter().copied().fold(values[0], Energy::max);
            let sum: Energy = values.iter().sum();
            // the rounded mean of identical values can land one ulp outside them
            let mean = (sum / values.len() as f64).max(min).min(max);
            EnsembleResult {
                year: *year,
                scenario,
                paths: values,
                mean,
                min,
                max,
            }
        })
        .collect();
    Ok(out)
}
