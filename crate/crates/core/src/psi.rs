//! Regional supply extrapolation, the Power Stress Index (data-center demand
//! over regional generation), and the benchmark cross-check against a
//! global data-center forecast.
//!
//! Supply series are treated as net generation in TWh. Installed capacity
//! in GW is not converted.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::domain::{PsiRecord, RegionId, StressBand, SupplySeries, ANCHOR_YEAR};
use crate::error::{Error, Result};
use crate::units::Energy;

/// First year of the supply CAGR window; the window ends at the anchor year.
pub const CAGR_START_YEAR: i32 = 2019;
pub const DEFAULT_QUANTILES: usize = 4;

/// Compound annual growth rate between two positive endpoints.
pub fn cagr_from_endpoints(start: f64, end: f64, years: u32) -> Result<f64> {
    if !(start > 0.0 && end > 0.0 && start.is_finite() && end.is_finite()) {
        return Err(Error::domain(format!(
            "CAGR needs positive endpoints, got {start} and {end}"
        )));
    }
    if years == 0 {
        return Err(Error::domain("CAGR needs at least one year"));
    }
    Ok((end / start).powf(1.0 / f64::from(years)) - 1.0)
}

pub fn supply_cagr(e_start: Energy, e_end: Energy, years: u32) -> Result<f64> {
    cagr_from_endpoints(e_start.mwh(), e_end.mwh(), years)
}

impl SupplySeries {
    /// Observed value, or a linear interpolation strictly between the
    /// nearest observed neighbours. Never extrapolates.
    pub fn value_at(&self, year: i32) -> Option<Energy> {
        if let Some(&v) = self.history.get(&year) {
            return Some(v);
        }
        let (&y0, &v0) = self.history.range(..year).next_back()?;
        let (&y1, &v1) = self.history.range(year + 1..).next()?;
        let t = f64::from(year - y0) / f64::from(y1 - y0);
        Some(v0 + (v1 - v0) * t)
    }

    /// Every year from the first to the last observation, gaps interpolated.
    pub fn interpolated_history(&self) -> BTreeMap<i32, Energy> {
        let (Some(&first), Some(&last)) = (self.history.keys().next(), self.history.keys().last())
        else {
            return BTreeMap::new();
        };
        (first..=last)
            .filter_map(|y| self.value_at(y).map(|v| (y, v)))
            .collect()
    }

    /// Growth rate over the standard window ending at the anchor year.
    pub fn cagr(&self) -> Result<f64> {
        self.cagr_over(CAGR_START_YEAR, ANCHOR_YEAR)
    }

    pub fn cagr_over(&self, start_year: i32, end_year: i32) -> Result<f64> {
        if end_year <= start_year {
            return Err(Error::domain(format!(
                "CAGR window {start_year}..{end_year} is empty"
            )));
        }
        let endpoint = |y: i32| {
            self.value_at(y).ok_or_else(|| {
                Error::domain(format!(
                    "supply for {} has no value for {y} (CAGR unavailable)",
                    self.region
                ))
            })
        };
        supply_cagr(
            endpoint(start_year)?,
            endpoint(end_year)?,
            (end_year - start_year) as u32,
        )
    }

    pub fn has_cagr(&self) -> bool {
        self.cagr().is_ok()
    }
}

/// Anchor-year supply compounded forward by the series CAGR.
pub fn extrapolate_supply(series: &SupplySeries, target_year: i32) -> Result<Energy> {
    if target_year < ANCHOR_YEAR {
        return Err(Error::domain(format!(
            "supply extrapolation runs forward from {ANCHOR_YEAR}, got {target_year}"
        )));
    }
    let base = series.value_at(ANCHOR_YEAR).ok_or_else(|| {
        Error::domain(format!(
            "supply for {} has no {ANCHOR_YEAR} value",
            series.region
        ))
    })?;
    if target_year == ANCHOR_YEAR {
        return Ok(base);
    }
    let cagr = series.cagr()?;
    Ok(base * (1.0 + cagr).powi(target_year - ANCHOR_YEAR))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StressIndex {
    pub psi: f64,
    pub band: StressBand,
}

pub fn compute_psi(e_dc: Energy, e_supply: Energy) -> Result<StressIndex> {
    if e_supply.mwh().is_nan() || e_supply.mwh() <= 0.0 {
        return Err(Error::domain(format!(
            "regional supply must be positive, got {e_supply}"
        )));
    }
    if e_dc.mwh().is_nan() || e_dc.mwh() < 0.0 {
        return Err(Error::domain(format!(
            "data-center demand must be non-negative, got {e_dc}"
        )));
    }
    let psi = e_dc / e_supply;
    Ok(StressIndex {
        psi,
        band: StressBand::classify(psi),
    })
}

impl PsiRecord {
    pub fn new(region: RegionId, year: i32, e_dc: Energy, e_supply: Energy) -> Result<Self> {
        let StressIndex { psi, band } = compute_psi(e_dc, e_supply)?;
        Ok(PsiRecord {
            region,
            year,
            e_dc,
            e_supply,
            psi,
            band,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedPsi {
    pub record: PsiRecord,
    /// 1 = lowest quantile.
    pub quantile_bin: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Uncovered {
    pub region: RegionId,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiReport {
    pub year: i32,
    /// Descending by PSI, ties broken by region key ascending.
    pub ranked: Vec<RankedPsi>,
    pub uncovered: Vec<Uncovered>,
}

/// Quantile bin from the count of strictly smaller values, so ties share a bin.
fn quantile_bin(below: usize, n: usize, quantiles: usize) -> usize {
    1 + (quantiles * below) / n
}

/// Ranks every demand region by PSI in `year`. Regions without usable
/// supply data are listed as uncovered and left out of the ranking.
pub fn psi_report(
    demand: &BTreeMap<RegionId, Energy>,
    supply: &BTreeMap<RegionId, SupplySeries>,
    year: i32,
    quantiles: usize,
) -> Result<PsiReport> {
    if quantiles == 0 {
        return Err(Error::domain("quantile count must be at least 1"));
    }
    let mut records = Vec::new();
    let mut uncovered = Vec::new();
    for (region, &e_dc) in demand {
        let Some(series) = supply.get(region) else {
            uncovered.push(Uncovered {
                region: region.clone(),
                reason: "no supply series".to_owned(),
            });
            continue;
        };
        match extrapolate_supply(series, year) {
            Ok(e_supply) => records.push(PsiRecord::new(region.clone(), year, e_dc, e_supply)?),
            Err(e) => uncovered.push(Uncovered {
                region: region.clone(),
                reason: e.to_string(),
            }),
        }
    }

    records.sort_by(|a, b| {
        b.psi
            .total_cmp(&a.psi)
            .then_with(|| a.region.cmp(&b.region))
    });
    let n = records.len();
    let ranked = records
        .iter()
        .map(|r| {
            let below = records.iter().filter(|o| o.psi < r.psi).count();
            RankedPsi {
                record: r.clone(),
                quantile_bin: quantile_bin(below, n, quantiles),
            }
        })
        .collect();
    Ok(PsiReport {
        year,
        ranked,
        uncovered,
    })
}

pub const IEA_GLOBAL_DC_2030_TWH: f64 = 945.0;
pub const HYPERSCALE_SHARE: f64 = 0.70;
pub const TOP_FIRM_SHARE: f64 = 0.40;

/// Implied six-firm consumption: global data-center demand × hyperscale
/// share × share of the leading operators.
pub fn cross_validate_global(
    global_dc_forecast: f64,
    hyperscale_share: f64,
    top_firm_share: f64,
) -> Result<f64> {
    if !(global_dc_forecast > 0.0 && global_dc_forecast.is_finite()) {
        return Err(Error::domain(format!(
            "global forecast must be positive, got {global_dc_forecast}"
        )));
    }
    for (name, s) in [
        ("hyperscale share", hyperscale_share),
        ("top-firm share", top_firm_share),
    ] {
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::domain(format!("{name} must lie in (0, 1], got {s}")));
        }
    }
    Ok(global_dc_forecast * hyperscale_share * top_firm_share)
}

/// Whether `value` falls inside `[low, high]`.
pub fn within(value: f64, low: f64, high: f64) -> bool {
    low <= value && value <= high
}
