//! Output tables. Each table is emitted as CSV (LF line endings, numbers
//! at six significant digits) or as a JSON array mirroring the CSV rows.

use std::io::Read;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::domain::{
    FirmId, FirmTrajectory, PsiRecord, RegionId, ScenarioId, StressBand, YearPoint,
};
use crate::error::{Error, Result};
use crate::io::{fmt_sig, round_sig};
use crate::psi::RankedPsi;
use crate::units::Energy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Missing {
                kind: "format",
                key: other.to_owned(),
            }),
        }
    }
}

/// A row type that can be written as a CSV record.
pub trait Row: Serialize {
    const HEADER: &'static [&'static str];
    fn cells(&self) -> Vec<String>;
}

pub fn render<R: Row>(rows: &[R], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            let write_err =
                |e: csv::Error| Error::io("<csv>", std::io::Error::other(e.to_string()));
            w.write_record(R::HEADER).map_err(write_err)?;
            for r in rows {
                w.write_record(r.cells()).map_err(write_err)?;
            }
            w.into_inner()
                .map_err(|e| Error::io("<csv>", std::io::Error::other(e.to_string())))
        }
        Format::Json => to_json(rows),
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| Error::io("<json>", std::io::Error::other(e.to_string())))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Parses a table written by [`render`] in CSV form.
pub fn parse_csv<T: DeserializeOwned, R: Read>(reader: R) -> Result<Vec<T>> {
    let mut rdr = csv::Reader::from_reader(reader);
    rdr.deserialize()
        .map(|r| {
            r.map_err(|e| Error::Malformed {
                file: "<table>".to_owned(),
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })
        })
        .collect()
}

fn twh(e: Energy) -> f64 {
    round_sig(e.twh())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub firm: FirmId,
    pub scenario: ScenarioId,
    pub year: i32,
    pub e_stock: f64,
    pub e_ai_new: f64,
    pub e_new: f64,
    pub e_tot: f64,
}

impl TrajectoryRow {
    pub fn from_trajectory(t: &FirmTrajectory) -> Vec<Self> {
        t.series
            .iter()
            .map(|(&year, p)| TrajectoryRow {
                firm: t.firm.clone(),
                scenario: t.scenario,
                year,
                e_stock: twh(p.e_stock),
                e_ai_new: twh(p.e_ai_new),
                e_new: twh(p.e_new),
                e_tot: twh(p.e_tot),
            })
            .collect()
    }

    pub fn point(&self) -> YearPoint {
        YearPoint {
            e_stock: Energy::from_twh(self.e_stock),
            e_ai_new: Energy::from_twh(self.e_ai_new),
            e_new: Energy::from_twh(self.e_new),
            e_tot: Energy::from_twh(self.e_tot),
        }
    }
}

impl Row for TrajectoryRow {
    const HEADER: &'static [&'static str] = &[
        "firm", "scenario", "year", "e_stock", "e_ai_new", "e_new", "e_tot",
    ];
    fn cells(&self) -> Vec<String> {
        vec![
            self.firm.to_string(),
            self.scenario.to_string(),
            self.year.to_string(),
            fmt_sig(self.e_stock),
            fmt_sig(self.e_ai_new),
            fmt_sig(self.e_new),
            fmt_sig(self.e_tot),
        ]
    }
}

/// Regroups parsed trajectory rows into trajectories.
pub fn trajectories_from_rows(rows: &[TrajectoryRow]) -> Vec<FirmTrajectory> {
    let mut out: std::collections::BTreeMap<(FirmId, ScenarioId), FirmTrajectory> =
        Default::default();
    for r in rows {
        out.entry((r.firm.clone(), r.scenario))
            .or_insert_with(|| FirmTrajectory {
                firm: r.firm.clone(),
                scenario: r.scenario,
                series: Default::default(),
            })
            .series
            .insert(r.year, r.point());
    }
    out.into_values().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleRow {
    pub scenario: ScenarioId,
    pub year: i32,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub paths: usize,
}

impl Row for EnsembleRow {
    const HEADER: &'static [&'static str] = &["scenario", "year", "mean", "min", "max", "paths"];
    fn cells(&self) -> Vec<String> {
        vec![
            self.scenario.to_string(),
            self.year.to_string(),
            fmt_sig(self.mean),
            fmt_sig(self.min),
            fmt_sig(self.max),
            self.paths.to_string(),
        ]
    }
}

impl From<&crate::domain::EnsembleResult> for EnsembleRow {
    fn from(r: &crate::domain::EnsembleResult) -> Self {
        EnsembleRow {
            scenario: r.scenario,
            year: r.year,
            mean: twh(r.mean),
            min: twh(r.min),
            max: twh(r.max),
            paths: r.paths.len(),
        }
    }
}

/// Regional demand for one scenario and year; `demand_twh` is the path mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionalRow {
    pub scenario: ScenarioId,
    pub year: i32,
    pub region: RegionId,
    pub demand_twh: f64,
    pub min_twh: f64,
    pub max_twh: f64,
}

impl Row for RegionalRow {
    const HEADER: &'static [&'static str] = &[
        "scenario",
        "year",
        "region",
        "demand_twh",
        "min_twh",
        "max_twh",
    ];
    fn cells(&self) -> Vec<String> {
        vec![
            self.scenario.to_string(),
            self.year.to_string(),
            self.region.to_string(),
            fmt_sig(self.demand_twh),
            fmt_sig(self.min_twh),
            fmt_sig(self.max_twh),
        ]
    }
}

/// Spread of the scenario means for one region and year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeRow {
    pub year: i32,
    pub region: RegionId,
    pub min_twh: f64,
    pub max_twh: f64,
    pub scenarios: usize,
}

impl Row for EnvelopeRow {
    const HEADER: &'static [&'static str] = &["year", "region", "min_twh", "max_twh", "scenarios"];
    fn cells(&self) -> Vec<String> {
        vec![
            self.year.to_string(),
            self.region.to_string(),
            fmt_sig(self.min_twh),
            fmt_sig(self.max_twh),
            self.scenarios.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiRow {
    pub region: RegionId,
    pub year: i32,
    pub scenario: ScenarioId,
    pub e_dc: f64,
    pub e_supply: f64,
    pub psi: f64,
    pub band: StressBand,
    pub quantile_bin: usize,
}

impl PsiRow {
    pub fn new(scenario: ScenarioId, ranked: &RankedPsi) -> Self {
        let r = &ranked.record;
        PsiRow {
            region: r.region.clone(),
            year: r.year,
            scenario,
            e_dc: twh(r.e_dc),
            e_supply: twh(r.e_supply),
            psi: round_sig(r.psi),
            band: r.band,
            quantile_bin: ranked.quantile_bin,
        }
    }

    pub fn record(&self) -> PsiRecord {
        PsiRecord {
            region: self.region.clone(),
            year: self.year,
            e_dc: Energy::from_twh(self.e_dc),
            e_supply: Energy::from_twh(self.e_supply),
            psi: self.psi,
            band: self.band,
        }
    }
}

impl Row for PsiRow {
    const HEADER: &'static [&'static str] = &[
        "region",
        "year",
        "scenario",
        "e_dc",
        "e_supply",
        "psi",
        "band",
        "quantile_bin",
    ];
    fn cells(&self) -> Vec<String> {
        vec![
            self.region.to_string(),
            self.year.to_string(),
            self.scenario.to_string(),
            fmt_sig(self.e_dc),
            fmt_sig(self.e_supply),
            fmt_sig(self.psi),
            self.band.to_string(),
            self.quantile_bin.to_string(),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_lf_endings() {
        let rows = [EnsembleRow {
            scenario: ScenarioId::Neutral,
            year: 2030,
            mean: 212.00996768,
            min: 212.0,
            max: 212.1,
            paths: 10,
        }];
        let text = String::from_utf8(render(&rows, Format::Csv).unwrap()).unwrap();
        assert_eq!(
            text,
            "scenario,year,mean,min,max,paths\nneutral,2030,212.01,212,212.1,10\n"
        );
        assert!(!text.contains('\r'));
    }

    #[test]
    fn psi_rows_parse_back() {
        let row = PsiRow {
            region: RegionId::new("ireland").unwrap(),
            year: 2030,
            scenario: ScenarioId::Neutral,
            e_dc: 20.0,
            e_supply: 41.0,
            psi: round_sig(20.0 / 41.0),
            band: StressBand::Extreme,
            quantile_bin: 4,
        };
        let bytes = render(std::slice::from_ref(&row), Format::Csv).unwrap();
        let back: Vec<PsiRow> = parse_csv(bytes.as_slice()).unwrap();
        assert_eq!(back, vec![row]);
    }
}
