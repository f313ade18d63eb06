//! CSV ingestion for inventories, region maps, supply histories and siting
//! evidence, plus the matching writers.
//!
//! All files are UTF-8, comma-separated, with a mandatory header row.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::domain::{
    FirmId, LocationId, RegionId, RegionMap, SiteInventory, SitingEvidence, SupplySeries,
    DEFAULT_VARIANT,
};
use crate::error::{Error, Result};
use crate::units::Energy;

/// Parsed records plus non-fatal observations made while reading them.
#[derive(Debug, Clone, PartialEq)]
pub struct Ingested<T> {
    pub records: T,
    pub warnings: Vec<String>,
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn file_name(path: &Path) -> String {
    path.display().to_string()
}

/// Reads every row of `reader` as `T`, checking that `required` columns are
/// present. Yields `(line, row)` pairs.
fn read_rows<T: DeserializeOwned, R: Read>(
    reader: R,
    file: &str,
    required: &[&str],
) -> Result<Vec<(u64, T)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Malformed {
            file: file.to_owned(),
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    for col in required {
        if !headers.iter().any(|h| h == *col) {
            return Err(Error::Malformed {
                file: file.to_owned(),
                line: 1,
                message: format!("missing required column '{col}'"),
            });
        }
    }
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Malformed {
            file: file.to_owned(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let row: T = record
            .deserialize(Some(&headers))
            .map_err(|e| Error::Malformed {
                file: file.to_owned(),
                line,
                message: e.to_string(),
            })?;
        out.push((line, row));
    }
    Ok(out)
}

fn id<T: std::str::FromStr<Err = Error>>(
    file: &str,
    line: u64,
    field: &'static str,
    raw: &str,
) -> Result<T> {
    raw.parse().map_err(|e: Error| Error::Field {
        file: file.to_owned(),
        line,
        field,
        message: e.to_string(),
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct InventoryRow {
    firm: String,
    location: String,
    site_count: i64,
    #[serde(default)]
    e_ai_loc_twh: Option<f64>,
}

pub fn read_inventory<R: Read>(reader: R, file: &str) -> Result<Vec<SiteInventory>> {
    let rows: Vec<(u64, InventoryRow)> =
        read_rows(reader, file, &["firm", "location", "site_count"])?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(rows.len());
    for (line, row) in rows {
        let field_err = |field, message: String| Error::Field {
            file: file.to_owned(),
            line,
            field,
            message,
        };
        let firm: FirmId = id(file, line, "firm", &row.firm)?;
        let location: LocationId = id(file, line, "location", &row.location)?;
        if row.site_count < 0 {
            return Err(field_err(
                "site_count",
                format!("must be >= 0, got {}", row.site_count),
            ));
        }
        let e_ai_loc = match row.e_ai_loc_twh {
            Some(v) if !(v.is_finite() && v >= 0.0) => {
                return Err(field_err("e_ai_loc_twh", format!("must be >= 0, got {v}")))
            }
            v => v.map(Energy::from_twh),
        };
        if !seen.insert((firm.clone(), location.clone())) {
            return Err(Error::Malformed {
                file: file.to_owned(),
                line,
                message: format!("duplicate key ({firm}, {location})"),
            });
        }
        out.push(SiteInventory {
            firm,
            location,
            site_count: row.site_count as u64,
            e_ai_loc,
        });
    }
    Ok(out)
}

/// Reads `firm,location,site_count[,e_ai_loc_twh]`.
pub fn ingest_inventory(path: &Path) -> Result<Vec<SiteInventory>> {
    read_inventory(open(path)?, &file_name(path))
}

pub fn write_inventory<W: Write>(writer: W, inventory: &[SiteInventory]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for s in inventory {
        w.serialize(InventoryRow {
            firm: s.firm.to_string(),
            location: s.location.to_string(),
            site_count: s.site_count as i64,
            e_ai_loc_twh: s.e_ai_loc.map(Energy::twh),
        })
        .map_err(csv_write)?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))
}

fn csv_write(e: csv::Error) -> Error {
    Error::io("<csv writer>", std::io::Error::other(e.to_string()))
}

#[derive(Debug, Serialize, Deserialize)]
struct RegionRow {
    location: String,
    region: String,
}

pub fn read_region_map<R: Read>(reader: R, file: &str) -> Result<RegionMap> {
    let rows: Vec<(u64, RegionRow)> = read_rows(reader, file, &["location", "region"])?;
    let mut map = RegionMap::new();
    for (line, row) in rows {
        let location = id(file, line, "location", &row.location)?;
        let region = id(file, line, "region", &row.region)?;
        map.insert(location, region).map_err(|e| Error::Malformed {
            file: file.to_owned(),
            line,
            message: e.to_string(),
        })?;
    }
    Ok(map)
}

/// Reads `location,region`.
pub fn ingest_region_map(path: &Path) -> Result<RegionMap> {
    read_region_map(open(path)?, &file_name(path))
}

pub fn write_region_map<W: Write>(writer: W, map: &RegionMap) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for (location, region) in map.iter() {
        w.serialize(RegionRow {
            location: location.to_string(),
            region: region.to_string(),
        })
        .map_err(csv_write)?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))
}

#[derive(Debug, Serialize, Deserialize)]
struct SupplyRow {
    region: String,
    year: i32,
    generation_twh: f64,
}

pub fn read_supply<R: Read>(
    reader: R,
    file: &str,
) -> Result<Ingested<BTreeMap<RegionId, SupplySeries>>> {
    let rows: Vec<(u64, SupplyRow)> =
        read_rows(reader, file, &["region", "year", "generation_twh"])?;
    let mut series: BTreeMap<RegionId, SupplySeries> = BTreeMap::new();
    for (line, row) in rows {
        let region: RegionId = id(file, line, "region", &row.region)?;
        if !(row.generation_twh.is_finite() && row.generation_twh > 0.0) {
            return Err(Error::Field {
                file: file.to_owned(),
                line,
                field: "generation_twh",
                message: format!("must be positive, got {}", row.generation_twh),
            });
        }
        let entry = series
            .entry(region.clone())
            .or_insert_with(|| SupplySeries {
                region: region.clone(),
                history: BTreeMap::new(),
            });
        if entry
            .history
            .insert(row.year, Energy::from_twh(row.generation_twh))
            .is_some()
        {
            return Err(Error::Malformed {
                file: file.to_owned(),
                line,
                message: format!("duplicate key ({region}, {})", row.year),
            });
        }
    }
    let warnings = series
        .values()
        .filter(|s| !s.has_cagr())
        .map(|s| format!("supply for {}: CAGR unavailable", s.region))
        .collect();
    Ok(Ingested {
        records: series,
        warnings,
    })
}

/// Reads `region,year,generation_twh`, grouped per region and sorted by year.
pub fn ingest_supply(path: &Path) -> Result<Ingested<BTreeMap<RegionId, SupplySeries>>> {
    read_supply(open(path)?, &file_name(path))
}

pub fn write_supply<'a, W: Write>(
    writer: W,
    series: impl IntoIterator<Item = &'a SupplySeries>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for s in series {
        for (&year, e) in &s.history {
            w.serialize(SupplyRow {
                region: s.region.to_string(),
                year,
                generation_twh: e.twh(),
            })
            .map_err(csv_write)?;
        }
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))
}

#[derive(Debug, Serialize, Deserialize)]
struct EvidenceRow {
    firm: String,
    region: String,
    sentiment: f64,
    relevance: f64,
    #[serde(default)]
    variant: Option<String>,
}

pub fn read_evidence<R: Read>(reader: R, file: &str) -> Result<Ingested<Vec<SitingEvidence>>> {
    let rows: Vec<(u64, EvidenceRow)> =
        read_rows(reader, file, &["firm", "region", "sentiment", "relevance"])?;
    let mut records = Vec::with_capacity(rows.len());
    let mut warnings = Vec::new();
    for (line, row) in rows {
        let firm: FirmId = id(file, line, "firm", &row.firm)?;
        let region: RegionId = id(file, line, "region", &row.region)?;
        if !(-1.0..=1.0).contains(&row.sentiment) {
            return Err(Error::Field {
                file: file.to_owned(),
                line,
                field: "sentiment",
                message: format!("must lie in [-1, 1], got {}", row.sentiment),
            });
        }
        if row.relevance.is_nan() {
            return Err(Error::Field {
                file: file.to_owned(),
                line,
                field: "relevance",
                message: "not a number".to_owned(),
            });
        }
        let relevance = row.relevance.clamp(0.0, 1.0);
        if relevance != row.relevance {
            warnings.push(format!(
                "{file}, line {line}: relevance {} clamped to {relevance}",
                row.relevance
            ));
        }
        let variant = row
            .variant
            .filter(|v| !v.is_empty())
            .unwrap_or_else(|| DEFAULT_VARIANT.to_owned());
        records.push(
            SitingEvidence::new(firm, region, row.sentiment, relevance)?.with_variant(variant),
        );
    }
    Ok(Ingested { records, warnings })
}

/// Reads `firm,region,sentiment,relevance[,variant]`. Relevance outside
/// [0, 1] is clamped with a warning; sentiment outside [-1, 1] is rejected.
pub fn ingest_evidence(path: &Path) -> Result<Ingested<Vec<SitingEvidence>>> {
    read_evidence(open(path)?, &file_name(path))
}

pub fn write_evidence<W: Write>(writer: W, evidence: &[SitingEvidence]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for e in evidence {
        w.serialize(EvidenceRow {
            firm: e.firm.to_string(),
            region: e.region.to_string(),
            sentiment: e.sentiment,
            relevance: e.relevance,
            variant: Some(e.variant.clone()),
        })
        .map_err(csv_write)?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))
}

/// Rounds to six significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let v: f64 = format!("{x:.5e}").parse().expect("formatted float parses");
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

/// Six significant digits, '.' decimal point, no exponent, no locale.
pub fn fmt_sig(x: f64) -> String {
    format!("{}", round_sig(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inventory_two_rows() {
        let csv = "firm,location,site_count\nAmazon,ashburn,3\nAmazon,dublin,1\n";
        let inv = read_inventory(csv.as_bytes(), "inv.csv").unwrap();
        assert_eq!(inv.len(), 2);
        assert_eq!(inv[0].site_count, 3);
        assert_eq!(inv[1].e_ai_loc, None);
    }

    #[test]
    fn inventory_optional_energy_column() {
        let csv = "firm,location,site_count,e_ai_loc_twh\nA,x,3,1.5\nA,y,1,\n";
        let inv = read_inventory(csv.as_bytes(), "inv.csv").unwrap();
        assert_eq!(inv[0].e_ai_loc, Some(Energy::from_twh(1.5)));
        assert_eq!(inv[1].e_ai_loc, None);
    }

    #[test]
    fn negative_site_count_names_field() {
        let csv = "firm,location,site_count\nAmazon,ashburn,-1\n";
        let err = read_inventory(csv.as_bytes(), "inv.csv").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("site_count"), "{msg}");
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn duplicate_inventory_key() {
        let csv = "firm,location,site_count\nAmazon,virginia,1\nAmazon,virginia,2\n";
        let err = read_inventory(csv.as_bytes(), "inv.csv").unwrap_err();
        assert!(err.to_string().contains("duplicate key"), "{err}");
    }

    #[test]
    fn malformed_row_reports_line() {
        let csv = "firm,location,site_count\nA,x,1\nA,y,lots\n";
        let err = read_inventory(csv.as_bytes(), "inv.csv").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn missing_column_rejected() {
        let csv = "firm,site_count\nA,1\n";
        assert!(read_inventory(csv.as_bytes(), "inv.csv").is_err());
    }

    #[test]
    fn supply_grouping_and_flags() {
        let csv = "region,year,generation_twh\n\
                   texas,2024,540\nireland,2019,31\ntexas,2019,483\nireland,2024,34\ntaiwan,2024,290\n";
        let got = read_supply(csv.as_bytes(), "supply.csv").unwrap();
        assert_eq!(got.records.len(), 3);
        let texas = &got.records[&RegionId::new("texas").unwrap()];
        assert_eq!(
            texas.history.keys().copied().collect::<Vec<_>>(),
            [2019, 2024]
        );
        assert!(texas.has_cagr());
        assert_eq!(got.warnings.len(), 1);
        assert!(got.warnings[0].contains("taiwan") && got.warnings[0].contains("CAGR unavailable"));
    }

    #[test]
    fn supply_rejects_bad_values() {
        let zero = "region,year,generation_twh\ntexas,2024,0\n";
        assert!(read_supply(zero.as_bytes(), "s.csv").is_err());
        let year = "region,year,generation_twh\ntexas,twenty,10\n";
        assert!(read_supply(year.as_bytes(), "s.csv").is_err());
    }

    #[test]
    fn evidence_bounds() {
        let ok = "firm,region,sentiment,relevance\nGoogle,ireland,0.7,0.9\n";
        let got = read_evidence(ok.as_bytes(), "e.csv").unwrap();
        assert_eq!(got.records[0].variant, DEFAULT_VARIANT);
        assert!(got.warnings.is_empty());

        let clamp = "firm,region,sentiment,relevance,variant\nGoogle,ireland,0.7,1.3,v2\n";
        let got = read_evidence(clamp.as_bytes(), "e.csv").unwrap();
        assert_eq!(got.records[0].relevance, 1.0);
        assert_eq!(got.records[0].variant, "v2");
        assert_eq!(got.warnings.len(), 1);

        let bad = "firm,region,sentiment,relevance\nGoogle,ireland,-2,0.5\n";
        let err = read_evidence(bad.as_bytes(), "e.csv").unwrap_err();
        assert!(err.to_string().contains("sentiment"));
    }

    #[test]
    fn conflicting_region_map_rejected() {
        let csv = "location,region\na,r1\na,r2\n";
        assert!(read_region_map(csv.as_bytes(), "m.csv").is_err());
    }

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_sig(118.0), "118");
        assert_eq!(fmt_sig(264.6), "264.6");
        assert_eq!(fmt_sig(212.00996768), "212.01");
        assert_eq!(fmt_sig(0.1234567), "0.123457");
        assert_eq!(fmt_sig(-0.0), "0");
        assert_eq!(fmt_sig(1234567.0), "1234570");
    }
}
