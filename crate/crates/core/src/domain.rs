//! Value types shared by every stage of the engine, plus dataset validation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::Energy;

/// Year whose observed totals every trajectory reproduces exactly.
pub const ANCHOR_YEAR: i32 = 2024;
/// First projected year; the AI-share schedule starts here.
pub const FIRST_FORECAST_YEAR: i32 = 2025;
pub const DEFAULT_HORIZON: i32 = 2030;
/// Hours in a non-leap year, the default operating period.
pub const HOURS_PER_YEAR: f64 = 8760.0;
pub const MAX_HOURS_PER_YEAR: f64 = 8784.0;

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident, $what:literal) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Result<Self> {
                let s = s.into();
                let trimmed = s.trim();
                if trimmed.is_empty() {
                    return Err(Error::domain(concat!($what, " must be non-empty")));
                }
                Ok($name(trimmed.to_owned()))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl TryFrom<String> for $name {
            type Error = Error;
            fn try_from(s: String) -> Result<Self> {
                $name::new(s)
            }
        }

        impl From<$name> for String {
            fn from(id: $name) -> String {
                id.0
            }
        }

        impl FromStr for $name {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                $name::new(s)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.pad(&self.0)
            }
        }

        impl std::borrow::Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

string_id!(
    /// Operator name. The registry is open; [`hyperscalers`] lists the six shipped firms.
    FirmId,
    "firm id"
);
string_id!(
    /// Opaque site key, e.g. a campus name.
    LocationId,
    "location id"
);
string_id!(
    /// Grid region key: a U.S. state or a host country.
    RegionId,
    "region id"
);

/// Static metadata for one of the shipped operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirmProfile {
    pub name: &'static str,
    pub infrastructure: &'static str,
    /// Indicative market-share band as fractions.
    pub market_share: (f64, f64),
}

const HYPERSCALERS: [FirmProfile; 6] = [
    FirmProfile {
        name: "Amazon",
        infrastructure: "32 cloud regions, 102 availability zones",
        market_share: (0.30, 0.31),
    },
    FirmProfile {
        name: "Microsoft",
        infrastructure: "62 regions, 120 availability zones, 200+ data centers",
        market_share: (0.20, 0.20),
    },
    FirmProfile {
        name: "Google",
        infrastructure: "39 regions, 118 availability zones, 35 owned centers",
        market_share: (0.13, 0.13),
    },
    FirmProfile {
        name: "Meta",
        infrastructure: "24 data-center campuses",
        market_share: (0.04, 0.06),
    },
    FirmProfile {
        name: "Oracle",
        infrastructure: "46 regions, 56 availability zones",
        market_share: (0.03, 0.04),
    },
    FirmProfile {
        name: "Apple",
        infrastructure: "~20 data centers (U.S., Europe)",
        market_share: (0.0, 0.02),
    },
];

pub fn hyperscalers() -> &'static [FirmProfile] {
    &HYPERSCALERS
}

/// Total mapping from locations to regions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionMap(BTreeMap<LocationId, RegionId>);

impl RegionMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a mapping. Re-inserting the same pair is a no-op; a conflicting
    /// region for a known location is an error.
    pub fn insert(&mut self, location: LocationId, region: RegionId) -> Result<()> {
        match self.0.get(&location) {
            Some(existing) if *existing != region => Err(Error::DuplicateKey(format!(
                "location '{location}' mapped to both '{existing}' and '{region}'"
            ))),
            Some(_) => Ok(()),
            None => {
                self.0.insert(location, region);
                Ok(())
            }
        }
    }

    pub fn region_of(&self, location: &LocationId) -> Option<&RegionId> {
        self.0.get(location)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LocationId, &RegionId)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(LocationId, RegionId)> for RegionMap {
    fn from_iter<I: IntoIterator<Item = (LocationId, RegionId)>>(iter: I) -> Self {
        RegionMap(iter.into_iter().collect())
    }
}

fn default_hours() -> f64 {
    HOURS_PER_YEAR
}

/// Fleet and operating parameters of one site.
///
/// Power is per accelerator in kW, hours are per accelerator per year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineParams {
    pub n_train: u64,
    pub n_inference: u64,
    pub p_avg_train: f64,
    pub p_avg_inference: f64,
    pub u_train: f64,
    pub u_inference: f64,
    #[serde(default = "default_hours")]
    pub h_train: f64,
    #[serde(default = "default_hours")]
    pub h_inference: f64,
    pub pue: f64,
}

impl BaselineParams {
    /// Parameters for an annual period, hours defaulted to 8760.
    pub fn annual(
        n_train: u64,
        p_avg_train: f64,
        u_train: f64,
        n_inference: u64,
        p_avg_inference: f64,
        u_inference: f64,
        pue: f64,
    ) -> Self {
        BaselineParams {
            n_train,
            n_inference,
            p_avg_train,
            p_avg_inference,
            u_train,
            u_inference,
            h_train: HOURS_PER_YEAR,
            h_inference: HOURS_PER_YEAR,
            pue,
        }
    }

    /// Every invariant violation, empty when the parameters are usable.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, v) in [
            ("p_avg_train", self.p_avg_train),
            ("p_avg_inference", self.p_avg_inference),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                out.push(format!("{name} must be a non-negative power, got {v}"));
            }
        }
        for (name, v) in [("u_train", self.u_train), ("u_inference", self.u_inference)] {
            if !(0.0..=1.0).contains(&v) {
                out.push(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        for (name, v) in [("h_train", self.h_train), ("h_inference", self.h_inference)] {
            if !(0.0..=MAX_HOURS_PER_YEAR).contains(&v) {
                out.push(format!(
                    "{name} must lie in [0, {MAX_HOURS_PER_YEAR}] hours, got {v}"
                ));
            }
        }
        if !(self.pue.is_finite() && self.pue >= 1.0) {
            out.push(format!("pue must be >= 1.0, got {}", self.pue));
        }
        out
    }

    pub fn check(&self) -> Result<()> {
        match self.problems().into_iter().next() {
            Some(p) => Err(Error::Domain(p)),
            None => Ok(()),
        }
    }

    /// Soft warnings that never reject the parameters.
    pub fn advisories(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.n_inference > 0 && !(0.2..=0.4).contains(&self.u_inference) {
            out.push(format!(
                "inference utilization {} outside the typical 0.2-0.4 band",
                self.u_inference
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioId {
    Conservative,
    Neutral,
    Optimistic,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 3] = [
        ScenarioId::Conservative,
        ScenarioId::Neutral,
        ScenarioId::Optimistic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioId::Conservative => "conservative",
            ScenarioId::Neutral => "neutral",
            ScenarioId::Optimistic => "optimistic",
        }
    }

    /// Canonical annual growth of new AI load.
    pub fn canonical_g_new(self) -> f64 {
        match self {
            ScenarioId::Conservative => 0.15,
            ScenarioId::Neutral => 0.25,
            ScenarioId::Optimistic => 0.35,
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for ScenarioId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "conservative" => Ok(ScenarioId::Conservative),
            "neutral" => Ok(ScenarioId::Neutral),
            "optimistic" => Ok(ScenarioId::Optimistic),
            other => Err(Error::Missing {
                kind: "scenario",
                key: other.to_owned(),
            }),
        }
    }
}

/// Annual growth of existing stock consumption, identical across scenarios.
pub const CANONICAL_G_STOCK: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: ScenarioId,
    pub g_new: f64,
    pub g_stock: f64,
}

impl Scenario {
    pub fn new(id: ScenarioId, g_new: f64, g_stock: f64) -> Result<Self> {
        for (name, g) in [("g_new", g_new), ("g_stock", g_stock)] {
            if !(g.is_finite() && g > -1.0) {
                return Err(Error::domain(format!("{name} must exceed -1, got {g}")));
            }
        }
        Ok(Scenario { id, g_new, g_stock })
    }

    pub fn canonical(id: ScenarioId) -> Self {
        Scenario {
            id,
            g_new: id.canonical_g_new(),
            g_stock: CANONICAL_G_STOCK,
        }
    }
}

/// Stepwise AI share of new-site load: `p1` in the first forecast year,
/// `p2` for the next two years, `p3` from then on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AiShareSchedule {
    pub firm: FirmId,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl AiShareSchedule {
    pub fn new(firm: FirmId, p1: f64, p2: f64, p3: f64) -> Result<Self> {
        let s = AiShareSchedule { firm, p1, p2, p3 };
        match s.violations().into_iter().next() {
            Some(v) => Err(Error::Domain(v.to_string())),
            None => Ok(s),
        }
    }

    /// Published schedule for one of the six shipped firms.
    pub fn published(firm: &FirmId) -> Option<Self> {
        let (p1, p2, p3) = match firm.as_str() {
            "Amazon" => (0.30, 0.40, 0.60),
            "Apple" => (0.25, 0.30, 0.35),
            "Google" => (0.35, 0.40, 0.60),
            "Meta" => (0.35, 0.50, 0.60),
            "Microsoft" => (0.35, 0.45, 0.60),
            "Oracle" => (0.25, 0.35, 0.50),
            _ => return None,
        };
        Some(AiShareSchedule {
            firm: firm.clone(),
            p1,
            p2,
            p3,
        })
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (phase, v) in [("p1", self.p1), ("p2", self.p2), ("p3", self.p3)] {
            if !(v > 0.0 && v <= 1.0) {
                out.push(Violation::ShareOutOfRange {
                    firm: self.firm.clone(),
                    phase,
                    value: v,
                });
            }
        }
        if self.p2 < self.p1 || self.p3 < self.p2 {
            out.push(Violation::NonMonotoneAiShare {
                firm: self.firm.clone(),
            });
        }
        out
    }
}

/// One year of a firm trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YearPoint {
    pub e_stock: Energy,
    pub e_ai_new: Energy,
    pub e_new: Energy,
    pub e_tot: Energy,
}

impl YearPoint {
    /// New-site load not attributed to AI.
    pub fn e_nonai_new(&self) -> Energy {
        self.e_new - self.e_ai_new
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirmTrajectory {
    pub firm: FirmId,
    pub scenario: ScenarioId,
    pub series: BTreeMap<i32, YearPoint>,
}

impl FirmTrajectory {
    pub fn at(&self, year: i32) -> Option<&YearPoint> {
        self.series.get(&year)
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.series.keys().copied()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub year: i32,
    pub scenario: ScenarioId,
    pub paths: Vec<Energy>,
    pub mean: Energy,
    pub min: Energy,
    pub max: Energy,
}

/// Sentiment and relevance distilled from text about one firm and region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SitingEvidence {
    pub firm: FirmId,
    pub region: RegionId,
    /// Tone in [-1, 1].
    pub sentiment: f64,
    /// Retrieval relevance in [0, 1].
    pub relevance: f64,
    /// Evidence variant; paths select among variants.
    pub variant: String,
}

pub const DEFAULT_VARIANT: &str = "base";

impl SitingEvidence {
    pub fn new(firm: FirmId, region: RegionId, sentiment: f64, relevance: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&sentiment) {
            return Err(Error::domain(format!(
                "sentiment must lie in [-1, 1], got {sentiment}"
            )));
        }
        if !(0.0..=1.0).contains(&relevance) {
            return Err(Error::domain(format!(
                "relevance must lie in [0, 1], got {relevance}"
            )));
        }
        Ok(SitingEvidence {
            firm,
            region,
            sentiment,
            relevance,
            variant: DEFAULT_VARIANT.to_owned(),
        })
    }

    pub fn with_variant(mut self, variant: impl Into<String>) -> Self {
        self.variant = variant.into();
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Ai,
    Historical,
}

/// Normalized location weights for one firm (and year, for AI weights).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationWeights {
    pub kind: WeightKind,
    pub firm: FirmId,
    pub year: Option<i32>,
    pub weights: BTreeMap<LocationId, f64>,
}

impl AllocationWeights {
    pub fn get(&self, location: &LocationId) -> f64 {
        self.weights.get(location).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.weights.values().sum()
    }
}

/// End-2024 footprint of one firm at one location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteInventory {
    pub firm: FirmId,
    pub location: LocationId,
    pub site_count: u64,
    /// Modelled AI energy at the location, when known.
    pub e_ai_loc: Option<Energy>,
}

/// Regional net-generation history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupplySeries {
    pub region: RegionId,
    pub history: BTreeMap<i32, Energy>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StressBand {
    Low,
    Elevated,
    High,
    Extreme,
}

pub const ELEVATED_THRESHOLD: f64 = 0.10;
pub const HIGH_THRESHOLD: f64 = 0.25;
pub const EXTREME_THRESHOLD: f64 = 0.40;

impl StressBand {
    /// Bands are left-closed: 0.25 is `High`.
    pub fn classify(psi: f64) -> Self {
        if psi >= EXTREME_THRESHOLD {
            StressBand::Extreme
        } else if psi >= HIGH_THRESHOLD {
            StressBand::High
        } else if psi >= ELEVATED_THRESHOLD {
            StressBand::Elevated
        } else {
            StressBand::Low
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StressBand::Low => "low",
            StressBand::Elevated => "elevated",
            StressBand::High => "high",
            StressBand::Extreme => "extreme",
        }
    }
}

impl fmt::Display for StressBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for StressBand {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "low" => Ok(StressBand::Low),
            "elevated" => Ok(StressBand::Elevated),
            "high" => Ok(StressBand::High),
            "extreme" => Ok(StressBand::Extreme),
            other => Err(Error::Missing {
                kind: "stress band",
                key: other.to_owned(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiRecord {
    pub region: RegionId,
    pub year: i32,
    pub e_dc: Energy,
    pub e_supply: Energy,
    pub psi: f64,
    pub band: StressBand,
}

/// A semantic problem found in an otherwise parseable dataset.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    UnmappedLocation {
        firm: FirmId,
        location: LocationId,
    },
    ShareOutOfRange {
        firm: FirmId,
        phase: &'static str,
        value: f64,
    },
    NonMonotoneAiShare {
        firm: FirmId,
    },
    MissingFirm {
        firm: FirmId,
        missing_from: &'static str,
    },
    DuplicateFirm {
        firm: FirmId,
    },
    InvalidValue {
        subject: String,
        message: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnmappedLocation { firm, location } => {
                write!(f, "unmapped location '{location}' (firm {firm})")
            }
            Violation::ShareOutOfRange { firm, phase, value } => {
                write!(f, "AI share {phase} = {value} for {firm} outside (0, 1]")
            }
            Violation::NonMonotoneAiShare { firm } => {
                write!(f, "non-monotone AI share schedule for {firm}")
            }
            Violation::MissingFirm { firm, missing_from } => {
                write!(f, "missing firm {firm} in {missing_from}")
            }
            Violation::DuplicateFirm { firm } => write!(f, "duplicate schedule for {firm}"),
            Violation::InvalidValue { subject, message } => write!(f, "{subject}: {message}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Non-fatal observations (clamped values, advisory bands).
    pub advisories: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
        self.advisories.extend(other.advisories);
    }
}

/// Semantic checks across an inventory, its region map and the AI-share
/// schedules. Problems are collected rather than raised.
pub fn validate_dataset(
    inventory: &[SiteInventory],
    region_map: &RegionMap,
    schedules: &[AiShareSchedule],
) -> ValidationReport {
    let mut report = ValidationReport::default();

    for site in inventory {
        if region_map.region_of(&site.location).is_none() {
            report.violations.push(Violation::UnmappedLocation {
                firm: site.firm.clone(),
                location: site.location.clone(),
            });
        }
        if let Some(e) = site.e_ai_loc {
            if !(e.is_finite() && e >= Energy::ZERO) {
                report.violations.push(Violation::InvalidValue {
                    subject: format!("{}/{}", site.firm, site.location),
                    message: format!("e_ai_loc must be non-negative, got {e}"),
                });
            }
        }
    }

    let mut scheduled = BTreeSet::new();
    for s in schedules {
        if !scheduled.insert(&s.firm) {
            report.violations.push(Violation::DuplicateFirm {
                firm: s.firm.clone(),
            });
        }
        report.violations.extend(s.violations());
    }

    let inventory_firms: BTreeSet<&FirmId> = inventory.iter().map(|s| &s.firm).collect();
    for firm in &inventory_firms {
        if !scheduled.contains(firm) {
            report.violations.push(Violation::MissingFirm {
                firm: (*firm).clone(),
                missing_from: "schedules",
            });
        }
    }
    for firm in &scheduled {
        if !inventory_firms.contains(firm) {
            report.violations.push(Violation::MissingFirm {
                firm: (*firm).clone(),
                missing_from: "inventory",
            });
        }
    }
    report
}
