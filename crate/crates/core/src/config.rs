//! Run configuration, read from a single TOML file.
//!
//! Relative input paths resolve against the directory holding the config.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::domain::{
    AiShareSchedule, BaselineParams, FirmId, LocationId, Scenario, ScenarioId, ValidationReport,
    Violation, ANCHOR_YEAR, CANONICAL_G_STOCK, DEFAULT_HORIZON, FIRST_FORECAST_YEAR,
};
use crate::energy::{EvolutionRates, SiteModel};
use crate::error::{Error, Result};
use crate::psi::{
    CAGR_START_YEAR, DEFAULT_QUANTILES, HYPERSCALE_SHARE, IEA_GLOBAL_DC_2030_TWH, TOP_FIRM_SHARE,
};
use crate::scenario::FirmAnchors;

pub const DEFAULT_PATHS: usize = 10;

fn default_horizon() -> i32 {
    DEFAULT_HORIZON
}

fn default_paths() -> usize {
    DEFAULT_PATHS
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_horizon")]
    pub horizon: i32,
    /// Ensemble paths per scenario.
    #[serde(default = "default_paths")]
    pub paths: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    pub inputs: InputPaths,
    #[serde(default)]
    pub scenarios: ScenarioConfig,
    pub firms: BTreeMap<FirmId, FirmConfig>,
    #[serde(default)]
    pub siting: SitingConfig,
    #[serde(default)]
    pub sites: Vec<SiteConfig>,
    #[serde(default)]
    pub psi: PsiConfig,
    #[serde(default)]
    pub crosscheck: CrosscheckConfig,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputPaths {
    pub inventory: PathBuf,
    pub region_map: PathBuf,
    #[serde(default)]
    pub supply: Option<PathBuf>,
    /// Evidence files; records may carry a `variant` column.
    #[serde(default)]
    pub evidence: Vec<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "all_scenarios")]
    pub ids: Vec<ScenarioId>,
    #[serde(default = "canonical_g_stock")]
    pub g_stock: f64,
    /// Overrides of the canonical new-load growth per scenario.
    #[serde(default)]
    pub g_new: BTreeMap<ScenarioId, f64>,
}

fn all_scenarios() -> Vec<ScenarioId> {
    ScenarioId::ALL.to_vec()
}

fn canonical_g_stock() -> f64 {
    CANONICAL_G_STOCK
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            ids: all_scenarios(),
            g_stock: CANONICAL_G_STOCK,
            g_new: BTreeMap::new(),
        }
    }
}

impl ScenarioConfig {
    pub fn scenarios(&self) -> Result<Vec<Scenario>> {
        let ids: BTreeSet<ScenarioId> = self.ids.iter().copied().collect();
        ids.into_iter()
            .map(|id| {
                let g_new = self
                    .g_new
                    .get(&id)
                    .copied()
                    .unwrap_or_else(|| id.canonical_g_new());
                Scenario::new(id, g_new, self.g_stock)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FirmConfig {
    /// TWh.
    pub e_stock_2024: f64,
    /// TWh.
    pub e_ai_new_2024: f64,
    /// `[p1, p2, p3]`; the published schedule is used for the shipped firms
    /// when omitted.
    #[serde(default)]
    pub schedule: Option<[f64; 3]>,
}

impl FirmConfig {
    pub fn anchors(&self) -> FirmAnchors {
        FirmAnchors::from_twh(self.e_stock_2024, self.e_ai_new_2024)
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SitingConfig {
    /// Evidence variant per path, cycled when shorter than the path count.
    /// Defaults to the sorted variants found in the evidence files.
    #[serde(default)]
    pub path_variants: Vec<String>,
    /// Regions need expansion probability above this to receive new AI load.
    #[serde(default)]
    pub selection_threshold: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteConfig {
    pub firm: FirmId,
    pub location: LocationId,
    pub params: BaselineParams,
    #[serde(default)]
    pub evolution: EvolutionRates,
    /// PUE overrides keyed by year.
    #[serde(default)]
    pub pue_by_year: BTreeMap<String, f64>,
}

impl SiteConfig {
    pub fn model(&self) -> Result<SiteModel> {
        let mut model = SiteModel::new(self.params.clone(), self.evolution);
        for (year, &pue) in &self.pue_by_year {
            let year: i32 = year
                .parse()
                .map_err(|_| Error::Config(format!("pue_by_year key '{year}' is not a year")))?;
            model = model.with_pue(year, pue);
        }
        Ok(model)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiConfig {
    /// Report year; defaults to the horizon.
    #[serde(default)]
    pub year: Option<i32>,
    #[serde(default = "default_quantiles")]
    pub quantiles: usize,
    #[serde(default = "default_cagr_start")]
    pub cagr_start_year: i32,
}

fn default_quantiles() -> usize {
    DEFAULT_QUANTILES
}

fn default_cagr_start() -> i32 {
    CAGR_START_YEAR
}

impl Default for PsiConfig {
    fn default() -> Self {
        PsiConfig {
            year: None,
            quantiles: DEFAULT_QUANTILES,
            cagr_start_year: CAGR_START_YEAR,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrosscheckConfig {
    #[serde(default = "default_global")]
    pub global_twh: f64,
    #[serde(default = "default_hyperscale")]
    pub hyperscale_share: f64,
    #[serde(default = "default_top_firm")]
    pub top_firm_share: f64,
    /// Published six-firm range for the horizon year, TWh.
    #[serde(default = "default_reference_range")]
    pub reference_range: [f64; 2],
    /// Published anchor-year six-firm total, TWh.
    #[serde(default = "default_reference_anchor")]
    pub reference_anchor_twh: f64,
}

fn default_global() -> f64 {
    IEA_GLOBAL_DC_2030_TWH
}
fn default_hyperscale() -> f64 {
    HYPERSCALE_SHARE
}
fn default_top_firm() -> f64 {
    TOP_FIRM_SHARE
}
fn default_reference_range() -> [f64; 2] {
    [239.0, 295.0]
}
fn default_reference_anchor() -> f64 {
    118.0
}

impl Default for CrosscheckConfig {
    fn default() -> Self {
        CrosscheckConfig {
            global_twh: default_global(),
            hyperscale_share: default_hyperscale(),
            top_firm_share: default_top_firm(),
            reference_range: default_reference_range(),
            reference_anchor_twh: default_reference_anchor(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn psi_year(&self) -> i32 {
        self.psi.year.unwrap_or(self.horizon)
    }

    /// Schedule per configured firm, falling back to the published ones.
    pub fn schedules(&self) -> (Vec<AiShareSchedule>, Vec<Violation>) {
        let mut schedules = Vec::new();
        let mut missing = Vec::new();
        for (firm, fc) in &self.firms {
            match fc.schedule {
                Some([p1, p2, p3]) => schedules.push(AiShareSchedule {
                    firm: firm.clone(),
                    p1,
                    p2,
                    p3,
                }),
                None => match AiShareSchedule::published(firm) {
                    Some(s) => schedules.push(s),
                    None => missing.push(Violation::MissingFirm {
                        firm: firm.clone(),
                        missing_from: "schedules",
                    }),
                },
            }
        }
        (schedules, missing)
    }

    pub fn schedule_for(&self, firm: &FirmId) -> Option<AiShareSchedule> {
        let fc = self.firms.get(firm)?;
        match fc.schedule {
            Some([p1, p2, p3]) => Some(AiShareSchedule {
                firm: firm.clone(),
                p1,
                p2,
                p3,
            }),
            None => AiShareSchedule::published(firm),
        }
    }

    /// Evidence variant used by `path`, given the variants present in the data.
    pub fn variant_for_path(&self, path: usize, available: &BTreeSet<String>) -> Option<String> {
        if !self.siting.path_variants.is_empty() {
            let v = &self.siting.path_variants;
            return Some(v[path % v.len()].clone());
        }
        if available.is_empty() {
            return None;
        }
        available.iter().nth(path % available.len()).cloned()
    }

    /// Structural checks on the configuration itself.
    pub fn check(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let mut bad = |subject: &str, message: String| {
            report.violations.push(Violation::InvalidValue {
                subject: subject.to_owned(),
                message,
            })
        };
        if self.horizon < FIRST_FORECAST_YEAR {
            bad(
                "horizon",
                format!("must be >= {FIRST_FORECAST_YEAR}, got {}", self.horizon),
            );
        }
        if self.paths == 0 {
            bad("paths", "must be at least 1".to_owned());
        }
        if self.firms.is_empty() {
            bad("firms", "at least one firm is required".to_owned());
        }
        if let Err(e) = self.scenarios.scenarios() {
            bad("scenarios", e.to_string());
        }
        if self.scenarios.ids.is_empty() {
            bad(
                "scenarios.ids",
                "at least one scenario is required".to_owned(),
            );
        }
        for (firm, fc) in &self.firms {
            for (name, v) in [
                ("e_stock_2024", fc.e_stock_2024),
                ("e_ai_new_2024", fc.e_ai_new_2024),
            ] {
                if !(v.is_finite() && v >= 0.0) {
                    bad(
                        &format!("firms.{firm}.{name}"),
                        format!("must be >= 0, got {v}"),
                    );
                }
            }
        }
        let psi_year = self.psi_year();
        if psi_year < ANCHOR_YEAR || psi_year > self.horizon {
            bad(
                "psi.year",
                format!(
                    "must lie in [{ANCHOR_YEAR}, {}], got {psi_year}",
                    self.horizon
                ),
            );
        }
        if self.psi.quantiles == 0 {
            bad("psi.quantiles", "must be at least 1".to_owned());
        }
        if self.psi.cagr_start_year >= ANCHOR_YEAR {
            bad(
                "psi.cagr_start_year",
                format!(
                    "must precede {ANCHOR_YEAR}, got {}",
                    self.psi.cagr_start_year
                ),
            );
        }
        let cc = &self.crosscheck;
        if crate::psi::cross_validate_global(cc.global_twh, cc.hyperscale_share, cc.top_firm_share)
            .is_err()
        {
            bad(
                "crosscheck",
                "global_twh must be positive and shares in (0, 1]".to_owned(),
            );
        }
        for site in &self.sites {
            let subject = format!("sites.{}/{}", site.firm, site.location);
            for p in site.params.problems() {
                bad(&subject, p);
            }
            if let Err(e) = site.model() {
                bad(&subject, e.to_string());
            }
            for a in site.params.advisories() {
                report.advisories.push(format!("{subject}: {a}"));
            }
        }
        let (_, missing) = self.schedules();
        report.violations.extend(missing);
        report
    }
}
