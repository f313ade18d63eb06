//! End-to-end orchestration: ingest, validate, forecast, allocate, stress
//! index, and output emission.
//!
//! Every stage is computed in memory before anything is written, so a
//! failing stage leaves no partial output behind. Work units are reduced in
//! sorted key order, which keeps outputs byte-identical across runs.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::domain::{
    validate_dataset, AllocationWeights, EnsembleResult, FirmId, FirmTrajectory, LocationId,
    RegionId, RegionMap, ScenarioId, SiteInventory, SitingEvidence, SupplySeries, ValidationReport,
    Violation, WeightKind, ANCHOR_YEAR,
};
use crate::energy::SiteModel;
use crate::error::{Error, Result, Stage, StageExt};
use crate::io::{self, round_sig};
use crate::output::{
    render, to_json, EnsembleRow, EnvelopeRow, Format, PsiRow, RegionalRow, TrajectoryRow,
};
use crate::psi::{self, psi_report, PsiReport, Uncovered};
use crate::scenario::{ensemble_aggregate, global_totals, project_firm, PathTotals};
use crate::siting::{
    ai_weights, allocate_regional, expansion_probabilities, hist_weights, regional_totals,
    select_sites,
};
use crate::units::{relative_diff, Energy};

/// Relative tolerance of the allocation conservation check.
pub const CONSERVATION_TOLERANCE: f64 = 1e-9;

/// How far a run proceeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Through {
    Forecast,
    Allocate,
    Psi,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub scenario: Option<ScenarioId>,
    /// Report year; also filters the forecast and allocation tables.
    pub year: Option<i32>,
    pub format: Format,
}

/// Everything read from disk for one run.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub inventory: Vec<SiteInventory>,
    pub region_map: RegionMap,
    pub supply: Option<BTreeMap<RegionId, SupplySeries>>,
    pub evidence: Vec<SitingEvidence>,
    pub sites: BTreeMap<(FirmId, LocationId), SiteModel>,
    pub warnings: Vec<String>,
}

impl Inputs {
    pub fn load(cfg: &RunConfig) -> Result<Self> {
        let inventory = io::ingest_inventory(&cfg.resolve(&cfg.inputs.inventory))?;
        let region_map = io::ingest_region_map(&cfg.resolve(&cfg.inputs.region_map))?;
        let mut warnings = Vec::new();
        let supply = match &cfg.inputs.supply {
            Some(p) => {
                let got = io::ingest_supply(&cfg.resolve(p))?;
                warnings.extend(got.warnings);
                Some(got.records)
            }
            None => None,
        };
        let mut evidence = Vec::new();
        for p in &cfg.inputs.evidence {
            let got = io::ingest_evidence(&cfg.resolve(p))?;
            warnings.extend(got.warnings);
            evidence.extend(got.records);
        }
        let mut sites = BTreeMap::new();
        for s in &cfg.sites {
            let key = (s.firm.clone(), s.location.clone());
            if sites.insert(key, s.model()?).is_some() {
                return Err(Error::DuplicateKey(format!(
                    "site {}/{} configured twice",
                    s.firm, s.location
                )));
            }
        }
        Ok(Inputs {
            inventory,
            region_map,
            supply,
            evidence,
            sites,
            warnings,
        })
    }
}

/// Dataset and configuration checks; violations are collected, not raised.
pub fn validate(cfg: &RunConfig, inputs: &Inputs) -> ValidationReport {
    let mut report = cfg.check();
    let (schedules, _) = cfg.schedules();
    report.merge(validate_dataset(
        &inputs.inventory,
        &inputs.region_map,
        &schedules,
    ));
    for (firm, location) in inputs.sites.keys() {
        if inputs.region_map.region_of(location).is_none() {
            report.violations.push(Violation::UnmappedLocation {
                firm: firm.clone(),
                location: location.clone(),
            });
        }
        if !cfg.firms.contains_key(firm) {
            report.violations.push(Violation::MissingFirm {
                firm: firm.clone(),
                missing_from: "firms",
            });
        }
    }
    let known: BTreeSet<&FirmId> = cfg.firms.keys().collect();
    for firm in inputs
        .evidence
        .iter()
        .map(|e| &e.firm)
        .collect::<BTreeSet<_>>()
    {
        if !known.contains(firm) {
            report
                .advisories
                .push(format!("evidence for unconfigured firm {firm} is ignored"));
        }
    }
    for v in &cfg.siting.path_variants {
        if !inputs.evidence.iter().any(|e| &e.variant == v) {
            report.violations.push(Violation::InvalidValue {
                subject: "siting.path_variants".to_owned(),
                message: format!("variant '{v}' has no evidence records"),
            });
        }
    }
    report.advisories.extend(inputs.warnings.iter().cloned());
    report
}

/// Ingests and validates. Violations are returned in the report, not raised.
pub fn prepare(cfg: &RunConfig) -> Result<(Inputs, ValidationReport)> {
    let inputs = Inputs::load(cfg).stage(Stage::Ingest)?;
    let report = validate(cfg, &inputs);
    Ok((inputs, report))
}

#[derive(Debug, Clone, Serialize)]
pub struct Forecast {
    pub trajectories: Vec<FirmTrajectory>,
    pub ensembles: Vec<EnsembleResult>,
}

/// Path statistics of one region's demand.
#[derive(Debug, Clone, Serialize)]
pub struct RegionalDemand {
    pub scenario: ScenarioId,
    pub year: i32,
    pub region: RegionId,
    pub mean: Energy,
    pub min: Energy,
    pub max: Energy,
}

#[derive(Debug, Clone, Serialize)]
pub struct Allocation {
    pub demand: Vec<RegionalDemand>,
    /// Largest relative gap between allocated and projected totals over all
    /// (scenario, path, year) units.
    pub max_residual: f64,
    pub checks: usize,
    /// Evidence variant used by each path.
    pub path_variants: Vec<Option<String>>,
    pub notes: Vec<String>,
}

impl Allocation {
    pub fn regional_mean(&self, scenario: ScenarioId, year: i32) -> BTreeMap<RegionId, Energy> {
        self.demand
            .iter()
            .filter(|d| d.scenario == scenario && d.year == year)
            .map(|d| (d.region.clone(), d.mean))
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossCheckSummary {
    pub global_twh: f64,
    pub hyperscale_share: f64,
    pub top_firm_share: f64,
    pub implied_six_firm_twh: f64,
    pub reference_range_twh: [f64; 2],
    pub within_reference_range: bool,
    /// Lowest and highest scenario mean in the horizon year.
    pub model_range_twh: [f64; 2],
    pub within_model_range: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CagrCheck {
    pub label: String,
    pub start_year: i32,
    pub end_year: i32,
    pub start_twh: f64,
    pub end_twh: f64,
    pub cagr: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConservationSummary {
    pub max_relative_residual: f64,
    pub tolerance: f64,
    pub checks: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationSummary {
    pub psi_year: i32,
    pub anchor_total_twh: f64,
    pub crosscheck: CrossCheckSummary,
    pub cagr_checks: Vec<CagrCheck>,
    pub conservation: ConservationSummary,
    pub uncovered_regions: Vec<Uncovered>,
    pub advisories: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PsiStage {
    pub reports: BTreeMap<ScenarioId, PsiReport>,
    pub validation: ValidationSummary,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunArtifacts {
    pub forecast: Forecast,
    pub allocation: Option<Allocation>,
    pub psi: Option<PsiStage>,
}

pub fn forecast(cfg: &RunConfig, opts: &RunOptions) -> Result<Forecast> {
    let scenarios = cfg.scenarios.scenarios()?;
    let mut trajectories = Vec::new();
    let mut ensembles = Vec::new();
    for scenario in scenarios
        .iter()
        .filter(|s| opts.scenario.is_none_or(|id| id == s.id))
    {
        let mut per_scenario = Vec::new();
        for (firm, fc) in &cfg.firms {
            let schedule = cfg.schedule_for(firm).ok_or_else(|| Error::Missing {
                kind: "AI share schedule",
                key: firm.to_string(),
            })?;
            per_scenario.push(project_firm(
                firm,
                scenario,
                fc.anchors(),
                &schedule,
                cfg.horizon,
            )?);
        }
        // projections do not depend on siting, so every path shares one global total
        let totals = global_totals(&per_scenario);
        let paths = vec![totals; cfg.paths];
        ensembles.extend(ensemble_aggregate(scenario.id, &paths)?);
        trajectories.extend(per_scenario);
    }
    if trajectories.is_empty() {
        return Err(Error::Config(
            "no scenario selected; check --scenario against scenarios.ids".to_owned(),
        ));
    }
    Ok(Forecast {
        trajectories,
        ensembles,
    })
}

/// Candidate AI locations of a firm with their modelled energy in `year`.
/// Site models take precedence over inventory energies.
fn ai_site_energies(
    inputs: &Inputs,
    firm: &FirmId,
    year: i32,
) -> Result<BTreeMap<LocationId, Energy>> {
    let mut out = BTreeMap::new();
    for site in inputs.inventory.iter().filter(|s| &s.firm == firm) {
        if let Some(e) = site.e_ai_loc {
            out.insert(site.location.clone(), e);
        }
    }
    for ((f, loc), model) in &inputs.sites {
        if f == firm {
            out.insert(loc.clone(), model.energy_in(year)?.e_dc);
        }
    }
    Ok(out)
}

pub fn allocate(cfg: &RunConfig, inputs: &Inputs, fc: &Forecast) -> Result<Allocation> {
    let mut notes = Vec::new();
    let variants: BTreeSet<String> = inputs.evidence.iter().map(|e| e.variant.clone()).collect();
    let path_variants: Vec<Option<String>> = (0..cfg.paths)
        .map(|p| cfg.variant_for_path(p, &variants))
        .collect();

    let firms: BTreeSet<&FirmId> = fc.trajectories.iter().map(|t| &t.firm).collect();
    let mut w_hist = BTreeMap::new();
    for &firm in &firms {
        w_hist.insert(firm.clone(), hist_weights(&inputs.inventory, firm)?);
    }

    // expansion probabilities per (firm, variant), feeding site selection
    let mut selection: BTreeMap<(FirmId, Option<String>), Option<BTreeSet<LocationId>>> =
        BTreeMap::new();
    for &firm in &firms {
        let candidates: BTreeSet<LocationId> = ai_site_energies(inputs, firm, ANCHOR_YEAR)?
            .into_keys()
            .collect();
        for variant in path_variants.iter().collect::<BTreeSet<_>>() {
            let chosen = if candidates.is_empty() {
                None
            } else {
                let evidence: Vec<SitingEvidence> = inputs
                    .evidence
                    .iter()
                    .filter(|e| &e.firm == firm && Some(&e.variant) == variant.as_ref())
                    .cloned()
                    .collect();
                Some(if evidence.is_empty() {
                    candidates.clone()
                } else {
                    let probs = expansion_probabilities(&evidence)?;
                    select_sites(
                        &candidates,
                        &probs,
                        &inputs.region_map,
                        cfg.siting.selection_threshold,
                    )
                })
            };
            selection.insert((firm.clone(), variant.clone()), chosen);
        }
        if candidates.is_empty() {
            notes.push(format!(
                "{firm}: no AI siting energies; new AI load follows historical weights"
            ));
        }
    }

    let by_scenario: BTreeMap<ScenarioId, Vec<&FirmTrajectory>> =
        fc.trajectories.iter().fold(BTreeMap::new(), |mut m, t| {
            m.entry(t.scenario).or_insert_with(Vec::new).push(t);
            m
        });

    let mut demand = Vec::new();
    let mut max_residual: f64 = 0.0;
    let mut checks = 0;
    for (&scenario, trajectories) in &by_scenario {
        let years: Vec<i32> = trajectories[0].years().collect();
        // region -> one PathTotals per path
        let mut per_region: BTreeMap<RegionId, Vec<PathTotals>> = BTreeMap::new();
        let mut path_maps: Vec<BTreeMap<i32, BTreeMap<RegionId, Energy>>> = Vec::new();
        for variant in &path_variants {
            let mut by_year = BTreeMap::new();
            for &year in &years {
                let mut per_firm = BTreeMap::new();
                for t in trajectories {
                    let hist = &w_hist[&t.firm];
                    let w_ai = match &selection[&(t.firm.clone(), variant.clone())] {
                        Some(chosen) => {
                            let energies = ai_site_energies(inputs, &t.firm, year)?;
                            ai_weights(
                                &t.firm,
                                year,
                                chosen.iter().map(|l| (l.clone(), energies[l])),
                            )?
                        }
                        None => AllocationWeights {
                            kind: WeightKind::Ai,
                            year: Some(year),
                            ..hist.clone()
                        },
                    };
                    per_firm.insert(
                        t.firm.clone(),
                        allocate_regional(t, year, &w_ai, hist, &inputs.region_map)?,
                    );
                }
                let regions = regional_totals(&per_firm);
                let allocated: Energy = regions.values().sum();
                let projected: Energy = trajectories
                    .iter()
                    .map(|t| t.at(year).map_or(Energy::ZERO, |p| p.e_tot))
                    .sum();
                max_residual = max_residual.max(relative_diff(allocated.mwh(), projected.mwh()));
                checks += 1;
                by_year.insert(year, regions);
            }
            path_maps.push(by_year);
        }
        let all_regions: BTreeSet<RegionId> = path_maps
            .iter()
            .flat_map(|m| m.values().flat_map(|r| r.keys().cloned()))
            .collect();
        for region in all_regions {
            let paths = path_maps
                .iter()
                .map(|m| {
                    m.iter()
                        .map(|(&y, r)| (y, r.get(&region).copied().unwrap_or(Energy::ZERO)))
                        .collect()
                })
                .collect();
            per_region.insert(region, paths);
        }
        for (region, paths) in per_region {
            for stats in ensemble_aggregate(scenario, &paths)? {
                demand.push(RegionalDemand {
                    scenario,
                    year: stats.year,
                    region: region.clone(),
                    mean: stats.mean,
                    min: stats.min,
                    max: stats.max,
                });
            }
        }
    }
    demand.sort_by(|a, b| (a.scenario, a.year, &a.region).cmp(&(b.scenario, b.year, &b.region)));

    if max_residual > CONSERVATION_TOLERANCE {
        return Err(Error::domain(format!(
            "allocation does not conserve energy: relative residual {max_residual:e}"
        )));
    }
    Ok(Allocation {
        demand,
        max_residual,
        checks,
        path_variants,
        notes,
    })
}

pub fn stress(
    cfg: &RunConfig,
    inputs: &Inputs,
    fc: &Forecast,
    alloc: &Allocation,
    year: i32,
) -> Result<PsiStage> {
    let supply = inputs
        .supply
        .as_ref()
        .ok_or_else(|| Error::Config("supply data required (set inputs.supply)".to_owned()))?;
    if !(ANCHOR_YEAR..=cfg.horizon).contains(&year) {
        return Err(Error::domain(format!(
            "report year {year} outside {ANCHOR_YEAR}..={}",
            cfg.horizon
        )));
    }
    let supply: BTreeMap<RegionId, SupplySeries> =
        if cfg.psi.cagr_start_year == psi::CAGR_START_YEAR {
            supply.clone()
        } else {
            // re-anchor the CAGR window by synthesizing the standard start year
            supply
                .iter()
                .map(|(r, s)| {
                    let mut s = s.clone();
                    if let Ok(g) = s.cagr_over(cfg.psi.cagr_start_year, ANCHOR_YEAR) {
                        if let Some(base) = s.value_at(ANCHOR_YEAR) {
                            let span = ANCHOR_YEAR - psi::CAGR_START_YEAR;
                            s.history
                                .insert(psi::CAGR_START_YEAR, base / (1.0 + g).powi(span));
                        }
                    }
                    (r.clone(), s)
                })
                .collect()
        };

    let mut reports = BTreeMap::new();
    let mut uncovered: BTreeMap<RegionId, Uncovered> = BTreeMap::new();
    let scenarios: BTreeSet<ScenarioId> = fc.trajectories.iter().map(|t| t.scenario).collect();
    for scenario in scenarios {
        let demand = alloc.regional_mean(scenario, year);
        let report = psi_report(&demand, &supply, year, cfg.psi.quantiles)?;
        for u in &report.uncovered {
            uncovered
                .entry(u.region.clone())
                .or_insert_with(|| u.clone());
        }
        reports.insert(scenario, report);
    }

    let cc = &cfg.crosscheck;
    let implied =
        psi::cross_validate_global(cc.global_twh, cc.hyperscale_share, cc.top_firm_share)?;
    let horizon_means: Vec<&EnsembleResult> = fc
        .ensembles
        .iter()
        .filter(|e| e.year == cfg.horizon)
        .collect();
    let lo = horizon_means
        .iter()
        .map(|e| e.mean.twh())
        .fold(f64::INFINITY, f64::min);
    let hi = horizon_means
        .iter()
        .map(|e| e.mean.twh())
        .fold(f64::NEG_INFINITY, f64::max);

    let anchor_total = fc
        .ensembles
        .iter()
        .find(|e| e.year == ANCHOR_YEAR)
        .map_or(0.0, |e| e.mean.twh());
    let span = (cfg.horizon - ANCHOR_YEAR) as u32;
    let mut cagr_checks = Vec::new();
    for e in &horizon_means {
        cagr_checks.push(CagrCheck {
            label: e.scenario.to_string(),
            start_year: ANCHOR_YEAR,
            end_year: cfg.horizon,
            start_twh: round_sig(anchor_total),
            end_twh: round_sig(e.mean.twh()),
            cagr: round_sig(psi::cagr_from_endpoints(anchor_total, e.mean.twh(), span)?),
        });
    }
    for (label, end) in [
        ("reference_low", cc.reference_range[0]),
        ("reference_high", cc.reference_range[1]),
    ] {
        cagr_checks.push(CagrCheck {
            label: label.to_owned(),
            start_year: ANCHOR_YEAR,
            end_year: cfg.horizon,
            start_twh: cc.reference_anchor_twh,
            end_twh: end,
            cagr: round_sig(psi::cagr_from_endpoints(
                cc.reference_anchor_twh,
                end,
                span,
            )?),
        });
    }

    let validation = ValidationSummary {
        psi_year: year,
        anchor_total_twh: round_sig(anchor_total),
        crosscheck: CrossCheckSummary {
            global_twh: cc.global_twh,
            hyperscale_share: cc.hyperscale_share,
            top_firm_share: cc.top_firm_share,
            implied_six_firm_twh: round_sig(implied),
            reference_range_twh: cc.reference_range,
            within_reference_range: psi::within(
                implied,
                cc.reference_range[0],
                cc.reference_range[1],
            ),
            model_range_twh: [round_sig(lo), round_sig(hi)],
            within_model_range: psi::within(implied, lo, hi),
        },
        cagr_checks,
        conservation: ConservationSummary {
            max_relative_residual: round_sig(alloc.max_residual),
            tolerance: CONSERVATION_TOLERANCE,
            checks: alloc.checks,
            passed: alloc.max_residual <= CONSERVATION_TOLERANCE,
        },
        uncovered_regions: uncovered.into_values().collect(),
        advisories: alloc.notes.clone(),
    };
    Ok(PsiStage {
        reports,
        validation,
    })
}

/// Runs the stages up to `through` without touching the filesystem beyond
/// reading inputs.
pub fn compute(
    cfg: &RunConfig,
    inputs: &Inputs,
    through: Through,
    opts: &RunOptions,
) -> Result<RunArtifacts> {
    let fc = forecast(cfg, opts).stage(Stage::Forecast)?;
    let allocation = if through >= Through::Allocate {
        Some(allocate(cfg, inputs, &fc).stage(Stage::Allocate)?)
    } else {
        None
    };
    let psi = match (&allocation, through) {
        (Some(alloc), Through::Psi) => {
            let year = opts.year.unwrap_or_else(|| cfg.psi_year());
            let mut stage = stress(cfg, inputs, &fc, alloc, year).stage(Stage::Psi)?;
            stage
                .validation
                .advisories
                .extend(inputs.warnings.iter().cloned());
            Some(stage)
        }
        _ => None,
    };
    Ok(RunArtifacts {
        forecast: fc,
        allocation,
        psi,
    })
}

impl RunArtifacts {
    /// Output files as `(file name, bytes)`, in write order.
    pub fn render(&self, opts: &RunOptions) -> Result<Vec<(String, Vec<u8>)>> {
        let keep = |y: i32| opts.year.is_none_or(|want| want == y);
        let ext = opts.format.extension();
        let mut files = Vec::new();

        let traj: Vec<TrajectoryRow> = self
            .forecast
            .trajectories
            .iter()
            .flat_map(TrajectoryRow::from_trajectory)
            .filter(|r| keep(r.year))
            .collect();
        files.push((
            format!("firm_trajectories.{ext}"),
            render(&traj, opts.format)?,
        ));

        let ens: Vec<EnsembleRow> = self
            .forecast
            .ensembles
            .iter()
            .filter(|e| keep(e.year))
            .map(EnsembleRow::from)
            .collect();
        files.push((format!("global_ensemble.{ext}"), render(&ens, opts.format)?));

        if let Some(alloc) = &self.allocation {
            let rows: Vec<RegionalRow> = alloc
                .demand
                .iter()
                .filter(|d| keep(d.year))
                .map(|d| RegionalRow {
                    scenario: d.scenario,
                    year: d.year,
                    region: d.region.clone(),
                    demand_twh: round_sig(d.mean.twh()),
                    min_twh: round_sig(d.min.twh()),
                    max_twh: round_sig(d.max.twh()),
                })
                .collect();
            files.push((
                format!("regional_demand.{ext}"),
                render(&rows, opts.format)?,
            ));

            let mut envelope: BTreeMap<(i32, RegionId), (Energy, Energy, usize)> = BTreeMap::new();
            for d in alloc.demand.iter().filter(|d| keep(d.year)) {
                envelope
                    .entry((d.year, d.region.clone()))
                    .and_modify(|(lo, hi, n)| {
                        *lo = lo.min(d.mean);
                        *hi = hi.max(d.mean);
                        *n += 1;
                    })
                    .or_insert((d.mean, d.mean, 1));
            }
            let rows: Vec<EnvelopeRow> = envelope
                .into_iter()
                .map(|((year, region), (lo, hi, n))| EnvelopeRow {
                    year,
                    region,
                    min_twh: round_sig(lo.twh()),
                    max_twh: round_sig(hi.twh()),
                    scenarios: n,
                })
                .collect();
            files.push((
                format!("regional_envelope.{ext}"),
                render(&rows, opts.format)?,
            ));
        }

        if let Some(stage) = &self.psi {
            let rows: Vec<PsiRow> = stage
                .reports
                .iter()
                .flat_map(|(&s, r)| r.ranked.iter().map(move |rp| PsiRow::new(s, rp)))
                .collect();
            files.push((format!("psi_report.{ext}"), render(&rows, opts.format)?));
            files.push(("validation.json".to_owned(), to_json(&stage.validation)?));
        }
        Ok(files)
    }
}

/// Writes every file or none: on failure the files already written are removed.
pub fn write_files(out_dir: &Path, files: &[(String, Vec<u8>)]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    for (name, bytes) in files {
        let path = out_dir.join(name);
        if let Err(e) = fs::write(&path, bytes) {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            return Err(Error::io(path, e).at(Stage::Write));
        }
        written.push(path);
    }
    Ok(written)
}

/// Ingest, validate, compute through `through`, and write the outputs.
pub fn run_pipeline(
    cfg: &RunConfig,
    through: Through,
    opts: &RunOptions,
    out_dir: &Path,
) -> Result<(RunArtifacts, Vec<PathBuf>)> {
    let (inputs, report) = prepare(cfg)?;
    if !report.is_valid() {
        return Err(Error::Validation(report.violations.len()).at(Stage::Validate));
    }
    let artifacts = compute(cfg, &inputs, through, opts)?;
    let files = artifacts.render(opts).stage(Stage::Write)?;
    let written = write_files(out_dir, &files)?;
    Ok((artifacts, written))
}
