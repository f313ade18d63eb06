mod common;

use std::fs;

use approx::assert_relative_eq;

use common::{copy_fixture, edit, fixture};
use nexus::output::{parse_csv, trajectories_from_rows, Format, TrajectoryRow};
use nexus::pipeline::{compute, prepare, run_pipeline, RunOptions, Through};
use nexus::{Error, RegionId, RunConfig, ScenarioId, Stage, StressBand};

fn load(name: &str) -> RunConfig {
    RunConfig::load(&fixture(name).join("config.toml")).unwrap()
}

#[test]
fn frozen_world_stays_flat() {
    let cfg = load("toy");
    let (inputs, report) = prepare(&cfg).unwrap();
    assert!(report.is_valid(), "{:?}", report.violations);
    let run = compute(&cfg, &inputs, Through::Psi, &RunOptions::default()).unwrap();
    for t in &run.forecast.trajectories {
        for p in t.series.values() {
            assert_relative_eq!(p.e_tot.twh(), 2.0, max_relative = 1e-12);
        }
    }
    let report = &run.psi.unwrap().reports[&ScenarioId::Neutral];
    assert_eq!(report.ranked.len(), 1);
    let r = &report.ranked[0].record;
    assert_eq!(r.region, RegionId::new("valley").unwrap());
    assert_relative_eq!(r.psi, 0.2, max_relative = 1e-12);
    assert_eq!(r.band, StressBand::Elevated);
}

#[test]
fn regional_demand_conserves_firm_totals() {
    let cfg = load("six_firm");
    let (inputs, _) = prepare(&cfg).unwrap();
    let run = compute(&cfg, &inputs, Through::Allocate, &RunOptions::default()).unwrap();
    let alloc = run.allocation.unwrap();
    assert!(alloc.max_residual < 1e-9);
    assert_eq!(alloc.checks, 3 * cfg.paths * 7);
    for e in &run.forecast.ensembles {
        let regional: f64 = alloc
            .regional_mean(e.scenario, e.year)
            .values()
            .map(|v| v.twh())
            .sum();
        assert_relative_eq!(regional, e.mean.twh(), max_relative = 1e-9);
    }
}

#[test]
fn constrained_paths_widen_regional_bands() {
    let cfg = load("six_firm");
    let (inputs, _) = prepare(&cfg).unwrap();
    let run = compute(&cfg, &inputs, Through::Allocate, &RunOptions::default()).unwrap();
    let alloc = run.allocation.unwrap();
    let ireland = RegionId::new("ireland").unwrap();
    let d = alloc
        .demand
        .iter()
        .find(|d| d.scenario == ScenarioId::Neutral && d.year == 2030 && d.region == ireland)
        .unwrap();
    assert!(d.min < d.mean && d.mean < d.max);
    // siting moves load between regions, never the global total
    let global = run
        .forecast
        .ensembles
        .iter()
        .find(|e| e.year == 2030)
        .unwrap();
    assert_eq!(global.min, global.max);
}

#[test]
fn uncovered_regions_are_reported_not_dropped() {
    let cfg = load("six_firm");
    let (inputs, _) = prepare(&cfg).unwrap();
    let run = compute(&cfg, &inputs, Through::Psi, &RunOptions::default()).unwrap();
    let stage = run.psi.unwrap();
    let names: Vec<String> = stage
        .validation
        .uncovered_regions
        .iter()
        .map(|u| u.region.to_string())
        .collect();
    assert_eq!(names, ["taiwan"]);
    assert!(stage.reports[&ScenarioId::Neutral]
        .ranked
        .iter()
        .all(|r| r.record.region.to_string() != "taiwan"));
}

#[test]
fn written_trajectories_parse_back() {
    let cfg = load("six_firm");
    let out = tempfile::tempdir().unwrap();
    let (run, _) =
        run_pipeline(&cfg, Through::Forecast, &RunOptions::default(), out.path()).unwrap();
    let rows: Vec<TrajectoryRow> =
        parse_csv(fs::File::open(out.path().join("firm_trajectories.csv")).unwrap()).unwrap();
    let back = trajectories_from_rows(&rows);
    assert_eq!(back.len(), run.forecast.trajectories.len());
    for t in &run.forecast.trajectories {
        let b = back
            .iter()
            .find(|b| b.firm == t.firm && b.scenario == t.scenario)
            .unwrap();
        for (y, p) in &t.series {
            assert_relative_eq!(
                b.at(*y).unwrap().e_tot.twh(),
                p.e_tot.twh(),
                max_relative = 1e-5
            );
        }
    }
}

#[test]
fn invalid_dataset_is_rejected_before_compute() {
    let dir = tempfile::tempdir().unwrap();
    let path = copy_fixture("toy", dir.path());
    edit(
        &path,
        "schedule = [0.5, 0.5, 0.5]",
        "schedule = [0.0, 0.5, 0.5]",
    );
    let cfg = RunConfig::load(&path).unwrap();
    let out = dir.path().join("out");
    let err = run_pipeline(&cfg, Through::Psi, &RunOptions::default(), &out).unwrap_err();
    assert!(
        matches!(
            err,
            Error::Stage {
                stage: Stage::Validate,
                ..
            }
        ),
        "{err}"
    );
    assert!(!out.exists());
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let cfg = load("toy");
    let opts = RunOptions {
        format: Format::Json,
        ..Default::default()
    };
    let err = run_pipeline(&cfg, Through::Forecast, &opts, &blocker.join("out")).unwrap_err();
    assert!(err.is_io(), "{err}");
}

#[test]
fn psi_year_option_moves_the_report() {
    let cfg = load("six_firm");
    let (inputs, _) = prepare(&cfg).unwrap();
    let opts = RunOptions {
        year: Some(2027),
        ..Default::default()
    };
    let run = compute(&cfg, &inputs, Through::Psi, &opts).unwrap();
    let stage = run.psi.unwrap();
    assert_eq!(stage.validation.psi_year, 2027);
    assert!(stage.reports.values().all(|r| r.year == 2027));
}
