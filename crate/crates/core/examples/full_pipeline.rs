//! Runs the whole pipeline on the shipped six-firm fixture, in memory, and
//! prints the headline numbers.

use std::path::Path;

use nexus::pipeline::{compute, prepare, RunOptions, Through};
use nexus::{RunConfig, ScenarioId};

pub fn run_example() -> anyhow::Result<()> {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/six_firm/config.toml");
    let cfg = RunConfig::load(&config)?;
    let (inputs, report) = prepare(&cfg)?;
    anyhow::ensure!(
        report.is_valid(),
        "fixture has {} violations",
        report.violations.len()
    );

    let run = compute(&cfg, &inputs, Through::Psi, &RunOptions::default())?;
    for e in run.forecast.ensembles.iter().filter(|e| e.year == 2030) {
        println!("{:<12} 2030: {:.2} TWh", e.scenario, e.mean.twh());
    }
    let stage = run.psi.expect("psi stage");
    let neutral = &stage.reports[&ScenarioId::Neutral];
    for r in neutral.ranked.iter().take(5) {
        println!(
            "{:<11} PSI {:.3} ({})",
            r.record.region, r.record.psi, r.record.band
        );
    }
    println!(
        "conservation residual {:e} over {} checks",
        stage.validation.conservation.max_relative_residual, stage.validation.conservation.checks
    );
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
