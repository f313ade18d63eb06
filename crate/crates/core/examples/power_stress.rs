//! Extrapolates regional supply and ranks regions by power-stress index.

use std::collections::BTreeMap;

use nexus::psi::{extrapolate_supply, psi_report};
use nexus::{Energy, RegionId, SupplySeries};

pub fn run_example() -> anyhow::Result<()> {
    let history = [
        ("ireland", 31.0, 35.6, 21.0),
        ("virginia", 99.0, 104.0, 34.9),
        ("texas", 483.0, 540.0, 16.0),
    ];
    let mut supply = BTreeMap::new();
    let mut demand = BTreeMap::new();
    for (name, y2019, y2024, dc_2030) in history {
        let region = RegionId::new(name)?;
        let series = SupplySeries {
            region: region.clone(),
            history: [
                (2019, Energy::from_twh(y2019)),
                (2024, Energy::from_twh(y2024)),
            ]
            .into(),
        };
        println!(
            "{name:<9} supply 2030 ≈ {:.1} TWh (CAGR {:.2}%)",
            extrapolate_supply(&series, 2030)?.twh(),
            series.cagr()? * 100.0
        );
        supply.insert(region.clone(), series);
        demand.insert(region, Energy::from_twh(dc_2030));
    }
    // demand in a region without supply data is reported, not dropped
    demand.insert(RegionId::new("taiwan")?, Energy::from_twh(0.3));

    let report = psi_report(&demand, &supply, 2030, 4)?;
    for r in &report.ranked {
        println!(
            "{:<9} PSI {:.3} {:<9} quantile {}",
            r.record.region, r.record.psi, r.record.band, r.quantile_bin
        );
    }
    for u in &report.uncovered {
        println!("uncovered: {} ({})", u.region, u.reason);
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
