//! Projects one firm under the three growth scenarios and aggregates an
//! ensemble over the six hyperscalers.

use nexus::scenario::{ensemble_aggregate, global_totals, project_firm, FirmAnchors};
use nexus::{AiShareSchedule, FirmId, Scenario, ScenarioId};

const ANCHORS: [(&str, f64, f64); 6] = [
    ("Amazon", 44.6, 1.2),
    ("Microsoft", 29.3, 0.91),
    ("Google", 19.1, 0.56),
    ("Meta", 7.4, 0.21),
    ("Oracle", 5.2, 0.1),
    ("Apple", 3.0, 0.05),
];

pub fn run_example() -> anyhow::Result<()> {
    let amazon = FirmId::new("Amazon")?;
    let schedule = AiShareSchedule::published(&amazon).expect("published schedule");
    for id in ScenarioId::ALL {
        let t = project_firm(
            &amazon,
            &Scenario::canonical(id),
            FirmAnchors::from_twh(44.6, 1.2),
            &schedule,
            2030,
        )?;
        let last = t.at(2030).expect("horizon year");
        println!(
            "Amazon {id:<12} 2030: stock {:.1}, AI new {:.2}, total {:.1} TWh",
            last.e_stock.twh(),
            last.e_ai_new.twh(),
            last.e_tot.twh()
        );
    }

    let neutral = Scenario::canonical(ScenarioId::Neutral);
    let mut trajectories = Vec::new();
    for (name, stock, ai) in ANCHORS {
        let firm = FirmId::new(name)?;
        let schedule = AiShareSchedule::published(&firm).expect("published schedule");
        trajectories.push(project_firm(
            &firm,
            &neutral,
            FirmAnchors::from_twh(stock, ai),
            &schedule,
            2030,
        )?);
    }
    let totals = global_totals(&trajectories);
    for r in ensemble_aggregate(ScenarioId::Neutral, &[totals])? {
        println!("{}: six-firm total {:.2} TWh", r.year, r.mean.twh());
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
