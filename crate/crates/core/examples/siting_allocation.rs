//! Turns siting evidence into expansion probabilities, then splits a firm's
//! demand across regions with AI and historical weights.

use nexus::scenario::{project_firm, FirmAnchors};
use nexus::siting::{
    ai_weights, allocate_regional, expansion_probabilities, hist_weights, select_sites,
};
use nexus::{
    AiShareSchedule, Energy, FirmId, LocationId, RegionId, RegionMap, Scenario, ScenarioId,
    SiteInventory, SitingEvidence,
};

pub fn run_example() -> anyhow::Result<()> {
    let firm = FirmId::new("Meta")?;
    let region = |s: &str| RegionId::new(s);
    let evidence = vec![
        SitingEvidence::new(firm.clone(), region("oregon")?, 0.8, 0.9)?,
        SitingEvidence::new(firm.clone(), region("iowa")?, 0.5, 0.7)?,
        SitingEvidence::new(firm.clone(), region("ireland")?, -0.4, 0.8)?,
    ];
    let probs = expansion_probabilities(&evidence)?;
    for (r, p) in &probs {
        println!("P({r}) = {p:.3}");
    }

    let sites = [
        ("prineville", "oregon", 3, 0.6),
        ("altoona", "iowa", 2, 0.3),
        ("clonee", "ireland", 2, 0.3),
    ];
    let mut map = RegionMap::new();
    let mut inventory = Vec::new();
    for (loc, reg, count, ai) in sites {
        map.insert(LocationId::new(loc)?, region(reg)?)?;
        inventory.push(SiteInventory {
            firm: firm.clone(),
            location: LocationId::new(loc)?,
            site_count: count,
            e_ai_loc: Some(Energy::from_twh(ai)),
        });
    }

    let schedule = AiShareSchedule::published(&firm).expect("published schedule");
    let t = project_firm(
        &firm,
        &Scenario::canonical(ScenarioId::Neutral),
        FirmAnchors::from_twh(7.4, 0.21),
        &schedule,
        2030,
    )?;
    // new AI load only goes where expansion is likely
    let candidates: Vec<LocationId> = inventory.iter().map(|s| s.location.clone()).collect();
    let chosen = select_sites(&candidates, &probs, &map, 0.0);
    let w_ai = ai_weights(
        &firm,
        2030,
        inventory
            .iter()
            .filter(|s| chosen.contains(&s.location))
            .map(|s| (s.location.clone(), s.e_ai_loc.unwrap_or(Energy::ZERO))),
    )?;
    let w_hist = hist_weights(&inventory, &firm)?;
    let regions = allocate_regional(&t, 2030, &w_ai, &w_hist, &map)?;
    let total: Energy = regions.values().sum();
    for (r, e) in &regions {
        println!("{r:<8} {:.2} TWh", e.twh());
    }
    println!(
        "allocated {:.4} of {:.4} TWh",
        total.twh(),
        t.at(2030).unwrap().e_tot.twh()
    );
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
