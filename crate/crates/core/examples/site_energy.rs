//! Site-level IT and facility energy, and how a campus evolves year by year.

use nexus::energy::{compute_e_dc, compute_e_it, EvolutionRates, SiteModel};
use nexus::BaselineParams;

pub fn run_example() -> anyhow::Result<()> {
    // 500 training accelerators at 0.7 kW and 80% utilisation, 400 inference
    // accelerators at 0.4 kW and 30%, running all year.
    let params = BaselineParams::annual(500, 0.7, 0.8, 400, 0.4, 0.3, 1.2);
    params.check()?;

    let e_it = compute_e_it(&params);
    let record = compute_e_dc(&params);
    println!("E_IT = {:.1} MWh", e_it.mwh());
    println!(
        "E_DC = {:.1} MWh at PUE {}",
        record.e_dc.mwh(),
        record.pue_used
    );

    let model = SiteModel::new(params, EvolutionRates::new(0.15, 0.02, 0.01)?).with_pue(2027, 1.15);
    for year in 2024..=2030 {
        let p = model.params_in(year)?;
        let e = model.energy_in(year)?;
        println!(
            "{year}: {:>4} train / {:>4} inference, PUE {:.2}, E_DC {:>9.1} MWh",
            p.n_train,
            p.n_inference,
            p.pue,
            e.e_dc.mwh()
        );
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
