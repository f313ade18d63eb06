//! Checks the six-firm projection against a top-down global forecast and
//! reports the growth rates implied by the reference range.

use nexus::psi::{cagr_from_endpoints, cross_validate_global, within};

pub fn run_example() -> anyhow::Result<()> {
    let implied = cross_validate_global(945.0, 0.70, 0.40)?;
    println!("implied six-firm demand in 2030: {implied:.1} TWh");
    println!("within 239–295 TWh: {}", within(implied, 239.0, 295.0));
    for end in [239.0, 295.0] {
        println!(
            "118 → {end} TWh over 6 years: CAGR {:.2}%",
            cagr_from_endpoints(118.0, end, 6)? * 100.0
        );
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
