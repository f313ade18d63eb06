// Each example doubles as a smoke test.

macro_rules! example {
    ($name:ident, $path:literal) => {
        #[allow(dead_code)]
        #[path = $path]
        mod $name;
    };
}

example!(site_energy, "../examples/site_energy.rs");
example!(firm_projection, "../examples/firm_projection.rs");
example!(siting_allocation, "../examples/siting_allocation.rs");
example!(power_stress, "../examples/power_stress.rs");
example!(crosscheck, "../examples/crosscheck.rs");
example!(full_pipeline, "../examples/full_pipeline.rs");

#[test]
fn examples_run() {
    site_energy::run_example().unwrap();
    firm_projection::run_example().unwrap();
    siting_allocation::run_example().unwrap();
    power_stress::run_example().unwrap();
    crosscheck::run_example().unwrap();
    full_pipeline::run_example().unwrap();
}
