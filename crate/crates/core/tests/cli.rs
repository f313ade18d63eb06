mod common;

use std::fs;
use std::process::{Command, Output};

use common::{copy_fixture, edit, fixture};

fn nexus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nexus"))
        .args(args)
        .env_remove("NEXUS_OUT_DIR")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn crosscheck_prints_implied_total() {
    let o = nexus(&[
        "crosscheck",
        "--global-twh",
        "945",
        "--hyperscale-share",
        "0.70",
        "--top-firm-share",
        "0.40",
    ]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "264.6");
}

#[test]
fn crosscheck_rejects_bad_share() {
    let o = nexus(&["crosscheck", "--hyperscale-share", "1.5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn validate_accepts_fixture() {
    let cfg = fixture("six_firm/config.toml");
    let o = nexus(&["validate", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("relevance 1.3 clamped"));
}

#[test]
fn validate_reports_unmapped_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = copy_fixture("toy", dir.path());
    fs::write(
        dir.path().join("regions.csv"),
        "location,region\nelsewhere,valley\n",
    )
    .unwrap();
    let o = nexus(&["validate", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unmapped location"), "{}", stderr(&o));
}

#[test]
fn validate_reports_non_monotone_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = copy_fixture("toy", dir.path());
    edit(
        &cfg,
        "schedule = [0.5, 0.5, 0.5]",
        "schedule = [0.5, 0.4, 0.6]",
    );
    let o = nexus(&["validate", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("non-monotone AI share"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn missing_config_is_an_io_failure() {
    let o = nexus(&["forecast", "/nonexistent/config.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let o = nexus(&["forecast", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn psi_writes_all_tables_as_json() {
    let out = tempfile::tempdir().unwrap();
    let cfg = fixture("six_firm/config.toml");
    let o = nexus(&[
        "psi",
        cfg.to_str().unwrap(),
        "--format",
        "json",
        "--out",
        out.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for name in [
        "firm_trajectories.json",
        "global_ensemble.json",
        "regional_demand.json",
        "regional_envelope.json",
        "psi_report.json",
        "validation.json",
    ] {
        let text = fs::read_to_string(out.path().join(name)).unwrap();
        serde_json::from_str::<serde_json::Value>(&text).unwrap();
    }
    let psi: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.path().join("psi_report.json")).unwrap())
            .unwrap();
    assert_eq!(psi[0]["region"], "ireland");
}

#[test]
fn env_var_overrides_out_flag() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let cfg = fixture("toy/config.toml");
    let o = Command::new(env!("CARGO_BIN_EXE_nexus"))
        .args([
            "forecast",
            cfg.to_str().unwrap(),
            "--out",
            flag_dir.path().to_str().unwrap(),
        ])
        .env("NEXUS_OUT_DIR", env_dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(env_dir.path().join("firm_trajectories.csv").exists());
    assert!(!flag_dir.path().join("firm_trajectories.csv").exists());
}

#[test]
fn year_and_scenario_filter_rows() {
    let out = tempfile::tempdir().unwrap();
    let cfg = fixture("six_firm/config.toml");
    let o = nexus(&[
        "allocate",
        cfg.to_str().unwrap(),
        "--scenario",
        "optimistic",
        "--year",
        "2027",
        "--out",
        out.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(out.path().join("regional_demand.csv")).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.starts_with("optimistic,2027,")));
    assert!(!out.path().join("psi_report.csv").exists());
}

#[test]
fn psi_without_supply_fails_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = copy_fixture("toy", dir.path());
    edit(&cfg, "supply = \"supply.csv\"\n", "");
    let out = dir.path().join("out");
    let o = nexus(&["psi", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("supply data required"),
        "{}",
        stderr(&o)
    );
    assert!(!out.exists());
}

#[test]
fn malformed_inventory_names_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = copy_fixture("toy", dir.path());
    fs::write(
        dir.path().join("inventory.csv"),
        "firm,location,site_count\nAcme,plant,-3\n",
    )
    .unwrap();
    let o = nexus(&[
        "forecast",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(
        err.contains("inventory.csv") && err.contains("line 2") && err.contains("site_count"),
        "{err}"
    );
}
