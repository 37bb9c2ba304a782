use std::process::Command;

use renorm_lab::circle_map::FamilySpec;
use renorm_lab::experiments::sync::scaled_beta;
use renorm_lab::experiments::*;
use renorm_lab::numerics::TargetDigits;
use renorm_lab::LabError;

fn cheap(families: Vec<FamilySpec>) -> ExperimentConfig {
    ExperimentConfig {
        precision_bits: 128,
        grid_size: 33,
        depth: 6,
        solve_margin: 4,
        families,
        sync_digit: 6,
        ..ExperimentConfig::default()
    }
}

#[test]
fn config_parses_toml_with_defaults() {
    let cfg = ExperimentConfig::from_toml(
        r#"
        precision_bits = 160
        depth = 10
        families = [{ id = "arnold", params = { d = 1 } }, { id = "two_harmonic", params = { beta = "1/20" } }]
        target = { prefix = [2], tail = [1] }
        format = "json"
        "#,
    )
    .unwrap();
    assert_eq!(cfg.precision_bits, 160);
    assert_eq!(cfg.grid_size, 257);
    assert_eq!(cfg.level_max(), 10);
    assert_eq!(cfg.target.digits(), TargetDigits::new(vec![2], vec![1]));
    assert_eq!(cfg.families[1].param_text("beta").as_deref(), Some("1/20"));
    assert_eq!(cfg.format, OutputFormat::Json);
    assert_eq!(ExperimentConfig::from_toml("").unwrap(), ExperimentConfig::default());
}

#[test]
fn config_rejects_unknown_fields_and_bad_values() {
    for bad in ["precison_bits = 100", "precision_bits = 32", "grid_size = 1", "families = []", "large_digit = 1"] {
        assert!(matches!(ExperimentConfig::from_toml(bad), Err(LabError::Config(_))), "{bad}");
    }
}

#[test]
fn config_hash_is_stable_and_sensitive() {
    let a = ExperimentConfig::default();
    assert_eq!(a.hash(), ExperimentConfig::default().hash());
    assert_eq!(a.hash().len(), 64);
    let b = ExperimentConfig { depth: 17, ..ExperimentConfig::default() };
    assert_ne!(a.hash(), b.hash());
}

#[test]
fn large_digit_targets_place_the_digit_after_the_prefix() {
    let (t, level) = large_digit_target(&[1, 1], 7, &[1]).unwrap();
    assert_eq!(t.take(5), vec![1, 1, 7, 1, 1]);
    assert_eq!(level, 1);
    assert!(matches!(large_digit_target(&[], 7, &[1]), Err(LabError::Config(_))));
}

#[test]
fn converge_of_a_map_against_itself_is_zero() {
    let cfg = cheap(vec![FamilySpec::arnold(1), FamilySpec::arnold(1)]);
    let res = run_converge(&cfg).unwrap();
    assert_eq!(res.rows.len(), 6);
    assert!(res.rows.iter().all(|r| r.d0.is_zero() && r.d1.is_zero() && r.d2.is_zero()));
    assert!(res.fit.is_none());
}

#[test]
fn converge_distances_shrink_between_two_families() {
    let cfg = cheap(ExperimentConfig::default().families);
    let res = run_converge(&cfg).unwrap();
    assert!(res.rows.iter().all(|r| r.d0 <= r.d1 && r.d1 <= r.d2 && r.d2 > 0i64));
    assert!(res.rows.last().unwrap().d2 < res.rows[0].d2);
    assert!(res.fit.is_some());
    let csv = res.report.csv_bodies();
    assert!(csv.starts_with("# rows\nn,d0,d1,d2,ratio\n"), "{csv}");
    assert_eq!(csv.lines().count(), 2 + 6);
}

#[test]
fn two_map_experiments_need_two_families() {
    let cfg = cheap(vec![FamilySpec::arnold(1)]);
    assert!(matches!(run_converge(&cfg), Err(LabError::Config(_))));
    assert!(matches!(run_rigidity(&cfg), Err(LabError::Config(_))));
    assert!(run_named("nonsense", &cfg).is_err());
}

#[test]
fn rigidity_of_identical_families_is_exactly_zero() {
    let cfg = cheap(vec![FamilySpec::arnold(1), FamilySpec::arnold(1)]);
    let res = run_rigidity(&cfg).unwrap();
    assert!(!res.rows.is_empty());
    assert!(res.rows.iter().all(|r| r.max_discrepancy.is_zero()));
}

#[test]
fn sync_of_identical_families_has_no_discrepancy() {
    let cfg = cheap(vec![FamilySpec::arnold(1), FamilySpec::arnold(1)]);
    let res = run_sync(&cfg).unwrap();
    assert_eq!(res.base.a, 6);
    assert!(res.base.epsilon.is_zero());
    assert!(res.base.p_residual.is_zero());
    assert!(res.base.delta.iter().all(|d| d.is_zero()));
    assert!(res.refined.is_none());
}

#[test]
fn scaled_beta_only_applies_to_two_harmonic() {
    let th = scaled_beta(&FamilySpec::two_harmonic("1/10"), "1/2").unwrap().unwrap();
    assert_eq!(th.param_text("beta").as_deref(), Some("1/20"));
    assert!(scaled_beta(&FamilySpec::arnold(1), "1/2").unwrap().is_none());
}

#[test]
fn reports_write_json_and_csv_files() {
    let cfg = cheap(vec![FamilySpec::arnold(1), FamilySpec::arnold(1)]);
    let report = run_named("rigidity", &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let paths = report.write(dir.path(), OutputFormat::Csv).unwrap();
    let names: Vec<String> = paths.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
    assert!(names.contains(&"rigidity.json".to_string()), "{names:?}");
    assert!(names.contains(&"rigidity_rows.csv".to_string()), "{names:?}");
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("rigidity.json")).unwrap()).unwrap();
    assert_eq!(json["header"]["config_hash"], cfg.hash());
    assert_eq!(json["header"]["precision_bits"], 128);
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_renorm-lab"))
}

#[test]
fn cli_reports_configuration_errors_with_exit_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "depht = 3\n").unwrap();
    let out = cli().arg("--config").arg(&path).arg("converge").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("depht"));
}

#[test]
fn cli_rotation_digits_and_periodic_orbit_exit_code() {
    let out = cli().args(["rotnum", "--omega", "0.6", "--levels", "4"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["digits"].as_array().unwrap().len(), 4);

    let out = cli().args(["rotnum", "--omega", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}
