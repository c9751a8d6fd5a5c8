use gapstress_harness::config::{GeometryKind, Preset, SweepConfig};
use gapstress_harness::sweep::{ROWS_FILE, read_rows};
use gapstress_harness::{render, run_sweep, write_outputs, write_report, write_rows_csv};
use proptest::prelude::*;

fn small(preset: &str) -> SweepConfig {
    SweepConfig::from_toml_str(&format!(
        r#"
[geometry]
kind = "disks"
outer_radius = 4.0

[material]
lambda = 1.0
mu = 1.0

[sweep]
preset = "{preset}"
eps = [0.08, 0.04, 0.02, 0.01]
h_levels = [0.4]
far_h = 0.4
probes = 20
"#
    ))
    .unwrap()
}

fn csv_bytes(cfg: &SweepConfig, jobs: usize) -> Vec<u8> {
    let res = run_sweep(cfg, Some(jobs)).unwrap();
    assert!(res.failures.is_empty(), "{:?}", res.failures);
    let mut buf = Vec::new();
    write_rows_csv(&res.rows, &mut buf).unwrap();
    buf
}

#[test]
fn ladder_emits_every_quantity_at_every_eps() {
    let cfg = small("shear");
    let res = run_sweep(&cfg, Some(2)).unwrap();
    let mut ids: Vec<&str> = res.rows.iter().map(|r| r.quantity.as_str()).collect();
    ids.sort();
    ids.dedup();
    assert!(ids.len() > 40, "{}", ids.len());
    assert!(res.rows.len() >= 4 * ids.len());
    for q in &ids {
        assert_eq!(res.rows.iter().filter(|r| r.quantity == *q).count(), 4, "{q}");
    }
    assert!(res.rows.windows(2).all(|w| w[0].epsilon >= w[1].epsilon));
    assert!(res.rows.iter().all(|r| r.d == 2 && r.m == 2 && r.mesh_h == 0.4 && r.dofs > 0));
}

#[test]
fn serial_parallel_and_rerun_agree_byte_for_byte() {
    let cfg = small("stretch");
    let serial = csv_bytes(&cfg, 1);
    assert_eq!(serial, csv_bytes(&cfg, 3));
    assert_eq!(serial, csv_bytes(&cfg, 1));
}

#[test]
fn zero_data_gives_zero_blow_up_rows() {
    let res = run_sweep(&small("zero"), Some(2)).unwrap();
    let blow_up = ["b1_", "b1ub_", "b1star_", "btilde_", "c_", "cfull_", "cdiff_", "pred_cdiff_", "grad_center_", "pred_grad_center_"];
    let mut seen = 0;
    for r in &res.rows {
        if blow_up.iter().any(|p| r.quantity.starts_with(p)) {
            assert_eq!(r.value, 0.0, "{}", r.quantity);
            seen += 1;
        }
    }
    assert!(seen >= 4 * 30);
    // the capacity does not depend on the data
    assert!(res.rows.iter().any(|r| r.quantity == "a_11_11" && r.value > 1.0));
}

#[test]
fn outputs_round_trip_and_report_is_idempotent() {
    let cfg = small("shear");
    let dir = tempfile::tempdir().unwrap();
    let res = run_sweep(&cfg, None).unwrap();
    write_outputs(&cfg, &res, dir.path()).unwrap();
    assert_eq!(read_rows(dir.path()).unwrap(), res.rows);
    let first = write_report(dir.path()).unwrap();
    let second = write_report(dir.path()).unwrap();
    assert_eq!(first, second);
    assert_eq!(std::fs::read_to_string(dir.path().join("report.md")).unwrap(), first);
    assert!(first.contains("a_11_11"));
    let records = gapstress_fem::io::read_records_json(std::fs::File::open(dir.path().join("functionals.json")).unwrap()).unwrap();
    assert_eq!(records.len(), res.rows.len());
    assert_eq!(records.iter().find(|r| r.quantity == "a_12_31").unwrap().indices, vec![1, 2, 3, 1]);
}

#[test]
fn empty_directory_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = render(dir.path()).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    std::fs::write(dir.path().join(ROWS_FILE), "epsilon,d,m,quantity,value,mesh_h,dofs\n").unwrap();
    assert_eq!(render(dir.path()).unwrap_err().exit_code(), 2);
}

#[test]
fn cell_sweep_reports_moduli() {
    let mut cfg = small("shear");
    cfg.geometry.kind = GeometryKind::Cell;
    cfg.sweep.eps = vec![0.04, 0.02, 0.01];
    cfg.sweep.h_levels = vec![0.2];
    let res = run_sweep(&cfg, Some(1)).unwrap();
    assert!(res.failures.is_empty(), "{:?}", res.failures);
    let mu: Vec<(f64, f64)> = res.series("mu_star", 0.2);
    assert_eq!(mu.len(), 3);
    assert!(mu.windows(2).all(|w| w[1].1 > w[0].1));
}

#[test]
fn failures_are_recorded_and_the_sweep_goes_on() {
    // an inclusion gap below the mesher's limit fails only that point
    let mut cfg = small("shear");
    cfg.sweep.eps = vec![0.08, 0.04, 1e-7];
    let res = run_sweep(&cfg, Some(1)).unwrap();
    assert_eq!(res.failures.len(), 1, "{:?}", res.failures);
    assert_eq!(res.failures[0].epsilon, 1e-7);
    assert_eq!(res.series("a_11_11", 0.4).len(), 2);
}

fn ladder_toml(eps: &[f64]) -> String {
    let list: Vec<String> = eps.iter().map(|e| format!("{e:?}")).collect();
    format!(
        "[geometry]\nkind = \"disks\"\n[material]\nlambda = 1.0\nmu = 1.0\n[sweep]\npreset = \"{}\"\neps = [{}]\n",
        Preset::Shear,
        list.join(", ")
    )
}

proptest! {
    #[test]
    fn configs_accept_exactly_the_valid_ladders(eps in prop::collection::vec(1e-4f64..0.7, 0..7)) {
        let valid = eps.len() >= 3 && eps.windows(2).all(|w| w[1] < w[0]) && eps.iter().all(|e| *e < 0.5);
        prop_assert_eq!(SweepConfig::from_toml_str(&ladder_toml(&eps)).is_ok(), valid);
    }

    #[test]
    fn presets_round_trip_through_text(k in 0usize..6) {
        let p = [Preset::Shear, Preset::Stretch, Preset::Zero, Preset::Rigid(1), Preset::Rigid(2), Preset::Rigid(3)][k];
        prop_assert_eq!(p.to_string().parse::<Preset>().unwrap(), p);
    }
}
