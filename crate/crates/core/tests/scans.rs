use funnel_lab::experiments::{run_scan, write_outputs, spec_echo, Axis, Config, ScanSpec, ScanTarget};
use std::f64::consts::TAU;

fn spec(target: ScanTarget, analysis: &str, axes: Vec<Axis>) -> ScanSpec {
    ScanSpec {
        target,
        analysis: analysis.into(),
        axes,
        seed: 5,
    }
}

#[test]
fn arnold_tongues_widen_with_a() {
    let s = spec(
        ScanTarget::CircleMap,
        "rotation_number",
        vec![Axis::linear("a", 0.0, 0.9, 64), Axis::linear("omega_tilde", 0.0, TAU, 64)],
    );
    let r = run_scan(&s, &Config::default(), 0).unwrap();
    assert_eq!(r.records.len(), 64 * 64);
    let plateau = s.scalar_names().iter().position(|n| *n == "plateau").unwrap();
    let fractions: Vec<f64> = r
        .records
        .chunks(64)
        .map(|row| row.iter().filter(|x| x.scalars[plateau] == 1.0).count() as f64 / 64.0)
        .collect();
    assert_eq!(fractions[0], 0.0);
    // averaged over bands of 16 amplitudes the locked fraction increases
    let bands: Vec<f64> = fractions.chunks(16).map(|b| b.iter().sum::<f64>() / 16.0).collect();
    assert!(bands.windows(2).all(|w| w[1] > w[0]), "{bands:?}");
}

#[test]
fn burster_scan_orders_regimes() {
    let s = spec(ScanTarget::Burster, "classify_regime", vec![Axis::linear("c", -1.46, -1.0, 24)]);
    let r = run_scan(&s, &Config::default(), 0).unwrap();
    let labels: Vec<&str> = r.records.iter().map(|x| x.label.as_str()).collect();
    let first = |l: &str| labels.iter().position(|x| *x == l).unwrap_or_else(|| panic!("no {l} in {labels:?}"));
    assert!(first("quiescent") < first("bursting"));
    assert!(first("bursting") < first("tonic_spiking"));
}

#[test]
fn two_point_scan_writes_two_records() {
    let s = spec(ScanTarget::MapFamily, "diffeo_condition", vec![Axis::linear("a", 0.1, 0.2, 2)]);
    let c = Config::default();
    let r = run_scan(&s, &c, 1).unwrap();
    assert_eq!(r.records.len(), 2);
    let dir = tempfile::tempdir().unwrap();
    let paths = write_outputs(dir.path(), "scan", &spec_echo("scan", &c).unwrap(), &r.to_table(), s.seed).unwrap();
    let text = std::fs::read_to_string(paths.csv).unwrap();
    assert_eq!(text.lines().count(), 3);
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(paths.json).unwrap()).unwrap();
    assert_eq!(doc["records"].as_array().unwrap().len(), 2);
}

#[test]
fn workers_do_not_change_results() {
    let s = spec(
        ScanTarget::MapFamily,
        "map_lyapunov",
        vec![Axis::log("mu", 1e-4, 1e-2, 3), Axis::linear("a", 0.0, 0.6, 3)],
    );
    let c = Config::default();
    let one = run_scan(&s, &c, 1).unwrap().to_table().to_csv().unwrap();
    let many = run_scan(&s, &c, 4).unwrap().to_table().to_csv().unwrap();
    assert_eq!(one, many);
}

#[test]
fn bad_axis_is_a_config_error() {
    let s = spec(ScanTarget::CircleMap, "rotation_number", vec![Axis::linear("c", 0.0, 1.0, 4)]);
    assert!(s.validate().is_err());
    let s = spec(ScanTarget::MapFamily, "rotation_number", vec![Axis::log("mu", 0.0, 1.0, 4)]);
    assert!(s.validate().is_err());
    let s = spec(ScanTarget::MapFamily, "rotation_number", vec![Axis::linear("a", 0.0, 1.0, 1)]);
    assert!(s.validate().is_err());
}
