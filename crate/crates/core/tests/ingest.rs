use wgqed::dynamics::TwoLevelParams;
use wgqed::io::{ingest_csv, spectrum_csv, spectrum_from_table, CsvSchema};
use wgqed::observables::Spectrum;
use wgqed::photon_stats::{read_timetags, simulate_timetags, write_timetags};

#[test]
fn spectrum_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let x: Vec<f64> = (0..50).map(|k| -3.0 + 0.123456789 * k as f64).collect();
    let y: Vec<f64> = x.iter().map(|v| 1.0 / (1.0 + v * v) + 1e-17 * v).collect();
    let s = Spectrum::new(x, y, "intensity");
    let path = dir.path().join("s.csv");
    std::fs::write(&path, spectrum_csv(&s)).unwrap();
    let t = ingest_csv(&path, &CsvSchema::new(&["detuning_mhz", "intensity"], &[])).unwrap();
    assert_eq!(t.rows(), 50);
    let back = spectrum_from_table(&t).unwrap();
    for (a, b) in back.values.iter().zip(&s.values) {
        assert!((a - b).abs() <= 1e-12);
    }
    assert_eq!(back, s);
}

#[test]
fn simulated_tags_round_trip_with_count() {
    let dir = tempfile::tempdir().unwrap();
    let e = TwoLevelParams { rabi_mhz: 10.0, detuning_mhz: 0.0, gamma0_mhz: 26.0, dephasing_mhz: 0.0, extra_decay_mhz: 0.0 };
    let gen = e.generator().unwrap();
    let streams = simulate_timetags(&gen, &[(gen.jump_operator(0), 1.0)], 1.0e5, 5).unwrap();
    let path = dir.path().join("d0.tags");
    write_timetags(&path, &streams[0], 5).unwrap();
    let (back, seed) = read_timetags(&path).unwrap();
    assert_eq!(seed, 5);
    assert_eq!(back.len(), streams[0].len());
    assert_eq!(back.tags, streams[0].tags);
}
