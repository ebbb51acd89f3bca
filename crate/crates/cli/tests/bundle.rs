use std::fs;

use proptest::prelude::*;
use wavessm::bundle::{self, Bundle};
use wavessm::csv::{format_f64, parse_matrix, render_matrix};
use wavessm::CliError;
use wavessm_core::tasks::derive_pair;
use wavessm_core::{build_frame, tighten, Family, FrameSpec, Matrix, Measure};

fn morlet() -> wavessm_core::FrameMatrix {
    tighten(&build_frame(&FrameSpec::new(Family::Morlet, 10, 96)).unwrap()).unwrap()
}

#[test]
fn frame_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    for family in [Family::Morlet, Family::Db6, Family::Legendre] {
        let frame = build_frame(&FrameSpec::new(family, 9, 128)).unwrap();
        let path = dir.path().join(family.to_string());
        let manifest = bundle::save_frame(&frame, &path).unwrap();
        assert_eq!(manifest.payload.len(), if family.has_analytic_derivative() { 2 } else { 1 });
        let back = bundle::load_frame(&path).unwrap();
        assert_eq!(back, frame);
        assert_eq!(back.fingerprint(), frame.fingerprint());
    }
}

#[test]
fn ssm_round_trip_keeps_measure_and_source() {
    let dir = tempfile::tempdir().unwrap();
    let pair = derive_pair(&morlet(), Measure::translated(0.5).unwrap()).unwrap();
    bundle::save_ssm(&pair, 4, dir.path()).unwrap();
    let manifest = bundle::read_manifest(dir.path()).unwrap();
    assert_eq!(manifest.rng_seed, 4);
    match bundle::load_bundle(dir.path()).unwrap() {
        Bundle::Ssm(back) => assert_eq!(back, pair),
        Bundle::Frame(_) => panic!("expected an ssm bundle"),
    }
    assert!(matches!(bundle::load_frame(dir.path()), Err(CliError::Schema(_))));
}

#[test]
fn corrupted_payload_is_detected() {
    let dir = tempfile::tempdir().unwrap();
    bundle::save_frame(&morlet(), dir.path()).unwrap();
    let path = dir.path().join("frame.csv");
    let mut bytes = fs::read(&path).unwrap();
    let i = bytes.iter().rposition(|b| b.is_ascii_digit() && *b != b'9').unwrap();
    bytes[i] += 1;
    fs::write(&path, bytes).unwrap();
    assert!(matches!(bundle::load_bundle(dir.path()), Err(CliError::ChecksumMismatch { .. })));
}

#[test]
fn unknown_manifest_field_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    bundle::save_frame(&morlet(), dir.path()).unwrap();
    let path = dir.path().join(bundle::MANIFEST);
    let text = fs::read_to_string(&path).unwrap().replacen('{', "{\n  \"colour\": \"blue\",", 1);
    fs::write(&path, text).unwrap();
    match bundle::load_bundle(dir.path()) {
        Err(CliError::Schema(msg)) => assert!(msg.contains("colour"), "{msg}"),
        other => panic!("expected a schema error, got {other:?}"),
    }
}

#[test]
fn unknown_nested_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    bundle::save_frame(&morlet(), dir.path()).unwrap();
    let path = dir.path().join(bundle::MANIFEST);
    let text = fs::read_to_string(&path).unwrap().replacen("\"n_atoms\"", "\"atoms_n\": 1, \"n_atoms\"", 1);
    fs::write(&path, text).unwrap();
    assert!(matches!(bundle::load_bundle(dir.path()), Err(CliError::Schema(m)) if m.contains("atoms_n")));
}

#[test]
fn missing_bundle_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = bundle::load_bundle(&dir.path().join("absent")).unwrap_err();
    assert!(matches!(err, CliError::Io { .. }));
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn payload_shape_is_checked() {
    let dir = tempfile::tempdir().unwrap();
    bundle::save_frame(&morlet(), dir.path()).unwrap();
    let path = dir.path().join(bundle::MANIFEST);
    let text = fs::read_to_string(&path).unwrap().replacen("\"rows\": 10", "\"rows\": 11", 1);
    fs::write(&path, text).unwrap();
    assert!(matches!(bundle::load_bundle(dir.path()), Err(CliError::Csv { .. })));
}

#[test]
fn matrix_csv_has_header_and_parses_back() {
    let m = Matrix::from_rows(&[vec![1.0, -0.0], vec![f64::MIN_POSITIVE, 1e300]]).unwrap();
    let text = render_matrix(&m);
    assert!(text.starts_with("c0,c1\n"));
    let back = parse_matrix(&text, "m.csv".as_ref()).unwrap();
    let bits = |m: &Matrix| m.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&back), bits(&m));
    assert!(parse_matrix("c0,c1\n1,2\n3\n", "m.csv".as_ref()).is_err());
    assert!(parse_matrix("c0\nx\n", "m.csv".as_ref()).is_err());
}

proptest! {
    #[test]
    fn seventeen_digits_round_trip(bits in any::<u64>()) {
        let v = f64::from_bits(bits);
        prop_assume!(v.is_finite());
        let back: f64 = format_f64(v).parse().unwrap();
        prop_assert_eq!(back.to_bits(), v.to_bits());
    }
}
