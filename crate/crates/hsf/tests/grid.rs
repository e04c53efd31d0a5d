use hsf::grid::{decode, encode, read_with_sidecar, sidecar_path, Sidecar, MAGIC, VERSION};
use hsf::Error;
use hsf_core::lattice::Lattice;
use hsf_core::synth::{RealizationMeta, TailReport, TruncationPlan};
use proptest::prelude::*;

fn lattice_2d() -> Lattice {
    Lattice::new(vec![-1.5, 0.25], vec![0.5, 0.125], vec![3, 2]).unwrap()
}

#[test]
fn layout_is_exact() {
    let values = [1.0, -2.0, 0.5, f64::MIN_POSITIVE, 1e300, -0.0];
    let buf = encode(&lattice_2d(), &values).unwrap();
    let mut want = Vec::new();
    want.extend_from_slice(b"HSFG");
    want.extend_from_slice(&1u32.to_le_bytes());
    want.extend_from_slice(&2u32.to_le_bytes());
    want.extend_from_slice(&3u64.to_le_bytes());
    want.extend_from_slice(&2u64.to_le_bytes());
    for x in [-1.5f64, 0.5, 0.25, 0.125] {
        want.extend_from_slice(&x.to_le_bytes());
    }
    for v in values {
        want.extend_from_slice(&v.to_le_bytes());
    }
    assert_eq!(buf, want);
    assert_eq!(&buf[..4], MAGIC);
    assert_eq!(VERSION, 1);
}

proptest! {
    #[test]
    fn grids_round_trip(counts in proptest::collection::vec(1usize..6, 1..=3),
                        origin in -10.0f64..10.0, step in 1e-6f64..4.0, seed in any::<u64>()) {
        let d = counts.len();
        let lat = Lattice::new(vec![origin; d], vec![step; d], counts).unwrap();
        let values: Vec<f64> = (0..lat.len() as u64)
            .map(|i| f64::from_bits(seed.rotate_left(i as u32) & 0x7fef_ffff_ffff_ffff))
            .collect();
        let (back, vals) = decode(&encode(&lat, &values).unwrap()).unwrap();
        prop_assert_eq!(back, lat);
        let a: Vec<u64> = vals.iter().map(|v| v.to_bits()).collect();
        let b: Vec<u64> = values.iter().map(|v| v.to_bits()).collect();
        prop_assert_eq!(a, b);
    }
}

fn format_error(buf: &[u8]) -> String {
    match decode(buf) {
        Err(Error::Format(m)) => m,
        other => panic!("expected a format error, got {other:?}"),
    }
}

#[test]
fn malformed_files_are_rejected() {
    let good = encode(&lattice_2d(), &[0.0; 6]).unwrap();
    let mut bad = good.clone();
    bad[0] = b'X';
    assert!(format_error(&bad).contains("magic"));
    let mut bad = good.clone();
    bad[4] = 2;
    assert!(format_error(&bad).contains("version"));
    let mut bad = good.clone();
    bad[8] = 4;
    assert!(format_error(&bad).contains("dimension"));
    let mut bad = good.clone();
    bad.push(0);
    assert!(format_error(&bad).contains("trailing"));
    assert!(format_error(&good[..good.len() - 1]).contains("truncated"));
    assert!(format_error(&good[..10]).contains("truncated"));
    // A zero step is not a lattice.
    let mut bad = good.clone();
    bad[12 + 16 + 8..12 + 16 + 16].copy_from_slice(&0f64.to_le_bytes());
    format_error(&bad);
    // Huge counts overflow instead of allocating.
    let mut bad = good.clone();
    bad[12..20].copy_from_slice(&u64::MAX.to_le_bytes());
    format_error(&bad);
    assert!(encode(&lattice_2d(), &[0.0; 5]).is_err());
}

#[test]
fn sidecar_round_trips_through_disk() {
    let meta = RealizationMeta {
        alpha: 1.2,
        band: Some(vec![1, 0]),
        b: vec![0, 1],
        plan: TruncationPlan { j_abs_max: 3, k_margin: 12 },
        tail: TailReport {
            per_level: vec![(vec![0, -1], 0.5), (vec![3, 3], 1e-9)],
            level_tail: 2e-9,
            table_tail: 1e-12,
        },
    };
    let side = Sidecar::of(&meta, 42);
    assert_eq!(side.format, "HSFG");
    assert_eq!(Sidecar::from_toml(&side.to_toml().unwrap()).unwrap(), side);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.hsfg");
    assert_eq!(sidecar_path(&path), dir.path().join("x.hsfg.toml"));
    let values = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0];
    std::fs::write(&path, encode(&lattice_2d(), &values).unwrap()).unwrap();
    std::fs::write(sidecar_path(&path), side.to_toml().unwrap()).unwrap();
    let (lat, vals, back) = read_with_sidecar(&path).unwrap();
    assert_eq!(lat, lattice_2d());
    assert_eq!(vals, values);
    assert_eq!(back, side);
    let extra = format!("{}\nunexpected = 1\n", side.to_toml().unwrap());
    assert!(Sidecar::from_toml(&extra).is_err());
}
