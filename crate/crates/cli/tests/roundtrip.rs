//! Bit-exact round trips of the on-disk formats.

use std::path::Path;

use morlim::RealMatrix;
use morlim_cli::io::{mtx_string, parse_mtx, read_json, read_mtx, write_json, write_mtx};
use morlim_cli::RunConfig;
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE),
        Just(5e-324),
    ]
}

proptest! {
    #[test]
    fn mtx_text_round_trip(rows in 1usize..6, cols in 1usize..6, data in prop::collection::vec(finite(), 36)) {
        let m = RealMatrix::from_fn(rows, cols, |i, j| data[i * 6 + j]);
        let back = parse_mtx(&mtx_string(&m), Path::new("m.mtx")).unwrap();
        prop_assert_eq!(back.shape(), m.shape());
        for (x, y) in m.iter().zip(back.iter()) {
            prop_assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn json_band_round_trip(lo in 0.0..1e3f64, w in 1e-12..1e3f64, nodes in 8usize..1024) {
        let text = format!(
            r#"{{"method":"flbt","order":3,"band":{{"omega_lo":{lo:?},"omega_hi":{:?}}},"nodes":{nodes}}}"#,
            lo + w
        );
        let cfg: RunConfig = serde_json::from_str(&text).unwrap();
        let dir = tempfile::TempDir::new().unwrap();
        let path = dir.path().join("cfg.json");
        write_json(&path, &cfg).unwrap();
        let back: RunConfig = read_json(&path).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

#[test]
fn files_round_trip() {
    let dir = tempfile::TempDir::new().unwrap();
    let m = RealMatrix::from_row_slice(2, 2, &[1.0 / 3.0, -0.0, 1e308, -2.5e-310]);
    let p = dir.path().join("m.mtx");
    write_mtx(&p, &m).unwrap();
    let back = read_mtx(&p).unwrap();
    assert!(m.iter().zip(back.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
    // no temporary file is left behind
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 1);
}
