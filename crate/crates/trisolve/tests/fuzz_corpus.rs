//! Replays the checked-in fuzz corpus through the same entry points the
//! fuzz targets drive, so the seeds keep working without a fuzzing
//! toolchain.

use std::path::PathBuf;

fn corpus_dir(target: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target)
}

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = corpus_dir(target);
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("missing corpus {}: {e}", dir.display()))
        .map(|entry| {
            let entry = entry.unwrap();
            let name = entry.file_name().to_string_lossy().into_owned();
            (name, std::fs::read(entry.path()).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "corpus {} must have seeds", dir.display());
    out
}

#[test]
fn study_csv_seeds_never_panic_and_accepted_tables_round_trip() {
    for (name, data) in seeds("parse_study_csv") {
        if let Ok(rows) = trisolve::parse_study_csv(&data) {
            let mut buf = Vec::new();
            trisolve::write_study_csv(&rows, 17, &mut buf).unwrap();
            let again = trisolve::parse_study_csv(&buf).unwrap();
            assert_eq!(again.len(), rows.len(), "seed {name}");
        }
    }
}

#[test]
fn grid_list_seeds_never_panic() {
    for (name, data) in seeds("parse_grid_list") {
        if let Ok(text) = std::str::from_utf8(&data) {
            if let Ok(sizes) = trisolve::parse_grid_list(text) {
                let _ = trisolve::validate_grid_list(&sizes);
            }
        } else {
            panic!("seed {name} is not UTF-8");
        }
    }
}

#[test]
fn known_good_seed_parses_to_expected_rows() {
    let data = std::fs::read(corpus_dir("parse_study_csv").join("valid_two_rows")).unwrap();
    let rows = trisolve::parse_study_csv(&data).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].n, 8);
    assert_eq!(rows[0].k, 7);
    assert!(rows[0].order.is_some());
    assert_eq!(rows[1].order, None);
}
