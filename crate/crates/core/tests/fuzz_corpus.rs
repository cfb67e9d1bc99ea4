//! Replays the checked-in fuzz seeds through the parsers on stable.

use std::fs;
use std::path::PathBuf;

use morseflow::betti::IntPolynomial;
use morseflow::config::RunConfig;
use morseflow::json::{matrix_to_json, parse_diag_shorthand, parse_matrix_json};
use morseflow::schubert::CellId;

fn seeds(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut paths: Vec<_> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    assert!(!paths.is_empty(), "no seeds in {}", dir.display());
    paths.iter().map(|p| fs::read_to_string(p).unwrap()).collect()
}

#[test]
fn matrix_seeds() {
    let mut ok = 0;
    for s in seeds("matrix_json") {
        if let Ok(m) = parse_matrix_json(&s) {
            ok += 1;
            assert_eq!(matrix_to_json(&parse_matrix_json(&matrix_to_json(&m)).unwrap()), matrix_to_json(&m));
        }
    }
    assert!(ok >= 3);
}

#[test]
fn diag_seeds() {
    let parsed: Vec<bool> = seeds("diag_shorthand").iter().map(|s| parse_diag_shorthand(s).is_ok()).collect();
    assert!(parsed.contains(&true) && parsed.contains(&false));
}

#[test]
fn polynomial_seeds() {
    let results: Vec<_> = seeds("polynomial_json").iter().map(|s| IntPolynomial::from_json(s)).collect();
    assert!(results.iter().any(|r| r.is_err()));
    for p in results.into_iter().flatten() {
        assert_eq!(IntPolynomial::from_json(&p.to_json()).unwrap(), p);
    }
}

#[test]
fn cell_seeds() {
    let results: Vec<_> = seeds("cell_id_json").iter().map(|s| CellId::from_json(s)).collect();
    assert!(results.iter().any(|r| r.is_err()));
    for c in results.into_iter().flatten() {
        assert_eq!(CellId::from_json(&c.to_json()).unwrap(), c);
    }
}

#[test]
fn config_seeds() {
    let results: Vec<_> = seeds("run_config").iter().map(|s| RunConfig::from_json(s)).collect();
    assert!(results.iter().any(|r| r.is_ok()) && results.iter().any(|r| r.is_err()));
}
