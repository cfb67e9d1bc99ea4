mod common;

use common::*;
use morseflow::betti::IntPolynomial;
use morseflow::group_flow::closed_flow;
use morseflow::morse::{index_generating_polynomial, SignVector};
use morseflow::random::{haar, random_subspace, rng};
use morseflow::schubert::*;
use morseflow::{Error, Field, Mat};
use proptest::prelude::*;

fn symbol(j: &[usize], n: usize) -> SchubertSymbol {
    SchubertSymbol::new(j.to_vec(), n).unwrap()
}

#[test]
fn symbols_of_simple_subspaces() {
    let e = Mat::identity(Field::C, 4);
    assert_eq!(schubert_symbol(&e.columns([0, 2])).unwrap(), symbol(&[1, 3], 4));
    let line = Mat::from_rows(&[&[1.0], &[1.0], &[0.0]]);
    assert_eq!(schubert_symbol(&line).unwrap(), symbol(&[2], 3));
    let mut g = rng(1);
    for field in FIELDS {
        let z = random_subspace(&mut g, field, 5, 2);
        assert_eq!(schubert_symbol(&z).unwrap(), symbol(&[4, 5], 5));
    }
}

#[test]
fn cell_dimensions() {
    assert_eq!(symbol(&[3, 4], 4).grassmann_cell_dim(Field::C), 8);
    assert_eq!(symbol(&[1, 2, 3], 5).grassmann_cell_dim(Field::H), 0);
    assert_eq!(CellId::new(symbol(&[1, 2, 3], 3)).group_cell_dim(Field::C), 9);
}

#[test]
fn coordinate_classification() {
    let a = Mat::diag_real(Field::R, &[1.0, 2.0, 3.0]);
    let x = Mat::diag_real(Field::R, &[1.0, -1.0, 1.0]);
    assert_eq!(classify(&x, &a).unwrap(), CellId::new(symbol(&[1, 3], 3)));
    let minus = Mat::identity(Field::R, 3).scale(-1.0);
    assert_eq!(classify(&minus, &a).unwrap().m, 0);
}

#[test]
fn classify_validates_inputs() {
    let x = Mat::identity(Field::R, 3);
    assert!(classify(&x, &Mat::diag_real(Field::R, &[3.0, 2.0, 1.0])).is_err());
    assert!(classify(&x, &Mat::diag_real(Field::R, &[1.0, 1.0, 2.0])).is_err());
    assert!(classify(&x.scale(2.0), &Mat::diag_real(Field::R, &[1.0, 2.0, 3.0])).is_err());
}

#[test]
fn near_minus_one_is_ambiguous() {
    let a = Mat::diag_real(Field::C, &[1.0, 2.0, 3.0]);
    let th = std::f64::consts::PI - 1e-6;
    let (c, s) = (th.cos(), th.sin());
    let x = Mat::from_rows(&[&[c, -s, 0.0], &[s, c, 0.0], &[0.0, 0.0, 1.0]]);
    assert!(matches!(classify(&x.promote(Field::C), &a), Err(Error::Ambiguous(_))));
}

#[test]
fn classification_agrees_with_flow_limit() {
    for (field, n) in [(Field::C, 3), (Field::R, 4), (Field::H, 2)] {
        let a = Mat::diag_real(field, &(1..=n).map(|k| k as f64).collect::<Vec<_>>());
        let mut g = rng(2);
        for _ in 0..50 {
            let x = haar(&mut g, field, n);
            let Ok(cell) = classify(&x, &a) else { continue };
            let limit = nearest_critical(&closed_flow(&a, &x, 60.0).unwrap());
            assert_eq!(limit, Some(cell.critical_point(n).unwrap()), "{field}");
        }
    }
}

/// Cells are unions of flow lines: the label does not change along the flow.
#[test]
fn cells_are_flow_invariant() {
    for field in FIELDS {
        let n = 3;
        let a = Mat::diag_real(field, &[0.3, 0.6, 1.0]);
        let mut g = rng(3);
        for k in 0..n {
            for _ in 0..20 {
                let x = sample_with_minus_one_dim(&mut g, field, n, k);
                let cell = classify(&x, &a).unwrap();
                for t in [0.5, 1.0, 5.0] {
                    let y = closed_flow(&a, &x, t).unwrap();
                    assert_eq!(classify(&y, &a).unwrap(), cell, "{field} k={k} t={t}");
                }
            }
        }
    }
}

#[test]
fn lower_cells_reach_their_critical_point() {
    let a = Mat::diag_real(Field::C, &[1.0, 2.0, 3.0]);
    let mut g = rng(4);
    for k in 0..3 {
        for _ in 0..10 {
            let x = sample_with_minus_one_dim(&mut g, Field::C, 3, k);
            let cell = classify(&x, &a).unwrap();
            assert_eq!(cell.m, 3 - k);
            assert_eq!(flow_limit(&a, &x, 200.0).unwrap(), Some(cell.critical_point(3).unwrap()));
        }
    }
}

#[test]
fn cell_dimension_polynomial_is_the_index_polynomial() {
    for field in FIELDS {
        for n in 1..=6 {
            let mut p = IntPolynomial::zero();
            for cell in enumerate_cells(n) {
                p = &p + &IntPolynomial::monomial(cell.group_cell_dim(field));
            }
            assert_eq!(p, index_generating_polynomial(n, field).unwrap());
        }
    }
}

#[test]
fn shared_decomposition() {
    let a1 = Mat::diag_real(Field::C, &[1.0, 2.0, 3.0]);
    let a2 = Mat::diag_real(Field::C, &[1.0, 3.0, 5.0]);
    let r = shared_decomposition_check(&a1, &a2, Field::C, 100, 1).unwrap();
    assert!(r.passed, "{r:?}");
    assert!(shared_decomposition_check(&a1, &a1, Field::C, 50, 2).unwrap().passed);
    let permuted = Mat::diag_real(Field::C, &[3.0, 2.0, 1.0]);
    let r = shared_decomposition_check(&a1, &permuted, Field::C, 60, 3).unwrap();
    assert!(!r.passed && r.mismatches > 0, "{r:?}");
}

#[test]
fn cell_json() {
    let c = CellId::new(symbol(&[1, 3], 4));
    assert_eq!(c.to_json(), "{\"jumps\":[1,3],\"m\":2}");
    assert_eq!(CellId::from_json(&c.to_json()).unwrap(), c);
    assert!(CellId::from_json("{\"m\":1,\"jumps\":[]}").is_err());
    assert!(CellId::from_json("{\"m\":2,\"jumps\":[3,1]}").is_err());
    assert!(CellId::from_json("{\"m\":0,\"jumps\":[],\"x\":0}").is_err());
}

proptest! {
    #[test]
    fn partitions_round_trip(bits in 1u32..(1 << 10)) {
        let n = 10;
        let jumps: Vec<usize> = (1..=n).filter(|j| bits >> (j - 1) & 1 == 1).collect();
        let s = SchubertSymbol::new(jumps, n).unwrap();
        let lambda = s.to_partition();
        prop_assert_eq!(SchubertSymbol::from_partition(&lambda, n).unwrap(), s.clone());
        prop_assert_eq!(lambda.iter().sum::<usize>(), s.grassmann_cell_dim(Field::R));
    }

    #[test]
    fn critical_points_round_trip(v in prop::collection::vec(prop::bool::ANY, 1..10)) {
        let eps = SignVector::new(v.iter().map(|&b| if b { 1 } else { -1 }).collect()).unwrap();
        let cell = CellId::from_critical_point(&eps);
        prop_assert_eq!(cell.critical_point(eps.len()).unwrap(), eps);
    }
}
