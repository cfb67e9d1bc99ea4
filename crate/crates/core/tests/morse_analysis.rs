mod common;

use common::*;
use morseflow::betti::IntPolynomial;
use morseflow::group_flow::{height, Family, GroupSpec};
use morseflow::morse::*;
use morseflow::spaces::SpaceSpec;
use morseflow::{Field, Mat};
use proptest::prelude::*;

fn sv(v: &[i8]) -> SignVector {
    SignVector::new(v.to_vec()).unwrap()
}

#[test]
fn enumeration() {
    assert_eq!(enumerate_critical(1).unwrap(), vec![sv(&[-1]), sv(&[1])]);
    assert_eq!(enumerate_critical(3).unwrap().len(), 8);
    assert!(enumerate_critical(0).is_err());
    assert!(enumerate_critical(21).is_err());
    let a = Mat::diag_real(Field::C, &[1.0, 2.0, 3.0]);
    for eps in enumerate_critical(3).unwrap() {
        let ax = &a * &eps.to_matrix(Field::C);
        assert_eq!((&ax - &ax.conj_transpose()).norm(), 0.0);
    }
    assert!(SignVector::new(vec![1, 0]).is_err());
}

#[test]
fn index_formula_values() {
    assert_eq!(morse_index(&sv(&[-1, -1, -1]), Field::H), 0);
    assert_eq!(morse_index(&sv(&[1, 1]), Field::C), 4);
    assert_eq!(morse_index(&sv(&[-1, 1, 1]), Field::R), 3);
}

#[test]
fn small_hessians() {
    let o2 = SpaceSpec::Group(GroupSpec::new(Family::O, 2));
    let s = hessian_signature(&Mat::diag_real(Field::R, &[1.0, 2.0]), &Mat::identity(Field::R, 2), &o2).unwrap();
    assert_eq!(s, Signature { n_plus: 0, n_minus: 1, n_zero: 0 });

    let u2 = SpaceSpec::Group(GroupSpec::new(Family::U, 2));
    let s = hessian_signature(&Mat::diag_real(Field::C, &[1.0, 3.0]), &sv(&[-1, 1]).to_matrix(Field::C), &u2).unwrap();
    assert_eq!(s.n_minus, 3);

    let lag = SpaceSpec::LagGrass(2);
    let s = hessian_signature(&Mat::diag_real(Field::C, &[1.0, 2.0]), &Mat::identity(Field::C, 2), &lag).unwrap();
    assert_eq!(s.n_minus, 3);
    assert_eq!(s.total(), lag.dim());
}

#[test]
fn hessian_rejects_non_critical_points() {
    let u2 = SpaceSpec::Group(GroupSpec::new(Family::U, 2));
    let a = Mat::diag_real(Field::C, &[1.0, 2.0]);
    let x = morseflow::random::haar(&mut morseflow::random::rng(1), Field::C, 2);
    assert!(hessian_signature(&a, &x, &u2).is_err());
}

#[test]
fn repeated_weights_give_a_degenerate_hessian() {
    let u3 = SpaceSpec::Group(GroupSpec::new(Family::U, 3));
    let a = Mat::diag_real(Field::C, &[1.0, 1.0, 2.0]);
    let s = hessian_signature(&a, &sv(&[-1, 1, 1]).to_matrix(Field::C), &u3).unwrap();
    assert!(s.n_zero > 0, "{s:?}");
    assert_eq!(s.total(), 9);
}

#[test]
fn morse_smale_matrices() {
    assert_eq!(morse_smale_matrix(2, Field::R).unwrap(), Mat::diag_real(Field::R, &[0.0, 1.0]));
    assert_eq!(morse_smale_matrix(3, Field::C).unwrap(), Mat::diag_real(Field::C, &[1.0, 3.0, 5.0]));
}

/// `f_A(diag ε) = n₋ − n₊` at the Morse–Smale matrix; both sides are exact
/// integers computed independently.
#[test]
fn morse_smale_height_counts_signature() {
    for field in FIELDS {
        for n in 1..=4 {
            let a = morse_smale_matrix(n, field).unwrap();
            let group = group_of(field, n);
            let dim = group.dim() as i64;
            for eps in enumerate_critical(n).unwrap() {
                let h = height(&a, &eps.to_matrix(field)).unwrap();
                assert_eq!(h.fract(), 0.0);
                let idx = morse_index(&eps, field) as i64;
                assert_eq!(h as i64, idx - (dim - idx), "{field} {eps:?}");
            }
        }
    }
}

#[test]
fn group_sweep_matches_formula() {
    for field in FIELDS {
        let n = 3;
        let a = Mat::diag_real(field, &[0.7, 1.3, 2.1]);
        for r in group_sweep(group_of(field, n), &a).unwrap() {
            assert_eq!(r.signature.n_zero, 0);
            assert_eq!(r.signature.n_minus, r.index_formula, "{field} {:?}", r.eps);
            assert_eq!(r.signature.total(), group_of(field, n).dim());
        }
    }
}

#[test]
fn index_polynomials() {
    assert_eq!(index_generating_polynomial(2, Field::C).unwrap(), IntPolynomial::from_u64s(&[1, 1, 0, 1, 1]));
    assert_eq!(index_generating_polynomial(2, Field::R).unwrap(), IntPolynomial::from_u64s(&[2, 2]));
    for n in 1..=8 {
        let p = index_generating_polynomial(n, Field::H).unwrap();
        assert_eq!(p.total(), num_bigint::BigUint::from(1u64 << n));
    }
}

#[test]
fn symmetric_space_census() {
    let a = [0.8, 1.7];
    for kind in SymmetricKind::ALL {
        let space = kind.space(2);
        for r in space_census(&space, &a).unwrap() {
            assert_eq!(r.signature.n_zero, 0, "{space} {:?}", r.eps);
            assert_eq!(r.signature.n_minus, r.index_formula, "{space} {:?}", r.eps);
            assert_eq!(r.signature.total(), space.dim(), "{space}");
        }
    }
}

#[test]
fn grassmann_census() {
    let space = SpaceSpec::Grassmann { n: 4, m: 2, field: Field::C };
    let records = space_census(&space, &[0.5, 1.0, 1.5, 2.5]).unwrap();
    assert_eq!(records.len(), 6);
    for r in records {
        assert_eq!(r.signature.n_minus, r.index_formula);
        assert_eq!(r.signature.n_zero, 0);
    }
}

#[test]
fn shifts() {
    let k = |kind: SymmetricKind| (0..4).map(|k| kind.shift(k)).collect::<Vec<_>>();
    assert_eq!(k(SymmetricKind::LagGrass), vec![0, 1, 3, 6]);
    assert_eq!(k(SymmetricKind::ComplexStruct), vec![0, 0, 2, 6]);
    assert_eq!(k(SymmetricKind::QuatStruct), vec![0, 1, 6, 15]);
    assert_eq!(k(SymmetricKind::SpModU), vec![0, 2, 6, 12]);
}

proptest! {
    #[test]
    fn sign_vector_serde(v in prop::collection::vec(prop::bool::ANY, 1..12)) {
        let s = SignVector::new(v.iter().map(|&b| if b { 1 } else { -1 }).collect()).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        prop_assert_eq!(serde_json::from_str::<SignVector>(&text).unwrap(), s);
    }

    #[test]
    fn index_plus_coindex_is_dimension(v in prop::collection::vec(prop::bool::ANY, 1..10), f in 0usize..3) {
        let field = FIELDS[f];
        let s = SignVector::new(v.iter().map(|&b| if b { 1 } else { -1 }).collect()).unwrap();
        let flipped = SignVector::new(s.signs().iter().map(|x| -x).collect()).unwrap();
        let n = s.len();
        prop_assert_eq!(morse_index(&s, field) + morse_index(&flipped, field), group_of(field, n).dim());
    }
}
