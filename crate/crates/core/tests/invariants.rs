use std::collections::BTreeMap;
use std::sync::OnceLock;

use filiform_core::corpus;
use filiform_core::dataset::ErrataMode;
use filiform_core::deformation::deformation_of;
use filiform_core::invariants::{
    center_dim, characteristic_nilpotency, derivation_algebra, derivation_system, derived_series,
    invariant_report, is_characteristically_nilpotent, is_filiform, lower_central_series, InvariantReport,
    Sampling,
};
use filiform_core::lie::RationalAlgebra;
use filiform_core::linalg::rat_nullspace;
use filiform_core::scalar::{int, Rational};

fn reports() -> &'static BTreeMap<&'static str, InvariantReport> {
    static R: OnceLock<BTreeMap<&'static str, InvariantReport>> = OnceLock::new();
    R.get_or_init(|| {
        corpus::TABLES
            .iter()
            .map(|n| {
                let a = corpus::load(n, ErrataMode::Corrected).unwrap();
                (*n, invariant_report(&a, &Sampling::default()).unwrap())
            })
            .collect()
    })
}

fn specialized(name: &str, alpha: i64) -> RationalAlgebra {
    let a = corpus::load(name, ErrataMode::Verbatim).unwrap();
    a.mu.specialize(&int(1), &int(alpha)).unwrap()
}

fn deformed(name: &str, t: i64, alpha: i64) -> RationalAlgebra {
    let a = corpus::load(name, ErrataMode::Verbatim).unwrap();
    deformation_of(&a).unwrap().0.specialize(&int(t), &int(alpha)).unwrap()
}

const DERIVED: [(&str, &[usize]); 10] = [
    ("mu01", &[8, 6, 2, 0]),
    ("mu02", &[8, 6, 1, 0]),
    ("mu06", &[8, 6, 2, 0]),
    ("mu08", &[8, 6, 2, 0]),
    ("mu09", &[8, 6, 1, 0]),
    ("mu10", &[8, 6, 0]),
    ("mu11", &[8, 6, 0]),
    ("mu13", &[8, 6, 1, 0]),
    ("mu15", &[8, 6, 0]),
    ("mu17", &[8, 6, 0]),
];

const DER_DIMS: [(&str, usize); 10] = [
    ("mu01", 10),
    ("mu02", 10),
    ("mu06", 10),
    ("mu08", 10),
    ("mu09", 11),
    ("mu10", 12),
    ("mu11", 12),
    ("mu13", 12),
    ("mu15", 12),
    ("mu17", 13),
];

const DEFORMED_DERIVED: [(&str, &[usize]); 10] = [
    ("mu01", &[8, 7, 5, 1, 0]),
    ("mu02", &[8, 7, 5, 1, 0]),
    ("mu06", &[8, 7, 5, 0]),
    ("mu08", &[8, 7, 4, 0]),
    ("mu09", &[8, 7, 5, 0]),
    ("mu10", &[8, 7, 5, 0]),
    ("mu11", &[8, 7, 5, 0]),
    ("mu13", &[8, 7, 5, 0]),
    ("mu15", &[8, 7, 5, 0]),
    ("mu17", &[8, 7, 5, 0]),
];

fn is_minus_one(a: &Option<Rational>) -> bool {
    *a == Some(int(-1))
}

#[test]
fn filiform_profile_and_center() {
    for (name, r) in reports() {
        for p in &r.base {
            assert_eq!(p.lcs.dims(), &[8, 6, 5, 4, 3, 2, 1, 0], "{name}");
            assert!(p.filiform, "{name}");
            assert_eq!(p.center_dim, 1, "{name}");
        }
    }
}

#[test]
fn derived_series_of_mu() {
    for (name, expected) in DERIVED {
        for p in &reports()[name].base {
            assert_eq!(p.derived.dims(), expected, "{name}");
            assert!(p.derived.steps_to_zero().unwrap() <= 3);
        }
    }
}

#[test]
fn derivation_dimensions() {
    for (name, expected) in DER_DIMS {
        for p in &reports()[name].base {
            let want = if name == "mu06" && is_minus_one(&p.alpha) { 11 } else { expected };
            assert_eq!(p.char_nilpotency.der_dim, want, "{name} {:?}", p.alpha);
            assert!(p.der_verified, "{name}");
        }
    }
}

#[test]
fn characteristic_nilpotency_except_mu06_at_minus_one() {
    for (name, r) in reports() {
        for p in &r.base {
            let exceptional = *name == "mu06" && is_minus_one(&p.alpha);
            assert_eq!(p.char_nilpotency.nilpotent, !exceptional, "{name} {:?}", p.alpha);
        }
    }
    let c = characteristic_nilpotency(&specialized("mu06", -1));
    assert_eq!(c.chain, vec![11, 10, 10]);
}

#[test]
fn deformed_algebras_are_solvable_not_nilpotent() {
    for (name, expected) in DEFORMED_DERIVED {
        let r = &reports()[name];
        let alphas = if r.base.len() > 1 { 5 } else { 1 };
        assert_eq!(r.deformed.len(), 3 * alphas, "{name}");
        for p in &r.deformed {
            assert_eq!(p.lcs.dims(), &[8, 7, 7], "{name}");
            assert_eq!(p.derived.dims(), expected, "{name}");
            assert!(p.solvable() && !p.nilpotent());
        }
    }
}

#[test]
fn only_mu06_violates_expectations() {
    for (name, r) in reports() {
        let v = r.violations();
        if *name == "mu06" {
            assert_eq!(v.len(), 1, "{v:?}");
            assert!(v[0].contains("alpha=-1"));
        } else {
            assert!(v.is_empty(), "{name}: {v:?}");
        }
    }
}

#[test]
fn mu11_derivation_system() {
    let a = specialized("mu11", 0);
    let m = derivation_system(&a);
    assert_eq!((m.rows(), m.cols()), (224, 64));
    assert_eq!(rat_nullspace(&m).len(), 12);
    let der = derivation_algebra(&a);
    assert!(der.iter().all(|d| a.is_derivation(d)));
}

#[test]
fn mu15_deformed_at_one() {
    let a = deformed("mu15", 1, 0);
    assert_eq!(derivation_algebra(&a).len(), 9);
    assert!(!is_characteristically_nilpotent(&a));
    assert!(!is_filiform(&a));
}

#[test]
fn mu17_deformed_at_one_stabilizes_above_zero() {
    let s = lower_central_series(&deformed("mu17", 1, 0));
    assert!(!s.reaches_zero());
    assert_eq!(s.last(), 7);
}

#[test]
fn mu09_deformed_at_one_alpha_two_is_solvable() {
    assert!(derived_series(&deformed("mu09", 1, 2)).reaches_zero());
}

#[test]
fn mu06_alpha_two_is_characteristically_nilpotent() {
    assert!(is_characteristically_nilpotent(&specialized("mu06", 2)));
}

#[test]
fn mu15_center() {
    assert_eq!(center_dim(&specialized("mu15", 0)), 1);
}

#[test]
fn zero_t_sample_is_rejected() {
    assert!(Sampling::new(vec![int(0)], vec![]).is_err());
    assert!(Sampling::new(vec![int(3)], vec![int(0)]).is_ok());
}
