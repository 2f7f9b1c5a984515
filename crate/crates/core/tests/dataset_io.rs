mod common;

use filiform_core::corpus;
use common::random_file;
use filiform_core::dataset::{serialize_algebra, AlgebraFile, ErrataMode};
use filiform_core::expr::{parse_expression, parse_scalar};
use filiform_core::scalar::{int, rat, Scalar};
use filiform_core::Error;
use proptest::prelude::*;

#[test]
fn every_shipped_file_elaborates_in_both_modes() {
    for name in corpus::file_names() {
        for mode in [ErrataMode::Verbatim, ErrataMode::Corrected] {
            let a = corpus::load(name, mode).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(a.dim, 8, "{name}");
        }
    }
    assert_eq!(corpus::file_names().count(), 20);
}

#[test]
fn shipped_round_trip_is_byte_stable() {
    for name in corpus::file_names() {
        let f = corpus::file(name).unwrap();
        let s1 = serialize_algebra(&f);
        let f2 = AlgebraFile::parse(&s1).unwrap();
        assert_eq!(f2, f, "{name}");
        assert_eq!(serialize_algebra(&f2), s1, "{name}");
    }
}

#[test]
fn mu11_contents() {
    let f = corpus::file("mu11").unwrap();
    assert_eq!(f.brackets.len(), 10);
    let d = f.deformation.as_ref().unwrap();
    assert_eq!(d.diag, (1..=7).map(int).collect::<Vec<_>>());
    assert_eq!(f.certificate.as_ref().unwrap().polys.len(), 12);
    let a = corpus::load("mu11", ErrataMode::Verbatim).unwrap();
    let p1 = a.poly("p1").unwrap();
    assert_eq!(*p1, &Scalar::monomial(rat(-8, 5), 5, 0) + &Scalar::monomial(rat(8, 5), 1, 0));
}

#[test]
fn mu08_has_inverse_t_entry() {
    let a = corpus::load("mu08", ErrataMode::Verbatim).unwrap();
    let g = &a.certificate.as_ref().unwrap().g;
    assert_eq!(g[(0, 0)], Scalar::t_pow(-1));
    assert_eq!(a.certificate.as_ref().unwrap().parameter, Scalar::t());
    let c = corpus::load("mu08", ErrataMode::Corrected).unwrap();
    assert_eq!(c.certificate.as_ref().unwrap().parameter, Scalar::t_pow(-1));
    assert_eq!(c.errata.len(), 2);
}

#[test]
fn mu10_typographical_erratum_changes_nothing() {
    let v = corpus::load("mu10", ErrataMode::Verbatim).unwrap();
    let c = corpus::load("mu10", ErrataMode::Corrected).unwrap();
    assert_eq!(v.certificate, c.certificate);
    assert_eq!(c.errata.len(), 1);
    assert_eq!(c.errata[0].entry, "certificate.g.5.2");
}

#[test]
fn every_erratum_is_justified() {
    for name in corpus::TABLES {
        for er in &corpus::file(name).unwrap().errata {
            assert!(er.justification.len() > 20, "{name} {}", er.entry);
        }
    }
}

#[test]
fn mu06_keeps_alpha() {
    let f = corpus::file("mu06").unwrap();
    assert_eq!(f.params, vec!["alpha".to_string()]);
    let s = serialize_algebra(&f);
    assert!(s.contains("params = alpha"));
    assert!(s.contains("alpha"));
    let a = corpus::load("mu06", ErrataMode::Verbatim).unwrap();
    assert!(a.has_alpha());
}

#[test]
fn mu17_second_serialization_identical() {
    let f = corpus::file("mu17").unwrap();
    let once = serialize_algebra(&AlgebraFile::parse(&serialize_algebra(&f)).unwrap());
    let twice = serialize_algebra(&AlgebraFile::parse(&once).unwrap());
    assert_eq!(once, twice);
}

#[test]
fn metadata_files_are_inert() {
    for name in corpus::META {
        let a = corpus::load(&format!("{name}-meta"), ErrataMode::Verbatim).unwrap();
        assert!(a.mu.is_zero());
        assert!(a.certificate.is_none());
        assert!(a.derivation.is_some(), "{name}");
        let s = serialize_algebra(&corpus::file(&format!("{name}-meta")).unwrap());
        assert!(!s.contains("[brackets]") && !s.contains("[certificate]"));
    }
}

const BASE: &str = "[algebra]\nname = x\ndim = 8\nparams =\n\n[brackets]\n";

#[test]
fn bracket_index_nine_is_a_validation_error() {
    let text = format!("{BASE}bracket 1 9 = Y2\n");
    let err = AlgebraFile::parse(&text)
        .and_then(|f| f.elaborate("x", ErrataMode::Verbatim))
        .unwrap_err();
    assert!(matches!(err, Error::Validation { .. }), "{err}");
}

#[test]
fn expression_examples() {
    let e = parse_expression("-(8/5)*t*(t^4-1)").unwrap();
    assert_eq!(
        e.to_scalar().unwrap(),
        &Scalar::monomial(rat(-8, 5), 5, 0) + &Scalar::monomial(rat(8, 5), 1, 0)
    );
    assert!(parse_scalar("0").unwrap().is_zero());
    let err = parse_expression("t^").unwrap_err();
    assert_eq!((err.line, err.column), (1, 3));
}

#[test]
fn negative_powers_only_on_t() {
    assert_eq!(parse_scalar("t^-3").unwrap(), Scalar::t_pow(-3));
    assert!(parse_expression("alpha^-1").is_err());
    assert!(parse_expression("(t+1)^-1").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_files_round_trip(f in random_file()) {
        let a = AlgebraFile::parse(&f.0).map_err(|e| TestCaseError::fail(format!("{e}\n{}", f.0)))?;
        let s1 = serialize_algebra(&a);
        let b = AlgebraFile::parse(&s1).map_err(|e| TestCaseError::fail(format!("{e}\n{s1}")))?;
        prop_assert_eq!(&b, &a);
        prop_assert_eq!(serialize_algebra(&b), s1);
    }

    #[test]
    fn canonical_form_is_idempotent(f in random_file()) {
        let s1 = serialize_algebra(&AlgebraFile::parse(&f.0).unwrap());
        let s2 = serialize_algebra(&AlgebraFile::parse(&s1).unwrap());
        let s3 = serialize_algebra(&AlgebraFile::parse(&s2).unwrap());
        prop_assert_eq!(&s2, &s1);
        prop_assert_eq!(s3, s2);
    }
}
