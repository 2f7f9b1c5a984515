//! Strategies shared by the property suites and the acceptance run.
#![allow(dead_code)]

use std::collections::BTreeMap;

use filiform_core::dataset::render_combination;
use filiform_core::linalg::RationalMatrix;
use filiform_core::scalar::{int, rat, Monomial, Rational, Scalar};
use proptest::prelude::*;

pub fn rational() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=7).prop_map(|(n, d)| rat(n, d))
}

pub fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (1i64..=9, 1i64..=5, any::<bool>()).prop_map(|(n, d, neg)| rat(if neg { -n } else { n }, d))
}

pub fn scalar() -> impl Strategy<Value = Scalar> {
    prop::collection::vec(((-4i64..=4, 0u32..=2), rational()), 0..6)
        .prop_map(|terms| Scalar::from_terms(terms.into_iter().map(|((t, a), c)| (Monomial::new(t, a), c))))
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

pub fn rational_matrix(r: usize, c: usize) -> impl Strategy<Value = RationalMatrix> {
    prop::collection::vec(small_rational(), r * c)
        .prop_map(move |v| RationalMatrix::from_fn(r, c, |i, j| v[i * c + j].clone()))
}

fn rational_text() -> impl Strategy<Value = String> {
    (-12i64..=12, 1i64..=6).prop_map(|(n, d)| if d == 1 { n.to_string() } else { format!("{n}/{d}") })
        .prop_map(|s| if s.starts_with('-') { format!("({s})") } else { s })
}

/// Scalar expressions over the given atoms, as source text.
fn expr_text(atoms: Vec<&'static str>) -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        rational_text(),
        prop::sample::select(atoms).prop_map(str::to_string),
        (1i64..=3).prop_map(|k| format!("t^-{k}")),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} + {b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} - {b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
            (inner.clone(), 0i64..=3).prop_map(|(a, k)| format!("({a})^{k}")),
            inner.prop_map(|a| format!("(-{a})")),
        ]
    })
}

fn vector_text(dim: usize) -> impl Strategy<Value = String> {
    prop::collection::btree_map(1..=dim, expr_text(vec!["alpha", "1"]), 1..3).prop_map(|m| {
        m.into_iter()
            .map(|(k, c)| format!("({c})*Y{k}"))
            .collect::<Vec<_>>()
            .join(" + ")
    })
}

fn comment() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9 ,.]{0,20}[a-z0-9]"
}

#[derive(Debug, Clone)]
pub struct RandomFile(pub String);

pub fn random_file() -> impl Strategy<Value = RandomFile> {
    (3usize..=8).prop_flat_map(|dim| {
        let brackets = prop::collection::btree_map((1..=dim, 1..=dim), vector_text(dim), 0..6);
        let basis = prop::collection::btree_map(
            1..=dim,
            prop::collection::btree_map(1..=dim, (-5i64..=5, 1i64..=4), 1..3),
            0..3,
        );
        let deformation = prop::option::of(prop::collection::vec((-3i64..=9, 1i64..=2), dim - 1));
        let derivation = prop::collection::btree_map((1..=dim, 1..=dim), (-4i64..=4, 1i64..=3), 0..4);
        let polys = prop::collection::vec(expr_text(vec!["t", "alpha"]), 0..4);
        let entries = prop::collection::btree_map((1..=dim, 1..=dim), expr_text(vec!["t", "p1", "alpha"]), 0..5);
        let errata = prop::collection::vec(
            (expr_text(vec!["t"]), expr_text(vec!["t"]), comment()),
            0..3,
        );
        (
            Just(dim),
            any::<bool>(),
            prop::collection::vec(comment(), 0..3),
            brackets,
            basis,
            deformation,
            derivation,
            (prop::option::of(Just("t^-1")), polys, entries),
            errata,
        )
    })
    .prop_map(|(dim, alpha, comments, brackets, basis, deformation, derivation, cert, errata)| {
        let mut s = String::new();
        for c in comments {
            s += &format!("# {c}\n");
        }
        s += &format!("[algebra]\nname = rnd\ndim = {dim}\nparams = {}\n", if alpha { "alpha" } else { "" });
        if !basis.is_empty() {
            s += "\n[basis-change]\n";
            for (y, terms) in basis {
                let terms: Vec<_> = terms.into_iter().map(|(x, (n, d))| (x, rat(n, d))).filter(|(_, c)| *c != int(0)).collect();
                s += &format!("Y{y} = {}\n", render_combination(&terms, 'X'));
            }
        }
        let brackets: BTreeMap<_, _> = brackets.into_iter().filter(|((i, j), _)| i < j).collect();
        if !brackets.is_empty() {
            s += "\n[brackets]\n";
            for ((i, j), v) in brackets {
                s += &format!("bracket {i} {j} = {v}\n");
            }
        }
        if let Some(diag) = deformation {
            s += "\n[deformation]\n";
            s += &format!("ideal = {}\n", (2..=dim).map(|i| i.to_string()).collect::<Vec<_>>().join(" "));
            s += "outside = 1\n";
            s += &format!("diag = {}\n", diag.iter().map(|(n, d)| if *d == 1 { n.to_string() } else { format!("{n}/{d}") }).collect::<Vec<_>>().join(" "));
        }
        if !derivation.is_empty() {
            s += "\n[derivation]\n";
            for ((r, c), (n, d)) in derivation {
                s += &format!("d {r} {c} = {n}/{d}\n");
            }
        }
        let (parameter, polys, entries) = cert;
        if parameter.is_some() || !polys.is_empty() || !entries.is_empty() {
            s += "\n[certificate]\n";
            if let Some(p) = parameter {
                s += &format!("parameter = {p}\n");
            }
            for (k, p) in polys.iter().enumerate() {
                s += &format!("p{} = {p}\n", k + 1);
            }
            for ((r, c), e) in entries {
                s += &format!("g {r} {c} = {e}\n");
            }
        }
        if !errata.is_empty() {
            s += "\n[errata]\n";
            for (k, (o, c, j)) in errata.into_iter().enumerate() {
                s += &format!("entry = certificate.g.1.{}\noriginal = {o}\ncorrected = {c}\njustification = {j}\n\n", k + 1);
            }
        }
        RandomFile(s)
    })
}

