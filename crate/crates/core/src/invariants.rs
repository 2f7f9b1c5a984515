//! Isomorphism invariants of rational Lie algebras.

use std::fmt;

use rayon::prelude::*;

use crate::dataset::Algebra;
use crate::deformation::deformation_of;
use crate::lie::{pairs, RationalAlgebra};
use crate::linalg::{rat_nullspace, rat_rank, row_space_basis, RationalMatrix};
use crate::scalar::{fmt_rational, int, rat, Rational, Ring};
use crate::{Error, Result};

/// Dimensions of successive terms of a series. Ends at the first 0, or
/// with a nonzero stable value written twice.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeriesProfile(pub Vec<usize>);

impl SeriesProfile {
    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn last(&self) -> usize {
        *self.0.last().expect("profile is never empty")
    }

    /// The series reaches 0.
    pub fn reaches_zero(&self) -> bool {
        self.last() == 0
    }

    /// Number of steps until 0 (`None` if it stabilizes above 0).
    pub fn steps_to_zero(&self) -> Option<usize> {
        self.reaches_zero().then(|| self.0.len() - 1)
    }
}

impl fmt::Display for SeriesProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// RREF basis of `span{[u, v] : u in us, v in vs}`.
fn bracket_span(a: &RationalAlgebra, us: &[Vec<Rational>], vs: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut gens = Vec::new();
    for u in us {
        for v in vs {
            let w = a.eval(u, v).expect("dimensions agree");
            if w.iter().any(|x| !Ring::is_zero(x)) {
                gens.push(w);
            }
        }
    }
    row_space_basis(&gens, a.dim())
}

fn identity_rows(n: usize) -> Vec<Vec<Rational>> {
    (0..n).map(|i| crate::lie::basis_vector(n, i)).collect()
}

fn series(a: &RationalAlgebra, derived: bool) -> SeriesProfile {
    let n = a.dim();
    let whole = identity_rows(n);
    let mut current = whole.clone();
    let mut dims = vec![n];
    loop {
        if current.is_empty() {
            break;
        }
        let next = if derived {
            bracket_span(a, &current, &current)
        } else {
            bracket_span(a, &whole, &current)
        };
        let d = next.len();
        let stable = d == current.len();
        dims.push(d);
        if stable {
            break;
        }
        current = next;
    }
    SeriesProfile(dims)
}

/// `g, [g,g], [g,[g,g]], ...`
pub fn lower_central_series(a: &RationalAlgebra) -> SeriesProfile {
    series(a, false)
}

/// `g, [g,g], [[g,g],[g,g]], ...`
pub fn derived_series(a: &RationalAlgebra) -> SeriesProfile {
    series(a, true)
}

pub fn is_nilpotent(a: &RationalAlgebra) -> bool {
    lower_central_series(a).reaches_zero()
}

pub fn is_solvable(a: &RationalAlgebra) -> bool {
    derived_series(a).reaches_zero()
}

/// Nilpotent of maximal class: profile `(n, n-2, n-3, ..., 1, 0)`.
pub fn is_filiform(a: &RationalAlgebra) -> bool {
    let n = a.dim();
    if n < 3 {
        return false;
    }
    let mut expected = vec![n];
    expected.extend((0..=n - 2).rev());
    lower_central_series(a).0 == expected
}

/// `dim {x : [x, b_i] = 0 for all i}`.
pub fn center_dim(a: &RationalAlgebra) -> usize {
    let n = a.dim();
    // Row (i, k): coefficient of x_j is [b_j, b_i]_k.
    let m = RationalMatrix::from_fn(n * n, n, |r, j| a.basis_bracket(j, r / n)[r % n].clone());
    n - rat_rank(&m)
}

/// The derivation system: unknown `E[m][i]` at column `m * n + i`, one row
/// per pair `i < j` and component `k`.
pub fn derivation_system(a: &RationalAlgebra) -> RationalMatrix {
    let n = a.dim();
    let npairs = n * (n - 1) / 2;
    let mut m = RationalMatrix::zeros(npairs * n, n * n);
    let brackets: Vec<Vec<Vec<Rational>>> =
        (0..n).map(|i| (0..n).map(|j| a.basis_bracket(i, j)).collect()).collect();
    for (p, (i, j)) in pairs(n).enumerate() {
        for k in 0..n {
            let row = p * n + k;
            // E [b_i, b_j]: sum_m c_ij^m E[k][m]
            for (mm, c) in brackets[i][j].iter().enumerate() {
                if !Ring::is_zero(c) {
                    m[(row, k * n + mm)] = &m[(row, k * n + mm)] + c;
                }
            }
            // - [E b_i, b_j] = - sum_m E[m][i] [b_m, b_j]_k
            for mm in 0..n {
                let c = &brackets[mm][j][k];
                if !Ring::is_zero(c) {
                    m[(row, mm * n + i)] = &m[(row, mm * n + i)] - c;
                }
                let c = &brackets[i][mm][k];
                if !Ring::is_zero(c) {
                    m[(row, mm * n + j)] = &m[(row, mm * n + j)] - c;
                }
            }
        }
    }
    m
}

/// Basis of `Der(a)` as `n x n` matrices acting on columns.
pub fn derivation_algebra(a: &RationalAlgebra) -> Vec<RationalMatrix> {
    let n = a.dim();
    rat_nullspace(&derivation_system(a))
        .into_iter()
        .map(|v| RationalMatrix::from_fn(n, n, |r, c| v[r * n + c].clone()))
        .collect()
}

fn flatten(m: &RationalMatrix) -> Vec<Rational> {
    m.entries().to_vec()
}

fn commutator(a: &RationalMatrix, b: &RationalMatrix) -> RationalMatrix {
    a.mul(b).expect("square").sub(&b.mul(a).expect("square")).expect("same shape")
}

/// Dimensions of `V_1 = Der`, `V_{m+1} = [Der, V_m]` and the verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacteristicNilpotency {
    pub der_dim: usize,
    pub chain: Vec<usize>,
    pub nilpotent: bool,
}

/// `Der(a)` is a nilpotent Lie algebra. Iterates the lower central series of
/// `Der` at most `dim Der + 1` times.
pub fn characteristic_nilpotency(a: &RationalAlgebra) -> CharacteristicNilpotency {
    let n = a.dim();
    let der = derivation_algebra(a);
    let der_dim = der.len();
    let mut current = der.clone();
    let mut chain = vec![der_dim];
    for _ in 0..=der_dim {
        if current.is_empty() {
            break;
        }
        let gens: Vec<Vec<Rational>> = der
            .iter()
            .flat_map(|x| current.iter().map(move |y| flatten(&commutator(x, y))))
            .collect();
        let basis = row_space_basis(&gens, n * n);
        let stalled = basis.len() == current.len();
        chain.push(basis.len());
        current = basis
            .into_iter()
            .map(|v| RationalMatrix::from_fn(n, n, |r, c| v[r * n + c].clone()))
            .collect();
        if stalled {
            break;
        }
    }
    CharacteristicNilpotency {
        der_dim,
        nilpotent: current.is_empty(),
        chain,
    }
}

pub fn is_characteristically_nilpotent(a: &RationalAlgebra) -> bool {
    characteristic_nilpotency(a).nilpotent
}

/// Rational points at which invariants are evaluated.
#[derive(Clone, Debug, PartialEq)]
pub struct Sampling {
    t: Vec<Rational>,
    alpha: Vec<Rational>,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            t: vec![int(1), int(2), int(-1)],
            alpha: vec![int(0), int(1), int(-1), int(2), rat(1, 3)],
        }
    }
}

impl Sampling {
    /// Fails with `ZeroTSample` if a `t` sample is 0.
    pub fn new(t: Vec<Rational>, alpha: Vec<Rational>) -> Result<Self> {
        if t.iter().any(Ring::is_zero) {
            return Err(Error::ZeroTSample);
        }
        Ok(Sampling { t, alpha })
    }

    pub fn t(&self) -> &[Rational] {
        &self.t
    }

    pub fn alpha(&self) -> &[Rational] {
        &self.alpha
    }

    pub fn describe(&self) -> String {
        let list = |v: &[Rational]| v.iter().map(fmt_rational).collect::<Vec<_>>().join(", ");
        format!("t in {{{}}}, alpha in {{{}}}", list(&self.t), list(&self.alpha))
    }
}

/// Invariants of the algebra itself at one `alpha`.
#[derive(Clone, Debug, PartialEq)]
pub struct BasePoint {
    pub alpha: Option<Rational>,
    pub lcs: SeriesProfile,
    pub derived: SeriesProfile,
    pub filiform: bool,
    pub center_dim: usize,
    /// Every Der basis matrix passes the derivation identity.
    pub der_verified: bool,
    pub char_nilpotency: CharacteristicNilpotency,
}

/// Invariants of the deformed algebra at one `(t, alpha)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformedPoint {
    pub t: Rational,
    pub alpha: Option<Rational>,
    pub lcs: SeriesProfile,
    pub derived: SeriesProfile,
}

impl DeformedPoint {
    pub fn solvable(&self) -> bool {
        self.derived.reaches_zero()
    }

    pub fn nilpotent(&self) -> bool {
        self.lcs.reaches_zero()
    }
}

pub fn base_point(a: &RationalAlgebra, alpha: Option<Rational>) -> BasePoint {
    let der = derivation_algebra(a);
    BasePoint {
        alpha,
        lcs: lower_central_series(a),
        derived: derived_series(a),
        filiform: is_filiform(a),
        center_dim: center_dim(a),
        der_verified: der.iter().all(|d| a.is_derivation(d)),
        char_nilpotency: characteristic_nilpotency(a),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantReport {
    pub algebra: String,
    pub sampling: Sampling,
    pub base: Vec<BasePoint>,
    pub deformed: Vec<DeformedPoint>,
}

fn at(alpha: &Option<Rational>) -> String {
    match alpha {
        Some(a) => format!(" at alpha={}", fmt_rational(a)),
        None => String::new(),
    }
}

impl InvariantReport {
    /// Expected flags that do not hold, one line each.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for p in &self.base {
            let w = at(&p.alpha);
            if !p.filiform {
                out.push(format!("not filiform{w}: lcs {}", p.lcs));
            }
            if p.center_dim != 1 {
                out.push(format!("center dim {}{w}", p.center_dim));
            }
            if !p.der_verified {
                out.push(format!("Der basis fails the derivation identity{w}"));
            }
            if !p.char_nilpotency.nilpotent {
                out.push(format!(
                    "not characteristically nilpotent{w}: dim Der {}, chain {:?}",
                    p.char_nilpotency.der_dim, p.char_nilpotency.chain
                ));
            }
        }
        for p in &self.deformed {
            let w = format!(" at t={}{}", fmt_rational(&p.t), at(&p.alpha));
            if !p.solvable() {
                out.push(format!("mu_t not solvable{w}: derived {}", p.derived));
            }
            if p.nilpotent() {
                out.push(format!("mu_t nilpotent{w}: lcs {}", p.lcs));
            }
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.violations().is_empty()
    }
}

/// Evaluates the invariant suite of `alg` and its shipped `mu_t` at every
/// sample point. Alpha samples are ignored for algebras without `alpha`.
pub fn invariant_report(alg: &Algebra, sampling: &Sampling) -> Result<InvariantReport> {
    let alphas: Vec<Option<Rational>> = if alg.has_alpha() {
        sampling.alpha.iter().cloned().map(Some).collect()
    } else {
        vec![None]
    };
    let zero = <Rational as num_traits::Zero>::zero();
    let one = <Rational as num_traits::One>::one();
    let base = alphas
        .par_iter()
        .map(|a| {
            let r = alg.mu.specialize(&one, a.as_ref().unwrap_or(&zero))?;
            Ok(base_point(&r, a.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let (mu_t, _) = deformation_of(alg)?;
    let points: Vec<(Rational, Option<Rational>)> = sampling
        .t
        .iter()
        .flat_map(|t| alphas.iter().map(move |a| (t.clone(), a.clone())))
        .collect();
    let deformed = points
        .into_par_iter()
        .map(|(t, a)| {
            let r = mu_t.specialize(&t, a.as_ref().unwrap_or(&zero))?;
            Ok(DeformedPoint {
                lcs: lower_central_series(&r),
                derived: derived_series(&r),
                t,
                alpha: a,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InvariantReport {
        algebra: alg.name.clone(),
        sampling: sampling.clone(),
        base,
        deformed,
    })
}
