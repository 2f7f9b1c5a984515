//! Structure-constant calculus.
//!
//! Indices are 0-based in the API and 1-based in everything printed.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, ScalarMatrix};
use crate::scalar::{Rational, Ring, Scalar};

/// Symbols an entry may use.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Params {
    pub t: bool,
    pub alpha: bool,
}

impl Params {
    pub const NONE: Params = Params { t: false, alpha: false };

    pub fn allows(&self, s: &Scalar) -> bool {
        (self.t || !s.uses_t()) && (self.alpha || !s.uses_alpha())
    }

    pub fn with_t(self) -> Params {
        Params { t: true, ..self }
    }
}

/// Antisymmetric bilinear map on `R^n`, stored as the columns `[b_i, b_j]`
/// for `i < j` only.
#[derive(Clone, PartialEq)]
pub struct Bracket<R: Ring> {
    n: usize,
    name: String,
    params: Params,
    cols: Vec<Vec<R>>,
}

pub type StructureConstants = Bracket<Scalar>;
pub type Cochain2 = Bracket<Scalar>;
pub type RationalAlgebra = Bracket<Rational>;

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// All pairs `i < j` in lexicographic order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// All triples `i < j < k` in lexicographic order.
pub fn triples(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| (i, j, k))))
}

fn add_scaled<R: Ring>(acc: &mut [R], v: &[R], c: &R) {
    if c.is_zero() {
        return;
    }
    for (a, x) in acc.iter_mut().zip(v) {
        if !x.is_zero() {
            *a = a.add(&x.mul(c));
        }
    }
}

fn add_into<R: Ring>(acc: &mut [R], v: &[R]) {
    for (a, x) in acc.iter_mut().zip(v) {
        if !x.is_zero() {
            *a = a.add(x);
        }
    }
}

pub fn basis_vector<R: Ring>(n: usize, i: usize) -> Vec<R> {
    let mut v = vec![R::zero(); n];
    v[i] = R::one();
    v
}

impl<R: Ring> Bracket<R> {
    pub fn zero(n: usize) -> Self {
        Bracket {
            n,
            name: String::new(),
            params: Params::NONE,
            cols: vec![vec![R::zero(); n]; n * n.saturating_sub(1) / 2],
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_params(mut self, params: Params) -> Self {
        self.params = params;
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> Params {
        self.params
    }

    /// Sets `[b_i, b_j] = v`; for `i > j` stores `-v` at `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: Vec<R>) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        if i >= self.n || j >= self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: i.max(j) + 1,
            });
        }
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.cols[pair_index(self.n, i, j)] = v,
            std::cmp::Ordering::Greater => {
                self.cols[pair_index(self.n, j, i)] = v.iter().map(|x| x.neg()).collect()
            }
            std::cmp::Ordering::Equal if v.iter().all(|x| x.is_zero()) => {}
            std::cmp::Ordering::Equal => {
                return Err(Error::InvalidSpec(format!(
                    "bracket of b{} with itself must be zero",
                    i + 1
                )))
            }
        }
        Ok(())
    }

    /// `[b_i, b_j]`, antisymmetrized.
    pub fn basis_bracket(&self, i: usize, j: usize) -> Vec<R> {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.cols[pair_index(self.n, i, j)].clone(),
            std::cmp::Ordering::Greater => self.cols[pair_index(self.n, j, i)]
                .iter()
                .map(|x| x.neg())
                .collect(),
            std::cmp::Ordering::Equal => vec![R::zero(); self.n],
        }
    }

    /// Stored column for `i < j`, without cloning.
    pub fn stored(&self, i: usize, j: usize) -> &[R] {
        &self.cols[pair_index(self.n, i, j)]
    }

    /// Nonzero stored brackets `(i, j, [b_i, b_j])` with `i < j`.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = (usize, usize, &[R])> {
        pairs(self.n)
            .map(move |(i, j)| (i, j, self.stored(i, j)))
            .filter(|(_, _, c)| c.iter().any(|x| !x.is_zero()))
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().flatten().all(|x| x.is_zero())
    }

    /// Equality of structure constants, ignoring name and declared params.
    pub fn same_entries(&self, other: &Self) -> bool {
        self.n == other.n && self.cols == other.cols
    }

    /// Entries where the two brackets differ, as `(i, j, k)` with `i < j`.
    pub fn differences(&self, other: &Self) -> Vec<(usize, usize, usize)> {
        if self.n != other.n {
            return vec![(0, 0, 0)];
        }
        pairs(self.n)
            .flat_map(|(i, j)| {
                let (a, b) = (self.stored(i, j), other.stored(i, j));
                (0..self.n).filter(move |&k| a[k] != b[k]).map(move |k| (i, j, k))
            })
            .collect()
    }

    /// `[b_i, y]` for an arbitrary column `y`.
    pub fn bracket_basis_left(&self, i: usize, y: &[R]) -> Vec<R> {
        let mut out = vec![R::zero(); self.n];
        for (j, c) in y.iter().enumerate() {
            if i != j && !c.is_zero() {
                add_scaled(&mut out, &self.basis_bracket(i, j), c);
            }
        }
        out
    }

    /// Bilinear evaluation `[x, y]`.
    pub fn eval(&self, x: &[R], y: &[R]) -> Result<Vec<R>> {
        for v in [x, y] {
            if v.len() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    found: v.len(),
                });
            }
        }
        let mut out = vec![R::zero(); self.n];
        for (i, j) in pairs(self.n) {
            // x_i y_j - x_j y_i
            let c = x[i].mul(&y[j]).sub(&x[j].mul(&y[i]));
            if !c.is_zero() {
                add_scaled(&mut out, self.stored(i, j), &c);
            }
        }
        Ok(out)
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Bracket<S> {
        Bracket {
            n: self.n,
            name: self.name.clone(),
            params: self.params,
            cols: self.cols.iter().map(|c| c.iter().map(&f).collect()).collect(),
        }
    }

    pub fn try_map<S: Ring>(&self, f: impl Fn(&R) -> Result<S>) -> Result<Bracket<S>> {
        let cols = self
            .cols
            .iter()
            .map(|c| c.iter().map(&f).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Ok(Bracket {
            n: self.n,
            name: self.name.clone(),
            params: self.params,
            cols,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let mut out = self.clone();
        for (a, b) in out.cols.iter_mut().zip(&other.cols) {
            add_into(a, b);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &R) -> Self {
        self.map(|x| x.mul(c))
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    /// `[[b_i,b_j],b_k] + [[b_j,b_k],b_i] + [[b_k,b_i],b_j]`.
    pub fn jacobiator(&self, i: usize, j: usize, k: usize) -> Vec<R> {
        mixed_term(self, self, i, j, k)
    }

    pub fn jacobi_check(&self) -> JacobiReport<R> {
        let failures = triples(self.n)
            .filter_map(|(i, j, k)| {
                let r = self.jacobiator(i, j, k);
                r.iter().any(|x| !x.is_zero()).then_some(((i, j, k), r))
            })
            .collect();
        JacobiReport { failures }
    }

    /// Coordinate subspace `h` is an ideal: every `[b_i, b_h]` has zero
    /// coordinates outside `h`.
    pub fn is_ideal(&self, h: &SubspaceSpec) -> bool {
        h.indices().iter().all(|&a| {
            (0..self.n).all(|i| {
                let col = self.basis_bracket(i, a);
                (0..self.n).all(|k| h.contains(k) || col[k].is_zero())
            })
        })
    }

    /// Restriction of the bracket to the coordinate subalgebra `h`, in the
    /// basis `h.indices()`.
    pub fn restrict(&self, h: &SubspaceSpec) -> Result<Self> {
        let idx = h.indices();
        let mut out = Bracket::zero(idx.len())
            .named(self.name.clone())
            .with_params(self.params);
        for (a, b) in pairs(idx.len()) {
            let col = self.basis_bracket(idx[a], idx[b]);
            if let Some(k) = (0..self.n).find(|&k| !h.contains(k) && !col[k].is_zero()) {
                return Err(Error::InvalidSpec(format!(
                    "[b{}, b{}] has a b{} component, so the subspace is not a subalgebra",
                    idx[a] + 1,
                    idx[b] + 1,
                    k + 1
                )));
            }
            out.set(a, b, idx.iter().map(|&k| col[k].clone()).collect())?;
        }
        Ok(out)
    }

    /// `D[b_i, b_j] = [D b_i, b_j] + [b_i, D b_j]` for all pairs. `d` acts on
    /// columns: `D b_i` is column `i` of `d`.
    pub fn is_derivation(&self, d: &Matrix<R>) -> bool {
        self.derivation_failures(d).is_empty()
    }

    /// Pairs violating the derivation identity, with their residuals.
    pub fn derivation_failures(&self, d: &Matrix<R>) -> Vec<((usize, usize), Vec<R>)> {
        if d.rows() != self.n || d.cols() != self.n {
            return vec![((0, 0), Vec::new())];
        }
        let dcols: Vec<Vec<R>> = (0..self.n).map(|i| d.column(i)).collect();
        pairs(self.n)
            .filter_map(|(i, j)| {
                let lhs = d.apply(self.stored(i, j)).expect("square");
                let mut rhs = self.eval(&dcols[i], &basis_vector(self.n, j)).expect("dim");
                add_into(&mut rhs, &self.eval(&basis_vector(self.n, i), &dcols[j]).expect("dim"));
                let r: Vec<R> = lhs.iter().zip(&rhs).map(|(a, b)| a.sub(b)).collect();
                r.iter().any(|x| !x.is_zero()).then_some(((i, j), r))
            })
            .collect()
    }
}

/// Cyclic sum of `a(b(x_i, x_j), x_k)`.
fn mixed_term<R: Ring>(a: &Bracket<R>, b: &Bracket<R>, i: usize, j: usize, k: usize) -> Vec<R> {
    let mut out = vec![R::zero(); a.n];
    for (x, y, z) in [(i, j, k), (j, k, i), (k, i, j)] {
        let inner = b.basis_bracket(x, y);
        // a(inner, b_z) = -a(b_z, inner)
        let v = a.bracket_basis_left(z, &inner);
        for (o, e) in out.iter_mut().zip(&v) {
            if !e.is_zero() {
                *o = o.sub(e);
            }
        }
    }
    out
}

/// Cocycle residual at a triple: the `t`-linear part of the jacobiator of
/// `mu + t phi`.
pub fn cocycle_residual<R: Ring>(mu: &Bracket<R>, phi: &Bracket<R>, i: usize, j: usize, k: usize) -> Vec<R> {
    let mut r = mixed_term(mu, phi, i, j, k);
    add_into(&mut r, &mixed_term(phi, mu, i, j, k));
    r
}

pub fn cocycle_failures<R: Ring>(mu: &Bracket<R>, phi: &Bracket<R>) -> Result<JacobiReport<R>> {
    mu.same_dim(phi)?;
    let failures = triples(mu.n)
        .filter_map(|(i, j, k)| {
            let r = cocycle_residual(mu, phi, i, j, k);
            r.iter().any(|x| !x.is_zero()).then_some(((i, j, k), r))
        })
        .collect();
    Ok(JacobiReport { failures })
}

pub fn cocycle_check<R: Ring>(mu: &Bracket<R>, phi: &Bracket<R>) -> bool {
    cocycle_failures(mu, phi).is_ok_and(|r| r.passed())
}

/// `phi` is itself a Lie bracket.
pub fn lie_bracket_check<R: Ring>(phi: &Bracket<R>) -> bool {
    phi.jacobi_check().passed()
}

/// Failing triples of a Jacobi-type check, with residual columns.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiReport<R: Ring> {
    pub failures: Vec<((usize, usize, usize), Vec<R>)>,
}

impl<R: Ring> JacobiReport<R> {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// 1-based failing triples.
    pub fn failing_triples(&self) -> Vec<(usize, usize, usize)> {
        self.failures.iter().map(|((i, j, k), _)| (i + 1, j + 1, k + 1)).collect()
    }
}

impl StructureConstants {
    /// Transported bracket `(g^-1 . mu)(x, y) = g^-1 mu(g x, g y)`.
    pub fn base_change(&self, g: &ScalarMatrix) -> Result<Self> {
        let ginv = g.inverse_unit()?;
        self.base_change_with(g, &ginv)
    }

    /// As [`base_change`](Self::base_change) with a precomputed inverse.
    pub fn base_change_with(&self, g: &ScalarMatrix, ginv: &ScalarMatrix) -> Result<Self> {
        if g.rows() != self.n || !g.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: g.rows(),
            });
        }
        let gcols: Vec<Vec<Scalar>> = (0..self.n).map(|i| g.column(i)).collect();
        let mut out = Bracket::zero(self.n)
            .named(self.name.clone())
            .with_params(self.params.with_t());
        for (i, j) in pairs(self.n) {
            let v = self.eval(&gcols[i], &gcols[j])?;
            out.set(i, j, ginv.apply(&v)?)?;
        }
        Ok(out)
    }

    pub fn specialize(&self, t0: &Rational, alpha0: &Rational) -> Result<RationalAlgebra> {
        let out = self.try_map(|x| x.specialize(t0, alpha0))?;
        Ok(out.with_params(Params::NONE))
    }

    /// Substitutes `t = t0`, keeping `alpha`.
    pub fn eval_t(&self, t0: &Rational) -> Result<Self> {
        let p = Params { t: false, ..self.params };
        Ok(self.try_map(|x| x.eval_t(t0))?.with_params(p))
    }

    pub fn eval_alpha(&self, a0: &Rational) -> Self {
        let p = Params { alpha: false, ..self.params };
        self.map(|x| x.eval_alpha(a0)).with_params(p)
    }

    /// Substitutes `t -> by` with `by` a Laurent unit.
    pub fn reparametrize(&self, by: &Scalar) -> Result<Self> {
        self.try_map(|x| x.substitute_t(by))
    }

    /// First entry using a symbol not in `params`, as `(i, j, k)`.
    pub fn undeclared_symbol(&self) -> Option<(usize, usize, usize)> {
        pairs(self.n).find_map(|(i, j)| {
            self.stored(i, j)
                .iter()
                .position(|x| !self.params.allows(x))
                .map(|k| (i, j, k))
        })
    }
}

impl<R: Ring + fmt::Display> fmt::Display for Bracket<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, j, col) in self.nonzero_entries() {
            let terms: Vec<String> = col
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| format!("({c})*Y{}", k + 1))
                .collect();
            writeln!(f, "[Y{}, Y{}] = {}", i + 1, j + 1, terms.join(" + "))?;
        }
        Ok(())
    }
}

impl<R: Ring> fmt::Debug for Bracket<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Bracket")
            .field("n", &self.n)
            .field("name", &self.name)
            .field("params", &self.params)
            .field("cols", &self.cols)
            .finish()
    }
}

/// Coordinate subspace spanned by distinct basis indices, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubspaceSpec {
    indices: Vec<usize>,
}

impl SubspaceSpec {
    pub fn new(n: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSpec("subspace indices repeat".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::InvalidSpec(format!(
                "subspace index {} exceeds dimension {n}",
                bad + 1
            )));
        }
        Ok(SubspaceSpec { indices })
    }

    pub fn whole(n: usize) -> Self {
        SubspaceSpec {
            indices: (0..n).collect(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }
}

impl fmt::Display for SubspaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(|i| format!("Y{}", i + 1)).collect();
        write!(f, "<{}>", parts.join(", "))
    }
}
