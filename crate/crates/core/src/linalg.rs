//! Exact matrix algebra.
//!
//! Determinants and characteristic polynomials use Berkowitz's division-free
//! algorithm, so they work unchanged over the Laurent ring. Rational
//! nullspaces and ranks go through fraction-free (Bareiss) elimination on
//! integer rows, then a final normalization to reduced row echelon form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Ring, Scalar, UniPoly};

/// Dense row-major matrix over a commutative ring.
#[derive(Clone, PartialEq)]
pub struct Matrix<R: Ring> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

pub type ScalarMatrix = Matrix<Scalar>;
pub type RationalMatrix = Matrix<Rational>;

impl<R: Ring> Matrix<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![R::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = R::one();
        }
        m
    }

    pub fn diagonal(entries: &[R]) -> Self {
        let mut m = Matrix::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[R] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<R> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn entries(&self) -> &[R] {
        &self.data
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Matrix<S> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<S: Ring>(&self, f: impl Fn(&R) -> Result<S>) -> Result<Matrix<S>> {
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Matrix::<R>::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].add(&a.mul(b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.map(|x| x.neg()))
    }

    pub fn scale(&self, c: &R) -> Self {
        self.map(|x| x.mul(c))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self[(i, j)].is_zero()))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self[(i, j)].is_zero()))
    }

    pub fn diag(&self) -> Vec<R> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).collect()
    }

    /// Matrix-vector product `m * v`.
    pub fn apply(&self, v: &[R]) -> Result<Vec<R>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(R::zero(), |acc, (a, b)| acc.add(&a.mul(b)))
            })
            .collect())
    }

    /// Monic characteristic polynomial `det(x I - m)` via Berkowitz.
    pub fn char_poly(&self) -> Result<UniPoly<R>> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        // Coefficients highest degree first while iterating.
        let mut poly = vec![R::one()];
        for r in 0..self.rows {
            // q = [1, -a_rr, -R C, -R A C, ..., -R A^{r-1} C] for the leading
            // (r+1)x(r+1) block split as [[A, C], [R, a_rr]].
            let mut q = Vec::with_capacity(r + 2);
            q.push(R::one());
            q.push(self[(r, r)].neg());
            let mut col: Vec<R> = (0..r).map(|i| self[(i, r)].clone()).collect();
            for k in 0..r {
                let rc = (0..r).fold(R::zero(), |acc, j| acc.add(&self[(r, j)].mul(&col[j])));
                q.push(rc.neg());
                if k + 1 < r {
                    col = (0..r)
                        .map(|i| (0..r).fold(R::zero(), |acc, j| acc.add(&self[(i, j)].mul(&col[j]))))
                        .collect();
                }
            }
            // Lower triangular Toeplitz product: new[i] = sum_j q[i-j] * poly[j].
            let mut next = vec![R::zero(); r + 2];
            for (i, slot) in next.iter_mut().enumerate() {
                for (j, p) in poly.iter().enumerate() {
                    if i >= j && i - j < q.len() && !p.is_zero() {
                        *slot = slot.add(&q[i - j].mul(p));
                    }
                }
            }
            poly = next;
        }
        poly.reverse();
        Ok(UniPoly::new(poly))
    }

    /// Division-free determinant.
    pub fn det(&self) -> Result<R> {
        let cp = self.char_poly()?;
        let c0 = cp.coeffs().first().cloned().unwrap_or_else(R::zero);
        Ok(if self.rows.is_multiple_of(2) { c0 } else { c0.neg() })
    }

    /// Matrix with row `skip_r` and column `skip_c` removed.
    pub fn minor(&self, skip_r: usize, skip_c: usize) -> Self {
        let rows: Vec<usize> = (0..self.rows).filter(|&i| i != skip_r).collect();
        let cols: Vec<usize> = (0..self.cols).filter(|&j| j != skip_c).collect();
        self.select(&rows, &cols)
    }

    /// Transposed cofactor matrix.
    pub fn adjugate(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        if n == 1 {
            return Ok(Matrix::identity(1));
        }
        let mut adj = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let d = self.minor(i, j).det()?;
                adj[(j, i)] = if (i + j) % 2 == 0 { d } else { d.neg() };
            }
        }
        Ok(adj)
    }

    /// Evaluates a polynomial at this (square) matrix by Horner's rule.
    pub fn eval_poly(&self, p: &UniPoly<R>) -> Result<Self> {
        let n = self.rows;
        let mut acc = Matrix::zeros(n, n);
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self)?.add(&Matrix::identity(n).scale(c))?;
        }
        Ok(acc)
    }
}

impl ScalarMatrix {
    /// Inverse of a matrix whose determinant is a Laurent unit `c t^k`.
    pub fn inverse_unit(&self) -> Result<Self> {
        let det = self.det()?;
        let inv = det.unit_inverse()?;
        Ok(self.adjugate()?.scale(&inv))
    }

    pub fn eval_t(&self, t0: &Rational) -> Result<ScalarMatrix> {
        self.try_map(|x| x.eval_t(t0))
    }

    pub fn specialize(&self, t0: &Rational, alpha0: &Rational) -> Result<RationalMatrix> {
        self.try_map(|x| x.specialize(t0, alpha0))
    }
}

impl<R: Ring> std::ops::Index<(usize, usize)> for Matrix<R> {
    type Output = R;
    fn index(&self, (i, j): (usize, usize)) -> &R {
        &self.data[i * self.cols + j]
    }
}

impl<R: Ring> std::ops::IndexMut<(usize, usize)> for Matrix<R> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut R {
        &mut self.data[i * self.cols + j]
    }
}

impl<R: Ring + fmt::Display> fmt::Display for Matrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<R: Ring> fmt::Debug for Matrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Matrix")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("data", &self.data)
            .finish()
    }
}

/// Reduced row echelon data of a rational matrix.
#[derive(Clone, Debug)]
pub struct Echelon {
    /// Nonzero rows of the RREF, one per pivot.
    pub rows: Vec<Vec<Rational>>,
    /// Pivot column of each row.
    pub pivots: Vec<usize>,
    pub cols: usize,
}

/// Fraction-free elimination followed by normalization to RREF. Pivots are the
/// first nonzero entry scanning columns left to right, rows top to bottom.
pub fn echelon(m: &RationalMatrix) -> Echelon {
    let (rows, cols) = (m.rows(), m.cols());
    // Clear denominators row by row.
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| {
            let row = m.row(i);
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect();

    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            if a[i][c].is_zero() {
                // Still has to be scaled to keep the Bareiss invariant.
                for j in c + 1..cols {
                    let v = &a[r][c] * &a[i][j];
                    debug_assert!((&v % &prev).is_zero());
                    a[i][j] = v / &prev;
                }
                continue;
            }
            for j in c + 1..cols {
                let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                debug_assert!((&v % &prev).is_zero(), "Bareiss division not exact");
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }

    // Back substitution over the rationals.
    let mut out: Vec<Vec<Rational>> = a[..pivots.len()]
        .iter()
        .map(|row| row.iter().map(|x| Rational::from_integer(x.clone())).collect())
        .collect();
    for (k, &pc) in pivots.iter().enumerate().rev() {
        let inv = out[k][pc].recip();
        for x in out[k].iter_mut() {
            *x *= &inv;
        }
        let (above, rest) = out.split_at_mut(k);
        let pivot = &rest[0];
        for row in above {
            let f = row[pc].clone();
            if Zero::is_zero(&f) {
                continue;
            }
            for (x, p) in row.iter_mut().zip(pivot) {
                *x -= &f * p;
            }
        }
    }
    Echelon {
        rows: out,
        pivots,
        cols,
    }
}

/// Basis of the right nullspace `{x : m x = 0}`; empty iff full column rank.
pub fn rat_nullspace(m: &RationalMatrix) -> Vec<Vec<Rational>> {
    let e = echelon(m);
    let free: Vec<usize> = (0..m.cols()).filter(|c| !e.pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![<Rational as Zero>::zero(); m.cols()];
            v[f] = <Rational as One>::one();
            for (row, &pc) in e.rows.iter().zip(&e.pivots) {
                v[pc] = -row[f].clone();
            }
            v
        })
        .collect()
}

pub fn rat_rank(m: &RationalMatrix) -> usize {
    echelon(m).pivots.len()
}

/// Canonical basis (RREF rows) of the span of the given vectors of length `dim`.
pub fn row_space_basis(vectors: &[Vec<Rational>], dim: usize) -> Vec<Vec<Rational>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    echelon(&RationalMatrix::from_rows(vectors.to_vec()))
        .rows
        .into_iter()
        .map(|mut r| {
            r.truncate(dim);
            r
        })
        .collect()
}
