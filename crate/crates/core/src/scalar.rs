//! Exact scalars: rationals and sparse Laurent polynomials in `t` with
//! polynomial dependence on `alpha`.
//!
//! Every coefficient, matrix entry and residual in the crate is a [`Scalar`].
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], and zero coefficients
//! are never stored, so structural equality is mathematical equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Builds `num/den` as a [`Rational`]. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Integer as a [`Rational`].
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p"` or `"p/q"` (optionally signed) into a [`Rational`].
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (text.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Formats a rational as `p` or `p/q`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Commutative ring operations shared by [`Scalar`] and [`Rational`], so the
/// division-free matrix algorithms are written once.
pub trait Ring: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
}

impl Ring for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
}

/// Exponent pair of a term `t^t * alpha^alpha`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    pub t: i64,
    pub alpha: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { t: 0, alpha: 0 };

    pub fn new(t: i64, alpha: u32) -> Self {
        Monomial { t, alpha }
    }

    fn mul(self, other: Monomial) -> Monomial {
        Monomial {
            t: self.t + other.t,
            alpha: self.alpha + other.alpha,
        }
    }
}

/// Element of `Q[alpha][t, 1/t]` in canonical sparse form.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    terms: BTreeMap<Monomial, Rational>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::constant(int(1))
    }

    pub fn constant(c: Rational) -> Self {
        Scalar::monomial(c, 0, 0)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::constant(int(n))
    }

    /// `c * t^et * alpha^ea`.
    pub fn monomial(c: Rational, et: i64, ea: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !Zero::is_zero(&c) {
            terms.insert(Monomial::new(et, ea), c);
        }
        Scalar { terms }
    }

    pub fn t() -> Self {
        Scalar::monomial(int(1), 1, 0)
    }

    pub fn alpha() -> Self {
        Scalar::monomial(int(1), 0, 1)
    }

    /// `t^k`, `k` may be negative.
    pub fn t_pow(k: i64) -> Self {
        Scalar::monomial(int(1), k, 0)
    }

    /// Builds a scalar from arbitrary terms, merging duplicates and dropping zeros.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(terms: I) -> Self {
        let mut out = Scalar::zero();
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if Zero::is_zero(&c) {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(<Rational as Zero>::zero);
        *slot += c;
        if Zero::is_zero(slot) {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Monomial::ONE)
                .is_some_and(One::is_one)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of `t^et * alpha^ea` (zero if absent).
    pub fn coeff(&self, et: i64, ea: u32) -> Rational {
        self.terms
            .get(&Monomial::new(et, ea))
            .cloned()
            .unwrap_or_else(<Rational as Zero>::zero)
    }

    /// The value if the scalar is a plain rational constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(<Rational as Zero>::zero()),
            1 => self.terms.get(&Monomial::ONE).cloned(),
            _ => None,
        }
    }

    pub fn uses_t(&self) -> bool {
        self.terms.keys().any(|m| m.t != 0)
    }

    pub fn uses_alpha(&self) -> bool {
        self.terms.keys().any(|m| m.alpha != 0)
    }

    pub fn has_negative_t(&self) -> bool {
        self.terms.keys().any(|m| m.t < 0)
    }

    /// Smallest and largest `t` exponent, `None` for zero.
    pub fn t_range(&self) -> Option<(i64, i64)> {
        let lo = self.terms.keys().map(|m| m.t).min()?;
        let hi = self.terms.keys().map(|m| m.t).max()?;
        Some((lo, hi))
    }

    pub fn alpha_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.alpha).max()
    }

    /// If this is a unit of the Laurent ring (`c * t^k`, `c != 0`, no alpha),
    /// returns `(c, k)`.
    pub fn as_laurent_unit(&self) -> Option<(Rational, i64)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next()?;
        (m.alpha == 0).then(|| (c.clone(), m.t))
    }

    /// Inverse of a Laurent unit.
    pub fn unit_inverse(&self) -> Result<Scalar> {
        let (c, k) = self.as_laurent_unit().ok_or_else(|| Error::NotAUnit(self.to_string()))?;
        Ok(Scalar::monomial(c.recip(), -k, 0))
    }

    pub fn scale(&self, c: &Rational) -> Scalar {
        if Zero::is_zero(c) {
            return Scalar::zero();
        }
        Scalar {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Scalar {
        let mut base = self.clone();
        let mut acc = Scalar::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Exact value at `t = t0`, `alpha = alpha0`.
    pub fn specialize(&self, t0: &Rational, alpha0: &Rational) -> Result<Rational> {
        let mut sum = <Rational as Zero>::zero();
        for (m, c) in &self.terms {
            sum += c * rational_pow(t0, m.t)? * rational_pow(alpha0, m.alpha as i64)?;
        }
        Ok(sum)
    }

    /// Substitutes `t = t0`, leaving `alpha` symbolic.
    pub fn eval_t(&self, t0: &Rational) -> Result<Scalar> {
        let mut out = Scalar::zero();
        for (m, c) in &self.terms {
            out.add_term(Monomial::new(0, m.alpha), c * rational_pow(t0, m.t)?);
        }
        Ok(out)
    }

    /// Substitutes `alpha = a0`, leaving `t` symbolic.
    pub fn eval_alpha(&self, a0: &Rational) -> Scalar {
        let mut out = Scalar::zero();
        for (m, c) in &self.terms {
            let v = rational_pow(a0, m.alpha as i64).expect("non-negative exponent");
            out.add_term(Monomial::new(m.t, 0), c * v);
        }
        out
    }

    /// Substitutes `t -> c * t^k` where `by` must be a Laurent unit. Used to
    /// reparametrize a deformation (e.g. `t -> 1/t`).
    pub fn substitute_t(&self, by: &Scalar) -> Result<Scalar> {
        let (c, k) = by.as_laurent_unit().ok_or_else(|| Error::NotAUnit(by.to_string()))?;
        let mut out = Scalar::zero();
        for (m, v) in &self.terms {
            out.add_term(Monomial::new(m.t * k, m.alpha), v * rational_pow(&c, m.t)?);
        }
        Ok(out)
    }

    /// Coefficient-wise bound on how many terms to print; used by reports.
    pub fn summary(&self, max_chars: usize) -> String {
        let s = self.to_string();
        if s.len() <= max_chars {
            s
        } else {
            format!("{}... ({} terms)", &s[..max_chars], self.num_terms())
        }
    }
}

/// `base^e` for integer `e`; a negative exponent on zero is a pole.
pub fn rational_pow(base: &Rational, e: i64) -> Result<Rational> {
    if e >= 0 {
        Ok(num_traits::pow(base.clone(), e as usize))
    } else if Zero::is_zero(base) {
        Err(Error::ZeroSpecialization)
    } else {
        Ok(num_traits::pow(base.recip(), e.unsigned_abs() as usize))
    }
}

impl From<Rational> for Scalar {
    fn from(c: Rational) -> Self {
        Scalar::constant(c)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(mut self, rhs: Scalar) -> Scalar {
        self += &rhs;
        self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, c.clone());
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, -c);
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(mut self, rhs: Scalar) -> Scalar {
        self -= &rhs;
        self
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(*mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Ring for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
}

fn fmt_monomial(m: &Monomial) -> String {
    let mut parts = Vec::new();
    match m.t {
        0 => {}
        1 => parts.push("t".to_string()),
        k => parts.push(format!("t^{k}")),
    }
    match m.alpha {
        0 => {}
        1 => parts.push("alpha".to_string()),
        k => parts.push(format!("alpha^{k}")),
    }
    parts.join("*")
}

/// Prints one term without its sign.
fn fmt_term_magnitude(m: &Monomial, c: &Rational) -> String {
    let mag = c.abs();
    if *m == Monomial::ONE {
        fmt_rational(&mag)
    } else if One::is_one(&mag) {
        fmt_monomial(m)
    } else {
        format!("{}*{}", fmt_rational(&mag), fmt_monomial(m))
    }
}

/// Canonical, parseable form: terms by descending `t` exponent, then
/// descending `alpha` exponent, e.g. `-8/5*t^5 + 8/5*t`.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let body = fmt_term_magnitude(m, c);
            match (first, neg) {
                (true, false) => write!(f, "{body}")?,
                (true, true) => write!(f, "-{body}")?,
                (false, false) => write!(f, " + {body}")?,
                (false, true) => write!(f, " - {body}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

/// Polynomial in an auxiliary indeterminate `x`; `coeffs[d]` multiplies `x^d`.
#[derive(Clone, PartialEq, Debug)]
pub struct UniPoly<R: Ring = Scalar> {
    coeffs: Vec<R>,
}

impl<R: Ring> UniPoly<R> {
    /// Trailing zero coefficients are trimmed.
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| *c == R::one())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return UniPoly::new(Vec::new());
        }
        let mut out = vec![R::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        UniPoly::new(out)
    }

    /// `prod_i (x - roots[i])`, expanded.
    pub fn from_roots(roots: &[R]) -> Self {
        roots.iter().fold(UniPoly::new(vec![R::one()]), |acc, r| {
            acc.mul(&UniPoly::new(vec![r.neg(), R::one()]))
        })
    }
}

impl fmt::Display for UniPoly<Scalar> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(d, c)| match d {
                0 => format!("({c})"),
                1 => format!("({c})*x"),
                _ => format!("({c})*x^{d}"),
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tm(c: Rational, e: i64) -> Scalar {
        Scalar::monomial(c, e, 0)
    }

    #[test]
    fn additive_cancellation() {
        let a = Scalar::t() + Scalar::one();
        assert_eq!(a + Scalar::from_int(-1), Scalar::t());
    }

    #[test]
    fn like_terms_merge() {
        let s = tm(rat(3, 5), 4) + tm(rat(2, 5), 4);
        assert_eq!(s, Scalar::t_pow(4));
    }

    #[test]
    fn sum_of_two_table_polynomials() {
        // (-1/5) t (t^4 - 1) + (-1/4) t (t^3 - 1), expanded by hand.
        let p2 = tm(rat(-1, 5), 5) + tm(rat(1, 5), 1);
        let p3 = tm(rat(-1, 4), 4) + tm(rat(1, 4), 1);
        let expected = tm(rat(-1, 5), 5) + tm(rat(-1, 4), 4) + tm(rat(9, 20), 1);
        assert_eq!(&p2 + &p3, expected);
    }

    #[test]
    fn laurent_unit_product() {
        assert_eq!(&Scalar::t_pow(-1) * &Scalar::t(), Scalar::one());
        let a = Scalar::t() - Scalar::one();
        let b = Scalar::t() + Scalar::one();
        assert_eq!(&a * &b, Scalar::t_pow(2) - Scalar::one());
    }

    #[test]
    fn alpha_times_table_polynomial() {
        // alpha * (-1/2) t^6 (t - 1) = (-1/2) alpha t^7 + (1/2) alpha t^6
        let p = tm(rat(-1, 2), 7) + tm(rat(1, 2), 6);
        let expected =
            Scalar::monomial(rat(-1, 2), 7, 1) + Scalar::monomial(rat(1, 2), 6, 1);
        assert_eq!(&Scalar::alpha() * &p, expected);
    }

    #[test]
    fn specialize_examples() {
        let a = Scalar::t_pow(2) + Scalar::alpha();
        assert_eq!(a.specialize(&int(3), &rat(1, 2)).unwrap(), rat(19, 2));
        // -(8/5) t (t^4 - 1) at t = 2: -(8/5) * 2 * 15 = -48
        let p1 = tm(rat(-8, 5), 5) + tm(rat(8, 5), 1);
        assert_eq!(p1.specialize(&int(2), &int(0)).unwrap(), int(-48));
        assert!(matches!(
            Scalar::t_pow(-1).specialize(&int(0), &int(0)),
            Err(Error::ZeroSpecialization)
        ));
    }

    #[test]
    fn zero_tests() {
        assert!(Scalar::zero().is_zero());
        let e = Scalar::t() - Scalar::one() - Scalar::t() + Scalar::one();
        assert!(e.is_zero());
        // -(2/5) t (2t^4 - t^3 - 1)
        let p5 = tm(rat(-4, 5), 5) + tm(rat(2, 5), 4) + tm(rat(2, 5), 1);
        assert!(!p5.is_zero());
    }

    #[test]
    fn display_is_canonical() {
        let p = tm(rat(-8, 5), 5) + tm(rat(8, 5), 1);
        assert_eq!(p.to_string(), "-8/5*t^5 + 8/5*t");
        let q = Scalar::monomial(int(-1), 0, 1) - Scalar::from_int(2);
        assert_eq!(q.to_string(), "-alpha - 2");
        assert_eq!(Scalar::t_pow(-1).to_string(), "t^-1");
    }

    #[test]
    fn units() {
        assert_eq!(tm(rat(3, 2), 4).as_laurent_unit(), Some((rat(3, 2), 4)));
        assert!((Scalar::t() - Scalar::one()).as_laurent_unit().is_none());
        assert!(Scalar::alpha().as_laurent_unit().is_none());
        assert_eq!(tm(int(2), 3).unit_inverse().unwrap(), tm(rat(1, 2), -3));
    }

    #[test]
    fn reciprocal_substitution() {
        let a = Scalar::t_pow(2) + Scalar::monomial(int(3), 1, 1);
        let b = a.substitute_t(&Scalar::t_pow(-1)).unwrap();
        assert_eq!(b, Scalar::t_pow(-2) + Scalar::monomial(int(3), -1, 1));
        assert_eq!(b.substitute_t(&Scalar::t_pow(-1)).unwrap(), a);
    }

    #[test]
    fn unipoly_from_roots() {
        let p = UniPoly::from_roots(&[Scalar::t(), Scalar::t_pow(2)]);
        let expected = [
            Scalar::t_pow(3),
            -(Scalar::t() + Scalar::t_pow(2)),
            Scalar::one(),
        ];
        assert_eq!(p.coeffs(), &expected[..]);
        assert!(p.is_monic());
    }
}
