//! Linear deformations `mu_t = mu + t mu_D` and the degeneration certificate
//! check `mu_1(g x, g y) = g mu_t(x, y)`.

use std::fmt;

use crate::dataset::{Algebra, ErrataMode};
use crate::error::{Error, Result};
use crate::lie::{cocycle_failures, pairs, Cochain2, JacobiReport, StructureConstants, SubspaceSpec};
use crate::linalg::{rat_nullspace, RationalMatrix, ScalarMatrix};
use crate::scalar::{int, Monomial, Rational, Scalar, UniPoly};

/// `(mu, h, X, D)` with `h` a codimension-one ideal, `X` the complementary
/// basis vector and `D` a derivation of `h` written in the basis of `h`.
#[derive(Clone, Debug)]
pub struct DeformationSpec {
    base: StructureConstants,
    ideal: SubspaceSpec,
    outside: usize,
    derivation: ScalarMatrix,
}

impl DeformationSpec {
    pub fn new(
        base: StructureConstants,
        ideal: SubspaceSpec,
        outside: usize,
        derivation: ScalarMatrix,
    ) -> Result<Self> {
        let n = base.dim();
        if outside >= n || ideal.contains(outside) {
            return Err(Error::InvalidSpec(format!(
                "outside index {} must lie outside the ideal",
                outside + 1
            )));
        }
        if ideal.len() + 1 != n {
            return Err(Error::InvalidSpec(format!(
                "ideal {ideal} does not have codimension 1"
            )));
        }
        if derivation.rows() != ideal.len() || !derivation.is_square() {
            return Err(Error::InvalidSpec(format!(
                "derivation is {}x{}, ideal has dimension {}",
                derivation.rows(),
                derivation.cols(),
                ideal.len()
            )));
        }
        if !base.is_ideal(&ideal) {
            return Err(Error::InvalidSpec(format!("{ideal} is not an ideal")));
        }
        let restricted = base.restrict(&ideal)?;
        if let Some(((i, j), _)) = restricted.derivation_failures(&derivation).into_iter().next() {
            let idx = ideal.indices();
            return Err(Error::InvalidSpec(format!(
                "D is not a derivation of the ideal: identity fails on (Y{}, Y{})",
                idx[i] + 1,
                idx[j] + 1
            )));
        }
        Ok(DeformationSpec {
            base,
            ideal,
            outside,
            derivation,
        })
    }

    /// Builds the spec stored with an elaborated algebra.
    pub fn from_algebra(a: &Algebra) -> Result<Self> {
        let d = a
            .deformation
            .as_ref()
            .ok_or_else(|| Error::InvalidSpec(format!("{} has no [deformation] block", a.name)))?;
        DeformationSpec::new(a.mu.clone(), d.ideal.clone(), d.outside, d.derivation_matrix())
    }

    pub fn base(&self) -> &StructureConstants {
        &self.base
    }

    pub fn ideal(&self) -> &SubspaceSpec {
        &self.ideal
    }

    pub fn outside(&self) -> usize {
        self.outside
    }

    pub fn derivation(&self) -> &ScalarMatrix {
        &self.derivation
    }
}

/// `mu_D(X, z) = D z` for `z` in the ideal, zero on ideal x ideal.
pub fn go_cocycle(spec: &DeformationSpec) -> Cochain2 {
    raw_cocycle(spec.base.dim(), &spec.ideal, spec.outside, &spec.derivation)
        .named(spec.base.name().to_string())
        .with_params(spec.base.params())
}

fn raw_cocycle(n: usize, ideal: &SubspaceSpec, outside: usize, d: &ScalarMatrix) -> Cochain2 {
    let idx = ideal.indices();
    let mut phi = Cochain2::zero(n);
    for (a, &z) in idx.iter().enumerate() {
        let mut col = vec![Scalar::zero(); n];
        for (b, &k) in idx.iter().enumerate() {
            col[k] = d[(b, a)].clone();
        }
        phi.set(outside, z, col).expect("indices in range");
    }
    phi
}

/// `mu + t phi`.
pub fn deform(mu: &StructureConstants, phi: &Cochain2) -> Result<StructureConstants> {
    let shifted = phi.scale(&Scalar::t());
    Ok(mu
        .add(&shifted)?
        .named(mu.name().to_string())
        .with_params(mu.params().with_t()))
}

/// One residual cell of the degeneration identity: 0-based pair and component.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: Scalar,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{}) = {}", self.i + 1, self.j + 1, self.k + 1, self.value)
    }
}

/// Nonzero cells of `mu1(g e_i, g e_j) - g(mu_t(e_i, e_j))` over all pairs.
pub fn identity_residuals(mu1: &StructureConstants, mu_t: &StructureConstants, g: &ScalarMatrix) -> Result<Vec<Cell>> {
    let n = mu1.dim();
    if mu_t.dim() != n || g.rows() != n || !g.is_square() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if mu_t.dim() != n { mu_t.dim() } else { g.rows() },
        });
    }
    let gcols: Vec<Vec<Scalar>> = (0..n).map(|i| g.column(i)).collect();
    let mut out = Vec::new();
    for (i, j) in pairs(n) {
        let lhs = mu1.eval(&gcols[i], &gcols[j])?;
        let rhs = g.apply(mu_t.stored(i, j))?;
        for (k, (a, b)) in lhs.iter().zip(&rhs).enumerate() {
            let value = a - b;
            if !value.is_zero() {
                out.push(Cell { i, j, k, value });
            }
        }
    }
    Ok(out)
}

/// Outcome of the certificate check proper.
#[derive(Clone, Debug)]
pub struct DegenerationCheck {
    pub residuals: Vec<Cell>,
    pub det: Scalar,
    pub det_is_unit: bool,
}

impl DegenerationCheck {
    pub fn passed(&self) -> bool {
        self.residuals.is_empty() && self.det_is_unit
    }
}

/// The degeneration identity on all basis pairs plus the unit-determinant condition.
pub fn verify_degeneration(
    mu1: &StructureConstants,
    mu_t: &StructureConstants,
    g: &ScalarMatrix,
) -> Result<DegenerationCheck> {
    let residuals = identity_residuals(mu1, mu_t, g)?;
    let det = g.det()?;
    let det_is_unit = det.as_laurent_unit().is_some();
    Ok(DegenerationCheck {
        residuals,
        det,
        det_is_unit,
    })
}

/// `mu_t` at `t = 0` equals `mu`. Entries with a `t` pole are an error.
pub fn limit_check(mu_t: &StructureConstants, mu: &StructureConstants) -> Result<bool> {
    if let Some((i, j, col)) = mu_t.nonzero_entries().find(|(_, _, c)| c.iter().any(Scalar::has_negative_t)) {
        let k = col.iter().position(Scalar::has_negative_t).expect("found");
        return Err(Error::NegativeExponent(format!(
            "[Y{}, Y{}] has component {} on Y{}",
            i + 1,
            j + 1,
            col[k],
            k + 1
        )));
    }
    Ok(mu_t.eval_t(&int(0))?.same_entries(mu))
}

/// Spectrum of the certificate on the ideal block.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumCheck {
    pub char_poly: UniPoly<Scalar>,
    pub expected: UniPoly<Scalar>,
    /// `Some` when the block is triangular: its diagonal, as a multiset,
    /// equals `{t^d}`.
    pub triangular_agrees: Option<bool>,
}

impl SpectrumCheck {
    pub fn passed(&self) -> bool {
        self.char_poly == self.expected && self.triangular_agrees != Some(false)
    }
}

fn exponents_of(d: &ScalarMatrix) -> Result<Vec<i64>> {
    if !d.is_diagonal() {
        return Err(Error::InvalidSpec("D must be diagonal".into()));
    }
    d.diag()
        .iter()
        .map(|x| {
            x.as_constant()
                .filter(|c| c.is_integer())
                .and_then(|c| i64::try_from(c.numer()).ok())
                .ok_or_else(|| Error::InvalidSpec(format!("eigenvalue {x} of D is not an integer")))
        })
        .collect()
}

/// Characteristic polynomial of `g` restricted to the ideal block against
/// `prod (x - t^d)` over the diagonal of `D`.
pub fn block_spectrum(g: &ScalarMatrix, ideal: &SubspaceSpec, d: &ScalarMatrix) -> Result<SpectrumCheck> {
    let n = g.rows();
    for &c in ideal.indices() {
        for r in (0..n).filter(|r| !ideal.contains(*r)) {
            if !g[(r, c)].is_zero() {
                return Err(Error::NotInvariant(format!(
                    "g maps Y{} to a vector with Y{} component {}",
                    c + 1,
                    r + 1,
                    g[(r, c)]
                )));
            }
        }
    }
    let exps = exponents_of(d)?;
    if exps.len() != ideal.len() {
        return Err(Error::DimensionMismatch {
            expected: ideal.len(),
            found: exps.len(),
        });
    }
    let block = g.select(ideal.indices(), ideal.indices());
    let roots: Vec<Scalar> = exps.iter().map(|&e| Scalar::t_pow(e)).collect();
    let expected = UniPoly::from_roots(&roots);
    let triangular_agrees = (block.is_lower_triangular() || block.is_upper_triangular()).then(|| {
        let mut have: Vec<String> = block.diag().iter().map(|s| s.to_string()).collect();
        let mut want: Vec<String> = roots.iter().map(|s| s.to_string()).collect();
        have.sort();
        want.sort();
        have == want
    });
    Ok(SpectrumCheck {
        char_poly: block.char_poly()?,
        expected,
        triangular_agrees,
    })
}

pub fn block_spectrum_check(g: &ScalarMatrix, ideal: &SubspaceSpec, d: &ScalarMatrix) -> Result<bool> {
    Ok(block_spectrum(g, ideal, d)?.passed())
}

/// Stages of the verification pipeline, in execution order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    Jacobi,
    Ideal,
    Derivation,
    Cocycle,
    Bracket,
    DeformJacobi,
    Identity,
    UnitDet,
    Limit,
    Spectrum,
}

impl Stage {
    pub const ALL: [Stage; 10] = [
        Stage::Jacobi,
        Stage::Ideal,
        Stage::Derivation,
        Stage::Cocycle,
        Stage::Bracket,
        Stage::DeformJacobi,
        Stage::Identity,
        Stage::UnitDet,
        Stage::Limit,
        Stage::Spectrum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Jacobi => "jacobi",
            Stage::Ideal => "ideal",
            Stage::Derivation => "derivation",
            Stage::Cocycle => "cocycle",
            Stage::Bracket => "bracket",
            Stage::DeformJacobi => "deform-jacobi",
            Stage::Identity => "identity",
            Stage::UnitDet => "unit-det",
            Stage::Limit => "limit",
            Stage::Spectrum => "spectrum",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Localized failure: 1-based basis indices and the residual column.
#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub indices: Vec<usize>,
    pub residual: Vec<Scalar>,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        let comps: Vec<String> = self
            .residual
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(k, v)| format!("Y{}: {}", k + 1, v))
            .collect();
        write!(f, "({}) -> [{}]", idx.join(","), comps.join("; "))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageResult {
    pub stage: Stage,
    pub passed: bool,
    pub detail: String,
    pub failures: Vec<Failure>,
}

impl StageResult {
    fn pass(stage: Stage, detail: impl Into<String>) -> Self {
        StageResult {
            stage,
            passed: true,
            detail: detail.into(),
            failures: Vec::new(),
        }
    }

    fn fail(stage: Stage, detail: impl Into<String>, failures: Vec<Failure>) -> Self {
        StageResult {
            stage,
            passed: false,
            detail: detail.into(),
            failures,
        }
    }

    fn from_jacobi(stage: Stage, rep: JacobiReport<Scalar>) -> Self {
        if rep.passed() {
            return StageResult::pass(stage, "all triples vanish");
        }
        let failures: Vec<Failure> = rep
            .failures
            .into_iter()
            .map(|((i, j, k), r)| Failure {
                indices: vec![i + 1, j + 1, k + 1],
                residual: r,
            })
            .collect();
        StageResult::fail(stage, format!("{} failing triples", failures.len()), failures)
    }
}

/// Structured outcome of the full pipeline for one algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub algebra: String,
    pub mode: ErrataMode,
    pub stages: Vec<StageResult>,
    /// Degeneration-identity residual cells, 0-based, in pair order.
    pub cells: Vec<Cell>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.stages.iter().all(|s| s.passed)
    }

    pub fn stage(&self, s: Stage) -> Option<&StageResult> {
        self.stages.iter().find(|r| r.stage == s)
    }

    /// Failing degeneration-identity cells, 1-based `(i, j, component)`.
    pub fn failing_cells(&self) -> Vec<(usize, usize, usize)> {
        self.cells.iter().map(|c| (c.i + 1, c.j + 1, c.k + 1)).collect()
    }
}

/// `mu_t`, reparametrized by the certificate parameter when it is not `t`.
pub fn certified_family(mu_t: &StructureConstants, parameter: &Scalar) -> Result<StructureConstants> {
    if *parameter == Scalar::t() {
        Ok(mu_t.clone())
    } else {
        mu_t.reparametrize(parameter)
    }
}

/// Runs every stage on an elaborated algebra. Input problems (no
/// deformation or certificate block) are errors; mathematical failures are
/// report content.
pub fn verify_table(a: &Algebra) -> Result<VerificationReport> {
    let d = a
        .deformation
        .as_ref()
        .ok_or_else(|| Error::InvalidSpec(format!("{} has no [deformation] block", a.name)))?;
    let cert = a
        .certificate
        .as_ref()
        .ok_or_else(|| Error::InvalidSpec(format!("{} has no [certificate] block", a.name)))?;
    let mu = &a.mu;
    let n = mu.dim();
    let dmat = d.derivation_matrix();
    let mut stages = Vec::new();

    stages.push(StageResult::from_jacobi(Stage::Jacobi, mu.jacobi_check()));

    let ideal_ok = mu.is_ideal(&d.ideal) && d.ideal.len() + 1 == n && !d.ideal.contains(d.outside);
    stages.push(if ideal_ok {
        StageResult::pass(Stage::Ideal, format!("{} is a codimension-1 ideal", d.ideal))
    } else {
        StageResult::fail(Stage::Ideal, format!("{} is not a codimension-1 ideal", d.ideal), Vec::new())
    });

    let der_stage = match mu.restrict(&d.ideal) {
        Ok(h) => {
            let idx = d.ideal.indices();
            let fails: Vec<Failure> = h
                .derivation_failures(&dmat)
                .into_iter()
                .map(|((i, j), r)| {
                    let mut full = vec![Scalar::zero(); n];
                    for (b, v) in r.into_iter().enumerate() {
                        full[idx[b]] = v;
                    }
                    Failure {
                        indices: vec![idx[i] + 1, idx[j] + 1],
                        residual: full,
                    }
                })
                .collect();
            let diag: Vec<String> = d.diag.iter().map(crate::scalar::fmt_rational).collect();
            if fails.is_empty() {
                StageResult::pass(Stage::Derivation, format!("D = diag({}) is a derivation", diag.join(",")))
            } else {
                StageResult::fail(Stage::Derivation, format!("{} failing pairs", fails.len()), fails)
            }
        }
        Err(e) => StageResult::fail(Stage::Derivation, e.to_string(), Vec::new()),
    };
    stages.push(der_stage);

    let phi = raw_cocycle(n, &d.ideal, d.outside, &dmat).with_params(mu.params());
    stages.push(StageResult::from_jacobi(Stage::Cocycle, cocycle_failures(mu, &phi)?));
    stages.push(StageResult::from_jacobi(Stage::Bracket, phi.jacobi_check()));

    let mu_t = deform(mu, &phi)?;
    stages.push(StageResult::from_jacobi(Stage::DeformJacobi, mu_t.jacobi_check()));

    let mu1 = mu_t.eval_t(&int(1))?;
    let family = certified_family(&mu_t, &cert.parameter)?;
    let check = verify_degeneration(&mu1, &family, &cert.g)?;
    let param_note = if cert.parameter == Scalar::t() {
        String::new()
    } else {
        format!(" against mu_s, s = {}", cert.parameter)
    };
    let mut by_pair: Vec<Failure> = Vec::new();
    for c in &check.residuals {
        let key = vec![c.i + 1, c.j + 1];
        match by_pair.last_mut() {
            Some(f) if f.indices == key => f.residual[c.k] = c.value.clone(),
            _ => {
                let mut residual = vec![Scalar::zero(); n];
                residual[c.k] = c.value.clone();
                by_pair.push(Failure { indices: key, residual });
            }
        }
    }
    stages.push(if check.residuals.is_empty() {
        StageResult::pass(Stage::Identity, format!("all {} pairs vanish{param_note}", n * (n - 1) / 2))
    } else {
        StageResult::fail(
            Stage::Identity,
            format!(
                "{} nonzero cells in {} pairs{param_note}",
                check.residuals.len(),
                by_pair.len()
            ),
            by_pair,
        )
    });

    stages.push(if check.det_is_unit {
        StageResult::pass(Stage::UnitDet, format!("det = {}", check.det))
    } else {
        StageResult::fail(Stage::UnitDet, format!("det = {} is not c*t^k", check.det), Vec::new())
    });

    stages.push(match limit_check(&mu_t, mu) {
        Ok(true) => StageResult::pass(Stage::Limit, "mu_t at t = 0 equals mu"),
        Ok(false) => StageResult::fail(Stage::Limit, "mu_t at t = 0 differs from mu", Vec::new()),
        Err(e) => StageResult::fail(Stage::Limit, e.to_string(), Vec::new()),
    });

    stages.push(match block_spectrum(&cert.g, &d.ideal, &dmat) {
        Ok(s) => {
            let tri = match s.triangular_agrees {
                Some(true) => "; triangular diagonal agrees",
                Some(false) => "; triangular diagonal disagrees",
                None => "; block not triangular",
            };
            if s.passed() {
                StageResult::pass(Stage::Spectrum, format!("char poly = prod(x - t^d){tri}"))
            } else {
                StageResult::fail(Stage::Spectrum, format!("char poly {} differs{tri}", s.char_poly), Vec::new())
            }
        }
        Err(e) => StageResult::fail(Stage::Spectrum, e.to_string(), Vec::new()),
    });

    Ok(VerificationReport {
        algebra: a.name.clone(),
        mode: a.mode,
        stages,
        cells: check.residuals,
    })
}

/// The `mu_t` and `mu_1` of an algebra's shipped deformation.
pub fn deformation_of(a: &Algebra) -> Result<(StructureConstants, Cochain2)> {
    let spec = DeformationSpec::from_algebra(a)?;
    let phi = go_cocycle(&spec);
    Ok((deform(&a.mu, &phi)?, phi))
}

/// Result of solving for one certificate entry.
#[derive(Clone, Debug, PartialEq)]
pub enum EntrySolution {
    /// Exactly one value in the search space makes every residual vanish.
    Unique(Scalar),
    /// No value in the search space works.
    None,
    /// The residual does not determine the entry.
    Underdetermined,
}

/// Solves the degeneration identity for the single entry `g[row][col]`, the unknown ranging over
/// `sum c_{k,m} t^k alpha^m` with `k` in `t_range` and `m <= alpha_degree`.
/// The residual is affine in one entry because each pair uses two distinct
/// columns of `g`.
pub fn solve_entry(
    mu1: &StructureConstants,
    mu_t: &StructureConstants,
    g: &ScalarMatrix,
    (row, col): (usize, usize),
    t_range: (i64, i64),
    alpha_degree: u32,
) -> Result<EntrySolution> {
    let n = mu1.dim();
    if mu_t.dim() != n || g.rows() != n || !g.is_square() {
        return Err(Error::DimensionMismatch { expected: n, found: g.rows() });
    }
    // Pairs whose residual depends on the entry; the rest must already vanish.
    let (touched, fixed): (Vec<_>, Vec<_>) =
        pairs(n).partition(|&(i, j)| i == col || j == col || !mu_t.stored(i, j)[col].is_zero());
    if residual_vector(mu1, mu_t, g, &fixed)?.iter().any(|x| !x.is_zero()) {
        return Ok(EntrySolution::None);
    }
    let mut base = g.clone();
    base[(row, col)] = Scalar::zero();
    let r0 = residual_vector(mu1, mu_t, &base, &touched)?;
    let monomials: Vec<Monomial> = (t_range.0..=t_range.1)
        .flat_map(|k| (0..=alpha_degree).map(move |m| Monomial::new(k, m)))
        .collect();
    let mut columns = Vec::with_capacity(monomials.len());
    for m in &monomials {
        let mut gm = base.clone();
        gm[(row, col)] = Scalar::monomial(int(1), m.t, m.alpha);
        let rm = residual_vector(mu1, mu_t, &gm, &touched)?;
        columns.push(rm.iter().zip(&r0).map(|(a, b)| a - b).collect::<Vec<Scalar>>());
    }
    // Coordinates: every (cell, monomial) that appears anywhere.
    let mut keys = std::collections::BTreeSet::new();
    for v in columns.iter().chain(std::iter::once(&r0)) {
        for (cell, s) in v.iter().enumerate() {
            for (m, _) in s.terms() {
                keys.insert((cell, *m));
            }
        }
    }
    let keys: Vec<(usize, Monomial)> = keys.into_iter().collect();
    let width = monomials.len() + 1;
    let mut m = RationalMatrix::zeros(keys.len(), width);
    for (r, (cell, mono)) in keys.iter().enumerate() {
        for (c, v) in columns.iter().enumerate() {
            m[(r, c)] = v[*cell].coeff(mono.t, mono.alpha);
        }
        m[(r, width - 1)] = r0[*cell].coeff(mono.t, mono.alpha);
    }
    // Solutions of L a + r0 = 0 are nullspace vectors with last coordinate 1.
    let null = rat_nullspace(&m);
    let zero = Rational::from_integer(0.into());
    let with_last: Vec<&Vec<Rational>> = null.iter().filter(|v| v[width - 1] != zero).collect();
    if with_last.is_empty() {
        return Ok(EntrySolution::None);
    }
    if null.len() > 1 {
        return Ok(EntrySolution::Underdetermined);
    }
    let v = with_last[0];
    let scale = v[width - 1].clone();
    let value = Scalar::from_terms(
        monomials
            .iter()
            .zip(v.iter())
            .map(|(mono, c)| (*mono, c / &scale)),
    );
    Ok(EntrySolution::Unique(value))
}

/// Residual components of the selected pairs, flattened.
fn residual_vector(
    mu1: &StructureConstants,
    mu_t: &StructureConstants,
    g: &ScalarMatrix,
    selected: &[(usize, usize)],
) -> Result<Vec<Scalar>> {
    let mut out = Vec::with_capacity(selected.len() * g.rows());
    for &(i, j) in selected {
        let lhs = mu1.eval(&g.column(i), &g.column(j))?;
        let rhs = g.apply(mu_t.stored(i, j))?;
        out.extend(lhs.iter().zip(&rhs).map(|(a, b)| a - b));
    }
    Ok(out)
}

/// The diagonal derivation `diag(0, 1, ..., 1)` on the ideal of the algebra's
/// shipped deformation: a weight-zero direction on the first ideal vector.
pub fn counterexample_spec(a: &Algebra) -> Result<DeformationSpec> {
    let d = a
        .deformation
        .as_ref()
        .ok_or_else(|| Error::InvalidSpec(format!("{} has no [deformation] block", a.name)))?;
    let mut diag = vec![Scalar::one(); d.ideal.len()];
    diag[0] = Scalar::zero();
    DeformationSpec::new(a.mu.clone(), d.ideal.clone(), d.outside, ScalarMatrix::diagonal(&diag))
}

/// Checks that make a deformation valid: cocycle, bracket, Jacobi of `mu_t`
/// and the limit at `t = 0`.
#[derive(Clone, Debug)]
pub struct DeformationValidity {
    pub cocycle: bool,
    pub bracket: bool,
    pub jacobi: bool,
    pub limit: bool,
    pub mu_t: StructureConstants,
    pub phi: Cochain2,
}

impl DeformationValidity {
    pub fn valid(&self) -> bool {
        self.cocycle && self.bracket && self.jacobi && self.limit
    }
}

pub fn check_deformation(spec: &DeformationSpec) -> Result<DeformationValidity> {
    let phi = go_cocycle(spec);
    let mu_t = deform(spec.base(), &phi)?;
    Ok(DeformationValidity {
        cocycle: cocycle_failures(spec.base(), &phi)?.passed(),
        bracket: phi.jacobi_check().passed(),
        jacobi: mu_t.jacobi_check().passed(),
        limit: limit_check(&mu_t, spec.base())?,
        mu_t,
        phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::basis_vector;

    fn heisenberg5() -> StructureConstants {
        // [e1,e_k] = e_{k+1} for k = 2..4 and [e2,e3] = e5: a 5-dimensional filiform.
        let mut mu = StructureConstants::zero(5);
        for k in 1..4 {
            mu.set(0, k, basis_vector(5, k + 1)).unwrap();
        }
        mu.set(1, 2, basis_vector(5, 4)).unwrap();
        mu
    }

    fn spec(diag: &[i64]) -> Result<DeformationSpec> {
        let d = ScalarMatrix::diagonal(&diag.iter().map(|&x| Scalar::from_int(x)).collect::<Vec<_>>());
        DeformationSpec::new(heisenberg5(), SubspaceSpec::new(5, vec![1, 2, 3, 4]).unwrap(), 0, d)
    }

    #[test]
    fn cocycle_of_graded_derivation() {
        let s = spec(&[2, 3, 4, 5]).unwrap();
        let phi = go_cocycle(&s);
        assert_eq!(phi.basis_bracket(0, 3)[3], Scalar::from_int(4));
        let v = check_deformation(&s).unwrap();
        assert!(v.valid());
    }

    #[test]
    fn non_derivation_rejected() {
        assert!(matches!(spec(&[1, 1, 1, 1]), Err(Error::InvalidSpec(_))));
        assert!(matches!(spec(&[1, 2, 3, 4]), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn zero_derivation_gives_zero_cochain() {
        let s = spec(&[0, 0, 0, 0]).unwrap();
        assert!(go_cocycle(&s).is_zero());
        let mu_t = deform(s.base(), &go_cocycle(&s)).unwrap();
        assert!(mu_t.same_entries(s.base()));
    }

    #[test]
    fn identity_certificate() {
        let mu = heisenberg5();
        let check = verify_degeneration(&mu, &mu, &ScalarMatrix::identity(5)).unwrap();
        assert!(check.passed());
    }

    #[test]
    fn limit_rejects_pole() {
        let mut mu_t = heisenberg5();
        let mut col = vec![Scalar::zero(); 5];
        col[2] = Scalar::t_pow(-1);
        mu_t.set(1, 3, col).unwrap();
        assert!(matches!(limit_check(&mu_t, &heisenberg5()), Err(Error::NegativeExponent(_))));
        assert!(limit_check(&heisenberg5(), &heisenberg5()).unwrap());
    }

    #[test]
    fn spectrum_of_small_diagonal() {
        let g = ScalarMatrix::diagonal(&[Scalar::t(), Scalar::t_pow(3)]);
        let h = SubspaceSpec::whole(2);
        let d = ScalarMatrix::diagonal(&[Scalar::from_int(1), Scalar::from_int(2)]);
        assert!(!block_spectrum_check(&g, &h, &d).unwrap());
        let d = ScalarMatrix::diagonal(&[Scalar::from_int(3), Scalar::from_int(1)]);
        assert!(block_spectrum_check(&g, &h, &d).unwrap());
    }

    #[test]
    fn spectrum_requires_invariance() {
        let mut g = ScalarMatrix::identity(2);
        g[(0, 1)] = Scalar::t();
        let h = SubspaceSpec::new(2, vec![1]).unwrap();
        let d = ScalarMatrix::diagonal(&[Scalar::one()]);
        assert!(matches!(block_spectrum_check(&g, &h, &d), Err(Error::NotInvariant(_))));
    }

    #[test]
    fn graded_certificate_on_model_filiform() {
        // g = diag(t, t^2, t^3, t^4, t^5) contracts mu_1 onto mu_t for D = diag(2,3,4,5).
        let s = spec(&[2, 3, 4, 5]).unwrap();
        let mu_t = deform(s.base(), &go_cocycle(&s)).unwrap();
        let mu1 = mu_t.eval_t(&int(1)).unwrap();
        let g = ScalarMatrix::diagonal(&[
            Scalar::t(),
            Scalar::t_pow(2),
            Scalar::t_pow(3),
            Scalar::t_pow(4),
            Scalar::t_pow(5),
        ]);
        assert!(verify_degeneration(&mu1, &mu_t, &g).unwrap().passed());
        let mut bad = g.clone();
        bad[(3, 3)] = Scalar::t_pow(2);
        let cells = identity_residuals(&mu1, &mu_t, &bad).unwrap();
        assert!(!cells.is_empty());
        match solve_entry(&mu1, &mu_t, &bad, (3, 3), (0, 5), 0).unwrap() {
            EntrySolution::Unique(v) => assert_eq!(v, Scalar::t_pow(4)),
            other => panic!("{other:?}"),
        }
    }
}
