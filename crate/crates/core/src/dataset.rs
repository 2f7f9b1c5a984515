//! Algebra definition files.
//!
//! A file is a sequence of `[section]` headers, each followed by one
//! `key = value` assignment per line. Lines starting with `#` are comments;
//! those before the first section are kept as the file header.
//!
//! ```text
//! [algebra]        name, source, dim, params
//! [basis-change]   Yi = rational combination of Xj
//! [brackets]       bracket i j = combination of Yk
//! [deformation]    ideal, outside, diag
//! [derivation]     d r c = rational        (inert metadata)
//! [certificate]    parameter, pK = expr, g r c = expr
//! [errata]         entry, original, corrected, justification
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::expr::{basis_symbol_index, parse_at, Expression, Linear, ParseError};
use crate::lie::{Params, StructureConstants, SubspaceSpec};
use crate::linalg::{RationalMatrix, ScalarMatrix};
use crate::scalar::{fmt_rational, parse_rational, Rational, Scalar};

/// Whether errata blocks are applied when elaborating.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash)]
pub enum ErrataMode {
    #[default]
    Verbatim,
    Corrected,
}

impl std::str::FromStr for ErrataMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "verbatim" => Ok(ErrataMode::Verbatim),
            "corrected" => Ok(ErrataMode::Corrected),
            other => Err(format!("unknown errata mode `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisRow {
    /// 1-based `Y` index.
    pub y: usize,
    /// `(X index, coefficient)`, sorted by index, no zero coefficients.
    pub terms: Vec<(usize, Rational)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BracketLine {
    pub i: usize,
    pub j: usize,
    pub value: Expression,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeformationBlock {
    pub ideal: Vec<usize>,
    pub outside: usize,
    pub diag: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateBlock {
    /// Deformation parameter the certificate is written against; `t` when absent.
    pub parameter: Option<Expression>,
    pub polys: Vec<(String, Expression)>,
    /// `(row, col, value)`, 1-based, sorted.
    pub entries: Vec<(usize, usize, Expression)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Erratum {
    pub entry: String,
    pub original: Expression,
    pub corrected: Expression,
    pub justification: String,
}

/// Errata fields by key: (line, value, value column).
type RawErratum = BTreeMap<String, (usize, String, usize)>;

/// Parsed, not yet elaborated, algebra file. Indices are 1-based as written.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraFile {
    pub comments: Vec<String>,
    pub name: String,
    pub source: Option<String>,
    pub dim: usize,
    pub params: Vec<String>,
    pub basis_change: Vec<BasisRow>,
    pub brackets: Vec<BracketLine>,
    pub deformation: Option<DeformationBlock>,
    pub derivation: Vec<(usize, usize, Rational)>,
    pub certificate: Option<CertificateBlock>,
    pub errata: Vec<Erratum>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Section {
    Algebra,
    BasisChange,
    Brackets,
    Deformation,
    Derivation,
    Certificate,
    Errata,
}

const SECTIONS: [(&str, Section); 7] = [
    ("algebra", Section::Algebra),
    ("basis-change", Section::BasisChange),
    ("brackets", Section::Brackets),
    ("deformation", Section::Deformation),
    ("derivation", Section::Derivation),
    ("certificate", Section::Certificate),
    ("errata", Section::Errata),
];

fn syntax(line: usize, column: usize, expected: &[&str], found: &str, message: &str) -> Error {
    Error::Parse(ParseError {
        line,
        column,
        expected: expected.iter().map(|s| s.to_string()).collect(),
        found: found.to_string(),
        message: Some(message.to_string()),
    })
}

fn is_poly_name(s: &str) -> bool {
    s.strip_prefix('p')
        .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

fn poly_key(name: &str) -> (u64, String) {
    (name[1..].parse().unwrap_or(u64::MAX), name.to_string())
}

/// One `key = value` line with the byte column where the value starts.
struct Assignment<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
    value_col: usize,
}

fn split_assignment(line_no: usize, raw: &str) -> Result<Assignment<'_>> {
    let Some(eq) = raw.find('=') else {
        return Err(syntax(line_no, raw.len() + 1, &["`=`"], "end of line", "expected an assignment"));
    };
    let after = &raw[eq + 1..];
    let lead = after.len() - after.trim_start().len();
    Ok(Assignment {
        line: line_no,
        key: raw[..eq].trim(),
        value: after.trim(),
        value_col: eq + 1 + lead,
    })
}

fn parse_indices(a: &Assignment, count: usize, what: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = a.key.split_whitespace().collect();
    if parts.len() != count + 1 || parts[0] != what {
        return Err(syntax(
            a.line,
            1,
            &[&format!("`{what}` followed by {count} indices")],
            &format!("`{}`", a.key),
            "malformed key",
        ));
    }
    parts[1..]
        .iter()
        .map(|p| {
            p.parse::<usize>()
                .map_err(|_| syntax(a.line, 1, &["positive integer"], &format!("`{p}`"), "bad index"))
        })
        .collect()
}

fn parse_index_list(a: &Assignment) -> Result<Vec<usize>> {
    a.value
        .split_whitespace()
        .map(|p| {
            p.parse::<usize>()
                .map_err(|_| syntax(a.line, a.value_col + 1, &["positive integer"], &format!("`{p}`"), "bad index"))
        })
        .collect()
}

fn parse_rat_value(a: &Assignment, text: &str) -> Result<Rational> {
    parse_rational(text).ok_or_else(|| {
        syntax(a.line, a.value_col + 1, &["rational p/q"], &format!("`{text}`"), "bad rational")
    })
}

fn parse_expr_value(a: &Assignment, allow: &dyn Fn(&str) -> bool) -> Result<Expression> {
    Ok(parse_at(a.value, a.line, a.value_col, allow)?)
}

fn any_ident(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
}

impl AlgebraFile {
    /// Parses file text. Structural checks that need the whole file are left
    /// to [`validate`](Self::validate).
    pub fn parse(text: &str) -> Result<AlgebraFile> {
        let mut file = AlgebraFile {
            comments: Vec::new(),
            name: String::new(),
            source: None,
            dim: 0,
            params: Vec::new(),
            basis_change: Vec::new(),
            brackets: Vec::new(),
            deformation: None,
            derivation: Vec::new(),
            certificate: None,
            errata: Vec::new(),
        };
        let mut section: Option<Section> = None;
        let mut seen = BTreeSet::new();
        let mut have_dim = false;
        let mut deformation: (Option<Vec<usize>>, Option<usize>, Option<Vec<Rational>>) = (None, None, None);
        let mut pending: Option<(usize, RawErratum)> = None;
        let mut raw_errata = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() {
                continue;
            }
            if trimmed.starts_with('#') {
                if section.is_none() {
                    file.comments.push(trimmed.trim_start_matches('#').trim().to_string());
                }
                continue;
            }
            if let Some(name) = trimmed.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                let Some(&(_, s)) = SECTIONS.iter().find(|(n, _)| *n == name) else {
                    let names: Vec<String> = SECTIONS.iter().map(|(n, _)| format!("[{n}]")).collect();
                    let names: Vec<&str> = names.iter().map(String::as_str).collect();
                    return Err(syntax(line_no, 1, &names, trimmed, "unknown section"));
                };
                if !seen.insert(name.to_string()) {
                    return Err(syntax(line_no, 1, &[], trimmed, "section appears twice"));
                }
                section = Some(s);
                continue;
            }
            let Some(sec) = section else {
                return Err(syntax(line_no, 1, &["section header"], trimmed, "content before first section"));
            };
            let a = split_assignment(line_no, raw)?;
            match sec {
                Section::Algebra => match a.key {
                    "name" => file.name = a.value.to_string(),
                    "source" => file.source = (!a.value.is_empty()).then(|| a.value.to_string()),
                    "dim" => {
                        file.dim = a.value.parse().map_err(|_| {
                            syntax(line_no, a.value_col + 1, &["positive integer"], a.value, "bad dimension")
                        })?;
                        have_dim = true;
                    }
                    "params" => file.params = a.value.split_whitespace().map(str::to_string).collect(),
                    other => {
                        return Err(syntax(line_no, 1, &["name", "source", "dim", "params"], other, "unknown key"))
                    }
                },
                Section::BasisChange => {
                    let y = basis_symbol_index('Y', a.key).ok_or_else(|| {
                        syntax(line_no, 1, &["Yi"], a.key, "basis-change key must be a Y vector")
                    })?;
                    let e = parse_expr_value(&a, &|s| basis_symbol_index('X', s).is_some())?;
                    let lin = e
                        .eval_linear(&|_| None, &|s| basis_symbol_index('X', s).is_some())
                        .map_err(|err| syntax(line_no, a.value_col + 1, &[], a.value, &err.to_string()))?;
                    let mut terms = Vec::new();
                    for (k, v) in lin.parts {
                        let (Some(k), Some(c)) = (k, v.as_constant()) else {
                            return Err(syntax(
                                line_no,
                                a.value_col + 1,
                                &["rational combination of Xj"],
                                a.value,
                                "basis change must be a rational combination of X vectors",
                            ));
                        };
                        terms.push((basis_symbol_index('X', &k).expect("checked"), c));
                    }
                    terms.sort_by_key(|(k, _)| *k);
                    file.basis_change.push(BasisRow { y, terms });
                }
                Section::Brackets => {
                    let ij = parse_indices(&a, 2, "bracket")?;
                    let value = parse_expr_value(&a, &any_ident)?;
                    file.brackets.push(BracketLine {
                        i: ij[0],
                        j: ij[1],
                        value,
                    });
                }
                Section::Deformation => match a.key {
                    "ideal" => deformation.0 = Some(parse_index_list(&a)?),
                    "outside" => {
                        let v = parse_index_list(&a)?;
                        if v.len() != 1 {
                            return Err(syntax(line_no, a.value_col + 1, &["one index"], a.value, "bad outside index"));
                        }
                        deformation.1 = Some(v[0]);
                    }
                    "diag" => {
                        deformation.2 = Some(
                            a.value
                                .split_whitespace()
                                .map(|p| parse_rat_value(&a, p))
                                .collect::<Result<_>>()?,
                        )
                    }
                    other => return Err(syntax(line_no, 1, &["ideal", "outside", "diag"], other, "unknown key")),
                },
                Section::Derivation => {
                    let rc = parse_indices(&a, 2, "d")?;
                    let v = parse_rat_value(&a, a.value)?;
                    file.derivation.push((rc[0], rc[1], v));
                }
                Section::Certificate => {
                    let cert = file.certificate.get_or_insert_with(|| CertificateBlock {
                        parameter: None,
                        polys: Vec::new(),
                        entries: Vec::new(),
                    });
                    if a.key == "parameter" {
                        cert.parameter = Some(parse_expr_value(&a, &|_| false)?);
                    } else if is_poly_name(a.key) {
                        cert.polys.push((a.key.to_string(), parse_expr_value(&a, &any_ident)?));
                    } else {
                        let rc = parse_indices(&a, 2, "g")?;
                        cert.entries.push((rc[0], rc[1], parse_expr_value(&a, &any_ident)?));
                    }
                }
                Section::Errata => {
                    const KEYS: [&str; 4] = ["entry", "original", "corrected", "justification"];
                    if !KEYS.contains(&a.key) {
                        return Err(syntax(line_no, 1, &KEYS, a.key, "unknown key"));
                    }
                    if a.key == "entry" {
                        if let Some(p) = pending.take() {
                            raw_errata.push(p);
                        }
                        pending = Some((line_no, BTreeMap::new()));
                    }
                    let Some((_, fields)) = pending.as_mut() else {
                        return Err(syntax(line_no, 1, &["entry"], a.key, "errata record must start with `entry`"));
                    };
                    if fields
                        .insert(a.key.to_string(), (line_no, a.value.to_string(), a.value_col))
                        .is_some()
                    {
                        return Err(syntax(line_no, 1, &[], a.key, "duplicate key in errata record"));
                    }
                }
            }
        }
        if let Some(p) = pending.take() {
            raw_errata.push(p);
        }
        for (start, fields) in raw_errata {
            let get = |k: &str| {
                fields
                    .get(k)
                    .cloned()
                    .ok_or_else(|| syntax(start, 1, &[k], "end of record", "incomplete errata record"))
            };
            let (_, entry, _) = get("entry")?;
            let (ol, ov, oc) = get("original")?;
            let (cl, cv, cc) = get("corrected")?;
            let (_, justification, _) = get("justification")?;
            file.errata.push(Erratum {
                entry,
                original: parse_at(&ov, ol, oc, &any_ident)?,
                corrected: parse_at(&cv, cl, cc, &any_ident)?,
                justification,
            });
        }
        if !have_dim {
            return Err(syntax(1, 1, &["dim"], "end of file", "missing `dim` in [algebra]"));
        }
        if file.name.is_empty() {
            return Err(syntax(1, 1, &["name"], "end of file", "missing `name` in [algebra]"));
        }
        match deformation {
            (None, None, None) => {}
            (Some(ideal), Some(outside), Some(diag)) => {
                file.deformation = Some(DeformationBlock { ideal, outside, diag })
            }
            _ => {
                return Err(syntax(
                    1,
                    1,
                    &["ideal", "outside", "diag"],
                    "end of file",
                    "incomplete [deformation] section",
                ))
            }
        }
        file.canonicalize();
        Ok(file)
    }

    fn canonicalize(&mut self) {
        self.basis_change.sort_by_key(|r| r.y);
        self.brackets.sort_by_key(|b| (b.i, b.j));
        self.derivation.sort_by_key(|(r, c, _)| (*r, *c));
        if let Some(c) = &mut self.certificate {
            c.polys.sort_by_key(|(n, _)| poly_key(n));
            c.entries.sort_by_key(|(r, c, _)| (*r, *c));
        }
    }

    /// Declared symbol set.
    pub fn declared_params(&self) -> Params {
        Params {
            t: false,
            alpha: self.params.iter().any(|p| p == "alpha"),
        }
    }

    /// Checks every structural invariant; `origin` names the file in errors.
    pub fn validate(&self, origin: &str) -> Result<()> {
        let fail = |message: String| Error::Validation {
            path: origin.to_string(),
            message,
        };
        let n = self.dim;
        if n == 0 {
            return Err(fail("dimension must be positive".into()));
        }
        if let Some(p) = self.params.iter().find(|p| p.as_str() != "alpha") {
            return Err(fail(format!("unsupported parameter `{p}` (only alpha may be declared)")));
        }
        let params = self.declared_params();
        let in_range = |i: usize| (1..=n).contains(&i);

        let mut ys = BTreeSet::new();
        for row in &self.basis_change {
            if !in_range(row.y) || !ys.insert(row.y) {
                return Err(fail(format!("basis-change row Y{} out of range or repeated", row.y)));
            }
            if let Some((k, _)) = row.terms.iter().find(|(k, _)| !in_range(*k)) {
                return Err(fail(format!("basis-change row Y{} uses X{k} beyond dimension {n}", row.y)));
            }
        }

        let mut pairs = BTreeSet::new();
        for b in &self.brackets {
            if !in_range(b.i) || !in_range(b.j) {
                return Err(fail(format!(
                    "bracket index {} exceeds dimension {n}",
                    if in_range(b.i) { b.j } else { b.i }
                )));
            }
            if b.i >= b.j {
                return Err(fail(format!("bracket {} {} must have i < j", b.i, b.j)));
            }
            if !pairs.insert((b.i, b.j)) {
                return Err(fail(format!("bracket {} {} given twice", b.i, b.j)));
            }
            self.bracket_column(b).map_err(|m| fail(format!("bracket {} {}: {m}", b.i, b.j)))?;
        }

        if let Some(d) = &self.deformation {
            if let Some(&i) = d.ideal.iter().find(|&&i| !in_range(i)) {
                return Err(fail(format!("ideal index {i} exceeds dimension {n}")));
            }
            if d.ideal.iter().collect::<BTreeSet<_>>().len() != d.ideal.len() {
                return Err(fail("ideal indices repeat".into()));
            }
            if !in_range(d.outside) || d.ideal.contains(&d.outside) {
                return Err(fail(format!("outside index {} must be in range and not in the ideal", d.outside)));
            }
            if d.diag.len() != d.ideal.len() {
                return Err(fail(format!(
                    "diag has {} entries but the ideal has {}",
                    d.diag.len(),
                    d.ideal.len()
                )));
            }
        }

        for (r, c, _) in &self.derivation {
            if !in_range(*r) || !in_range(*c) {
                return Err(fail(format!("derivation entry ({r},{c}) out of range")));
            }
        }
        if self.derivation.windows(2).any(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(fail("derivation entry given twice".into()));
        }

        if let Some(cert) = &self.certificate {
            let mut names = BTreeSet::new();
            for (name, e) in &cert.polys {
                if !names.insert(name.clone()) {
                    return Err(fail(format!("polynomial {name} defined twice")));
                }
                if let Some(s) = e.symbols().into_iter().next() {
                    return Err(fail(format!("{name} refers to `{s}`")));
                }
                if e.uses_alpha() && !params.alpha {
                    return Err(fail(format!("{name} uses alpha, which is not declared")));
                }
            }
            if let Some(p) = &cert.parameter {
                let ok = p.to_scalar().ok().is_some_and(|s| s.as_laurent_unit().is_some());
                if !ok {
                    return Err(fail("certificate parameter must be a Laurent unit c*t^k".into()));
                }
            }
            for w in cert.entries.windows(2) {
                if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
                    return Err(fail(format!("g {} {} given twice", w[0].0, w[0].1)));
                }
            }
            for (r, c, e) in &cert.entries {
                if !in_range(*r) || !in_range(*c) {
                    return Err(fail(format!("g entry ({r},{c}) out of range")));
                }
                if let Some(s) = e.symbols().into_iter().find(|s| !names.contains(s)) {
                    return Err(fail(format!("g {r} {c} refers to undefined `{s}`")));
                }
                if e.uses_alpha() && !params.alpha {
                    return Err(fail(format!("g {r} {c} uses alpha, which is not declared")));
                }
            }
        }

        for er in &self.errata {
            self.locate(&er.entry).map_err(fail)?;
        }
        Ok(())
    }

    fn bracket_column(&self, b: &BracketLine) -> std::result::Result<Vec<Scalar>, String> {
        let n = self.dim;
        let is_y = |s: &str| basis_symbol_index('Y', s).is_some_and(|k| k >= 1);
        let lin = b.value.eval_linear(&|_| None, &is_y).map_err(|e| e.to_string())?;
        let mut col = vec![Scalar::zero(); n];
        let params = self.declared_params();
        for (k, v) in lin.parts {
            let Some(k) = k else {
                return Err("has a scalar term outside any basis vector".into());
            };
            let idx = basis_symbol_index('Y', &k).expect("vector");
            if idx > n {
                return Err(format!("uses Y{idx} beyond dimension {n}"));
            }
            if !params.allows(&v) {
                return Err(format!("coefficient `{v}` uses an undeclared symbol"));
            }
            col[idx - 1] = v;
        }
        Ok(col)
    }

    /// Current expression at an errata entry path.
    fn locate(&self, entry: &str) -> std::result::Result<Expression, String> {
        let cert = || self.certificate.as_ref().ok_or_else(|| format!("`{entry}`: no [certificate]"));
        let parts: Vec<&str> = entry.split('.').collect();
        match parts.as_slice() {
            ["certificate", "parameter"] => Ok(cert()?.parameter.clone().unwrap_or(Expression::T)),
            ["certificate", p] if is_poly_name(p) => cert()?
                .polys
                .iter()
                .find(|(n, _)| n == p)
                .map(|(_, e)| e.clone())
                .ok_or_else(|| format!("`{entry}`: no polynomial {p}")),
            ["certificate", "g", r, c] => {
                let (r, c): (usize, usize) = (
                    r.parse().map_err(|_| format!("bad row in `{entry}`"))?,
                    c.parse().map_err(|_| format!("bad column in `{entry}`"))?,
                );
                Ok(cert()?
                    .entries
                    .iter()
                    .find(|(a, b, _)| (*a, *b) == (r, c))
                    .map(|(_, _, e)| e.clone())
                    .unwrap_or(Expression::Num(Rational::from_integer(0.into()))))
            }
            ["brackets", i, j] => {
                let (i, j): (usize, usize) = (
                    i.parse().map_err(|_| format!("bad index in `{entry}`"))?,
                    j.parse().map_err(|_| format!("bad index in `{entry}`"))?,
                );
                Ok(self
                    .brackets
                    .iter()
                    .find(|b| (b.i, b.j) == (i, j))
                    .map(|b| b.value.clone())
                    .unwrap_or(Expression::Num(Rational::from_integer(0.into()))))
            }
            _ => Err(format!("unknown errata entry path `{entry}`")),
        }
    }

    fn poly_env(&self) -> BTreeMap<String, Scalar> {
        self.certificate
            .iter()
            .flat_map(|c| &c.polys)
            .filter_map(|(n, e)| e.to_scalar().ok().map(|s| (n.clone(), s)))
            .collect()
    }

    fn value_of(&self, e: &Expression) -> Option<Linear> {
        let env = self.poly_env();
        let is_y = |s: &str| basis_symbol_index('Y', s).is_some();
        e.eval_linear(&|s| env.get(s).cloned(), &is_y).ok()
    }

    /// Returns a copy with every erratum's corrected expression in place. The
    /// stored original must agree in value with the current entry.
    pub fn apply_errata(&self, origin: &str) -> Result<AlgebraFile> {
        let mut out = self.clone();
        for er in &self.errata {
            let fail = |message: String| Error::Validation {
                path: origin.to_string(),
                message,
            };
            let current = out.locate(&er.entry).map_err(fail)?;
            if out.value_of(&current) != out.value_of(&er.original) {
                return Err(fail(format!(
                    "erratum for `{}`: recorded original `{}` does not match the file (`{}`)",
                    er.entry, er.original, current
                )));
            }
            out.replace(&er.entry, er.corrected.clone());
        }
        Ok(out)
    }

    fn replace(&mut self, entry: &str, value: Expression) {
        let parts: Vec<&str> = entry.split('.').collect();
        match parts.as_slice() {
            ["certificate", "parameter"] => {
                if let Some(c) = &mut self.certificate {
                    c.parameter = Some(value);
                }
            }
            ["certificate", "g", r, c] => {
                let (r, c): (usize, usize) = (r.parse().unwrap_or(0), c.parse().unwrap_or(0));
                if let Some(cert) = &mut self.certificate {
                    cert.entries.retain(|(a, b, _)| (*a, *b) != (r, c));
                    cert.entries.push((r, c, value));
                }
            }
            ["certificate", p] => {
                if let Some(c) = &mut self.certificate {
                    if let Some(slot) = c.polys.iter_mut().find(|(n, _)| n == p) {
                        slot.1 = value;
                    }
                }
            }
            ["brackets", i, j] => {
                let (i, j): (usize, usize) = (i.parse().unwrap_or(0), j.parse().unwrap_or(0));
                self.brackets.retain(|b| (b.i, b.j) != (i, j));
                self.brackets.push(BracketLine { i, j, value });
            }
            _ => {}
        }
        self.canonicalize();
    }

    /// Validates and evaluates every expression.
    pub fn elaborate(&self, origin: &str, mode: ErrataMode) -> Result<Algebra> {
        self.validate(origin)?;
        let file = match mode {
            ErrataMode::Verbatim => self.clone(),
            ErrataMode::Corrected => self.apply_errata(origin)?,
        };
        let fail = |message: String| Error::Validation {
            path: origin.to_string(),
            message,
        };
        let n = file.dim;
        let params = file.declared_params();

        let mut mu = StructureConstants::zero(n).named(file.name.clone()).with_params(params);
        for b in &file.brackets {
            let col = file.bracket_column(b).map_err(&fail)?;
            mu.set(b.i - 1, b.j - 1, col)?;
        }

        let basis_change = (!file.basis_change.is_empty()).then(|| {
            let mut m = RationalMatrix::zeros(n, n);
            for row in &file.basis_change {
                for (k, c) in &row.terms {
                    m[(row.y - 1, k - 1)] = c.clone();
                }
            }
            m
        });

        let deformation = match &file.deformation {
            Some(d) => Some(DeformationData {
                ideal: SubspaceSpec::new(n, d.ideal.iter().map(|i| i - 1).collect())?,
                outside: d.outside - 1,
                diag: d.diag.clone(),
            }),
            None => None,
        };

        let derivation = (!file.derivation.is_empty()).then(|| {
            let mut m = RationalMatrix::zeros(n, n);
            for (r, c, v) in &file.derivation {
                m[(r - 1, c - 1)] = v.clone();
            }
            m
        });

        let certificate = match &file.certificate {
            Some(c) => {
                let mut polys = Vec::new();
                let mut env = BTreeMap::new();
                for (name, e) in &c.polys {
                    let s = e.to_scalar().map_err(|err| fail(format!("{name}: {err}")))?;
                    env.insert(name.clone(), s.clone());
                    polys.push((name.clone(), s));
                }
                let mut g = ScalarMatrix::zeros(n, n);
                for (r, col, e) in &c.entries {
                    g[(r - 1, col - 1)] = e
                        .eval_with(&|s| env.get(s).cloned())
                        .map_err(|err| fail(format!("g {r} {col}: {err}")))?;
                }
                let parameter = match &c.parameter {
                    Some(p) => p.to_scalar().map_err(|err| fail(format!("parameter: {err}")))?,
                    None => Scalar::t(),
                };
                Some(Certificate { g, parameter, polys })
            }
            None => None,
        };

        Ok(Algebra {
            name: file.name.clone(),
            source: file.source.clone(),
            dim: n,
            params,
            mu,
            basis_change,
            deformation,
            derivation,
            certificate,
            errata: file.errata.clone(),
            mode,
        })
    }

    /// Deterministic canonical text; `parse(serialize(a)) == a`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            if c.is_empty() {
                out.push_str("#\n");
            } else {
                let _ = writeln!(out, "# {c}");
            }
        }
        out.push_str("[algebra]\n");
        let _ = writeln!(out, "name = {}", self.name);
        if let Some(s) = &self.source {
            let _ = writeln!(out, "source = {s}");
        }
        let _ = writeln!(out, "dim = {}", self.dim);
        if self.params.is_empty() {
            out.push_str("params =\n");
        } else {
            let _ = writeln!(out, "params = {}", self.params.join(" "));
        }

        if !self.basis_change.is_empty() {
            out.push_str("\n[basis-change]\n");
            for row in &self.basis_change {
                let _ = writeln!(out, "Y{} = {}", row.y, render_combination(&row.terms, 'X'));
            }
        }
        if !self.brackets.is_empty() {
            out.push_str("\n[brackets]\n");
            for b in &self.brackets {
                let _ = writeln!(out, "bracket {} {} = {}", b.i, b.j, b.value);
            }
        }
        if let Some(d) = &self.deformation {
            out.push_str("\n[deformation]\n");
            let join = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
            let _ = writeln!(out, "ideal = {}", join(&d.ideal));
            let _ = writeln!(out, "outside = {}", d.outside);
            let diag: Vec<String> = d.diag.iter().map(fmt_rational).collect();
            let _ = writeln!(out, "diag = {}", diag.join(" "));
        }
        if !self.derivation.is_empty() {
            out.push_str("\n[derivation]\n");
            for (r, c, v) in &self.derivation {
                let _ = writeln!(out, "d {r} {c} = {}", fmt_rational(v));
            }
        }
        if let Some(c) = &self.certificate {
            out.push_str("\n[certificate]\n");
            if let Some(p) = &c.parameter {
                let _ = writeln!(out, "parameter = {p}");
            }
            for (name, e) in &c.polys {
                let _ = writeln!(out, "{name} = {e}");
            }
            for (r, col, e) in &c.entries {
                let _ = writeln!(out, "g {r} {col} = {e}");
            }
        }
        if !self.errata.is_empty() {
            out.push_str("\n[errata]\n");
            for (k, er) in self.errata.iter().enumerate() {
                if k > 0 {
                    out.push('\n');
                }
                let _ = writeln!(out, "entry = {}", er.entry);
                let _ = writeln!(out, "original = {}", er.original);
                let _ = writeln!(out, "corrected = {}", er.corrected);
                let _ = writeln!(out, "justification = {}", er.justification);
            }
        }
        out
    }
}

/// `c1*X1 + c2*X2 - ...` with unit coefficients elided; `0` when empty.
pub fn render_combination(terms: &[(usize, Rational)], prefix: char) -> String {
    let mut s = String::new();
    for (n, (k, c)) in terms.iter().enumerate() {
        let neg = c < &Rational::from_integer(0.into());
        let mag = if neg { -c.clone() } else { c.clone() };
        let body = if mag == Rational::from_integer(1.into()) {
            format!("{prefix}{k}")
        } else {
            format!("{}*{prefix}{k}", fmt_rational(&mag))
        };
        match (n == 0, neg) {
            (true, false) => s.push_str(&body),
            (true, true) => s.push_str(&format!("-{body}")),
            (false, false) => s.push_str(&format!(" + {body}")),
            (false, true) => s.push_str(&format!(" - {body}")),
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

pub fn serialize_algebra(a: &AlgebraFile) -> String {
    a.serialize()
}

/// Elaborated deformation block (0-based).
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationData {
    pub ideal: SubspaceSpec,
    pub outside: usize,
    pub diag: Vec<Rational>,
}

impl DeformationData {
    /// `D` as a matrix on the ideal, in the ideal's basis order.
    pub fn derivation_matrix(&self) -> ScalarMatrix {
        ScalarMatrix::diagonal(&self.diag.iter().cloned().map(Scalar::constant).collect::<Vec<_>>())
    }
}

/// Elaborated certificate: `g_t` and the parameter it is written against.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub g: ScalarMatrix,
    /// The certificate relates `mu_1` to `mu_s` with `s = parameter`.
    pub parameter: Scalar,
    pub polys: Vec<(String, Scalar)>,
}

/// A fully elaborated algebra file. Indices are 0-based.
#[derive(Clone, Debug)]
pub struct Algebra {
    pub name: String,
    pub source: Option<String>,
    pub dim: usize,
    pub params: Params,
    pub mu: StructureConstants,
    /// Row `i` holds the X-coordinates of `Y_{i+1}`.
    pub basis_change: Option<RationalMatrix>,
    pub deformation: Option<DeformationData>,
    pub derivation: Option<RationalMatrix>,
    pub certificate: Option<Certificate>,
    pub errata: Vec<Erratum>,
    pub mode: ErrataMode,
}

impl Algebra {
    pub fn has_alpha(&self) -> bool {
        self.params.alpha
    }

    pub fn poly(&self, name: &str) -> Option<&Scalar> {
        self.certificate
            .as_ref()?
            .polys
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
    }
}

/// Reads, validates and elaborates one file.
pub fn load_algebra(path: &Path, mode: ErrataMode) -> Result<Algebra> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let origin = path.display().to_string();
    AlgebraFile::parse(&text)?.elaborate(&origin, mode)
}

/// Reads and parses one file without elaborating it.
pub fn read_algebra_file(path: &Path) -> Result<AlgebraFile> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    AlgebraFile::parse(&text)
}
