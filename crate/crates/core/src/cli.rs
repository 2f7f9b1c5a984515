//! Command-line driver: verification, invariants, the weight-zero
//! counterexample and errata search over the corpus.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::corpus;
use crate::dataset::{Algebra, ErrataMode};
use crate::deformation::{
    certified_family, check_deformation, counterexample_spec, deformation_of, identity_residuals, solve_entry,
    verify_table, EntrySolution, VerificationReport,
};
use crate::invariants::{
    derivation_algebra, derived_series, invariant_report, lower_central_series, BasePoint, DeformedPoint,
    InvariantReport, Sampling,
};
use crate::lie::StructureConstants;
use crate::scalar::{fmt_rational, int, parse_rational, Rational, Scalar};
use crate::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Errata {
    Verbatim,
    Corrected,
}

impl From<Errata> for ErrataMode {
    fn from(e: Errata) -> Self {
        match e {
            Errata::Verbatim => ErrataMode::Verbatim,
            Errata::Corrected => ErrataMode::Corrected,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "filiform", version, about = "Exact checks of degeneration certificates for filiform Lie algebras")]
pub struct Cli {
    /// Read algebra files from this directory instead of the embedded corpus.
    #[arg(long, global = true)]
    pub data: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Errata::Verbatim)]
    pub errata: Errata,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the verification pipeline.
    Verify {
        names: Vec<String>,
        #[arg(long, conflicts_with = "names")]
        all: bool,
    },
    /// Sampled isomorphism invariants of an algebra and its deformation.
    Invariants {
        name: String,
        /// t sample (repeatable, nonzero).
        #[arg(long = "t", allow_hyphen_values = true, value_parser = rational_arg)]
        t: Vec<Rational>,
        /// alpha sample (repeatable).
        #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
        alpha: Vec<Rational>,
    },
    /// Build and check the weight-zero deformation of mu17.
    Counterexample,
    /// Verification, invariants and counterexample in one report.
    Report { names: Vec<String> },
    /// Search for single-entry certificate corrections.
    SolveErrata {
        name: String,
        #[arg(long, default_value_t = -2, allow_hyphen_values = true)]
        t_min: i64,
        #[arg(long, default_value_t = 8)]
        t_max: i64,
        #[arg(long, default_value_t = 2)]
        alpha_degree: u32,
    },
}

fn rational_arg(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("`{s}` is not a rational number"))
}

/// Resolved run options.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub names: Vec<String>,
    pub sampling: Sampling,
    pub format: Format,
    pub mode: ErrataMode,
    pub data: Option<PathBuf>,
}

impl RunConfig {
    fn new(cli: &Cli, names: &[String]) -> Self {
        let mut names: Vec<String> = if names.is_empty() {
            corpus::TABLES.iter().map(|s| s.to_string()).collect()
        } else {
            names.to_vec()
        };
        names.sort();
        names.dedup();
        RunConfig {
            names,
            sampling: Sampling::default(),
            format: cli.format,
            mode: cli.errata.into(),
            data: cli.data.clone(),
        }
    }

    fn load(&self, name: &str) -> Result<Algebra> {
        corpus::load_from(self.data.as_deref(), name, self.mode)
    }

    /// Loads every selected algebra; the first error wins.
    fn load_all(&self) -> Result<Vec<Algebra>> {
        self.names.par_iter().map(|n| self.load(n)).collect()
    }
}

/// What a run produced.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(text: String, passed: bool) -> Self {
        Outcome {
            code: if passed { 0 } else { 1 },
            stdout: text,
            stderr: String::new(),
        }
    }

    fn input_error(e: &Error) -> Self {
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

/// Parses `args` (including the program name) and runs.
pub fn run_from<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                Outcome::ok(text, true)
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            }
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let result = match &cli.command {
        Command::Verify { names, .. } => cmd_verify(&RunConfig::new(cli, names)),
        Command::Invariants { name, t, alpha } => {
            let mut cfg = RunConfig::new(cli, std::slice::from_ref(name));
            let defaults = Sampling::default();
            let t = if t.is_empty() { defaults.t().to_vec() } else { t.clone() };
            let alpha = if alpha.is_empty() { defaults.alpha().to_vec() } else { alpha.clone() };
            Sampling::new(t, alpha).and_then(|s| {
                cfg.sampling = s;
                cmd_invariants(&cfg)
            })
        }
        Command::Counterexample => cmd_counterexample(&RunConfig::new(cli, &[])),
        Command::Report { names } => cmd_report(&RunConfig::new(cli, names)),
        Command::SolveErrata {
            name,
            t_min,
            t_max,
            alpha_degree,
        } => cmd_solve_errata(&RunConfig::new(cli, std::slice::from_ref(name)), (*t_min, *t_max), *alpha_degree),
    };
    match result {
        Ok((text, passed)) => Outcome::ok(text, passed),
        Err(e) => Outcome::input_error(&e),
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn verdict(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "fail"
    }
}

fn mode_name(m: ErrataMode) -> &'static str {
    match m {
        ErrataMode::Verbatim => "verbatim",
        ErrataMode::Corrected => "corrected",
    }
}

fn machine(out: &mut String, algebra: &str, stage: &str, ok: bool, detail: &str) {
    let _ = writeln!(out, "algebra={algebra} stage={stage} verdict={} detail={detail}", verdict(ok));
}

pub fn render_verification(r: &VerificationReport, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Text => {
            let _ = writeln!(
                out,
                "{} {} ({})",
                if r.passed() { "PASS" } else { "FAIL" },
                r.algebra,
                mode_name(r.mode)
            );
            for s in &r.stages {
                let _ = writeln!(out, "  {:<14}{}  {}", s.stage.name(), verdict(s.passed), s.detail);
                for f in &s.failures {
                    let _ = writeln!(out, "    {f}");
                }
            }
        }
        Format::Machine => {
            for s in &r.stages {
                machine(&mut out, &r.algebra, s.stage.name(), s.passed, &s.detail);
                for f in &s.failures {
                    machine(&mut out, &r.algebra, s.stage.name(), false, &f.to_string());
                }
            }
            machine(
                &mut out,
                &r.algebra,
                "overall",
                r.passed(),
                &format!("errata={}", mode_name(r.mode)),
            );
        }
    }
    out
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<(String, bool)> {
    let algebras = cfg.load_all()?;
    let reports = algebras.par_iter().map(verify_table).collect::<Result<Vec<_>>>()?;
    let text: String = reports.iter().map(|r| render_verification(r, cfg.format)).collect();
    Ok((text, reports.iter().all(|r| r.passed())))
}

fn alpha_suffix(alpha: &Option<Rational>, sep: &str) -> String {
    alpha
        .as_ref()
        .map(|a| format!("{sep}alpha={}", fmt_rational(a)))
        .unwrap_or_default()
}

fn base_ok(p: &BasePoint) -> bool {
    p.filiform && p.center_dim == 1 && p.der_verified && p.char_nilpotency.nilpotent
}

fn deformed_ok(p: &DeformedPoint) -> bool {
    p.solvable() && !p.nilpotent()
}

fn solvability(p: &DeformedPoint) -> String {
    format!(
        "{} {}",
        if p.solvable() { "solvable" } else { "non-solvable" },
        if p.nilpotent() { "nilpotent" } else { "non-nilpotent" }
    )
}

pub fn render_invariants(r: &InvariantReport, has_alpha: bool, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Text => {
            let samples = if has_alpha {
                r.sampling.describe()
            } else {
                let ts: Vec<String> = r.sampling.t().iter().map(fmt_rational).collect();
                format!("t in {{{}}}", ts.join(", "))
            };
            let _ = writeln!(
                out,
                "{}: invariants sampled at {samples}; ranks can drop at other values",
                r.algebra
            );
            for p in &r.base {
                let _ = writeln!(
                    out,
                    "  mu{}: filiform: {}; LCS {}; derived {}; center {}; dim Der {} ({}); characteristic nilpotency: {}",
                    alpha_suffix(&p.alpha, " at "),
                    yes(p.filiform),
                    p.lcs,
                    p.derived,
                    p.center_dim,
                    p.char_nilpotency.der_dim,
                    if p.der_verified { "basis verified" } else { "basis FAILS the identity" },
                    yes(p.char_nilpotency.nilpotent)
                );
            }
            for p in &r.deformed {
                let _ = writeln!(
                    out,
                    "  mu_t at t={}{}: LCS {}; derived {}; {}",
                    fmt_rational(&p.t),
                    alpha_suffix(&p.alpha, ", "),
                    p.lcs,
                    p.derived,
                    solvability(p)
                );
            }
            let v = r.violations();
            if v.is_empty() {
                let _ = writeln!(out, "  all expected invariants hold");
            }
            for line in v {
                let _ = writeln!(out, "  VIOLATION {line}");
            }
        }
        Format::Machine => {
            for p in &r.base {
                let detail = format!(
                    "{}filiform={} lcs={} derived={} center={} der={} der_verified={} char_nilpotent={} chain={:?}",
                    alpha_suffix(&p.alpha, "").replace('=', ":") + if p.alpha.is_some() { " " } else { "" },
                    yes(p.filiform),
                    p.lcs,
                    p.derived,
                    p.center_dim,
                    p.char_nilpotency.der_dim,
                    yes(p.der_verified),
                    yes(p.char_nilpotency.nilpotent),
                    p.char_nilpotency.chain
                );
                machine(&mut out, &r.algebra, "invariants-mu", base_ok(p), &detail);
            }
            for p in &r.deformed {
                let detail = format!(
                    "t:{}{} lcs={} derived={} solvable={} nilpotent={}",
                    fmt_rational(&p.t),
                    alpha_suffix(&p.alpha, " ").replace("alpha=", "alpha:"),
                    p.lcs,
                    p.derived,
                    yes(p.solvable()),
                    yes(p.nilpotent())
                );
                machine(&mut out, &r.algebra, "invariants-mu_t", deformed_ok(p), &detail);
            }
        }
    }
    out
}

pub fn cmd_invariants(cfg: &RunConfig) -> Result<(String, bool)> {
    let algebras = cfg.load_all()?;
    let reports = algebras
        .par_iter()
        .map(|a| Ok((invariant_report(a, &cfg.sampling)?, a.has_alpha())))
        .collect::<Result<Vec<_>>>()?;
    let text: String = reports
        .iter()
        .map(|(r, has_alpha)| render_invariants(r, *has_alpha, cfg.format))
        .collect();
    Ok((text, reports.iter().all(|(r, _)| r.passed())))
}

/// Algebra carrying the weight-zero counterexample.
pub const COUNTEREXAMPLE_ALGEBRA: &str = "mu17";

/// Final line of the counterexample report.
pub const COUNTEREXAMPLE_SUMMARY: &str =
    "degeneration certificate: none shipped; non-existence: asserted, unverified";

fn profile_line(mu: &StructureConstants, t: &Rational) -> Result<String> {
    let r = mu.specialize(t, &int(0))?;
    Ok(format!(
        "LCS {}; derived {}; dim Der {}",
        lower_central_series(&r),
        derived_series(&r),
        derivation_algebra(&r).len()
    ))
}

pub fn cmd_counterexample(cfg: &RunConfig) -> Result<(String, bool)> {
    let alg = cfg.load(COUNTEREXAMPLE_ALGEBRA)?;
    let spec = counterexample_spec(&alg)?;
    let v = check_deformation(&spec)?;
    let (shipped, _) = deformation_of(&alg)?;
    let d_y1y2_zero = v
        .phi
        .basis_bracket(spec.outside(), spec.ideal().indices()[0])
        .iter()
        .all(|x| x.is_zero());
    let diag: Vec<String> = (0..spec.ideal().len())
        .map(|i| spec.derivation()[(i, i)].to_string())
        .collect();
    let rows: Vec<(String, String, String)> = cfg
        .sampling
        .t()
        .par_iter()
        .map(|t| Ok((fmt_rational(t), profile_line(&shipped, t)?, profile_line(&v.mu_t, t)?)))
        .collect::<Result<Vec<_>>>()?;
    let summary = format!("deformation valid: {}; {COUNTEREXAMPLE_SUMMARY}", yes(v.valid()));
    let name = &alg.name;
    let checks = [
        ("cocycle", v.cocycle),
        ("bracket", v.bracket),
        ("deform-jacobi", v.jacobi),
        ("limit", v.limit),
    ];
    let mut out = String::new();
    match cfg.format {
        Format::Text => {
            let _ = writeln!(
                out,
                "counterexample on {name}: D = diag({}) on {}",
                diag.join(","),
                spec.ideal()
            );
            for (stage, ok) in checks {
                let _ = writeln!(out, "  {stage:<14}{}", verdict(ok));
            }
            let _ = writeln!(
                out,
                "  mu_D(Y{}, Y{}) = 0: {}",
                spec.outside() + 1,
                spec.ideal().indices()[0] + 1,
                yes(d_y1y2_zero)
            );
            for (t, a, b) in &rows {
                let _ = writeln!(out, "  t={t}: shipped mu_t: {a}");
                let _ = writeln!(out, "  t={t}: weight-zero mu_t: {b}");
            }
            let _ = writeln!(out, "{summary}");
        }
        Format::Machine => {
            let who = format!("{name}-weight-zero");
            for (stage, ok) in checks {
                machine(&mut out, &who, stage, ok, "");
            }
            machine(&mut out, &who, "weight-zero-direction", d_y1y2_zero, "");
            for (t, a, b) in &rows {
                machine(&mut out, &who, "compare", true, &format!("t:{t} shipped: {a} | weight-zero: {b}"));
            }
            machine(&mut out, &who, "overall", v.valid(), &summary);
        }
    }
    Ok((out, v.valid() && d_y1y2_zero))
}

pub fn cmd_report(cfg: &RunConfig) -> Result<(String, bool)> {
    let (a, pa) = cmd_verify(cfg)?;
    let (b, pb) = cmd_invariants(cfg)?;
    let (c, pc) = cmd_counterexample(cfg)?;
    let sep = if cfg.format == Format::Text { "\n" } else { "" };
    Ok((format!("{a}{sep}{b}{sep}{c}"), pa && pb && pc))
}

/// A single-entry correction that makes every residual vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct EntryFix {
    /// 1-based.
    pub row: usize,
    pub col: usize,
    pub poly: Option<String>,
    pub printed: Scalar,
    pub solved: Scalar,
}

/// Outcome of the residual search under one certificate parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterTrial {
    pub parameter: Scalar,
    pub failing_cells: Vec<(usize, usize, usize)>,
    pub fixes: Vec<EntryFix>,
}

impl ParameterTrial {
    pub fn repaired(&self) -> bool {
        self.failing_cells.is_empty() || !self.fixes.is_empty()
    }
}

/// Tries the shipped parameter, then `t` and `t^-1`, stopping at the first
/// with no failing cell; for each with failing cells, solves every
/// certificate entry in turn.
pub fn search_errata(alg: &Algebra, t_range: (i64, i64), alpha_degree: u32) -> Result<Vec<ParameterTrial>> {
    let cert = alg
        .certificate
        .as_ref()
        .ok_or_else(|| Error::InvalidSpec(format!("{} has no [certificate] block", alg.name)))?;
    let (mu_t, _) = deformation_of(alg)?;
    let mu1 = mu_t.eval_t(&int(1))?;
    let mut params = vec![cert.parameter.clone()];
    for p in [Scalar::t(), Scalar::t_pow(-1)] {
        if !params.contains(&p) {
            params.push(p);
        }
    }
    let n = alg.dim;
    let g = &cert.g;
    let mut trials = Vec::new();
    for parameter in params {
        let trial = {
            let family = certified_family(&mu_t, &parameter)?;
            let cells: BTreeSet<(usize, usize, usize)> = identity_residuals(&mu1, &family, g)?
                .iter()
                .map(|c| (c.i + 1, c.j + 1, c.k + 1))
                .collect();
            let fixes = if cells.is_empty() {
                Vec::new()
            } else {
                let entries: Vec<(usize, usize)> = (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).collect();
                entries
                    .par_iter()
                    .map(|&(r, c)| {
                        Ok(match solve_entry(&mu1, &family, g, (r, c), t_range, alpha_degree)? {
                            EntrySolution::Unique(v) if v != g[(r, c)] => Some(EntryFix {
                                row: r + 1,
                                col: c + 1,
                                poly: cert
                                    .polys
                                    .iter()
                                    .find(|(_, p)| *p == g[(r, c)] && !p.is_zero())
                                    .map(|(name, _)| name.clone()),
                                printed: g[(r, c)].clone(),
                                solved: v,
                            }),
                            _ => None,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .flatten()
                    .collect()
            };
            ParameterTrial {
                parameter,
                failing_cells: cells.into_iter().collect(),
                fixes,
            }
        };
        let done = trial.failing_cells.is_empty();
        trials.push(trial);
        if done {
            break;
        }
    }
    Ok(trials)
}

pub fn cmd_solve_errata(cfg: &RunConfig, t_range: (i64, i64), alpha_degree: u32) -> Result<(String, bool)> {
    if t_range.0 > t_range.1 {
        return Err(Error::InvalidSpec(format!("empty t range {}..{}", t_range.0, t_range.1)));
    }
    let name = &cfg.names[0];
    let alg = cfg.load(name)?;
    let trials = search_errata(&alg, t_range, alpha_degree)?;
    let mut out = String::new();
    for tr in &trials {
        let cells: Vec<String> = tr
            .failing_cells
            .iter()
            .map(|(i, j, k)| format!("({i},{j},{k})"))
            .collect();
        match cfg.format {
            Format::Text => {
                let _ = writeln!(
                    out,
                    "{name} parameter {}: {} failing cells{}{}",
                    tr.parameter,
                    cells.len(),
                    if cells.is_empty() { "" } else { " " },
                    cells.join(" ")
                );
                for f in &tr.fixes {
                    let _ = writeln!(
                        out,
                        "  g.{}.{}{}: {} -> {}",
                        f.row,
                        f.col,
                        f.poly.as_ref().map(|p| format!(" ({p})")).unwrap_or_default(),
                        f.printed,
                        f.solved
                    );
                }
                if !cells.is_empty() && tr.fixes.is_empty() {
                    let _ = writeln!(out, "  no single-entry correction");
                }
            }
            Format::Machine => {
                let stage = format!("solve:{}", tr.parameter);
                machine(&mut out, name, &stage, tr.failing_cells.is_empty(), &cells.join(" "));
                for f in &tr.fixes {
                    machine(
                        &mut out,
                        name,
                        &stage,
                        true,
                        &format!("g.{}.{} {} -> {}", f.row, f.col, f.printed, f.solved),
                    );
                }
            }
        }
    }
    Ok((out, trials.iter().any(|t| t.repaired())))
}
