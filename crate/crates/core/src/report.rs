//! Run orchestration and the JSON / LaTeX reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::ValueEnum;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::boundary::{boundary_density, Theorem};
use crate::clifford::{psi_instantiate, CliffordElement, PsiSpec};
use crate::error::{Error, Result};
use crate::interior::assemble_interior;
use crate::oracle::{end_to_end, interior_oracle, OracleReport, CASE_BINDINGS};
use crate::reference::{boundary_ledger, interior_ledger, symbol_ledger, LedgerEntry};
use crate::scalar::{parse_rational, GaussRat, Scalar};

/// Seed used when neither `--seed` nor `RESIDUE_FORGE_SEED` is given.
pub const DEFAULT_SEED: u64 = 20_240_917;
/// Environment variable that overrides `--seed`.
pub const SEED_ENV: &str = "RESIDUE_FORGE_SEED";
/// Random bindings in the interior oracle sweep.
pub const INTERIOR_SAMPLES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum, Serialize, Deserialize)]
pub enum TheoremChoice {
    #[value(name = "1")]
    #[serde(rename = "1")]
    One,
    #[value(name = "2")]
    #[serde(rename = "2")]
    Two,
    #[value(name = "interior")]
    #[serde(rename = "interior")]
    Interior,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PsiChoice {
    Generic,
    F,
    Vector,
    Bivector,
    Trivector,
}

impl PsiChoice {
    pub fn spec(self) -> PsiSpec {
        match self {
            PsiChoice::Generic => PsiSpec::Generic,
            PsiChoice::F => PsiSpec::Scalar,
            PsiChoice::Vector => PsiSpec::OneField,
            PsiChoice::Bivector => PsiSpec::TwoField,
            PsiChoice::Trivector => PsiSpec::ThreeField,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Density and discrepancy ledger.
    Symbolic,
    /// Density and oracle table.
    Verify,
    /// Density, ledger and oracle table.
    Both,
}

impl Mode {
    fn ledger(self) -> bool {
        self != Mode::Verify
    }

    fn oracle(self) -> bool {
        self != Mode::Symbolic
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum)]
pub enum Format {
    Json,
    Latex,
    Both,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub theorem: TheoremChoice,
    pub psi: PsiChoice,
    pub mode: Mode,
    pub seed: u64,
    pub format: Format,
    /// Output stem; `.json` / `.tex` are appended. `None` writes to stdout.
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            theorem: TheoremChoice::One,
            psi: PsiChoice::Generic,
            mode: Mode::Both,
            seed: DEFAULT_SEED,
            format: Format::Json,
            out: None,
        }
    }
}

/// `RESIDUE_FORGE_SEED` if set, else `flag`, else [`DEFAULT_SEED`].
pub fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Error::Usage(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(flag.unwrap_or(DEFAULT_SEED)),
    }
}

/// One polynomial term with exact rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityTerm {
    pub monomial: BTreeMap<String, u32>,
    pub re: String,
    pub im: String,
}

/// Canonical term list of `s`.
pub fn density_terms(s: &Scalar) -> Vec<DensityTerm> {
    s.sorted_terms()
        .into_iter()
        .map(|(key, c)| DensityTerm { monomial: key.into_iter().collect(), re: c.re.to_string(), im: c.im.to_string() })
        .collect()
}

/// Inverse of [`density_terms`].
pub fn parse_density(terms: &[DensityTerm]) -> Result<Scalar> {
    let parsed = terms
        .iter()
        .map(|t| {
            let c = GaussRat::new(parse_rational(&t.re)?, parse_rational(&t.im)?);
            Ok((t.monomial.iter().map(|(k, &e)| (k.clone(), e)).collect(), c))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Scalar::from_named_terms(parsed))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub label: String,
    pub r: i32,
    pub l: i32,
    pub j: u32,
    pub k: u32,
    pub alpha: u32,
    pub prefactor: String,
    pub density: Vec<DensityTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteriorReport {
    /// Multiplies `EG(X,Y)`.
    pub eg_coefficient: Vec<DensityTerm>,
    /// `(υ₃/2)·F(X,Y)`.
    pub f_term: Vec<DensityTerm>,
    /// `trace(E)`.
    pub trace_e: Vec<DensityTerm>,
    /// `½·trace(E)`, multiplies `g(X,Y)`.
    pub trace_e_term: Vec<DensityTerm>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub symbolic_ms: u64,
    pub oracle_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub theorem: TheoremChoice,
    pub psi: PsiChoice,
    pub mode: Mode,
    pub seed: u64,
    pub density: Vec<DensityTerm>,
    pub cases: Vec<CaseReport>,
    pub interior: Option<InteriorReport>,
    /// `trace[c(dx_n)c(Ψ)]`; the symbol `T4` for generic `Ψ`.
    pub tn: Vec<DensityTerm>,
    pub ledger: Vec<LedgerEntry>,
    pub oracle: Vec<OracleReport>,
    pub timing: Timing,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.oracle.iter().all(|r| r.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Report> {
        Ok(serde_json::from_str(s)?)
    }

    /// The density as a polynomial.
    pub fn density_scalar(&self) -> Result<Scalar> {
        parse_density(&self.density)
    }

    /// Deterministic LaTeX fragment; timing is omitted.
    pub fn to_latex(&self) -> Result<String> {
        let mut out = String::new();
        let theorem = match self.theorem {
            TheoremChoice::One => "1",
            TheoremChoice::Two => "2",
            TheoremChoice::Interior => "interior",
        };
        let _ = writeln!(
            out,
            "% residue-forge: theorem {theorem}, psi {:?}, mode {:?}, seed {}",
            self.psi, self.mode, self.seed
        );
        out.push_str("\\begin{align*}\n");
        let _ = write!(out, "  \\text{{density}} &= {}", latex_scalar(&self.density_scalar()?));
        for c in &self.cases {
            let _ = write!(out, " \\\\\n  \\text{{case {}}} &= {}", c.label, latex_scalar(&parse_density(&c.density)?));
        }
        if let Some(i) = &self.interior {
            for (name, terms) in
                [("EG coefficient", &i.eg_coefficient), ("F term", &i.f_term), ("trace(E)", &i.trace_e)]
            {
                let _ = write!(out, " \\\\\n  \\text{{{name}}} &= {}", latex_scalar(&parse_density(terms)?));
            }
        }
        let _ =
            write!(out, " \\\\\n  \\mathrm{{trace}}[c(dx_n)c(\\Psi)] &= {}", latex_scalar(&parse_density(&self.tn)?));
        out.push_str("\n\\end{align*}\n");
        if !self.ledger.is_empty() {
            out.push_str("\\begin{tabular}{ll}\n\\hline\nentry & status \\\\\n\\hline\n");
            for e in &self.ledger {
                let _ = writeln!(out, "\\texttt{{{}}} & {} \\\\", escape_tt(&e.id), e.status);
            }
            out.push_str("\\hline\n\\end{tabular}\n");
        }
        if !self.oracle.is_empty() {
            out.push_str("\\begin{tabular}{lrrl}\n\\hline\nquantity & error & tolerance & pass \\\\\n\\hline\n");
            for r in &self.oracle {
                let _ = writeln!(
                    out,
                    "{} & {:.3e} & {:.0e} & {} \\\\",
                    escape_tt(&r.id),
                    r.error,
                    r.tolerance,
                    if r.pass { "yes" } else { "no" }
                );
            }
            out.push_str("\\hline\n\\end{tabular}\n");
        }
        Ok(out)
    }
}

fn escape_tt(s: &str) -> String {
    s.replace('\\', "\\textbackslash{}").replace('_', "\\_").replace('{', "\\{").replace('}', "\\}").replace('#', "\\#")
}

fn split_index(name: &str) -> Option<(&str, &str)> {
    let pos = name.find(|c: char| c.is_ascii_digit())?;
    let (head, tail) = name.split_at(pos);
    (!head.is_empty() && tail.chars().all(|c| c.is_ascii_digit())).then_some((head, tail))
}

/// LaTeX form of one indeterminate name.
pub fn latex_symbol(name: &str) -> String {
    match name {
        "pi" => return "\\pi".into(),
        "Omega3" => return "\\Omega_3".into(),
        "upsilon3" => return "\\upsilon_3".into(),
        "h1" => return "h'(0)".into(),
        "EG" => return "EG(X,Y)".into(),
        "T0" => return "\\mathrm{trace}[c(\\Psi)]".into(),
        _ => {}
    }
    // dY{l}dx{j}
    if let Some(rest) = name.strip_prefix("dY") {
        if let Some((l, j)) = rest.split_once("dx") {
            return format!("\\partial_{{x_{j}}}Y_{{{l}}}");
        }
    }
    if let Some((head, idx)) = split_index(name) {
        if head == "T" {
            let e: String = idx.chars().map(|c| format!("e_{c}")).collect::<Vec<_>>().join("");
            return format!("\\mathrm{{trace}}[c({e})c(\\Psi)]");
        }
        if let Some(field) = head.strip_prefix("DX").or_else(|| head.strip_prefix("DY")) {
            let along = &head[1..2];
            return format!("(\\nabla_{along}{field})_{{{idx}}}");
        }
        return format!("{head}_{{{idx}}}");
    }
    if let Some(field) = name.strip_prefix("DX").or_else(|| name.strip_prefix("DY")) {
        let along = &name[1..2];
        return format!("\\nabla_{along}{field}");
    }
    name.to_string()
}

fn latex_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        let sign = if r.is_negative() { "-" } else { "" };
        format!("{sign}\\frac{{{}}}{{{}}}", r.numer().abs(), r.denom())
    }
}

fn latex_coefficient(c: &GaussRat) -> String {
    match (c.re.is_zero(), c.im.is_zero()) {
        (_, true) => latex_rational(&c.re),
        (true, false) => format!("{}i", latex_rational(&c.im)),
        (false, false) => {
            let im = latex_rational(&c.im);
            let sep = if im.starts_with('-') { "" } else { "+" };
            format!("\\left({}{sep}{im}i\\right)", latex_rational(&c.re))
        }
    }
}

/// LaTeX form of a polynomial, terms in canonical order.
pub fn latex_scalar(s: &Scalar) -> String {
    if s.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (key, c)) in s.sorted_terms().into_iter().enumerate() {
        let mut coef = latex_coefficient(&c);
        let factors: Vec<String> = key
            .iter()
            .map(|(n, e)| if *e == 1 { latex_symbol(n) } else { format!("\\left({}\\right)^{{{e}}}", latex_symbol(n)) })
            .collect();
        if !factors.is_empty() {
            match coef.as_str() {
                "1" => coef.clear(),
                "-1" => coef = "-".into(),
                _ => {}
            }
        }
        if k > 0 {
            if let Some(rest) = coef.strip_prefix('-') {
                out.push_str(" - ");
                coef = rest.to_string();
            } else {
                out.push_str(" + ");
            }
        }
        out.push_str(&coef);
        if !coef.is_empty() && coef != "-" && !factors.is_empty() {
            out.push_str("\\,");
        }
        out.push_str(&factors.join("\\,"));
    }
    out
}

fn tn_value(psi: PsiSpec) -> Result<Scalar> {
    if !psi.is_concrete() {
        return Ok(Scalar::var("T4"));
    }
    let c = psi_instantiate(psi, 4)?;
    Ok((&CliffordElement::basis(4, 4) * &c).spinor_trace())
}

/// Output of [`run`].
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: Report,
    pub json: Option<String>,
    pub latex: Option<String>,
    pub all_pass: bool,
}

impl RunOutput {
    /// Writes `<stem>.json` / `<stem>.tex`, or returns the text for stdout when `out` is `None`.
    pub fn emit(&self, out: Option<&Path>) -> Result<Option<String>> {
        match out {
            Some(stem) => {
                if let Some(j) = &self.json {
                    std::fs::write(stem.with_extension("json"), j)?;
                }
                if let Some(t) = &self.latex {
                    std::fs::write(stem.with_extension("tex"), t)?;
                }
                Ok(None)
            }
            None => Ok(Some(
                [self.json.as_deref(), self.latex.as_deref()].into_iter().flatten().collect::<Vec<_>>().join("\n"),
            )),
        }
    }
}

/// Runs the selected pipeline.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    let psi = config.psi.spec();
    let seed = config.seed;
    let started = Instant::now();
    let mut cases = Vec::new();
    let mut interior = None;
    let mut ledger = Vec::new();
    let density = match config.theorem {
        TheoremChoice::One | TheoremChoice::Two => {
            let theorem = if config.theorem == TheoremChoice::One { Theorem::One } else { Theorem::Two };
            let d = boundary_density(theorem, psi)?;
            cases = d
                .cases
                .iter()
                .map(|c| CaseReport {
                    label: c.spec.label.clone(),
                    r: c.spec.r,
                    l: c.spec.l,
                    j: c.spec.j,
                    k: c.spec.k,
                    alpha: c.spec.alpha_len(),
                    prefactor: c.spec.prefactor.to_string(),
                    density: density_terms(&c.density),
                })
                .collect();
            if config.mode.ledger() {
                ledger = boundary_ledger(&d)?;
                ledger.extend(symbol_ledger()?);
            }
            d.total
        }
        TheoremChoice::Interior => {
            if !psi.is_concrete() {
                return Err(Error::Usage(
                    "--theorem interior needs a concrete --psi (f, vector, bivector, trivector)".into(),
                ));
            }
            let d = assemble_interior(psi, 4)?;
            interior = Some(InteriorReport {
                eg_coefficient: density_terms(&d.eg_coefficient),
                f_term: density_terms(&d.f_trace_term),
                trace_e: density_terms(&d.trace_e_term.scale(&GaussRat::from_ints(2, 0))),
                trace_e_term: density_terms(&d.trace_e_term),
            });
            if config.mode.ledger() {
                ledger = interior_ledger(&d, psi)?;
            }
            d.total()
        }
    };
    let tn = density_terms(&tn_value(psi)?);
    let symbolic_ms = started.elapsed().as_millis() as u64;
    let started = Instant::now();
    let oracle = if config.mode.oracle() {
        match config.theorem {
            TheoremChoice::One => end_to_end(Theorem::One, psi, seed, CASE_BINDINGS)?,
            TheoremChoice::Two => end_to_end(Theorem::Two, psi, seed, CASE_BINDINGS)?,
            TheoremChoice::Interior => interior_oracle(psi, seed, INTERIOR_SAMPLES)?,
        }
    } else {
        Vec::new()
    };
    let oracle_ms = started.elapsed().as_millis() as u64;
    let report = Report {
        theorem: config.theorem,
        psi: config.psi,
        mode: config.mode,
        seed,
        density: density_terms(&density),
        cases,
        interior,
        tn,
        ledger,
        oracle,
        timing: Timing { symbolic_ms, oracle_ms },
    };
    let json = matches!(config.format, Format::Json | Format::Both).then(|| report.to_json()).transpose()?;
    let latex = matches!(config.format, Format::Latex | Format::Both).then(|| report.to_latex()).transpose()?;
    let all_pass = report.all_pass();
    Ok(RunOutput { report, json, latex, all_pass })
}
