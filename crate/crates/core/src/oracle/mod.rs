//! Independent floating-point checks of the symbolic pipeline.

pub mod gamma;
pub mod numeric;
pub mod quad;

use std::collections::HashMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boundary::{evaluate_case, theorem_cases, theorem_expansions, Theorem};
use crate::clifford::{psi_instantiate, CliffordElement, PsiSpec};
use crate::error::Result;
use crate::interior::{covariant_derivative, f_trace, trace_e};
use crate::scalar::{names, Scalar, Sym};
use crate::symbols::SymbolContext;
use gamma::{blade_matrix, to_matrix, M4};
use numeric::{case_integral, NumericModel};
use quad::{sphere_rule, tangent_rule, PiPlusRule};

/// Below this reference magnitude the comparison is absolute.
pub const ABSOLUTE_FLOOR: f64 = 1e-9;
/// Tolerance of the end-to-end case comparison.
pub const CASE_TOLERANCE: f64 = 1e-6;
/// Random bindings per case in the end-to-end comparison.
pub const CASE_BINDINGS: usize = 20;

/// One oracle comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub id: String,
    /// Symbolic value at the worst sample, `[re, im]`.
    pub symbolic: [f64; 2],
    /// Numeric value at the worst sample, `[re, im]`.
    pub numeric: [f64; 2],
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: u64,
    pub samples: usize,
}

/// Error relative to the exact symbolic value, or absolute error when that value is below [`ABSOLUTE_FLOOR`].
pub fn relative_error(symbolic: Complex64, numeric: Complex64) -> f64 {
    let diff = (symbolic - numeric).norm();
    if symbolic.norm() < ABSOLUTE_FLOOR {
        diff
    } else {
        diff / symbolic.norm()
    }
}

/// Accumulates the worst sample of a sweep into one report.
#[derive(Clone, Debug)]
pub struct Sweep {
    id: String,
    tolerance: f64,
    seed: u64,
    worst: Option<(f64, Complex64, Complex64)>,
    samples: usize,
}

impl Sweep {
    pub fn new(id: impl Into<String>, tolerance: f64, seed: u64) -> Self {
        Sweep { id: id.into(), tolerance, seed, worst: None, samples: 0 }
    }

    pub fn push(&mut self, symbolic: Complex64, numeric: Complex64) {
        let e = relative_error(symbolic, numeric);
        self.samples += 1;
        if self.worst.is_none_or(|(w, _, _)| e > w || e.is_nan()) {
            self.worst = Some((e, symbolic, numeric));
        }
    }

    pub fn finish(self) -> OracleReport {
        let (error, s, n) = self.worst.unwrap_or((0.0, Complex64::default(), Complex64::default()));
        OracleReport {
            id: self.id,
            symbolic: [s.re, s.im],
            numeric: [n.re, n.im],
            error,
            tolerance: self.tolerance,
            pass: error <= self.tolerance,
            seed: self.seed,
            samples: self.samples,
        }
    }
}

/// Quadrature sizes of the end-to-end comparison.
#[derive(Clone, Copy, Debug)]
pub struct CaseQuadrature {
    pub sphere_theta: usize,
    pub sphere_phi: usize,
    pub line_nodes: usize,
    pub contour_nodes: usize,
    pub contour_radius: f64,
}

impl Default for CaseQuadrature {
    fn default() -> Self {
        CaseQuadrature { sphere_theta: 8, sphere_phi: 16, line_nodes: 64, contour_nodes: 64, contour_radius: 0.5 }
    }
}

/// Compares every case density of `theorem` with numeric quadrature of the raw integrand.
pub fn end_to_end(theorem: Theorem, psi: PsiSpec, seed: u64, bindings: usize) -> Result<Vec<OracleReport>> {
    end_to_end_with(theorem, psi, seed, bindings, CaseQuadrature::default())
}

pub fn end_to_end_with(
    theorem: Theorem,
    psi: PsiSpec,
    seed: u64,
    bindings: usize,
    q: CaseQuadrature,
) -> Result<Vec<OracleReport>> {
    let ctx = SymbolContext::new(psi)?;
    let (num, den) = theorem_expansions(&ctx, theorem)?;
    let cases = theorem_cases(theorem);
    let symbolic: Vec<Scalar> =
        cases.iter().map(|c| evaluate_case(c, &num, &den).map(|r| r.density)).collect::<Result<_>>()?;
    let sphere = sphere_rule(q.sphere_theta, q.sphere_phi);
    let line = tangent_rule(q.line_nodes);
    let contour = PiPlusRule::new(q.contour_radius, q.contour_nodes);
    let mut sweeps: Vec<Sweep> = cases
        .iter()
        .map(|c| {
            Sweep::new(
                format!("theorem {} case {} ({:?})", theorem_number(theorem), c.label, psi),
                CASE_TOLERANCE,
                seed,
            )
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..bindings {
        let (model, b) = NumericModel::random(psi, &mut rng);
        for ((c, sym), sweep) in cases.iter().zip(&symbolic).zip(sweeps.iter_mut()) {
            let numeric = case_integral(&model, theorem, c, &sphere, &line, &contour)? * c.prefactor.to_complex();
            sweep.push(sym.eval(&b)?, numeric);
        }
    }
    Ok(sweeps.into_iter().map(Sweep::finish).collect())
}

pub fn theorem_number(t: Theorem) -> u8 {
    match t {
        Theorem::One => 1,
        Theorem::Two => 2,
    }
}

/// Evaluates `s` under `b`.
pub fn eval(s: &Scalar, b: &HashMap<Sym, Complex64>) -> Result<Complex64> {
    s.eval(b)
}

/// Tolerance of the interior trace comparisons.
pub const INTERIOR_TOLERANCE: f64 = 1e-10;

fn random_bindings<R: rand::Rng>(
    elements: &[&CliffordElement],
    extra: &[Scalar],
    rng: &mut R,
) -> HashMap<Sym, Complex64> {
    let mut b = HashMap::new();
    let syms = elements.iter().flat_map(|e| e.terms().flat_map(|(_, c)| c.symbols()).collect::<Vec<_>>());
    for s in syms.chain(extra.iter().flat_map(|e| e.symbols())) {
        b.entry(s).or_insert_with(|| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
    }
    b
}

/// `trace(E)` and `F(X,Y)` against matrix traces of the same Clifford expressions.
pub fn interior_oracle(psi: PsiSpec, seed: u64, samples: usize) -> Result<Vec<OracleReport>> {
    let n = 4;
    let c = psi_instantiate(psi, n)?;
    let (cx, cy) = (CliffordElement::vector_symbolic(n, "X"), CliffordElement::vector_symbolic(n, "Y"));
    let (dx, dy) = (covariant_derivative(psi, n, "X")?, covariant_derivative(psi, n, "Y")?);
    let trace_e_sym = trace_e(psi, n)?;
    let f_sym = f_trace(psi, n)?;
    let scal = Scalar::var(names::SCAL);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut te = Sweep::new(format!("interior trace(E) ({psi:?})"), INTERIOR_TOLERANCE, seed);
    let mut ft = Sweep::new(format!("interior F(X,Y) ({psi:?})"), INTERIOR_TOLERANCE, seed);
    for _ in 0..samples {
        let b = random_bindings(&[&c, &cx, &cy, &dx, &dy], std::slice::from_ref(&scal), &mut rng);
        let m = to_matrix(&c, &b)?;
        let mut e = M4::identity() * (scal.eval(&b)? / 4.0) + m * m * Complex64::new(1.0 - n as f64 / 2.0, 0.0);
        for j in 1..=n {
            let g = blade_matrix(1 << (j - 1));
            e += m * g * m * g * Complex64::new(0.5, 0.0);
        }
        te.push(trace_e_sym.eval(&b)?, e.trace());
        let (mx, my, mdx, mdy) = (to_matrix(&cx, &b)?, to_matrix(&cy, &b)?, to_matrix(&dx, &b)?, to_matrix(&dy, &b)?);
        let f = ((mx * mdy + mdy * mx).trace() - (my * mdx + mdx * my).trace()) * Complex64::new(0.5, 0.0);
        ft.push(f_sym.eval(&b)?, f);
    }
    Ok(vec![te.finish(), ft.finish()])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_traces_agree() {
        for psi in [PsiSpec::Scalar, PsiSpec::OneField, PsiSpec::TwoField, PsiSpec::ThreeField] {
            for r in interior_oracle(psi, 3, 10).unwrap() {
                assert!(r.pass, "{r:?}");
            }
        }
    }

    #[test]
    fn first_theorem_single_binding() {
        for r in end_to_end(Theorem::One, PsiSpec::Generic, 11, 1).unwrap() {
            assert!(r.pass, "{r:?}");
        }
    }
}
