//! Boundary-sum cases `Φ = Σ ∫∫ trace[∂ⁱ π⁺σ_r × ∂ʲ σ_ℓ]` at `x₀` for `n = 4`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use std::collections::HashMap;

use crate::clifford::{psi_instantiate, trace_pairing_name, CliffordElement, PsiSpec};
use crate::error::{Error, Result};
use crate::scalar::{GaussRat, Scalar, Sym};
use crate::sphere::integrate_sphere;
use crate::symbols::{OperatorTag, SymbolContext, SymbolExpansion, SymbolTerm};
use crate::xin_rational::BoundaryRational;

/// Which boundary functional is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    /// `π⁺(∇∇D_Ψ⁻²) ∘ π⁺(D_Ψ⁻²)`.
    One,
    /// `π⁺(∇∇D_Ψ⁻¹) ∘ π⁺(D_Ψ⁻³)`.
    Two,
}

impl Theorem {
    /// Numerator and denominator operators.
    pub fn operators(self) -> (OperatorTag, OperatorTag) {
        match self {
            Theorem::One => (OperatorTag::NablaNablaDInv2, OperatorTag::DInv2),
            Theorem::Two => (OperatorTag::NablaNablaDInv, OperatorTag::DInv3),
        }
    }

    /// Leading orders `(p₁, p₂)` of the two operators.
    pub fn leading_orders(self) -> (i32, i32) {
        match self {
            Theorem::One => (0, -2),
            Theorem::Two => (1, -3),
        }
    }

    fn labels(self) -> [&'static str; 5] {
        match self {
            Theorem::One => ["(a)(I)", "(a)(II)", "(a)(III)", "(b)", "(c)"],
            Theorem::Two => ["(1)", "(2)", "(3)", "(4)", "(5)"],
        }
    }
}

/// One admissible tuple of the boundary sum. `alpha` is a tangential multi-index
/// (for `|α| = 1` the case stands for the sum over the `n − 1` directions).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseSpec {
    pub label: String,
    pub r: i32,
    pub l: i32,
    pub j: u32,
    pub k: u32,
    pub alpha: Vec<u32>,
    pub prefactor: GaussRat,
}

impl CaseSpec {
    pub fn alpha_len(&self) -> u32 {
        self.alpha.iter().sum()
    }
}

impl fmt::Display for CaseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} r={} l={} j={} k={} |alpha|={}", self.label, self.r, self.l, self.j, self.k, self.alpha_len())
    }
}

fn factorial(k: u32) -> i64 {
    (1..=k as i64).product()
}

/// `(−i)^{|α|+j+k+1} / (α!(j+k+1)!)`.
pub fn prefactor(alpha: &[u32], j: u32, k: u32) -> GaussRat {
    let a: u32 = alpha.iter().sum();
    let alpha_fact: i64 = alpha.iter().map(|&e| factorial(e)).product();
    let phase = GaussRat::from_ints(0, -1).pow(a + j + k + 1);
    &phase * &GaussRat::frac(1, alpha_fact * factorial(j + k + 1))
}

/// `(r, ℓ, j, k, |α|)`.
pub type CaseIndices = (i32, i32, u32, u32, u32);

/// All tuples with `r + ℓ − k − j − |α| = 1 − n`, `r ≤ p₁`, `ℓ ≤ p₂`, grouped so that
/// the `n − 1` tangential directions of one `|α|` form a single case.
pub fn enumerate_cases(n: usize, p1: i32, p2: i32) -> Result<Vec<CaseIndices>> {
    if n != 4 {
        return Err(Error::UnsupportedDimension(n));
    }
    let target = 1 - n as i32;
    let slack = (p1 + p2 - target).max(-1);
    let mut out = Vec::new();
    for d in 0..=slack {
        for a in 0..=d as u32 {
            for j in 0..=(d as u32 - a) {
                let k = d as u32 - a - j;
                for r in (p1 - slack)..=p1 {
                    let l = target + d - r;
                    if l <= p2 {
                        out.push((r, l, j, k, a));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Case specs for one theorem with labels and prefactors.
pub fn theorem_cases(theorem: Theorem) -> Vec<CaseSpec> {
    let (p1, p2) = theorem.leading_orders();
    let mut ordered = enumerate_cases(4, p1, p2).expect("n = 4");
    // |α|, j, k cases first, then (p₁, p₂ − 1), then (p₁ − 1, p₂).
    ordered.sort_by_key(|&(r, l, j, k, a)| {
        let d = j + k + a;
        (
            std::cmp::Reverse(d),
            std::cmp::Reverse(a),
            std::cmp::Reverse(j),
            std::cmp::Reverse(k),
            std::cmp::Reverse(r),
            l,
        )
    });
    ordered
        .into_iter()
        .zip(theorem.labels())
        .map(|((r, l, j, k, a), label)| {
            let alpha = if a == 0 { vec![0, 0, 0] } else { vec![a, 0, 0] };
            CaseSpec { label: label.to_string(), r, l, j, k, prefactor: prefactor(&alpha, j, k), alpha }
        })
        .collect()
}

fn jet_or_value(t: &SymbolTerm, take_jet: bool, op: &str) -> Result<BoundaryRational> {
    if take_jet {
        t.restrict_jet().ok_or_else(|| Error::InsufficientDepth { op: format!("x_n-jet of {op}"), order: t.order })
    } else {
        Ok(t.restrict_boundary())
    }
}

/// Evaluated case: the density before and after the prefactor.
#[derive(Clone, Debug)]
pub struct CaseResult {
    pub spec: CaseSpec,
    /// `∫∫ trace[…]` including the `Ω₃` symbol.
    pub integral: Scalar,
    /// `prefactor · integral`.
    pub density: Scalar,
}

/// Restricted integrand factors `(∂_ξn^k π⁺ ∂_xn^j σ_r, ∂_ξn^{j+1} ∂_xn^k σ_ℓ)`.
pub fn case_factors(
    c: &CaseSpec,
    numerator: &SymbolExpansion,
    denominator: &SymbolExpansion,
) -> Result<(BoundaryRational, BoundaryRational)> {
    let left = jet_or_value(numerator.term(c.r)?, c.j == 1, &numerator.tag)?.pi_plus().derivative_n(c.k);
    let right = jet_or_value(denominator.term(c.l)?, c.k == 1, &denominator.tag)?.derivative_n(c.j + 1);
    Ok((left, right))
}

/// Evaluates one case. Tangential `x'`-derivatives of symbols vanish at `x₀`, so `|α| > 0` gives 0.
pub fn evaluate_case(c: &CaseSpec, numerator: &SymbolExpansion, denominator: &SymbolExpansion) -> Result<CaseResult> {
    if c.j > 1 || c.k > 1 {
        return Err(Error::InsufficientDepth { op: format!("second jet in case {}", c.label), order: c.r });
    }
    let n = numerator.dim();
    let integral = if c.alpha_len() > 0 {
        // ∂_{x'}^α σ_ℓ(x₀) = 0 in boundary normal coordinates.
        numerator.term(c.r)?;
        denominator.term(c.l)?;
        Scalar::zero()
    } else {
        let (left, right) = case_factors(c, numerator, denominator)?;
        let line = left.mul(&right).line_integral()?;
        integrate_sphere(&line.spinor_trace(), n)?.value(n)
    };
    let density = integral.scale(&c.prefactor);
    Ok(CaseResult { spec: c.clone(), integral, density })
}

/// All case results and their sum.
#[derive(Clone, Debug)]
pub struct BoundaryDensity {
    pub theorem: Theorem,
    pub psi: PsiSpec,
    pub cases: Vec<CaseResult>,
    pub total: Scalar,
}

/// Numerator and denominator expansions from the composition engine.
pub fn theorem_expansions(ctx: &SymbolContext, theorem: Theorem) -> Result<(SymbolExpansion, SymbolExpansion)> {
    let (a, b) = theorem.operators();
    Ok((ctx.derived(a)?, ctx.derived(b)?))
}

pub fn boundary_density(theorem: Theorem, psi: PsiSpec) -> Result<BoundaryDensity> {
    let ctx = SymbolContext::new(psi)?;
    let (num, den) = theorem_expansions(&ctx, theorem)?;
    let cases: Vec<CaseResult> =
        theorem_cases(theorem).par_iter().map(|c| evaluate_case(c, &num, &den)).collect::<Result<_>>()?;
    let total = cases.iter().fold(Scalar::zero(), |acc, c| acc + &c.density);
    Ok(BoundaryDensity { theorem, psi, cases, total })
}

/// Replaces each trace pairing `T_B` by `trace[c(e_B)c(Ψ)]` for a concrete `psi`.
pub fn specialize_traces(s: &Scalar, psi: PsiSpec, n: usize) -> Result<Scalar> {
    if !psi.is_concrete() {
        return Ok(s.clone());
    }
    let c = psi_instantiate(psi, n)?;
    let map: HashMap<Sym, Scalar> = (0..(1u32 << n))
        .map(|mask| (Sym::new(&trace_pairing_name(mask)), (&CliffordElement::blade(n, mask) * &c).spinor_trace()))
        .collect();
    Ok(s.subs(&map))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem_one_cases() {
        let got: Vec<_> = theorem_cases(Theorem::One).iter().map(|c| (c.r, c.l, c.j, c.k, c.alpha_len())).collect();
        assert_eq!(
            got,
            vec![(0, -2, 0, 0, 1), (0, -2, 1, 0, 0), (0, -2, 0, 1, 0), (0, -3, 0, 0, 0), (-1, -2, 0, 0, 0)]
        );
    }

    #[test]
    fn theorem_two_cases() {
        let got: Vec<_> = theorem_cases(Theorem::Two).iter().map(|c| (c.r, c.l, c.j, c.k, c.alpha_len())).collect();
        assert_eq!(got, vec![(1, -3, 0, 0, 1), (1, -3, 1, 0, 0), (1, -3, 0, 1, 0), (1, -4, 0, 0, 0), (0, -3, 0, 0, 0)]);
    }

    #[test]
    fn degree_constraint_holds() {
        for t in [Theorem::One, Theorem::Two] {
            for c in theorem_cases(t) {
                assert_eq!(c.r + c.l - c.k as i32 - c.j as i32 - c.alpha_len() as i32, -3);
            }
        }
    }

    #[test]
    fn prefactors() {
        let cases = theorem_cases(Theorem::One);
        assert_eq!(cases[1].prefactor, GaussRat::frac(-1, 2));
        assert_eq!(cases[3].prefactor, GaussRat::from_ints(0, -1));
        assert_eq!(cases[0].prefactor, GaussRat::from_ints(-1, 0));
    }
}
