//! Interior density of `Wres(∇_X∇_Y Δ_Ψ^{-n/2})` with `Δ_Ψ = D_Ψ² = Δ + E`:
//!
//! `(υ_{n-1}/6)·2^{n/2}·EG(X,Y) + (υ_{n-1}/2)·F(X,Y) + ½·trace(E)·g(X,Y)`.
//!
//! `EG`, `s` and covariant derivatives of the perturbation fields are opaque
//! symbols. Covariant derivatives are named `DY<field><j>` (components of
//! `∇_Y<field>`), `DX<field><j>`, and `DYf`, `DXf` for the scalar case.

use crate::clifford::{psi_instantiate, CliffordElement, PsiSpec, FIELD_NAMES};
use crate::error::{Error, Result};
use crate::scalar::{names, GaussRat, Scalar};

/// `υ_{n-1} = 2π^{n/2}/Γ(n/2)` for even `n`, as a rational multiple of `π^{n/2}`.
pub fn sphere_volume(n: usize) -> Result<Scalar> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::UnsupportedDimension(n));
    }
    let half = n / 2;
    let gamma: i64 = (1..half as i64).product();
    Ok(Scalar::var(names::PI).pow(half as u32).scale(&GaussRat::frac(2, gamma)))
}

fn check_concrete(psi: PsiSpec, what: &'static str) -> Result<()> {
    if psi.is_concrete() {
        Ok(())
    } else {
        Err(Error::GenericPsi(what))
    }
}

/// `trace[s/4 + Σ_j ½c(Ψ)c(e_j)c(Ψ)c(e_j) + (1 − n/2)c(Ψ)²]`.
pub fn trace_e(psi: PsiSpec, n: usize) -> Result<Scalar> {
    check_concrete(psi, "trace(E)")?;
    sphere_volume(n)?;
    let c = psi_instantiate(psi, n)?;
    let mut e = CliffordElement::scalar(n, Scalar::var(names::SCAL).scale(&GaussRat::frac(1, 4)));
    for j in 1..=n {
        let ej = CliffordElement::basis(n, j);
        e = &e + &(&(&(&c * &ej) * &c) * &ej).scale_rat(&GaussRat::frac(1, 2));
    }
    e = &e + &(&c * &c).scale_rat(&GaussRat::frac(2 - n as i64, 2));
    Ok(e.spinor_trace())
}

/// `∇_V c(Ψ)` for `V ∈ {X, Y}`: Leibniz over the field factors.
pub fn covariant_derivative(psi: PsiSpec, n: usize, along: &str) -> Result<CliffordElement> {
    check_concrete(psi, "covariant derivative")?;
    Ok(match psi {
        PsiSpec::Zero => CliffordElement::zero(n),
        PsiSpec::Scalar => CliffordElement::scalar(n, Scalar::var(&format!("D{along}f"))),
        _ => {
            let k = psi.field_count().unwrap_or(0);
            let mut out = CliffordElement::zero(n);
            for d in 0..k {
                let mut term = CliffordElement::identity(n);
                for (i, name) in FIELD_NAMES.iter().take(k).enumerate() {
                    let factor = if i == d { format!("D{along}{name}") } else { name.to_string() };
                    term = &term * &CliffordElement::vector_symbolic(n, &factor);
                }
                out = &out + &term;
            }
            out
        }
    })
}

fn anticommutator_trace(a: &CliffordElement, b: &CliffordElement) -> Scalar {
    (&(a * b) + &(b * a)).spinor_trace()
}

/// `F(X,Y) = ½trace[c(X)∇_Y c(Ψ) + ∇_Y c(Ψ) c(X)] − ½trace[c(Y)∇_X c(Ψ) + ∇_X c(Ψ) c(Y)]`.
pub fn f_trace(psi: PsiSpec, n: usize) -> Result<Scalar> {
    f_trace_with(psi, n, "X", "Y")
}

/// [`f_trace`] with the roles of the two vector fields given by name.
pub fn f_trace_with(psi: PsiSpec, n: usize, x: &str, y: &str) -> Result<Scalar> {
    check_concrete(psi, "F(X,Y)")?;
    let cx = CliffordElement::vector_symbolic(n, x);
    let cy = CliffordElement::vector_symbolic(n, y);
    let dy = covariant_derivative(psi, n, y)?;
    let dx = covariant_derivative(psi, n, x)?;
    let half = GaussRat::frac(1, 2);
    Ok((anticommutator_trace(&cx, &dy) - anticommutator_trace(&cy, &dx)).scale(&half))
}

/// Interior density split by structure.
#[derive(Clone, Debug, PartialEq)]
pub struct InteriorDensity {
    pub n: usize,
    /// Multiplies the opaque `EG(X,Y)`.
    pub eg_coefficient: Scalar,
    /// `(υ_{n-1}/2)·F(X,Y)`.
    pub f_trace_term: Scalar,
    /// `½·trace(E)`, multiplies `g(X,Y)`.
    pub trace_e_term: Scalar,
}

impl InteriorDensity {
    /// `eg_coefficient·EG + f_trace_term + trace_e_term·g(X,Y)` as one polynomial.
    pub fn total(&self) -> Scalar {
        let g = crate::clifford::metric_pair(self.n, "X", "Y");
        &(&self.eg_coefficient * &Scalar::var(names::EG)) + &self.f_trace_term + &self.trace_e_term * &g
    }
}

/// Interior part shared by both boundary functionals and the closed-manifold functional.
pub fn assemble_interior(psi: PsiSpec, n: usize) -> Result<InteriorDensity> {
    let upsilon = sphere_volume(n)?;
    let eg_coefficient = upsilon.scale(&GaussRat::frac(1i64 << (n / 2), 6));
    let f_trace_term = &upsilon.scale(&GaussRat::frac(1, 2)) * &f_trace(psi, n)?;
    let trace_e_term = trace_e(psi, n)?.scale(&GaussRat::frac(1, 2));
    Ok(InteriorDensity { n, eg_coefficient, f_trace_term, trace_e_term })
}
