//! Exact moments of tangential covariable monomials over the unit sphere
//! `|ξ'| = 1` in `ℝ^{n-1}`.

use crate::clifford::CliffordElement;
use crate::error::{Error, Result};
use crate::scalar::{names, GaussRat, Monomial, Scalar, Sym};

/// `Ω`-linear result of a sphere integration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SphereMoment {
    pub coefficient: Scalar,
}

impl SphereMoment {
    /// The value `coefficient · Ω_{n-2}` as one polynomial.
    pub fn value(&self, n: usize) -> Scalar {
        &self.coefficient * &Scalar::var(&sphere_volume_name(n))
    }
}

/// Name of the volume symbol of the unit `(n-2)`-sphere; `Omega3` for `n = 4`.
pub fn sphere_volume_name(n: usize) -> String {
    if n == 4 {
        names::OMEGA3.to_string()
    } else {
        format!("Omega{}", n - 1)
    }
}

fn double_factorial_odd(k: u32) -> i64 {
    // (k-1)!! for even k
    (1..k as i64).step_by(2).product()
}

/// `∫ Π ξ_j^{a_j} σ(ξ')` divided by the sphere volume, or `None` if some `a_j` is odd.
pub fn monomial_moment(exponents: &[u32], n: usize) -> Option<GaussRat> {
    if exponents.iter().any(|e| e % 2 == 1) {
        return None;
    }
    let m = (n - 1) as i64;
    let total: u32 = exponents.iter().sum();
    let num: i64 = exponents.iter().map(|&e| double_factorial_odd(e)).product();
    let den: i64 = (0..(total / 2) as i64).map(|k| m + 2 * k).product();
    Some(GaussRat::frac(num, den))
}

/// Integrates a polynomial in `ξ_1..ξ_{n-1}` (other symbols are coefficients).
pub fn integrate_sphere(p: &Scalar, n: usize) -> Result<SphereMoment> {
    let normal = Sym::new(&names::xi(n));
    if p.contains(normal) {
        return Err(Error::NormalCovariableInSphere);
    }
    let tangential: Vec<Sym> = (1..n).map(|j| Sym::new(&names::xi(j))).collect();
    let mut out = Scalar::zero();
    for (m, c) in p.terms() {
        let mut rest = m.clone();
        let mut exps = Vec::with_capacity(n - 1);
        for &s in &tangential {
            let (e, r) = rest.split_off(s);
            exps.push(e);
            rest = r;
        }
        if let Some(w) = monomial_moment(&exps, n) {
            out.add_term(rest, &(c * &w));
        }
    }
    Ok(SphereMoment { coefficient: out })
}

/// Coefficient-wise sphere integration, returning values including the volume symbol.
pub fn integrate_sphere_clifford(e: &CliffordElement, n: usize) -> Result<CliffordElement> {
    let mut out = CliffordElement::zero(e.dim());
    for (mask, c) in e.terms() {
        out.add_blade(mask, &integrate_sphere(c, n)?.value(n));
    }
    Ok(out)
}

/// `|ξ'|² = Σ_{j<n} ξ_j²`.
pub fn tangential_norm_sq(n: usize) -> Scalar {
    (1..n).fold(Scalar::zero(), |acc, j| acc + Scalar::term(Monomial::var(Sym::new(&names::xi(j)), 2), GaussRat::one()))
}
