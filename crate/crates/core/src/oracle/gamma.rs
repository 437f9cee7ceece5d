//! Fixed 4×4 matrix model of the Clifford relations `γ_iγ_j + γ_jγ_i = −2δ_ij`.

use std::collections::HashMap;
use std::sync::OnceLock;

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::clifford::{blade_indices, CliffordElement};
use crate::error::{Error, Result};
use crate::scalar::Sym;

pub type M4 = Matrix4<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Anti-Hermitian generators `γ_j = i Γ_j` from the chiral Euclidean Dirac matrices.
pub fn gammas() -> &'static [M4; 4] {
    static G: OnceLock<[M4; 4]> = OnceLock::new();
    G.get_or_init(|| {
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        let i = c(0.0, 1.0);
        let pauli = [[[z, o], [o, z]], [[z, -i], [i, z]], [[o, z], [z, -o]]];
        let mut out = [M4::zeros(); 4];
        for (k, s) in pauli.iter().enumerate() {
            let mut m = M4::zeros();
            for a in 0..2 {
                for b in 0..2 {
                    m[(a, b + 2)] = s[a][b];
                    m[(a + 2, b)] = s[a][b];
                }
            }
            out[k] = m * i;
        }
        let mut m = M4::zeros();
        for a in 0..2 {
            m[(a, a + 2)] = -i;
            m[(a + 2, a)] = i;
        }
        out[3] = m * i;
        check_relations(&out);
        out
    })
}

fn check_relations(g: &[M4; 4]) {
    for a in 0..4 {
        for b in 0..4 {
            let anti = g[a] * g[b] + g[b] * g[a];
            let want = if a == b { M4::identity() * c(-2.0, 0.0) } else { M4::zeros() };
            assert!((anti - want).norm() < 1e-14, "matrix model violates the Clifford relations");
        }
    }
}

/// `γ_{i₁}⋯γ_{i_k}` for the blade `mask` (increasing indices).
pub fn blade_matrix(mask: u32) -> M4 {
    blade_indices(mask).into_iter().fold(M4::identity(), |acc, i| acc * gammas()[i - 1])
}

/// Image of `a` with all coefficients evaluated under `bindings`.
pub fn to_matrix(a: &CliffordElement, bindings: &HashMap<Sym, Complex64>) -> Result<M4> {
    if a.dim() != 4 {
        return Err(Error::UnsupportedDimension(a.dim()));
    }
    let mut m = M4::zeros();
    for (mask, s) in a.terms() {
        m += blade_matrix(mask) * s.eval(bindings)?;
    }
    Ok(m)
}

/// Matrix trace of the image of `a`.
pub fn gamma_trace(a: &CliffordElement, bindings: &HashMap<Sym, Complex64>) -> Result<Complex64> {
    Ok(to_matrix(a, bindings)?.trace())
}

/// `c(v) = Σ v_j γ_j`.
pub fn vector_matrix(v: &[Complex64]) -> M4 {
    v.iter().zip(gammas()).fold(M4::zeros(), |acc, (x, g)| acc + g * *x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_trace() {
        let t = gamma_trace(&CliffordElement::identity(4), &HashMap::new()).unwrap();
        assert!((t - c(4.0, 0.0)).norm() < 1e-14);
        let t = gamma_trace(&CliffordElement::blade(4, 0b11), &HashMap::new()).unwrap();
        assert!(t.norm() < 1e-12);
    }

    #[test]
    fn generators_are_anti_hermitian() {
        for g in gammas() {
            assert!((g.adjoint() + g).norm() < 1e-15);
        }
    }
}
