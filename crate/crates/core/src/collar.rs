//! First-order jets at the boundary point `x₀` for the collar metric
//! `g = g^∂ / h(x_n) + dx_n²`, with `h(0) = 1`, `h'(0) = h1`, and boundary
//! normal coordinates (`∂_s g^∂_{ij}(x₀) = 0`).
//!
//! Every quantity is a pair (value at `x₀`, `∂_{x_n}` at `x₀`); tangential
//! derivatives vanish at `x₀`.

use crate::clifford::CliffordElement;
use crate::error::{Error, Result};
use crate::scalar::{names, GaussRat, Scalar};

/// Value and normal derivative at `x₀`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Jet {
    pub value: Scalar,
    pub dn: Scalar,
}

impl Jet {
    pub fn constant(value: Scalar) -> Self {
        Jet { value, dn: Scalar::zero() }
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        Jet { value: &self.value * &o.value, dn: &(&self.dn * &o.value) + &(&self.value * &o.dn) }
    }

    /// `1/self`; the value must be the constant one (all collar quantities are normalized at `x₀`).
    pub fn recip(&self) -> Jet {
        assert_eq!(self.value, Scalar::one(), "reciprocal jet needs unit value");
        Jet { value: Scalar::one(), dn: -&self.dn }
    }

    /// `sqrt(self)` for unit value.
    pub fn sqrt(&self) -> Jet {
        assert_eq!(self.value, Scalar::one(), "square-root jet needs unit value");
        Jet { value: Scalar::one(), dn: self.dn.scale(&GaussRat::frac(1, 2)) }
    }
}

/// Jet data consumed by the symbol calculus. Indices are 0-based (`k` stands for `x_{k+1}`).
#[derive(Clone, Debug)]
pub struct JetStore {
    pub n: usize,
    /// `∂_{x_n} g_{ij}(x₀)`.
    pub metric_dn: Vec<Vec<Scalar>>,
    /// `∂_{x_n} g^{ij}(x₀)`.
    pub inverse_metric_dn: Vec<Vec<Scalar>>,
    /// `Γ^k_{ij}(x₀)`, indexed `[k][i][j]`.
    pub christoffel: Vec<Vec<Vec<Scalar>>>,
    /// `Γ^k = g^{ij} Γ^k_{ij}` at `x₀`.
    pub gamma: Vec<Scalar>,
    /// `∂_{x_n} F_s^j(x₀)` for the frame `ẽ_s = F_s^j ∂_j`, indexed `[s][j]`.
    pub frame_dn: Vec<Vec<Scalar>>,
    /// `ω_{s,t}(ẽ_i)(x₀)` with `∇ ẽ_t = Σ_s ẽ_s ω_{s,t}`, indexed `[i][s][t]`.
    pub omega: Vec<Vec<Vec<Scalar>>>,
    /// Spin connection `L(ẽ_i) = -¼ Σ_{s,t} ω_{s,t}(ẽ_i) c(ẽ_s)c(ẽ_t)`.
    pub spin_connection: Vec<CliffordElement>,
    /// `σ₀(D)(x₀) = Σ_i c(ẽ_i) L(ẽ_i)`.
    pub sigma0_d: CliffordElement,
    /// `δ^k = g^{kj} L(∂_j)` at `x₀`: the connection contraction in the first-order symbol of `D²`.
    pub delta: Vec<CliffordElement>,
    /// `∂_{x_j}|ξ|²(x₀)`.
    pub d_xj_norm_sq: Vec<Scalar>,
    /// `∂_{x_n} c(dx_j)(x₀)`.
    pub d_xn_c_dx: Vec<CliffordElement>,
    /// `∂_{x_n} c(ξ')(x₀)`.
    pub d_xn_c_xi_prime: CliffordElement,
}

pub fn h1() -> Scalar {
    Scalar::var(names::H1)
}

pub fn xi(j: usize) -> Scalar {
    Scalar::var(&names::xi(j))
}

/// `c(ξ) = Σ_j ξ_j c(e_j)` at `x₀`.
pub fn c_xi(n: usize) -> CliffordElement {
    CliffordElement::vector(n, &(1..=n).map(xi).collect::<Vec<_>>())
}

/// `c(ξ') = Σ_{j<n} ξ_j c(e_j)`.
pub fn c_xi_prime(n: usize) -> CliffordElement {
    let mut comps: Vec<Scalar> = (1..n).map(xi).collect();
    comps.push(Scalar::zero());
    CliffordElement::vector(n, &comps)
}

/// `|ξ|² = Σ_j ξ_j²` at `x₀`.
pub fn norm_sq(n: usize) -> Scalar {
    (1..=n).fold(Scalar::zero(), |a, j| a + xi(j).pow(2))
}

pub fn build_jets(n: usize) -> Result<JetStore> {
    if n != 4 {
        return Err(Error::UnsupportedDimension(n));
    }
    let zero = || Scalar::zero();
    let h = Jet { value: Scalar::one(), dn: h1() };
    let inv_h = h.recip();
    let sqrt_h = h.sqrt();
    let nn = n - 1;

    // g_ij = δ_ij / h for tangential, g_nn = 1.
    let metric: Vec<Vec<Jet>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match (i == j, i < nn) {
                    (true, true) => inv_h.clone(),
                    (true, false) => Jet::constant(Scalar::one()),
                    _ => Jet::constant(zero()),
                })
                .collect()
        })
        .collect();
    let metric_dn: Vec<Vec<Scalar>> = metric.iter().map(|r| r.iter().map(|j| j.dn.clone()).collect()).collect();
    // ∂(g⁻¹) = -g⁻¹ (∂g) g⁻¹ with g(x₀) = I.
    let inverse_metric_dn: Vec<Vec<Scalar>> = metric_dn.iter().map(|r| r.iter().map(|v| -v).collect()).collect();

    let d = |k: usize, i: usize, j: usize| -> Scalar {
        // ∂_k g_ij at x₀: only k = n survives.
        if k == nn {
            metric_dn[i][j].clone()
        } else {
            zero()
        }
    };
    let christoffel: Vec<Vec<Vec<Scalar>>> = (0..n)
        .map(|k| {
            (0..n)
                .map(|i| {
                    (0..n).map(|j| (&(&d(i, j, k) + &d(j, i, k)) - &d(k, i, j)).scale(&GaussRat::frac(1, 2))).collect()
                })
                .collect()
        })
        .collect();
    let gamma: Vec<Scalar> = (0..n).map(|k| (0..n).fold(zero(), |acc, i| &acc + &christoffel[k][i][i])).collect();

    // ẽ_s = √h ∂_s (s < n), ẽ_n = ∂_n.
    let frame_dn: Vec<Vec<Scalar>> =
        (0..n).map(|s| (0..n).map(|j| if s == j && s < nn { sqrt_h.dn.clone() } else { zero() }).collect()).collect();

    // ω_{s,t}(ẽ_i) = ⟨∇_{ẽ_i} ẽ_t, ẽ_s⟩ = ẽ_i(F_t^s) + Γ^s_{it} at x₀.
    let omega: Vec<Vec<Vec<Scalar>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|s| {
                    (0..n)
                        .map(|t| {
                            let frame_term = if i == nn { frame_dn[t][s].clone() } else { zero() };
                            &frame_term + &christoffel[s][i][t]
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let e = |k: usize| CliffordElement::basis(n, k + 1);
    let spin_connection: Vec<CliffordElement> = (0..n)
        .map(|i| {
            let mut acc = CliffordElement::zero(n);
            for s in 0..n {
                for t in 0..n {
                    if !omega[i][s][t].is_zero() {
                        acc = &acc + &(&e(s) * &e(t)).scale(&omega[i][s][t]);
                    }
                }
            }
            acc.scale_rat(&GaussRat::frac(-1, 4))
        })
        .collect();
    let sigma0_d = (0..n).fold(CliffordElement::zero(n), |acc, i| &acc + &(&e(i) * &spin_connection[i]));
    // At x₀, ∂_j = ẽ_j and g^{kj} = δ.
    let delta = spin_connection.clone();

    // |ξ|² = g^{ij} ξ_i ξ_j.
    let d_xj_norm_sq: Vec<Scalar> = (0..n)
        .map(|k| {
            if k != nn {
                return zero();
            }
            let mut acc = zero();
            for i in 0..n {
                for j in 0..n {
                    acc += &(&inverse_metric_dn[i][j] * &(&xi(i + 1) * &xi(j + 1)));
                }
            }
            acc
        })
        .collect();

    // dx_j = Σ_s F_s^j ẽ^s, so ∂_n c(dx_j) = Σ_s ∂_n F_s^j c(ẽ_s).
    let d_xn_c_dx: Vec<CliffordElement> =
        (0..n).map(|j| (0..n).fold(CliffordElement::zero(n), |acc, s| &acc + &e(s).scale(&frame_dn[s][j]))).collect();
    let d_xn_c_xi_prime = (0..nn).fold(CliffordElement::zero(n), |acc, j| &acc + &d_xn_c_dx[j].scale(&xi(j + 1)));

    Ok(JetStore {
        n,
        metric_dn,
        inverse_metric_dn,
        christoffel,
        gamma,
        frame_dn,
        omega,
        spin_connection,
        sigma0_d,
        delta,
        d_xj_norm_sq,
        d_xn_c_dx,
        d_xn_c_xi_prime,
    })
}

impl JetStore {
    /// `Γ^k(x₀)` for `k = 1..n` (1-based keys).
    pub fn christoffel_contractions(&self) -> Vec<(usize, Scalar)> {
        self.gamma.iter().enumerate().map(|(k, g)| (k + 1, g.clone())).collect()
    }

    /// `∂_{x_n} c(ξ)(x₀)`; the `ξ_n c(dx_n)` part is constant.
    pub fn d_xn_c_xi(&self) -> CliffordElement {
        let mut acc = self.d_xn_c_xi_prime.clone();
        acc = &acc + &self.d_xn_c_dx[self.n - 1].scale(&xi(self.n));
        acc
    }

    /// `∂_{x_n}|ξ|²(x₀)`.
    pub fn d_xn_norm_sq(&self) -> Scalar {
        self.d_xj_norm_sq[self.n - 1].clone()
    }

    /// `L(X) = Σ_j X_j L(ẽ_j)` at `x₀` for component symbols `X_j = comps[j]`.
    pub fn spin_connection_on(&self, comps: &[Scalar]) -> CliffordElement {
        comps.iter().zip(&self.spin_connection).fold(CliffordElement::zero(self.n), |acc, (c, l)| &acc + &l.scale(c))
    }
}
