//! Floating-point model of the collar geometry and of every operator symbol,
//! built from matrices, finite differences and numeric inversion only.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;

use super::gamma::{blade_matrix, gammas, vector_matrix, M4};
use super::quad::fd;
use crate::boundary::{CaseSpec, Theorem};
use crate::clifford::{trace_pairing_name, PsiSpec, FIELD_NAMES};
use crate::error::{Error, Result};
use crate::scalar::{names, Sym};

type C = Complex64;
type Xi = [C; 4];

/// Step of the finite differences in `x_n` and `ξ_n`.
pub const FD_STEP: f64 = 3.0e-4;

fn re(x: f64) -> C {
    C::new(x, 0.0)
}

const I: C = C::new(0.0, 1.0);

/// Random point data: metric jet, vector fields, and the perturbation matrix.
#[derive(Clone, Debug)]
pub struct NumericModel {
    pub h1: f64,
    pub x: [C; 4],
    pub y: [C; 4],
    /// `dy[l][j] = ∂_j Y_l`.
    pub dy: [[C; 4]; 4],
    pub psi: M4,
    spin: [M4; 4],
    sigma0_d: M4,
}

fn rational<R: Rng>(rng: &mut R) -> f64 {
    let num: i64 = rng.gen_range(-12..=12);
    let den: i64 = rng.gen_range(1..=6);
    num as f64 / den as f64
}

impl NumericModel {
    /// Draws a model and the symbol bindings that describe it.
    pub fn random<R: Rng>(psi: PsiSpec, rng: &mut R) -> (NumericModel, HashMap<Sym, C>) {
        let mut b = HashMap::new();
        let bind = |name: &str, v: C, b: &mut HashMap<Sym, C>| {
            b.insert(Sym::new(name), v);
            v
        };
        bind(names::PI, re(std::f64::consts::PI), &mut b);
        bind(names::OMEGA3, re(4.0 * std::f64::consts::PI), &mut b);
        bind(names::UPSILON3, re(2.0 * std::f64::consts::PI.powi(2)), &mut b);
        let h1 = {
            let v = rational(rng);
            if v == 0.0 {
                0.5
            } else {
                v
            }
        };
        bind(names::H1, re(h1), &mut b);
        let mut x = [C::default(); 4];
        let mut y = [C::default(); 4];
        let mut dy = [[C::default(); 4]; 4];
        for j in 0..4 {
            x[j] = bind(&names::x(j + 1), re(rational(rng)), &mut b);
            y[j] = bind(&names::y(j + 1), re(rational(rng)), &mut b);
        }
        for l in 0..4 {
            for j in 0..4 {
                dy[l][j] = bind(&names::dy(l + 1, j + 1), re(rational(rng)), &mut b);
            }
        }
        let psi_m = match psi {
            PsiSpec::Zero => M4::zeros(),
            PsiSpec::Generic => {
                let mut m = M4::zeros();
                for e in m.iter_mut() {
                    *e = C::new(rational(rng), rational(rng));
                }
                for mask in 0..16u32 {
                    bind(&trace_pairing_name(mask), (blade_matrix(mask) * m).trace(), &mut b);
                }
                m
            }
            PsiSpec::Scalar => M4::identity() * bind("f", re(rational(rng)), &mut b),
            _ => {
                let k = psi.field_count().unwrap_or(0);
                let mut m = M4::identity();
                for name in FIELD_NAMES.iter().take(k) {
                    let comps: Vec<C> =
                        (1..=4).map(|j| bind(&format!("{name}{j}"), re(rational(rng)), &mut b)).collect();
                    m *= vector_matrix(&comps);
                }
                m
            }
        };
        let (spin, sigma0_d) = spin_data(h1);
        (NumericModel { h1, x, y, dy, psi: psi_m, spin, sigma0_d }, b)
    }

    fn h(&self, xn: C) -> C {
        re(1.0) + xn * self.h1
    }

    /// `c(ξ)(x_n) = Σ_j ξ_j Σ_s F_s^j(x_n) γ_s` with `F = diag(√h, √h, √h, 1)`.
    pub fn c_xi(&self, xn: C, xi: &Xi) -> M4 {
        let s = self.h(xn).sqrt();
        let g = gammas();
        g[0] * (xi[0] * s) + g[1] * (xi[1] * s) + g[2] * (xi[2] * s) + g[3] * xi[3]
    }

    fn with_xin(xi: &Xi, t: C) -> Xi {
        [xi[0], xi[1], xi[2], t]
    }

    fn d_xi_n(f: impl Fn(C) -> M4, xi: &Xi) -> M4 {
        fd(f, xi[3], FD_STEP, 1)
    }

    fn d_x(f: impl Fn(C) -> M4) -> M4 {
        fd(f, re(0.0), FD_STEP, 1)
    }

    fn p1(&self, xn: C, xi: &Xi) -> M4 {
        self.c_xi(xn, xi) * I
    }

    fn p0(&self) -> M4 {
        self.sigma0_d + self.psi
    }

    fn q1(&self, xn: C, xi: &Xi) -> M4 {
        self.p1(xn, xi).try_inverse().expect("σ₁(D) is invertible off ξ = 0")
    }

    fn q2(&self, xi: &Xi) -> M4 {
        let q = self.q1(re(0.0), xi);
        let dp1 = Self::d_xi_n(|t| self.p1(re(0.0), &Self::with_xin(xi, t)), xi);
        let dq = Self::d_x(|x| self.q1(x, xi)) * (-I);
        -(q * (self.p0() * q + dp1 * dq))
    }

    fn a2(&self, xn: C, xi: &Xi) -> M4 {
        let q = self.q1(xn, xi);
        q * q
    }

    fn a3(&self, xi: &Xi) -> M4 {
        let (q, r) = (self.q1(re(0.0), xi), self.q2(xi));
        let dq = Self::d_xi_n(|t| self.q1(re(0.0), &Self::with_xin(xi, t)), xi);
        let dxq = Self::d_x(|x| self.q1(x, xi)) * (-I);
        q * r + r * q + dq * dxq
    }

    fn b3(&self, xn: C, xi: &Xi) -> M4 {
        self.a2(xn, xi) * self.q1(xn, xi)
    }

    fn b4(&self, xi: &Xi) -> M4 {
        let z = re(0.0);
        let da2 = Self::d_xi_n(|t| self.a2(z, &Self::with_xin(xi, t)), xi);
        let dxq = Self::d_x(|x| self.q1(x, xi)) * (-I);
        self.a2(z, xi) * self.q2(xi) + self.a3(xi) * self.q1(z, xi) + da2 * dxq
    }

    fn dot(v: &[C; 4], xi: &Xi) -> C {
        v.iter().zip(xi).map(|(a, b)| a * b).sum()
    }

    fn s2(&self, xi: &Xi) -> M4 {
        M4::identity() * (-(Self::dot(&self.x, xi) * Self::dot(&self.y, xi)))
    }

    fn connection(&self, v: &[C; 4]) -> M4 {
        let cv = vector_matrix(v);
        let l = v.iter().zip(&self.spin).fold(M4::zeros(), |acc, (c, s)| acc + s * *c);
        l - (cv * self.psi + self.psi * cv) * re(0.5)
    }

    fn s1(&self, xi: &Xi) -> M4 {
        let mut xdy = C::default();
        for l in 0..4 {
            for j in 0..4 {
                xdy += self.x[j] * self.dy[l][j] * xi[l];
            }
        }
        let m = M4::identity() * xdy
            + self.connection(&self.y) * Self::dot(&self.x, xi)
            + self.connection(&self.x) * Self::dot(&self.y, xi);
        m * I
    }

    fn ds2(&self, xi: &Xi) -> M4 {
        Self::d_xi_n(|t| self.s2(&Self::with_xin(xi, t)), xi)
    }

    fn nn_inv2_lead(&self, xn: C, xi: &Xi) -> M4 {
        self.s2(xi) * self.a2(xn, xi)
    }

    fn nn_inv2_sub(&self, xi: &Xi) -> M4 {
        let z = re(0.0);
        let dxa2 = Self::d_x(|x| self.a2(x, xi)) * (-I);
        self.s2(xi) * self.a3(xi) + self.s1(xi) * self.a2(z, xi) + self.ds2(xi) * dxa2
    }

    fn nn_inv_lead(&self, xn: C, xi: &Xi) -> M4 {
        self.s2(xi) * self.q1(xn, xi)
    }

    fn nn_inv_sub(&self, xi: &Xi) -> M4 {
        let z = re(0.0);
        let dxq = Self::d_x(|x| self.q1(x, xi)) * (-I);
        self.s2(xi) * self.q2(xi) + self.s1(xi) * self.q1(z, xi) + self.ds2(xi) * dxq
    }

    /// `σ_order` (or its `x_n`-jet) of the numerator or denominator of `theorem`.
    pub fn symbol(&self, theorem: Theorem, numerator: bool, order: i32, jet: bool, xi: &Xi) -> Result<M4> {
        let z = re(0.0);
        let lead = |f: &dyn Fn(C, &Xi) -> M4| if jet { Self::d_x(|x| f(x, xi)) } else { f(z, xi) };
        let missing = || Error::InsufficientDepth { op: "numeric symbol".into(), order };
        Ok(match (theorem, numerator, order) {
            (Theorem::One, true, 0) => lead(&|x, k| self.nn_inv2_lead(x, k)),
            (Theorem::One, true, -1) if !jet => self.nn_inv2_sub(xi),
            (Theorem::One, false, -2) => lead(&|x, k| self.a2(x, k)),
            (Theorem::One, false, -3) if !jet => self.a3(xi),
            (Theorem::Two, true, 1) => lead(&|x, k| self.nn_inv_lead(x, k)),
            (Theorem::Two, true, 0) if !jet => self.nn_inv_sub(xi),
            (Theorem::Two, false, -3) => lead(&|x, k| self.b3(x, k)),
            (Theorem::Two, false, -4) if !jet => self.b4(xi),
            _ => return Err(missing()),
        })
    }
}

/// Spin connection `L(ẽ_i)` and `σ₀(D)` at `x₀` from finite differences of the
/// collar metric `diag(1/h, 1/h, 1/h, 1)` and frame `diag(√h, √h, √h, 1)`.
fn spin_data(h1: f64) -> ([M4; 4], M4) {
    let n = 4;
    let metric = |x: C, i: usize, j: usize| -> C {
        if i != j {
            re(0.0)
        } else if i < n - 1 {
            re(1.0) / (re(1.0) + x * h1)
        } else {
            re(1.0)
        }
    };
    let frame = |x: C, s: usize, j: usize| -> C {
        if s != j {
            re(0.0)
        } else if s < n - 1 {
            (re(1.0) + x * h1).sqrt()
        } else {
            re(1.0)
        }
    };
    let dn = |f: &dyn Fn(C) -> C| -> C { fd(f, re(0.0), FD_STEP, 1) };
    // ∂_m g_ij at x₀; only m = n is nonzero.
    let dg = |m: usize, i: usize, j: usize| -> C {
        if m == n - 1 {
            dn(&|x| metric(x, i, j))
        } else {
            re(0.0)
        }
    };
    let christoffel = |k: usize, i: usize, j: usize| -> C { (dg(i, j, k) + dg(j, i, k) - dg(k, i, j)) * 0.5 };
    let g = gammas();
    let mut spin = [M4::zeros(); 4];
    for (i, li) in spin.iter_mut().enumerate() {
        for s in 0..n {
            for t in 0..n {
                // ω_{s,t}(ẽ_i) = ẽ_i(F_t^s) + Γ^s_{it} at x₀.
                let along = if i == n - 1 { dn(&|x| frame(x, t, s)) } else { re(0.0) };
                let w = along + christoffel(s, i, t);
                *li += g[s] * g[t] * (w * -0.25);
            }
        }
    }
    let sigma0 = (0..n).fold(M4::zeros(), |acc, i| acc + g[i] * spin[i]);
    (spin, sigma0)
}

/// Numeric value of `∫_{|ξ'|=1}∫_ℝ trace[∂^k π⁺∂_x^j σ_r × ∂^{j+1}_{ξn}∂_x^k σ_ℓ]` (no prefactor).
pub fn case_integral(
    model: &NumericModel,
    theorem: Theorem,
    case: &CaseSpec,
    sphere: &[([f64; 3], f64)],
    line: &[(f64, f64)],
    pi_plus: &super::quad::PiPlusRule,
) -> Result<C> {
    if case.alpha_len() > 0 {
        // Tangential x-derivatives of every symbol vanish in the model.
        return Ok(C::default());
    }
    model.symbol(theorem, false, case.l, case.k == 1, &[re(0.6), re(0.0), re(0.8), re(0.3)])?;
    let mut acc = C::default();
    for (p, ws) in sphere {
        let base = |t: C| -> Xi { [re(p[0]), re(p[1]), re(p[2]), t] };
        let samples: Vec<M4> = pi_plus
            .nodes
            .iter()
            .map(|t| model.symbol(theorem, true, case.r, case.j == 1, &base(*t)))
            .collect::<Result<_>>()?;
        let mut inner = C::default();
        for &(t, wt) in line {
            let left = pi_plus.apply(&samples, t, case.k);
            let right: M4 = fd(
                |s| {
                    model
                        .symbol(theorem, false, case.l, case.k == 1, &base(s))
                        .expect("denominator order checked above")
                },
                re(t),
                FD_STEP,
                case.j + 1,
            );
            inner += (left * right).trace() * wt;
        }
        acc += inner * *ws;
    }
    Ok(acc)
}
