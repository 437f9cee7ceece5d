//! Quadrature rules: real-line integration of boundary rationals, sphere rules,
//! Monte-Carlo sphere moments, the Cauchy-contour `π⁺`, and finite differences.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::ops::{Add, Mul, Sub};

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{names, Scalar, Sym};
use crate::xin_rational::BoundaryRational;

/// Half-width of the finite window of [`quad_line`].
pub const LINE_WINDOW: f64 = 1.0e4;

fn gl(n: usize) -> Vec<(f64, f64)> {
    GaussLegendre::new(NonZeroUsize::new(n).expect("positive degree")).as_node_weight_pairs().to_vec()
}

fn gl_interval(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, rule: &[(f64, f64)]) -> Complex64 {
    let (m, h) = ((a + b) / 2.0, (b - a) / 2.0);
    rule.iter().map(|&(x, w)| f(m + h * x) * w).sum::<Complex64>() * h
}

/// Coarse and fine node-weight pairs on `[-1, 1]`.
type RulePair = (Vec<(f64, f64)>, Vec<(f64, f64)>);

fn adaptive(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, tol: f64, depth: u32, rules: &RulePair) -> Result<Complex64> {
    let coarse = gl_interval(f, a, b, &rules.0);
    let fine = gl_interval(f, a, b, &rules.1);
    if (fine - coarse).norm() <= tol.max(1e-15 * fine.norm()) {
        return Ok(fine);
    }
    if depth == 0 {
        return Err(Error::Numeric(format!("quadrature did not converge on [{a}, {b}]")));
    }
    let m = (a + b) / 2.0;
    Ok(adaptive(f, a, m, tol / 2.0, depth - 1, rules)? + adaptive(f, m, b, tol / 2.0, depth - 1, rules)?)
}

/// `∫_{|t|>L} f` from the first terms of the expansion of `f` at infinity.
fn tail(coeffs: &[Complex64], a: u32, b: u32, l: f64) -> Result<Complex64> {
    // f(t) = t^{d-a-b} · Σ_m e_m t^{-m}
    let d = coeffs.len() as i64 - 1;
    let p0 = a as i64 + b as i64 - d;
    if p0 < 2 {
        return Err(Error::Numeric(format!("integrand decays like |t|^-{p0}")));
    }
    let i = Complex64::new(0.0, 1.0);
    let terms = 4usize;
    // Numerator in u = 1/t, highest power first.
    let num: Vec<Complex64> = (0..terms)
        .map(|m| if (m as i64) <= d { coeffs[(d - m as i64) as usize] } else { Complex64::new(0.0, 0.0) })
        .collect();
    let series = |s: Complex64, e: u32| -> Vec<Complex64> {
        // (1 + s u)^{-e} = Σ binom(e+k-1, k) (-s u)^k
        let mut out = Vec::with_capacity(terms);
        let mut binom = 1.0;
        for k in 0..terms {
            if k > 0 {
                binom *= (e as f64 + k as f64 - 1.0) / k as f64;
            }
            out.push((-s).powu(k as u32) * binom);
        }
        out
    };
    let conv = |x: &[Complex64], y: &[Complex64]| -> Vec<Complex64> {
        (0..terms).map(|k| (0..=k).map(|m| x[m] * y[k - m]).sum()).collect()
    };
    let e = conv(&conv(&num, &series(-i, a)), &series(i, b));
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, em) in e.iter().enumerate() {
        let p = (p0 + m as i64) as i32;
        let right = l.powi(1 - p) / (p as f64 - 1.0);
        let left = if p % 2 == 0 { right } else { -right };
        acc += em * (right + left);
    }
    Ok(acc)
}

/// `∫_ℝ` of the grade-0 part of `f`: adaptive Gauss–Legendre on `[−L, L]` plus an
/// asymptotic tail.
pub fn quad_line(f: &BoundaryRational, bindings: &HashMap<Sym, Complex64>) -> Result<Complex64> {
    let (a, b) = f.pole_orders();
    let coeffs: Vec<Complex64> = f.numerator().iter().map(|c| c.grade0().eval(bindings)).collect::<Result<_>>()?;
    if coeffs.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let eval = |t: f64| -> Complex64 {
        let tc = Complex64::new(t, 0.0);
        let num = coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * tc + c);
        num / ((tc - Complex64::new(0.0, 1.0)).powu(a) * (tc + Complex64::new(0.0, 1.0)).powu(b))
    };
    let rules = (gl(15), gl(30));
    let cuts = [-LINE_WINDOW, -100.0, -10.0, -1.0, 0.0, 1.0, 10.0, 100.0, LINE_WINDOW];
    let mut acc = Complex64::new(0.0, 0.0);
    for w in cuts.windows(2) {
        acc += adaptive(&eval, w[0], w[1], 1e-13, 30, &rules)?;
    }
    Ok(acc + tail(&coeffs, a, b, LINE_WINDOW)?)
}

/// `∫_ℝ g(t) dt` for `g` rational with poles off the real axis and `|t|^{-2}` decay:
/// trapezoid in `θ` after `t = tan θ` (exact for trigonometric polynomials of degree `< nodes`).
pub fn tangent_rule(nodes: usize) -> Vec<(f64, f64)> {
    let h = PI / nodes as f64;
    (0..nodes)
        .map(|m| {
            let theta = -PI / 2.0 + (m as f64 + 0.5) * h;
            let c = theta.cos();
            (theta.tan(), h / (c * c))
        })
        .collect()
}

/// Product rule on the unit 2-sphere: Gauss–Legendre in `cos θ`, trapezoid in `φ`.
/// Weights sum to `4π`.
pub fn sphere_rule(n_theta: usize, n_phi: usize) -> Vec<([f64; 3], f64)> {
    let mut out = Vec::with_capacity(n_theta * n_phi);
    for (z, w) in gl(n_theta) {
        let r = (1.0 - z * z).sqrt();
        for k in 0..n_phi {
            let phi = 2.0 * PI * k as f64 / n_phi as f64;
            out.push(([r * phi.cos(), r * phi.sin(), z], w * 2.0 * PI / n_phi as f64));
        }
    }
    out
}

/// Monte-Carlo estimate of `∫_{S²} p` with its standard error.
#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Uniform sphere sampling (`z ~ U(−1,1)`, `φ ~ U(0,2π)`); `p` must be real-valued in `ξ₁..ξ₃`.
pub fn mc_sphere<R: Rng>(p: &Scalar, samples: usize, rng: &mut R) -> Result<McEstimate> {
    let syms: Vec<Sym> = (1..=3).map(|j| Sym::new(&names::xi(j))).collect();
    let mut bindings = HashMap::new();
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let z: f64 = rng.gen_range(-1.0..1.0);
        let phi: f64 = rng.gen_range(0.0..2.0 * PI);
        let r = (1.0 - z * z).sqrt();
        for (s, v) in syms.iter().zip([r * phi.cos(), r * phi.sin(), z]) {
            bindings.insert(*s, Complex64::new(v, 0.0));
        }
        let v = p.eval(&bindings)?.re * 4.0 * PI;
        sum += v;
        sum_sq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    Ok(McEstimate { value: mean, std_error: (var / n).sqrt(), samples })
}

/// Nodes and weights of `π⁺h(ξ₀) = (1/2πi)∮_{|t−i|=ρ} h(t)/(ξ₀ − t) dt` for real `ξ₀`.
#[derive(Clone, Debug)]
pub struct PiPlusRule {
    pub nodes: Vec<Complex64>,
    weights: Vec<Complex64>,
}

impl PiPlusRule {
    pub fn new(radius: f64, nodes: usize) -> Self {
        assert!(radius < 1.0, "the circle must stay off the real axis");
        let (ts, ws) = (0..nodes)
            .map(|m| {
                let e = Complex64::from_polar(1.0, 2.0 * PI * m as f64 / nodes as f64);
                (Complex64::new(0.0, 1.0) + e * radius, e * (radius / nodes as f64))
            })
            .unzip();
        PiPlusRule { nodes: ts, weights: ws }
    }

    /// `∂^k_{ξ₀} π⁺h(ξ₀)` from samples `h(nodes[m])`.
    pub fn apply<T>(&self, samples: &[T], xi0: f64, k: u32) -> T
    where
        T: Clone + Add<Output = T> + Mul<Complex64, Output = T>,
    {
        let fact: f64 = (1..=k).map(f64::from).product();
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut acc: Option<T> = None;
        for ((h, t), w) in samples.iter().zip(&self.nodes).zip(&self.weights) {
            let kern = *w * (sign * fact) / (Complex64::new(xi0, 0.0) - t).powu(k + 1);
            let term = h.clone() * kern;
            acc = Some(match acc {
                None => term,
                Some(a) => a + term,
            });
        }
        acc.expect("empty rule")
    }
}

/// Five-point central difference of order 1 or 2 at complex `z`.
pub fn fd<T, F>(f: F, z: Complex64, h: f64, order: u32) -> T
where
    T: Clone + Add<Output = T> + Sub<Output = T> + Mul<Complex64, Output = T>,
    F: Fn(Complex64) -> T,
{
    let hc = Complex64::new(h, 0.0);
    let (p2, p1, m1, m2) = (f(z + hc * 2.0), f(z + hc), f(z - hc), f(z - hc * 2.0));
    match order {
        1 => ((p1 - m1) * Complex64::new(8.0, 0.0) - (p2 - m2)) * Complex64::new(1.0 / (12.0 * h), 0.0),
        2 => {
            let c = f(z);
            ((p1 + m1) * Complex64::new(16.0, 0.0) - (p2 + m2) - c * Complex64::new(30.0, 0.0))
                * Complex64::new(1.0 / (12.0 * h * h), 0.0)
        }
        _ => panic!("finite differences implemented for orders 1 and 2"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn rational(num: &[i64], a: u32, b: u32) -> BoundaryRational {
        let coeffs: Vec<Scalar> = num.iter().map(|&k| Scalar::int(k)).collect();
        BoundaryRational::from_scalar_coeffs(4, &coeffs, a, b)
    }

    #[test]
    fn line_values() {
        let b = HashMap::new();
        assert!((quad_line(&rational(&[1], 1, 1), &b).unwrap() - c(PI)).norm() < 1e-9 * PI);
        assert!((quad_line(&rational(&[1], 2, 2), &b).unwrap() - c(PI / 2.0)).norm() < 1e-9 * PI);
    }

    #[test]
    fn tangent_rule_exact_on_rationals() {
        let v: f64 = tangent_rule(32).iter().map(|&(t, w)| w / (1.0 + t * t).powi(3)).sum();
        assert!((v - 3.0 * PI / 8.0).abs() < 1e-13);
    }

    #[test]
    fn sphere_rule_moments() {
        let rule = sphere_rule(8, 16);
        let area: f64 = rule.iter().map(|(_, w)| w).sum();
        assert!((area - 4.0 * PI).abs() < 1e-12);
        let m: f64 = rule.iter().map(|(p, w)| p[0] * p[0] * p[1] * p[1] * w).sum();
        assert!((m - 4.0 * PI / 15.0).abs() < 1e-12);
    }

    #[test]
    fn contour_projection_matches_partial_fractions() {
        let f = BoundaryRational::from_scalar_coeffs(4, &[Scalar::int(2), Scalar::int(1), Scalar::int(3)], 2, 3);
        let plus = f.pi_plus();
        let rule = PiPlusRule::new(0.5, 64);
        let empty = HashMap::new();
        let samples: Vec<Complex64> = rule.nodes.iter().map(|t| f.eval_grade0(*t, &empty).unwrap()).collect();
        for x in [-2.0, 0.0, 0.3, 5.0] {
            let got = rule.apply(&samples, x, 0);
            let want = plus.eval_grade0(c(x), &empty).unwrap();
            assert!((got - want).norm() < 1e-12, "{got} vs {want}");
            let d = rule.apply(&samples, x, 1);
            let dw = plus.derivative().eval_grade0(c(x), &empty).unwrap();
            assert!((d - dw).norm() < 1e-11);
        }
    }

    #[test]
    fn finite_differences() {
        let d1: Complex64 = fd(|z: Complex64| z.powu(3), c(0.7), 1e-3, 1);
        assert!((d1 - c(3.0 * 0.49)).norm() < 1e-10);
        let d2: Complex64 = fd(|z: Complex64| z.powu(3), c(0.7), 1e-3, 2);
        assert!((d2 - c(4.2)).norm() < 1e-8);
    }
}
