//! Clifford-valued rational functions of the normal covariable `t = ξ_n` whose
//! only poles are at `t = ±i`.

use std::collections::HashMap;

use num_complex::Complex64;
use num_integer::binomial;

use crate::clifford::CliffordElement;
use crate::error::{Error, Result};
use crate::scalar::{names, GaussRat, Scalar, Sym};

type Poly = Vec<CliffordElement>;

fn trim(p: &mut Poly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn binom(n: u64, k: u64) -> GaussRat {
    GaussRat::from_ints(binomial(n, k) as i64, 0)
}

/// Coefficients of `(t - i)^a (t + i)^b`, lowest degree first.
fn pole_poly(a: u32, b: u32) -> Vec<GaussRat> {
    let mut p = vec![GaussRat::one()];
    let factors = std::iter::repeat_n(GaussRat::from_ints(0, -1), a as usize)
        .chain(std::iter::repeat_n(GaussRat::from_ints(0, 1), b as usize));
    for root_neg in factors {
        // multiply by (t + root_neg)
        let mut q = vec![GaussRat::zero(); p.len() + 1];
        for (k, c) in p.iter().enumerate() {
            q[k + 1] = &q[k + 1] + c;
            q[k] = &q[k] + &(c * &root_neg);
        }
        p = q;
    }
    p
}

fn poly_mul_gauss(p: &[CliffordElement], q: &[GaussRat], dim: usize) -> Poly {
    if p.is_empty() {
        return Vec::new();
    }
    let mut out = vec![CliffordElement::zero(dim); p.len() + q.len() - 1];
    for (i, c) in p.iter().enumerate() {
        for (j, g) in q.iter().enumerate() {
            out[i + j] = &out[i + j] + &c.scale_rat(g);
        }
    }
    trim(&mut out);
    out
}

fn poly_mul(p: &[CliffordElement], q: &[CliffordElement], dim: usize) -> Poly {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![CliffordElement::zero(dim); p.len() + q.len() - 1];
    for (i, c) in p.iter().enumerate() {
        for (j, d) in q.iter().enumerate() {
            out[i + j] = &out[i + j] + &(c * d);
        }
    }
    trim(&mut out);
    out
}

fn poly_add(p: &[CliffordElement], q: &[CliffordElement], dim: usize) -> Poly {
    let n = p.len().max(q.len());
    let mut out: Poly = (0..n)
        .map(|k| match (p.get(k), q.get(k)) {
            (Some(a), Some(b)) => a + b,
            (Some(a), None) => a.clone(),
            (None, Some(b)) => b.clone(),
            (None, None) => CliffordElement::zero(dim),
        })
        .collect();
    trim(&mut out);
    out
}

/// Synthetic division by `(t - z)`; returns `(quotient, remainder)`.
fn div_linear(p: &[CliffordElement], z: &GaussRat, dim: usize) -> (Poly, CliffordElement) {
    if p.is_empty() {
        return (Vec::new(), CliffordElement::zero(dim));
    }
    let m = p.len() - 1;
    let mut q = vec![CliffordElement::zero(dim); m];
    let mut carry = CliffordElement::zero(dim);
    for k in (0..=m).rev() {
        let cur = &p[k] + &carry.scale_rat(z);
        if k == 0 {
            return (q, cur);
        }
        q[k - 1] = cur.clone();
        carry = cur;
    }
    unreachable!()
}

/// Taylor coefficients of `p` around `z`: `p(z + s) = Σ d_k s^k`.
fn taylor_shift(p: &[CliffordElement], z: &GaussRat, dim: usize) -> Poly {
    (0..p.len())
        .map(|k| {
            let mut acc = CliffordElement::zero(dim);
            for (m, c) in p.iter().enumerate().skip(k) {
                let w = &binom(m as u64, k as u64) * &z.pow((m - k) as u32);
                acc = &acc + &c.scale_rat(&w);
            }
            acc
        })
        .collect()
}

fn poly_derivative(p: &[CliffordElement]) -> Poly {
    p.iter().enumerate().skip(1).map(|(k, c)| c.scale_rat(&GaussRat::from_ints(k as i64, 0))).collect()
}

/// `N(t) / ((t - i)^a (t + i)^b)`, kept reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryRational {
    dim: usize,
    num: Poly,
    a: u32,
    b: u32,
}

/// Exact decomposition `poly + Σ A_k/(t-i)^k + Σ B_k/(t+i)^k`; `plus[k-1] = A_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFractions {
    pub poly: Vec<CliffordElement>,
    pub plus: Vec<CliffordElement>,
    pub minus: Vec<CliffordElement>,
}

impl BoundaryRational {
    pub fn new(dim: usize, num: Vec<CliffordElement>, a: u32, b: u32) -> Self {
        let mut r = BoundaryRational { dim, num, a, b };
        r.reduce();
        r
    }

    pub fn zero(dim: usize) -> Self {
        BoundaryRational { dim, num: Vec::new(), a: 0, b: 0 }
    }

    /// `num / (1 + t²)^c`.
    pub fn over_norm_power(dim: usize, num: Vec<CliffordElement>, c: u32) -> Self {
        BoundaryRational::new(dim, num, c, c)
    }

    /// Splits `e`'s coefficients by powers of `t`, giving `e / ((t-i)^a (t+i)^b)`.
    pub fn from_clifford_in(e: &CliffordElement, t: Sym, a: u32, b: u32) -> Self {
        let dim = e.dim();
        let mut num: Poly = Vec::new();
        for (mask, c) in e.terms() {
            for (k, ck) in c.coefficients_in(t).into_iter().enumerate() {
                if num.len() <= k {
                    num.resize(k + 1, CliffordElement::zero(dim));
                }
                num[k].add_blade(mask, &ck);
            }
        }
        BoundaryRational::new(dim, num, a, b)
    }

    /// Scalar-valued convenience constructor.
    pub fn from_scalar_coeffs(dim: usize, coeffs: &[Scalar], a: u32, b: u32) -> Self {
        let num = coeffs.iter().map(|c| CliffordElement::scalar(dim, c.clone())).collect();
        BoundaryRational::new(dim, num, a, b)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn numerator(&self) -> &[CliffordElement] {
        &self.num
    }

    pub fn pole_orders(&self) -> (u32, u32) {
        (self.a, self.b)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    /// Numerator degree, `None` for zero.
    pub fn num_degree(&self) -> Option<usize> {
        self.num.len().checked_sub(1)
    }

    fn reduce(&mut self) {
        trim(&mut self.num);
        if self.num.is_empty() {
            self.a = 0;
            self.b = 0;
            return;
        }
        for (z, ord) in [(GaussRat::i(), 0usize), (GaussRat::from_ints(0, -1), 1)] {
            loop {
                let order = if ord == 0 { self.a } else { self.b };
                if order == 0 {
                    break;
                }
                let (q, r) = div_linear(&self.num, &z, self.dim);
                if !r.is_zero() {
                    break;
                }
                self.num = q;
                trim(&mut self.num);
                if ord == 0 {
                    self.a -= 1;
                } else {
                    self.b -= 1;
                }
            }
        }
    }

    /// Re-expresses with larger pole orders (no reduction applied).
    fn lifted(&self, a: u32, b: u32) -> Poly {
        debug_assert!(a >= self.a && b >= self.b);
        poly_mul_gauss(&self.num, &pole_poly(a - self.a, b - self.b), self.dim)
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b) = (self.a.max(o.a), self.b.max(o.b));
        BoundaryRational::new(self.dim, poly_add(&self.lifted(a, b), &o.lifted(a, b), self.dim), a, b)
    }

    pub fn neg(&self) -> Self {
        BoundaryRational { dim: self.dim, num: self.num.iter().map(|c| -c).collect(), a: self.a, b: self.b }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Product with `self` on the left.
    pub fn mul(&self, o: &Self) -> Self {
        BoundaryRational::new(self.dim, poly_mul(&self.num, &o.num, self.dim), self.a + o.a, self.b + o.b)
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        BoundaryRational::new(self.dim, self.num.iter().map(|c| c.scale(s)).collect(), self.a, self.b)
    }

    /// Applies a `t`-independent map to every numerator coefficient.
    pub fn map_numerator(&self, f: impl Fn(&CliffordElement) -> CliffordElement) -> Self {
        BoundaryRational::new(self.dim, self.num.iter().map(f).collect(), self.a, self.b)
    }

    pub fn left_mul(&self, e: &CliffordElement) -> Self {
        self.map_numerator(|c| e * c)
    }

    pub fn right_mul(&self, e: &CliffordElement) -> Self {
        self.map_numerator(|c| c * e)
    }

    pub fn derivative(&self) -> Self {
        let dim = self.dim;
        // f' = [N'(t-i)(t+i) - N(a(t+i) + b(t-i))] / ((t-i)^{a+1}(t+i)^{b+1})
        let n_prime = poly_derivative(&self.num);
        let first = poly_mul_gauss(&n_prime, &pole_poly(1, 1), dim);
        let (a, b) = (self.a as i64, self.b as i64);
        let lin = vec![GaussRat::from_ints(0, a - b), GaussRat::from_ints(a + b, 0)];
        let second = poly_mul_gauss(&self.num, &lin, dim);
        let num = poly_add(&first, &second.iter().map(|c| -c).collect::<Vec<_>>(), dim);
        BoundaryRational::new(dim, num, self.a + 1, self.b + 1)
    }

    pub fn derivative_n(&self, order: u32) -> Self {
        (0..order).fold(self.clone(), |f, _| f.derivative())
    }

    pub fn partial_fractions(&self) -> PartialFractions {
        let dim = self.dim;
        let denom = pole_poly(self.a, self.b);
        // Long division by the monic denominator for the polynomial part.
        let mut rem = self.num.clone();
        let dd = denom.len() - 1;
        let mut poly = Vec::new();
        if rem.len() > dd {
            poly = vec![CliffordElement::zero(dim); rem.len() - dd];
            for k in (dd..rem.len()).rev() {
                let lead = rem[k].clone();
                if lead.is_zero() {
                    continue;
                }
                poly[k - dd] = lead.clone();
                for (j, g) in denom.iter().enumerate() {
                    let idx = k - dd + j;
                    rem[idx] = &rem[idx] - &lead.scale_rat(g);
                }
            }
            trim(&mut poly);
        }
        let two_i = GaussRat::from_ints(0, 2);
        let series = |z: &GaussRat, other: u32, base: GaussRat, len: u32, alt: bool| -> Vec<CliffordElement> {
            let d = taylor_shift(&self.num, z, dim);
            let inv_2i = two_i.inv().expect("nonzero");
            let base_pow = base.inv().expect("nonzero").pow(other);
            let coef = |m: u32| -> GaussRat {
                let c = binom((other + m) as u64 - 1, m as u64);
                let sgn = if alt && m % 2 == 1 { GaussRat::from_ints(-1, 0) } else { GaussRat::one() };
                &(&(&base_pow * &c) * &sgn) * &inv_2i.pow(m)
            };
            (1..=len)
                .map(|k| {
                    let top = len - k;
                    let mut acc = CliffordElement::zero(dim);
                    for p in 0..=top {
                        if let Some(dp) = d.get(p as usize) {
                            let m = top - p;
                            let w = if other == 0 {
                                if m == 0 {
                                    GaussRat::one()
                                } else {
                                    GaussRat::zero()
                                }
                            } else {
                                coef(m)
                            };
                            acc = &acc + &dp.scale_rat(&w);
                        }
                    }
                    acc
                })
                .collect()
        };
        // Near i: (t + i)^{-b} = (2i + s)^{-b} = (2i)^{-b} Σ (-1)^m C(b+m-1, m) (s/2i)^m.
        let plus = series(&GaussRat::i(), self.b, two_i.clone(), self.a, true);
        // Near -i: (t - i)^{-a} = (s - 2i)^{-a} = (-2i)^{-a} Σ C(a+m-1, m) (s/2i)^m.
        let minus = series(&GaussRat::from_ints(0, -1), self.a, GaussRat::from_ints(0, -2), self.b, false);
        PartialFractions { poly, plus, minus }
    }

    /// The `(t - i)`-pole part.
    pub fn pi_plus(&self) -> Self {
        let pf = self.partial_fractions();
        self.rational_from_pole_part(&pf.plus, true)
    }

    /// The `(t + i)`-pole part.
    pub fn pi_minus_poles(&self) -> Self {
        let pf = self.partial_fractions();
        self.rational_from_pole_part(&pf.minus, false)
    }

    /// The polynomial part.
    pub fn polynomial_part(&self) -> Self {
        BoundaryRational::new(self.dim, self.partial_fractions().poly, 0, 0)
    }

    fn rational_from_pole_part(&self, coeffs: &[CliffordElement], plus: bool) -> Self {
        let order = coeffs.len() as u32;
        let mut num: Poly = Vec::new();
        for (k, c) in coeffs.iter().enumerate() {
            let shift = if plus { pole_poly(order - 1 - k as u32, 0) } else { pole_poly(0, order - 1 - k as u32) };
            num = poly_add(&num, &poly_mul_gauss(std::slice::from_ref(c), &shift, self.dim), self.dim);
        }
        if plus {
            BoundaryRational::new(self.dim, num, order, 0)
        } else {
            BoundaryRational::new(self.dim, num, 0, order)
        }
    }

    /// Residue at `t = i`.
    pub fn residue_upper(&self) -> CliffordElement {
        self.partial_fractions().plus.first().cloned().unwrap_or_else(|| CliffordElement::zero(self.dim))
    }

    /// `2πi · Res_{t=i}` with `π` kept as the formal symbol.
    pub fn contour_integral_upper(&self) -> CliffordElement {
        let two_pi_i = Scalar::var(names::PI).scale(&GaussRat::from_ints(0, 2));
        self.residue_upper().scale(&two_pi_i)
    }

    /// `∫_ℝ f dt`, closing the contour in the upper half-plane.
    pub fn line_integral(&self) -> Result<CliffordElement> {
        if let Some(deg) = self.num_degree() {
            let max = self.a as i64 + self.b as i64 - 2;
            if deg as i64 > max {
                return Err(Error::DegreeCondition { num_degree: deg, max });
            }
        }
        Ok(self.contour_integral_upper())
    }

    /// Recombines the numerator as a Clifford element polynomial in `t`.
    pub fn numerator_in(&self, t: Sym) -> CliffordElement {
        let mut acc = CliffordElement::zero(self.dim);
        for (k, c) in self.num.iter().enumerate() {
            acc = &acc + &c.scale(&Scalar::sym(t).pow(k as u32));
        }
        acc
    }

    /// Floating evaluation of the grade-0 component at complex `t`.
    pub fn eval_grade0(&self, t: Complex64, bindings: &HashMap<Sym, Complex64>) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.num.iter().rev() {
            acc = acc * t + c.grade0().eval(bindings)?;
        }
        let i = Complex64::new(0.0, 1.0);
        Ok(acc / ((t - i).powu(self.a) * (t + i).powu(self.b)))
    }
}

impl PartialFractions {
    /// Rebuilds the rational function from its parts.
    pub fn recombine(&self, dim: usize) -> BoundaryRational {
        let mut acc = BoundaryRational::new(dim, self.poly.clone(), 0, 0);
        for (k, c) in self.plus.iter().enumerate() {
            acc = acc.add(&BoundaryRational::new(dim, vec![c.clone()], k as u32 + 1, 0));
        }
        for (k, c) in self.minus.iter().enumerate() {
            acc = acc.add(&BoundaryRational::new(dim, vec![c.clone()], 0, k as u32 + 1));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(re: i64, im: i64) -> CliffordElement {
        CliffordElement::scalar(4, Scalar::constant(GaussRat::from_ints(re, im)))
    }

    fn rat(coeffs: &[(i64, i64)], a: u32, b: u32) -> BoundaryRational {
        BoundaryRational::new(4, coeffs.iter().map(|&(r, i)| sc(r, i)).collect(), a, b)
    }

    fn half(re: i64, im: i64) -> CliffordElement {
        CliffordElement::scalar(
            4,
            Scalar::constant(GaussRat::new(
                num_rational::BigRational::new(re.into(), 2.into()),
                num_rational::BigRational::new(im.into(), 2.into()),
            )),
        )
    }

    #[test]
    fn simple_partial_fractions() {
        let pf = rat(&[(1, 0)], 1, 1).partial_fractions();
        assert_eq!(pf.plus, vec![half(0, -1)]);
        assert_eq!(pf.minus, vec![half(0, 1)]);
        assert!(pf.poly.is_empty());
        let pf = rat(&[(0, 0), (1, 0)], 1, 1).partial_fractions();
        assert_eq!(pf.plus, vec![half(1, 0)]);
        assert_eq!(pf.minus, vec![half(1, 0)]);
    }

    #[test]
    fn pi_plus_examples() {
        assert_eq!(rat(&[(1, 0)], 1, 1).pi_plus(), BoundaryRational::new(4, vec![half(0, -1)], 1, 0));
        assert!(rat(&[(3, 1)], 0, 0).pi_plus().is_zero());
    }

    #[test]
    fn second_derivative_of_inverse_norm() {
        let d2 = rat(&[(1, 0)], 1, 1).derivative_n(2);
        assert_eq!(d2, rat(&[(-2, 0), (0, 0), (6, 0)], 3, 3));
        assert_eq!(rat(&[(1, 0)], 1, 1).derivative(), rat(&[(0, 0), (-2, 0)], 2, 2));
        assert!(rat(&[(5, 0)], 0, 0).derivative().is_zero());
    }

    #[test]
    fn contour_values() {
        let pi = Scalar::var(names::PI);
        let v = rat(&[(1, 0)], 5, 2).contour_integral_upper();
        assert_eq!(
            v.grade0(),
            pi.scale(&GaussRat::new(
                num_rational::BigRational::from_integer(0.into()),
                num_rational::BigRational::new((-5).into(), 32.into())
            ))
        );
        assert!(rat(&[(1, 0)], 0, 3).contour_integral_upper().is_zero());
        assert_eq!(rat(&[(1, 0)], 1, 0).contour_integral_upper().grade0(), pi.scale(&GaussRat::from_ints(0, 2)));
    }

    #[test]
    fn line_integrals() {
        let pi = Scalar::var(names::PI);
        assert_eq!(rat(&[(1, 0)], 1, 1).line_integral().unwrap().grade0(), pi);
        assert_eq!(rat(&[(1, 0)], 2, 2).line_integral().unwrap().grade0(), pi.scale(&GaussRat::frac(1, 2)));
        let e = rat(&[(0, 0), (0, 0), (0, 0), (1, 0)], 1, 1).line_integral();
        assert!(matches!(e, Err(Error::DegreeCondition { .. })));
    }

    #[test]
    fn reduces_common_factors() {
        // (t - i)/(1 + t²) = 1/(t + i)
        let r = rat(&[(0, -1), (1, 0)], 1, 1);
        assert_eq!(r.pole_orders(), (0, 1));
    }
}
