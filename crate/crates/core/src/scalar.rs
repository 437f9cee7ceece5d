//! Multivariate polynomials over the Gaussian rationals in named indeterminates.
//!
//! Indeterminates live in one process-wide, append-only registry, so a [`Sym`]
//! has the same identity in every value that mentions it.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Interned indeterminate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(u32);

#[derive(Default)]
struct Registry {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

fn registry() -> &'static RwLock<Registry> {
    static REG: OnceLock<RwLock<Registry>> = OnceLock::new();
    REG.get_or_init(|| RwLock::new(Registry::default()))
}

impl Sym {
    /// Interns `name`, returning the existing handle when already registered.
    pub fn new(name: &str) -> Sym {
        if let Some(&id) = registry().read().expect("symbol registry poisoned").index.get(name) {
            return Sym(id);
        }
        let mut reg = registry().write().expect("symbol registry poisoned");
        if let Some(&id) = reg.index.get(name) {
            return Sym(id);
        }
        let id = reg.names.len() as u32;
        reg.names.push(name.to_string());
        reg.index.insert(name.to_string(), id);
        Sym(id)
    }

    /// Looks up an already registered name without interning it.
    pub fn lookup(name: &str) -> Option<Sym> {
        registry().read().expect("symbol registry poisoned").index.get(name).map(|&i| Sym(i))
    }

    pub fn name(self) -> String {
        registry().read().expect("symbol registry poisoned").names[self.0 as usize].clone()
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Exact element of Q(i).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussRat::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    /// `num/den` as a real Gaussian rational. Panics if `den == 0`.
    pub fn frac(num: i64, den: i64) -> Self {
        GaussRat::new(BigRational::new(num.into(), den.into()), BigRational::zero())
    }

    pub fn real(r: BigRational) -> Self {
        GaussRat::new(r, BigRational::zero())
    }

    pub fn i() -> Self {
        GaussRat::from_ints(0, 1)
    }

    pub fn zero() -> Self {
        GaussRat::from_ints(0, 0)
    }

    pub fn one() -> Self {
        GaussRat::from_ints(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sq();
        Some(GaussRat::new(&self.re / &n, -&self.im / &n))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = GaussRat::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Lowest common denominator of both parts.
    pub fn denom_lcm(&self) -> BigInt {
        num_integer::Integer::lcm(self.re.denom(), self.im.denom())
    }
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl Add for &GaussRat {
    type Output = GaussRat;
    fn add(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub for &GaussRat {
    type Output = GaussRat;
    fn sub(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Mul for &GaussRat {
    type Output = GaussRat;
    fn mul(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re.clone(), -self.im.clone())
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(f, "({}{}{}i)", self.re, sign, self.im.abs())
            }
        }
    }
}

/// Sorted `(symbol, exponent)` list with positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(SmallVec<[(Sym, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(s: Sym, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(smallvec::smallvec![(s, e)])
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Sym, u32)>) -> Self {
        let mut m = Monomial::one();
        for (s, e) in pairs {
            m = m.mul(&Monomial::var(s, e));
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Sym, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, s: Sym) -> u32 {
        self.0.iter().find(|&&(t, _)| t == s).map_or(0, |&(_, e)| e)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut out: SmallVec<[(Sym, u32); 4]> = SmallVec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < o.0.len() {
            let (a, b) = (self.0[i], o.0[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&o.0[j..]);
        Monomial(out)
    }

    /// Removes `s` entirely, returning its exponent and the remainder.
    pub fn split_off(&self, s: Sym) -> (u32, Monomial) {
        let e = self.exponent(s);
        let rest = self.0.iter().copied().filter(|&(t, _)| t != s).collect();
        (e, Monomial(rest))
    }

    /// Human-readable key, sorted by symbol name; used for deterministic output.
    pub fn name_key(&self) -> Vec<(String, u32)> {
        let mut v: Vec<(String, u32)> = self.0.iter().map(|&(s, e)| (s.name(), e)).collect();
        v.sort();
        v
    }
}

/// Sparse polynomial over Q(i). Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    terms: BTreeMap<Monomial, GaussRat>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::constant(GaussRat::one())
    }

    pub fn i() -> Self {
        Scalar::constant(GaussRat::i())
    }

    pub fn int(n: i64) -> Self {
        Scalar::constant(GaussRat::from_ints(n, 0))
    }

    pub fn frac(num: i64, den: i64) -> Self {
        Scalar::constant(GaussRat::frac(num, den))
    }

    pub fn constant(c: GaussRat) -> Self {
        Scalar::term(Monomial::one(), c)
    }

    pub fn term(m: Monomial, c: GaussRat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Scalar { terms }
    }

    pub fn var(name: &str) -> Self {
        Scalar::sym(Sym::new(name))
    }

    pub fn sym(s: Sym) -> Self {
        Scalar::term(Monomial::var(s, 1), GaussRat::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussRat)> {
        self.terms.iter()
    }

    /// The value when `self` has no indeterminates.
    pub fn as_constant(&self) -> Option<GaussRat> {
        match self.terms.len() {
            0 => Some(GaussRat::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: &GaussRat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = &*v + c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn scale(&self, c: &GaussRat) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Scalar {
        Scalar { terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn degree_in(&self, s: Sym) -> u32 {
        self.terms.keys().map(|m| m.exponent(s)).max().unwrap_or(0)
    }

    pub fn contains(&self, s: Sym) -> bool {
        self.terms.keys().any(|m| m.exponent(s) > 0)
    }

    /// All indeterminates occurring in `self`.
    pub fn symbols(&self) -> Vec<Sym> {
        let mut v: Vec<Sym> = self.terms.keys().flat_map(|m| m.factors().iter().map(|&(s, _)| s)).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Coefficients of powers of `s`: entry `k` multiplies `s^k`.
    pub fn coefficients_in(&self, s: Sym) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.degree_in(s) as usize + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(s);
            out[e as usize].add_term(rest, c);
        }
        out
    }

    /// Formal partial derivative in `s`.
    pub fn derivative(&self, s: Sym) -> Scalar {
        let mut out = Scalar::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(s);
            if e > 0 {
                let m2 = rest.mul(&Monomial::var(s, e - 1));
                out.add_term(m2, &(c * &GaussRat::from_ints(e as i64, 0)));
            }
        }
        out
    }

    /// Exact substitution of indeterminates by polynomials.
    pub fn subs(&self, map: &HashMap<Sym, Scalar>) -> Scalar {
        let mut out = Scalar::zero();
        for (m, c) in &self.terms {
            let mut acc = Scalar::constant(c.clone());
            let mut kept = Monomial::one();
            for &(s, e) in m.factors() {
                match map.get(&s) {
                    Some(v) => acc = &acc * &v.pow(e),
                    None => kept = kept.mul(&Monomial::var(s, e)),
                }
            }
            out += &acc.mul_monomial(&kept);
        }
        out
    }

    /// Floating-point evaluation; every indeterminate must be bound.
    pub fn eval(&self, bindings: &HashMap<Sym, Complex64>) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut v = c.to_complex();
            for &(s, e) in m.factors() {
                let b = bindings.get(&s).ok_or_else(|| Error::UnboundSymbol(s.name()))?;
                v *= b.powu(e);
            }
            acc += v;
        }
        Ok(acc)
    }

    /// Terms in deterministic name order.
    pub fn sorted_terms(&self) -> Vec<(Vec<(String, u32)>, GaussRat)> {
        let mut v: Vec<_> = self.terms.iter().map(|(m, c)| (m.name_key(), c.clone())).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// Rebuilds a polynomial from name-keyed terms.
    pub fn from_named_terms(terms: impl IntoIterator<Item = (Vec<(String, u32)>, GaussRat)>) -> Scalar {
        let mut out = Scalar::zero();
        for (key, c) in terms {
            let m = Monomial::from_pairs(key.iter().map(|(n, e)| (Sym::new(n), *e)));
            out.add_term(m, &c);
        }
        out
    }
}

impl From<GaussRat> for Scalar {
    fn from(c: GaussRat) -> Self {
        Scalar::constant(c)
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c);
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), &-c);
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        let mut r = self.clone();
        r += o;
        r
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        let mut r = self.clone();
        r -= o;
        r
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), &(c1 * c2));
            }
        }
        out
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.scale(&GaussRat::from_ints(-1, 0))
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $f(self, o: Scalar) -> Scalar {
                (&self).$f(&o)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $f(self, o: &Scalar) -> Scalar {
                (&self).$f(o)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $f(self, o: Scalar) -> Scalar {
                self.$f(&o)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (key, c)) in self.sorted_terms().into_iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}")?;
            for (n, e) in key {
                if e == 1 {
                    write!(f, "*{n}")?;
                } else {
                    write!(f, "*{n}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// Parses `"p/q"` or an integer into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    BigRational::from_str(s.trim()).map_err(|_| Error::Parse(format!("not a rational: {s:?}")))
}

/// Names used across the engine.
pub mod names {
    pub const H1: &str = "h1";
    pub const PI: &str = "pi";
    pub const OMEGA3: &str = "Omega3";
    pub const UPSILON3: &str = "upsilon3";
    pub const SCAL: &str = "s";
    pub const EG: &str = "EG";

    pub fn xi(j: usize) -> String {
        format!("xi{j}")
    }
    pub fn x(j: usize) -> String {
        format!("X{j}")
    }
    pub fn y(j: usize) -> String {
        format!("Y{j}")
    }
    /// Partial derivative of `Y_l` along `x_j` at the base point.
    pub fn dy(l: usize, j: usize) -> String {
        format!("dY{l}dx{j}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_norm() {
        let a =
            Scalar::constant(GaussRat::new(BigRational::new(1.into(), 2.into()), BigRational::new(1.into(), 2.into())));
        let b = Scalar::constant(a.as_constant().unwrap().conj());
        assert_eq!(&a * &b, Scalar::frac(1, 2));
    }

    #[test]
    fn zero_absorbs_and_commutes() {
        let h = Scalar::var("h1");
        assert!((&h * &Scalar::zero()).is_zero());
        let p = &Scalar::var("pi") * &Scalar::var("Omega3");
        assert_eq!(&p * &h, &h * &p);
    }

    #[test]
    fn substitution_examples() {
        let h = Sym::new("h1");
        let mut b = HashMap::new();
        b.insert(h, Complex64::new(2.0, 0.0));
        assert_eq!((Scalar::int(3) * Scalar::sym(h)).eval(&b).unwrap(), Complex64::new(6.0, 0.0));
        let one_i = Scalar::constant(GaussRat::from_ints(1, 1));
        assert_eq!(one_i.pow(2), Scalar::constant(GaussRat::from_ints(0, 2)));
        let err = Scalar::var("unbound_q").eval(&b).unwrap_err();
        assert!(matches!(err, Error::UnboundSymbol(_)));
    }

    #[test]
    fn pi_omega_evaluation() {
        let (pi, om) = (Sym::new("pi"), Sym::new("Omega3"));
        let mut b = HashMap::new();
        b.insert(pi, Complex64::new(std::f64::consts::PI, 0.0));
        b.insert(om, Complex64::new(4.0 * std::f64::consts::PI, 0.0));
        let v = (Scalar::sym(pi) * Scalar::sym(om)).eval(&b).unwrap();
        assert!((v.re - 4.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn derivative_and_coefficients() {
        let x = Sym::new("xi1");
        let y = Sym::new("xi2");
        let p = Scalar::sym(x).pow(2) * Scalar::sym(y);
        assert_eq!(p.derivative(x), Scalar::int(2) * Scalar::sym(x) * Scalar::sym(y));
        let c = (Scalar::sym(x) + Scalar::one()).pow(2).coefficients_in(x);
        assert_eq!(c, vec![Scalar::one(), Scalar::int(2), Scalar::one()]);
    }

    #[test]
    fn named_roundtrip() {
        let p = Scalar::var("a") * Scalar::var("b").pow(3) + Scalar::constant(GaussRat::from_ints(2, -5));
        assert_eq!(Scalar::from_named_terms(p.sorted_terms()), p);
    }
}
