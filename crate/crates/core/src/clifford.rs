//! Clifford algebra of an orthonormal frame with `e_i e_j + e_j e_i = -2 δ_ij`.
//!
//! Blades are bitmasks: bit `i-1` set means `e_i` is a factor, factors in
//! increasing index order.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{GaussRat, Scalar, Sym};

/// Largest dimension served from the precomputed sign table.
const TABLE_DIM: usize = 6;

fn sign_table() -> &'static Vec<i8> {
    static T: OnceLock<Vec<i8>> = OnceLock::new();
    T.get_or_init(|| {
        let size = 1usize << TABLE_DIM;
        let mut t = vec![0i8; size * size];
        for a in 0..size as u32 {
            for b in 0..size as u32 {
                t[(a as usize) * size + b as usize] = compute_sign(a, b);
            }
        }
        t
    })
}

/// Sign of `e_A e_B = ± e_{A xor B}`: reordering swaps times `(-1)` per shared factor.
fn compute_sign(a: u32, b: u32) -> i8 {
    let mut swaps = 0u32;
    let mut x = a >> 1;
    while x != 0 {
        swaps += (x & b).count_ones();
        x >>= 1;
    }
    swaps += (a & b).count_ones();
    if swaps.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[inline]
pub fn blade_sign(dim: usize, a: u32, b: u32) -> i8 {
    if dim <= TABLE_DIM {
        sign_table()[(a as usize) * (1 << TABLE_DIM) + b as usize]
    } else {
        compute_sign(a, b)
    }
}

/// Indices (1-based) of the factors of a blade.
pub fn blade_indices(b: u32) -> Vec<usize> {
    (0..32).filter(|k| b & (1 << k) != 0).map(|k| k + 1).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CliffordElement {
    dim: usize,
    terms: BTreeMap<u32, Scalar>,
}

impl CliffordElement {
    pub fn zero(dim: usize) -> Self {
        CliffordElement { dim, terms: BTreeMap::new() }
    }

    pub fn scalar(dim: usize, s: Scalar) -> Self {
        let mut e = CliffordElement::zero(dim);
        e.add_blade(0, &s);
        e
    }

    pub fn identity(dim: usize) -> Self {
        CliffordElement::scalar(dim, Scalar::one())
    }

    /// `c(e_i)`, 1-based.
    pub fn basis(dim: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= dim, "basis index {i} out of range 1..={dim}");
        let mut e = CliffordElement::zero(dim);
        e.add_blade(1 << (i - 1), &Scalar::one());
        e
    }

    /// Canonical blade with unit coefficient.
    pub fn blade(dim: usize, mask: u32) -> Self {
        let mut e = CliffordElement::zero(dim);
        e.add_blade(mask, &Scalar::one());
        e
    }

    /// `Σ v_i c(e_i)`.
    pub fn vector(dim: usize, comps: &[Scalar]) -> Self {
        assert_eq!(comps.len(), dim);
        let mut e = CliffordElement::zero(dim);
        for (k, c) in comps.iter().enumerate() {
            e.add_blade(1 << k, c);
        }
        e
    }

    /// `Σ name_i c(e_i)` with fresh component symbols `name1..namen`.
    pub fn vector_symbolic(dim: usize, name: &str) -> Self {
        let comps: Vec<Scalar> = (1..=dim).map(|j| Scalar::var(&format!("{name}{j}"))).collect();
        CliffordElement::vector(dim, &comps)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Scalar)> {
        self.terms.iter().map(|(b, s)| (*b, s))
    }

    pub fn coefficient(&self, mask: u32) -> Scalar {
        self.terms.get(&mask).cloned().unwrap_or_default()
    }

    pub fn add_blade(&mut self, mask: u32, s: &Scalar) {
        debug_assert!(mask < (1 << self.dim));
        if s.is_zero() {
            return;
        }
        let entry = self.terms.entry(mask).or_default();
        *entry += s;
        if entry.is_zero() {
            self.terms.remove(&mask);
        }
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        if self.dim != o.dim {
            return Err(Error::DimensionMismatch(self.dim, o.dim));
        }
        let mut acc: BTreeMap<u32, Scalar> = BTreeMap::new();
        for (&a, sa) in &self.terms {
            for (&b, sb) in &o.terms {
                let prod = sa * sb;
                let slot = acc.entry(a ^ b).or_default();
                if blade_sign(self.dim, a, b) > 0 {
                    *slot += &prod;
                } else {
                    *slot -= &prod;
                }
            }
        }
        acc.retain(|_, s| !s.is_zero());
        Ok(CliffordElement { dim: self.dim, terms: acc })
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        if self.dim != o.dim {
            return Err(Error::DimensionMismatch(self.dim, o.dim));
        }
        let mut r = self.clone();
        for (&b, s) in &o.terms {
            r.add_blade(b, s);
        }
        Ok(r)
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut terms = BTreeMap::new();
        for (&b, c) in &self.terms {
            let v = c * s;
            if !v.is_zero() {
                terms.insert(b, v);
            }
        }
        CliffordElement { dim: self.dim, terms }
    }

    pub fn scale_rat(&self, c: &GaussRat) -> Self {
        if c.is_zero() {
            return CliffordElement::zero(self.dim);
        }
        CliffordElement { dim: self.dim, terms: self.terms.iter().map(|(&b, s)| (b, s.scale(c))).collect() }
    }

    /// Applies `f` to every coefficient, dropping zeros.
    pub fn map_coeffs(&self, mut f: impl FnMut(&Scalar) -> Scalar) -> Self {
        let mut terms = BTreeMap::new();
        for (&b, s) in &self.terms {
            let v = f(s);
            if !v.is_zero() {
                terms.insert(b, v);
            }
        }
        CliffordElement { dim: self.dim, terms }
    }

    pub fn derivative(&self, s: Sym) -> Self {
        self.map_coeffs(|c| c.derivative(s))
    }

    pub fn grade0(&self) -> Scalar {
        self.coefficient(0)
    }

    /// `2^{n/2}` times the grade-0 coefficient: the trace on spinors.
    pub fn spinor_trace(&self) -> Scalar {
        self.grade0().scale(&GaussRat::from_ints(1 << (self.dim / 2), 0))
    }

    /// Largest grade present, or `None` for zero.
    pub fn max_grade(&self) -> Option<u32> {
        self.terms.keys().map(|b| b.count_ones()).max()
    }
}

impl Add for &CliffordElement {
    type Output = CliffordElement;
    fn add(self, o: &CliffordElement) -> CliffordElement {
        self.try_add(o).expect("Clifford dimension mismatch")
    }
}

impl Sub for &CliffordElement {
    type Output = CliffordElement;
    fn sub(self, o: &CliffordElement) -> CliffordElement {
        self + &(-o)
    }
}

impl Neg for &CliffordElement {
    type Output = CliffordElement;
    fn neg(self) -> CliffordElement {
        self.scale_rat(&GaussRat::from_ints(-1, 0))
    }
}

impl Mul for &CliffordElement {
    type Output = CliffordElement;
    fn mul(self, o: &CliffordElement) -> CliffordElement {
        self.try_mul(o).expect("Clifford dimension mismatch")
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl $tr for CliffordElement {
            type Output = CliffordElement;
            fn $f(self, o: CliffordElement) -> CliffordElement {
                (&self).$f(&o)
            }
        }
        impl $tr<&CliffordElement> for CliffordElement {
            type Output = CliffordElement;
            fn $f(self, o: &CliffordElement) -> CliffordElement {
                (&self).$f(o)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for CliffordElement {
    type Output = CliffordElement;
    fn neg(self) -> CliffordElement {
        -&self
    }
}

impl fmt::Display for CliffordElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (b, s)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            let idx: Vec<String> = blade_indices(*b).iter().map(|i| i.to_string()).collect();
            if idx.is_empty() {
                write!(f, "({s})")?;
            } else {
                write!(f, "({s})e{}", idx.join(""))?;
            }
        }
        Ok(())
    }
}

/// The perturbation `c(Ψ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsiSpec {
    /// No perturbation.
    Zero,
    /// Arbitrary `c(Ψ)` described by its trace pairings `T_B = trace[c(e_B)c(Ψ)]`.
    Generic,
    /// `f·id`.
    Scalar,
    /// `c(U)`.
    OneField,
    /// `c(U)c(V)`.
    TwoField,
    /// `c(U)c(V)c(W)`.
    ThreeField,
}

/// Vector fields used by the concrete perturbations, in product order.
pub const FIELD_NAMES: [&str; 3] = ["U", "V", "W"];

impl PsiSpec {
    /// Product grade of the field perturbations (`k` in `c(X_1)…c(X_k)`).
    pub fn field_count(self) -> Option<usize> {
        match self {
            PsiSpec::Zero | PsiSpec::Scalar => Some(0),
            PsiSpec::OneField => Some(1),
            PsiSpec::TwoField => Some(2),
            PsiSpec::ThreeField => Some(3),
            PsiSpec::Generic => None,
        }
    }

    /// Concrete product of `k` symbolic vector fields; `k > 3` is rejected.
    pub fn from_field_count(k: usize) -> Result<Self> {
        match k {
            1 => Ok(PsiSpec::OneField),
            2 => Ok(PsiSpec::TwoField),
            3 => Ok(PsiSpec::ThreeField),
            _ => Err(Error::UnsupportedGrade(k)),
        }
    }

    pub fn is_concrete(self) -> bool {
        self != PsiSpec::Generic
    }
}

/// Name of the trace pairing symbol for blade `mask`, e.g. `T4`, `T12`, `T0`.
pub fn trace_pairing_name(mask: u32) -> String {
    let idx = blade_indices(mask);
    if idx.is_empty() {
        "T0".into()
    } else {
        format!("T{}", idx.iter().map(|i| i.to_string()).collect::<String>())
    }
}

/// Builds `c(Ψ)` for `spec` in dimension `dim`.
///
/// Generic mode expands `c(Ψ) = Σ_B T_B / (2^{n/2} s_B) e_B` with
/// `s_B = grade0(e_B e_B)`, so that `trace[c(e_B)c(Ψ)] = T_B` exactly.
pub fn psi_instantiate(spec: PsiSpec, dim: usize) -> Result<CliffordElement> {
    Ok(match spec {
        PsiSpec::Zero => CliffordElement::zero(dim),
        PsiSpec::Scalar => CliffordElement::scalar(dim, Scalar::var("f")),
        PsiSpec::Generic => {
            let mut e = CliffordElement::zero(dim);
            let rank = 1i64 << (dim / 2);
            for mask in 0..(1u32 << dim) {
                let s_b = blade_sign(dim, mask, mask) as i64;
                let t = Scalar::var(&trace_pairing_name(mask)).scale(&GaussRat::frac(1, rank * s_b));
                e.add_blade(mask, &t);
            }
            e
        }
        _ => {
            let k = spec.field_count().unwrap_or(0);
            let mut e = CliffordElement::identity(dim);
            for name in FIELD_NAMES.iter().take(k) {
                e = &e * &CliffordElement::vector_symbolic(dim, name);
            }
            e
        }
    })
}

/// `Σ_j a_j b_j` for two vectors given by component symbols.
pub fn metric_pair(dim: usize, a: &str, b: &str) -> Scalar {
    let mut s = Scalar::zero();
    for j in 1..=dim {
        s += &(Scalar::var(&format!("{a}{j}")) * Scalar::var(&format!("{b}{j}")));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize) -> CliffordElement {
        CliffordElement::basis(4, i)
    }

    #[test]
    fn relations() {
        assert_eq!(&e(1) * &e(1), CliffordElement::scalar(4, Scalar::int(-1)));
        assert_eq!(&e(1) * &e(2), CliffordElement::blade(4, 0b11));
        assert_eq!(&e(2) * &e(1), -CliffordElement::blade(4, 0b11));
        for i in 1..=4 {
            for j in 1..=4 {
                let anti = &(&e(i) * &e(j)) + &(&e(j) * &e(i));
                let want = if i == j { Scalar::int(-2) } else { Scalar::zero() };
                assert_eq!(anti, CliffordElement::scalar(4, want));
            }
        }
    }

    #[test]
    fn clifford_square_of_vector() {
        let xi = CliffordElement::vector_symbolic(4, "xi");
        let sq = &xi * &xi;
        let norm: Scalar = (1..=4).fold(Scalar::zero(), |a, j| a + Scalar::var(&format!("xi{j}")).pow(2));
        assert_eq!(sq, CliffordElement::scalar(4, -norm));
    }

    #[test]
    fn traces() {
        assert_eq!(CliffordElement::identity(4).spinor_trace(), Scalar::int(4));
        assert!(CliffordElement::blade(4, 0b11).spinor_trace().is_zero());
    }

    #[test]
    fn dimension_mismatch() {
        let r = CliffordElement::identity(4).try_mul(&CliffordElement::identity(3));
        assert_eq!(r, Err(Error::DimensionMismatch(4, 3)));
    }

    #[test]
    fn psi_traces_against_normal() {
        let en = e(4);
        let u = psi_instantiate(PsiSpec::OneField, 4).unwrap();
        assert_eq!((&en * &u).spinor_trace(), Scalar::int(-4) * Scalar::var("U4"));
        let uv = psi_instantiate(PsiSpec::TwoField, 4).unwrap();
        assert!((&en * &uv).spinor_trace().is_zero());
        let f = psi_instantiate(PsiSpec::Scalar, 4).unwrap();
        assert!((&en * &f).spinor_trace().is_zero());
        assert_eq!(PsiSpec::from_field_count(4), Err(Error::UnsupportedGrade(4)));
    }

    #[test]
    fn three_field_trace_expansion() {
        let uvw = psi_instantiate(PsiSpec::ThreeField, 4).unwrap();
        let got = (&e(4) * &uvw).spinor_trace();
        let (u4, v4, w4) = (Scalar::var("U4"), Scalar::var("V4"), Scalar::var("W4"));
        let want = (u4 * metric_pair(4, "V", "W") - v4 * metric_pair(4, "U", "W") + w4 * metric_pair(4, "U", "V"))
            .scale(&GaussRat::from_ints(4, 0));
        assert_eq!(got, want);
    }

    #[test]
    fn generic_pairings_recover_symbols() {
        let psi = psi_instantiate(PsiSpec::Generic, 4).unwrap();
        for mask in 0..16u32 {
            let t = (&CliffordElement::blade(4, mask) * &psi).spinor_trace();
            assert_eq!(t, Scalar::var(&trace_pairing_name(mask)));
        }
    }
}
