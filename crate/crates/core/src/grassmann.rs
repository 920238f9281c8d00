//! Pseudo-Grassmann coefficients: two anticommuting generators ζ, ζ̄ that are not
//! nilpotent.
//!
//! Elements are stored in the canonical order `ζ^u ζ̄^v`. Products are graded by
//! the pair `(u, v)`; two monomials satisfy `xy = (-1)^{v1·u2 + u1·v2} yx`. Only
//! on the nilpotent quotient (`u, v ≤ 1`) does this reduce to plain
//! supercommutativity by total parity.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::Zero;
use thiserror::Error;

pub const DEFAULT_G_MAX: u32 = 8;

/// Cutoff used by constants that should not constrain the cutoff of a product.
pub const UNBOUNDED: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_degree(d: u32) -> Self {
        if d % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bit(self) -> u32 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    /// `(-1)^{p1·p2}`.
    pub fn koszul(self, other: Parity) -> f64 {
        if self == Parity::Odd && other == Parity::Odd {
            -1.0
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrassError {
    #[error("element has mixed parity")]
    MixedParity,
    #[error("expected an even element, found odd monomials")]
    NotEven,
    #[error("scalar part must be real and positive, got {0}")]
    NonPositiveScalar(Complex64),
}

/// Linear combination of monomials `ζ^u ζ̄^v` with complex coefficients.
///
/// Equality compares coefficients only, not cutoffs or truncation counters.
#[derive(Clone)]
pub struct GrassElement {
    terms: BTreeMap<(u32, u32), Complex64>,
    g_max: u32,
    truncated: u64,
}

impl GrassElement {
    pub fn zero() -> Self {
        Self::zero_with(UNBOUNDED)
    }

    pub fn zero_with(g_max: u32) -> Self {
        Self {
            terms: BTreeMap::new(),
            g_max,
            truncated: 0,
        }
    }

    pub fn one() -> Self {
        Self::scalar(Complex64::new(1.0, 0.0))
    }

    pub fn scalar(c: Complex64) -> Self {
        Self::monomial(0, 0, c, UNBOUNDED)
    }

    pub fn real(c: f64) -> Self {
        Self::scalar(Complex64::new(c, 0.0))
    }

    pub fn monomial(u: u32, v: u32, c: Complex64, g_max: u32) -> Self {
        let mut out = Self::zero_with(g_max);
        out.add_term(u, v, c);
        out
    }

    pub fn zeta(g_max: u32) -> Self {
        Self::monomial(1, 0, Complex64::new(1.0, 0.0), g_max)
    }

    pub fn zetabar(g_max: u32) -> Self {
        Self::monomial(0, 1, Complex64::new(1.0, 0.0), g_max)
    }

    pub fn g_max(&self) -> u32 {
        self.g_max
    }

    /// Number of monomials dropped so far for exceeding `g_max`.
    pub fn truncated(&self) -> u64 {
        self.truncated
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), Complex64)> + '_ {
        self.terms.iter().map(|(k, c)| (*k, *c))
    }

    pub fn coeff(&self, u: u32, v: u32) -> Complex64 {
        self.terms.get(&(u, v)).copied().unwrap_or_default()
    }

    pub fn scalar_part(&self) -> Complex64 {
        self.coeff(0, 0)
    }

    /// Largest total degree present.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|(u, v)| u + v).max()
    }

    fn add_term(&mut self, u: u32, v: u32, c: Complex64) {
        if u.saturating_add(v) > self.g_max {
            if c != Complex64::zero() {
                self.truncated += 1;
            }
            return;
        }
        let e = self.terms.entry((u, v)).or_default();
        *e += c;
        if *e == Complex64::zero() {
            self.terms.remove(&(u, v));
        }
    }

    /// Keep only monomials of total degree `≤ d`.
    pub fn truncate_degree(&self, d: u32) -> Self {
        let mut out = self.clone();
        out.terms.retain(|(u, v), _| u + v <= d);
        out
    }

    /// Same element with a different cutoff; monomials above the new cutoff are dropped.
    pub fn with_g_max(&self, g_max: u32) -> Self {
        let mut out = Self::zero_with(g_max);
        out.truncated = self.truncated;
        for (&(u, v), &c) in &self.terms {
            out.add_term(u, v, c);
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::zero_with(self.g_max);
        out.truncated = self.truncated;
        for (&(u, v), &x) in &self.terms {
            out.add_term(u, v, x * c);
        }
        out
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// External conjugation: `ζ^u ζ̄^v ↦ conj(c) ζ^v ζ̄^u`. Reversing the generator
    /// order of `ζ^u ζ̄^v` and swapping ζ ↔ ζ̄ lands directly in canonical order.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero_with(self.g_max);
        out.truncated = self.truncated;
        for (&(u, v), &c) in &self.terms {
            out.add_term(v, u, c.conj());
        }
        out
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient magnitude among monomials of total degree `d`.
    pub fn max_abs_in_degree(&self, d: u32) -> f64 {
        self.terms
            .iter()
            .filter(|((u, v), _)| u + v == d)
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }

    /// `x^k` with the cutoff of `x`.
    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one().with_g_max(self.g_max);
        for _ in 0..k {
            acc = g_mul(&acc, self);
        }
        acc
    }
}

impl PartialEq for GrassElement {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Default for GrassElement {
    fn default() -> Self {
        Self::zero()
    }
}

/// Sign picked up when `ζ^{u1} ζ̄^{v1} · ζ^{u2} ζ̄^{v2}` is brought to canonical order.
pub fn monomial_product_sign(v1: u32, u2: u32) -> f64 {
    if (v1 as u64 * u2 as u64) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn g_mul(x: &GrassElement, y: &GrassElement) -> GrassElement {
    let mut out = GrassElement::zero_with(x.g_max.min(y.g_max));
    out.truncated = x.truncated + y.truncated;
    for (&(u1, v1), &c1) in &x.terms {
        for (&(u2, v2), &c2) in &y.terms {
            let sign = monomial_product_sign(v1, u2);
            out.add_term(u1 + u2, v1 + v2, c1 * c2 * sign);
        }
    }
    out
}

pub fn g_parity(x: &GrassElement) -> Result<Parity, GrassError> {
    let mut it = x.terms.keys().map(|(u, v)| Parity::of_degree(u + v));
    let Some(first) = it.next() else {
        return Ok(Parity::Even);
    };
    if it.all(|p| p == first) {
        Ok(first)
    } else {
        Err(GrassError::MixedParity)
    }
}

/// `x^{-1/2}` for even `x` with positive real scalar part.
///
/// With `x = c(1 + t)` the series `c^{-1/2} Σ binom(-1/2, k) t^k` terminates: every
/// monomial of `t` has degree at least 2, so `t^k` vanishes above `g_max` once
/// `2k > g_max`. Even elements commute with one another, so the series behaves
/// like its commutative counterpart.
pub fn g_inv_sqrt_even(x: &GrassElement, g_max: u32) -> Result<GrassElement, GrassError> {
    if x.terms.keys().any(|(u, v)| (u + v) % 2 == 1) {
        return Err(GrassError::NotEven);
    }
    let c = x.scalar_part();
    if !(c.re > 0.0) || c.im.abs() > 1e-300_f64.max(c.re * 1e-15) {
        return Err(GrassError::NonPositiveScalar(c));
    }
    let x = x.with_g_max(g_max);
    let mut t = x.scale_real(1.0 / c.re);
    t.add_term(0, 0, Complex64::new(-1.0, 0.0));
    t.terms.remove(&(0, 0));

    let mut out = GrassElement::one().with_g_max(g_max);
    let mut power = GrassElement::one().with_g_max(g_max);
    let mut binom = 1.0;
    let mut k = 0u32;
    loop {
        power = g_mul(&power, &t);
        if power.is_zero() {
            break;
        }
        // binom(-1/2, k+1) = binom(-1/2, k) · (-1/2 - k)/(k + 1)
        binom *= (-0.5 - k as f64) / (k as f64 + 1.0);
        k += 1;
        out = &out + &power.scale_real(binom);
    }
    out.truncated = 0;
    Ok(out.scale_real(c.re.powf(-0.5)))
}

/// Scalar shadow: substitute ζ → `zeta` and ζ̄ → `conj(zeta)` in the canonical form.
pub fn g_reduce(x: &GrassElement, zeta: Complex64) -> Complex64 {
    let zb = zeta.conj();
    x.terms
        .iter()
        .map(|(&(u, v), &c)| c * zeta.powu(u) * zb.powu(v))
        .sum()
}

/// Parity of the permutation that stably sorts `word`: `(-1)^{inversions}`.
///
/// Applied to a word of odd symbols this is the sign of the reordering.
pub fn transposition_sign<T: Ord>(word: &[T]) -> f64 {
    if inversion_count(word) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn inversion_count<T: Ord>(word: &[T]) -> usize {
    let mut n = 0;
    for i in 0..word.len() {
        for j in i + 1..word.len() {
            if word[i] > word[j] {
                n += 1;
            }
        }
    }
    n
}

impl Add for &GrassElement {
    type Output = GrassElement;
    fn add(self, rhs: &GrassElement) -> GrassElement {
        let mut out = self.with_g_max(self.g_max.min(rhs.g_max));
        out.truncated = self.truncated + rhs.truncated;
        for (&(u, v), &c) in &rhs.terms {
            out.add_term(u, v, c);
        }
        out
    }
}

impl Add for GrassElement {
    type Output = GrassElement;
    fn add(self, rhs: GrassElement) -> GrassElement {
        &self + &rhs
    }
}

impl AddAssign<&GrassElement> for GrassElement {
    fn add_assign(&mut self, rhs: &GrassElement) {
        *self = &*self + rhs;
    }
}

impl Neg for &GrassElement {
    type Output = GrassElement;
    fn neg(self) -> GrassElement {
        self.scale_real(-1.0)
    }
}

impl Neg for GrassElement {
    type Output = GrassElement;
    fn neg(self) -> GrassElement {
        -&self
    }
}

impl Sub for &GrassElement {
    type Output = GrassElement;
    fn sub(self, rhs: &GrassElement) -> GrassElement {
        self + &(-rhs)
    }
}

impl Sub for GrassElement {
    type Output = GrassElement;
    fn sub(self, rhs: GrassElement) -> GrassElement {
        &self - &rhs
    }
}

impl Mul for &GrassElement {
    type Output = GrassElement;
    fn mul(self, rhs: &GrassElement) -> GrassElement {
        g_mul(self, rhs)
    }
}

impl Mul for GrassElement {
    type Output = GrassElement;
    fn mul(self, rhs: GrassElement) -> GrassElement {
        g_mul(&self, &rhs)
    }
}

fn fmt_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else {
        format!("({}{:+}i)", c.re, c.im)
    }
}

impl fmt::Display for GrassElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<_> = self.terms.keys().copied().collect();
        keys.sort_by_key(|&(u, v)| (u + v, std::cmp::Reverse(u)));
        for (i, (u, v)) in keys.into_iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", fmt_complex(self.terms[&(u, v)]))?;
            match u {
                0 => {}
                1 => write!(f, "·ζ")?,
                _ => write!(f, "·ζ^{u}")?,
            }
            match v {
                0 => {}
                1 => write!(f, "·ζ̄")?,
                _ => write!(f, "·ζ̄^{v}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GrassElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GrassElement({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn generator_products() {
        let z = GrassElement::zeta(8);
        let zb = GrassElement::zetabar(8);
        assert_eq!(g_mul(&z, &zb).coeff(1, 1), c(1.0));
        assert_eq!(g_mul(&zb, &z).coeff(1, 1), c(-1.0));
        assert_eq!(g_mul(&z, &z).coeff(2, 0), c(1.0));
        let tau = g_mul(&z, &zb);
        let tt = g_mul(&tau, &tau);
        assert_eq!(tt.coeff(2, 2), c(-1.0));
        assert_eq!(tt.terms().count(), 1);
    }

    #[test]
    fn parity_queries() {
        let z = GrassElement::zeta(8);
        let zb = GrassElement::zetabar(8);
        assert_eq!(g_parity(&z).unwrap(), Parity::Odd);
        assert_eq!(g_parity(&(&z * &zb)).unwrap(), Parity::Even);
        assert_eq!(g_parity(&z.pow(3)).unwrap(), Parity::Odd);
        assert_eq!(g_parity(&(&z + &GrassElement::one())), Err(GrassError::MixedParity));
    }

    #[test]
    fn truncation_is_counted() {
        let z = GrassElement::zeta(3);
        let z4 = z.pow(4);
        assert!(z4.is_zero());
        assert!(z4.truncated() > 0);
    }

    #[test]
    fn inv_sqrt_scalar() {
        let y = g_inv_sqrt_even(&GrassElement::real(4.0), 8).unwrap();
        assert_eq!(y, GrassElement::real(0.5).with_g_max(8));
    }

    #[test]
    fn inv_sqrt_series_coefficients() {
        let tau = &GrassElement::zeta(8) * &GrassElement::zetabar(8);
        let x = &GrassElement::one() + &tau;
        let y = g_inv_sqrt_even(&x, 8).unwrap();
        assert_eq!(y.coeff(1, 1), c(-0.5));
        // τ² = -ζ²ζ̄², so (3/8)τ² contributes -3/8 to (2,2)
        assert_eq!(y.coeff(2, 2), c(-0.375));
        let check = &(&y * &y) * &x;
        assert_eq!(check, GrassElement::one().with_g_max(8));
    }

    #[test]
    fn inv_sqrt_scaled() {
        let tau = &GrassElement::zeta(8) * &GrassElement::zetabar(8);
        let base = &GrassElement::one() + &tau;
        let y1 = g_inv_sqrt_even(&base, 8).unwrap();
        let y9 = g_inv_sqrt_even(&base.scale_real(9.0), 8).unwrap();
        let diff = &y9 - &y1.scale_real(1.0 / 3.0);
        assert!(diff.max_abs_coeff() < 1e-15);
        let check = &(&y9 * &y9) * &base.scale_real(9.0);
        assert!((&check - &GrassElement::one()).max_abs_coeff() < 1e-14);
    }

    #[test]
    fn inv_sqrt_errors() {
        assert_eq!(
            g_inv_sqrt_even(&GrassElement::zeta(8), 8),
            Err(GrassError::NotEven)
        );
        assert!(matches!(
            g_inv_sqrt_even(&GrassElement::real(-1.0), 8),
            Err(GrassError::NonPositiveScalar(_))
        ));
        assert!(matches!(
            g_inv_sqrt_even(&GrassElement::zero(), 8),
            Err(GrassError::NonPositiveScalar(_))
        ));
    }

    #[test]
    fn reduce_examples() {
        let z = GrassElement::zeta(8);
        let zb = GrassElement::zetabar(8);
        let v = g_reduce(&(&z * &zb), c(0.2));
        assert!((v - c(0.04)).norm() < 1e-16);
        let v = g_reduce(&(&zb * &z), c(0.2));
        assert!((v - c(-0.04)).norm() < 1e-16);
        assert_eq!(g_reduce(&GrassElement::one(), c(0.2)), c(1.0));
    }

    #[test]
    fn conjugation_reverses_products() {
        let z = GrassElement::zeta(8);
        let zb = GrassElement::zetabar(8);
        let x = &z.scale(Complex64::new(1.0, 2.0)) + &(&z * &zb).scale(Complex64::new(0.0, 3.0));
        let y = &zb.pow(2) + &z.scale(c(-1.5));
        assert_eq!((&x * &y).conj(), &y.conj() * &x.conj());
    }

    #[test]
    fn display_is_ordered() {
        let z = GrassElement::zeta(8);
        let zb = GrassElement::zetabar(8);
        let x = &(&(&z * &zb).scale_real(2.0) + &GrassElement::one()) + &z.pow(2);
        assert_eq!(x.to_string(), "1 + 1·ζ^2 + 2·ζ·ζ̄");
    }

    #[test]
    fn sign_lemma_by_counting() {
        // (ψF⁺)^m as a word of odd letters 1 = ψ, 2 = F⁺; sorting brings ψ^m (F⁺)^m.
        for m in 0..=20usize {
            let word: Vec<u8> = (0..m).flat_map(|_| [1u8, 2]).collect();
            let expected = if (m * (m.saturating_sub(1)) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(transposition_sign(&word), expected, "m={m}");
            let floor_half = if (m / 2) % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(floor_half, expected, "m={m}");
        }
    }
}
