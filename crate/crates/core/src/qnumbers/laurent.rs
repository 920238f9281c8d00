//! Exact Laurent polynomials in the formal symbol `s = q^{1/4}` over the rationals.
//!
//! Every q-power that appears in the deformed algebra (`q^{±N}`, `q^{M/4}`,
//! `q^{1/2}`) is an integer power of `s`, and both kinds of q-integers are
//! Laurent polynomials in `s`, so this ring is closed under everything the
//! symbolic engine needs.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{QError, QKind};

/// Laurent polynomial `Σ c_k s^k`, `c_k ∈ ℚ`, with no stored zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentCoeff {
    terms: BTreeMap<i32, BigRational>,
}

impl LaurentCoeff {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// `c · s^exp` for an integer `c`.
    pub fn monomial(c: i64, exp: i32) -> Self {
        Self::rational_monomial(BigRational::from_integer(BigInt::from(c)), exp)
    }

    pub fn rational_monomial(c: BigRational, exp: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Self { terms }
    }

    /// `s^exp`.
    pub fn s_pow(exp: i32) -> Self {
        Self::monomial(1, exp)
    }

    /// `q^k = s^{4k}`.
    pub fn q_pow(k: i32) -> Self {
        Self::monomial(1, 4 * k)
    }

    pub fn from_integer(c: i64) -> Self {
        Self::monomial(c, 0)
    }

    /// Bosonic or fermionic q-integer as an exact polynomial in `s`.
    ///
    /// Boson: `q^{n-1} + q^{n-3} + … + q^{1-n}`.
    /// Fermion: `(1 - (-q)^n)/(1 + q) = Σ_{j<n} (-q)^j`.
    pub fn q_int(kind: QKind, n: u32) -> Self {
        let n = n as i32;
        let mut out = Self::zero();
        match kind {
            QKind::Boson => {
                for j in 0..n {
                    out += Self::q_pow(n - 1 - 2 * j);
                }
            }
            QKind::Fermion => {
                for j in 0..n {
                    let sign = if j % 2 == 0 { 1 } else { -1 };
                    out += Self::monomial(sign, 4 * j);
                }
            }
        }
        out
    }

    pub fn q_factorial(kind: QKind, n: u32) -> Self {
        (1..=n).fold(Self::one(), |acc, k| &acc * &Self::q_int(kind, k))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    /// Iterate over `(exponent of s, coefficient)` in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &BigRational)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, exp: i32) -> BigRational {
        self.terms.get(&exp).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    /// Multiply by `s^k`.
    pub fn shift(&self, k: i32) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, v)| (e + k, v.clone())).collect(),
        }
    }

    fn add_term(&mut self, exp: i32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exp).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    /// Exact division in `ℚ[s, s^{-1}]`; `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        // Normalize both to ordinary polynomials, divide, then shift back.
        let d_lo = divisor.min_exp()?;
        let d_hi = divisor.max_exp()?;
        let lead = divisor.coeff(d_hi);
        let mut rem = self.clone();
        let mut quot = Self::zero();
        let lo = rem.min_exp()?;
        while let Some(r_hi) = rem.max_exp() {
            let deg = r_hi - d_hi;
            if r_hi - (d_hi - d_lo) < lo {
                break;
            }
            let c = rem.coeff(r_hi) / &lead;
            let step = divisor.scale(&c).shift(deg);
            quot.add_term(deg, c);
            rem = &rem - &step;
        }
        rem.is_zero().then_some(quot)
    }

    /// Evaluate at a numeric deformation parameter by substituting `s = q^{1/4}`.
    pub fn eval(&self, q: f64) -> Result<f64, QError> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(QError::Domain(format!(
                "Laurent evaluation needs q > 0, got {q}"
            )));
        }
        let s = q.powf(0.25);
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| {
                let p = q.powi(e.div_euclid(4)) * s.powi(e.rem_euclid(4));
                c.to_f64().unwrap_or(f64::NAN) * p
            })
            .sum())
    }

    /// Human-oriented rendering with exponents divisible by 4 regrouped as
    /// powers of `q`, e.g. `q^2 + 1 + q^-2` or `1 - q + s^2`.
    pub fn render_q(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let sym = symbol(*e);
            match (mag.is_one(), sym) {
                (true, None) => out.push('1'),
                (true, Some(s)) => out.push_str(&s),
                (false, None) => out.push_str(&mag.to_string()),
                (false, Some(s)) => {
                    out.push_str(&mag.to_string());
                    out.push('*');
                    out.push_str(&s);
                }
            }
        }
        out
    }
}

fn symbol(e: i32) -> Option<String> {
    match e {
        0 => None,
        4 => Some("q".to_string()),
        e if e % 4 == 0 => Some(format!("q^{}", e / 4)),
        1 => Some("s".to_string()),
        e => Some(format!("s^{e}")),
    }
}

impl fmt::Debug for LaurentCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentCoeff({})", self)
    }
}

/// Canonical rendering in the `s` ring: `c*s^k` terms in decreasing exponent order.
impl fmt::Display for LaurentCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            let mag = c.abs();
            if *e == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "s^{e}")?;
            } else {
                write!(f, "{mag}*s^{e}")?;
            }
        }
        Ok(())
    }
}

impl Add for &LaurentCoeff {
    type Output = LaurentCoeff;
    fn add(self, rhs: &LaurentCoeff) -> LaurentCoeff {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LaurentCoeff {
    type Output = LaurentCoeff;
    fn add(mut self, rhs: LaurentCoeff) -> LaurentCoeff {
        self += &rhs;
        self
    }
}

impl AddAssign<&LaurentCoeff> for LaurentCoeff {
    fn add_assign(&mut self, rhs: &LaurentCoeff) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl AddAssign for LaurentCoeff {
    fn add_assign(&mut self, rhs: LaurentCoeff) {
        *self += &rhs;
    }
}

impl Neg for &LaurentCoeff {
    type Output = LaurentCoeff;
    fn neg(self) -> LaurentCoeff {
        LaurentCoeff {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Neg for LaurentCoeff {
    type Output = LaurentCoeff;
    fn neg(self) -> LaurentCoeff {
        -&self
    }
}

impl Sub for &LaurentCoeff {
    type Output = LaurentCoeff;
    fn sub(self, rhs: &LaurentCoeff) -> LaurentCoeff {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl Sub for LaurentCoeff {
    type Output = LaurentCoeff;
    fn sub(self, rhs: LaurentCoeff) -> LaurentCoeff {
        &self - &rhs
    }
}

impl Mul for &LaurentCoeff {
    type Output = LaurentCoeff;
    fn mul(self, rhs: &LaurentCoeff) -> LaurentCoeff {
        let mut out = LaurentCoeff::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }
}

impl Mul for LaurentCoeff {
    type Output = LaurentCoeff;
    fn mul(self, rhs: LaurentCoeff) -> LaurentCoeff {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> LaurentCoeff {
        LaurentCoeff::q_pow(1)
    }

    #[test]
    fn eval_examples() {
        assert_eq!(q().eval(0.5).unwrap(), 0.5);
        let two_b = &LaurentCoeff::s_pow(4) + &LaurentCoeff::s_pow(-4);
        assert!((two_b.eval(0.5).unwrap() - 2.5).abs() < 1e-15);
        assert_eq!(LaurentCoeff::one().eval(0.37).unwrap(), 1.0);
        assert!(LaurentCoeff::one().eval(0.0).is_err());
        assert!(LaurentCoeff::one().eval(-1.0).is_err());
    }

    #[test]
    fn canonical_form_drops_zeros() {
        let a = &q() - &q();
        assert!(a.is_zero());
        assert_eq!(a, LaurentCoeff::zero());
        let b = &(&q() + &LaurentCoeff::one()) - &LaurentCoeff::one();
        assert_eq!(b, q());
        assert_eq!(b.terms().count(), 1);
    }

    #[test]
    fn fermion_q_int_small_cases() {
        // [3]_F = 1 - q + q^2
        let expect = &(&LaurentCoeff::one() - &q()) + &LaurentCoeff::q_pow(2);
        assert_eq!(LaurentCoeff::q_int(QKind::Fermion, 3), expect);
        assert!(LaurentCoeff::q_int(QKind::Fermion, 0).is_zero());
        assert!(LaurentCoeff::q_int(QKind::Boson, 1).is_one());
    }

    #[test]
    fn exact_division() {
        // (1 - q^2) / (1 + q) = 1 - q
        let num = &LaurentCoeff::one() - &LaurentCoeff::q_pow(2);
        let den = &LaurentCoeff::one() + &q();
        assert_eq!(num.div_exact(&den).unwrap(), &LaurentCoeff::one() - &q());
        // (q^3 - q^-3)/(q - q^-1) = [3]_B
        let num = &LaurentCoeff::q_pow(3) - &LaurentCoeff::q_pow(-3);
        let den = &q() - &LaurentCoeff::q_pow(-1);
        assert_eq!(
            num.div_exact(&den).unwrap(),
            LaurentCoeff::q_int(QKind::Boson, 3)
        );
        // 1 / (1 + q) is not a Laurent polynomial
        assert!(LaurentCoeff::one().div_exact(&den).is_none());
    }

    #[test]
    fn rendering() {
        let b3 = LaurentCoeff::q_int(QKind::Boson, 3);
        assert_eq!(b3.render_q(), "q^2 + 1 + q^-2");
        assert_eq!(b3.to_string(), "s^8 + 1 + s^-8");
        let f2 = LaurentCoeff::q_int(QKind::Fermion, 2);
        assert_eq!(f2.render_q(), "-q + 1");
        let half = LaurentCoeff::rational_monomial(
            BigRational::new(BigInt::from(-3), BigInt::from(2)),
            2,
        );
        assert_eq!(half.to_string(), "-3/2*s^2");
    }
}
