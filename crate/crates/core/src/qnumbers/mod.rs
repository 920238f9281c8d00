//! Bosonic and fermionic q-integers, q-factorials and the two q-exponential series.
//!
//! The bosonic q-number is the symmetric one, `[n]_B = (q^n - q^{-n})/(q - q^{-1})`,
//! and the fermionic one is `[n]_F = (1 - (-q)^n)/(1 + q)`. They follow different
//! conventions and are deliberately not unified.

mod laurent;

pub use laurent::LaurentCoeff;

use num_complex::Complex64;
use thiserror::Error;

/// Which oscillator family a q-number or q-exponential belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QKind {
    Boson,
    Fermion,
}

impl QKind {
    pub fn label(self) -> &'static str {
        match self {
            QKind::Boson => "boson",
            QKind::Fermion => "fermion",
        }
    }
}

impl std::str::FromStr for QKind {
    type Err = QError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "boson" | "b" | "B" => Ok(QKind::Boson),
            "fermion" | "f" | "F" => Ok(QKind::Fermion),
            other => Err(QError::Domain(format!("unknown kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("fermionic q-exponential diverges at |x| = {abs_x} (radius of convergence {radius}, numeric limit {limit})")]
    Convergence { abs_x: f64, radius: f64, limit: f64 },
}

pub const DEFAULT_SERIES_TERMS: usize = 64;
pub const DEFAULT_TOL: f64 = 1e-10;

/// Deformation parameter plus the numeric knobs shared by the series code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformParams {
    q: f64,
    series_terms: usize,
    tol: f64,
}

impl DeformParams {
    /// `0 < q ≤ 1`; `q = 1` puts the parameters in the classical limit mode.
    pub fn new(q: f64) -> Result<Self, QError> {
        check_q(q)?;
        Ok(Self {
            q,
            series_terms: DEFAULT_SERIES_TERMS,
            tol: DEFAULT_TOL,
        })
    }

    pub fn with_series_terms(mut self, terms: usize) -> Result<Self, QError> {
        if terms == 0 {
            return Err(QError::Domain("series_terms must be at least 1".into()));
        }
        self.series_terms = terms;
        Ok(self)
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self, QError> {
        if !(tol >= 0.0) {
            return Err(QError::Domain(format!("tolerance must be nonnegative, got {tol}")));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// The quarter power `s = q^{1/4}` in which every symbolic coefficient lives.
    pub fn s(&self) -> f64 {
        self.q.powf(0.25)
    }

    pub fn series_terms(&self) -> usize {
        self.series_terms
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// At `q = 1` fermionic factorials vanish for `m ≥ 2` (ordinary nilpotent fermions).
    pub fn is_limit(&self) -> bool {
        self.q == 1.0
    }
}

pub(crate) fn check_q(q: f64) -> Result<(), QError> {
    if q > 0.0 && q <= 1.0 {
        Ok(())
    } else {
        Err(QError::Domain(format!("deformation q must lie in (0, 1], got {q}")))
    }
}

/// `[n]` of the requested kind.
///
/// The bosonic value is summed as `q^{n-1} + q^{n-3} + … + q^{1-n}`, which stays
/// finite at `q = 1` where the ratio form is `0/0`.
pub fn q_int(kind: QKind, n: i64, q: f64) -> Result<f64, QError> {
    check_q(q)?;
    if n < 0 {
        return Err(QError::Domain(format!("q-integer index must be nonnegative, got {n}")));
    }
    Ok(q_int_unchecked(kind, n as u32, q))
}

pub(crate) fn q_int_unchecked(kind: QKind, n: u32, q: f64) -> f64 {
    match kind {
        QKind::Boson => {
            let n = n as i32;
            (0..n).map(|j| q.powi(n - 1 - 2 * j)).sum()
        }
        QKind::Fermion => (1.0 - (-q).powi(n as i32)) / (1.0 + q),
    }
}

/// Ratio form of the bosonic q-integer, only meaningful for `q < 1`.
pub fn boson_q_int_ratio(n: u32, q: f64) -> f64 {
    let n = n as i32;
    (q.powi(n) - q.powi(-n)) / (q - 1.0 / q)
}

pub fn q_factorial(kind: QKind, n: i64, q: f64) -> Result<f64, QError> {
    check_q(q)?;
    if n < 0 {
        return Err(QError::Domain(format!("q-factorial index must be nonnegative, got {n}")));
    }
    Ok((1..=n as u32).map(|k| q_int_unchecked(kind, k, q)).product())
}

/// Substitute `s = q^{1/4}` into an exact coefficient.
pub fn laurent_eval(c: &LaurentCoeff, q: f64) -> Result<f64, QError> {
    c.eval(q)
}

/// A truncated series value together with a bound on the discarded tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    /// Upper bound on `|Σ_{k > terms} x^k / [k]!|`; infinite when no bound is available.
    pub tail_bound: f64,
    pub terms: usize,
}

/// Numeric radius of the fermionic series is enforced at `0.9/(1+q)`.
pub fn fermion_exp_limit(q: f64) -> f64 {
    0.9 / (1.0 + q)
}

/// `Σ_{k=0}^{series_terms} x^k / [k]!` for either kind.
///
/// The bosonic series is entire. The fermionic one has radius `1/(1+q)`, since
/// `[k]_F → 1/(1+q)`; arguments beyond `0.9/(1+q)` are rejected (use
/// [`q_exp_coefficients`] for the formal series or [`fermion_exp_continued`] for
/// the meromorphic continuation). At `q = 1` the fermionic exponential is `1 + x`.
pub fn q_exp(kind: QKind, x: Complex64, params: &DeformParams) -> Result<SeriesValue, QError> {
    let q = params.q();
    let n_terms = params.series_terms();
    let ax = x.norm();
    if !ax.is_finite() {
        return Err(QError::Domain(format!("q-exponential argument must be finite, got {x}")));
    }
    if kind == QKind::Fermion {
        if params.is_limit() {
            return Ok(SeriesValue {
                value: Complex64::new(1.0, 0.0) + x,
                tail_bound: 0.0,
                terms: 1,
            });
        }
        let limit = fermion_exp_limit(q);
        if ax > limit {
            return Err(QError::Convergence {
                abs_x: ax,
                radius: 1.0 / (1.0 + q),
                limit,
            });
        }
    }

    // [k+1]_B = q[k]_B + q^{-k} adds positive terms; [k+1]_F = 1 - q[k]_F contracts.
    let mut qi = 0.0;
    let mut q_neg_k = 1.0;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for _ in 1..=n_terms {
        qi = match kind {
            QKind::Boson => {
                let next = q * qi + q_neg_k;
                q_neg_k /= q;
                next
            }
            QKind::Fermion => 1.0 - q * qi,
        };
        term = term * x / qi;
        sum += term;
    }
    let next = term * x / q_int_unchecked(kind, n_terms as u32 + 1, q);
    let ratio = match kind {
        // [k]_B grows with k, so the ratio bound at k = N+2 holds for every later term.
        QKind::Boson => ax / q_int_unchecked(QKind::Boson, n_terms as u32 + 2, q),
        // [k]_F ≥ (1 - q^{k})/(1+q) ≥ (1 - q^{N+1})/(1+q) for k ≥ N+1.
        QKind::Fermion => ax * (1.0 + q) / (1.0 - q.powi(n_terms as i32 + 1)),
    };
    let tail_bound = if ratio < 1.0 {
        next.norm() / (1.0 - ratio)
    } else {
        f64::INFINITY
    };
    Ok(SeriesValue {
        value: sum,
        tail_bound,
        terms: n_terms,
    })
}

/// Real-argument convenience wrapper around [`q_exp`].
pub fn q_exp_real(kind: QKind, x: f64, params: &DeformParams) -> Result<f64, QError> {
    q_exp(kind, Complex64::new(x, 0.0), params).map(|v| v.value.re)
}

/// Formal mode: the coefficient sequence `1/[k]!` for `k = 0..=series_terms`.
///
/// At `q = 1` the fermionic coefficients vanish from `k = 2` on.
pub fn q_exp_coefficients(kind: QKind, params: &DeformParams) -> Vec<f64> {
    let q = params.q();
    let mut out = Vec::with_capacity(params.series_terms() + 1);
    let mut fact = 1.0;
    out.push(1.0);
    for k in 1..=params.series_terms() {
        fact *= q_int_unchecked(kind, k as u32, q);
        out.push(if fact == 0.0 { 0.0 } else { 1.0 / fact });
    }
    out
}

/// Meromorphic continuation of the fermionic q-exponential beyond its disc:
/// `1 / Π_{j≥0} (1 - (1+q)·x·(-q)^j)`. Agrees with the series for `|x| < 1/(1+q)`.
pub fn fermion_exp_continued(x: f64, q: f64) -> Result<f64, QError> {
    check_q(q)?;
    if q == 1.0 {
        return Ok(1.0 + x);
    }
    let mut prod = 1.0;
    let mut factor = (1.0 + q) * x;
    while factor.abs() > 1e-18 {
        prod *= 1.0 - factor;
        factor *= -q;
    }
    Ok(1.0 / prod)
}
