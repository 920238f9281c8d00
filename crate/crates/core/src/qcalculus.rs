//! q-derivatives, Jackson-type lattice integrals and the q-Euler moment checks.
//!
//! Two lattices are used. The bosonic one is dual to the symmetric derivative,
//!
//! `∫₀^ξ f d_B x = (1 - q²) ξ Σ_{k≥0} q^{2k} f(ξ q^{2k+1})`,
//!
//! which integrates `x` over `[0, 1]` to `1/[2]_B`. The fermionic one follows the
//! displacement `x → -qx` of the Fq-derivative,
//!
//! `∫₀^ξ f d_F x = (1 + q) ξ Σ_{k≥0} (-q)^k f(ξ (-q)^k)`,
//!
//! so that `∫₀^ξ D_F f d_F x = f(ξ) - f(0)` telescopes exactly.

use thiserror::Error;

use crate::qnumbers::{
    check_q, fermion_exp_continued, q_exp_real, q_factorial, q_int_unchecked, DeformParams,
    LaurentCoeff, QError, QKind,
};

pub const DEFAULT_LATTICE_DEPTH: usize = 256;
/// Relative level below which the Euler integrand counts as decayed.
pub const DECAY_THRESHOLD: f64 = 1e-14;
/// Number of consecutive scan points that must stay below the threshold.
const DECAY_WINDOW: usize = 8;
/// The ξ scan visits `2^{j/4}` for `j = 0..=XI_SCAN_STEPS`.
const XI_SCAN_STEPS: usize = 160;
/// Terms used for the bosonic kernel `exp_B(-x)` on the lattice.
const BOSON_KERNEL_TERMS: usize = 400;
pub const MAX_EULER_N: u32 = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CalcError {
    #[error(transparent)]
    Q(#[from] QError),
    #[error("difference quotient is singular at x = 0; pass a polynomial to get the limit")]
    RemovableSingularity,
    #[error("integrand is not finite at lattice point k = {k}, x = {x}: {value}")]
    NonFinite { k: usize, x: f64, value: f64 },
    #[error("upper limit xi = {xi} is below the required xi_min = {xi_min} for n = {n}")]
    XiTooSmall { xi: f64, xi_min: f64, n: u32 },
    #[error("invalid quadrature configuration: {0}")]
    Config(String),
}

/// A real function of one variable, optionally known to be a polynomial.
pub enum RealFn<'a> {
    Closure(&'a dyn Fn(f64) -> f64),
    /// Coefficients in increasing degree.
    Polynomial(&'a [f64]),
}

impl RealFn<'_> {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            RealFn::Closure(f) => f(x),
            RealFn::Polynomial(c) => c.iter().rev().fold(0.0, |acc, a| acc * x + a),
        }
    }
}

/// Fq-derivative `(f(x) - f(-qx)) / ((1 + q) x)`.
pub fn fq_derivative(f: &RealFn<'_>, x: f64, q: f64) -> Result<f64, CalcError> {
    check_q(q)?;
    if x == 0.0 {
        return match f {
            // D_F x^n = [n]_F x^{n-1}, so only the linear coefficient survives at 0
            RealFn::Polynomial(c) => Ok(c.get(1).copied().unwrap_or(0.0)),
            RealFn::Closure(_) => Err(CalcError::RemovableSingularity),
        };
    }
    Ok((f.eval(x) - f.eval(-q * x)) / ((1.0 + q) * x))
}

/// Symmetric derivative `(f(qx) - f(x/q)) / ((q - 1/q) x)`.
///
/// At `q = 1` the quotient degenerates; callers in the classical limit should
/// use the ordinary derivative instead.
pub fn sym_q_derivative(f: &RealFn<'_>, x: f64, q: f64) -> Result<f64, CalcError> {
    check_q(q)?;
    if q == 1.0 {
        return Err(QError::Domain("symmetric q-derivative is undefined at q = 1".into()).into());
    }
    if x == 0.0 {
        return match f {
            RealFn::Polynomial(c) => Ok(c.get(1).copied().unwrap_or(0.0)),
            RealFn::Closure(_) => Err(CalcError::RemovableSingularity),
        };
    }
    Ok((f.eval(q * x) - f.eval(x / q)) / ((q - 1.0 / q) * x))
}

/// Exact coefficient `c` with `D x^n = c · x^{n-1}`, obtained by dividing the
/// difference quotient of the monomial in Laurent arithmetic.
pub fn derivative_monomial_coeff(kind: QKind, n: u32) -> LaurentCoeff {
    let (num, den) = match kind {
        // (x^n - (-q x)^n) / ((1 + q) x)
        QKind::Fermion => {
            let sign = if n % 2 == 0 { -1 } else { 1 };
            (
                &LaurentCoeff::one() + &LaurentCoeff::monomial(sign, 4 * n as i32),
                &LaurentCoeff::one() + &LaurentCoeff::q_pow(1),
            )
        }
        // ((q x)^n - (x/q)^n) / ((q - 1/q) x)
        QKind::Boson => (
            &LaurentCoeff::q_pow(n as i32) - &LaurentCoeff::q_pow(-(n as i32)),
            &LaurentCoeff::q_pow(1) - &LaurentCoeff::q_pow(-1),
        ),
    };
    num.div_exact(&den)
        .expect("monomial difference quotient divides exactly")
}

/// Jackson lattice for one of the two bases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub xi: f64,
    pub lattice_depth: usize,
    pub base: QKind,
}

impl QuadratureConfig {
    pub fn new(base: QKind, xi: f64) -> Result<Self, CalcError> {
        Self::with_depth(base, xi, DEFAULT_LATTICE_DEPTH)
    }

    pub fn with_depth(base: QKind, xi: f64, lattice_depth: usize) -> Result<Self, CalcError> {
        if !(xi > 0.0) || !xi.is_finite() {
            return Err(CalcError::Config(format!("xi must be positive and finite, got {xi}")));
        }
        if lattice_depth == 0 {
            return Err(CalcError::Config("lattice_depth must be at least 1".into()));
        }
        Ok(Self {
            xi,
            lattice_depth,
            base,
        })
    }

    /// Lattice nodes and weights, in lattice order.
    pub fn nodes(&self, q: f64) -> Vec<(f64, f64)> {
        let xi = self.xi;
        match self.base {
            QKind::Boson => {
                let q2 = q * q;
                let mut w = (1.0 - q2) * xi;
                let mut x = xi * q;
                (0..self.lattice_depth)
                    .map(|_| {
                        let node = (x, w);
                        x *= q2;
                        w *= q2;
                        node
                    })
                    .collect()
            }
            QKind::Fermion => {
                let mut w = (1.0 + q) * xi;
                let mut x = xi;
                (0..self.lattice_depth)
                    .map(|_| {
                        let node = (x, w);
                        x *= -q;
                        w *= -q;
                        node
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralValue {
    pub value: f64,
    /// Magnitude of the last lattice term.
    pub truncation: f64,
}

pub fn q_integral(
    f: &dyn Fn(f64) -> f64,
    cfg: &QuadratureConfig,
    q: f64,
) -> Result<IntegralValue, CalcError> {
    check_q(q)?;
    if q == 1.0 {
        return Err(QError::Domain("Jackson lattice degenerates at q = 1".into()).into());
    }
    let mut sum = 0.0;
    let mut last = 0.0;
    for (k, (x, w)) in cfg.nodes(q).into_iter().enumerate() {
        let fx = f(x);
        if !fx.is_finite() {
            return Err(CalcError::NonFinite { k, x, value: fx });
        }
        last = w * fx;
        sum += last;
    }
    Ok(IntegralValue {
        value: sum,
        truncation: last.abs(),
    })
}

/// `exp(-x)` of the given kind, usable on the whole lattice.
///
/// The fermionic series only converges for `|x| < 1/(1+q)`; beyond that its
/// meromorphic continuation is used.
pub fn euler_kernel(kind: QKind, q: f64) -> Result<Box<dyn Fn(f64) -> f64>, CalcError> {
    check_q(q)?;
    match kind {
        QKind::Boson => {
            let p = DeformParams::new(q)?.with_series_terms(BOSON_KERNEL_TERMS)?;
            Ok(Box::new(move |x| {
                q_exp_real(QKind::Boson, -x, &p).unwrap_or(f64::NAN)
            }))
        }
        QKind::Fermion => Ok(Box::new(move |x| {
            fermion_exp_continued(-x, q).unwrap_or(f64::NAN)
        })),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayStatus {
    /// The integrand fell below the threshold; `xi_min` is where it did.
    Decays { xi_min: f64 },
    /// No such point on the scanned range; `best_xi` minimises the windowed
    /// relative magnitude of the integrand.
    NoDecay { best_xi: f64, best_ratio: f64 },
}

impl DecayStatus {
    pub fn xi(&self) -> f64 {
        match *self {
            DecayStatus::Decays { xi_min } => xi_min,
            DecayStatus::NoDecay { best_xi, .. } => best_xi,
        }
    }

    pub fn xi_min(&self) -> Option<f64> {
        match *self {
            DecayStatus::Decays { xi_min } => Some(xi_min),
            DecayStatus::NoDecay { .. } => None,
        }
    }
}

/// Scan `|x^n exp(-x)|` over `x = 2^{j/4}` for the smallest decayed upper limit.
pub fn xi_scan(kind: QKind, n: u32, q: f64) -> Result<DecayStatus, CalcError> {
    let kernel = euler_kernel(kind, q)?;
    let xs: Vec<f64> = (0..=XI_SCAN_STEPS)
        .map(|j| 2f64.powf(j as f64 / 4.0))
        .collect();
    let g: Vec<f64> = xs
        .iter()
        .map(|&x| (x.powi(n as i32) * kernel(x)).abs())
        .collect();
    let mut running = Vec::with_capacity(g.len());
    let mut m = 0.0f64;
    for &v in &g {
        m = if v.is_finite() { m.max(v) } else { f64::INFINITY };
        running.push(m);
    }
    let ratio = |i: usize| {
        if running[i] == 0.0 {
            0.0
        } else if g[i].is_finite() {
            g[i] / running[i]
        } else {
            f64::INFINITY
        }
    };
    let last_start = g.len() - DECAY_WINDOW;
    for j in 0..=last_start {
        if (j..j + DECAY_WINDOW).all(|i| ratio(i) <= DECAY_THRESHOLD) {
            return Ok(DecayStatus::Decays { xi_min: xs[j] });
        }
    }
    let (best, best_ratio) = (1..=last_start)
        .map(|j| {
            let w = (j..j + DECAY_WINDOW).map(ratio).fold(0.0, f64::max);
            (j, w)
        })
        .fold((0, f64::INFINITY), |acc, (j, w)| if w < acc.1 { (j, w) } else { acc });
    Ok(DecayStatus::NoDecay {
        best_xi: xs[best],
        best_ratio,
    })
}

/// How the upper limit of the Euler integrals is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XiChoice {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub lattice_depth: usize,
    pub xi: XiChoice,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            lattice_depth: DEFAULT_LATTICE_DEPTH,
            xi: XiChoice::Auto,
        }
    }
}

impl QuadratureSettings {
    /// Resolve to a concrete lattice for the moment `n` of the given kind.
    pub fn resolve(&self, kind: QKind, n: u32, q: f64) -> Result<(QuadratureConfig, DecayStatus), CalcError> {
        let status = xi_scan(kind, n, q)?;
        let xi = match self.xi {
            XiChoice::Auto => status.xi(),
            XiChoice::Fixed(xi) => xi,
        };
        Ok((QuadratureConfig::with_depth(kind, xi, self.lattice_depth)?, status))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerReport {
    pub kind: QKind,
    pub n: u32,
    pub q: f64,
    pub xi: f64,
    pub lattice_depth: usize,
    pub status: DecayStatus,
    /// `∫₀^ξ x^n exp(-x) d x` on the lattice of `kind`.
    pub lhs: f64,
    /// `[n]!` of `kind`.
    pub rhs: f64,
    pub rel_err: f64,
    pub truncation: f64,
    /// Large-ξ value of the fermionic lattice moment, `(-q)^{-n(n+1)/2} [n]_F!`.
    pub jackson_limit: Option<f64>,
}

impl EulerReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.rel_err <= tol
    }
}

/// Closed form of the fermionic lattice moment once the kernel has decayed:
/// integrating by parts on the `-q` lattice gives `(-q)^{-n(n+1)/2} [n]_F!`.
pub fn fermion_lattice_moment(n: u32, q: f64) -> f64 {
    let e = (n * (n + 1) / 2) as i32;
    (-q).powi(-e) * (1..=n).map(|k| q_int_unchecked(QKind::Fermion, k, q)).product::<f64>()
}

/// Compare the lattice moment of `x^n exp(-x)` with `[n]!`.
pub fn euler_check(kind: QKind, n: u32, q: f64, cfg: &QuadratureConfig) -> Result<EulerReport, CalcError> {
    check_q(q)?;
    if n > MAX_EULER_N {
        return Err(QError::Domain(format!("euler_check supports n ≤ {MAX_EULER_N}, got {n}")).into());
    }
    if cfg.base != kind {
        return Err(CalcError::Config(format!(
            "lattice base {} does not match kernel {}",
            cfg.base.label(),
            kind.label()
        )));
    }
    let status = xi_scan(kind, n, q)?;
    if let Some(xi_min) = status.xi_min() {
        if cfg.xi < xi_min {
            return Err(CalcError::XiTooSmall { xi: cfg.xi, xi_min, n });
        }
    }
    euler_moment(kind, n, q, cfg, status)
}

fn euler_moment(
    kind: QKind,
    n: u32,
    q: f64,
    cfg: &QuadratureConfig,
    status: DecayStatus,
) -> Result<EulerReport, CalcError> {
    let kernel = euler_kernel(kind, q)?;
    let integrand = |x: f64| x.powi(n as i32) * kernel(x);
    let lhs = q_integral(&integrand, cfg, q)?;
    let rhs = q_factorial(kind, n as i64, q)?;
    let rel_err = (lhs.value - rhs).abs() / rhs.abs();
    Ok(EulerReport {
        kind,
        n,
        q,
        xi: cfg.xi,
        lattice_depth: cfg.lattice_depth,
        status,
        lhs: lhs.value,
        rhs,
        rel_err,
        truncation: lhs.truncation,
        jackson_limit: (kind == QKind::Fermion).then(|| fermion_lattice_moment(n, q)),
    })
}

/// Euler check with the upper limit chosen by `settings`.
pub fn euler_check_auto(kind: QKind, n: u32, q: f64, settings: &QuadratureSettings) -> Result<EulerReport, CalcError> {
    let (cfg, _) = settings.resolve(kind, n, q)?;
    euler_check(kind, n, q, &cfg)
}
