//! q-supercoherent states `exp_B(z a⁺) exp_F(-ψ F⁺)|0⟩` on a truncated super-Fock
//! space: construction, normalization, overlaps, the eigenvalue property and the
//! resolution of unity.
//!
//! The fermionic label `ψ` is carried either formally, as `ζ e^{iθ}` in the
//! pseudo-Grassmann algebra, or as a complex number substituted for it (the scalar
//! shadow). Sign-sensitive statements are only meaningful in the formal mode.

use num_complex::Complex64;
use thiserror::Error;

use crate::grassmann::{g_inv_sqrt_even, g_mul, GrassElement, GrassError, DEFAULT_G_MAX};
use crate::qcalculus::{euler_check, CalcError, EulerReport, QuadratureSettings};
use crate::qnumbers::{fermion_exp_limit, q_exp, q_factorial, DeformParams, QError, QKind};
use crate::superfock::{operator_matrix, FockError, Generator, SignConvention, SuperFockSpace};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScsError {
    #[error(transparent)]
    Q(#[from] QError),
    #[error(transparent)]
    Grass(#[from] GrassError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error("quadrature failed for {kind} mode {n}: {source}")]
    Quadrature {
        kind: &'static str,
        n: u32,
        source: CalcError,
    },
    #[error("domain error: {0}")]
    Domain(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PsiMode {
    /// `ψ = ζ e^{iθ}` as a pseudo-Grassmann element.
    Formal { theta: f64 },
    /// Complex number substituted for `ψ`.
    Scalar(Complex64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScsLabel {
    pub z: Complex64,
    pub psi: PsiMode,
}

impl ScsLabel {
    pub fn formal(z: Complex64, theta: f64) -> Self {
        Self {
            z,
            psi: PsiMode::Formal { theta },
        }
    }

    pub fn scalar(z: Complex64, psi: Complex64) -> Self {
        Self {
            z,
            psi: PsiMode::Scalar(psi),
        }
    }

    /// Polar form of the boson label, `z = r e^{iφ}`.
    pub fn polar(&self) -> (f64, f64) {
        self.z.to_polar()
    }

    pub fn is_formal(&self) -> bool {
        matches!(self.psi, PsiMode::Formal { .. })
    }

    /// `ψ` as a Grassmann element (formal mode only).
    pub fn psi_element(&self, g_max: u32) -> Option<GrassElement> {
        match self.psi {
            PsiMode::Formal { theta } => Some(GrassElement::zeta(g_max).scale(Complex64::from_polar(1.0, theta))),
            PsiMode::Scalar(_) => None,
        }
    }

    pub fn psibar_element(&self, g_max: u32) -> Option<GrassElement> {
        self.psi_element(g_max).map(|p| p.conj())
    }

    fn check(&self, q: f64) -> Result<(), ScsError> {
        if !self.z.re.is_finite() || !self.z.im.is_finite() {
            return Err(ScsError::Domain(format!("boson label must be finite, got {}", self.z)));
        }
        if let PsiMode::Scalar(psi) = self.psi {
            let limit = fermion_exp_limit(q);
            if !(psi.norm() < limit) {
                return Err(ScsError::Domain(format!(
                    "scalar |psi| = {} must stay below {limit} for the fermionic exponential to converge",
                    psi.norm()
                )));
            }
        }
        Ok(())
    }
}

/// A number in the scalar shadow or a pseudo-Grassmann element.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar(Complex64),
    Formal(GrassElement),
}

impl Value {
    pub fn sub(&self, other: &Value) -> Result<Value, ScsError> {
        match (self, other) {
            (Value::Scalar(a), Value::Scalar(b)) => Ok(Value::Scalar(a - b)),
            (Value::Formal(a), Value::Formal(b)) => Ok(Value::Formal(a - b)),
            _ => Err(ScsError::Domain("cannot mix scalar and formal values".into())),
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            Value::Scalar(c) => c.norm(),
            Value::Formal(g) => g.max_abs_coeff(),
        }
    }

    /// Largest coefficient in Grassmann degree `d`; the scalar shadow counts as degree 0.
    pub fn max_abs_in_degree(&self, d: u32) -> f64 {
        match self {
            Value::Scalar(c) if d == 0 => c.norm(),
            Value::Scalar(_) => 0.0,
            Value::Formal(g) => g.max_abs_in_degree(d),
        }
    }

    pub fn as_scalar(&self) -> Option<Complex64> {
        match self {
            Value::Scalar(c) => Some(*c),
            Value::Formal(_) => None,
        }
    }

    pub fn as_formal(&self) -> Option<&GrassElement> {
        match self {
            Value::Formal(g) => Some(g),
            Value::Scalar(_) => None,
        }
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Scalar(c) => write!(f, "{c}"),
            Value::Formal(g) => write!(f, "{g}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    Scalar(Vec<Complex64>),
    Formal(Vec<GrassElement>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScsState {
    pub space: SuperFockSpace,
    pub label: ScsLabel,
    pub coeffs: Coefficients,
    pub normalized: bool,
    pub g_max: u32,
}

impl ScsState {
    pub fn coeff(&self, n: usize, m: usize) -> Value {
        let i = self.space.index(n, m);
        match &self.coeffs {
            Coefficients::Scalar(v) => Value::Scalar(v[i]),
            Coefficients::Formal(v) => Value::Formal(v[i].clone()),
        }
    }
}

/// `(-1)^{⌊m/2⌋ + m}`.
pub fn scs_sign(m: usize) -> f64 {
    if (m / 2 + m) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn factorial_sqrt(kind: QKind, n: usize, q: f64) -> f64 {
    q_factorial(kind, n as i64, q).expect("validated q").sqrt()
}

pub fn scs_build(label: &ScsLabel, space: &SuperFockSpace, normalize: bool) -> Result<ScsState, ScsError> {
    scs_build_with(label, space, normalize, DEFAULT_G_MAX)
}

/// Coefficients `c_{n,m} = (-1)^{⌊m/2⌋+m} z^n ψ^m / √([n]_B! [m]_F!)`, times the
/// normalization factor when requested. In the formal mode the factor sits to the
/// right of `ψ^m`: `ψ̄ψ` anticommutes with `ψ`, so only that placement keeps
/// `F|Ψ⟩ = ψ|Ψ⟩` for the normalized state. Where `[m]_F!` vanishes (`q = 1`,
/// `m ≥ 2`) the coefficient is zero, matching the nilpotent expansion.
pub fn scs_build_with(
    label: &ScsLabel,
    space: &SuperFockSpace,
    normalize: bool,
    g_max: u32,
) -> Result<ScsState, ScsError> {
    let q = space.q();
    label.check(q)?;
    let amp = |n: usize, m: usize| -> f64 {
        let d = factorial_sqrt(QKind::Boson, n, q) * factorial_sqrt(QKind::Fermion, m, q);
        if d == 0.0 {
            0.0
        } else {
            scs_sign(m) / d
        }
    };
    let coeffs = match label.psi {
        PsiMode::Scalar(psi) => {
            let norm = if normalize {
                scs_normalization(label, q, g_max)?.as_scalar().expect("scalar mode")
            } else {
                Complex64::new(1.0, 0.0)
            };
            let mut v = vec![Complex64::new(0.0, 0.0); space.dim()];
            for n in 0..space.nb() {
                for m in 0..space.mf() {
                    v[space.index(n, m)] = norm * label.z.powu(n as u32) * psi.powu(m as u32) * amp(n, m);
                }
            }
            Coefficients::Scalar(v)
        }
        PsiMode::Formal { .. } => {
            let psi = label.psi_element(g_max).expect("formal mode");
            let norm = if normalize {
                scs_normalization(label, q, g_max)?.as_formal().expect("formal mode").clone()
            } else {
                GrassElement::one().with_g_max(g_max)
            };
            let mut psi_pow = vec![GrassElement::one().with_g_max(g_max)];
            for m in 1..space.mf() {
                psi_pow.push(g_mul(&psi_pow[m - 1], &psi));
            }
            let mut v = vec![GrassElement::zero_with(g_max); space.dim()];
            for n in 0..space.nb() {
                let zn = label.z.powu(n as u32);
                for m in 0..space.mf() {
                    v[space.index(n, m)] = g_mul(&psi_pow[m], &norm).scale(zn * amp(n, m));
                }
            }
            Coefficients::Formal(v)
        }
    };
    Ok(ScsState {
        space: *space,
        label: *label,
        coeffs,
        normalized: normalize,
        g_max,
    })
}

fn exp_b(x: Complex64, q: f64) -> Result<Complex64, ScsError> {
    Ok(q_exp(QKind::Boson, x, &DeformParams::new(q)?)?.value)
}

fn exp_f_scalar(x: Complex64, q: f64) -> Result<Complex64, ScsError> {
    Ok(q_exp(QKind::Fermion, x, &DeformParams::new(q)?)?.value)
}

/// `Σ_k x^k / [k]_F!` for a nilpotent-free even Grassmann element, truncated by `g_max`.
pub fn exp_f_formal(x: &GrassElement, q: f64, g_max: u32) -> GrassElement {
    let x = x.with_g_max(g_max);
    let mut out = GrassElement::one().with_g_max(g_max);
    let mut power = GrassElement::one().with_g_max(g_max);
    let mut k = 0u32;
    loop {
        k += 1;
        power = g_mul(&power, &x);
        if power.is_zero() {
            break;
        }
        let f = q_factorial(QKind::Fermion, k as i64, q).expect("validated q");
        if f == 0.0 {
            break;
        }
        out = &out + &power.scale_real(1.0 / f);
    }
    out
}

/// `N = (exp_B(z̄z) exp_F(ψ̄ψ))^{-1/2}`.
pub fn scs_normalization(label: &ScsLabel, q: f64, g_max: u32) -> Result<Value, ScsError> {
    label.check(q)?;
    let eb = exp_b(Complex64::new(label.z.norm_sqr(), 0.0), q)?;
    match label.psi {
        PsiMode::Scalar(psi) => {
            let ef = exp_f_scalar(Complex64::new(psi.norm_sqr(), 0.0), q)?;
            Ok(Value::Scalar((eb * ef).powf(-0.5)))
        }
        PsiMode::Formal { .. } => {
            let psi = label.psi_element(g_max).expect("formal");
            let psibar = label.psibar_element(g_max).expect("formal");
            let ef = exp_f_formal(&g_mul(&psibar, &psi), q, g_max);
            Ok(Value::Formal(g_inv_sqrt_even(&ef.scale(eb), g_max)?))
        }
    }
}

/// `⟨Ψ₁|Ψ₂⟩ = Σ c̄₁ c₂` with Grassmann conjugation in the formal mode.
pub fn inner(a: &ScsState, b: &ScsState) -> Result<Value, ScsError> {
    match (&a.coeffs, &b.coeffs) {
        (Coefficients::Scalar(x), Coefficients::Scalar(y)) => {
            Ok(Value::Scalar(x.iter().zip(y).map(|(u, v)| u.conj() * v).sum()))
        }
        (Coefficients::Formal(x), Coefficients::Formal(y)) => {
            let g = a.g_max.min(b.g_max);
            let mut acc = GrassElement::zero_with(g);
            for (u, v) in x.iter().zip(y) {
                acc = &acc + &g_mul(&u.conj(), v);
            }
            Ok(Value::Formal(acc))
        }
        _ => Err(ScsError::Domain("overlap of a formal and a scalar state".into())),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapReport {
    /// Truncated inner product of the normalized states.
    pub direct: Value,
    /// `N₁ N₂ exp_B(z̄₁ z₂) exp_F(ψ̄₁ ψ₂)`.
    pub closed: Value,
    pub difference: Value,
}

pub fn scs_overlap(l1: &ScsLabel, l2: &ScsLabel, space: &SuperFockSpace) -> Result<OverlapReport, ScsError> {
    scs_overlap_with(l1, l2, space, DEFAULT_G_MAX)
}

pub fn scs_overlap_with(
    l1: &ScsLabel,
    l2: &ScsLabel,
    space: &SuperFockSpace,
    g_max: u32,
) -> Result<OverlapReport, ScsError> {
    if l1.is_formal() != l2.is_formal() {
        return Err(ScsError::Domain("labels mix formal and scalar modes".into()));
    }
    let q = space.q();
    let s1 = scs_build_with(l1, space, true, g_max)?;
    let s2 = scs_build_with(l2, space, true, g_max)?;
    let direct = inner(&s1, &s2)?;
    let eb = exp_b(l1.z.conj() * l2.z, q)?;
    let closed = match (l1.psi, l2.psi) {
        (PsiMode::Scalar(p1), PsiMode::Scalar(p2)) => {
            let n1 = scs_normalization(l1, q, g_max)?.as_scalar().expect("scalar");
            let n2 = scs_normalization(l2, q, g_max)?.as_scalar().expect("scalar");
            Value::Scalar(n1 * n2 * eb * exp_f_scalar(p1.conj() * p2, q)?)
        }
        _ => {
            let n1 = scs_normalization(l1, q, g_max)?;
            let n2 = scs_normalization(l2, q, g_max)?;
            let arg = g_mul(&l1.psibar_element(g_max).expect("formal"), &l2.psi_element(g_max).expect("formal"));
            let ef = exp_f_formal(&arg, q, g_max);
            let nn = g_mul(n1.as_formal().expect("formal"), n2.as_formal().expect("formal"));
            Value::Formal(g_mul(&nn, &ef).scale(eb))
        }
    };
    let difference = direct.sub(&closed)?;
    Ok(OverlapReport {
        direct,
        closed,
        difference,
    })
}

/// Which annihilator an eigen residual refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Annihilator {
    A,
    F,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenResidual {
    /// Residual on levels below the top of the relevant sector.
    pub interior: f64,
    /// Residual on the top level, where the truncation drops the next coefficient.
    pub boundary: f64,
}

/// Size of `(X - λ)|Ψ⟩` with `λ = z` for `a` and `λ = ψ` for `F`.
///
/// Scalar states use the Euclidean norm. Formal states use the largest Grassmann
/// coefficient; `ψ` multiplies coefficients from the left and operators pass the
/// coefficients according to `convention`.
pub fn eigen_residual(state: &ScsState, gen: Annihilator, convention: SignConvention) -> Result<EigenResidual, ScsError> {
    let space = &state.space;
    let top = |i: usize| {
        let (n, m) = space.coords(i);
        match gen {
            Annihilator::A => n + 1 == space.nb(),
            Annihilator::F => m + 1 == space.mf(),
        }
    };
    let g = match gen {
        Annihilator::A => Generator::A,
        Annihilator::F => Generator::F,
    };
    let x = operator_matrix(g, space);
    let mut interior = 0.0f64;
    let mut boundary = 0.0f64;
    match &state.coeffs {
        Coefficients::Scalar(v) => {
            let lambda = match (gen, state.label.psi) {
                (Annihilator::A, _) => state.label.z,
                (Annihilator::F, PsiMode::Scalar(p)) => p,
                (Annihilator::F, PsiMode::Formal { .. }) => unreachable!("scalar coefficients"),
            };
            let xv = x.apply(v);
            let (mut si, mut sb) = (0.0, 0.0);
            for (i, (a, b)) in xv.iter().zip(v).enumerate() {
                let r = (a - lambda * b).norm_sqr();
                if top(i) {
                    sb += r;
                } else {
                    si += r;
                }
            }
            interior = f64::sqrt(si);
            boundary = f64::sqrt(sb);
        }
        Coefficients::Formal(v) => {
            let xv = x.to_graded().apply_graded(v, space, convention)?;
            let lambda = match gen {
                Annihilator::A => GrassElement::scalar(state.label.z),
                Annihilator::F => state.label.psi_element(state.g_max).expect("formal"),
            };
            for (i, (a, b)) in xv.iter().zip(v).enumerate() {
                let r = (a - &g_mul(&lambda, b)).max_abs_coeff();
                if top(i) {
                    boundary = boundary.max(r);
                } else {
                    interior = interior.max(r);
                }
            }
        }
    }
    Ok(EigenResidual { interior, boundary })
}

/// Radial moments `∫ x^n exp(-x) d x / [n]!` for both sectors, one Euler check per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialMoments {
    pub boson: Vec<EulerReport>,
    pub fermion: Vec<EulerReport>,
}

impl RadialMoments {
    pub fn compute(q: f64, nb: usize, mf: usize, settings: &QuadratureSettings) -> Result<Self, ScsError> {
        let one = |kind: QKind, n: usize| -> Result<EulerReport, ScsError> {
            let wrap = |source: CalcError| ScsError::Quadrature {
                kind: kind.label(),
                n: n as u32,
                source,
            };
            let (cfg, _) = settings.resolve(kind, n as u32, q).map_err(wrap)?;
            euler_check(kind, n as u32, q, &cfg).map_err(wrap)
        };
        Ok(Self {
            boson: (0..nb).map(|n| one(QKind::Boson, n)).collect::<Result<_, _>>()?,
            fermion: (0..mf).map(|m| one(QKind::Fermion, m)).collect::<Result<_, _>>()?,
        })
    }

    pub fn boson_ratio(&self, n: usize) -> f64 {
        self.boson[n].lhs / self.boson[n].rhs
    }

    pub fn fermion_ratio(&self, m: usize) -> f64 {
        self.fermion[m].lhs / self.fermion[m].rhs
    }
}

/// Prefactor of the weight function times the measure normalization, with the
/// two angular integrals `∫₀^{2π} dφ = ∫₀^{2π} dθ = 2π` on the diagonal.
pub fn completeness_prefactor(q: f64) -> f64 {
    let two_b = crate::qnumbers::q_int_unchecked(QKind::Boson, 2, q);
    let two_pi = 2.0 * std::f64::consts::PI;
    (two_b / (two_pi * two_pi)) * (1.0 / two_b) * (two_pi * two_pi)
}

/// Exact angular integral `(1/2π)∫ e^{i(n-n')φ} dφ`.
pub fn angular_delta(n: usize, n2: usize) -> f64 {
    if n == n2 {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletenessRow {
    pub n: usize,
    pub m: usize,
    pub diagonal: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletenessReport {
    pub q: f64,
    pub nb: usize,
    pub mf: usize,
    pub rows: Vec<CompletenessRow>,
    pub max_deviation: f64,
    /// Largest off-diagonal entry; the angular deltas make it exactly zero.
    pub max_offdiagonal: f64,
    pub moments: RadialMoments,
}

impl CompletenessReport {
    pub fn diagonal(&self, n: usize, m: usize) -> f64 {
        self.rows[n * self.mf + m].diagonal
    }
}

/// Resolve the identity mode by mode: angular integrals are exact deltas and the
/// radial parts are the Euler moments of each sector.
pub fn completeness_check(
    q: f64,
    space: &SuperFockSpace,
    settings: &QuadratureSettings,
) -> Result<CompletenessReport, ScsError> {
    if (space.q() - q).abs() > 0.0 {
        return Err(ScsError::Domain(format!("space has q = {}, check requested q = {q}", space.q())));
    }
    let moments = RadialMoments::compute(q, space.nb(), space.mf(), settings)?;
    let pre = completeness_prefactor(q);
    let mut rows = Vec::with_capacity(space.dim());
    let mut max_deviation = 0.0f64;
    for n in 0..space.nb() {
        for m in 0..space.mf() {
            let d = pre * moments.boson_ratio(n) * moments.fermion_ratio(m);
            let dev = (d - 1.0).abs();
            max_deviation = max_deviation.max(if dev.is_nan() { f64::INFINITY } else { dev });
            rows.push(CompletenessRow {
                n,
                m,
                diagonal: d,
                deviation: dev,
            });
        }
    }
    let mut max_offdiagonal = 0.0f64;
    for i in 0..space.dim() {
        for j in 0..space.dim() {
            if i == j {
                continue;
            }
            let (n, m) = space.coords(i);
            let (n2, m2) = space.coords(j);
            let delta = angular_delta(n, n2) * angular_delta(m, m2);
            if delta != 0.0 {
                max_offdiagonal = f64::INFINITY;
            }
        }
    }
    Ok(CompletenessReport {
        q,
        nb: space.nb(),
        mf: space.mf(),
        rows,
        max_deviation,
        max_offdiagonal,
        moments,
    })
}

/// Target for [`reproduce`].
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Basis(usize, usize),
    State(ScsState),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReproduceReport {
    /// `max |Σ D c - c|` over coefficients.
    pub residual: f64,
    pub target_norm: f64,
}

/// Expand `target` through the resolved identity and compare coefficients.
pub fn reproduce(target: &Target, report: &CompletenessReport) -> Result<ReproduceReport, ScsError> {
    let dim = report.nb * report.mf;
    let coeffs: Vec<Complex64> = match target {
        Target::Basis(n, m) => {
            if *n >= report.nb || *m >= report.mf {
                return Err(ScsError::Domain(format!("basis target |{n},{m}⟩ outside truncation")));
            }
            let mut v = vec![Complex64::new(0.0, 0.0); dim];
            v[n * report.mf + m] = Complex64::new(1.0, 0.0);
            v
        }
        Target::State(s) => {
            if s.space.nb() != report.nb || s.space.mf() != report.mf || s.space.q() != report.q {
                return Err(ScsError::Domain("target state lives on a different space".into()));
            }
            match &s.coeffs {
                Coefficients::Scalar(v) => v.clone(),
                Coefficients::Formal(_) => {
                    return Err(ScsError::Domain("reproduce takes scalar-mode states".into()))
                }
            }
        }
    };
    let mut residual = 0.0f64;
    for (i, c) in coeffs.iter().enumerate() {
        let r = (c * report.rows[i].diagonal - c).norm();
        residual = residual.max(if r.is_nan() { f64::INFINITY } else { r });
    }
    Ok(ReproduceReport {
        residual,
        target_norm: coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt(),
    })
}
