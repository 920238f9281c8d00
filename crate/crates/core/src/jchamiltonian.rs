//! The q-deformed Jaynes–Cummings Hamiltonian
//! `H = 2ω₁ a⁺a + 2ω₂ q^{1/2} F⁺F + ψ aF⁺ + a⁺F ψ̄` on a truncated super-Fock space.
//!
//! With a Grassmann coupling the matrix has odd entries and only representation
//! statements make sense; spectra are computed with a complex coupling `g` in
//! place of `ψ`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

use crate::grassmann::{g_mul, GrassElement, DEFAULT_G_MAX};
use crate::qcalculus::QuadratureSettings;
use crate::qnumbers::{q_exp, DeformParams, QKind};
use crate::qscs::{
    exp_f_formal, inner, scs_build_with, scs_normalization, Coefficients, PsiMode, RadialMoments, ScsError, ScsLabel,
    ScsState, Value,
};
use crate::superfock::{build_space, operator_matrix, FockError, Generator, OperatorMatrix, SignConvention, SuperFockSpace};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JcError {
    #[error(transparent)]
    Scs(#[from] ScsError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error("domain error: {0}")]
    Domain(String),
}

impl From<crate::qnumbers::QError> for JcError {
    fn from(e: crate::qnumbers::QError) -> Self {
        JcError::Scs(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    /// `ψ = ζ e^{iθ}`, odd.
    Grassmann { theta: f64 },
    /// Complex `g` substituted for `ψ`.
    Scalar(Complex64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub omega1: f64,
    pub omega2: f64,
    pub coupling: Coupling,
    pub q: f64,
}

impl ModelParams {
    pub fn scalar(omega1: f64, omega2: f64, g: Complex64, q: f64) -> Self {
        Self {
            omega1,
            omega2,
            coupling: Coupling::Scalar(g),
            q,
        }
    }

    pub fn grassmann(omega1: f64, omega2: f64, theta: f64, q: f64) -> Self {
        Self {
            omega1,
            omega2,
            coupling: Coupling::Grassmann { theta },
            q,
        }
    }

    fn check(&self, space: &SuperFockSpace) -> Result<(), JcError> {
        if space.q() != self.q {
            return Err(JcError::Domain(format!(
                "space has q = {}, model has q = {}",
                space.q(),
                self.q
            )));
        }
        if !self.omega1.is_finite() || !self.omega2.is_finite() {
            return Err(JcError::Domain("frequencies must be finite reals".into()));
        }
        Ok(())
    }

    /// Diagonal entry `2ω₁[n]_B + 2ω₂ q^{1/2} [m]_F`.
    pub fn free_energy(&self, n: usize, m: usize) -> f64 {
        let nb = crate::qnumbers::q_int_unchecked(QKind::Boson, n as u32, self.q);
        let mf = crate::qnumbers::q_int_unchecked(QKind::Fermion, m as u32, self.q);
        2.0 * self.omega1 * nb + 2.0 * self.omega2 * self.q.sqrt() * mf
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Hamiltonian {
    Scalar(OperatorMatrix<Complex64>),
    Graded(OperatorMatrix<GrassElement>),
}

impl Hamiltonian {
    pub fn as_scalar(&self) -> Option<&OperatorMatrix<Complex64>> {
        match self {
            Hamiltonian::Scalar(h) => Some(h),
            Hamiltonian::Graded(_) => None,
        }
    }

    pub fn as_graded(&self) -> Option<&OperatorMatrix<GrassElement>> {
        match self {
            Hamiltonian::Graded(h) => Some(h),
            Hamiltonian::Scalar(_) => None,
        }
    }

    /// `H|Ψ⟩`; graded matrices act with the Koszul convention.
    pub fn apply(&self, state: &ScsState) -> Result<Vec<Value>, JcError> {
        match (self, &state.coeffs) {
            (Hamiltonian::Scalar(h), Coefficients::Scalar(v)) => Ok(h.apply(v).into_iter().map(Value::Scalar).collect()),
            (Hamiltonian::Graded(h), Coefficients::Formal(v)) => Ok(h
                .apply_graded(v, &state.space, SignConvention::Koszul)?
                .into_iter()
                .map(Value::Formal)
                .collect()),
            _ => Err(JcError::Domain("coupling mode and state mode differ".into())),
        }
    }
}

fn free_part(params: &ModelParams, space: &SuperFockSpace) -> OperatorMatrix<Complex64> {
    let mut h = OperatorMatrix::zeros(space.dim(), "H0");
    for n in 0..space.nb() {
        for m in 0..space.mf() {
            let e = params.free_energy(n, m);
            if e != 0.0 {
                let i = space.index(n, m);
                h.set(i, i, Complex64::new(e, 0.0));
            }
        }
    }
    h
}

/// `a F⁺` and `a⁺ F` on the truncated space.
pub fn coupling_operators(space: &SuperFockSpace) -> (OperatorMatrix<Complex64>, OperatorMatrix<Complex64>) {
    let a = operator_matrix(Generator::A, space);
    let ad = operator_matrix(Generator::Adag, space);
    let f = operator_matrix(Generator::F, space);
    let fd = operator_matrix(Generator::Fdag, space);
    (a.matmul(&fd), ad.matmul(&f))
}

pub fn build_h(params: &ModelParams, space: &SuperFockSpace) -> Result<Hamiltonian, JcError> {
    build_h_with(params, space, DEFAULT_G_MAX)
}

/// Graded entries carry the coupling to the left of `|i⟩⟨j|`: `ψ (aF⁺)_ij` and
/// `-ψ̄ (a⁺F)_ij`, the sign coming from moving `ψ̄` past the odd `a⁺F`.
pub fn build_h_with(params: &ModelParams, space: &SuperFockSpace, g_max: u32) -> Result<Hamiltonian, JcError> {
    params.check(space)?;
    let h0 = free_part(params, space);
    let (afd, adf) = coupling_operators(space);
    match params.coupling {
        Coupling::Scalar(g) => {
            let h = h0.add(&afd.scale(g)).add(&adf.scale(g.conj())).with_tag("H_JCq");
            Ok(Hamiltonian::Scalar(h))
        }
        Coupling::Grassmann { theta } => {
            let psi = GrassElement::zeta(g_max).scale(Complex64::from_polar(1.0, theta));
            let psibar = psi.conj();
            let mut h = h0.to_graded().with_tag("H_JCq");
            for ((i, j), x) in afd.entries() {
                h.add_at(i, j, &psi.scale(*x));
            }
            for ((i, j), x) in adf.entries() {
                h.add_at(i, j, &psibar.scale(-x));
            }
            Ok(Hamiltonian::Graded(h))
        }
    }
}

/// Which Grassmann ordering of a closed form agrees with the bracket through
/// degree 2: the coupling term's `ψψ̄` on the diagonal, the exponent `ψ̄₂ψ₁` off it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderMatch {
    AsWritten,
    Swapped,
    Neither,
    /// The scalar shadow cannot tell the orderings apart.
    Indistinguishable,
}

impl OrderMatch {
    pub fn label(self) -> &'static str {
        match self {
            OrderMatch::AsWritten => "as-written",
            OrderMatch::Swapped => "swapped",
            OrderMatch::Neither => "neither",
            OrderMatch::Indistinguishable => "indistinguishable",
        }
    }
}

fn pick_order(a: &Value, b: &Value, formal: bool, tol: f64) -> OrderMatch {
    if !formal {
        return OrderMatch::Indistinguishable;
    }
    let (ea, eb) = (a.max_abs_in_degree(2), b.max_abs_in_degree(2));
    match (ea <= tol, eb <= tol) {
        (true, false) => OrderMatch::AsWritten,
        (false, true) => OrderMatch::Swapped,
        (true, true) => OrderMatch::Indistinguishable,
        (false, false) => OrderMatch::Neither,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixElementReport {
    /// Closed form as written, with `ψψ̄` in the coupling term (diagonal) or
    /// `exp_F(ψ̄₂ψ₁)` (off-diagonal).
    pub closed: Value,
    /// Same with the other ordering: `ψ̄ψ`, respectively `exp_F(ψ̄₁ψ₂)`.
    pub closed_alt: Value,
    pub bracket: Value,
    pub difference: Value,
    pub difference_alt: Value,
    pub matching: OrderMatch,
}

impl MatrixElementReport {
    /// Largest difference per even Grassmann degree up to `g_max`.
    pub fn difference_by_degree(&self, g_max: u32) -> Vec<(u32, f64)> {
        (0..=g_max)
            .step_by(2)
            .map(|d| (d, self.difference.max_abs_in_degree(d)))
            .collect()
    }
}

const ORDER_TOL: f64 = 1e-8;

fn bracket(l: &ScsState, h: &Hamiltonian, r: &ScsState) -> Result<Value, JcError> {
    let hr = h.apply(r)?;
    let mut moved = r.clone();
    moved.coeffs = match &r.coeffs {
        Coefficients::Scalar(_) => Coefficients::Scalar(hr.iter().map(|v| v.as_scalar().expect("scalar")).collect()),
        Coefficients::Formal(_) => {
            Coefficients::Formal(hr.iter().map(|v| v.as_formal().expect("formal").clone()).collect())
        }
    };
    Ok(inner(l, &moved)?)
}

fn require_coupling_label(params: &ModelParams, label: &ScsLabel) -> Result<(), JcError> {
    match (params.coupling, label.psi) {
        (Coupling::Grassmann { theta }, PsiMode::Formal { theta: t }) if theta == t => Ok(()),
        (Coupling::Grassmann { .. }, PsiMode::Formal { .. }) => Err(JcError::Domain(
            "formal closed forms take the coupling equal to the bra label's psi".into(),
        )),
        (Coupling::Scalar(_), PsiMode::Scalar(_)) => Ok(()),
        _ => Err(JcError::Domain("coupling mode and label mode differ".into())),
    }
}

pub fn scs_diagonal(label: &ScsLabel, params: &ModelParams, space: &SuperFockSpace) -> Result<MatrixElementReport, JcError> {
    scs_offdiagonal_inner(label, label, params, space, DEFAULT_G_MAX, true)
}

pub fn scs_offdiagonal(
    l1: &ScsLabel,
    l2: &ScsLabel,
    params: &ModelParams,
    space: &SuperFockSpace,
) -> Result<MatrixElementReport, JcError> {
    scs_offdiagonal_inner(l1, l2, params, space, DEFAULT_G_MAX, false)
}

/// Off-diagonal (or, with `diagonal`, diagonal) matrix element between
/// normalized states. The diagonal closed form is
/// `2ω₁ z̄z + 2ω₂ q^{1/2} ψ̄ψ + (z̄+z) ψψ̄`; the off-diagonal one is
/// `N₁N₂ exp_B(z̄₁z₂) exp_F(ψ̄₂ψ₁) (2ω₁ z̄₁z₂ + 2ω₂ q^{1/2} ψ̄₁ψ₂ + ψ₁ψ̄₁ z₂ + z̄₁ ψ₂ψ̄₁)`.
/// In the scalar mode `ψ₁` and `ψ̄₁` in the coupling terms become `g` and `ḡ`.
pub fn scs_offdiagonal_inner(
    l1: &ScsLabel,
    l2: &ScsLabel,
    params: &ModelParams,
    space: &SuperFockSpace,
    g_max: u32,
    diagonal: bool,
) -> Result<MatrixElementReport, JcError> {
    params.check(space)?;
    require_coupling_label(params, l1)?;
    if l1.is_formal() != l2.is_formal() {
        return Err(ScsError::Domain("labels mix formal and scalar modes".into()).into());
    }
    let q = params.q;
    let dp = DeformParams::new(q)?;
    let h = build_h_with(params, space, g_max)?;
    let s1 = scs_build_with(l1, space, true, g_max)?;
    let s2 = scs_build_with(l2, space, true, g_max)?;
    let bracket = bracket(&s1, &h, &s2)?;
    let (w1, w2sq) = (2.0 * params.omega1, 2.0 * params.omega2 * q.sqrt());
    let z1b = l1.z.conj();
    let z2 = l2.z;

    let (closed, closed_alt) = match (l1.psi, l2.psi, params.coupling) {
        (PsiMode::Scalar(p1), PsiMode::Scalar(p2), Coupling::Scalar(g)) => {
            let poly = w1 * z1b * z2 + w2sq * p1.conj() * p2 + g * p1.conj() * z2 + z1b * p2 * g.conj();
            if diagonal {
                (Value::Scalar(poly), Value::Scalar(poly))
            } else {
                let n1 = scs_normalization(l1, q, g_max)?.as_scalar().expect("scalar");
                let n2 = scs_normalization(l2, q, g_max)?.as_scalar().expect("scalar");
                let eb = q_exp(QKind::Boson, z1b * z2, &dp)?.value;
                let ef = q_exp(QKind::Fermion, p2.conj() * p1, &dp)?.value;
                let ef_alt = q_exp(QKind::Fermion, p1.conj() * p2, &dp)?.value;
                let pre = n1 * n2 * eb;
                (Value::Scalar(pre * ef * poly), Value::Scalar(pre * ef_alt * poly))
            }
        }
        _ => {
            let p1 = l1.psi_element(g_max).expect("formal");
            let p2 = l2.psi_element(g_max).expect("formal");
            let (p1b, p2b) = (p1.conj(), p2.conj());
            let mut poly = GrassElement::scalar(w1 * z1b * z2).with_g_max(g_max);
            poly = &poly + &g_mul(&p1b, &p2).scale_real(w2sq);
            let tail = &g_mul(&p2, &p1b).scale(z1b);
            if diagonal {
                let pp = g_mul(&p1, &p1b).scale(z1b + z2);
                let pp_alt = g_mul(&p1b, &p1).scale(z1b + z2);
                (Value::Formal(&poly + &pp), Value::Formal(&poly + &pp_alt))
            } else {
                poly = &(&poly + &g_mul(&p1, &p1b).scale(z2)) + tail;
                let n1 = scs_normalization(l1, q, g_max)?.as_formal().expect("formal").clone();
                let n2 = scs_normalization(l2, q, g_max)?.as_formal().expect("formal").clone();
                let eb = q_exp(QKind::Boson, z1b * z2, &dp)?.value;
                let ef = exp_f_formal(&g_mul(&p2b, &p1), q, g_max);
                let ef_alt = exp_f_formal(&g_mul(&p1b, &p2), q, g_max);
                let pre = g_mul(&n1, &n2).scale(eb);
                (
                    Value::Formal(g_mul(&g_mul(&pre, &ef), &poly)),
                    Value::Formal(g_mul(&g_mul(&pre, &ef_alt), &poly)),
                )
            }
        }
    };
    let difference = bracket.sub(&closed)?;
    let difference_alt = bracket.sub(&closed_alt)?;
    let matching = pick_order(&difference, &difference_alt, l1.is_formal(), ORDER_TOL);
    Ok(MatrixElementReport {
        closed,
        closed_alt,
        bracket,
        difference,
        difference_alt,
        matching,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceReport {
    /// Sum of the diagonal of the built matrix.
    pub direct: f64,
    /// `Σ D_nm (2ω₁[n]_B + 2ω₂q^{1/2}[m]_F)` with `D` the resolved identity.
    pub phase_space: f64,
    pub rel_err: f64,
    /// Direct trace with `a a⁺` (eigenvalue `[n+1]_B`) in place of `a⁺a`.
    pub direct_antinormal: f64,
    /// Largest diagonal entry of the coupling part; exactly zero.
    pub coupling_diagonal: f64,
}

pub fn trace_compare(
    params: &ModelParams,
    space: &SuperFockSpace,
    settings: &QuadratureSettings,
) -> Result<TraceReport, JcError> {
    params.check(space)?;
    let (afd, adf) = coupling_operators(space);
    let coupling_diagonal = afd
        .entries()
        .chain(adf.entries())
        .filter(|((i, j), _)| i == j)
        .map(|(_, x)| x.norm())
        .fold(0.0, f64::max);
    let h = match params.coupling {
        Coupling::Scalar(_) => build_h(params, space)?,
        Coupling::Grassmann { .. } => Hamiltonian::Scalar(free_part(params, space)),
    };
    let hs = h.as_scalar().expect("scalar");
    let direct: f64 = (0..space.dim()).map(|i| hs.get(i, i).re).sum();
    let moments = RadialMoments::compute(params.q, space.nb(), space.mf(), settings)?;
    let pre = crate::qscs::completeness_prefactor(params.q);
    let mut phase_space = 0.0;
    let mut direct_antinormal = 0.0;
    for n in 0..space.nb() {
        for m in 0..space.mf() {
            let d = pre * moments.boson_ratio(n) * moments.fermion_ratio(m);
            phase_space += d * params.free_energy(n, m);
            direct_antinormal += params.free_energy(n + 1, m);
        }
    }
    let rel_err = if direct == 0.0 {
        (phase_space - direct).abs()
    } else {
        (phase_space - direct).abs() / direct.abs()
    };
    Ok(TraceReport {
        direct,
        phase_space,
        rel_err: if rel_err.is_nan() { f64::INFINITY } else { rel_err },
        direct_antinormal,
        coupling_diagonal,
    })
}

/// Eigenvalues of the scalar-coupling Hamiltonian in ascending order.
pub fn spectrum(params: &ModelParams, space: &SuperFockSpace) -> Result<Vec<f64>, JcError> {
    let h = build_h(params, space)?;
    let h = h
        .as_scalar()
        .ok_or_else(|| JcError::Domain("spectra need a scalar coupling".into()))?;
    Ok(hermitian_eigenvalues(h.to_dense()))
}

pub fn hermitian_eigenvalues(m: DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Undeformed JC matrix `2ω₁ b⁺b + 2ω₂ f⁺f + g b f⁺ + ḡ b⁺f` with one fermion
/// mode, on the basis `|n, m⟩`, `n < nb`, `m ∈ {0, 1}`.
pub fn classical_jc_matrix(omega1: f64, omega2: f64, g: Complex64, nb: usize) -> DMatrix<Complex64> {
    let idx = |n: usize, m: usize| 2 * n + m;
    let mut h = DMatrix::from_element(2 * nb, 2 * nb, Complex64::new(0.0, 0.0));
    for n in 0..nb {
        for m in 0..2 {
            h[(idx(n, m), idx(n, m))] = Complex64::new(2.0 * omega1 * n as f64 + 2.0 * omega2 * m as f64, 0.0);
        }
        if n > 0 {
            let r = (n as f64).sqrt();
            h[(idx(n - 1, 1), idx(n, 0))] = g * r;
            h[(idx(n, 0), idx(n - 1, 1))] = g.conj() * r;
        }
    }
    h
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalLimitReport {
    pub q: f64,
    pub deformed: Vec<f64>,
    pub classical: Vec<f64>,
    pub max_abs_diff: f64,
}

/// Compare the spectrum at `q` (one fermion level, `mf = 2`) with the classical one.
pub fn classical_limit(omega1: f64, omega2: f64, g: Complex64, q: f64, nb: usize) -> Result<ClassicalLimitReport, JcError> {
    let space = build_space(nb, 2, q)?;
    let deformed = spectrum(&ModelParams::scalar(omega1, omega2, g, q), &space)?;
    let classical = hermitian_eigenvalues(classical_jc_matrix(omega1, omega2, g, nb));
    let max_abs_diff = deformed
        .iter()
        .zip(&classical)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(ClassicalLimitReport {
        q,
        deformed,
        classical,
        max_abs_diff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn free_hamiltonian_is_diagonal() {
        let s = build_space(5, 4, 0.5).unwrap();
        let p = ModelParams::scalar(0.7, 0.3, c(0.0, 0.0), 0.5);
        let h = build_h(&p, &s).unwrap();
        let h = h.as_scalar().unwrap();
        assert!(h.entries().all(|((i, j), _)| i == j));
        let mut expected: Vec<f64> = (0..5).flat_map(|n| (0..4).map(move |m| (n, m))).map(|(n, m)| p.free_energy(n, m)).collect();
        expected.sort_by(|a, b| a.total_cmp(b));
        let ev = spectrum(&p, &s).unwrap();
        for (a, b) in ev.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn four_by_four_oracle() {
        // hand-assembled: |0,1⟩ and |1,0⟩ mix through g; [1]_B = [1]_F = 1
        let q = 0.5f64;
        let s = build_space(2, 2, q).unwrap();
        let ev = spectrum(&ModelParams::scalar(0.5, 0.5, c(0.1, 0.0), q), &s).unwrap();
        let e01 = q.sqrt();
        let mean = (e01 + 1.0) / 2.0;
        let half = (1.0 - e01) / 2.0;
        let split = (half * half + 0.01).sqrt();
        let mut oracle = vec![0.0, mean - split, mean + split, 1.0 + e01];
        oracle.sort_by(|a, b| a.total_cmp(b));
        for (a, b) in ev.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-14, "{ev:?} vs {oracle:?}");
        }
    }

    #[test]
    fn scalar_h_is_hermitian() {
        let s = build_space(6, 4, 0.7).unwrap();
        let h = build_h(&ModelParams::scalar(0.4, 0.9, c(0.2, -0.3), 0.7), &s).unwrap();
        let h = h.as_scalar().unwrap();
        assert_eq!(h.adjoint().entries().collect::<Vec<_>>(), h.entries().collect::<Vec<_>>());
    }

    #[test]
    fn graded_h_is_self_adjoint() {
        let s = build_space(4, 4, 0.5).unwrap();
        let h = build_h(&ModelParams::grassmann(0.4, 0.9, 0.6, 0.5), &s).unwrap();
        let h = h.as_graded().unwrap();
        let d = h.graded_adjoint(&s).unwrap().sub(h);
        assert!(d.entries().all(|(_, g)| g.max_abs_coeff() < 1e-15));
    }

    #[test]
    fn q_mismatch_is_rejected() {
        let s = build_space(3, 3, 0.5).unwrap();
        assert!(build_h(&ModelParams::scalar(1.0, 1.0, c(0.0, 0.0), 0.6), &s).is_err());
    }

    #[test]
    fn classical_matrix_at_q_one() {
        let s = build_space(6, 2, 1.0).unwrap();
        let g = c(0.3, 0.1);
        let h = build_h(&ModelParams::scalar(0.5, 0.8, g, 1.0), &s).unwrap();
        let dense = h.as_scalar().unwrap().to_dense();
        let cl = classical_jc_matrix(0.5, 0.8, g, 6);
        assert!((dense - cl).iter().all(|x| x.norm() < 1e-15));
    }

    #[test]
    fn classical_dressed_states() {
        let (w1, w2, g, nb) = (0.5, 0.5, 0.2, 5usize);
        let ev = hermitian_eigenvalues(classical_jc_matrix(w1, w2, c(g, 0.0), nb));
        let mut oracle = vec![0.0, 2.0 * w1 * (nb - 1) as f64 + 2.0 * w2];
        for n in 1..nb {
            let (a, b) = (2.0 * w1 * n as f64, 2.0 * w1 * (n - 1) as f64 + 2.0 * w2);
            let r = (((a - b) / 2.0).powi(2) + g * g * n as f64).sqrt();
            oracle.push((a + b) / 2.0 - r);
            oracle.push((a + b) / 2.0 + r);
        }
        oracle.sort_by(|a, b| a.total_cmp(b));
        for (a, b) in ev.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn direct_trace_oracle() {
        let s = build_space(2, 2, 0.5).unwrap();
        let p = ModelParams::scalar(0.5, 0.5, c(0.3, 0.0), 0.5);
        let r = trace_compare(&p, &s, &QuadratureSettings::default()).unwrap();
        assert!((r.direct - (2.0 + 2.0 * 0.5f64.sqrt())).abs() < 1e-14);
        assert_eq!(r.coupling_diagonal, 0.0);
        let z = trace_compare(&ModelParams::scalar(0.0, 0.0, c(0.3, 0.0), 0.5), &s, &QuadratureSettings::default()).unwrap();
        assert_eq!(z.direct, 0.0);
        assert_eq!(z.phase_space, 0.0);
    }

    #[test]
    fn diagonal_examples() {
        let s = build_space(40, 6, 0.5).unwrap();
        let p = ModelParams::scalar(0.5, 0.7, c(0.2, 0.1), 0.5);
        let l = ScsLabel::scalar(c(0.3, -0.2), c(0.0, 0.0));
        let r = scs_diagonal(&l, &p, &s).unwrap();
        assert_eq!(r.closed, Value::Scalar(c(2.0 * 0.5 * l.z.norm_sqr(), 0.0)));
        assert!(r.difference.max_abs() < 1e-12);

        let pf = ModelParams::grassmann(0.5, 0.7, 0.3, 0.5);
        let lf = ScsLabel::formal(c(0.0, 0.0), 0.3);
        let r = scs_diagonal(&lf, &pf, &s).unwrap();
        let psi = lf.psi_element(8).unwrap();
        let expected = g_mul(&psi.conj(), &psi).scale_real(2.0 * 0.7 * 0.5f64.sqrt());
        assert_eq!(r.closed, Value::Formal(expected));

        let l = ScsLabel::formal(c(0.4, 0.0), 0.3);
        let r = scs_diagonal(&l, &pf, &s).unwrap();
        assert_eq!(r.matching, OrderMatch::AsWritten);
        assert!(r.difference.max_abs_in_degree(2) < 1e-12);
    }

    #[test]
    fn offdiagonal_exponent_order() {
        let s = build_space(30, 6, 0.5).unwrap();
        let pf = ModelParams::grassmann(0.5, 0.7, 0.3, 0.5);
        let l1 = ScsLabel::formal(c(0.4, 0.0), 0.3);
        let l2 = ScsLabel::formal(c(-0.2, 0.1), 1.0);
        let r = scs_offdiagonal(&l1, &l2, &pf, &s).unwrap();
        assert_eq!(r.matching, OrderMatch::Swapped);
        assert!(r.difference_alt.max_abs_in_degree(2) < 1e-12);
    }

    #[test]
    fn offdiagonal_examples() {
        let s = build_space(40, 6, 0.5).unwrap();
        let p = ModelParams::scalar(0.5, 0.7, c(0.2, 0.1), 0.5);
        let l1 = ScsLabel::scalar(c(0.3, -0.2), c(0.0, 0.0));
        let l2 = ScsLabel::scalar(c(-0.1, 0.4), c(0.0, 0.0));
        let r = scs_offdiagonal(&l1, &l2, &p, &s).unwrap();
        assert!(r.difference.max_abs() < 1e-8);
        let vac = ScsLabel::scalar(c(0.0, 0.0), c(0.0, 0.0));
        let r = scs_offdiagonal(&l1, &vac, &p, &s).unwrap();
        assert_eq!(r.closed.max_abs(), 0.0);

        // coinciding labels reduce to the diagonal element
        let pf = ModelParams::grassmann(0.5, 0.7, 0.3, 0.5);
        let lf = ScsLabel::formal(c(0.2, 0.1), 0.3);
        let off = scs_offdiagonal(&lf, &lf, &pf, &s).unwrap();
        let diag = scs_diagonal(&lf, &pf, &s).unwrap();
        assert!((off.bracket.sub(&diag.bracket).unwrap()).max_abs() < 1e-14);
    }
}
