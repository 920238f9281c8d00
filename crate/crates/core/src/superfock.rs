//! Truncated super-Fock space `|n, m⟩`, `n < nb`, `m < mf`, and sparse matrices for
//! the deformed boson and fermion generators.
//!
//! Raising operators annihilate the top level of their sector, so every relation
//! check restricts itself to input columns from which no raising step leaves the
//! truncation.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::grassmann::{g_mul, g_parity, GrassElement, Parity};
use crate::qnumbers::{check_q, q_int_unchecked, QError, QKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error(transparent)]
    Q(#[from] QError),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperFockSpace {
    nb: usize,
    mf: usize,
    q: f64,
}

pub fn build_space(nb: usize, mf: usize, q: f64) -> Result<SuperFockSpace, FockError> {
    if nb == 0 || mf == 0 {
        return Err(FockError::Domain(format!("cutoffs must be positive, got nb = {nb}, mf = {mf}")));
    }
    check_q(q)?;
    Ok(SuperFockSpace { nb, mf, q })
}

impl SuperFockSpace {
    pub fn nb(&self) -> usize {
        self.nb
    }

    pub fn mf(&self) -> usize {
        self.mf
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.nb * self.mf
    }

    /// Lexicographic flat index, `n` major.
    pub fn index(&self, n: usize, m: usize) -> usize {
        debug_assert!(n < self.nb && m < self.mf);
        n * self.mf + m
    }

    pub fn coords(&self, i: usize) -> (usize, usize) {
        (i / self.mf, i % self.mf)
    }

    pub fn state_vector(&self, n: usize, m: usize) -> Result<Vec<Complex64>, FockError> {
        if n >= self.nb || m >= self.mf {
            return Err(FockError::Domain(format!("state |{n},{m}⟩ lies outside the truncation")));
        }
        let mut v = vec![Complex64::new(0.0, 0.0); self.dim()];
        v[self.index(n, m)] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    /// Fermion-number parity of the basis state with flat index `i`.
    pub fn parity(&self, i: usize) -> Parity {
        Parity::of_degree(self.coords(i).1 as u32)
    }

    fn boson_int(&self, n: usize) -> f64 {
        q_int_unchecked(QKind::Boson, n as u32, self.q)
    }

    fn fermion_int(&self, m: usize) -> f64 {
        q_int_unchecked(QKind::Fermion, m as u32, self.q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    A,
    Adag,
    F,
    Fdag,
    N,
    M,
    QPowN(Rational64),
    QPowM(Rational64),
}

impl Generator {
    pub fn parity(&self) -> Parity {
        match self {
            Generator::F | Generator::Fdag => Parity::Odd,
            _ => Parity::Even,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Generator::A => "a".into(),
            Generator::Adag => "adag".into(),
            Generator::F => "F".into(),
            Generator::Fdag => "Fdag".into(),
            Generator::N => "N".into(),
            Generator::M => "M".into(),
            Generator::QPowN(x) => format!("qN({x})"),
            Generator::QPowM(x) => format!("qM({x})"),
        }
    }
}

impl FromStr for Generator {
    type Err = FockError;
    fn from_str(s: &str) -> Result<Self, FockError> {
        let s = s.trim();
        let power = |inner: &str| -> Result<Rational64, FockError> {
            inner
                .trim()
                .parse::<Rational64>()
                .map_err(|_| FockError::Domain(format!("bad exponent '{inner}'")))
        };
        match s {
            "a" => Ok(Generator::A),
            "adag" => Ok(Generator::Adag),
            "F" => Ok(Generator::F),
            "Fdag" => Ok(Generator::Fdag),
            "N" => Ok(Generator::N),
            "M" => Ok(Generator::M),
            _ => {
                if let Some(inner) = s.strip_prefix("qN(").and_then(|r| r.strip_suffix(')')) {
                    Ok(Generator::QPowN(power(inner)?))
                } else if let Some(inner) = s.strip_prefix("qM(").and_then(|r| r.strip_suffix(')')) {
                    Ok(Generator::QPowM(power(inner)?))
                } else {
                    Err(FockError::Domain(format!("unknown generator '{s}'")))
                }
            }
        }
    }
}

/// Coefficient ring of an [`OperatorMatrix`].
pub trait Coeff: Clone + PartialEq {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: Complex64) -> Self;
}

impl Coeff for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: Complex64) -> Self {
        self * c
    }
}

impl Coeff for GrassElement {
    fn zero() -> Self {
        GrassElement::zero()
    }
    fn is_zero(&self) -> bool {
        GrassElement::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        g_mul(self, other)
    }
    fn scale(&self, c: Complex64) -> Self {
        GrassElement::scale(self, c)
    }
}

/// Square sparse matrix on a super-Fock basis. In the graded case each entry is
/// a coefficient standing to the left of `|i⟩⟨j|`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix<T> {
    dim: usize,
    entries: BTreeMap<(usize, usize), T>,
    tag: String,
}

impl<T: Coeff> OperatorMatrix<T> {
    pub fn zeros(dim: usize, tag: impl Into<String>) -> Self {
        Self {
            dim,
            entries: BTreeMap::new(),
            tag: tag.into(),
        }
    }

    pub fn identity(dim: usize) -> Self
    where
        T: From<Complex64>,
    {
        let mut out = Self::zeros(dim, "1");
        for i in 0..dim {
            out.set(i, i, T::from(Complex64::new(1.0, 0.0)));
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = tag.into();
        self
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(T::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        if v.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), v);
        }
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: &T) {
        let cur = self.get(i, j);
        self.set(i, j, cur.add(v));
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &T)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), v) in &other.entries {
            out.add_at(i, j, v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::zeros(self.dim, self.tag.clone());
        for (&(i, j), v) in &self.entries {
            out.set(i, j, v.scale(c));
        }
        out
    }

    /// Product with entry products `sign(i, j, l, h_jl) · g_ij · h_jl`.
    fn mul_with(&self, other: &Self, sign: impl Fn(usize, usize, usize, &T) -> f64) -> Self {
        let mut rows: Vec<Vec<(usize, &T)>> = vec![Vec::new(); other.dim];
        for (&(j, l), v) in &other.entries {
            rows[j].push((l, v));
        }
        let mut out = Self::zeros(self.dim, format!("{}·{}", self.tag, other.tag));
        for (&(i, j), g) in &self.entries {
            for &(l, h) in &rows[j] {
                let s = sign(i, j, l, h);
                out.add_at(i, l, &g.mul(h).scale(Complex64::new(s, 0.0)));
            }
        }
        out
    }

    /// Ungraded product.
    pub fn matmul(&self, other: &Self) -> Self {
        self.mul_with(other, |_, _, _, _| 1.0)
    }
}

impl OperatorMatrix<Complex64> {
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for (&(i, j), a) in &self.entries {
            out[i] += a * v[j];
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim, format!("{}†", self.tag));
        for (&(i, j), v) in &self.entries {
            out.set(j, i, v.conj());
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        let mut m = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for (&(i, j), v) in &self.entries {
            m[(i, j)] = *v;
        }
        m
    }

    /// Coordinate triplets, one `row col re im` line per stored entry.
    pub fn to_triplets(&self) -> String {
        let mut s = String::new();
        for (&(i, j), v) in &self.entries {
            let _ = writeln!(s, "{i} {j} {:.16e} {:.16e}", v.re, v.im);
        }
        s
    }

    pub fn to_graded(&self) -> OperatorMatrix<GrassElement> {
        let mut out = OperatorMatrix::zeros(self.dim, self.tag.clone());
        for (&(i, j), v) in &self.entries {
            out.set(i, j, GrassElement::scalar(*v));
        }
        out
    }
}

/// Sign convention for operators acting on Grassmann-coefficient vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignConvention {
    /// `X(g ⊗ |v⟩) = (-1)^{p(X) p(g)} g ⊗ X|v⟩`.
    Koszul,
    /// Coefficients pass operators without any sign.
    Plain,
}

impl OperatorMatrix<GrassElement> {
    fn entry_parity(space: &SuperFockSpace, i: usize, j: usize) -> Parity {
        let (_, mi) = space.coords(i);
        let (_, mj) = space.coords(j);
        Parity::of_degree((mi + mj) as u32)
    }

    /// Graded product: moving `h_jl` left past `|i⟩⟨j|` costs `(-1)^{p(h) p_ij}`.
    pub fn graded_matmul(&self, other: &Self, space: &SuperFockSpace) -> Result<Self, FockError> {
        for (_, h) in &other.entries {
            g_parity(h).map_err(|e| FockError::Domain(e.to_string()))?;
        }
        Ok(self.mul_with(other, |i, j, _, h| {
            let ph = g_parity(h).unwrap_or(Parity::Even);
            ph.koszul(Self::entry_parity(space, i, j))
        }))
    }

    /// `(Xc)_i = Σ_k s · x_ik c_k` with `s = (-1)^{p(c_k) p_ik}` under the Koszul
    /// convention and `s = 1` under the plain one.
    pub fn apply_graded(
        &self,
        v: &[GrassElement],
        space: &SuperFockSpace,
        convention: SignConvention,
    ) -> Result<Vec<GrassElement>, FockError> {
        let mut out = vec![GrassElement::zero(); self.dim];
        for (&(i, k), x) in &self.entries {
            if v[k].is_zero() {
                continue;
            }
            let sign = match convention {
                SignConvention::Plain => 1.0,
                SignConvention::Koszul => {
                    let pc = g_parity(&v[k]).map_err(|e| FockError::Domain(e.to_string()))?;
                    pc.koszul(Self::entry_parity(space, i, k))
                }
            };
            out[i] = &out[i] + &g_mul(x, &v[k]).scale_real(sign);
        }
        Ok(out)
    }

    /// Graded adjoint: `(g |i⟩⟨j|)† = (-1)^{p(g) p_ij} ḡ |j⟩⟨i|`.
    pub fn graded_adjoint(&self, space: &SuperFockSpace) -> Result<Self, FockError> {
        let mut out = Self::zeros(self.dim, format!("{}†", self.tag));
        for (&(i, j), g) in &self.entries {
            let pg = g_parity(g).map_err(|e| FockError::Domain(e.to_string()))?;
            let s = pg.koszul(Self::entry_parity(space, i, j));
            out.set(j, i, g.conj().scale_real(s));
        }
        Ok(out)
    }

    /// Scalar shadow of every entry.
    pub fn reduce(&self, zeta: Complex64) -> OperatorMatrix<Complex64> {
        let mut out = OperatorMatrix::zeros(self.dim, self.tag.clone());
        for (&(i, j), g) in &self.entries {
            out.set(i, j, crate::grassmann::g_reduce(g, zeta));
        }
        out
    }
}

pub fn operator_matrix(gen: Generator, space: &SuperFockSpace) -> OperatorMatrix<Complex64> {
    let mut out = OperatorMatrix::zeros(space.dim(), gen.name());
    let re = |x: f64| Complex64::new(x, 0.0);
    for n in 0..space.nb {
        for m in 0..space.mf {
            let j = space.index(n, m);
            match gen {
                Generator::A if n > 0 => out.set(space.index(n - 1, m), j, re(space.boson_int(n).sqrt())),
                Generator::Adag if n + 1 < space.nb => {
                    out.set(space.index(n + 1, m), j, re(space.boson_int(n + 1).sqrt()))
                }
                Generator::F if m > 0 => out.set(space.index(n, m - 1), j, re(space.fermion_int(m).sqrt())),
                Generator::Fdag if m + 1 < space.mf => {
                    out.set(space.index(n, m + 1), j, re(space.fermion_int(m + 1).sqrt()))
                }
                Generator::N => out.set(j, j, re(n as f64)),
                Generator::M => out.set(j, j, re(m as f64)),
                Generator::QPowN(x) => out.set(j, j, re(space.q.powf(x.to_f64().unwrap_or(f64::NAN) * n as f64))),
                Generator::QPowM(x) => out.set(j, j, re(space.q.powf(x.to_f64().unwrap_or(f64::NAN) * m as f64))),
                _ => {}
            }
        }
    }
    out
}

/// Residual of one relation, split into interior and boundary columns.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationResidual {
    pub name: String,
    /// Largest `|R_ij|` over interior columns `j`.
    pub interior_abs: f64,
    /// `interior_abs` divided by the largest entry of the relation's terms.
    pub interior_rel: f64,
    /// Largest `|R_ij|` over the excluded boundary columns.
    pub boundary_abs: f64,
    pub interior_columns: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraReport {
    pub nb: usize,
    pub mf: usize,
    pub q: f64,
    pub relations: Vec<RelationResidual>,
}

impl AlgebraReport {
    pub fn max_interior_abs(&self) -> f64 {
        self.relations.iter().map(|r| r.interior_abs).fold(0.0, f64::max)
    }

    pub fn max_interior_rel(&self) -> f64 {
        self.relations.iter().map(|r| r.interior_rel).fold(0.0, f64::max)
    }
}

/// Evaluate `Σ terms` and measure it on columns `|n,m⟩` with `n + rb < nb` and `m + rf < mf`.
fn residual(
    name: &str,
    terms: &[OperatorMatrix<Complex64>],
    space: &SuperFockSpace,
    rb: usize,
    rf: usize,
) -> RelationResidual {
    let mut total = OperatorMatrix::zeros(space.dim(), name);
    let mut scale = 0.0f64;
    for t in terms {
        total = total.add(t);
        scale = scale.max(t.max_abs());
    }
    let interior = |j: usize| {
        let (n, m) = space.coords(j);
        n + rb < space.nb && m + rf < space.mf
    };
    let mut interior_abs = 0.0f64;
    let mut boundary_abs = 0.0f64;
    for ((_, j), v) in total.entries() {
        if interior(j) {
            interior_abs = interior_abs.max(v.norm());
        } else {
            boundary_abs = boundary_abs.max(v.norm());
        }
    }
    RelationResidual {
        name: name.to_string(),
        interior_abs,
        interior_rel: if scale > 0.0 { interior_abs / scale } else { interior_abs },
        boundary_abs,
        interior_columns: (0..space.dim()).filter(|&j| interior(j)).count(),
    }
}

fn commutator(x: &OperatorMatrix<Complex64>, y: &OperatorMatrix<Complex64>) -> [OperatorMatrix<Complex64>; 2] {
    [x.matmul(y), y.matmul(x).scale(Complex64::new(-1.0, 0.0))]
}

pub fn verify_algebra(space: &SuperFockSpace) -> AlgebraReport {
    let q = space.q;
    let a = operator_matrix(Generator::A, space);
    let ad = operator_matrix(Generator::Adag, space);
    let f = operator_matrix(Generator::F, space);
    let fd = operator_matrix(Generator::Fdag, space);
    let nn = operator_matrix(Generator::N, space);
    let mm = operator_matrix(Generator::M, space);
    let qn = operator_matrix(Generator::QPowN(Rational64::from_integer(-1)), space);
    let id = OperatorMatrix::<Complex64>::identity(space.dim());
    let c = |x: f64| Complex64::new(x, 0.0);

    let mut relations = vec![
        residual(
            "a adag - q adag a - q^-N",
            &[a.matmul(&ad), ad.matmul(&a).scale(c(-q)), qn.scale(c(-1.0))],
            space,
            1,
            0,
        ),
        residual(
            "F Fdag + q Fdag F - 1",
            &[f.matmul(&fd), fd.matmul(&f).scale(c(q)), id.scale(c(-1.0))],
            space,
            0,
            1,
        ),
    ];
    for (label, x, y, sign, rb, rf) in [
        ("[N,a] + a", &nn, &a, 1.0, 0, 0),
        ("[N,adag] - adag", &nn, &ad, -1.0, 1, 0),
        ("[M,F] + F", &mm, &f, 1.0, 0, 0),
        ("[M,Fdag] - Fdag", &mm, &fd, -1.0, 0, 1),
    ] {
        let [p, r] = commutator(x, y);
        relations.push(residual(label, &[p, r, y.scale(c(sign))], space, rb, rf));
    }
    let bosons = [("a", &a, 0), ("adag", &ad, 1), ("N", &nn, 0), ("qN(-1)", &qn, 0)];
    let fermions = [("F", &f, 0), ("Fdag", &fd, 1), ("M", &mm, 0)];
    for (bn, b, rb) in bosons {
        for (fname, fm, rf) in fermions {
            let [p, r] = commutator(b, fm);
            relations.push(residual(&format!("[{bn},{fname}]"), &[p, r], space, rb, rf));
        }
    }
    AlgebraReport {
        nb: space.nb,
        mf: space.mf,
        q,
        relations,
    }
}

/// Residual of the iterated identity
/// `a (a⁺)^n = q^n (a⁺)^n a + [n]_B (a⁺)^{n-1} q^{-N}` or
/// `F (F⁺)^n = (-q)^n (F⁺)^n F + [n]_F (F⁺)^{n-1}`, interior columns only.
pub fn iterate_identity(kind: QKind, n: usize, space: &SuperFockSpace) -> Result<RelationResidual, FockError> {
    let cutoff = match kind {
        QKind::Boson => space.nb,
        QKind::Fermion => space.mf,
    };
    if n == 0 || n + 1 >= cutoff {
        return Err(FockError::Precondition(format!(
            "need 1 ≤ n and n + 1 < cutoff ({cutoff}), got n = {n}"
        )));
    }
    let q = space.q;
    let c = |x: f64| Complex64::new(x, 0.0);
    let (x, xd, lambda, tail) = match kind {
        QKind::Boson => (
            operator_matrix(Generator::A, space),
            operator_matrix(Generator::Adag, space),
            q,
            operator_matrix(Generator::QPowN(Rational64::from_integer(-1)), space),
        ),
        QKind::Fermion => (
            operator_matrix(Generator::F, space),
            operator_matrix(Generator::Fdag, space),
            -q,
            OperatorMatrix::identity(space.dim()),
        ),
    };
    let pow = |m: &OperatorMatrix<Complex64>, k: usize| {
        (0..k).fold(OperatorMatrix::identity(space.dim()), |acc, _| acc.matmul(m))
    };
    let xdn = pow(&xd, n);
    let coeff = q_int_unchecked(kind, n as u32, q);
    let terms = [
        x.matmul(&xdn),
        xdn.matmul(&x).scale(c(-lambda.powi(n as i32))),
        pow(&xd, n - 1).matmul(&tail).scale(c(-coeff)),
    ];
    let (rb, rf) = match kind {
        QKind::Boson => (n, 0),
        QKind::Fermion => (0, n),
    };
    Ok(residual(
        &format!("{} iterate n={n}", kind.label()),
        &terms,
        space,
        rb,
        rf,
    ))
}

/// Gram matrix `⟨i|j⟩` of the unit coordinate vectors.
pub fn basis_gram(space: &SuperFockSpace) -> Vec<Vec<Complex64>> {
    let vs: Vec<Vec<Complex64>> = (0..space.dim())
        .map(|i| {
            let (n, m) = space.coords(i);
            space.state_vector(n, m).expect("index in range")
        })
        .collect();
    gram(&vs)
}

/// `(a⁺)^n (F⁺)^m |0,0⟩ / √([n]_B! [m]_F!)`, or `None` where `[m]_F! = 0`.
pub fn constructed_state(space: &SuperFockSpace, n: usize, m: usize) -> Option<Vec<Complex64>> {
    let ad = operator_matrix(Generator::Adag, space);
    let fd = operator_matrix(Generator::Fdag, space);
    let mut v = space.state_vector(0, 0).ok()?;
    let mut norm2 = 1.0;
    for k in 1..=m {
        v = fd.apply(&v);
        norm2 *= space.fermion_int(k);
    }
    for k in 1..=n {
        v = ad.apply(&v);
        norm2 *= space.boson_int(k);
    }
    if norm2 == 0.0 {
        return None;
    }
    let s = norm2.sqrt();
    Some(v.into_iter().map(|x| x / s).collect())
}

pub fn gram(vs: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    vs.iter()
        .map(|u| {
            vs.iter()
                .map(|v| u.iter().zip(v).map(|(a, b)| a.conj() * b).sum())
                .collect()
        })
        .collect()
}
