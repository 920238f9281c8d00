//! Symbolic operator calculus for the deformed algebra.
//!
//! Expressions over `a, a⁺, N, q^{xN}, F, F⁺, M, q^{yM}, ψ, ψ̄` with coefficients
//! in `Z[s, s⁻¹]`-like Laurent polynomials (`s = q^{1/4}`) are brought to the
//! canonical order
//!
//! `c · (a⁺)^i a^j N^k q^{xN} (F⁺)^r F^t M^l q^{yM} ψ^u ψ̄^v`.

mod parser;
mod rewrite;

pub use parser::{parse, render, ParseError};
pub use rewrite::{normal_order_words, rewrite_pair, Strategy, Word};

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use thiserror::Error;

use crate::qnumbers::{LaurentCoeff, QError, QKind};
use crate::superfock::{operator_matrix, FockError, Generator, OperatorMatrix, SuperFockSpace};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpcalcError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("derivation failed for {kind} n = {n}: extracted {got}, expected {expected}")]
    Derivation {
        kind: &'static str,
        n: u32,
        got: String,
        expected: String,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Q(#[from] QError),
}

/// Generator letter. Diagonal powers carry their exponent in quarters, so
/// `QN(k)` is `q^{(k/4) N}`. Variant order is the normal-ordering rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Adag,
    A,
    N,
    QN(i32),
    Fdag,
    F,
    M,
    QM(i32),
    Psi,
    PsiBar,
}

impl Letter {
    pub fn rank(self) -> u8 {
        match self {
            Letter::Adag => 0,
            Letter::A => 1,
            Letter::N => 2,
            Letter::QN(_) => 3,
            Letter::Fdag => 4,
            Letter::F => 5,
            Letter::M => 6,
            Letter::QM(_) => 7,
            Letter::Psi => 8,
            Letter::PsiBar => 9,
        }
    }

    pub fn name(self) -> String {
        match self {
            Letter::Adag => "adag".into(),
            Letter::A => "a".into(),
            Letter::N => "N".into(),
            Letter::QN(k) => format!("qN({})", quarters(k)),
            Letter::Fdag => "Fdag".into(),
            Letter::F => "F".into(),
            Letter::M => "M".into(),
            Letter::QM(k) => format!("qM({})", quarters(k)),
            Letter::Psi => "psi".into(),
            Letter::PsiBar => "psibar".into(),
        }
    }

    /// Matrix generator, or `None` for the Grassmann letters.
    pub fn generator(self) -> Option<Generator> {
        Some(match self {
            Letter::Adag => Generator::Adag,
            Letter::A => Generator::A,
            Letter::N => Generator::N,
            Letter::QN(k) => Generator::QPowN(Rational64::new(k as i64, 4)),
            Letter::Fdag => Generator::Fdag,
            Letter::F => Generator::F,
            Letter::M => Generator::M,
            Letter::QM(k) => Generator::QPowM(Rational64::new(k as i64, 4)),
            Letter::Psi | Letter::PsiBar => return None,
        })
    }
}

fn quarters(k: i32) -> Rational64 {
    Rational64::new(k as i64, 4)
}

#[derive(Debug, Clone, PartialEq)]
pub enum OpExpr {
    Gen(Letter),
    Scalar(LaurentCoeff),
    Product(Vec<OpExpr>),
    Sum(Vec<OpExpr>),
    Neg(Box<OpExpr>),
    Pow(Box<OpExpr>, u32),
}

impl OpExpr {
    /// Distribute into a linear combination of words.
    pub fn expand(&self) -> Vec<(LaurentCoeff, Word)> {
        match self {
            OpExpr::Gen(l) => vec![(LaurentCoeff::one(), vec![*l])],
            OpExpr::Scalar(c) => vec![(c.clone(), vec![])],
            OpExpr::Sum(ts) => ts.iter().flat_map(|t| t.expand()).collect(),
            OpExpr::Neg(e) => e.expand().into_iter().map(|(c, w)| (-c, w)).collect(),
            OpExpr::Product(fs) => fs
                .iter()
                .fold(vec![(LaurentCoeff::one(), vec![])], |acc, f| product(&acc, &f.expand())),
            OpExpr::Pow(e, k) => {
                let base = e.expand();
                (0..*k).fold(vec![(LaurentCoeff::one(), vec![])], |acc, _| product(&acc, &base))
            }
        }
    }
}

fn product(x: &[(LaurentCoeff, Word)], y: &[(LaurentCoeff, Word)]) -> Vec<(LaurentCoeff, Word)> {
    let mut out = Vec::with_capacity(x.len() * y.len());
    for (c1, w1) in x {
        for (c2, w2) in y {
            let mut w = w1.clone();
            w.extend_from_slice(w2);
            out.push((c1 * c2, w));
        }
    }
    out
}

/// Exponent tuple of a canonical monomial, compared lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    pub adag: u32,
    pub a: u32,
    pub n: u32,
    /// Exponent of `q^{N}` in quarters.
    pub qn: i32,
    pub fdag: u32,
    pub f: u32,
    pub m: u32,
    pub qm: i32,
    pub psi: u32,
    pub psibar: u32,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    /// Read exponents off a word already in canonical order.
    pub fn from_sorted_word(w: &[Letter]) -> Self {
        let mut m = Self::default();
        for l in w {
            match *l {
                Letter::Adag => m.adag += 1,
                Letter::A => m.a += 1,
                Letter::N => m.n += 1,
                Letter::QN(k) => m.qn += k,
                Letter::Fdag => m.fdag += 1,
                Letter::F => m.f += 1,
                Letter::M => m.m += 1,
                Letter::QM(k) => m.qm += k,
                Letter::Psi => m.psi += 1,
                Letter::PsiBar => m.psibar += 1,
            }
        }
        m
    }

    pub fn word(&self) -> Word {
        let mut w = Vec::new();
        let rep = |w: &mut Word, l: Letter, k: u32| w.extend(std::iter::repeat(l).take(k as usize));
        rep(&mut w, Letter::Adag, self.adag);
        rep(&mut w, Letter::A, self.a);
        rep(&mut w, Letter::N, self.n);
        if self.qn != 0 {
            w.push(Letter::QN(self.qn));
        }
        rep(&mut w, Letter::Fdag, self.fdag);
        rep(&mut w, Letter::F, self.f);
        rep(&mut w, Letter::M, self.m);
        if self.qm != 0 {
            w.push(Letter::QM(self.qm));
        }
        rep(&mut w, Letter::Psi, self.psi);
        rep(&mut w, Letter::PsiBar, self.psibar);
        w
    }

    /// `adag^2*a*qN(-1)`, or empty for the unit monomial.
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        let mut push = |name: String, k: u32| match k {
            0 => {}
            1 => parts.push(name),
            _ => parts.push(format!("{name}^{k}")),
        };
        push("adag".into(), self.adag);
        push("a".into(), self.a);
        push("N".into(), self.n);
        if self.qn != 0 {
            push(Letter::QN(self.qn).name(), 1);
        }
        push("Fdag".into(), self.fdag);
        push("F".into(), self.f);
        push("M".into(), self.m);
        if self.qm != 0 {
            push(Letter::QM(self.qm).name(), 1);
        }
        push("psi".into(), self.psi);
        push("psibar".into(), self.psibar);
        parts.join("*")
    }
}

/// Canonical linear combination of monomials; equal iff identical.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NormalForm {
    terms: BTreeMap<Monomial, LaurentCoeff>,
}

impl NormalForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(c: LaurentCoeff) -> Self {
        let mut out = Self::zero();
        out.add_term(Monomial::one(), &c);
        out
    }

    pub fn add_term(&mut self, m: Monomial, c: &LaurentCoeff) {
        let e = self.terms.entry(m).or_insert_with(LaurentCoeff::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
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

    pub fn coeff(&self, m: &Monomial) -> LaurentCoeff {
        self.terms.get(m).cloned().unwrap_or_else(LaurentCoeff::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &LaurentCoeff)> {
        self.terms.iter()
    }

    pub fn sub(&self, other: &NormalForm) -> NormalForm {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, &-c);
        }
        out
    }

    /// Expression whose normal form is `self`.
    pub fn to_expr(&self) -> OpExpr {
        let terms: Vec<OpExpr> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                let mut fs = vec![OpExpr::Scalar(c.clone())];
                fs.extend(m.word().into_iter().map(OpExpr::Gen));
                OpExpr::Product(fs)
            })
            .collect();
        match terms.len() {
            0 => OpExpr::Scalar(LaurentCoeff::zero()),
            1 => terms.into_iter().next().expect("one term"),
            _ => OpExpr::Sum(terms),
        }
    }

    /// Readable rendering with coefficients in powers of `q` and recognised
    /// q-integers shown as `[k]_B` / `[k]_F`, highest monomial first.
    pub fn pretty(&self) -> String {
        self.render_with(|c| pretty_coeff(c))
    }

    /// Rendering with every coefficient evaluated at `q`.
    pub fn pretty_numeric(&self, q: f64) -> Result<String, QError> {
        for c in self.terms.values() {
            c.eval(q)?;
        }
        Ok(self.render_with(|c| {
            let v = c.eval(q).expect("checked above");
            CoeffText::Single(format!("{v}"))
        }))
    }

    fn render_with(&self, coeff: impl Fn(&LaurentCoeff) -> CoeffText) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let mono = m.render();
            let text = match coeff(c) {
                CoeffText::Single(t) => t,
                CoeffText::Grouped(t) if mono.is_empty() => t,
                CoeffText::Grouped(t) => format!("({t})"),
            };
            let (neg, body) = match text.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, text),
            };
            let term = match (body.as_str(), mono.is_empty()) {
                (b, true) => b.to_string(),
                ("1", false) => mono,
                (b, false) => format!("{b}*{mono}"),
            };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&term);
        }
        out
    }

    /// Evaluate at `q` with generators replaced by their truncated matrices.
    pub fn to_matrix(&self, space: &SuperFockSpace) -> Result<OperatorMatrix<Complex64>, OpcalcError> {
        let mut total = OperatorMatrix::zeros(space.dim(), "normal form");
        for (m, c) in &self.terms {
            let v = c.eval(space.q())?;
            total = total.add(&word_matrix(&m.word(), space)?.scale(Complex64::new(v, 0.0)));
        }
        Ok(total)
    }
}

enum CoeffText {
    /// Safe to juxtapose as a factor.
    Single(String),
    /// Needs parentheses in front of a monomial.
    Grouped(String),
}

fn pretty_coeff(c: &LaurentCoeff) -> CoeffText {
    for k in 2..=24 {
        for (kind, tag) in [(QKind::Boson, "B"), (QKind::Fermion, "F")] {
            let qi = LaurentCoeff::q_int(kind, k);
            if qi.terms().count() < 2 {
                continue;
            }
            if *c == qi {
                return CoeffText::Single(format!("[{k}]_{tag}"));
            }
            if *c == -qi.clone() {
                return CoeffText::Single(format!("-[{k}]_{tag}"));
            }
        }
    }
    let text = c.render_q();
    if c.terms().count() > 1 {
        CoeffText::Grouped(text)
    } else {
        CoeffText::Single(text)
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

/// Product of generator matrices for a word without Grassmann letters.
pub fn word_matrix(w: &[Letter], space: &SuperFockSpace) -> Result<OperatorMatrix<Complex64>, OpcalcError> {
    let mut acc = OperatorMatrix::identity(space.dim());
    for l in w {
        let g = l
            .generator()
            .ok_or_else(|| OpcalcError::Domain(format!("{} has no matrix representation", l.name())))?;
        acc = acc.matmul(&operator_matrix(g, space));
    }
    Ok(acc)
}

pub fn normal_order(e: &OpExpr) -> NormalForm {
    normal_order_with(e, Strategy::Leftmost)
}

pub fn normal_order_with(e: &OpExpr, strategy: Strategy) -> NormalForm {
    normal_order_words(e.expand(), strategy)
}

/// Outcome of normal-ordering `X (X⁺)^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    pub kind: QKind,
    pub n: u32,
    pub normal_form: NormalForm,
    /// Coefficient of `(X⁺)^{n-1} D`.
    pub coefficient: LaurentCoeff,
}

/// Normal-order `X (X⁺)^n` and check it equals `λ^n (X⁺)^n X + [n] (X⁺)^{n-1} D`
/// with `(λ, D) = (q, q^{-N})` for bosons and `(-q, 1)` for fermions.
pub fn derive_iteration(kind: QKind, n: u32) -> Result<Derivation, OpcalcError> {
    if !(1..=12).contains(&n) {
        return Err(OpcalcError::Domain(format!("derive_iteration needs 1 ≤ n ≤ 12, got {n}")));
    }
    let (x, xd) = match kind {
        QKind::Boson => (Letter::A, Letter::Adag),
        QKind::Fermion => (Letter::F, Letter::Fdag),
    };
    let mut word = vec![x];
    word.extend(std::iter::repeat(xd).take(n as usize));
    let nf = normal_order_words(vec![(LaurentCoeff::one(), word)], Strategy::Leftmost);

    let (lead, tail) = match kind {
        QKind::Boson => (
            Monomial { adag: n, a: 1, ..Monomial::one() },
            Monomial { adag: n - 1, qn: -4, ..Monomial::one() },
        ),
        QKind::Fermion => (
            Monomial { fdag: n, f: 1, ..Monomial::one() },
            Monomial { fdag: n - 1, ..Monomial::one() },
        ),
    };
    let lambda_n = match kind {
        QKind::Boson => LaurentCoeff::q_pow(n as i32),
        QKind::Fermion => LaurentCoeff::monomial(if n % 2 == 0 { 1 } else { -1 }, 4 * n as i32),
    };
    let coefficient = nf.coeff(&tail);
    let expected = LaurentCoeff::q_int(kind, n);

    let mut rebuilt = NormalForm::zero();
    rebuilt.add_term(lead, &lambda_n);
    rebuilt.add_term(tail, &expected);
    if nf != rebuilt {
        return Err(OpcalcError::Derivation {
            kind: kind.label(),
            n,
            got: nf.pretty(),
            expected: rebuilt.pretty(),
        });
    }
    Ok(Derivation {
        kind,
        n,
        normal_form: nf,
        coefficient,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformationReport {
    /// `f f⁺ + q^{1/2} f⁺ f - q^{-M/2}` with `f = q^{-M/4} F`.
    pub main: NormalForm,
    /// Same combination with the wrong sign `f = q^{+M/4} F`.
    pub control: NormalForm,
    /// `[M, f⁺] - f⁺`.
    pub number: NormalForm,
}

impl TransformationReport {
    pub fn passes(&self) -> bool {
        self.main.is_zero() && !self.control.is_zero() && self.number.is_zero()
    }
}

pub fn check_transformation() -> TransformationReport {
    let relation = |k: i32| {
        let f = vec![Letter::QM(k), Letter::F];
        let fd = vec![Letter::Fdag, Letter::QM(k)];
        let cat = |x: &Word, y: &Word| x.iter().chain(y).copied().collect::<Word>();
        normal_order_words(
            vec![
                (LaurentCoeff::one(), cat(&f, &fd)),
                (LaurentCoeff::s_pow(2), cat(&fd, &f)),
                (LaurentCoeff::from_integer(-1), vec![Letter::QM(-2)]),
            ],
            Strategy::Leftmost,
        )
    };
    let fd = vec![Letter::Fdag, Letter::QM(-1)];
    let mut mfd = vec![Letter::M];
    mfd.extend(&fd);
    let mut fdm = fd.clone();
    fdm.push(Letter::M);
    let number = normal_order_words(
        vec![
            (LaurentCoeff::one(), mfd),
            (LaurentCoeff::from_integer(-1), fdm),
            (LaurentCoeff::from_integer(-1), fd),
        ],
        Strategy::Leftmost,
    );
    TransformationReport {
        main: relation(-1),
        control: relation(1),
        number,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nf(s: &str) -> NormalForm {
        normal_order(&parse(s).unwrap())
    }

    #[test]
    fn documented_normal_forms() {
        assert_eq!(nf("a adag").pretty(), "q*adag*a + qN(-1)");
        assert_eq!(nf("a adag adag").pretty(), "q^2*adag^2*a + [2]_B*adag*qN(-1)");
        assert_eq!(nf("F Fdag Fdag").pretty(), "q^2*Fdag^2*F + [2]_F*Fdag");
        assert_eq!(nf("F Fdag").pretty(), "-q*Fdag*F + 1");
    }

    #[test]
    fn iteration_coefficients() {
        let b3 = derive_iteration(QKind::Boson, 3).unwrap();
        assert_eq!(b3.coefficient.to_string(), "s^8 + 1 + s^-8");
        let f3 = derive_iteration(QKind::Fermion, 3).unwrap();
        assert_eq!(f3.coefficient.render_q(), "q^2 - q + 1");
        let b1 = derive_iteration(QKind::Boson, 1).unwrap();
        assert_eq!(b1.normal_form, nf("a adag"));
        assert!(derive_iteration(QKind::Boson, 13).is_err());
    }

    #[test]
    fn transformation() {
        let r = check_transformation();
        assert!(r.main.is_zero(), "{}", r.main);
        assert!(!r.control.is_zero());
        assert!(r.number.is_zero(), "{}", r.number);
        assert!(r.passes());
    }

    #[test]
    fn numeric_rendering() {
        assert_eq!(nf("a adag adag").pretty_numeric(0.5).unwrap(), "0.25*adag^2*a + 2.5*adag*qN(-1)");
        assert_eq!(NormalForm::zero().pretty(), "0");
    }

    #[test]
    fn normal_form_expression_round_trip() {
        let x = nf("F Fdag Fdag a adag psibar psi");
        assert_eq!(normal_order(&x.to_expr()), x);
        assert_eq!(normal_order(&parse(&render(&x.to_expr())).unwrap()), x);
    }
}
