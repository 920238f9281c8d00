//! Verification suites behind the subcommands. Each returns report sections,
//! checks and the lines printed on standard output.

use num_complex::Complex64;
use rayon::prelude::*;

use qjc::grassmann::transposition_sign;
use qjc::jchamiltonian::{
    build_h, classical_limit, scs_diagonal, spectrum, trace_compare, ModelParams,
};
use qjc::opcalc::{check_transformation, derive_iteration, normal_order_with, parse, Strategy};
use qjc::qcalculus::{euler_check, euler_check_auto, QuadratureConfig, QuadratureSettings};
use qjc::qnumbers::{boson_q_int_ratio, q_factorial, q_int, LaurentCoeff, QKind};
use qjc::qscs::{
    completeness_check, eigen_residual, reproduce, scs_build, scs_overlap, scs_sign, Annihilator, ScsLabel, Target,
};
use qjc::superfock::{basis_gram, build_space, constructed_state, gram, iterate_identity, verify_algebra, SignConvention};

use crate::report::{Cell, Check, Section};

/// Default tolerances, one per suite.
pub mod tol {
    pub const QNUM: f64 = 1e-12;
    pub const FOCK: f64 = 1e-12;
    pub const EULER: f64 = 1e-6;
    pub const OVERLAP: f64 = 1e-8;
    pub const COMPLETE: f64 = 1e-6;
    pub const EIGEN: f64 = 1e-10;
    pub const BRACKET: f64 = 1e-8;
    pub const TRACE: f64 = 1e-5;
    pub const CLASSICAL: f64 = 1e-3;
}

/// Deformation value as given on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QValue {
    Num(f64),
    Symbolic,
}

impl QValue {
    pub fn label(&self) -> String {
        match self {
            QValue::Num(q) => format!("{q}"),
            QValue::Symbolic => "symbolic".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ctx {
    pub qs: Vec<QValue>,
    pub nb: usize,
    pub mf: usize,
    pub tol: Option<f64>,
    pub strict: bool,
    pub quad: QuadratureSettings,
}

impl Ctx {
    pub fn tol(&self, default: f64) -> f64 {
        let t = self.tol.unwrap_or(default);
        if self.strict {
            t / 100.0
        } else {
            t
        }
    }

    /// Numeric deformations only; `symbolic` is an input error here.
    pub fn numeric_qs(&self, command: &str) -> Result<Vec<f64>, String> {
        self.qs
            .iter()
            .map(|q| match q {
                QValue::Num(x) => Ok(*x),
                QValue::Symbolic => Err(format!("{command} needs numeric --q values")),
            })
            .collect()
    }
}

#[derive(Debug, Default)]
pub struct Part {
    pub sections: Vec<Section>,
    pub checks: Vec<Check>,
    pub lines: Vec<String>,
}

impl Part {
    pub fn extend(&mut self, other: Part) {
        self.sections.extend(other.sections);
        self.checks.extend(other.checks);
        self.lines.extend(other.lines);
    }
}

type SuiteResult = Result<Part, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn qnum(ctx: &Ctx, kind: QKind, n: u32) -> SuiteResult {
    let mut part = Part::default();
    let mut sec = Section::new("qnum", &["q", "kind", "n", "value", "factorial", "exact"]);
    let exact = LaurentCoeff::q_int(kind, n);
    let single = ctx.qs.len() == 1;
    let t = ctx.tol(tol::QNUM);
    for q in &ctx.qs {
        match q {
            QValue::Symbolic => {
                let text = exact.render_q();
                part.lines.push(if single { text.clone() } else { format!("symbolic\t{text}") });
                sec.push(vec!["symbolic".into(), kind.label().into(), n.into(), Cell::Text(text), "".into(), exact.to_string().into()]);
            }
            QValue::Num(q) => {
                let v = q_int(kind, n as i64, *q).map_err(err)?;
                let f = q_factorial(kind, n as i64, *q).map_err(err)?;
                let e = exact.eval(*q).map_err(err)?;
                part.lines.push(if single { format!("{v}") } else { format!("{q}\t{v}") });
                sec.push(vec![(*q).into(), kind.label().into(), n.into(), v.into(), f.into(), exact.to_string().into()]);
                part.checks.push(Check::at_most(
                    "qnum",
                    format!("{}[{n}] at q={q}", kind.label()),
                    "float q-integer = exact Laurent q-integer",
                    (v - e).abs() / e.abs().max(1.0),
                    t,
                ));
            }
        }
    }
    part.sections.push(sec);
    Ok(part)
}

/// q-integers for `n ≤ 20`: two evaluation routes, exact recurrences and the `q → 1` limits.
pub fn qnum_suite(ctx: &Ctx) -> SuiteResult {
    let qs = ctx.numeric_qs("qnum suite")?;
    let t = ctx.tol(tol::QNUM);
    let mut part = Part::default();
    let mut sec = Section::new("qnum_table", &["q", "n", "boson", "boson_ratio", "fermion"]);
    for &q in &qs {
        let mut worst = 0.0f64;
        for n in 0..=20u32 {
            let b = q_int(QKind::Boson, n as i64, q).map_err(err)?;
            let f = q_int(QKind::Fermion, n as i64, q).map_err(err)?;
            let r = if q < 1.0 { boson_q_int_ratio(n, q) } else { f64::NAN };
            if q < 1.0 {
                worst = worst.max((b - r).abs() / b.abs().max(1.0));
            }
            sec.push(vec![q.into(), n.into(), b.into(), r.into(), f.into()]);
        }
        if q < 1.0 {
            part.checks.push(Check::at_most(
                "qnum",
                format!("sum vs ratio form, q={q}"),
                "[n]_B as symmetric sum = (q^n - q^-n)/(q - 1/q)",
                worst,
                t,
            ));
        }
    }
    let mut rec_ok = true;
    for n in 0..=20u32 {
        let b1 = LaurentCoeff::q_int(QKind::Boson, n + 1);
        let b = &(&LaurentCoeff::q_pow(1) * &LaurentCoeff::q_int(QKind::Boson, n)) + &LaurentCoeff::q_pow(-(n as i32));
        let f1 = LaurentCoeff::q_int(QKind::Fermion, n + 1);
        let f = &LaurentCoeff::one() - &(&LaurentCoeff::q_pow(1) * &LaurentCoeff::q_int(QKind::Fermion, n));
        rec_ok &= b1 == b && f1 == f;
    }
    part.checks.push(Check::holds(
        "qnum",
        "recurrences, n <= 20",
        "[n+1]_B = q[n]_B + q^-n and [n+1]_F = 1 - q[n]_F in Laurent arithmetic",
        rec_ok,
    ));
    let mut lim_ok = true;
    for n in 0..=20i64 {
        lim_ok &= q_int(QKind::Boson, n, 1.0).map_err(err)? == n as f64;
        lim_ok &= q_int(QKind::Fermion, n, 1.0).map_err(err)? == (n % 2) as f64;
    }
    part.checks.push(Check::holds(
        "qnum",
        "q -> 1 limits, n <= 20",
        "[n]_B -> n and [n]_F -> n mod 2",
        lim_ok,
    ));
    part.sections.push(sec);
    Ok(part)
}

pub fn fock(ctx: &Ctx, nb: usize, mf: usize) -> SuiteResult {
    let qs = ctx.numeric_qs("fock-verify")?;
    let t = ctx.tol(tol::FOCK);
    let per_q: Vec<Result<Part, String>> = qs
        .par_iter()
        .map(|&q| {
            let space = build_space(nb, mf, q).map_err(err)?;
            let mut part = Part::default();
            let mut sec = Section::new(
                format!("relations q={q}"),
                &["relation", "interior_abs", "interior_rel", "boundary_abs", "interior_columns"],
            );
            let rep = verify_algebra(&space);
            for r in &rep.relations {
                sec.push(vec![r.name.clone().into(), r.interior_abs.into(), r.interior_rel.into(), r.boundary_abs.into(), r.interior_columns.into()]);
            }
            for (kind, cutoff) in [(QKind::Boson, nb), (QKind::Fermion, mf)] {
                for n in 1..cutoff.saturating_sub(1).min(13) {
                    let r = iterate_identity(kind, n, &space).map_err(err)?;
                    sec.push(vec![r.name.clone().into(), r.interior_abs.into(), r.interior_rel.into(), r.boundary_abs.into(), r.interior_columns.into()]);
                }
            }
            let worst = sec.rows.iter().map(|row| match row[2] {
                Cell::Num(x) => x,
                _ => 0.0,
            });
            let worst = worst.fold(0.0, |a: f64, b| if b.is_nan() { f64::INFINITY } else { a.max(b) });
            part.checks.push(Check::at_most(
                "fock",
                format!("interior residuals, q={q}"),
                "deformed commutation relations and iterated identities on the truncated space",
                worst,
                t,
            ));
            let g = basis_gram(&space);
            let exact = g.iter().enumerate().all(|(i, row)| {
                row.iter()
                    .enumerate()
                    .all(|(j, x)| *x == if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) })
            });
            part.checks.push(Check::holds("fock", format!("basis Gram, q={q}"), "<n,m|n',m'> = delta", exact));
            let built: Vec<Vec<Complex64>> = (0..space.dim())
                .filter_map(|i| {
                    let (n, m) = space.coords(i);
                    constructed_state(&space, n, m)
                })
                .collect();
            let gb = gram(&built);
            let dev = gb
                .iter()
                .enumerate()
                .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, x)| (x - if i == j { 1.0 } else { 0.0 }).norm()))
                .fold(0.0, f64::max);
            part.checks.push(Check::at_most(
                "fock",
                format!("constructed-state Gram, q={q}"),
                "(a+)^n (F+)^m |0> / sqrt([n]_B! [m]_F!) orthonormal",
                dev,
                t,
            ));
            part.sections.push(sec);
            part.lines.push(format!("q={q}: max interior residual {worst:e}"));
            Ok(part)
        })
        .collect();
    collect(per_q)
}

fn collect(parts: Vec<Result<Part, String>>) -> SuiteResult {
    let mut out = Part::default();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

pub fn derivations(ctx: &Ctx) -> SuiteResult {
    let _ = ctx;
    let mut part = Part::default();
    let mut sec = Section::new("derivations", &["kind", "n", "coefficient", "normal_form"]);
    let mut ok = true;
    for kind in [QKind::Boson, QKind::Fermion] {
        for n in 1..=12 {
            match derive_iteration(kind, n) {
                Ok(d) => sec.push(vec![kind.label().into(), n.into(), d.coefficient.render_q().into(), d.normal_form.pretty().into()]),
                Err(e) => {
                    ok = false;
                    sec.push(vec![kind.label().into(), n.into(), "".into(), e.to_string().into()]);
                }
            }
        }
    }
    part.checks.push(Check::holds(
        "derivation",
        "iterated commutators, n <= 12",
        "X (X+)^n normal-orders to lambda^n (X+)^n X + [n] (X+)^(n-1) D",
        ok,
    ));
    let tr = check_transformation();
    let mut sec2 = Section::new("transformation", &["combination", "normal_form"]);
    sec2.push(vec!["main".into(), tr.main.pretty().into()]);
    sec2.push(vec!["control".into(), tr.control.pretty().into()]);
    sec2.push(vec!["number".into(), tr.number.pretty().into()]);
    part.checks.push(Check::holds(
        "derivation",
        "fermion transformation",
        "f = q^(-M/4) F satisfies f f+ + q^(1/2) f+ f = q^(-M/2); the sign-flipped control does not",
        tr.passes(),
    ));
    part.sections.push(sec);
    part.sections.push(sec2);
    Ok(part)
}

pub fn rewrite(ctx: &Ctx, expr: &str) -> SuiteResult {
    let e = parse(expr).map_err(err)?;
    let nf = normal_order_with(&e, Strategy::Leftmost);
    let nf_r = normal_order_with(&e, Strategy::Rightmost);
    let mut part = Part::default();
    let mut sec = Section::new("normal_form", &["q", "monomial", "coefficient"]);
    for q in &ctx.qs {
        match q {
            QValue::Symbolic => {
                part.lines.push(nf.pretty());
                for (m, cf) in nf.terms() {
                    sec.push(vec!["symbolic".into(), m.render().into(), cf.render_q().into()]);
                }
            }
            QValue::Num(q) => {
                part.lines.push(nf.pretty_numeric(*q).map_err(err)?);
                for (m, cf) in nf.terms() {
                    sec.push(vec![(*q).into(), m.render().into(), cf.eval(*q).map_err(err)?.into()]);
                }
            }
        }
    }
    part.checks.push(Check::holds(
        "rewrite",
        "strategy independence",
        "leftmost and rightmost rewriting reach the same normal form",
        nf == nf_r,
    ));
    part.sections.push(sec);
    Ok(part)
}

pub fn euler(ctx: &Ctx, kinds: &[QKind], n_max: u32) -> SuiteResult {
    let qs = ctx.numeric_qs("euler")?;
    let t = ctx.tol(tol::EULER);
    let jobs: Vec<(f64, QKind, u32)> = qs
        .iter()
        .flat_map(|&q| kinds.iter().flat_map(move |&k| (0..=n_max).map(move |n| (q, k, n))))
        .collect();
    let quad = ctx.quad;
    let results: Vec<Result<(qjc::qcalculus::EulerReport, Vec<f64>), String>> = jobs
        .par_iter()
        .map(|&(q, kind, n)| {
            let r = euler_check_auto(kind, n, q, &quad).map_err(err)?;
            let mut errs = Vec::new();
            for k in 0..3 {
                let cfg = QuadratureConfig::with_depth(kind, r.xi, quad.lattice_depth << k).map_err(err)?;
                errs.push(euler_check(kind, n, q, &cfg).map_err(err)?.rel_err);
            }
            Ok((r, errs))
        })
        .collect();
    let mut part = Part::default();
    let mut sec = Section::new(
        "euler",
        &["q", "kind", "n", "xi", "decays", "lhs", "rhs", "rel_err", "lattice_limit", "truncation"],
    );
    let mut mono: Vec<(f64, QKind, bool)> = Vec::new();
    for res in results {
        let (r, errs) = res?;
        let decays = r.status.xi_min().is_some();
        sec.push(vec![
            r.q.into(),
            r.kind.label().into(),
            r.n.into(),
            r.xi.into(),
            decays.into(),
            r.lhs.into(),
            r.rhs.into(),
            r.rel_err.into(),
            r.jackson_limit.unwrap_or(f64::NAN).into(),
            r.truncation.into(),
        ]);
        part.checks.push(Check::at_most(
            "euler",
            format!("{} n={} q={}", r.kind.label(), r.n, r.q),
            "lattice integral of x^n exp(-x) = [n]!",
            r.rel_err,
            t,
        ));
        let non_increasing = errs.windows(2).all(|w| w[1] <= w[0] + 1e-11 * w[0].abs().max(1.0));
        match mono.iter_mut().find(|(q, k, _)| *q == r.q && *k == r.kind) {
            Some(m) => m.2 &= non_increasing,
            None => mono.push((r.q, r.kind, non_increasing)),
        }
    }
    for (q, kind, ok) in mono {
        part.checks.push(Check::holds(
            "euler",
            format!("{} lattice doubling q={q}", kind.label()),
            "Euler error non-increasing as lattice_depth doubles",
            ok,
        ));
    }
    let failed = part.checks.iter().filter(|c| !c.pass).count();
    part.lines.push(format!("euler: {} of {} checks failed", failed, part.checks.len()));
    part.sections.push(sec);
    Ok(part)
}

/// `Σ_{k ≥ from} x^k / [k]!`, summed until the terms are negligible.
fn series_tail(kind: QKind, x: f64, from: usize, q: f64) -> f64 {
    let mut sum = 0.0;
    for k in from..from + 400 {
        let f = q_factorial(kind, k as i64, q).unwrap_or(f64::INFINITY);
        if f == 0.0 {
            continue;
        }
        let term = x.powi(k as i32) / f;
        sum += term;
        if term < 1e-18 * sum.max(1e-300) {
            break;
        }
    }
    sum
}

pub fn overlap_grid() -> Vec<Complex64> {
    (0..5).map(|k| Complex64::from_polar(0.2 * k as f64 + 0.1, 1.3 * k as f64)).collect()
}

pub fn overlap(ctx: &Ctx, nb: usize, mf: usize, pairs: &[(Complex64, Complex64)], psi1: Complex64, psi2: Complex64) -> SuiteResult {
    let qs = ctx.numeric_qs("scs-overlap")?;
    let t = ctx.tol(tol::OVERLAP);
    let mut part = Part::default();
    for q in qs {
        let space = build_space(nb, mf, q).map_err(err)?;
        let rows: Vec<Result<Vec<Cell>, String>> = pairs
            .par_iter()
            .map(|&(z1, z2)| {
                let r = scs_overlap(&ScsLabel::scalar(z1, psi1), &ScsLabel::scalar(z2, psi2), &space).map_err(err)?;
                let d = r.direct.as_scalar().expect("scalar");
                let cl = r.closed.as_scalar().expect("scalar");
                Ok(vec![z1.re.into(), z1.im.into(), z2.re.into(), z2.im.into(), d.re.into(), d.im.into(), cl.re.into(), cl.im.into(), (d - cl).norm().into()])
            })
            .collect();
        let mut sec = Section::new(
            format!("overlap q={q}"),
            &["z1_re", "z1_im", "z2_re", "z2_im", "direct_re", "direct_im", "closed_re", "closed_im", "abs_diff"],
        );
        let mut worst = 0.0f64;
        for r in rows {
            let r = r?;
            if let Cell::Num(x) = r[8] {
                worst = if x.is_nan() { f64::INFINITY } else { worst.max(x) };
            }
            sec.push(r);
        }
        part.checks.push(Check::at_most(
            "overlap",
            format!("closed form vs truncated sum, q={q}"),
            "<z1,psi1|z2,psi2> = N1 N2 exp_B(conj(z1) z2) exp_F(conj(psi1) psi2)",
            worst,
            t,
        ));
        let mut self_sec = Section::new(format!("self-overlap q={q}"), &["z_re", "z_im", "deviation", "tail_bound"]);
        let mut ok = true;
        for &(z, _) in pairs.iter().take(5) {
            let l = ScsLabel::scalar(z, psi1);
            let r = scs_overlap(&l, &l, &space).map_err(err)?;
            let dev = (r.direct.as_scalar().expect("scalar") - 1.0).norm();
            let eb = series_tail(QKind::Boson, z.norm_sqr(), 0, q);
            let ef = series_tail(QKind::Fermion, psi1.norm_sqr(), 0, q);
            let bound = series_tail(QKind::Boson, z.norm_sqr(), nb, q) / eb
                + series_tail(QKind::Fermion, psi1.norm_sqr(), mf, q) / ef
                + 1e-14;
            ok &= dev <= bound;
            self_sec.push(vec![z.re.into(), z.im.into(), dev.into(), bound.into()]);
        }
        part.checks.push(Check::holds(
            "overlap",
            format!("normalized self-overlap, q={q}"),
            "|<z,psi|z,psi> - 1| within the truncated series tail",
            ok,
        ));
        part.lines.push(format!("q={q}: max overlap difference {worst:e}"));
        part.sections.push(sec);
        part.sections.push(self_sec);
    }
    let mut lemma = true;
    for m in 0..=20usize {
        let word: Vec<u8> = (0..m).flat_map(|_| [0u8, 1]).collect();
        let minus = if m % 2 == 0 { 1.0 } else { -1.0 };
        lemma &= (m / 2) % 2 == (m * m.saturating_sub(1) / 2) % 2;
        lemma &= scs_sign(m) == minus * transposition_sign(&word);
    }
    part.checks.push(Check::holds(
        "overlap",
        "sign lemma, m <= 20",
        "floor(m/2) = m(m-1)/2 mod 2 and the coherent-state sign matches the transposition count",
        lemma,
    ));
    Ok(part)
}

pub fn complete(ctx: &Ctx, nb: usize, mf: usize) -> SuiteResult {
    let qs = ctx.numeric_qs("complete")?;
    let t = ctx.tol(tol::COMPLETE);
    let quad = ctx.quad;
    let per_q: Vec<Result<Part, String>> = qs
        .par_iter()
        .map(|&q| {
            let space = build_space(nb, mf, q).map_err(err)?;
            let rep = completeness_check(q, &space, &quad).map_err(err)?;
            let mut part = Part::default();
            let mut sec = Section::new(
                format!("completeness q={q}"),
                &["n", "m", "boson_moment", "fermion_moment", "diagonal", "deviation"],
            );
            for r in &rep.rows {
                sec.push(vec![
                    r.n.into(),
                    r.m.into(),
                    (rep.moments.boson[r.n].lhs / rep.moments.boson[r.n].rhs).into(),
                    (rep.moments.fermion[r.m].lhs / rep.moments.fermion[r.m].rhs).into(),
                    r.diagonal.into(),
                    r.deviation.into(),
                ]);
                part.lines.push(format!("{q}\t{}\t{}\t{:.10}\t{:.3e}", r.n, r.m, r.diagonal, r.deviation));
            }
            part.checks.push(Check::at_most(
                "complete",
                format!("diagonal deviation, q={q}"),
                "integral of |z,psi><z,psi| against the weight resolves the identity",
                rep.max_deviation,
                t,
            ));
            part.checks.push(Check::holds(
                "complete",
                format!("off-diagonals, q={q}"),
                "angular integrals vanish off the diagonal",
                rep.max_offdiagonal == 0.0,
            ));
            let mut worst_basis = 0.0f64;
            for n in 0..nb {
                for m in 0..mf {
                    worst_basis = worst_basis.max(reproduce(&Target::Basis(n, m), &rep).map_err(err)?.residual);
                }
            }
            part.checks.push(Check::at_most(
                "complete",
                format!("reproduce basis states, q={q}"),
                "expansion through the resolved identity returns |n,m>",
                worst_basis,
                t,
            ));
            let target = scs_build(&ScsLabel::scalar(c(0.3, 0.1), c(0.05, 0.0)), &space, true).map_err(err)?;
            let r = reproduce(&Target::State(target), &rep).map_err(err)?;
            part.checks.push(Check::at_most(
                "complete",
                format!("reproduce coherent state, q={q}"),
                "expansion through the resolved identity returns |z,psi>",
                r.residual,
                t,
            ));
            part.sections.push(sec);
            Ok(part)
        })
        .collect();
    collect(per_q)
}

pub fn jc_trace(ctx: &Ctx, nb: usize, mf: usize, omega1: f64, omega2: f64, g: Complex64) -> SuiteResult {
    let qs = ctx.numeric_qs("jc-trace")?;
    let t = ctx.tol(tol::TRACE);
    let mut part = Part::default();
    let mut sec = Section::new("trace", &["q", "direct", "phase_space", "rel_err", "direct_antinormal"]);
    for q in qs {
        let space = build_space(nb, mf, q).map_err(err)?;
        let r = trace_compare(&ModelParams::scalar(omega1, omega2, g, q), &space, &ctx.quad).map_err(err)?;
        sec.push(vec![q.into(), r.direct.into(), r.phase_space.into(), r.rel_err.into(), r.direct_antinormal.into()]);
        part.lines.push(format!("q={q}: direct {} phase-space {} rel_err {:e}", r.direct, r.phase_space, r.rel_err));
        part.checks.push(Check::at_most(
            "trace",
            format!("phase-space trace, q={q}"),
            "Tr H = integral of <z,psi|H|z,psi> against the weight",
            r.rel_err,
            t,
        ));
        part.checks.push(Check::holds(
            "trace",
            format!("coupling diagonal, q={q}"),
            "a F+ and a+ F have zero diagonal in the Fock basis",
            r.coupling_diagonal == 0.0,
        ));
    }
    part.sections.push(sec);
    Ok(part)
}

pub fn jc_spectrum(ctx: &Ctx, nb: usize, mf: usize, omega1: f64, omega2: f64, g: Complex64, classical: bool) -> SuiteResult {
    let qs = ctx.numeric_qs("jc-spectrum")?;
    if classical && mf != 2 {
        return Err("--classical compares against one fermion level and needs --mf 2".into());
    }
    let t = ctx.tol(tol::CLASSICAL);
    let mut part = Part::default();
    for q in qs {
        let space = build_space(nb, mf, q).map_err(err)?;
        let params = ModelParams::scalar(omega1, omega2, g, q);
        let h = build_h(&params, &space).map_err(err)?;
        let h = h.as_scalar().expect("scalar coupling");
        let adj = h.adjoint();
        part.checks.push(Check::holds(
            "spectrum",
            format!("Hermiticity, q={q}"),
            "scalar-coupling H equals its conjugate transpose",
            h.sub(&adj).max_abs() == 0.0,
        ));
        let ev = spectrum(&params, &space).map_err(err)?;
        if classical {
            let r = classical_limit(omega1, omega2, g, q, nb).map_err(err)?;
            let mut sec = Section::new(format!("spectrum q={q}"), &["index", "eigenvalue", "classical", "abs_diff"]);
            for (i, (a, b)) in r.deformed.iter().zip(&r.classical).enumerate() {
                sec.push(vec![i.into(), (*a).into(), (*b).into(), (a - b).abs().into()]);
                part.lines.push(format!("{q}\t{i}\t{a}\t{b}"));
            }
            part.checks.push(Check::at_most(
                "spectrum",
                format!("classical limit, q={q}"),
                "eigenvalues approach those of the undeformed JC Hamiltonian",
                r.max_abs_diff,
                t,
            ));
            part.sections.push(sec);
        } else {
            let mut sec = Section::new(format!("spectrum q={q}"), &["index", "eigenvalue"]);
            for (i, e) in ev.iter().enumerate() {
                sec.push(vec![i.into(), (*e).into()]);
                part.lines.push(format!("{q}\t{i}\t{e}"));
            }
            part.sections.push(sec);
        }
    }
    Ok(part)
}

/// Eigenvalue properties, the diagonal matrix element and the two traces.
pub fn hamiltonian_suite(ctx: &Ctx) -> SuiteResult {
    let qs = ctx.numeric_qs("hamiltonian suite")?;
    let mut part = Part::default();
    for q in qs {
        let space = build_space(40, 6, q).map_err(err)?;
        let mut worst_a = 0.0f64;
        for k in 0..8 {
            let z = Complex64::from_polar(0.5 * (k as f64 + 1.0) / 8.0, 0.9 * k as f64);
            let st = scs_build(&ScsLabel::scalar(z, c(0.0, 0.0)), &space, true).map_err(err)?;
            worst_a = worst_a.max(eigen_residual(&st, Annihilator::A, SignConvention::Koszul).map_err(err)?.interior);
        }
        part.checks.push(Check::at_most(
            "hamiltonian",
            format!("a eigenvalue, nb=40, |z|<=0.5, q={q}"),
            "a|z,psi> = z|z,psi> below the truncation",
            worst_a,
            ctx.tol(tol::EIGEN),
        ));

        let small = build_space(8, 8, q).map_err(err)?;
        let label = ScsLabel::formal(c(0.3, 0.2), 0.4);
        let st = scs_build(&label, &small, true).map_err(err)?;
        let k = eigen_residual(&st, Annihilator::F, SignConvention::Koszul).map_err(err)?;
        let p = eigen_residual(&st, Annihilator::F, SignConvention::Plain).map_err(err)?;
        // both sides are rounded along different paths; allow a few ulps of the largest coefficient
        let roundoff = 16.0 * f64::EPSILON * max_coeff(&st);
        part.checks.push(Check::at_most(
            "hamiltonian",
            format!("F eigenvalue, Koszul signs, q={q}"),
            "F|z,psi> = psi|z,psi> with odd coefficients passing F with a sign",
            k.interior,
            roundoff,
        ));
        let mut sign_identity = true;
        for m in 0..64usize {
            let lhs = if m % 2 == 0 { 1.0 } else { -1.0 } * scs_sign(m + 1);
            sign_identity &= lhs == -scs_sign(m);
        }
        part.checks.push(Check::holds(
            "hamiltonian",
            "F eigenvalue sign identity, m < 64",
            "(-1)^m s(m+1) = -s(m) for s(m) = (-1)^(floor(m/2)+m)",
            sign_identity,
        ));
        let mut sec = Section::new(format!("eigen q={q}"), &["quantity", "value"]);
        sec.push(vec!["a residual (nb=40)".into(), worst_a.into()]);
        sec.push(vec!["F residual, Koszul".into(), k.interior.into()]);
        sec.push(vec!["F residual, plain".into(), p.interior.into()]);

        let params = ModelParams::grassmann(0.5, 0.5, 0.4, q);
        let d = scs_diagonal(&ScsLabel::formal(c(0.4, 0.0), 0.4), &params, &space).map_err(err)?;
        let mut dsec = Section::new(format!("diagonal element q={q}"), &["degree", "abs_diff", "abs_diff_swapped"]);
        let mut worst_d = 0.0f64;
        for deg in (0..=8).step_by(2) {
            let a = d.difference.max_abs_in_degree(deg);
            worst_d = worst_d.max(a);
            dsec.push(vec![deg.into(), a.into(), d.difference_alt.max_abs_in_degree(deg).into()]);
        }
        sec.push(vec!["coupling order matching bracket".into(), d.matching.label().into()]);
        part.checks.push(Check::at_most(
            "hamiltonian",
            format!("diagonal element, every degree, z=0.4, q={q}"),
            "<z,psi|H|z,psi> = 2w1 |z|^2 + 2w2 q^(1/2) psibar psi + (zbar + z) psi psibar",
            worst_d,
            ctx.tol(tol::BRACKET),
        ));

        let s64 = build_space(6, 4, q).map_err(err)?;
        let tr = trace_compare(&ModelParams::scalar(0.5, 0.5, c(0.1, 0.0), q), &s64, &ctx.quad).map_err(err)?;
        sec.push(vec!["trace direct (6x4)".into(), tr.direct.into()]);
        sec.push(vec!["trace phase space (6x4)".into(), tr.phase_space.into()]);
        part.checks.push(Check::at_most(
            "hamiltonian",
            format!("phase-space trace, nb=6, mf=4, q={q}"),
            "Tr H = integral of <z,psi|H|z,psi> against the weight",
            tr.rel_err,
            ctx.tol(tol::TRACE),
        ));
        part.sections.push(sec);
        part.sections.push(dsec);
    }
    let s22 = build_space(2, 2, 0.5).map_err(err)?;
    let tr = trace_compare(&ModelParams::scalar(0.5, 0.5, c(0.1, 0.0), 0.5), &s22, &ctx.quad).map_err(err)?;
    part.checks.push(Check::at_most(
        "hamiltonian",
        "direct trace nb=2, mf=2, q=0.5",
        "sum of 2w1[n]_B + 2w2 q^(1/2)[m]_F over four states = 2 + 2 sqrt(0.5)",
        (tr.direct - (2.0 + 2.0 * 0.5f64.sqrt())).abs(),
        1e-12,
    ));
    Ok(part)
}

fn max_coeff(st: &qjc::qscs::ScsState) -> f64 {
    match &st.coeffs {
        qjc::qscs::Coefficients::Scalar(v) => v.iter().map(|x| x.norm()).fold(0.0, f64::max),
        qjc::qscs::Coefficients::Formal(v) => v.iter().map(|x| x.max_abs_coeff()).fold(0.0, f64::max),
    }
}

/// Spectrum near `q = 1` against the undeformed model.
pub fn classical_suite(ctx: &Ctx) -> SuiteResult {
    let mut part = Part::default();
    let mut sec = Section::new("classical limit", &["q", "max_abs_diff"]);
    let mut prev = f64::INFINITY;
    let mut monotone = true;
    let mut last = f64::NAN;
    for k in 1..=4 {
        let q = 1.0 - 10f64.powi(-k);
        let r = classical_limit(0.5, 0.5, c(0.1, 0.0), q, 10).map_err(err)?;
        monotone &= r.max_abs_diff < prev;
        prev = r.max_abs_diff;
        last = r.max_abs_diff;
        sec.push(vec![q.into(), r.max_abs_diff.into()]);
    }
    part.checks.push(Check::at_most(
        "classical",
        "q = 1 - 1e-4, mf = 2, nb = 10",
        "eigenvalues approach those of the undeformed JC Hamiltonian",
        last,
        ctx.tol(tol::CLASSICAL),
    ));
    part.checks.push(Check::holds(
        "classical",
        "monotone in 1 - q",
        "spectral distance shrinks for q = 1 - 10^-k, k = 1..4",
        monotone,
    ));
    part.sections.push(sec);
    Ok(part)
}
