//! Acceptance suite. One PASS/FAIL line per criterion; exits non-zero when any fails.

use std::time::{Duration, Instant};

use num_complex::Complex64;

use qjc::grassmann::transposition_sign;
use qjc::jchamiltonian::{classical_limit, scs_diagonal, trace_compare, ModelParams};
use qjc::opcalc::{check_transformation, derive_iteration};
use qjc::qcalculus::{euler_check, euler_check_auto, QuadratureConfig, QuadratureSettings};
use qjc::qnumbers::{boson_q_int_ratio, q_factorial, q_int, LaurentCoeff, QKind};
use qjc::qscs::{
    completeness_check, eigen_residual, reproduce, scs_build, scs_overlap, scs_sign, Annihilator, Coefficients,
    ScsLabel, Target,
};
use qjc::superfock::{basis_gram, build_space, constructed_state, gram, iterate_identity, verify_algebra, SignConvention};

const QS: [f64; 3] = [0.3, 0.5, 0.9];

// pinned tolerances
const QNUM_TOL: f64 = 1e-12;
const ALGEBRA_TOL: f64 = 1e-12;
const EULER_TOL: f64 = 1e-6;
const OVERLAP_TOL: f64 = 1e-8;
const COMPLETE_TOL: f64 = 1e-6;
const A_EIGEN_TOL: f64 = 1e-10;
const BRACKET_TOL: f64 = 1e-8;
const TRACE_TOL: f64 = 1e-5;
const CLASSICAL_TOL: f64 = 1e-3;

struct Outcome {
    pass: bool,
    detail: String,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ok(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn criterion1() -> Outcome {
    let mut worst = 0.0f64;
    for q in QS {
        for n in 0..=20u32 {
            let a = q_int(QKind::Boson, n as i64, q).unwrap();
            let b = boson_q_int_ratio(n, q);
            worst = worst.max((a - b).abs() / a.abs().max(1.0));
        }
    }
    let mut rec = true;
    for n in 0..=20u32 {
        let b = &(&LaurentCoeff::q_pow(1) * &LaurentCoeff::q_int(QKind::Boson, n)) + &LaurentCoeff::q_pow(-(n as i32));
        let f = &LaurentCoeff::one() - &(&LaurentCoeff::q_pow(1) * &LaurentCoeff::q_int(QKind::Fermion, n));
        rec &= LaurentCoeff::q_int(QKind::Boson, n + 1) == b && LaurentCoeff::q_int(QKind::Fermion, n + 1) == f;
    }
    let mut lim = true;
    for n in 0..=20i64 {
        lim &= q_int(QKind::Boson, n, 1.0).unwrap() == n as f64;
        lim &= q_int(QKind::Fermion, n, 1.0).unwrap() == [0.0, 1.0][(n % 2) as usize];
    }
    ok(
        worst <= QNUM_TOL && rec && lim,
        format!("sum/ratio {worst:.2e} (tol {QNUM_TOL:e}), recurrences exact {rec}, limits {lim}"),
    )
}

fn criterion2() -> Outcome {
    let mut worst = 0.0f64;
    // iterated identities carry entries up to q^{-n}[n]!, so they are measured relative to the terms
    let mut worst_iter = 0.0f64;
    let mut basis_exact = true;
    let mut built_exact = true;
    for q in QS {
        let s = build_space(8, 6, q).unwrap();
        worst = worst.max(verify_algebra(&s).max_interior_abs());
        for kind in [QKind::Boson, QKind::Fermion] {
            let cutoff = if kind == QKind::Boson { 8 } else { 6 };
            for n in 1..cutoff - 1 {
                worst_iter = worst_iter.max(iterate_identity(kind, n, &s).unwrap().interior_rel);
            }
        }
        let eye = |g: &Vec<Vec<Complex64>>| {
            g.iter()
                .enumerate()
                .all(|(i, r)| r.iter().enumerate().all(|(j, x)| *x == c(if i == j { 1.0 } else { 0.0 }, 0.0)))
        };
        basis_exact &= eye(&basis_gram(&s));
        let built: Vec<_> = (0..s.dim())
            .map(|i| {
                let (n, m) = s.coords(i);
                constructed_state(&s, n, m).unwrap()
            })
            .collect();
        let g = gram(&built);
        let dev = g
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, x)| (x - if i == j { 1.0 } else { 0.0 }).norm()))
            .fold(0.0, f64::max);
        built_exact &= dev <= ALGEBRA_TOL;
    }
    ok(
        worst <= ALGEBRA_TOL && worst_iter <= ALGEBRA_TOL && basis_exact && built_exact,
        format!("interior residual {worst:.2e}, iterated {worst_iter:.2e} relative (tol {ALGEBRA_TOL:e}), basis Gram exact {basis_exact}, constructed Gram {built_exact}"),
    )
}

fn criterion3() -> Outcome {
    let mut derived = true;
    for kind in [QKind::Boson, QKind::Fermion] {
        for n in 1..=12 {
            derived &= derive_iteration(kind, n)
                .map(|d| d.coefficient == LaurentCoeff::q_int(kind, n))
                .unwrap_or(false);
        }
    }
    let t = check_transformation();
    ok(
        derived && t.main.is_zero() && !t.control.is_zero() && t.number.is_zero(),
        format!(
            "iterations n <= 12 {derived}, transformation zero {}, control nonzero {}",
            t.main.is_zero(),
            !t.control.is_zero()
        ),
    )
}

fn criterion4() -> Outcome {
    let settings = QuadratureSettings::default();
    let mut worst = [0.0f64; 2];
    let mut mono = true;
    for q in QS {
        for (ki, kind) in [QKind::Boson, QKind::Fermion].into_iter().enumerate() {
            for n in 0..=8 {
                let r = euler_check_auto(kind, n, q, &settings).unwrap();
                worst[ki] = worst[ki].max(r.rel_err);
                let mut prev = f64::INFINITY;
                for k in 0..4 {
                    let cfg = QuadratureConfig::with_depth(kind, r.xi, settings.lattice_depth << k).unwrap();
                    let e = euler_check(kind, n, q, &cfg).unwrap().rel_err;
                    mono &= e <= prev;
                    prev = e;
                }
            }
        }
    }
    ok(
        worst[0] <= EULER_TOL && worst[1] <= EULER_TOL && mono,
        format!(
            "max rel_err boson {:.2e}, fermion {:.2e} (tol {EULER_TOL:e}), monotone under doubling {mono}",
            worst[0], worst[1]
        ),
    )
}

fn series(kind: QKind, x: f64, from: usize, q: f64) -> f64 {
    let mut sum = 0.0;
    for k in from..from + 400 {
        let term = x.powi(k as i32) / q_factorial(kind, k as i64, q).unwrap();
        sum += term;
        if term < 1e-18 * sum.max(1e-300) {
            break;
        }
    }
    sum
}

fn criterion5() -> Outcome {
    let (nb, mf, q) = (40, 6, 0.5);
    let s = build_space(nb, mf, q).unwrap();
    let grid: Vec<Complex64> = (0..5).map(|k| Complex64::from_polar(0.2 * k as f64 + 0.1, 1.3 * k as f64)).collect();
    let (psi1, psi2) = (c(0.05, 0.02), c(-0.03, 0.06));
    let mut worst = 0.0f64;
    for z1 in &grid {
        for z2 in &grid {
            let r = scs_overlap(&ScsLabel::scalar(*z1, psi1), &ScsLabel::scalar(*z2, psi2), &s).unwrap();
            worst = worst.max(r.difference.max_abs());
        }
    }
    let mut self_ok = true;
    for z in &grid {
        let l = ScsLabel::scalar(*z, psi1);
        let d = (scs_overlap(&l, &l, &s).unwrap().direct.as_scalar().unwrap() - 1.0).norm();
        let (xb, xf) = (z.norm_sqr(), psi1.norm_sqr());
        let bound = series(QKind::Boson, xb, nb, q) / series(QKind::Boson, xb, 0, q)
            + series(QKind::Fermion, xf, mf, q) / series(QKind::Fermion, xf, 0, q)
            + 1e-14;
        self_ok &= d <= bound;
    }
    let mut lemma = true;
    for m in 0..=20usize {
        lemma &= (m / 2) % 2 == (m * m.saturating_sub(1) / 2) % 2;
        let word: Vec<u8> = (0..m).flat_map(|_| [0u8, 1]).collect();
        let parity = if m % 2 == 0 { 1.0 } else { -1.0 };
        lemma &= scs_sign(m) == parity * transposition_sign(&word);
    }
    ok(
        worst <= OVERLAP_TOL && self_ok && lemma,
        format!("overlap diff {worst:.2e} (tol {OVERLAP_TOL:e}), self-overlap in tail bound {self_ok}, sign lemma {lemma}"),
    )
}

fn criterion6() -> Outcome {
    let s = build_space(6, 4, 0.5).unwrap();
    let r = completeness_check(0.5, &s, &QuadratureSettings::default()).unwrap();
    let mut basis = 0.0f64;
    for n in 0..6 {
        for m in 0..4 {
            basis = basis.max(reproduce(&Target::Basis(n, m), &r).unwrap().residual);
        }
    }
    let st = scs_build(&ScsLabel::scalar(c(0.3, 0.1), c(0.05, 0.0)), &s, true).unwrap();
    let scs = reproduce(&Target::State(st), &r).unwrap().residual;
    ok(
        r.max_deviation <= COMPLETE_TOL && r.max_offdiagonal == 0.0 && basis <= COMPLETE_TOL && scs <= COMPLETE_TOL,
        format!(
            "diagonal deviation {:.3e} (D_00 = {:.6}), off-diagonal {:e}, reproduce basis {basis:.3e}, coherent {scs:.3e} (tol {COMPLETE_TOL:e})",
            r.max_deviation,
            r.diagonal(0, 0),
            r.max_offdiagonal
        ),
    )
}

fn criterion7() -> Outcome {
    let q = 0.5;
    let s40 = build_space(40, 6, q).unwrap();
    let mut a_res = 0.0f64;
    for k in 0..8 {
        let z = Complex64::from_polar(0.5 * (k as f64 + 1.0) / 8.0, 0.9 * k as f64);
        let st = scs_build(&ScsLabel::scalar(z, c(0.0, 0.0)), &s40, true).unwrap();
        a_res = a_res.max(eigen_residual(&st, Annihilator::A, SignConvention::Koszul).unwrap().interior);
    }

    // F-eigenvalue: the Koszul signs cancel exactly; what is left is float rounding
    let s8 = build_space(8, 8, q).unwrap();
    let st = scs_build(&ScsLabel::formal(c(0.3, 0.2), 0.4), &s8, true).unwrap();
    let f_res = eigen_residual(&st, Annihilator::F, SignConvention::Koszul).unwrap().interior;
    let f_plain = eigen_residual(&st, Annihilator::F, SignConvention::Plain).unwrap().interior;
    let scale = match &st.coeffs {
        Coefficients::Formal(v) => v.iter().map(|x| x.max_abs_coeff()).fold(0.0, f64::max),
        Coefficients::Scalar(v) => v.iter().map(|x| x.norm()).fold(0.0, f64::max),
    };
    let signs_cancel = (0..64).all(|m| (if m % 2 == 0 { 1.0 } else { -1.0 }) * scs_sign(m + 1) == -scs_sign(m));
    let f_ok = signs_cancel && f_res <= 16.0 * f64::EPSILON * scale;

    let params = ModelParams::grassmann(0.5, 0.5, 0.4, q);
    let d = scs_diagonal(&ScsLabel::formal(c(0.4, 0.0), 0.4), &params, &s40).unwrap();
    let bracket = (0..=8).step_by(2).map(|g| d.difference.max_abs_in_degree(g)).fold(0.0, f64::max);

    let s64 = build_space(6, 4, q).unwrap();
    let tr = trace_compare(&ModelParams::scalar(0.5, 0.5, c(0.1, 0.0), q), &s64, &QuadratureSettings::default()).unwrap();
    let s22 = build_space(2, 2, q).unwrap();
    let small = trace_compare(&ModelParams::scalar(0.5, 0.5, c(0.1, 0.0), q), &s22, &QuadratureSettings::default()).unwrap();
    let hand = 2.0 + 2.0 * 0.5f64.sqrt();
    let small_ok = (small.direct - hand).abs() <= 1e-12;

    ok(
        a_res <= A_EIGEN_TOL && f_ok && bracket <= BRACKET_TOL && tr.rel_err <= TRACE_TOL && small_ok,
        format!(
            "a residual {a_res:.2e} (tol {A_EIGEN_TOL:e}); F residual {f_res:.2e}, signs cancel {signs_cancel}, plain {f_plain:.2e}; \
             bracket {bracket:.2e} (tol {BRACKET_TOL:e}); trace rel_err {:.3e} (tol {TRACE_TOL:e}); direct trace 2x2 {:.5}",
            tr.rel_err, small.direct
        ),
    )
}

fn criterion8() -> Outcome {
    let r = classical_limit(0.5, 0.5, c(0.1, 0.0), 1.0 - 1e-4, 10).unwrap();
    ok(
        r.max_abs_diff <= CLASSICAL_TOL,
        format!("max eigenvalue difference {:.3e} (tol {CLASSICAL_TOL:e})", r.max_abs_diff),
    )
}

fn criterion9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for name in ["first.json", "second.json"] {
        let path = dir.path().join(name);
        let args = ["qjc", "all", "--q", "0.3,0.5,0.9", "--out", path.to_str().unwrap()];
        let code = qjc_cli::run_with(args, None, &mut std::io::sink(), &mut std::io::sink());
        if code == 2 {
            return ok(false, "`all` exited with a configuration error");
        }
        files.push(std::fs::read(&path).unwrap());
    }
    ok(
        files[0] == files[1] && !files[0].is_empty(),
        format!("two `all` reports of {} bytes, identical {}", files[0].len(), files[0] == files[1]),
    )
}

fn main() {
    type Criterion = fn() -> Outcome;
    let criteria: [(u32, &str, Criterion, Duration); 9] = [
        (1, "q-numbers", criterion1, Duration::from_secs(1)),
        (2, "algebra representation", criterion2, Duration::from_secs(1)),
        (3, "symbolic derivations", criterion3, Duration::from_secs(5)),
        (4, "q-Euler integrals", criterion4, Duration::from_secs(5)),
        (5, "coherent-state overlaps", criterion5, Duration::from_secs(10)),
        (6, "completeness", criterion6, Duration::from_secs(10)),
        (7, "Hamiltonian", criterion7, Duration::from_secs(5)),
        (8, "classical limit", criterion8, Duration::from_secs(1)),
        (9, "determinism", criterion9, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (id, name, f, budget) in criteria {
        let t = Instant::now();
        let o = f();
        let elapsed = t.elapsed();
        let pass = o.pass && elapsed <= budget;
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {id} ({name}): {} [{:.2}s of {}s]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
