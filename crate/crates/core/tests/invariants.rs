use num_complex::Complex64;

use qjc::jchamiltonian::{build_h, classical_limit, spectrum, trace_compare, ModelParams};
use qjc::qcalculus::{
    euler_check, q_integral, xi_scan, DecayStatus, QuadratureConfig, QuadratureSettings, XiChoice,
};
use qjc::qnumbers::{q_factorial, QKind};
use qjc::qscs::{completeness_check, reproduce, scs_build, scs_overlap, ScsLabel, Target};
use qjc::superfock::{build_space, verify_algebra};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn jackson_integral_is_linear() {
    let cfg = QuadratureConfig::new(QKind::Boson, 1.5).unwrap();
    let f = |x: f64| x * x - 0.3 * x;
    let g = |x: f64| (-x).exp();
    let (a, b) = (2.5, -0.75);
    let q = 0.6;
    let lhs = q_integral(&|x| a * f(x) + b * g(x), &cfg, q).unwrap().value;
    let rhs = a * q_integral(&f, &cfg, q).unwrap().value + b * q_integral(&g, &cfg, q).unwrap().value;
    assert!((lhs - rhs).abs() < 1e-13);
}

#[test]
fn jackson_integral_is_monotone_for_nonnegative_weights() {
    // boson lattice weights are all positive
    let cfg = QuadratureConfig::new(QKind::Boson, 2.0).unwrap();
    let q = 0.5;
    let lo = q_integral(&|x: f64| x.sin().abs(), &cfg, q).unwrap().value;
    let hi = q_integral(&|x: f64| x.sin().abs() + 0.1 * x, &cfg, q).unwrap().value;
    assert!(hi > lo);
    assert!(cfg.nodes(q).iter().all(|(_, w)| *w > 0.0));
}

#[test]
fn jackson_integral_of_monomials() {
    // geometric sum: (1-q²) ξ^{k+1} q^k / (1 - q^{2k+2})
    let q: f64 = 0.7;
    let xi = 1.3;
    let cfg = QuadratureConfig::with_depth(QKind::Boson, xi, 4000).unwrap();
    for k in 0..5 {
        let got = q_integral(&|x: f64| x.powi(k), &cfg, q).unwrap().value;
        let q2 = q * q;
        let oracle = (1.0 - q2) * xi.powi(k + 1) * q.powi(k) / (1.0 - q2.powi(k + 1));
        assert!((got - oracle).abs() < 1e-12, "k={k}: {got} vs {oracle}");
    }
}

#[test]
fn fermion_euler_error_is_non_increasing_under_lattice_doubling() {
    for q in [0.3, 0.5, 0.9] {
        for n in 0..=8 {
            let DecayStatus::Decays { xi_min } = xi_scan(QKind::Fermion, n, q).unwrap() else {
                panic!("fermion kernel decays")
            };
            let mut prev = f64::INFINITY;
            for depth in [32, 64, 128, 256, 512] {
                let cfg = QuadratureConfig::with_depth(QKind::Fermion, xi_min, depth).unwrap();
                let r = euler_check(QKind::Fermion, n, q, &cfg).unwrap();
                let gap = (r.lhs - r.jackson_limit.unwrap()).abs();
                // slack for summation roundoff once the lattice has converged
                let slack = 1e-11 * r.lhs.abs().max(1.0);
                assert!(gap <= prev + slack, "q={q} n={n} depth={depth} gap={gap:e} prev={prev:e}");
                prev = gap;
            }
        }
    }
}

#[test]
fn boson_euler_kernel_never_decays() {
    for q in [0.3, 0.5, 0.9] {
        assert!(matches!(xi_scan(QKind::Boson, 2, q).unwrap(), DecayStatus::NoDecay { .. }));
    }
}

#[test]
fn fixed_xi_below_decay_scale_is_rejected() {
    let settings = QuadratureSettings {
        lattice_depth: 256,
        xi: XiChoice::Fixed(1e-3),
    };
    let (cfg, _) = settings.resolve(QKind::Fermion, 3, 0.5).unwrap();
    assert!(euler_check(QKind::Fermion, 3, 0.5, &cfg).is_err());
}

#[test]
fn algebra_residuals_vanish_in_the_interior() {
    for q in [0.3, 0.5, 0.9] {
        let s = build_space(8, 6, q).unwrap();
        let r = verify_algebra(&s);
        assert!(r.max_interior_abs() <= 1e-12, "q={q}");
    }
}

#[test]
fn overlap_grid_matches_closed_form() {
    let s = build_space(40, 6, 0.5).unwrap();
    let grid: Vec<Complex64> = (0..5)
        .map(|k| Complex64::from_polar(0.2 * k as f64 + 0.1, 1.3 * k as f64))
        .collect();
    for z1 in &grid {
        for z2 in &grid {
            let r = scs_overlap(&ScsLabel::scalar(*z1, c(0.05, 0.02)), &ScsLabel::scalar(*z2, c(-0.03, 0.06)), &s).unwrap();
            assert!(r.difference.max_abs() <= 1e-8);
        }
    }
}

#[test]
fn completeness_offdiagonals_are_exactly_zero() {
    let s = build_space(4, 3, 0.5).unwrap();
    let r = completeness_check(0.5, &s, &QuadratureSettings::default()).unwrap();
    assert_eq!(r.max_offdiagonal, 0.0);
    // diagonal entries factor into boson and fermion ratios
    let d = r.diagonal(2, 1) * r.diagonal(0, 0);
    assert!((d - r.diagonal(2, 0) * r.diagonal(0, 1)).abs() < 1e-12);
}

#[test]
fn reproduce_measures_deviation_of_the_resolved_identity() {
    let s = build_space(4, 3, 0.5).unwrap();
    let r = completeness_check(0.5, &s, &QuadratureSettings::default()).unwrap();
    let rep = reproduce(&Target::Basis(1, 2), &r).unwrap();
    assert!((rep.residual - r.rows[1 * 3 + 2].deviation).abs() < 1e-15);
    let st = scs_build(&ScsLabel::scalar(c(0.3, 0.0), c(0.0, 0.0)), &s, true).unwrap();
    assert!(reproduce(&Target::State(st), &r).is_ok());
    assert!(reproduce(&Target::Basis(9, 0), &r).is_err());
}

#[test]
fn trace_is_coupling_independent() {
    let s = build_space(5, 3, 0.5).unwrap();
    let settings = QuadratureSettings::default();
    let a = trace_compare(&ModelParams::scalar(0.5, 0.3, c(0.0, 0.0), 0.5), &s, &settings).unwrap();
    let b = trace_compare(&ModelParams::scalar(0.5, 0.3, c(0.4, -0.2), 0.5), &s, &settings).unwrap();
    assert_eq!(a.direct, b.direct);
    assert_eq!(a.phase_space, b.phase_space);
}

#[test]
fn direct_trace_is_sum_of_free_energies() {
    let q: f64 = 0.5;
    let s = build_space(3, 3, q).unwrap();
    let r = trace_compare(&ModelParams::scalar(0.5, 0.5, c(0.1, 0.0), q), &s, &QuadratureSettings::default()).unwrap();
    // [0..3]_B = 0, 1, q + 1/q; [0..3]_F = 0, 1, 1 - q
    let nb_sum = 0.0 + 1.0 + (q + 1.0 / q);
    let mf_sum = 0.0 + 1.0 + (1.0 - q);
    let oracle = 3.0 * nb_sum + 3.0 * q.sqrt() * mf_sum;
    assert!((r.direct - oracle).abs() < 1e-13);
}

#[test]
fn classical_limit_converges_monotonically() {
    let mut prev = f64::INFINITY;
    for k in 1..=4 {
        let q = 1.0 - 10f64.powi(-k);
        let r = classical_limit(0.5, 0.5, c(0.1, 0.0), q, 10).unwrap();
        assert!(r.max_abs_diff < prev);
        prev = r.max_abs_diff;
    }
    assert!(prev <= 1e-3);
}

#[test]
fn hamiltonian_spectrum_is_real_and_sorted() {
    let s = build_space(6, 3, 0.8).unwrap();
    let p = ModelParams::scalar(0.6, 0.4, c(0.2, 0.3), 0.8);
    let ev = spectrum(&p, &s).unwrap();
    assert_eq!(ev.len(), s.dim());
    assert!(ev.windows(2).all(|w| w[0] <= w[1]));
    // trace of H equals the sum of its eigenvalues
    let h = build_h(&p, &s).unwrap();
    let tr: f64 = (0..s.dim()).map(|i| h.as_scalar().unwrap().get(i, i).re).sum();
    assert!((tr - ev.iter().sum::<f64>()).abs() < 1e-10);
}

#[test]
fn q_factorials_grow_for_bosons() {
    for q in [0.3, 0.5, 0.9] {
        for n in 1..15 {
            assert!(q_factorial(QKind::Boson, n + 1, q).unwrap() > q_factorial(QKind::Boson, n, q).unwrap());
        }
    }
}
