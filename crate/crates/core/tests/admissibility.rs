mod common;

use common::ClosureField;
use lpgen_core::admissibility::*;
use lpgen_core::fields::{example1_constants, make_power_exp_field, ConstantField, PowerExpParams};
use nalgebra::{DMatrix, DVector};

fn spec(n: usize) -> SampleSpec {
    SampleSpec { points: n, radius: 5.0, seed: 3, directions: 16 }
}

/// Dense 1-D maximization used as an oracle for radial profiles.
fn dense_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    (0..=200_000).map(|k| f(lo + (hi - lo) * k as f64 / 200_000.0)).fold(f64::MIN, f64::max)
}

#[test]
fn kappa_zero_without_drift() {
    let f = ConstantField::heat(2, 2, 1.0).unwrap();
    assert_eq!(estimate_kappa(&f, &spec(200)).unwrap().value, 0.0);
}

#[test]
fn kappa_unit_scalar_drift() {
    let mut f = ClosureField::unit(1, 1);
    f.b = Box::new(|_| vec![DMatrix::from_element(1, 1, 1.0)]);
    assert_eq!(estimate_kappa(&f, &spec(100)).unwrap().value, 1.0);
}

#[test]
fn kappa_example1_below_a0() {
    let f = make_power_exp_field(PowerExpParams::example1_desk()).unwrap();
    let k = estimate_kappa(&f, &spec(500)).unwrap().value;
    let a0 = example1_constants(&PowerExpParams::example1_desk()).unwrap().a0;
    assert!(k <= a0 * (1.0 + 1e-12) && k > a0 - 1e-9, "{k}");
}

#[test]
fn kappa_example1_2d_approaches_a0() {
    // With two coordinates the chain of inequalities is tight only along equal-column directions;
    // a dense direction sweep approaches A0 from below.
    let mut p = PowerExpParams::example1_desk();
    p.d = 2;
    p.alpha = 0.0;
    p.a_matrices = vec![lpgen_core::linalg::swap_matrix(2); 2];
    let f = make_power_exp_field(p.clone()).unwrap();
    let a0 = example1_constants(&p).unwrap().a0;
    let coarse = estimate_kappa(&f, &SampleSpec { directions: 4, ..spec(200) }).unwrap().value;
    let fine = estimate_kappa(&f, &SampleSpec { directions: 256, ..spec(200) }).unwrap().value;
    assert!(coarse <= fine + 1e-15 && fine <= a0 * (1.0 + 1e-12));
    assert!(a0 - fine < 1e-3, "fine {fine} a0 {a0}");
}

#[test]
fn theta_examples() {
    let f = ConstantField::heat(1, 2, 1.0).unwrap();
    assert_eq!(estimate_theta(&f, &spec(100)).unwrap().value, 0.0);

    let mut g = ClosureField::unit(1, 2);
    g.v = Box::new(|x| 1.0 + x[0] * x[0]);
    g.div_b = Box::new(|x| DMatrix::identity(2, 2) * -(1.0 + x[0] * x[0]));
    assert!((estimate_theta(&g, &spec(100)).unwrap().value - 1.0).abs() < 1e-15);

    let e1 = make_power_exp_field(PowerExpParams::example1_desk()).unwrap();
    let t = estimate_theta(&e1, &spec(4000)).unwrap().value;
    let bound = (-1f64).exp();
    assert!(t <= bound + 1e-12 && t > bound - 1e-3, "{t}");
}

#[test]
fn crev_examples() {
    let f = ConstantField::heat(1, 1, 2.0).unwrap();
    let fit = fit_crev(&f, &spec(100), 2.0, &log_grid(1.0, 10), 1.0);
    assert_eq!((fit.gamma, fit.c_gamma), (0.0, 0.0));

    let mut g = ClosureField::unit(1, 1);
    g.v = Box::new(|x| 1.0 + x[0] * x[0]);
    g.grad_v = Box::new(|x| DVector::from_element(1, 2.0 * x[0]));
    let fit = fit_crev(&g, &spec(500), 2.0, &[2.0], 2.0);
    let oracle = dense_max(|x| (2.0 * x.abs() - 2.0 * (1.0 + x * x).powf(1.5)).max(0.0), -5.0, 5.0);
    assert_eq!(fit.c_gamma, oracle);
    assert_eq!(oracle, 0.0);

    let e1 = make_power_exp_field(PowerExpParams::example1_desk()).unwrap();
    for eps in [1e-3, 1e-2, 1e-1] {
        let fit = fit_crev(&e1, &spec(2000), 2.0, &[eps], eps);
        assert!(fit.c_gamma.is_finite());
    }
}

#[test]
fn oscillation_examples() {
    let f = ConstantField::new(DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]), vec![DMatrix::zeros(1, 1); 2], DMatrix::identity(1, 1) * 4.0).unwrap();
    let o = check_oscillation(&f, &spec(100), 1e12);
    assert_eq!(o.gradient_term, 0.0);
    assert!((o.c2 - o.size_term).abs() == 0.0);

    let e1 = make_power_exp_field(PowerExpParams { alpha: 1.5, ..PowerExpParams::example1_desk() }).unwrap();
    assert!(check_oscillation(&e1, &spec(500), 1e12).ok);

    let mut g = ClosureField::unit(2, 1);
    g.q = Box::new(|x| DMatrix::from_row_slice(2, 2, &[1.0 + x[0] * x[0], 0.0, 0.0, 1.0]));
    g.grad_q = Box::new(|x| vec![DMatrix::from_row_slice(2, 2, &[2.0 * x[0], 0.0, 0.0, 0.0]), DMatrix::zeros(2, 2)]);
    g.v = Box::new(|x| 1.0 + x[0] * x[0]);
    let o = check_oscillation(&g, &spec(300), 1e12);
    assert!(o.size_term >= 1.0 - 1e-12 && o.c2 >= 1.0 - 1e-12);
}

#[test]
fn psi_growth_examples() {
    let f = ConstantField::heat(1, 1, 1.0).unwrap();
    let s = SampleSpec { points: 4000, radius: 5.0, seed: 3, directions: 0 };
    let g = check_psi_growth(&f, &s).unwrap();
    let r0 = (std::f64::consts::E - 1.0).sqrt();
    let oracle = dense_max(|r| 4.0 * r * r / ((1.0 + r * r) * (1.0 + r * r).ln()).powi(2), r0, 5.0);
    assert!(g.c <= oracle + 1e-12 && g.c > oracle - 3e-2, "{} vs {oracle}", g.c);

    let mut z = ClosureField::unit(1, 1);
    z.q = Box::new(|_| DMatrix::zeros(1, 1));
    assert_eq!(check_psi_growth(&z, &s).unwrap().c, 0.0);

    let e1 = make_power_exp_field(PowerExpParams { alpha: 2.0, ..PowerExpParams::example1_desk() }).unwrap();
    assert!(check_psi_growth(&e1, &s).unwrap().c.is_finite());

    let mut none = ClosureField::unit(1, 1);
    none.psi = None;
    assert!(check_psi_growth(&none, &s).is_err());
}

#[test]
fn etoile0_examples() {
    let p = 2.0;
    let f = ConstantField::heat(1, 2, 1.0).unwrap();
    assert!(check_etoile0(&f, p, &spec(50)).unwrap().ok);

    let mk = |factor: f64| {
        let mut g = ClosureField::unit(1, 2);
        g.v = Box::new(|x| 1.0 + x[0] * x[0]);
        g.vpot = Box::new(|x| DMatrix::identity(2, 2) * (1.0 + x[0] * x[0]));
        g.div_b = Box::new(move |x| DMatrix::identity(2, 2) * (-factor * p * (1.0 + x[0] * x[0])));
        g
    };
    let e = check_etoile0(&mk(1.0), p, &spec(50)).unwrap();
    assert!(e.ok && e.worst_margin.abs() < 1e-12);
    let e = check_etoile0(&mk(2.0), p, &spec(50)).unwrap();
    assert!(!e.ok);
    let x = e.worst_point[0];
    assert!((e.worst_margin + (1.0 + x * x)).abs() < 1e-9);

    let e1 = make_power_exp_field(PowerExpParams::example1_desk()).unwrap();
    assert!(check_etoile0(&e1, p, &spec(20)).is_err());
}

#[test]
fn lyapunov_examples() {
    for d in [1, 2] {
        let f = ClosureField::unit(d, 1);
        let l = lyapunov_check(&f, &spec(200), 1e12).unwrap();
        assert!((l.lambda - (2.0 * d as f64 - 1.0)).abs() < 1e-12, "{l:?}");
        assert_eq!(l.m_bound, Some(-1.0));
    }
    let e1 = make_power_exp_field(PowerExpParams::example1_desk()).unwrap();
    let l = lyapunov_check(&e1, &spec(1000), 1e12).unwrap();
    assert!(l.ok && l.lambda.is_finite());
}

#[test]
fn estimates_monotone_in_sample_count() {
    let e1 = make_power_exp_field(PowerExpParams { d: 2, a_matrices: vec![lpgen_core::linalg::swap_matrix(2); 2], alpha: 1.0, ..PowerExpParams::example1_desk() }).unwrap();
    let mut prev = (0.0, 0.0);
    for n in [50, 100, 200, 400] {
        let s = spec(n);
        let k = estimate_kappa(&e1, &s).unwrap().value;
        let t = estimate_theta(&e1, &s).unwrap().value;
        assert!(k >= prev.0 && t >= prev.1);
        prev = (k, t);
    }
}

#[test]
fn report_for_desk_config() {
    let e1 = make_power_exp_field(PowerExpParams::example1_desk()).unwrap();
    let opts = ReportOptions { p_list: vec![1.5, 2.0, 3.0], ..Default::default() };
    let r = build_report(&e1, &spec(1000), &opts).unwrap();
    assert!(r.kappa_hat <= 1.0 + 1e-12);
    assert!(r.theta_hat <= 0.3679);
    assert_eq!(r.verdict("generation_ge2", Some(2.0)), Some(Verdict::Pass));
    assert_eq!(r.verdict("scalar_domination", Some(2.0)), Some(Verdict::Pass));
    assert!(!r.admissible_intervals.is_empty());
    let again = build_report(&e1, &spec(1000), &opts).unwrap();
    assert_eq!(r, again);
}
