mod common;

use common::random_tuple;
use lpgen_core::admissibility::*;
use lpgen_core::optimizer::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + b.abs())
}

#[test]
fn closed_forms_equal_conditions() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = [0.0f64; 4];
    for _ in 0..1000 {
        let (p, th, k, m, g) = random_tuple(&mut rng, 1.0 + 1e-9, 2.0);
        worst[0] = worst[0].max(rel(sup_f2_sub2(p, th, k, m, g).unwrap().closed_form, pdis_lhs(p, th, k, m, g).unwrap()));
        worst[1] = worst[1].max(rel(sup_f1_sub2(p, th, k, m).unwrap().closed_form, pdis_lhs(p, th, k, m, 0.0).unwrap()));
        let (p, th, k, m, g) = random_tuple(&mut rng, 2.0, 6.0);
        worst[2] = worst[2].max(rel(sup_f2_ge2(p, th, k, m, g).unwrap().closed_form, pdis1_lhs(p, th, k, m, g).unwrap()));
        worst[3] = worst[3].max(rel(sup_f1_ge2(p, th, k, m).unwrap().closed_form, pdis1_lhs(p, th, k, m, 0.0).unwrap()));
    }
    assert!(worst.iter().all(|w| *w < 1e-12), "{worst:?}");
}

/// Random results for one regime whose condition value lies in [−10, 1].
fn tuples_for(regime: Regime, count: usize) -> Vec<OptimizerResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(100 + regime as u64);
    let mut out = Vec::new();
    while out.len() < count {
        let r = match regime {
            Regime::Sub2F2 => {
                let (p, th, k, m, g) = random_tuple(&mut rng, 1.05, 1.95);
                sup_f2_sub2(p, th, k, m, g).unwrap()
            }
            Regime::Sub2F1 => {
                let (p, th, k, m, _) = random_tuple(&mut rng, 1.05, 1.95);
                sup_f1_sub2(p, th, k, m).unwrap()
            }
            Regime::Ge2F2 => {
                let (p, th, k, m, g) = random_tuple(&mut rng, 2.0, 6.0);
                sup_f2_ge2(p, th, k, m, g).unwrap()
            }
            Regime::Ge2F1 => {
                let (p, th, k, m, _) = random_tuple(&mut rng, 2.0, 6.0);
                sup_f1_ge2(p, th, k, m).unwrap()
            }
        };
        if r.closed_form >= -10.0 {
            out.push(r);
        }
    }
    out
}

#[test]
fn lattice_oracle_converges_to_closed_forms() {
    for regime in [Regime::Sub2F2, Regime::Ge2F2, Regime::Ge2F1, Regime::Sub2F1] {
        for r in tuples_for(regime, 20) {
            let gaps: Vec<f64> = [50, 100, 200, 400]
                .iter()
                .map(|&n| r.clone().with_oracle(n).unwrap().oracle_gap.unwrap())
                .collect();
            assert!(gaps[3] < 1e-3, "{regime:?} {gaps:?} {:?}", r.constants);
            assert!(gaps.windows(2).all(|w| w[1] <= w[0]), "{regime:?} {gaps:?}");
        }
    }
}

/// Gradient of the objective restricted to the active constraint, at the printed point.
fn reduced_gradient(r: &OptimizerResult) -> Vec<(f64, f64)> {
    let k = &r.constants;
    let e = &r.eps_star;
    match k.regime {
        Regime::Sub2F2 => {
            let pull = k.b / (e[0] * e[0]);
            vec![
                (k.c / (e[1] * e[1]), pull * k.f),
                (k.d / (e[2] * e[2]), pull * k.g),
                (k.d / (e[3] * e[3]), pull * k.h),
            ]
        }
        Regime::Ge2F2 => vec![
            (k.d / (e[2] * e[2]), k.b / (e[0] * e[0]) * k.f / k.e),
            (k.d / (e[3] * e[3]), k.c / (e[1] * e[1]) * k.g / k.e),
        ],
        _ => unreachable!(),
    }
}

#[test]
fn printed_points_are_stationary() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (p, th, k, m, g) = random_tuple(&mut rng, 1.05, 1.95);
        let (k, g) = (k.max(1e-3), g.max(1e-3));
        let a1 = sup_f2_sub2(p, th, k, m, g).unwrap();
        let (p, th, _, _, _) = random_tuple(&mut rng, 2.05, 6.0);
        let a2 = sup_f2_ge2(p, th, k, m, g).unwrap();
        for r in [a1, a2] {
            for (push, pull) in reduced_gradient(&r) {
                worst = worst.max((push - pull).abs() / push.max(pull));
            }
        }
    }
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn gamma_zero_sufficient_case() {
    for i in 0..=980 {
        let p = 2.0 + i as f64 * 0.1;
        assert!(gamma_zero_conditions(p, 0.4, 1.0, 2).ge2 > 0.0, "p = {p}");
    }
}

/// Number of local extrema of the cubic, counted from sign changes of consecutive differences.
fn scanned_critical_points(c: &Cubic) -> usize {
    let bound = 1.0 + (c.c2.abs() + c.c1.abs() + c.c0.abs()) / c.c3;
    let n = 400_000;
    let step = 2.0 * bound / n as f64;
    let mut count = 0;
    let mut prev = c.eval(-bound + step) - c.eval(-bound);
    for i in 1..n {
        let x = -bound + i as f64 * step;
        let diff = c.eval(x + step) - c.eval(x);
        if diff * prev < 0.0 {
            count += 1;
        }
        if diff != 0.0 {
            prev = diff;
        }
    }
    count
}

#[test]
fn discriminant_sign_matches_critical_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let (_, th, k, m, _) = random_tuple(&mut rng, 1.0, 2.0);
        let a = cubic_analysis(th, k, m);
        let expected = if a.delta > 0.0 { 2 } else { 0 };
        assert_eq!(scanned_critical_points(&Cubic::new(th, k, m)), expected, "θ={th} κ={k} m={m} Δ={}", a.delta);
        assert_eq!(a.p1.is_some(), a.delta >= 0.0);
    }
}

#[test]
fn printed_discriminant_differs_from_true_one() {
    // K = κ²(√m+m)² = 1
    let a = cubic_analysis(0.0, 0.5, 1);
    assert_eq!(a.delta_printed, 17.0);
    assert!(a.delta < 0.0);
}

proptest! {
    #[test]
    fn sub2_closed_form_is_condition(p in 1.001f64..1.999, t in 0.0f64..1.0, k in 0.0f64..2.0, m in 1usize..=5, g in 0.0f64..2.0) {
        let th = t * p;
        let r = sup_f2_sub2(p, th, k, m, g).unwrap();
        prop_assert!(rel(r.closed_form, pdis_lhs(p, th, k, m, g).unwrap()) < 1e-12);
    }

    #[test]
    fn ge2_closed_form_is_condition(p in 2.0f64..20.0, t in 0.0f64..1.0, k in 0.0f64..2.0, m in 1usize..=5, g in 0.0f64..2.0) {
        let th = t * p;
        let r = sup_f2_ge2(p, th, k, m, g).unwrap();
        prop_assert!(rel(r.closed_form, pdis1_lhs(p, th, k, m, g).unwrap()) < 1e-12);
    }

    #[test]
    fn conditions_decrease_in_theta_kappa_gamma(p in 1.01f64..6.0, t in 0.0f64..0.9, k in 0.0f64..2.0, m in 1usize..=5, g in 0.0f64..2.0, bump in 0.0f64..0.5) {
        let th = t * p;
        let base = regime_lhs(p, th, k, m, g).unwrap();
        prop_assert!(regime_lhs(p, th + bump * (p - th) / 2.0, k, m, g).unwrap() <= base);
        prop_assert!(regime_lhs(p, th, k + bump, m, g).unwrap() <= base);
        prop_assert!(regime_lhs(p, th, k, m, g + bump).unwrap() <= base);
    }

    #[test]
    fn cubic_discriminant_sign_agrees(t in 0.0f64..2.0, k in 0.0f64..2.0, m in 1usize..=5) {
        let a = cubic_analysis(t, k, m);
        prop_assume!(a.delta.abs() > 1e-6);
        let expected = if a.delta > 0.0 { 2 } else { 0 };
        prop_assert_eq!(scanned_critical_points(&Cubic::new(t, k, m)), expected);
    }

    #[test]
    fn selected_epsilons_are_feasible(p in 1.05f64..6.0, m in 1usize..=5) {
        // small constants keep the regime condition positive
        if let Ok(c) = select_epsilons(p, 0.1, 0.05, m, 0.01) {
            prop_assert!(c.all_ok());
        } else {
            prop_assert!(false, "infeasible at p = {}", p);
        }
    }
}
