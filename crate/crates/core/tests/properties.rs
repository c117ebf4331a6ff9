//! Property tests for the invariants that hold across families, tuples and test functions.

use lpgen_core::admissibility::{gamma_zero_conditions, pdis_lhs};
use lpgen_core::discrete::*;
use lpgen_core::fields::*;
use lpgen_core::identities::*;
use lpgen_core::optimizer::sup_f2_sub2;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn desk() -> PowerExpField {
    make_power_exp_field(PowerExpParams::example1_desk()).unwrap()
}

fn sym_matrix(m: usize, vals: &[f64]) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(m, m);
    let mut k = 0;
    for i in 0..m {
        for j in i..m {
            a[(i, j)] = vals[k % vals.len()];
            a[(j, i)] = vals[k % vals.len()];
            k += 1;
        }
    }
    a
}

prop_compose! {
    fn power_exp_params()(d in 1usize..=2, m in 1usize..=4, alpha in 0.0f64..=2.0, beta in 0.1f64..1.5,
                          frac in 0.0f64..=1.0, vals in prop::collection::vec(-1.0f64..1.0, 10),
                          scale in -1.0f64..=1.0) -> PowerExpParams {
        PowerExpParams {
            d,
            m,
            alpha,
            beta,
            gamma_drift: frac * alpha / 4.0,
            a_matrices: (0..d).map(|i| sym_matrix(m, &vals[i..])).collect(),
            coupling: Coupling::Tanh { scale },
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn power_exp_symmetry_and_positivity(params in power_exp_params(), x in prop::collection::vec(-3.0f64..3.0, 2)) {
        let f = make_power_exp_field(params.clone()).unwrap();
        let x = &x[..params.d];
        let q = f.q(x);
        prop_assert_eq!(&q, &q.transpose());
        for b in f.b(x) {
            prop_assert_eq!(&b, &b.transpose());
        }
        prop_assert!(f.vscal(x) >= std::f64::consts::E);
    }

    #[test]
    fn power_exp_grad_v_second_order(params in power_exp_params(), x in prop::collection::vec(-1.5f64..1.5, 2)) {
        let f = make_power_exp_field(params.clone()).unwrap();
        let x = &x[..params.d];
        let g = f.grad_v(x);
        let errs: Vec<f64> = [1e-2, 5e-3, 2.5e-3].iter().map(|&h| {
            (0..params.d).map(|i| {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[i] += h;
                xm[i] -= h;
                ((f.vscal(&xp) - f.vscal(&xm)) / (2.0 * h) - g[i]).abs()
            }).fold(0.0, f64::max)
        }).collect();
        // skip points where the error is already at round-off
        prop_assume!(errs[2] > 1e-9 * f.vscal(x));
        let order = (errs[0] / errs[2]).log2() / 2.0;
        prop_assert!(order >= 1.9, "{:?}", errs);
    }

    #[test]
    fn gamma_zero_sign_matches_condition(p in 1.001f64..1.999, t in 0.0f64..1.0, k in 0.0f64..2.0, m in 1usize..=5) {
        let th = t * p;
        let a = gamma_zero_conditions(p, th, k, m).sub2;
        let b = pdis_lhs(p, th, k, m, 0.0).unwrap();
        prop_assume!(b.abs() > 1e-12);
        prop_assert_eq!(a > 0.0, b > 0.0);
    }

    #[test]
    fn objective_diverges_at_boundary(p in 1.05f64..1.95, k in 0.05f64..2.0, m in 1usize..=5, g in 0.05f64..2.0, axis in 0usize..4) {
        let r = sup_f2_sub2(p, 0.0, k, m, g).unwrap();
        let mut eps = r.eps_interior.clone();
        eps[axis] *= 1e-12;
        prop_assert!(r.constants.objective(&eps) < -1e6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn identities_are_homogeneous(seed in 0u64..1000, p in 1.2f64..3.5, ci in 0usize..3) {
        let c = [1e-3, 1.0, 1e3][ci];
        let field = desk();
        let grid = QuadratureGrid::covering(1, 1.0, 201).unwrap();
        let u = make_complex_bump(seed, 1, 2, 1.0, 2);
        let cu = u.scaled(c);
        let eta = Eta::constant(1);
        let eps = 1e-2;

        let a = verify_form_bi(&field, &u, &eta, eps, p, &grid).unwrap();
        let b = verify_form_bi(&field, &cu, &eta, eps * c * c, p, &grid).unwrap();
        prop_assert!(rel(b.lhs, c.powf(p) * a.lhs) < 1e-9);
        let a = verify_form_q(&field, &u, eps, p, &grid).unwrap();
        let b = verify_form_q(&field, &cu, eps * c * c, p, &grid).unwrap();
        prop_assert!(rel(b.rhs, c.powf(p) * a.rhs) < 1e-9);

        let n = operator_norms(&field, &u, p, &grid).unwrap();
        let m = operator_norms(&field, &cu, p, &grid).unwrap();
        for (x, y) in [(n.u, m.u), (n.a0, m.a0), (n.drift, m.drift), (n.potential, m.potential), (n.full, m.full)] {
            prop_assert!(rel(y, c * x) < 1e-9);
        }
        prop_assert!(rel(check_estv(&field, &cu, p, &grid).unwrap(), check_estv(&field, &u, p, &grid).unwrap()) < 1e-9);
        prop_assert!(rel(check_norm_equiv(&field, &cu, p, &grid).unwrap().ratio, check_norm_equiv(&field, &u, p, &grid).unwrap().ratio) < 1e-9);
        let r1 = check_rdiss(&field, &u, p, eps, 1.0, &grid).unwrap();
        let r2 = check_rdiss(&field, &cu, p, eps * c * c, 1.0, &grid).unwrap();
        prop_assert!(rel(r2.re_part, c.powf(p) * r1.re_part) < 1e-9);
        prop_assert_eq!(r1.holds, r2.holds);
    }

    #[test]
    fn real_functions_have_real_form(seed in 0u64..1000, p in 1.2f64..3.5) {
        let field = desk();
        let grid = QuadratureGrid::covering(1, 1.0, 201).unwrap();
        let u: ComplexTestFunction = make_bump(seed, 1, 2, 1.0, 3).into();
        let r = check_rdiss(&field, &u, p, 1e-2, 0.0, &grid).unwrap();
        prop_assert!(r.im_part <= 1e-14 * r.magnitude, "{:?}", r);
    }

    #[test]
    fn resolvent_residual_is_small(seed in 0u64..1000, lambda in 1.0f64..10.0) {
        let grid = Grid::with_spacing(1, 2.5, 0.05).unwrap();
        let op = assemble(&desk(), &grid).unwrap();
        let f = GridFunction::from_test_function(grid, &make_bump(seed, 1, 2, 1.0, 3));
        let u = resolvent(&op, lambda, &f).unwrap();
        let au = op.apply(&u);
        let res: Vec<f64> = u.data.iter().zip(&au.data).zip(&f.data).map(|((u, a), f)| lambda * u - a - f).collect();
        let rn = res.iter().map(|r| r * r).sum::<f64>().sqrt();
        let fnorm = f.data.iter().map(|r| r * r).sum::<f64>().sqrt();
        prop_assert!(rn <= 1e-9 * fnorm, "{} vs {}", rn, fnorm);
    }

    #[test]
    fn lp_norms_are_homogeneous(seed in 0u64..1000, p in 1.0f64..6.0, c in -1e3f64..1e3) {
        let grid = Grid::new(2, 1.5, 41).unwrap();
        let f = GridFunction::from_test_function(grid, &make_bump(seed, 2, 2, 1.0, 3));
        let g = GridFunction::from_test_function(grid, &make_bump(seed + 1, 2, 2, 1.0, 3));
        prop_assert!(rel(lp_norm(&f.scaled(c), p), c.abs() * lp_norm(&f, p)) < 1e-12 || c == 0.0);
        prop_assert!(rel(sup_norm(&f.scaled(c)), c.abs() * sup_norm(&f)) < 1e-12 || c == 0.0);
        let sum = f.with_data(f.data.iter().zip(&g.data).map(|(a, b)| a + b).collect());
        prop_assert!(lp_norm(&sum, p) <= (lp_norm(&f, p) + lp_norm(&g, p)) * (1.0 + 1e-12));
    }
}
