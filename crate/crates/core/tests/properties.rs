//! Property tests for the invariants of maps, flows, variations and
//! functionals. Inputs are drawn from seeded generators so failures shrink
//! to a seed.

mod common;

use loewner_core::control::{eval_functional, Atom, LinearFunctional, Transport};
use loewner_core::holomap::{
    check_default, inner, margin, CVec, ConvexCombo, Jet, MapDescriptor,
};
use loewner_core::linalg::{identity, max_abs};
use loewner_core::loewner::{
    evolution_map, flow_jet, integrate_flow, koebe_oracle, HerglotzField, LimitOptions, Tolerances,
};
use loewner_core::variation::{fundamental_solution, needle_field, Horizon, NeedleSpec};
use loewner_core::{c64, Complex64};
use proptest::prelude::*;
use rand::Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig::with_cases(cases)
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn jet_composition_is_associative(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = common::rng(seed);
        let (a, b, c) = (common::jet(&mut r, n, 4), common::jet(&mut r, n, 4), common::jet(&mut r, n, 4));
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right) <= 1e-12 * (1.0 + left.max_abs_diff(&Jet::zero(n, 4).unwrap())));
    }

    #[test]
    fn jacobian_matches_central_differences(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = common::rng(seed);
        let h = common::member(&mut r, n);
        let z = common::point(&mut r, n, 0.7);
        let jac = h.jacobian(&z).unwrap();
        let step = 1e-5;
        for j in 0..n {
            let mut plus = z.to_vec();
            let mut minus = z.to_vec();
            plus[j] += step;
            minus[j] -= step;
            let fp = h.eval(&CVec::new(plus).unwrap()).unwrap();
            let fm = h.eval(&CVec::new(minus).unwrap()).unwrap();
            for i in 0..n {
                let fd = (fp[i] - fm[i]) / (2.0 * step);
                let scale = max_abs(&jac).max(1.0);
                prop_assert!((fd - jac[(i, j)]).norm() <= 1e-6 * scale, "{} vs {}", fd, jac[(i, j)]);
            }
        }
    }

    #[test]
    fn members_are_normalized(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = common::rng(seed);
        let h = common::member(&mut r, n);
        prop_assert!(check_default(&h).unwrap().pass);
        let zero = CVec::zeros(n);
        prop_assert!(h.eval(&zero).unwrap().norm() == 0.0);
        prop_assert!(max_abs(&(h.jacobian(&zero).unwrap() + identity(n))) <= 1e-15);
    }

    #[test]
    fn convex_combination_margin_is_linear(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = common::rng(seed);
        let parts = vec![common::member(&mut r, n), common::member(&mut r, n), common::member(&mut r, n)];
        let mut w: Vec<f64> = (0..3).map(|_| r.gen_range(0.01..1.0)).collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        let combo = MapDescriptor::ConvexCombo(ConvexCombo::new(w.clone(), parts.clone()).unwrap());
        for _ in 0..8 {
            let z = common::point(&mut r, n, 0.95);
            if z.norm() < 1e-6 { continue; }
            let expect: f64 = w.iter().zip(&parts).map(|(w, p)| w * margin(p, &z)).sum();
            prop_assert!((margin(&combo, &z) - expect).abs() <= 1e-12 * (1.0 + expect.abs()));
        }
    }

    #[test]
    fn functional_is_complex_linear(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = common::rng(seed);
        let l = LinearFunctional::new(vec![
            Atom::Point { z: common::point(&mut r, n, 0.8), component: 0, weight: c64(0.3, -1.2) },
            Atom::Coeff { alpha: { let mut a = vec![0; n]; a[n - 1] = 2; a }, component: n - 1, weight: c64(-0.7, 0.4) },
        ]).unwrap();
        let (p, q) = (common::jet(&mut r, n, 3), common::jet(&mut r, n, 3));
        let (a, b) = (c64(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0)), c64(r.gen_range(-2.0..2.0), 0.5));
        let lhs = eval_functional(&l, &p.combine(a, &q, b).unwrap()).unwrap();
        let rhs = a * eval_functional(&l, &p).unwrap() + b * eval_functional(&l, &q).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn semigroup_holds_for_random_fields(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = common::rng(seed);
        let g = common::field(&mut r, n, 3, 2.0);
        let mut ts = [r.gen_range(0.0..3.0), r.gen_range(0.0..3.0), r.gen_range(0.0..3.0)];
        ts.sort_by(f64::total_cmp);
        let pts: Vec<CVec> = (0..3).map(|_| common::point(&mut r, n, 0.9)).collect();
        let check = evolution_map(&g, ts[0], ts[1], ts[2], &pts, &Tolerances::default()).unwrap();
        prop_assert!(check.residual <= 1e-8, "{}", check.residual);
    }

    #[test]
    fn flows_contract_and_decay(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = common::rng(seed);
        let g = common::field(&mut r, n, 3, 2.0);
        let pts: Vec<CVec> = (0..4).map(|_| common::point(&mut r, n, 0.95)).collect();
        let t = r.gen_range(0.0..6.0);
        let f = integrate_flow(&g, 0.0, t, &pts, &Tolerances::default()).unwrap();
        for (z, w) in pts.iter().zip(&f.values) {
            let rz = z.norm();
            prop_assert!(w.norm() <= rz * (1.0 + 1e-8) + 1e-15);
            prop_assert!(w.norm() <= (-t).exp() * rz / ((1.0 - rz) * (1.0 - rz)) * (1.0 + 1e-8) + 1e-15);
        }
    }

    #[test]
    fn origin_is_fixed_and_jet_matches_jacobian(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = common::rng(seed);
        let g = common::field(&mut r, n, 3, 2.0);
        let (s, t) = (r.gen_range(0.0..1.0), r.gen_range(1.0..3.0));
        let tol = Tolerances::default();
        let f = integrate_flow(&g, s, t, &[CVec::zeros(n)], &tol).unwrap();
        prop_assert!(f.values[0].norm() == 0.0);
        prop_assert!(max_abs(&(&f.jacobians[0] - identity(n) * c64((s - t).exp(), 0.0))) <= 1e-9);
        let j = flow_jet(&g, s, t, 3, &tol).unwrap();
        prop_assert!(max_abs(&(j.linear_part() - &f.jacobians[0])) <= 1e-10);
    }

    #[test]
    fn moebius_flows_match_oracle(theta in 0.0..std::f64::consts::TAU, x in -0.9..0.9f64, y in -0.4..0.4f64, t in 0.0..6.0f64) {
        let zeta = Complex64::from_polar(1.0, theta);
        let z = c64(x, y);
        prop_assume!(z.norm() < 0.95);
        let g = HerglotzField::constant(MapDescriptor::moebius1(zeta).unwrap()).unwrap();
        let f = integrate_flow(&g, 0.0, t, &[CVec::from(z)], &Tolerances::default()).unwrap();
        let exact = koebe_oracle(zeta, 0.0, t, z).unwrap();
        prop_assert!((f.values[0][0] - exact).norm() <= 1e-8);
    }

    #[test]
    fn needles_leave_flows_unchanged_off_window(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = common::rng(seed);
        let g = common::field(&mut r, n, 2, 1.0);
        let big_t = 1.5 + r.gen_range(0.0..1.0);
        let eps = 0.2;
        let spec = NeedleSpec::new(big_t, common::member(&mut r, n), eps).unwrap();
        let ge = needle_field(&g, &spec).unwrap();
        let pts: Vec<CVec> = (0..3).map(|_| common::point(&mut r, n, 0.9)).collect();
        let tol = Tolerances::default();
        for (s, t) in [(0.0, big_t - eps), (0.3, big_t - eps - 0.1), (big_t, big_t + 2.0)] {
            let a = integrate_flow(&g, s, t, &pts, &tol).unwrap();
            let b = integrate_flow(&ge, s, t, &pts, &tol).unwrap();
            prop_assert_eq!(&a.values, &b.values);
        }
    }

    #[test]
    fn needle_perturbation_is_uniformly_order_eps(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let n = 1 + (seed % 2) as usize;
        let g = common::field(&mut r, n, 2, 0.5);
        let h = common::member(&mut r, n);
        let pts: Vec<CVec> = (0..3).map(|_| common::point(&mut r, n, 0.8)).collect();
        let times: Vec<f64> = (0..=10).map(|k| 1.0 + k as f64).collect();
        let tol = Tolerances::new(1e-12, 1e-12);
        let gamma = |eps: f64| {
            let spec = NeedleSpec::new(1.0, h.clone(), eps).unwrap();
            let ge = needle_field(&g, &spec).unwrap();
            let mut worst = 0.0f64;
            for &t in &times {
                let a = integrate_flow(&g, 0.0, t, &pts, &tol).unwrap();
                let b = integrate_flow(&ge, 0.0, t, &pts, &tol).unwrap();
                for (x, y) in a.values.iter().zip(&b.values) {
                    worst = worst.max(loewner_core::holomap::max_dist(x, y) / eps);
                }
            }
            worst
        };
        let fitted = gamma(0.1);
        for eps in [0.05, 0.01, 0.001] {
            prop_assert!(gamma(eps) <= 1.5 * fitted + 1e-8);
        }
    }

    #[test]
    fn fundamental_solution_stays_bounded(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let n = 1 + (seed % 2) as usize;
        let g = common::field(&mut r, n, 2, 0.8);
        let z = common::point(&mut r, n, 0.7);
        let opts = LimitOptions::default();
        let mut worst = 0.0f64;
        for t in [1.0, 2.0, 5.0, 10.0, 20.0, 40.0] {
            worst = worst.max(max_abs(&fundamental_solution(&g, 0.0, 1.0, Horizon::At(t), &z, &opts).unwrap()));
        }
        worst = worst.max(max_abs(&fundamental_solution(&g, 0.0, 1.0, Horizon::Infinity, &z, &opts).unwrap()));
        // |det| and entries of Y are controlled by growth bounds on ‖z‖ ≤ 0.7
        prop_assert!(worst.is_finite() && worst <= 1e3, "{}", worst);
    }

    #[test]
    fn transported_functional_is_linear(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let n = 1 + (seed % 2) as usize;
        let g = common::field(&mut r, n, 2, 1.0);
        let mut alpha = vec![0u32; n];
        alpha[0] = 2;
        let l = LinearFunctional::new(vec![
            Atom::Point { z: common::point(&mut r, n, 0.6), component: 0, weight: c64(1.0, 0.5) },
            Atom::Coeff { alpha, component: n - 1, weight: c64(-0.4, 1.0) },
        ]).unwrap();
        let lt = Transport::new(&l, &g, &LimitOptions::default()).unwrap().at(0.7).unwrap();
        let (p, q) = (common::jet(&mut r, n, 3).scale(c64(0.2, 0.0)), common::jet(&mut r, n, 3).scale(c64(0.2, 0.0)));
        let (a, b) = (c64(0.3, -1.1), c64(-0.8, 0.25));
        let lhs = lt.eval_jet(&p.combine(a, &q, b).unwrap()).unwrap();
        let rhs = a * lt.eval_jet(&p).unwrap() + b * lt.eval_jet(&q).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn screen_never_fires_on_moebius_fields(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = common::rng(seed);
        let g = HerglotzField::constant(common::moebius(&mut r, n)).unwrap();
        prop_assert!(!loewner_core::control::support_screen_default(&g, 0.5).unwrap().fires);
    }
}

#[test]
fn margin_matches_inner_product_definition() {
    let z = CVec::new(vec![c64(0.2, 0.1), c64(-0.3, 0.4)]).unwrap();
    let h = MapDescriptor::linear_radial(2);
    let direct = inner(&h.eval(&z).unwrap(), &z).re / z.norm().powi(2);
    assert!((margin(&h, &z) - direct).abs() < 1e-15);
}
