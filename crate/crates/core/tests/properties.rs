use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;

use cylrad::cylindrical::{compose, CylindricalLevy, JumpLaw, LevyDriver, PathSource};
use cylrad::operators::{factorize, LinearOperator};
use cylrad::regularize::{choose_truncation, regularize_series, truncation_tail_bound, Radonifier};
use cylrad::space::{
    gram_schmidt_onb, hs_inclusion_norm_for_system, HilbertianSeminorm, ModelVector, OrthonormalSystem,
};

fn vec_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, n)
}

fn mat_strategy(r: usize, c: usize) -> impl Strategy<Value = DMatrix<f64>> {
    vec_strategy(r * c).prop_map(move |v| DMatrix::from_vec(r, c, v))
}

/// Dimension, a factor `A` (so `G = A Aᵀ` has rank ≤ cols), and two test vectors.
fn seminorm_case() -> impl Strategy<Value = (usize, DMatrix<f64>, Vec<f64>, Vec<f64>)> {
    (2usize..7).prop_flat_map(|n| (Just(n), (1..=n).prop_flat_map(move |r| mat_strategy(n, r)), vec_strategy(n), vec_strategy(n)))
}

fn mv(v: Vec<f64>) -> ModelVector {
    ModelVector::new(v).unwrap()
}

fn dense(a: &DMatrix<f64>) -> HilbertianSeminorm {
    HilbertianSeminorm::dense("q", a * a.transpose()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parallelogram_law((_n, a, x, y) in seminorm_case()) {
        let q = dense(&a);
        let (x, y) = (mv(x), mv(y));
        let lhs = q.eval(&(&x + &y)).unwrap().powi(2) + q.eval(&(&x - &y)).unwrap().powi(2);
        let rhs = 2.0 * q.eval(&x).unwrap().powi(2) + 2.0 * q.eval(&y).unwrap().powi(2);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs));
    }

    #[test]
    fn seminorm_triangle_and_homogeneity((_n, a, x, y) in seminorm_case(), t in -4.0f64..4.0) {
        let q = dense(&a);
        let (x, y) = (mv(x), mv(y));
        prop_assert!(q.eval(&(&x + &y)).unwrap() <= q.eval(&x).unwrap() + q.eval(&y).unwrap() + 1e-10);
        let scaled = q.eval(&(t * &x)).unwrap();
        prop_assert!((scaled - t.abs() * q.eval(&x).unwrap()).abs() <= 1e-10 * (1.0 + scaled));
    }

    #[test]
    fn gram_schmidt_biorthogonal_and_reconstructs((n, a, _x, _y) in seminorm_case(), extra in mat_strategy(6, 8)) {
        let q = dense(&a);
        let inputs: Vec<ModelVector> = (0..n + 2).map(|k| mv(extra.column(k % 8).iter().take(n).copied().collect())).collect();
        let sys = gram_schmidt_onb(&q, &inputs, 1e-10).unwrap();
        prop_assert!(sys.len() <= q.rank());
        for (i, f) in sys.duals().iter().enumerate() {
            for (j, phi) in sys.vectors().iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                prop_assert!((f.dot(phi) - target).abs() <= 1e-10);
            }
        }
        for (k, input) in inputs.iter().enumerate() {
            let err = (&sys.reconstruct(k) - input).norm();
            prop_assert!(err <= 1e-9 * (1.0 + input.norm()));
        }
        for (_, r) in sys.kernel_residuals() {
            prop_assert!(q.eval(r).unwrap() <= 1e-8 * (1.0 + r.norm()));
        }
    }

    #[test]
    fn dual_pairing_cauchy_schwarz((_n, a, x, y) in seminorm_case()) {
        let q = dense(&a);
        // f = Gy lies in the range of G, so q′(f) is finite
        let f = q.apply_gram(&mv(y));
        let phi = mv(x);
        let lhs = f.dot(&phi).abs();
        let rhs = q.dual_norm(&f).unwrap() * q.eval(&phi).unwrap();
        prop_assert!(lhs <= rhs + 1e-8 * (1.0 + rhs));
    }

    #[test]
    fn hs_inclusion_basis_invariant((n, a, _x, _y) in seminorm_case(), b in mat_strategy(6, 6), r in mat_strategy(6, 6)) {
        let q = dense(&a);
        let b = b.view((0, 0), (n, n)).into_owned();
        let gq = q.gram_matrix();
        let p = HilbertianSeminorm::dense("p", &gq * b.transpose() * &b * &gq).unwrap();
        let sys = OrthonormalSystem::from_standard_basis(&q, 1e-10).unwrap();
        let k = sys.len();
        let rot = r.view((0, 0), (k, k)).into_owned().qr().q();
        let base = hs_inclusion_norm_for_system(&p, &sys).unwrap().hs_value;
        let turned = hs_inclusion_norm_for_system(&p, &sys.rotated(&rot).unwrap()).unwrap().hs_value;
        prop_assert!((base - turned).abs() <= 1e-8 * base.max(1e-12));
    }

    #[test]
    fn schatten_monotone_and_tails((m, op) in (1usize..6, 1usize..6).prop_flat_map(|(r, c)| (Just(r.min(c)), mat_strategy(r, c)))) {
        let s = LinearOperator::dense(op).unwrap();
        let rs = [1.0, 1.5, 2.0, 3.0, 6.0];
        let norms: Vec<f64> = rs.iter().map(|&r| s.schatten_norm(r).unwrap()).collect();
        for w in norms.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
        prop_assert!((s.schatten_norm(2.0).unwrap() - s.matrix().norm()).abs() <= 1e-10 * (1.0 + s.hs_norm()));
        let tails = s.tail_profile(2.0);
        for w in tails.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
        prop_assert_eq!(s.tail(m.max(s.rank()), 2.0), 0.0);
    }

    #[test]
    fn factorization_recomposes(op in mat_strategy(4, 5)) {
        let s = LinearOperator::dense(op.clone()).unwrap();
        let p = HilbertianSeminorm::dense("p", op.transpose() * &op + DMatrix::identity(5, 5) * 0.5).unwrap();
        let f = factorize(&s, &p).unwrap();
        let back = f.recompose().unwrap().matrix();
        prop_assert!((back - op).norm() <= 1e-9 * (1.0 + s.hs_norm()));
    }

    #[test]
    fn char_function_semigroup(phi in vec_strategy(3), s in 0.0f64..2.0, t in 0.0f64..2.0, rate in 0.1f64..3.0) {
        let drivers = vec![
            LevyDriver::wiener(),
            LevyDriver::compound_poisson(rate, JumpLaw::Normal { mean: 0.3, std: 1.0 }).unwrap(),
            LevyDriver::alpha_stable(1.5, 0.7).unwrap(),
        ];
        let x = CylindricalLevy::new("mixed", drivers).unwrap();
        let phi = mv(phi);
        let lhs = x.char_function(&phi, s + t).unwrap();
        let rhs = x.char_function(&phi, s).unwrap() * x.char_function(&phi, t).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12);
        prop_assert!(x.char_function(&phi, s).unwrap().norm() <= 1.0 + 1e-15);
    }

    #[test]
    fn version_and_parseval_for_random_seminorm(
        (n, a, x, _y) in seminorm_case(),
        b in mat_strategy(6, 6),
        seed in 0u64..1000,
    ) {
        let q = dense(&a);
        // S = B G_q vanishes on ker(q)
        let s = LinearOperator::dense(b.view((0, 0), (n, n)).into_owned() * q.gram_matrix()).unwrap();
        let proc = CylindricalLevy::iid("w", LevyDriver::wiener(), n).unwrap();
        let rad = Radonifier::new(proc.clone(), s.clone(), &q, 0).unwrap();
        let m = rad.system().len();
        let rad = rad.with_m(m).unwrap();
        let composed = compose(proc, s).unwrap();
        let sample = composed.sample_paths(1.0, 16, seed, 0).unwrap();
        let y = regularize_series(&sample, rad.system(), m).unwrap();
        let phi = mv(x);
        let lhs = y.pairing_events(&phi).unwrap();
        let rhs = sample.eval_events(&phi).unwrap();
        for (u, v) in lhs.values.iter().zip(&rhs.values) {
            prop_assert!((u - v).abs() <= 1e-10 * (1.0 + v.abs()));
        }
        let qn = y.qnorm_path();
        for k in 0..y.times().len() {
            let d = q.dual_norm(&y.state(k)).unwrap();
            prop_assert!((d - qn.values[k]).abs() <= 1e-8 * (1.0 + d));
        }
        prop_assert_eq!(qn.values[0], 0.0);
    }

    #[test]
    fn prefix_stability(seed in 0u64..10_000, m in 0usize..6) {
        let n = 6;
        let q = HilbertianSeminorm::identity(n);
        let sys = Arc::new(OrthonormalSystem::from_standard_basis(&q, 1e-10).unwrap());
        let proc = CylindricalLevy::iid("cp", LevyDriver::compound_poisson(2.0, JumpLaw::Constant { value: 1.0 }).unwrap(), n).unwrap();
        let sample = proc.sample_paths(1.0, 8, seed, 3).unwrap();
        let short = regularize_series(&sample, &sys, m).unwrap();
        let long = regularize_series(&sample, &sys, n).unwrap();
        for j in 0..m {
            prop_assert_eq!(short.coord(j), long.coord(j));
        }
        prop_assert!(short.sup_qnorm() <= long.sup_qnorm());
    }

    #[test]
    fn truncation_plan_minimal(power in 0.6f64..2.0, tol in 1e-4f64..1.0, n in 5usize..200) {
        let s = LinearOperator::power_decay(n, power).unwrap();
        let x = CylindricalLevy::iid("w", LevyDriver::wiener(), n).unwrap();
        let plan = choose_truncation(&s, &x, 2.0, tol, 1.0, true).unwrap();
        prop_assert!(plan.achieved_bound <= tol);
        if plan.m > 0 {
            prop_assert!(truncation_tail_bound(&s, &x, plan.m - 1, 2.0, 1.0, true).unwrap() > tol);
        }
    }

    #[test]
    fn sampling_is_deterministic(seed in any::<u64>(), replica in 0u64..100) {
        let x = CylindricalLevy::iid("cp", LevyDriver::compound_poisson(1.5, JumpLaw::TwoPoint { size: 1.0, prob: 0.3 }).unwrap(), 3).unwrap();
        let a = x.sample_paths(1.0, 8, seed, replica).unwrap();
        let b = x.sample_paths(1.0, 8, seed, replica).unwrap();
        prop_assert_eq!(&a, &b);
        for i in 0..3 {
            let d = a.driver(i);
            for (k, t) in d.times.iter().enumerate() {
                prop_assert_eq!(d.value(*t), d.values[k]);
            }
        }
    }
}
