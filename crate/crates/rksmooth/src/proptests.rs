//! Property-based invariants across modules: covariance symmetry, positive
//! definiteness, fast-path equivalence, weight normalization, and closed-form
//! method equivalence on randomized inputs.

use proptest::prelude::*;

use crate::covariance::CovarianceModel;
use crate::designs::{midpoint_design, DesignGrid};
use crate::estimators::{
    build_smoother, projection_ou_closed, projection_weights, projection_wiener_closed,
    EdgeCorrection, Method,
};
use crate::kernels::{quartic_kernel, BoundaryMode, ScaledKernel};

fn models() -> Vec<CovarianceModel> {
    vec![
        CovarianceModel::wiener(1.0),
        CovarianceModel::GeneralizedWiener { beta: 1.0, sigma2: 0.5 },
        CovarianceModel::OrnsteinUhlenbeck { lambda: 1.3, sigma2: 2.0 },
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eval_cov_symmetric(s in 0.0f64..=1.0, t in 0.0f64..=1.0) {
        for m in models() {
            let a = m.eval_cov(s, t).unwrap();
            let b = m.eval_cov(t, s).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn quadratic_form_nonnegative(u in prop::collection::vec(-10.0f64..10.0, 8)) {
        let d = midpoint_design(8).unwrap();
        for m in models() {
            let g = m.gram(&d);
            let q = g.quadratic_form(&u, &u).unwrap();
            prop_assert!(q >= -1e-10, "u'R^-1 u = {} for {:?}", q, m);
        }
    }

    #[test]
    fn fast_solve_matches_dense(
        rhs in prop::collection::vec(-5.0f64..5.0, 12),
        raw in prop::collection::vec(0.01f64..0.99, 12),
    ) {
        let mut pts = raw.clone();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        prop_assume!(pts.len() >= 3);
        let rhs = &rhs[..pts.len()];
        let d = DesignGrid::from_points(pts).unwrap();
        for m in models() {
            let g = m.gram(&d);
            let dense = g.solve(rhs, false).unwrap();
            let fast = g.solve(rhs, true).unwrap();
            let scale = dense.iter().fold(1.0f64, |a, &b| a.max(b.abs()));
            for (x, y) in dense.iter().zip(&fast) {
                prop_assert!((x - y).abs() < 1e-9 * scale, "{:?}", m);
            }
        }
    }

    #[test]
    fn gm_weights_sum_one_inside(x in 0.31f64..0.69, h in 0.05f64..0.3) {
        let d = midpoint_design(16).unwrap();
        let model = CovarianceModel::wiener(1.0);
        let sm = build_smoother(
            Method::GasserMuller, &model, &quartic_kernel(), &d, x, h, EdgeCorrection::None,
        ).unwrap();
        prop_assert!((sm.weight_sum() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn wsum_normalization_sums_to_one(x in 0.0f64..=1.0, h in 0.05f64..0.5) {
        let d = midpoint_design(12).unwrap();
        let model = CovarianceModel::wiener(1.0);
        for method in [Method::ProjectionExact, Method::GasserMuller, Method::PriestleyChao] {
            let sm = build_smoother(
                method, &model, &quartic_kernel(), &d, x, h, EdgeCorrection::NormalizeWeightSum,
            ).unwrap();
            prop_assert!((sm.weight_sum() - 1.0).abs() < 1e-10, "{:?}", method);
        }
    }

    #[test]
    fn closed_forms_match_dense(
        x in 0.05f64..0.95,
        h in 0.08f64..0.4,
        seed in 0u64..1000,
        n in 5usize..60,
    ) {
        let d = midpoint_design(n).unwrap();
        let sk = ScaledKernel::new(quartic_kernel(), x, h, BoundaryMode::None).unwrap();
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let ybar: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();

        for beta in [0.0, 1.0, 2.0] {
            let model = CovarianceModel::GeneralizedWiener { beta, sigma2: 1.0 };
            let dense = projection_weights(&model, &sk, &d, false).unwrap().estimate(&ybar).unwrap();
            let closed = projection_wiener_closed(beta, &sk, &d, &ybar).unwrap();
            prop_assert!((dense - closed).abs() < 1e-8, "beta={} {} vs {}", beta, dense, closed);
        }
        for lambda in [0.5, 1.0, 2.0] {
            let model = CovarianceModel::OrnsteinUhlenbeck { lambda, sigma2: 1.0 };
            let dense = projection_weights(&model, &sk, &d, false).unwrap().estimate(&ybar).unwrap();
            let closed = projection_ou_closed(lambda, &sk, &d, &ybar).unwrap();
            prop_assert!((dense - closed).abs() < 1e-8, "lambda={} {} vs {}", lambda, dense, closed);
        }
    }
}
