//! Property tests for the model/decoder/theory contracts.

use onebit_core::decoders::{decode_l1, decode_weighted_l1};
use onebit_core::linalg::Mat;
use onebit_core::lpcore::{solve_lp, Constraint, LpProblem, LpStatus, Relation, VarBound};
use onebit_core::model::{
    gen_deviation, gen_gaussian_matrix, gen_sparse_signal, measure, quantize,
    thresholds_from_deviation, DeviationSign, DeviationSpec, Sign,
};
use onebit_core::theory::{error_bound, orthant_bound, sample_orthant_count};
use onebit_core::RngStream;
use proptest::prelude::*;

fn finite_vec(len: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1e6f64..1e6, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quantize_product_nonnegative(y in finite_vec(12), tau in finite_vec(12)) {
        let round = quantize(&y, &tau).unwrap();
        for ((&yi, &ti), &b) in y.iter().zip(&tau).zip(&round.bits) {
            let prod = b.to_scalar::<f64>() * (yi - ti);
            prop_assert!(prod >= 0.0 || yi == ti);
            if yi == ti {
                prop_assert_eq!(b, Sign::Minus);
            }
        }
    }

    #[test]
    fn tau_below_y_gives_sign_of_delta(seed in 0u64..1000, m in 1usize..24) {
        let mut rng = RngStream::from_seed(seed);
        let spec = DeviationSpec::gaussian(0.5).unwrap();
        let delta: Vec<f64> = gen_deviation(&spec, m, &mut rng).unwrap();
        let y: Vec<f64> = (0..m).map(|i| (i as f64 - 3.0) * 0.9).collect();
        let tau = thresholds_from_deviation(&y, &delta, DeviationSign::Minus).unwrap();
        let round = quantize(&y, &tau).unwrap();
        for (&b, &d) in round.bits.iter().zip(&delta) {
            prop_assert_eq!(b, Sign::of(d));
        }
    }

    #[test]
    fn measure_linearity(seed in 0u64..1000) {
        let mut rng = RngStream::from_seed(seed);
        let a = gen_gaussian_matrix::<f64>(5, 8, &mut rng).unwrap();
        let x1 = gen_sparse_signal::<f64>(8, 2, &mut rng).unwrap();
        let x2 = gen_sparse_signal::<f64>(8, 3, &mut rng).unwrap();
        let dense_sum: Vec<f64> = x1.dense().iter().zip(x2.dense()).map(|(&u, v)| u + v).collect();
        let joint = a.matvec(&dense_sum).unwrap();
        let y1 = measure(&a, &x1).unwrap();
        let y2 = measure(&a, &x2).unwrap();
        for (j, (u, v)) in joint.iter().zip(y1.iter().zip(&y2)) {
            let s = u + v;
            prop_assert!((j - s).abs() <= 1e-10 * (1.0 + s.abs()));
        }
    }

    #[test]
    fn error_bound_scales_linearly(eps in 0.0f64..1e3, mu in 1e-6f64..1e3) {
        prop_assert_eq!(
            error_bound(2.0 * eps, mu).unwrap(),
            2.0 * error_bound(eps, mu).unwrap()
        );
    }

    #[test]
    fn sampled_orthant_patterns_never_exceed_bound(
        seed in 0u64..500,
        k in 1usize..4,
        extra in 0usize..4,
    ) {
        let m = k + 1 + extra;
        let mut rng = RngStream::from_seed(seed);
        let rows: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                gen_deviation(&DeviationSpec::gaussian(1.0).unwrap(), m, &mut rng).unwrap()
            })
            .collect();
        let basis = Mat::from_rows(rows);
        let count = sample_orthant_count(&basis, 2000, &mut rng).unwrap();
        prop_assert!(count <= orthant_bound(m, k).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lp_optimum_never_beats_a_known_feasible_point(seed in 0u64..300) {
        // Random bounded LP: rows A v <= A v0 + slack keep v0 feasible, and
        // positive costs keep the problem bounded below on v >= 0.
        let mut rng = RngStream::from_seed(seed);
        let a = gen_gaussian_matrix::<f64>(6, 4, &mut rng).unwrap();
        let spec = DeviationSpec::gaussian(1.0).unwrap();
        let v0: Vec<f64> = gen_deviation::<f64>(&spec, 4, &mut rng)
            .unwrap()
            .iter()
            .map(|v| v.abs())
            .collect();
        let slack: Vec<f64> = gen_deviation::<f64>(&spec, 6, &mut rng)
            .unwrap()
            .iter()
            .map(|v| v.abs() + 0.1)
            .collect();
        let costs: Vec<f64> = gen_deviation::<f64>(&spec, 4, &mut rng)
            .unwrap()
            .iter()
            .map(|v| v.abs() + 0.05)
            .collect();
        let cons: Vec<Constraint<f64>> = (0..6)
            .map(|i| {
                let lhs: f64 = a.row(i).iter().zip(&v0).map(|(&c, &v)| c * v).sum();
                Constraint::new(a.row(i).to_vec(), Relation::Le, lhs + slack[i])
            })
            .collect();
        let p = LpProblem::new(4, costs.clone(), cons, vec![VarBound::NonNegative; 4]);
        let sol = solve_lp(&p, 1e-8, 1e-9).unwrap();
        prop_assert_eq!(sol.status, LpStatus::Optimal);
        let at_v0: f64 = costs.iter().zip(&v0).map(|(&c, &v)| c * v).sum();
        prop_assert!(sol.objective_value.unwrap() <= at_v0 + 1e-9 * (1.0 + at_v0.abs()));

        // determinism, bit for bit
        let again = solve_lp(&p, 1e-8, 1e-9).unwrap();
        prop_assert_eq!(sol.point, again.point);
        prop_assert_eq!(sol.iterations, again.iterations);
    }

    #[test]
    fn unit_weights_reduce_to_plain_l1(seed in 0u64..200) {
        let mut rng = RngStream::from_seed(seed);
        let x = gen_sparse_signal::<f64>(6, 2, &mut rng).unwrap();
        let a = gen_gaussian_matrix::<f64>(14, 6, &mut rng).unwrap();
        let spec = DeviationSpec::rademacher(0.01).unwrap();
        let delta = gen_deviation(&spec, 14, &mut rng).unwrap();
        let y = measure(&a, &x).unwrap();
        let tau = thresholds_from_deviation(&y, &delta, DeviationSign::Plus).unwrap();
        let bits = quantize(&y, &tau).unwrap().bits;
        let plain = decode_l1(&a, &tau, &bits).unwrap();
        let weighted = decode_weighted_l1(&a, &tau, &bits, &[1.0; 6]).unwrap();
        prop_assert_eq!(plain.xhat, weighted.xhat);
        prop_assert!(plain.consistency_ok);
    }
}
