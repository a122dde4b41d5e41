//! Sparse recovery from one-bit data under sign-consistency constraints.
//!
//! Every decoder searches for a vector `z` whose quantized measurements
//! reproduce the observed bits: `sign(Az - tau) = b`. The constraint is strict
//! for `b_i = +1` under the sign convention (`sign(0) = -1`), which an LP
//! cannot encode directly, so `+1` rows carry the margin
//! `sigma_strict = 1e-9 * (1 + |tau_i|)` and `-1` rows carry none. The true
//! signal remains feasible whenever `min_i |y_i - tau_i|` exceeds the margin,
//! which holds at every scale exercised here.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::linalg::{self, binomial};
use crate::lpcore::{
    feasible_point, solve_lp, Constraint, LpProblem, LpStatus, Relation, VarBound,
    DEFAULT_TOL_FEAS, DEFAULT_TOL_PIVOT,
};
use crate::model::{SensingEnsemble, Sign};
use crate::scalar::Scalar;

/// Guard on the brute-force l0 support enumeration.
const L0_ENUM_GUARD: u128 = 1_000_000;

/// Margin standing in for the strict inequality on +1 bits.
#[inline]
pub fn sigma_strict<S: Scalar>(tau_i: S) -> S {
    S::from_f64(1e-9) * (S::one() + tau_i.abs())
}

/// Reweighting configuration for the log-sum decoder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSumConfig<S> {
    /// Smoothing constant in `log(|z_i| + epsilon_smooth)`; also the epsilon
    /// of the reweighting rule. Unrelated to the deviation norm.
    pub epsilon_smooth: S,
    pub max_outer: usize,
    /// Lower clamp applied to the reweighting weights (0 disables it).
    pub weight_floor: S,
}

impl<S: Scalar> Default for LogSumConfig<S> {
    fn default() -> Self {
        LogSumConfig {
            epsilon_smooth: S::from_f64(0.01),
            max_outer: 10,
            weight_floor: S::zero(),
        }
    }
}

impl<S: Scalar> LogSumConfig<S> {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon_smooth > S::zero()) {
            return Err(Error::invalid("epsilon_smooth must be positive"));
        }
        if self.max_outer == 0 {
            return Err(Error::invalid("max_outer must be at least 1"));
        }
        if self.weight_floor < S::zero() || !self.weight_floor.is_finite() {
            return Err(Error::invalid("weight_floor must be finite and >= 0"));
        }
        Ok(())
    }
}

/// Output of any decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult<S> {
    pub xhat: Vec<S>,
    /// The decoder's own objective at `xhat`: the (weighted) l1 norm, the
    /// log-sum value, or the support size for the l0 oracle.
    pub objective: S,
    pub outer_iterations: usize,
    pub lp_status_trace: Vec<LpStatus>,
    /// Objective value after each outer iteration (single entry for one-shot
    /// decoders); the log-sum trace is non-increasing.
    pub objective_trace: Vec<S>,
    pub consistency_ok: bool,
}

/// Sign-consistency check under the strictness policy: a +1 bit needs
/// `a_i'x - tau_i >= sigma_strict/2` and a -1 bit needs `<= sigma_strict/2`.
/// The half-margin split separates the two classes by the full margin while
/// absorbing simplex roundoff on active constraints.
pub fn sign_consistent<S: Scalar>(
    a: &SensingEnsemble<S>,
    xhat: &[S],
    tau: &[S],
    bits: &[Sign],
) -> bool {
    let half = S::from_f64(0.5);
    (0..a.rows()).all(|i| {
        let v = linalg::dot(a.row(i), xhat) - tau[i];
        let split = sigma_strict(tau[i]) * half;
        match bits[i] {
            Sign::Plus => v >= split,
            Sign::Minus => v <= split,
        }
    })
}

/// Support of `x` after discarding entries below `1e-6 * ||x||_inf`.
pub fn truncated_support<S: Scalar>(x: &[S]) -> Vec<usize> {
    let peak = linalg::norm_inf(x);
    if peak == S::zero() {
        return Vec::new();
    }
    let thresh = S::from_f64(1e-6) * peak;
    x.iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > thresh)
        .map(|(j, _)| j)
        .collect()
}

fn check_dims<S: Scalar>(a: &SensingEnsemble<S>, tau: &[S], bits: &[Sign]) -> Result<()> {
    if tau.len() != a.rows() || bits.len() != a.rows() {
        return Err(Error::invalid(format!(
            "expected {} thresholds/bits, got {}/{}",
            a.rows(),
            tau.len(),
            bits.len()
        )));
    }
    if tau.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("thresholds must be finite"));
    }
    Ok(())
}

/// Sign-constraint rows over the variables indexed by `support` (all columns
/// when `support` covers 0..n): `b_i * (A[i,support] z - tau_i) >= margin_i`.
pub(crate) fn support_sign_system<S: Scalar>(
    a: &SensingEnsemble<S>,
    tau: &[S],
    bits: &[Sign],
    support: &[usize],
) -> Vec<Constraint<S>> {
    (0..a.rows())
        .map(|i| {
            let s: S = bits[i].to_scalar();
            let row = support.iter().map(|&j| s * a.at(i, j)).collect();
            let margin = match bits[i] {
                Sign::Plus => sigma_strict(tau[i]),
                Sign::Minus => S::zero(),
            };
            Constraint::new(row, Relation::Ge, s * tau[i] + margin)
        })
        .collect()
}

fn map_lp_status<S: Scalar>(sol: &crate::lpcore::LpSolution<S>) -> Result<()> {
    match sol.status {
        LpStatus::Optimal => Ok(()),
        LpStatus::Infeasible => Err(Error::InfeasibleMeasurements),
        LpStatus::Unbounded => Err(Error::SolverFailure(
            "sign-consistency LP reported unbounded".into(),
        )),
    }
}

/// opt-2: min ||z||_1 s.t. sign(Az - tau) = b.
pub fn decode_l1<S: Scalar>(
    a: &SensingEnsemble<S>,
    tau: &[S],
    bits: &[Sign],
) -> Result<DecodeResult<S>> {
    decode_weighted_l1(a, tau, bits, &vec![S::one(); a.cols()])
}

/// opt-4: min sum_i w_i |z_i| under the same sign constraints. The LP splits
/// z = u - v with u, v >= 0 and objective sum w_i (u_i + v_i).
pub fn decode_weighted_l1<S: Scalar>(
    a: &SensingEnsemble<S>,
    tau: &[S],
    bits: &[Sign],
    weights: &[S],
) -> Result<DecodeResult<S>> {
    check_dims(a, tau, bits)?;
    let n = a.cols();
    if weights.len() != n {
        return Err(Error::invalid("weight vector length must equal n"));
    }
    if weights.iter().any(|w| *w < S::zero() || !w.is_finite()) {
        return Err(Error::invalid("weights must be finite and nonnegative"));
    }

    let mut objective = Vec::with_capacity(2 * n);
    objective.extend_from_slice(weights);
    objective.extend_from_slice(weights);
    let constraints = (0..a.rows())
        .map(|i| {
            let s: S = bits[i].to_scalar();
            let mut row = Vec::with_capacity(2 * n);
            row.extend(a.row(i).iter().map(|&c| s * c));
            row.extend(a.row(i).iter().map(|&c| -s * c));
            let margin = match bits[i] {
                Sign::Plus => sigma_strict(tau[i]),
                Sign::Minus => S::zero(),
            };
            Constraint::new(row, Relation::Ge, s * tau[i] + margin)
        })
        .collect();
    let p = LpProblem::new(
        2 * n,
        objective,
        constraints,
        vec![VarBound::NonNegative; 2 * n],
    );
    let sol = solve_lp(
        &p,
        S::from_f64(DEFAULT_TOL_FEAS),
        S::from_f64(DEFAULT_TOL_PIVOT),
    )?;
    map_lp_status(&sol)?;
    let uv = sol.point.expect("optimal solution carries a point");
    let xhat: Vec<S> = (0..n).map(|j| uv[j] - uv[n + j]).collect();
    let objective: S = xhat.iter().zip(weights).map(|(&z, &w)| w * z.abs()).sum();
    let consistency_ok = sign_consistent(a, &xhat, tau, bits);
    Ok(DecodeResult {
        xhat,
        objective,
        outer_iterations: 1,
        lp_status_trace: vec![LpStatus::Optimal],
        objective_trace: vec![objective],
        consistency_ok,
    })
}

/// opt-3: min sum_i log(|z_i| + eps) by majorize-minimize reweighting.
/// Iteration 1 uses all-one weights (plain l1); afterwards
/// `w_i = 1 / (|z_i| + eps)`. Stops when the log-sum objective decreases by
/// less than 1e-8 or `max_outer` is reached; the recorded trace is
/// non-increasing.
pub fn decode_logsum<S: Scalar>(
    a: &SensingEnsemble<S>,
    tau: &[S],
    bits: &[Sign],
    cfg: &LogSumConfig<S>,
) -> Result<DecodeResult<S>> {
    cfg.validate()?;
    check_dims(a, tau, bits)?;
    let n = a.cols();
    let eps = cfg.epsilon_smooth;
    let logsum = |z: &[S]| -> S { z.iter().map(|&v| (v.abs() + eps).ln()).sum() };

    let mut weights = vec![S::one(); n];
    let mut lp_trace = Vec::new();
    let mut obj_trace: Vec<S> = Vec::new();
    let mut xhat = vec![S::zero(); n];
    for _outer in 0..cfg.max_outer {
        let step = decode_weighted_l1(a, tau, bits, &weights)?;
        lp_trace.extend(step.lp_status_trace);
        xhat = step.xhat;
        let l = logsum(&xhat);
        let converged = obj_trace
            .last()
            .is_some_and(|&prev| prev - l < S::from_f64(1e-8));
        obj_trace.push(l);
        if converged {
            break;
        }
        weights = xhat
            .iter()
            .map(|&z| (S::one() / (z.abs() + eps)).max(cfg.weight_floor))
            .collect();
    }
    let consistency_ok = sign_consistent(a, &xhat, tau, bits);
    Ok(DecodeResult {
        objective: *obj_trace.last().expect("at least one outer iteration"),
        outer_iterations: obj_trace.len(),
        lp_status_trace: lp_trace,
        objective_trace: obj_trace,
        consistency_ok,
        xhat,
    })
}

/// opt-1: min ||z||_0 by exhaustive support search, tiny instances only.
///
/// Scans k = 0..kmax and, within each k, supports in lexicographic order;
/// the first support admitting a sign-consistent point wins. The returned
/// objective is the exact minimum of opt-1. `outer_iterations` counts the
/// supports tested.
pub fn decode_l0_bruteforce<S: Scalar>(
    a: &SensingEnsemble<S>,
    tau: &[S],
    bits: &[Sign],
    kmax: usize,
) -> Result<DecodeResult<S>> {
    check_dims(a, tau, bits)?;
    let n = a.cols();
    if kmax > n {
        return Err(Error::invalid("kmax exceeds dimension"));
    }
    match binomial(n, kmax) {
        Some(c) if c <= L0_ENUM_GUARD => {}
        _ => {
            return Err(Error::TooLarge(format!(
                "C({n},{kmax}) exceeds the l0 enumeration guard of {L0_ENUM_GUARD}"
            )))
        }
    }
    let tol_feas = S::from_f64(DEFAULT_TOL_FEAS);
    let mut tested = 0usize;

    // k = 0: the zero vector, no LP required.
    tested += 1;
    let zero_ok = (0..a.rows()).all(|i| {
        let s: S = bits[i].to_scalar();
        let margin = match bits[i] {
            Sign::Plus => sigma_strict(tau[i]),
            Sign::Minus => S::zero(),
        };
        S::zero() >= s * tau[i] + margin
    });
    if zero_ok {
        let xhat = vec![S::zero(); n];
        let consistency_ok = sign_consistent(a, &xhat, tau, bits);
        return Ok(DecodeResult {
            xhat,
            objective: S::zero(),
            outer_iterations: tested,
            lp_status_trace: vec![LpStatus::Optimal],
            objective_trace: vec![S::zero()],
            consistency_ok,
        });
    }

    for k in 1..=kmax {
        for support in (0..n).combinations(k) {
            tested += 1;
            let cons = support_sign_system(a, tau, bits, &support);
            if let Some(zt) = feasible_point(k, &cons, &vec![VarBound::Free; k], tol_feas)? {
                let mut xhat = vec![S::zero(); n];
                for (&j, &v) in support.iter().zip(&zt) {
                    xhat[j] = v;
                }
                let consistency_ok = sign_consistent(a, &xhat, tau, bits);
                let objective = S::from_f64(k as f64);
                return Ok(DecodeResult {
                    xhat,
                    objective,
                    outer_iterations: tested,
                    lp_status_trace: vec![LpStatus::Optimal],
                    objective_trace: vec![objective],
                    consistency_ok,
                });
            }
        }
    }
    Err(Error::InfeasibleAtSparsity { kmax })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;
    use crate::model::{
        gen_deviation, gen_gaussian_matrix, gen_sparse_signal, measure, quantize,
        thresholds_from_deviation, DeviationSign, DeviationSpec,
    };
    use crate::rng::RngStream;

    /// Fixed instance: x, A, tau = y -/+ delta, bits.
    fn instance(
        seed: u64,
        n: usize,
        k: usize,
        m: usize,
        a_mag: f64,
        sign: DeviationSign,
    ) -> (
        crate::model::SparseSignal<f64>,
        SensingEnsemble<f64>,
        Vec<f64>,
        Vec<Sign>,
    ) {
        let mut rng = RngStream::from_seed(seed);
        let x = gen_sparse_signal(n, k, &mut rng).unwrap();
        let a = gen_gaussian_matrix(m, n, &mut rng).unwrap();
        let spec = DeviationSpec::rademacher(a_mag).unwrap();
        let delta = gen_deviation(&spec, m, &mut rng).unwrap();
        let y = measure(&a, &x).unwrap();
        let tau = thresholds_from_deviation(&y, &delta, sign).unwrap();
        let bits = quantize(&y, &tau).unwrap().bits;
        (x, a, tau, bits)
    }

    #[test]
    fn l1_zero_feasible_returns_zero() {
        // All tau_i > 0 and bits = sign(-tau) = -1: zero is feasible and
        // l1-minimal.
        let mut rng = RngStream::from_seed(3);
        let a = gen_gaussian_matrix::<f64>(8, 4, &mut rng).unwrap();
        let tau = vec![0.5; 8];
        let bits = vec![Sign::Minus; 8];
        let r = decode_l1(&a, &tau, &bits).unwrap();
        assert_eq!(r.xhat, vec![0.0; 4]);
        assert_eq!(r.objective, 0.0);
        assert!(r.consistency_ok);
    }

    #[test]
    fn l1_tiny_instance_recovers() {
        // Tolerance validated against the l0 oracle on the same instance.
        let (x, a, tau, bits) = instance(2024, 6, 1, 12, 1e-4, DeviationSign::Minus);
        let r = decode_l1(&a, &tau, &bits).unwrap();
        assert!(r.consistency_ok);
        let err = norm2(&crate::linalg::sub(&r.xhat, &x.dense()));
        assert!(err <= 1e-2, "l1 error {err}");
        let r0 = decode_l0_bruteforce(&a, &tau, &bits, 1).unwrap();
        let err0 = norm2(&crate::linalg::sub(&r0.xhat, &x.dense()));
        assert!(err0 <= 1e-2, "l0 error {err0}");
    }

    #[test]
    fn l1_infeasible_bits_detected() {
        // z >= 1 and z <= -1 cannot both hold.
        let a = SensingEnsemble::from_entries(2, 1, vec![1.0, 1.0], 0).unwrap();
        let tau = vec![1.0, -1.0];
        let bits = vec![Sign::Plus, Sign::Minus];
        assert!(matches!(
            decode_l1(&a, &tau, &bits),
            Err(Error::InfeasibleMeasurements)
        ));
    }

    #[test]
    fn weighted_with_unit_weights_matches_l1_bitwise() {
        let (_, a, tau, bits) = instance(5, 8, 2, 16, 1e-3, DeviationSign::Plus);
        let l1 = decode_l1(&a, &tau, &bits).unwrap();
        let w1 = decode_weighted_l1(&a, &tau, &bits, &[1.0; 8]).unwrap();
        assert_eq!(l1.xhat, w1.xhat);
        assert_eq!(l1.objective, w1.objective);
    }

    #[test]
    fn weighted_zero_on_true_support_recovers_support() {
        let (x, a, tau, bits) = instance(11, 8, 2, 20, 1e-3, DeviationSign::Plus);
        let mut w = vec![1e6; 8];
        for &j in x.support() {
            w[j] = 0.0;
        }
        let r = decode_weighted_l1(&a, &tau, &bits, &w).unwrap();
        for j in 0..8 {
            if !x.support().contains(&j) {
                assert!(r.xhat[j].abs() <= 1e-8, "off-support leak at {j}");
            }
        }
    }

    #[test]
    fn weighted_zero_vector_weights_degenerate() {
        let (_, a, tau, bits) = instance(13, 6, 1, 10, 1e-2, DeviationSign::Plus);
        let r = decode_weighted_l1(&a, &tau, &bits, &[0.0; 6]).unwrap();
        assert_eq!(r.objective, 0.0);
        assert!(r.consistency_ok);
    }

    #[test]
    fn weighted_rejects_bad_weights() {
        let (_, a, tau, bits) = instance(13, 6, 1, 10, 1e-2, DeviationSign::Plus);
        assert!(decode_weighted_l1(&a, &tau, &bits, &[-1.0; 6]).is_err());
        assert!(decode_weighted_l1(&a, &tau, &bits, &[1.0; 5]).is_err());
    }

    #[test]
    fn logsum_fixed_point_converges_in_two() {
        // Zero signal: l1 already returns the exact x = 0, so reweighting
        // changes nothing.
        let mut rng = RngStream::from_seed(21);
        let a = gen_gaussian_matrix::<f64>(10, 5, &mut rng).unwrap();
        let spec = DeviationSpec::gaussian(0.5).unwrap();
        let delta = gen_deviation(&spec, 10, &mut rng).unwrap();
        let y = vec![0.0; 10];
        let tau = thresholds_from_deviation(&y, &delta, DeviationSign::Plus).unwrap();
        let bits = quantize(&y, &tau).unwrap().bits;
        let r = decode_logsum(&a, &tau, &bits, &LogSumConfig::default()).unwrap();
        assert!(r.outer_iterations <= 2);
        assert_eq!(r.xhat, vec![0.0; 5]);
    }

    #[test]
    fn logsum_trace_non_increasing() {
        for seed in [31u64, 32, 33, 34] {
            let (_, a, tau, bits) = instance(seed, 12, 3, 30, 1e-2, DeviationSign::Plus);
            let r = decode_logsum(&a, &tau, &bits, &LogSumConfig::default()).unwrap();
            assert!(r.consistency_ok);
            for w in r.objective_trace.windows(2) {
                assert!(
                    w[1] <= w[0] + 1e-10,
                    "log-sum trace increased: {} -> {}",
                    w[0],
                    w[1]
                );
            }
        }
    }

    #[test]
    fn logsum_rejects_bad_config() {
        let (_, a, tau, bits) = instance(13, 6, 1, 10, 1e-2, DeviationSign::Plus);
        let bad = LogSumConfig {
            epsilon_smooth: 0.0,
            ..LogSumConfig::default()
        };
        assert!(decode_logsum(&a, &tau, &bits, &bad).is_err());
    }

    #[test]
    fn l0_returns_zero_when_consistent() {
        let mut rng = RngStream::from_seed(41);
        let a = gen_gaussian_matrix::<f64>(6, 4, &mut rng).unwrap();
        let tau = vec![1.0; 6];
        let bits = vec![Sign::Minus; 6];
        let r = decode_l0_bruteforce(&a, &tau, &bits, 2).unwrap();
        assert_eq!(r.xhat, vec![0.0; 4]);
        assert_eq!(r.objective, 0.0);
    }

    #[test]
    fn l0_finds_true_support_on_tiny_instance() {
        let (x, a, tau, bits) = instance(2025, 8, 1, 10, 1e-4, DeviationSign::Minus);
        let r = decode_l0_bruteforce(&a, &tau, &bits, 1).unwrap();
        assert_eq!(truncated_support(&r.xhat), x.support());
        assert!(r.consistency_ok);
    }

    #[test]
    fn l0_guard_refuses_large_enumeration() {
        let mut rng = RngStream::from_seed(43);
        let a = gen_gaussian_matrix::<f64>(4, 200, &mut rng).unwrap();
        let tau = vec![0.0; 4];
        let bits = vec![Sign::Minus; 4];
        assert!(matches!(
            decode_l0_bruteforce(&a, &tau, &bits, 10),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn l0_infeasible_at_sparsity() {
        // Contradictory rows on column 0 (z0 >= 1, z0 <= -1) and a dead
        // column 1: no support up to k = 2 is consistent.
        let a = SensingEnsemble::from_entries(2, 2, vec![1.0, 0.0, 1.0, 0.0], 0).unwrap();
        let tau = vec![1.0, -1.0];
        let bits = vec![Sign::Plus, Sign::Minus];
        assert!(matches!(
            decode_l0_bruteforce(&a, &tau, &bits, 2),
            Err(Error::InfeasibleAtSparsity { kmax: 2 })
        ));
    }

    #[test]
    fn l0_never_denser_than_truncated_l1() {
        for seed in [51u64, 52, 53, 54, 55] {
            let (_, a, tau, bits) = instance(seed, 8, 2, 14, 1e-3, DeviationSign::Plus);
            let r1 = decode_l1(&a, &tau, &bits).unwrap();
            let r0 = decode_l0_bruteforce(&a, &tau, &bits, 8).unwrap();
            let l0_size = r0.xhat.iter().filter(|v| **v != 0.0).count();
            assert!(l0_size <= truncated_support(&r1.xhat).len());
        }
    }

    #[test]
    fn consistency_flag_matches_quantize_on_clean_instances() {
        for seed in [61u64, 62, 63] {
            let (_, a, tau, bits) = instance(seed, 10, 2, 24, 1e-2, DeviationSign::Plus);
            let r = decode_l1(&a, &tau, &bits).unwrap();
            assert!(r.consistency_ok);
            let yhat = a.matvec(&r.xhat).unwrap();
            // Wherever the margin comfortably holds, exact quantization agrees.
            let requant = quantize(&yhat, &tau).unwrap().bits;
            for i in 0..a.rows() {
                let gap = (yhat[i] - tau[i]).abs();
                if gap > 1e-7 {
                    assert_eq!(requant[i], bits[i]);
                }
            }
        }
    }
}
