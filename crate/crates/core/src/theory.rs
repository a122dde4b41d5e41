//! Recovery-guarantee ingredients and their empirical verification.
//!
//! For a sensing matrix A, the submatrix constant `mu` is the largest value
//! such that every kappa-row submatrix satisfies `||A_S u||^2 >= mu ||u||^2`
//! for all 2K-sparse u. When mu > 0, any sign-consistent minimal-sparsity
//! reconstruction obeys `||xhat - x||_2 <= eps / sqrt(mu)` with eps = ||delta||_2,
//! provided the measurement count satisfies the logarithmic condition checked
//! by [`check_measurement_condition`]. Logs there are base-2 (the form the
//! condition is derived in), with `e` the natural base inside the arguments.

use std::collections::HashSet;

use itertools::Itertools;

use crate::decoders::{decode_l0_bruteforce, support_sign_system, truncated_support};
use crate::error::{Error, Result};
use crate::linalg::{self, binomial, norm2, symmetric_smallest_eigenvalue, Mat};
use crate::lpcore::{
    feasible_point, solve_lp, LpProblem, LpStatus, VarBound, DEFAULT_TOL_FEAS, DEFAULT_TOL_PIVOT,
};
use crate::model::{
    gen_deviation, gen_gaussian_matrix, gen_sparse_signal, measure, quantize,
    thresholds_from_deviation, DeviationSign, DeviationSpec, SensingEnsemble, Sign,
};
use crate::rng::RngStream;
use crate::scalar::Scalar;

/// Guard on the (row-subset x column-support) enumeration in [`compute_mu`].
const MU_ENUM_GUARD: u128 = 1_000_000;
/// Guard on [`orthant_bound`] arguments.
const ORTHANT_MAX_M: usize = 40;

/// Recovery-guarantee summary for one matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryReport<S> {
    pub mu: S,
    pub kappa: usize,
    pub k: usize,
    /// 1/sqrt(mu); defined only when mu > 0.
    pub lambda: Option<S>,
    pub condition_lhs: S,
    pub condition_rhs: S,
    pub condition_holds: bool,
    pub eta: S,
    pub c_const: S,
}

impl<S: Scalar> TheoryReport<S> {
    pub fn build(a: &SensingEnsemble<S>, k: usize, kappa: usize, eta: S) -> Result<Self> {
        let mu = compute_mu(a, k, kappa)?;
        let (condition_lhs, condition_rhs, condition_holds) =
            check_measurement_condition(a.rows(), a.cols(), k, kappa, eta)?;
        Ok(TheoryReport {
            mu,
            kappa,
            k,
            lambda: (mu > S::zero()).then(|| S::one() / mu.sqrt()),
            condition_lhs,
            condition_rhs,
            condition_holds,
            eta,
            c_const: c_constant(kappa),
        })
    }
}

/// One Monte-Carlo check of the error bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundTrialRecord<S> {
    pub seed: u64,
    /// eps = ||delta||_2.
    pub deviation_norm: S,
    pub residual_norm: S,
    pub mu: S,
    /// lambda * eps; +inf when mu = 0.
    pub bound: S,
    pub violated: bool,
    /// Conservative radius of the consistent polytope around x on the
    /// returned support.
    pub worst_case_radius: Option<S>,
}

/// Largest mu such that condition (||A_S u||^2 >= mu ||u||^2 for 2K-sparse u)
/// holds over every kappa-row submatrix: the minimum squared smallest singular
/// value over all row subsets S (|S| = kappa) and column supports T (|T| = 2K).
///
/// Rows are enumerated in the outer loop, supports inner, with an early exit
/// once the running minimum reaches zero.
pub fn compute_mu<S: Scalar>(a: &SensingEnsemble<S>, k: usize, kappa: usize) -> Result<S> {
    let (m, n) = (a.rows(), a.cols());
    if k == 0 {
        return Err(Error::invalid("sparsity K must be at least 1"));
    }
    if 2 * k > kappa {
        return Err(Error::invalid("need kappa >= 2K"));
    }
    if kappa > m {
        return Err(Error::invalid("kappa exceeds row count"));
    }
    if 2 * k > n {
        return Err(Error::invalid("2K exceeds column count"));
    }
    let pairs = binomial(m, kappa)
        .zip(binomial(n, 2 * k))
        .and_then(|(r, c)| r.checked_mul(c));
    match pairs {
        Some(p) if p <= MU_ENUM_GUARD => {}
        _ => {
            return Err(Error::TooLarge(format!(
                "C({m},{kappa})*C({n},{}) exceeds the mu enumeration guard",
                2 * k
            )))
        }
    }

    let p = 2 * k;
    let mut min_eig = S::infinity();
    for rows in (0..m).combinations(kappa) {
        for cols in (0..n).combinations(p) {
            // Gram matrix of the kappa x 2K submatrix.
            let mut gram: Mat<S> = Mat::zeros(p, p);
            for &i in &rows {
                let row = a.row(i);
                for (bi, &ci) in cols.iter().enumerate() {
                    for (bj, &cj) in cols.iter().enumerate().skip(bi) {
                        let v = row[ci] * row[cj];
                        *gram.at_mut(bi, bj) += v;
                        if bi != bj {
                            *gram.at_mut(bj, bi) += v;
                        }
                    }
                }
            }
            let eig = symmetric_smallest_eigenvalue(&gram).max(S::zero());
            if eig < min_eig {
                min_eig = eig;
                if min_eig == S::zero() {
                    return Ok(S::zero());
                }
            }
        }
    }
    Ok(min_eig)
}

/// The kappa-only constant `c = (kappa - 1) * (log2(e / (kappa - 1)) + 1)`.
pub fn c_constant<S: Scalar>(kappa: usize) -> S {
    let km1 = S::from_f64((kappa - 1) as f64);
    let e = S::from_f64(std::f64::consts::E);
    km1 * ((e / km1).log2() + S::one())
}

/// Evaluate both sides of the measurement-count condition
///
/// `m - 2K log2(m - kappa + 1) - (kappa - 1) log2(m)
///     >= 2K (log2(n e^2) - 2 log2(2K) + 1) + log2(1/eta) + c`
///
/// and report whether it holds.
pub fn check_measurement_condition<S: Scalar>(
    m: usize,
    n: usize,
    k: usize,
    kappa: usize,
    eta: S,
) -> Result<(S, S, bool)> {
    if k == 0 || kappa < 2 * k || m < kappa {
        return Err(Error::invalid("need m >= kappa >= 2K >= 2"));
    }
    if !(eta > S::zero() && eta < S::one()) {
        return Err(Error::invalid("eta must lie in (0, 1)"));
    }
    let two_k = S::from_f64((2 * k) as f64);
    let mf = S::from_f64(m as f64);
    let nf = S::from_f64(n as f64);
    let e = S::from_f64(std::f64::consts::E);
    let lhs = mf
        - two_k * S::from_f64((m - kappa + 1) as f64).log2()
        - S::from_f64((kappa - 1) as f64) * mf.log2();
    let rhs = two_k * ((nf * e * e).log2() - S::from_f64(2.0) * two_k.log2() + S::one())
        + (S::one() / eta).log2()
        + c_constant::<S>(kappa);
    Ok((lhs, rhs, lhs >= rhs))
}

/// `deviation_norm / sqrt(mu)` — the reconstruction-error bound.
pub fn error_bound<S: Scalar>(deviation_norm: S, mu: S) -> Result<S> {
    if !(mu > S::zero()) {
        return Err(Error::invalid("mu must be positive"));
    }
    if deviation_norm < S::zero() || !deviation_norm.is_finite() {
        return Err(Error::invalid("deviation norm must be finite and >= 0"));
    }
    Ok(deviation_norm / mu.sqrt())
}

/// One full bound check: draw (x, A, delta), set tau = y - delta, decode by
/// the l0 oracle at Kmax = K, compare the residual against eps/sqrt(mu).
pub fn verify_bound_trial<S: Scalar>(
    n: usize,
    m: usize,
    k: usize,
    kappa: usize,
    dev: &DeviationSpec<S>,
    rng: &mut RngStream,
) -> Result<BoundTrialRecord<S>> {
    let seed = rng.seed();
    let x = gen_sparse_signal::<S>(n, k, rng)?;
    let a = gen_gaussian_matrix::<S>(m, n, rng)?;
    let delta = gen_deviation(dev, m, rng)?;
    let y = measure(&a, &x)?;
    let tau = thresholds_from_deviation(&y, &delta, DeviationSign::Minus)?;
    let bits = quantize(&y, &tau)?.bits;
    let decoded = decode_l0_bruteforce(&a, &tau, &bits, k)?;
    let mu = compute_mu(&a, k, kappa)?;

    let x_dense = x.dense();
    let residual_norm = norm2(&linalg::sub(&decoded.xhat, &x_dense));
    let deviation_norm = norm2(&delta);
    let bound = if mu > S::zero() {
        deviation_norm / mu.sqrt()
    } else {
        S::infinity()
    };
    let violated = residual_norm > bound + S::from_f64(1e-9);
    let support = truncated_support(&decoded.xhat);
    let worst_case_radius = worst_case_deviation(&a, &tau, &bits, &support, &x_dense).ok();
    Ok(BoundTrialRecord {
        seed,
        deviation_norm,
        residual_norm,
        mu,
        bound,
        violated,
        worst_case_radius,
    })
}

/// Conservative radius of the sign-consistent polytope around `x`, restricted
/// to vectors supported on `support`: for each support coordinate two LPs
/// maximize +-(z_j - x_j); off-support coordinates contribute |x_j| exactly.
/// The l2 norm of those per-coordinate half-widths upper-bounds
/// `max_z ||z - x||_2` over the restricted polytope. Returns +inf when the
/// polytope is unbounded in some coordinate.
pub fn worst_case_deviation<S: Scalar>(
    a: &SensingEnsemble<S>,
    tau: &[S],
    bits: &[Sign],
    support: &[usize],
    x: &[S],
) -> Result<S> {
    if x.len() != a.cols() {
        return Err(Error::invalid("x length must equal matrix columns"));
    }
    if tau.len() != a.rows() || bits.len() != a.rows() {
        return Err(Error::invalid("tau/bits length mismatch"));
    }
    if !support.windows(2).all(|w| w[0] < w[1]) || support.iter().any(|&j| j >= a.cols()) {
        return Err(Error::invalid("support must be sorted, unique, in range"));
    }
    let kk = support.len();
    let cons = support_sign_system(a, tau, bits, support);
    let bounds = vec![VarBound::Free; kk];
    if feasible_point(kk, &cons, &bounds, S::from_f64(DEFAULT_TOL_FEAS))?.is_none() {
        return Err(Error::invalid("support is not sign-consistent"));
    }

    let mut total = S::zero();
    for (pos, &j) in support.iter().enumerate() {
        let mut width_j = S::zero();
        for dir in [S::one(), -S::one()] {
            // maximize dir * z_j == minimize -dir * z_j
            let mut c = vec![S::zero(); kk];
            c[pos] = -dir;
            let p = LpProblem::new(kk, c, cons.clone(), bounds.clone());
            let sol = solve_lp(
                &p,
                S::from_f64(DEFAULT_TOL_FEAS),
                S::from_f64(DEFAULT_TOL_PIVOT),
            )?;
            match sol.status {
                LpStatus::Unbounded => return Ok(S::infinity()),
                LpStatus::Optimal => {
                    // minimize -dir*z_j, so max(dir*z_j) = -objective.
                    let dir_extreme = -sol.objective_value.expect("optimal has objective");
                    let w = dir_extreme - dir * x[j]; // max of dir*(z_j - x_j)
                    width_j = width_j.max(w);
                }
                LpStatus::Infeasible => {
                    return Err(Error::SolverFailure(
                        "polytope became infeasible during width scan".into(),
                    ))
                }
            }
        }
        total += width_j.max(S::zero()) * width_j.max(S::zero());
    }
    for (j, &xj) in x.iter().enumerate() {
        if !support.contains(&j) {
            total += xj * xj;
        }
    }
    Ok(total.sqrt())
}

/// Exact value of `2^k * C(m, k)`: the bound on how many orthants a
/// k-dimensional subspace of R^m can intersect.
pub fn orthant_bound(m: usize, k: usize) -> Result<u64> {
    if k == 0 || k > m {
        return Err(Error::invalid("need 1 <= k <= m"));
    }
    if m > ORTHANT_MAX_M {
        return Err(Error::TooLarge(format!(
            "orthant bound supports m <= {ORTHANT_MAX_M}"
        )));
    }
    let comb = binomial(m, k).ok_or_else(|| Error::TooLarge("binomial overflow".into()))?;
    let bound = (1u128 << k)
        .checked_mul(comb)
        .ok_or_else(|| Error::TooLarge("orthant bound overflow".into()))?;
    u64::try_from(bound).map_err(|_| Error::TooLarge("orthant bound exceeds 64 bits".into()))
}

/// Draw `num_samples` random points in the row space of `basis` (k x m) and
/// count the distinct sign patterns seen (sign(0) = -1 convention).
pub fn sample_orthant_count<S: Scalar>(
    basis: &Mat<S>,
    num_samples: usize,
    rng: &mut RngStream,
) -> Result<u64> {
    let (k, m) = (basis.rows, basis.cols);
    if k == 0 || m == 0 {
        return Err(Error::invalid("basis must be non-empty"));
    }
    if m > 64 {
        return Err(Error::TooLarge("sign patterns support m <= 64".into()));
    }
    if basis.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("basis entries must be finite"));
    }
    let mut seen: HashSet<u64> = HashSet::new();
    let mut point = vec![S::zero(); m];
    for _ in 0..num_samples {
        let coeffs: Vec<S> = (0..k).map(|_| S::sample_standard_normal(rng)).collect();
        for (j, p) in point.iter_mut().enumerate() {
            let mut acc = S::zero();
            for (i, &c) in coeffs.iter().enumerate() {
                acc += c * basis.at(i, j);
            }
            *p = acc;
        }
        let mut pattern = 0u64;
        for (j, &p) in point.iter().enumerate() {
            if p > S::zero() {
                pattern |= 1 << j;
            }
        }
        seen.insert(pattern);
    }
    Ok(seen.len() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity(n: usize, scale: f64) -> SensingEnsemble<f64> {
        let mut e = vec![0.0; n * n];
        for i in 0..n {
            e[i * n + i] = scale;
        }
        SensingEnsemble::from_entries(n, n, e, 0).unwrap()
    }

    #[test]
    fn mu_of_identity_is_one() {
        let a = identity(4, 1.0);
        let mu = compute_mu(&a, 1, 4).unwrap();
        assert!((mu - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mu_of_scaled_identity_is_square() {
        let a = identity(4, 2.0);
        let mu = compute_mu(&a, 1, 4).unwrap();
        assert!((mu - 4.0).abs() < 1e-12);
    }

    #[test]
    fn mu_matches_independent_enumeration_oracle() {
        // Oracle: direct double loop with the closed-form smallest eigenvalue
        // of each 2x2 Gram matrix (trace/determinant), independent of the
        // Jacobi route used by compute_mu.
        use itertools::Itertools;
        let mut rng = RngStream::from_seed(314);
        for _ in 0..3 {
            let a = gen_gaussian_matrix::<f64>(8, 8, &mut rng).unwrap();
            let mu = compute_mu(&a, 1, 6).unwrap();
            let mut oracle = f64::INFINITY;
            for rows in (0..8).combinations(6) {
                for cols in (0..8).combinations(2) {
                    let (mut g00, mut g01, mut g11) = (0.0, 0.0, 0.0);
                    for &i in &rows {
                        let (u, v) = (a.at(i, cols[0]), a.at(i, cols[1]));
                        g00 += u * u;
                        g01 += u * v;
                        g11 += v * v;
                    }
                    let half_tr = 0.5 * (g00 + g11);
                    let det = g00 * g11 - g01 * g01;
                    let disc = (half_tr * half_tr - det).max(0.0).sqrt();
                    oracle = oracle.min(half_tr - disc);
                }
            }
            assert!(
                (mu - oracle).abs() <= 1e-9 * (1.0 + oracle.abs()),
                "mu {mu} vs oracle {oracle}"
            );
        }
    }

    #[test]
    fn mu_rayleigh_quotient_never_below_mu() {
        // Rayleigh sampling: ||A_S u||^2 / ||u||^2 over random 2-sparse u and
        // random kappa-row subsets stays >= mu.
        use rand::Rng;
        let mut rng = RngStream::from_seed(2718);
        let a = gen_gaussian_matrix::<f64>(8, 8, &mut rng).unwrap();
        let mu = compute_mu(&a, 1, 6).unwrap();
        for _ in 0..2000 {
            let c0 = rng.random_range(0..8usize);
            let mut c1 = rng.random_range(0..8usize);
            while c1 == c0 {
                c1 = rng.random_range(0..8usize);
            }
            let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let (u0, u1) = (theta.cos(), theta.sin());
            let mut rows: Vec<usize> = (0..8).collect();
            for i in 0..2 {
                let j = rng.random_range(i..8usize);
                rows.swap(i, j);
            }
            let quot: f64 = rows[2..]
                .iter()
                .map(|&i| {
                    let v = a.at(i, c0) * u0 + a.at(i, c1) * u1;
                    v * v
                })
                .sum();
            assert!(quot >= mu - 1e-9);
        }
    }

    #[test]
    fn mu_monotone_in_k_and_kappa() {
        let mut rng = RngStream::from_seed(99);
        let a = gen_gaussian_matrix::<f64>(8, 6, &mut rng).unwrap();
        let mu_k1 = compute_mu(&a, 1, 6).unwrap();
        let mu_k2 = compute_mu(&a, 2, 6).unwrap();
        assert!(mu_k2 <= mu_k1 + 1e-12);
        let mu_kappa5 = compute_mu(&a, 1, 5).unwrap();
        assert!(mu_kappa5 <= mu_k1 + 1e-12);
    }

    #[test]
    fn mu_guards_and_validation() {
        let a = identity(4, 1.0);
        assert!(compute_mu(&a, 0, 4).is_err());
        assert!(compute_mu(&a, 2, 3).is_err());
        assert!(compute_mu(&a, 1, 5).is_err());
        let mut rng = RngStream::from_seed(1);
        let big = gen_gaussian_matrix::<f64>(30, 30, &mut rng).unwrap();
        assert!(matches!(compute_mu(&big, 3, 15), Err(Error::TooLarge(_))));
    }

    #[test]
    fn scaling_law_for_mu() {
        let mut rng = RngStream::from_seed(7);
        let a = gen_gaussian_matrix::<f64>(7, 6, &mut rng).unwrap();
        let scaled =
            SensingEnsemble::from_entries(7, 6, a.entries().iter().map(|&v| 3.0 * v).collect(), 0)
                .unwrap();
        let mu = compute_mu(&a, 1, 5).unwrap();
        let mu_scaled = compute_mu(&scaled, 1, 5).unwrap();
        assert!((mu_scaled - 9.0 * mu).abs() <= 1e-9 * (1.0 + mu_scaled.abs()));
    }

    #[test]
    #[allow(clippy::excessive_precision)] // frozen 60-digit oracle outputs
    fn condition_values_match_arbitrary_precision_oracle() {
        // Frozen from a 60-digit evaluation of the condition.
        let (lhs, rhs, holds) = check_measurement_condition::<f64>(200, 50, 3, 10, 0.1).unwrap();
        assert!((lhs - 85.740721323812985603).abs() < 1e-10);
        assert!((rhs - 22.932786070569256553).abs() < 1e-10);
        assert!(holds);

        let (lhs2, rhs2, holds2) =
            check_measurement_condition::<f64>(100, 120, 2, 8, 0.05).unwrap();
        assert!((lhs2 - 27.336371427144801569).abs() < 1e-10);
        assert!((rhs2 - 28.938431636252658743).abs() < 1e-10);
        assert!(!holds2);
    }

    #[test]
    fn condition_constant_kappa_two() {
        let c: f64 = c_constant(2);
        assert!((c - 2.4426950408889634).abs() < 1e-12);
    }

    #[test]
    fn condition_monotone_once_it_holds() {
        // First holding m for (n=50, K=3, kappa=10, eta=0.1) is 128; it then
        // stays true across the scanned range.
        let held_at = (10..1000)
            .find(|&m| {
                check_measurement_condition::<f64>(m, 50, 3, 10, 0.1)
                    .map(|(_, _, h)| h)
                    .unwrap_or(false)
            })
            .unwrap();
        assert_eq!(held_at, 128);
        assert!(
            !check_measurement_condition::<f64>(127, 50, 3, 10, 0.1)
                .unwrap()
                .2
        );
        for m in held_at..held_at + 500 {
            assert!(
                check_measurement_condition::<f64>(m, 50, 3, 10, 0.1)
                    .unwrap()
                    .2
            );
        }
    }

    #[test]
    fn condition_domain_checks() {
        assert!(check_measurement_condition::<f64>(5, 50, 3, 10, 0.1).is_err());
        assert!(check_measurement_condition::<f64>(100, 50, 3, 10, 0.0).is_err());
        assert!(check_measurement_condition::<f64>(100, 50, 3, 10, 1.0).is_err());
        assert!(check_measurement_condition::<f64>(100, 50, 0, 10, 0.1).is_err());
    }

    #[test]
    fn error_bound_values_and_linearity() {
        assert_eq!(error_bound(0.5, 1.0).unwrap(), 0.5);
        assert_eq!(error_bound(0.0, 3.0).unwrap(), 0.0);
        assert!((error_bound(0.01f64, 0.25).unwrap() - 0.02).abs() < 1e-15);
        assert!(error_bound(1.0, 0.0).is_err());
        assert!(error_bound(1.0, -1.0).is_err());
        for eps in [0.3, 1.7, 9.25] {
            let mu = 0.37;
            assert_eq!(
                error_bound(2.0 * eps, mu).unwrap(),
                2.0 * error_bound(eps, mu).unwrap()
            );
        }
    }

    #[test]
    fn bound_trial_is_reproducible() {
        let dev = DeviationSpec::rademacher(0.1).unwrap();
        let r1 =
            verify_bound_trial::<f64>(8, 10, 1, 8, &dev, &mut RngStream::from_seed(12)).unwrap();
        let r2 =
            verify_bound_trial::<f64>(8, 10, 1, 8, &dev, &mut RngStream::from_seed(12)).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1.seed, 12);
        assert!(r1.deviation_norm > 0.0);
        // dominance of the conservative radius over the realized residual
        if let Some(w) = r1.worst_case_radius {
            assert!(w >= r1.residual_norm - 1e-9);
        }
    }

    #[test]
    fn worst_case_single_point_polytope() {
        // Rows pin z0 = 1.5 exactly: z0 <= 1.5 and z0 >= 1.5.
        let a = SensingEnsemble::from_entries(2, 2, vec![1.0, 0.0, -1.0, 0.0], 0).unwrap();
        let tau = vec![1.5, -1.5];
        let bits = vec![Sign::Minus, Sign::Minus];
        let x = vec![0.5, 0.25];
        let r = worst_case_deviation(&a, &tau, &bits, &[0], &x).unwrap();
        // ||z* - x|| with z* = (1.5, 0)
        let expect = ((1.5f64 - 0.5).powi(2) + 0.25f64.powi(2)).sqrt();
        assert!((r - expect).abs() < 1e-6, "{r} vs {expect}");
    }

    #[test]
    fn worst_case_box_geometry() {
        // |z_j - x_j| <= r on two coordinates -> radius r * sqrt(2).
        let a =
            SensingEnsemble::from_entries(4, 2, vec![1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0], 0)
                .unwrap();
        let (x0, x1, r) = (0.8, -0.4, 0.25);
        let tau = vec![x0 + r, -(x0 - r), x1 + r, -(x1 - r)];
        let bits = vec![Sign::Minus; 4];
        let x = vec![x0, x1];
        let w = worst_case_deviation(&a, &tau, &bits, &[0, 1], &x).unwrap();
        assert!((w - r * 2f64.sqrt()).abs() < 1e-6, "{w}");
    }

    #[test]
    fn worst_case_rejects_infeasible_support() {
        let a = SensingEnsemble::from_entries(2, 2, vec![1.0, 0.0, 1.0, 0.0], 0).unwrap();
        let tau = vec![1.0, -1.0];
        let bits = vec![Sign::Plus, Sign::Minus];
        assert!(worst_case_deviation(&a, &tau, &bits, &[0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn theory_report_assembles_all_fields() {
        // kappa = n: every row subset is the full identity, so mu = 1.
        let a = identity(6, 1.0);
        let r = TheoryReport::build(&a, 1, 6, 0.1).unwrap();
        assert!((r.mu - 1.0).abs() < 1e-12);
        assert!((r.lambda.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!((r.k, r.kappa, r.eta), (1, 6, 0.1));
        let (lhs, rhs, holds) = check_measurement_condition::<f64>(6, 6, 1, 6, 0.1).unwrap();
        assert_eq!(
            (r.condition_lhs, r.condition_rhs, r.condition_holds),
            (lhs, rhs, holds)
        );
        assert_eq!(r.c_const, c_constant::<f64>(6));

        // Dropping rows from the worst submatrix can only shrink mu; for the
        // identity with kappa < n some submatrix has a dead column.
        let r2 = TheoryReport::build(&a, 1, 4, 0.1).unwrap();
        assert_eq!(r2.mu, 0.0);
        assert!(r2.lambda.is_none());
    }

    #[test]
    fn orthant_bound_values_and_guards() {
        assert_eq!(orthant_bound(3, 1).unwrap(), 6);
        assert_eq!(orthant_bound(5, 2).unwrap(), 40);
        assert_eq!(orthant_bound(6, 2).unwrap(), 60);
        assert!(orthant_bound(41, 2).is_err());
        assert!(orthant_bound(3, 0).is_err());
        assert!(orthant_bound(3, 4).is_err());
    }

    #[test]
    fn sampled_orthants_respect_the_bound() {
        let mut rng = RngStream::from_seed(606);
        // A line through the origin in R^3 meets at most 2 open orthants.
        let basis = Mat::from_rows(vec![vec![0.3, -1.2, 0.7]]);
        let count = sample_orthant_count(&basis, 20_000, &mut rng).unwrap();
        assert!(count <= 2);
        assert!(count <= orthant_bound(3, 1).unwrap());

        // Random 2-dim subspace of R^6: never more than 60 patterns.
        for label in 0..3 {
            let mut sub = rng.substream(label);
            let rows: Vec<Vec<f64>> = (0..2)
                .map(|_| {
                    (0..6)
                        .map(|_| f64::sample_standard_normal(&mut sub))
                        .collect()
                })
                .collect();
            let basis = Mat::from_rows(rows);
            let count = sample_orthant_count(&basis, 100_000, &mut sub).unwrap();
            assert!(count <= 60, "count {count}");
        }
    }
}
