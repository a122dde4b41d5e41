//! Closed-loop adaptive quantization.
//!
//! The encoder holds the unquantized measurements `y` and answers threshold
//! queries with `sign(y - tau)` only; `y` itself never crosses the interface.
//! The decoder refines thresholds from its current reconstruction: round t
//! uses `tau = A xhat_{t-1} + xi_t * delta_t` with `xi_t = xi_0 / decay^t` and
//! a fresh unit-scale deviation draw each round.

use std::fmt;

use crate::decoders::{decode_l1, decode_logsum, DecodeResult, LogSumConfig};
use crate::error::{Error, Result};
use crate::linalg::{self, norm2, norm_inf};
use crate::model::{gen_deviation, quantize, DeviationSpec, SensingEnsemble, Sign, SparseSignal};
use crate::rng::RngStream;
use crate::scalar::Scalar;

/// Holds `y` privately; the only observable behavior is `respond`.
#[derive(Debug, Clone)]
pub struct Encoder<S> {
    y: Vec<S>,
    query_count: usize,
}

impl<S: Scalar> Encoder<S> {
    pub fn new(y: Vec<S>) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::invalid("encoder needs at least one measurement"));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("measurements must be finite"));
        }
        Ok(Encoder { y, query_count: 0 })
    }

    /// Number of measurements held.
    pub fn m(&self) -> usize {
        self.y.len()
    }

    pub fn query_count(&self) -> usize {
        self.query_count
    }

    /// One-bit comparison of the held measurements against `tau`.
    pub fn respond(&mut self, tau: &[S]) -> Result<Vec<Sign>> {
        if tau.len() != self.y.len() {
            return Err(Error::invalid("threshold length mismatch"));
        }
        self.query_count += 1;
        Ok(quantize(&self.y, tau)?.bits)
    }
}

/// Which decoder the loop runs each round.
#[derive(Debug, Clone, PartialEq)]
pub enum DecoderChoice<S> {
    L1,
    LogSum(LogSumConfig<S>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveConfig<S> {
    /// Initial deviation scale xi_0.
    pub xi0: S,
    /// Per-round shrink factor (> 1); the experiments here use 10.
    pub decay: S,
    /// Stop once consecutive reconstructions differ by at most omega in l2.
    pub omega: S,
    pub max_rounds: usize,
    /// Unit-scale deviation distribution; the xi schedule provides the
    /// decreasing variance.
    pub deviation: DeviationSpec<S>,
    pub decoder: DecoderChoice<S>,
}

impl<S: Scalar> AdaptiveConfig<S> {
    pub fn validate(&self) -> Result<()> {
        if !(self.xi0 > S::zero()) || !self.xi0.is_finite() {
            return Err(Error::invalid("xi0 must be positive"));
        }
        if !(self.decay > S::one()) || !self.decay.is_finite() {
            return Err(Error::invalid("decay must exceed 1"));
        }
        if !(self.omega > S::zero()) {
            return Err(Error::invalid("omega must be positive"));
        }
        if self.max_rounds == 0 {
            return Err(Error::invalid("max_rounds must be at least 1"));
        }
        if let DecoderChoice::LogSum(cfg) = &self.decoder {
            cfg.validate()?;
        }
        Ok(())
    }

    /// xi_t = xi_0 / decay^t, floored at 1e-12 * (1 + ||yhat||_inf) so the
    /// schedule never shrinks past float resolution of the thresholds.
    pub fn xi_at(&self, round: usize, yhat_inf: S) -> S {
        let raw = self.xi0 / self.decay.powi(round as i32);
        raw.max(S::from_f64(1e-12) * (S::one() + yhat_inf))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Tolerance,
    MaxRounds,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StopReason::Tolerance => write!(f, "tolerance"),
            StopReason::MaxRounds => write!(f, "max_rounds"),
        }
    }
}

/// One completed round of the loop.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord<S> {
    pub round: usize,
    pub xi: S,
    pub tau: Vec<S>,
    pub bits: Vec<Sign>,
    pub xhat: Vec<S>,
    /// `||x - xhat||^2 / ||x||^2` when ground truth was supplied.
    pub nmse: Option<S>,
    /// `||xhat_t - xhat_{t-1}||_2`; absent on round 0.
    pub l2_change: Option<S>,
    /// Decoder retries consumed this round (0 or 1).
    pub retries: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveTrace<S> {
    pub rounds: Vec<RoundRecord<S>>,
    pub rounds_used: usize,
    pub stop_reason: StopReason,
    /// m bits per encoder query, one query per completed round.
    pub total_bits: usize,
}

impl<S: Scalar> AdaptiveTrace<S> {
    pub fn final_xhat(&self) -> &[S] {
        &self
            .rounds
            .last()
            .expect("trace has at least one round")
            .xhat
    }
}

/// Abort diagnostics: the loop failed at `round` even after one retry with a
/// fresh deviation; completed rounds are preserved.
#[derive(Debug)]
pub struct AdaptiveAbort<S> {
    pub round: usize,
    pub cause: Error,
    pub partial: Vec<RoundRecord<S>>,
}

impl<S: Scalar> fmt::Display for AdaptiveAbort<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "adaptive loop aborted at round {} after retry: {}",
            self.round, self.cause
        )
    }
}

impl<S: Scalar> std::error::Error for AdaptiveAbort<S> {}

type RoundDecode<S> = (Vec<S>, Vec<Sign>, DecodeResult<S>, usize);

fn run_decoder<S: Scalar>(
    a: &SensingEnsemble<S>,
    tau: &[S],
    bits: &[Sign],
    decoder: &DecoderChoice<S>,
) -> Result<DecodeResult<S>> {
    match decoder {
        DecoderChoice::L1 => decode_l1(a, tau, bits),
        DecoderChoice::LogSum(cfg) => decode_logsum(a, tau, bits, cfg),
    }
}

fn nmse_against<S: Scalar>(truth: Option<(&Vec<S>, S)>, xhat: &[S]) -> Option<S> {
    truth.map(|(dense, norm_sq)| {
        let diff = linalg::sub(dense, xhat);
        let err: S = linalg::dot(&diff, &diff);
        if norm_sq > S::zero() {
            err / norm_sq
        } else {
            err
        }
    })
}

/// Run the adaptive loop to completion.
///
/// Round 0 starts from `yhat = 0` (so `tau_0 = xi_0 * delta_0`, matching the
/// experiment protocol); round t > 0 sets `yhat = A xhat_{t-1}`. A decoder
/// infeasibility is retried once with a fresh deviation at the same xi, then
/// the loop aborts carrying the completed rounds.
pub fn adapt_recover<S: Scalar>(
    enc: &mut Encoder<S>,
    a: &SensingEnsemble<S>,
    cfg: &AdaptiveConfig<S>,
    truth: Option<&SparseSignal<S>>,
    rng: &mut RngStream,
) -> std::result::Result<AdaptiveTrace<S>, AdaptiveAbort<S>> {
    let abort0 = |cause: Error| AdaptiveAbort {
        round: 0,
        cause,
        partial: Vec::new(),
    };
    cfg.validate().map_err(abort0)?;
    if a.rows() != enc.m() {
        return Err(abort0(Error::invalid(
            "matrix rows != encoder measurements",
        )));
    }
    if let Some(x) = truth {
        if x.n() != a.cols() {
            return Err(abort0(Error::invalid("ground truth dimension mismatch")));
        }
    }
    let truth_data = truth.map(|x| {
        let d = x.dense();
        let nsq = linalg::dot(&d, &d);
        (d, nsq)
    });
    let truth_ref = truth_data.as_ref().map(|(d, nsq)| (d, *nsq));

    let m = enc.m();
    let mut yhat = vec![S::zero(); m];
    let mut records: Vec<RoundRecord<S>> = Vec::new();
    let mut xprev: Option<Vec<S>> = None;

    for t in 0..cfg.max_rounds {
        let xi = cfg.xi_at(t, norm_inf(&yhat));
        let mut decoded: Option<RoundDecode<S>> = None;
        let mut last_err: Option<Error> = None;
        for attempt in 0..2 {
            let delta = match gen_deviation(&cfg.deviation, m, rng) {
                Ok(d) => d,
                Err(e) => {
                    return Err(AdaptiveAbort {
                        round: t,
                        cause: e,
                        partial: records,
                    })
                }
            };
            let tau: Vec<S> = yhat
                .iter()
                .zip(&delta)
                .map(|(&yh, &d)| yh + xi * d)
                .collect();
            let bits = match enc.respond(&tau) {
                Ok(b) => b,
                Err(e) => {
                    return Err(AdaptiveAbort {
                        round: t,
                        cause: e,
                        partial: records,
                    })
                }
            };
            match run_decoder(a, &tau, &bits, &cfg.decoder) {
                Ok(dr) => {
                    decoded = Some((tau, bits, dr, attempt));
                    break;
                }
                Err(e @ Error::InfeasibleMeasurements) => last_err = Some(e),
                Err(e) => {
                    return Err(AdaptiveAbort {
                        round: t,
                        cause: e,
                        partial: records,
                    })
                }
            }
        }
        let Some((tau, bits, dr, retries)) = decoded else {
            return Err(AdaptiveAbort {
                round: t,
                cause: last_err.unwrap_or(Error::InfeasibleMeasurements),
                partial: records,
            });
        };

        let l2_change = xprev.as_ref().map(|p| norm2(&linalg::sub(&dr.xhat, p)));
        records.push(RoundRecord {
            round: t,
            xi,
            tau,
            bits,
            nmse: nmse_against(truth_ref, &dr.xhat),
            l2_change,
            retries,
            xhat: dr.xhat.clone(),
        });
        if let Some(ch) = l2_change {
            if ch <= cfg.omega {
                let used = records.len();
                return Ok(AdaptiveTrace {
                    rounds: records,
                    rounds_used: used,
                    stop_reason: StopReason::Tolerance,
                    total_bits: m * used,
                });
            }
        }
        yhat = a
            .matvec(&dr.xhat)
            .expect("decoder output has matrix column count");
        xprev = Some(dr.xhat);
    }
    let used = records.len();
    Ok(AdaptiveTrace {
        rounds: records,
        rounds_used: used,
        stop_reason: StopReason::MaxRounds,
        total_bits: m * used,
    })
}

/// Baseline: a single round with the same round-0 thresholds, no refinement.
/// Consumes the stream exactly like round 0 of [`adapt_recover`], so the two
/// agree bit-for-bit on a shared seed.
pub fn nonadaptive_recover<S: Scalar>(
    enc: &mut Encoder<S>,
    a: &SensingEnsemble<S>,
    cfg: &AdaptiveConfig<S>,
    rng: &mut RngStream,
) -> Result<DecodeResult<S>> {
    cfg.validate()?;
    if a.rows() != enc.m() {
        return Err(Error::invalid("matrix rows != encoder measurements"));
    }
    let m = enc.m();
    let xi = cfg.xi_at(0, S::zero());
    let delta = gen_deviation(&cfg.deviation, m, rng)?;
    let tau: Vec<S> = delta.iter().map(|&d| xi * d).collect();
    let bits = enc.respond(&tau)?;
    run_decoder(a, &tau, &bits, &cfg.decoder)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{gen_gaussian_matrix, gen_sparse_signal, measure};

    fn setup(
        seed: u64,
        n: usize,
        k: usize,
        m: usize,
    ) -> (SparseSignal<f64>, SensingEnsemble<f64>, Encoder<f64>) {
        let mut rng = RngStream::from_seed(seed);
        let x = gen_sparse_signal(n, k, &mut rng).unwrap();
        let a = gen_gaussian_matrix(m, n, &mut rng).unwrap();
        let y = measure(&a, &x).unwrap();
        (x, a, Encoder::new(y).unwrap())
    }

    fn config() -> AdaptiveConfig<f64> {
        AdaptiveConfig {
            xi0: 1.0,
            decay: 10.0,
            omega: 0.01,
            max_rounds: 10,
            deviation: DeviationSpec::gaussian(1.0).unwrap(),
            decoder: DecoderChoice::L1,
        }
    }

    #[test]
    fn encoder_boundary_behavior() {
        let mut enc = Encoder::new(vec![1.0, -2.0, 0.5]).unwrap();
        // thresholds above every sample -> all -1
        let bits = enc.respond(&[2.0, 0.0, 1.0]).unwrap();
        assert!(bits.iter().all(|&b| b == Sign::Minus));
        // tau = y -> all -1 by the tie convention
        let bits = enc.respond(&[1.0, -2.0, 0.5]).unwrap();
        assert!(bits.iter().all(|&b| b == Sign::Minus));
        // identical queries give identical bits and bump the counter
        let b1 = enc.respond(&[0.0, 0.0, 0.0]).unwrap();
        let b2 = enc.respond(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(b1, b2);
        assert_eq!(enc.query_count(), 4);
        assert!(enc.respond(&[0.0]).is_err());
        assert!(Encoder::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn single_round_when_max_rounds_is_one() {
        let (x, a, mut enc) = setup(7, 20, 2, 30);
        let cfg = AdaptiveConfig {
            max_rounds: 1,
            ..config()
        };
        let mut rng = RngStream::from_seed(100);
        let trace = adapt_recover(&mut enc, &a, &cfg, Some(&x), &mut rng).unwrap();
        assert_eq!(trace.rounds_used, 1);
        assert_eq!(trace.stop_reason, StopReason::MaxRounds);
        assert_eq!(enc.query_count(), 1);
        assert_eq!(trace.total_bits, 30);
    }

    #[test]
    fn nonadaptive_matches_round_zero() {
        let (x, a, enc0) = setup(8, 30, 2, 40);
        let mut enc_a = enc0.clone();
        let mut enc_b = enc0;
        let cfg = config();
        let mut rng_a = RngStream::from_seed(555);
        let mut rng_b = RngStream::from_seed(555);
        let trace = adapt_recover(&mut enc_a, &a, &cfg, Some(&x), &mut rng_a).unwrap();
        let single = nonadaptive_recover(&mut enc_b, &a, &cfg, &mut rng_b).unwrap();
        assert_eq!(trace.rounds[0].xhat, single.xhat);
    }

    #[test]
    fn trace_is_reproducible_and_xi_schedule_exact() {
        let (x, a, enc0) = setup(9, 30, 2, 40);
        let cfg = config();
        let run = |mut enc: Encoder<f64>| {
            let mut rng = RngStream::from_seed(777);
            adapt_recover(&mut enc, &a, &cfg, Some(&x), &mut rng).unwrap()
        };
        let t1 = run(enc0.clone());
        let t2 = run(enc0);
        assert_eq!(t1.rounds.len(), t2.rounds.len());
        for (r1, r2) in t1.rounds.iter().zip(&t2.rounds) {
            assert_eq!(r1.xhat, r2.xhat);
            assert_eq!(r1.bits, r2.bits);
            assert_eq!(r1.xi, r2.xi);
        }
        for r in &t1.rounds {
            assert_eq!(r.xi, 1.0 / 10f64.powi(r.round as i32));
        }
    }

    #[test]
    fn stops_on_tolerance_with_small_change() {
        let (x, a, mut enc) = setup(10, 30, 2, 50);
        let cfg = config();
        let mut rng = RngStream::from_seed(4242);
        let trace = adapt_recover(&mut enc, &a, &cfg, Some(&x), &mut rng).unwrap();
        assert!(trace.rounds_used <= cfg.max_rounds);
        if trace.stop_reason == StopReason::Tolerance {
            let last = trace.rounds.last().unwrap();
            assert!(last.l2_change.unwrap() <= cfg.omega);
        }
        // query economy: one query per completed round
        assert_eq!(enc.query_count(), trace.rounds_used);
        assert_eq!(trace.total_bits, trace.rounds_used * 50);
    }

    #[test]
    fn config_validation() {
        let mut cfg = config();
        cfg.decay = 1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = config();
        cfg.omega = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = config();
        cfg.max_rounds = 0;
        assert!(cfg.validate().is_err());
    }
}
