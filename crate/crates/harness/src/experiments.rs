//! Monte-Carlo experiment runners.
//!
//! Trials are seeded by `(master_seed, experiment, cell, trial)` and may run
//! in parallel; results are collected in index order and aggregated by a
//! sequential fold, so CSV bytes never depend on the thread count.
//!
//! For the threshold-sweep experiments (fig1/fig2/fig3) the seed cell is the
//! measurement count, not the (m, param) pair: every deviation parameter in
//! the grid reuses the same instance draw, with the parameter applied as a
//! pure scale on a unit-scale deviation. Comparisons across the parameter
//! grid are therefore paired, which is what makes the monotonicity claims
//! checkable at desk-scale trial counts.

use onebit_core::adaptive::{
    adapt_recover, nonadaptive_recover, AdaptiveConfig, DecoderChoice, Encoder, StopReason,
};
use onebit_core::decoders::{decode_l1, decode_logsum, DecodeResult};
use onebit_core::linalg::Mat;
use onebit_core::model::{
    gen_deviation, gen_gaussian_matrix, gen_sparse_signal, measure, quantize, SensingEnsemble,
    SparseSignal,
};
use onebit_core::theory::{
    c_constant, check_measurement_condition, orthant_bound, sample_orthant_count,
    verify_bound_trial, BoundTrialRecord,
};
use onebit_core::{Real, RngStream};

use crate::config::{DecoderKind, ExperimentConfig, ExperimentId};
use crate::csvio::{fmt_f64, opt_f64, opt_usize, Csv};
use crate::error::{HarnessError, Result};
use crate::metrics::{error_norm, mean, median, nmse};
use crate::seed::derive_trial_seed;

fn with_pool<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    if threads == 0 {
        Ok(f())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| HarnessError::config(format!("thread pool: {e}")))?;
        Ok(pool.install(f))
    }
}

/// Run any experiment, returning its CSV document (also written to
/// `cfg.out` when set).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<String> {
    cfg.validate()?;
    let csv = match cfg.experiment {
        ExperimentId::Fig1 | ExperimentId::Fig2 | ExperimentId::Fig3 => run_metric(cfg)?.csv,
        ExperimentId::Fig5 => run_fig5(cfg)?.csv,
        ExperimentId::Fig6 => run_fig6(cfg)?.csv,
        ExperimentId::Theory => run_theory(cfg)?.csv,
        ExperimentId::Lemma1 => run_lemma1(cfg)?.csv,
    };
    if let Some(path) = &cfg.out {
        crate::files::write_text(path, &csv)?;
    }
    Ok(csv)
}

// ---------------------------------------------------------------------------
// fig1 / fig2 / fig3: one-shot decoding under a threshold-deviation sweep
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct MetricTrialRow {
    pub method: &'static str,
    pub m: usize,
    pub param: f64,
    pub trial: usize,
    pub seed: u64,
    pub ok: bool,
    pub epsilon: Option<f64>,
    pub nmse: Option<f64>,
    pub rmse: Option<f64>,
    pub rounds: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct MetricCell {
    pub method: &'static str,
    pub m: usize,
    pub param: f64,
    pub mean_epsilon: Option<f64>,
    pub mean_nmse: Option<f64>,
    pub mean_rmse: Option<f64>,
    pub mean_rounds: Option<f64>,
    pub median_rounds: Option<f64>,
    pub ok_count: usize,
    pub fail_count: usize,
}

#[derive(Debug)]
pub struct MetricRun {
    pub trials: Vec<MetricTrialRow>,
    pub cells: Vec<MetricCell>,
    pub csv: String,
}

pub const METRIC_HEADER: &[&str] = &[
    "experiment",
    "kind",
    "method",
    "m",
    "n",
    "k",
    "param",
    "trial",
    "seed",
    "status",
    "epsilon",
    "nmse",
    "rmse",
    "rounds",
    "ok_count",
    "fail_count",
];

fn decode_with(
    cfg: &ExperimentConfig,
    a: &SensingEnsemble<Real>,
    tau: &[Real],
    bits: &[onebit_core::model::Sign],
) -> onebit_core::Result<DecodeResult<Real>> {
    match cfg.decoder {
        DecoderKind::L1 => decode_l1(a, tau, bits),
        DecoderKind::LogSum => decode_logsum(a, tau, bits, &cfg.logsum_config()),
    }
}

/// One (m, trial) draw evaluated at a single deviation parameter. Regenerates
/// the instance from the seed so that replay and the full sweep agree.
pub fn metric_single(
    cfg: &ExperimentConfig,
    m: usize,
    param: f64,
    trial: usize,
    seed: u64,
) -> MetricTrialRow {
    let method = cfg.decoder.tag();
    let run = || -> onebit_core::Result<(f64, f64, f64, usize)> {
        let mut rng = RngStream::from_seed(seed);
        let x = gen_sparse_signal::<Real>(cfg.n, cfg.k, &mut rng)?;
        let a = gen_gaussian_matrix::<Real>(m, cfg.n, &mut rng)?;
        let unit = gen_deviation(&cfg.deviation.unit_spec(), m, &mut rng)?;
        let delta: Vec<Real> = unit.iter().map(|&u| param * u).collect();
        let y = measure(&a, &x)?;
        let tau: Vec<Real> = y.iter().zip(&delta).map(|(&yi, &d)| yi + d).collect();
        let bits = quantize(&y, &tau)?.bits;
        let decoded = decode_with(cfg, &a, &tau, &bits)?;
        let dense = x.dense();
        let eps = onebit_core::linalg::norm2(&delta);
        Ok((
            eps,
            nmse(&dense, &decoded.xhat),
            error_norm(&dense, &decoded.xhat),
            decoded.outer_iterations,
        ))
    };
    match run() {
        Ok((epsilon, v_nmse, v_rmse, rounds)) => MetricTrialRow {
            method,
            m,
            param,
            trial,
            seed,
            ok: true,
            epsilon: Some(epsilon),
            nmse: Some(v_nmse),
            rmse: Some(v_rmse),
            rounds: Some(rounds),
        },
        Err(_) => MetricTrialRow {
            method,
            m,
            param,
            trial,
            seed,
            ok: false,
            epsilon: None,
            nmse: None,
            rmse: None,
            rounds: None,
        },
    }
}

fn aggregate_cell(
    method: &'static str,
    m: usize,
    param: f64,
    rows: &[&MetricTrialRow],
) -> MetricCell {
    let ok: Vec<&&MetricTrialRow> = rows.iter().filter(|r| r.ok).collect();
    let mut rounds: Vec<f64> = ok
        .iter()
        .filter_map(|r| r.rounds.map(|v| v as f64))
        .collect();
    MetricCell {
        method,
        m,
        param,
        mean_epsilon: mean(ok.iter().filter_map(|r| r.epsilon)),
        mean_nmse: mean(ok.iter().filter_map(|r| r.nmse)),
        mean_rmse: mean(ok.iter().filter_map(|r| r.rmse)),
        mean_rounds: mean(rounds.iter().copied()),
        median_rounds: median(&mut rounds),
        ok_count: ok.len(),
        fail_count: rows.len() - ok.len(),
    }
}

fn metric_csv(cfg: &ExperimentConfig, trials: &[MetricTrialRow], cells: &[MetricCell]) -> String {
    let mut csv = Csv::new(METRIC_HEADER);
    let tag = cfg.experiment.tag();
    for cell in cells {
        for r in trials
            .iter()
            .filter(|r| r.m == cell.m && r.param == cell.param && r.method == cell.method)
        {
            csv.row(&[
                tag.into(),
                "trial".into(),
                r.method.into(),
                r.m.to_string(),
                cfg.n.to_string(),
                cfg.k.to_string(),
                fmt_f64(r.param),
                r.trial.to_string(),
                r.seed.to_string(),
                if r.ok { "ok" } else { "failed" }.into(),
                opt_f64(r.epsilon),
                opt_f64(r.nmse),
                opt_f64(r.rmse),
                opt_usize(r.rounds),
                String::new(),
                String::new(),
            ]);
        }
        csv.row(&[
            tag.into(),
            "aggregate".into(),
            cell.method.into(),
            cell.m.to_string(),
            cfg.n.to_string(),
            cfg.k.to_string(),
            fmt_f64(cell.param),
            String::new(),
            String::new(),
            String::new(),
            opt_f64(cell.mean_epsilon),
            opt_f64(cell.mean_nmse),
            opt_f64(cell.mean_rmse),
            opt_f64(cell.mean_rounds),
            cell.ok_count.to_string(),
            cell.fail_count.to_string(),
        ]);
    }
    csv.finish()
}

pub fn run_metric(cfg: &ExperimentConfig) -> Result<MetricRun> {
    cfg.validate()?;
    let tag = cfg.experiment.tag();
    let jobs: Vec<(usize, usize, usize)> = cfg
        .m_grid
        .iter()
        .enumerate()
        .flat_map(|(mi, &m)| (0..cfg.trials).map(move |t| (mi, m, t)))
        .collect();
    let cfg_ref = cfg;
    let per_trial: Vec<Vec<MetricTrialRow>> = with_pool(cfg.threads, move || {
        use rayon::prelude::*;
        jobs.par_iter()
            .map(|&(mi, m, t)| {
                let seed = derive_trial_seed(cfg_ref.master_seed, tag, mi as u64, t as u64);
                cfg_ref
                    .param_grid
                    .iter()
                    .map(|&param| metric_single(cfg_ref, m, param, t, seed))
                    .collect()
            })
            .collect()
    })?;
    let trials: Vec<MetricTrialRow> = per_trial.into_iter().flatten().collect();
    let mut cells = Vec::new();
    for &m in &cfg.m_grid {
        for &param in &cfg.param_grid {
            let rows: Vec<&MetricTrialRow> = trials
                .iter()
                .filter(|r| r.m == m && r.param == param)
                .collect();
            cells.push(aggregate_cell(cfg.decoder.tag(), m, param, &rows));
        }
    }
    let csv = metric_csv(cfg, &trials, &cells);
    Ok(MetricRun { trials, cells, csv })
}

// ---------------------------------------------------------------------------
// fig6: adaptive vs non-adaptive across the m grid
// ---------------------------------------------------------------------------

fn adaptive_config(cfg: &ExperimentConfig, xi0: f64) -> AdaptiveConfig<Real> {
    AdaptiveConfig {
        xi0,
        decay: cfg.decay,
        omega: cfg.omega,
        max_rounds: cfg.max_rounds,
        deviation: cfg.deviation.unit_spec(),
        decoder: match cfg.decoder {
            DecoderKind::L1 => DecoderChoice::L1,
            DecoderKind::LogSum => DecoderChoice::LogSum(cfg.logsum_config()),
        },
    }
}

type Instance = (
    SparseSignal<Real>,
    SensingEnsemble<Real>,
    Vec<Real>,
    RngStream,
);

fn instance_from_seed(
    cfg: &ExperimentConfig,
    m: usize,
    seed: u64,
) -> onebit_core::Result<Instance> {
    let mut rng = RngStream::from_seed(seed);
    let x = gen_sparse_signal::<Real>(cfg.n, cfg.k, &mut rng)?;
    let a = gen_gaussian_matrix::<Real>(m, cfg.n, &mut rng)?;
    let y = measure(&a, &x)?;
    Ok((x, a, y, rng))
}

/// Adaptive and non-adaptive rows for one (m, trial) draw. Both methods share
/// the instance and the round-0 deviation stream.
pub fn fig6_single(
    cfg: &ExperimentConfig,
    m: usize,
    xi0: f64,
    trial: usize,
    seed: u64,
) -> (MetricTrialRow, MetricTrialRow) {
    let acfg = adaptive_config(cfg, xi0);
    let fail = |method: &'static str| MetricTrialRow {
        method,
        m,
        param: xi0,
        trial,
        seed,
        ok: false,
        epsilon: None,
        nmse: None,
        rmse: None,
        rounds: None,
    };
    let Ok((x, a, y, rng)) = instance_from_seed(cfg, m, seed) else {
        return (fail("adaptive"), fail("nonadaptive"));
    };
    let dense = x.dense();

    let adaptive_row = match Encoder::new(y.clone()) {
        Ok(mut enc) => {
            let mut loop_rng = rng.substream(1);
            match adapt_recover(&mut enc, &a, &acfg, Some(&x), &mut loop_rng) {
                Ok(trace) => {
                    let xhat = trace.final_xhat();
                    MetricTrialRow {
                        method: "adaptive",
                        m,
                        param: xi0,
                        trial,
                        seed,
                        ok: true,
                        epsilon: None,
                        nmse: Some(nmse(&dense, xhat)),
                        rmse: Some(error_norm(&dense, xhat)),
                        rounds: Some(trace.rounds_used),
                    }
                }
                Err(_) => fail("adaptive"),
            }
        }
        Err(_) => fail("adaptive"),
    };

    let nonadaptive_row = match Encoder::new(y) {
        Ok(mut enc) => {
            let mut loop_rng = rng.substream(1);
            match nonadaptive_recover(&mut enc, &a, &acfg, &mut loop_rng) {
                Ok(decoded) => MetricTrialRow {
                    method: "nonadaptive",
                    m,
                    param: xi0,
                    trial,
                    seed,
                    ok: true,
                    epsilon: None,
                    nmse: Some(nmse(&dense, &decoded.xhat)),
                    rmse: Some(error_norm(&dense, &decoded.xhat)),
                    rounds: Some(1),
                },
                Err(_) => fail("nonadaptive"),
            }
        }
        Err(_) => fail("nonadaptive"),
    };
    (adaptive_row, nonadaptive_row)
}

pub fn run_fig6(cfg: &ExperimentConfig) -> Result<MetricRun> {
    cfg.validate()?;
    let tag = cfg.experiment.tag();
    let jobs: Vec<(usize, usize, usize)> = cfg
        .m_grid
        .iter()
        .enumerate()
        .flat_map(|(mi, &m)| (0..cfg.trials).map(move |t| (mi, m, t)))
        .collect();
    let cfg_ref = cfg;
    let pairs: Vec<Vec<(MetricTrialRow, MetricTrialRow)>> = with_pool(cfg.threads, move || {
        use rayon::prelude::*;
        jobs.par_iter()
            .map(|&(mi, m, t)| {
                let seed = derive_trial_seed(cfg_ref.master_seed, tag, mi as u64, t as u64);
                cfg_ref
                    .param_grid
                    .iter()
                    .map(|&xi0| fig6_single(cfg_ref, m, xi0, t, seed))
                    .collect()
            })
            .collect()
    })?;
    let mut trials = Vec::new();
    for trial_pairs in pairs {
        for (a, n) in trial_pairs {
            trials.push(a);
            trials.push(n);
        }
    }
    let mut cells = Vec::new();
    for &m in &cfg.m_grid {
        for &param in &cfg.param_grid {
            for method in ["adaptive", "nonadaptive"] {
                let rows: Vec<&MetricTrialRow> = trials
                    .iter()
                    .filter(|r| r.m == m && r.param == param && r.method == method)
                    .collect();
                cells.push(aggregate_cell(method, m, param, &rows));
            }
        }
    }
    let csv = metric_csv(cfg, &trials, &cells);
    Ok(MetricRun { trials, cells, csv })
}

// ---------------------------------------------------------------------------
// fig5: NMSE per adaptive round
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Fig5TrialRow {
    pub trial: usize,
    pub seed: u64,
    pub round: usize,
    pub xi: f64,
    pub nmse: Option<f64>,
    pub l2_change: Option<f64>,
    pub stop_reason: Option<&'static str>,
}

#[derive(Debug)]
pub struct Fig5Run {
    pub rows: Vec<Fig5TrialRow>,
    /// Mean NMSE per round over completed traces (last value carried forward
    /// for traces that stopped early), plus the contributing count.
    pub round_means: Vec<(usize, f64, usize)>,
    pub ok_count: usize,
    pub fail_count: usize,
    pub csv: String,
}

pub const FIG5_HEADER: &[&str] = &[
    "experiment",
    "kind",
    "m",
    "n",
    "k",
    "param",
    "trial",
    "seed",
    "round",
    "xi",
    "nmse",
    "l2_change",
    "stop_reason",
    "ok_count",
    "fail_count",
];

/// Per-round rows of one adaptive trace; `None` when the loop aborted.
pub fn fig5_single(
    cfg: &ExperimentConfig,
    m: usize,
    xi0: f64,
    trial: usize,
    seed: u64,
) -> Option<Vec<Fig5TrialRow>> {
    let acfg = adaptive_config(cfg, xi0);
    let (x, a, y, rng) = instance_from_seed(cfg, m, seed).ok()?;
    let mut enc = Encoder::new(y).ok()?;
    let mut loop_rng = rng.substream(1);
    let trace = adapt_recover(&mut enc, &a, &acfg, Some(&x), &mut loop_rng).ok()?;
    let last = trace.rounds.len() - 1;
    Some(
        trace
            .rounds
            .iter()
            .enumerate()
            .map(|(i, r)| Fig5TrialRow {
                trial,
                seed,
                round: r.round,
                xi: r.xi,
                nmse: r.nmse,
                l2_change: r.l2_change,
                stop_reason: (i == last).then_some(match trace.stop_reason {
                    StopReason::Tolerance => "tolerance",
                    StopReason::MaxRounds => "max_rounds",
                }),
            })
            .collect(),
    )
}

pub fn run_fig5(cfg: &ExperimentConfig) -> Result<Fig5Run> {
    cfg.validate()?;
    let tag = cfg.experiment.tag();
    let m = cfg.m_grid[0];
    let xi0 = cfg.param_grid[0];
    let cfg_ref = cfg;
    let traces: Vec<Option<Vec<Fig5TrialRow>>> = with_pool(cfg.threads, move || {
        use rayon::prelude::*;
        (0..cfg_ref.trials)
            .into_par_iter()
            .map(|t| {
                let seed = derive_trial_seed(cfg_ref.master_seed, tag, 0, t as u64);
                fig5_single(cfg_ref, m, xi0, t, seed)
            })
            .collect()
    })?;

    let ok_traces: Vec<&Vec<Fig5TrialRow>> = traces.iter().flatten().collect();
    let fail_count = traces.len() - ok_traces.len();
    let mut round_means = Vec::new();
    for round in 0..cfg.max_rounds {
        let values: Vec<f64> = ok_traces
            .iter()
            .filter_map(|rows| {
                let idx = round.min(rows.len() - 1);
                rows[idx].nmse
            })
            .collect();
        if let Some(mu) = mean(values.iter().copied()) {
            round_means.push((round, mu, values.len()));
        }
    }

    let mut csv = Csv::new(FIG5_HEADER);
    let rows: Vec<Fig5TrialRow> = traces
        .iter()
        .flatten()
        .flat_map(|v| v.iter().cloned())
        .collect();
    for r in &rows {
        csv.row(&[
            tag.into(),
            "trial".into(),
            m.to_string(),
            cfg.n.to_string(),
            cfg.k.to_string(),
            fmt_f64(xi0),
            r.trial.to_string(),
            r.seed.to_string(),
            r.round.to_string(),
            fmt_f64(r.xi),
            opt_f64(r.nmse),
            opt_f64(r.l2_change),
            r.stop_reason.unwrap_or_default().into(),
            String::new(),
            String::new(),
        ]);
    }
    for &(round, mu, count) in &round_means {
        csv.row(&[
            tag.into(),
            "aggregate".into(),
            m.to_string(),
            cfg.n.to_string(),
            cfg.k.to_string(),
            fmt_f64(xi0),
            String::new(),
            String::new(),
            round.to_string(),
            String::new(),
            fmt_f64(mu),
            String::new(),
            String::new(),
            count.to_string(),
            fail_count.to_string(),
        ]);
    }
    Ok(Fig5Run {
        rows,
        round_means,
        ok_count: ok_traces.len(),
        fail_count,
        csv: csv.finish(),
    })
}

// ---------------------------------------------------------------------------
// theory: Monte-Carlo check of the recovery bound
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct TheoryTrialRow {
    pub trial: usize,
    pub record: Option<BoundTrialRecord<Real>>,
    pub seed: u64,
}

#[derive(Debug)]
pub struct TheoryRun {
    pub rows: Vec<TheoryTrialRow>,
    /// Trials with mu > 0.
    pub eligible: usize,
    pub violations: usize,
    pub condition_lhs: f64,
    pub condition_rhs: f64,
    pub condition_holds: bool,
    pub csv: String,
}

pub const THEORY_HEADER: &[&str] = &[
    "experiment",
    "kind",
    "m",
    "n",
    "k",
    "kappa",
    "param",
    "trial",
    "seed",
    "status",
    "epsilon",
    "mu",
    "lambda",
    "residual",
    "bound",
    "worst_case",
    "violated",
    "eligible_count",
    "violation_count",
    "violation_rate",
    "condition_lhs",
    "condition_rhs",
    "condition_holds",
    "c_const",
];

pub fn theory_single(
    cfg: &ExperimentConfig,
    m: usize,
    param: f64,
    seed: u64,
) -> Option<BoundTrialRecord<Real>> {
    let spec = cfg.deviation.unit_spec().scaled(param).ok()?;
    let mut rng = RngStream::from_seed(seed);
    verify_bound_trial::<Real>(cfg.n, m, cfg.k, cfg.kappa, &spec, &mut rng).ok()
}

pub fn run_theory(cfg: &ExperimentConfig) -> Result<TheoryRun> {
    cfg.validate()?;
    let tag = cfg.experiment.tag();
    let m = cfg.m_grid[0];
    let param = cfg.param_grid[0];
    let cfg_ref = cfg;
    let rows: Vec<TheoryTrialRow> = with_pool(cfg.threads, move || {
        use rayon::prelude::*;
        (0..cfg_ref.trials)
            .into_par_iter()
            .map(|t| {
                let seed = derive_trial_seed(cfg_ref.master_seed, tag, 0, t as u64);
                TheoryTrialRow {
                    trial: t,
                    record: theory_single(cfg_ref, m, param, seed),
                    seed,
                }
            })
            .collect()
    })?;

    let eligible = rows
        .iter()
        .filter(|r| r.record.as_ref().is_some_and(|rec| rec.mu > 0.0))
        .count();
    let violations = rows
        .iter()
        .filter(|r| {
            r.record
                .as_ref()
                .is_some_and(|rec| rec.mu > 0.0 && rec.violated)
        })
        .count();
    let (condition_lhs, condition_rhs, condition_holds) =
        check_measurement_condition::<f64>(m, cfg.n, cfg.k, cfg.kappa, cfg.eta)?;
    let c_const: f64 = c_constant(cfg.kappa);

    let mut csv = Csv::new(THEORY_HEADER);
    let blank_tail = || vec![String::new(); 7];
    for r in &rows {
        let mut fields = vec![
            tag.to_string(),
            "trial".into(),
            m.to_string(),
            cfg.n.to_string(),
            cfg.k.to_string(),
            cfg.kappa.to_string(),
            fmt_f64(param),
            r.trial.to_string(),
            r.seed.to_string(),
        ];
        match &r.record {
            Some(rec) => {
                fields.push("ok".into());
                fields.push(fmt_f64(rec.deviation_norm));
                fields.push(fmt_f64(rec.mu));
                fields.push(opt_f64((rec.mu > 0.0).then(|| 1.0 / rec.mu.sqrt())));
                fields.push(fmt_f64(rec.residual_norm));
                fields.push(fmt_f64(rec.bound));
                fields.push(opt_f64(rec.worst_case_radius));
                fields.push(if rec.violated { "1" } else { "0" }.into());
            }
            None => {
                fields.push("failed".into());
                fields.extend(vec![String::new(); 7]);
            }
        }
        fields.extend(blank_tail());
        csv.row(&fields);
    }
    let mut agg = vec![
        tag.to_string(),
        "aggregate".into(),
        m.to_string(),
        cfg.n.to_string(),
        cfg.k.to_string(),
        cfg.kappa.to_string(),
        fmt_f64(param),
    ];
    agg.extend(vec![String::new(); 10]);
    agg.push(eligible.to_string());
    agg.push(violations.to_string());
    agg.push(opt_f64(
        (eligible > 0).then(|| violations as f64 / eligible as f64),
    ));
    agg.push(fmt_f64(condition_lhs));
    agg.push(fmt_f64(condition_rhs));
    agg.push(if condition_holds { "1" } else { "0" }.into());
    agg.push(fmt_f64(c_const));
    csv.row(&agg);

    Ok(TheoryRun {
        rows,
        eligible,
        violations,
        condition_lhs,
        condition_rhs,
        condition_holds,
        csv: csv.finish(),
    })
}

// ---------------------------------------------------------------------------
// lemma1: sampled orthant counts against the 2^k C(m,k) bound
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Lemma1Row {
    pub m: usize,
    pub k: usize,
    pub subspace: usize,
    pub seed: u64,
    pub distinct: u64,
    pub bound: u64,
}

#[derive(Debug)]
pub struct Lemma1Run {
    pub rows: Vec<Lemma1Row>,
    pub all_within: bool,
    pub csv: String,
}

pub const LEMMA1_HEADER: &[&str] = &[
    "experiment",
    "kind",
    "m",
    "k",
    "subspace",
    "seed",
    "samples",
    "distinct",
    "bound",
    "within",
];

pub fn lemma1_single(
    m: usize,
    k: usize,
    samples: usize,
    seed: u64,
) -> onebit_core::Result<(u64, u64)> {
    let mut rng = RngStream::from_seed(seed);
    let rows: Vec<Vec<Real>> = (0..k)
        .map(|_| {
            (0..m)
                .map(|_| <Real as onebit_core::Scalar>::sample_standard_normal(&mut rng))
                .collect()
        })
        .collect();
    let basis = Mat::from_rows(rows);
    let distinct = sample_orthant_count(&basis, samples, &mut rng)?;
    Ok((distinct, orthant_bound(m, k)?))
}

pub fn run_lemma1(cfg: &ExperimentConfig) -> Result<Lemma1Run> {
    cfg.validate()?;
    let tag = cfg.experiment.tag();
    let jobs: Vec<(usize, usize, usize, usize)> = cfg
        .pairs
        .iter()
        .enumerate()
        .flat_map(|(pi, &(m, k))| (0..cfg.subspaces).map(move |s| (pi, m, k, s)))
        .collect();
    let cfg_ref = cfg;
    let rows: Vec<Lemma1Row> = with_pool(cfg.threads, move || {
        use rayon::prelude::*;
        jobs.par_iter()
            .map(|&(pi, m, k, s)| {
                let seed = derive_trial_seed(cfg_ref.master_seed, tag, pi as u64, s as u64);
                let (distinct, bound) =
                    lemma1_single(m, k, cfg_ref.samples, seed).expect("guarded sizes");
                Lemma1Row {
                    m,
                    k,
                    subspace: s,
                    seed,
                    distinct,
                    bound,
                }
            })
            .collect()
    })?;
    let all_within = rows.iter().all(|r| r.distinct <= r.bound);

    let mut csv = Csv::new(LEMMA1_HEADER);
    for r in &rows {
        csv.row(&[
            tag.into(),
            "trial".into(),
            r.m.to_string(),
            r.k.to_string(),
            r.subspace.to_string(),
            r.seed.to_string(),
            cfg.samples.to_string(),
            r.distinct.to_string(),
            r.bound.to_string(),
            if r.distinct <= r.bound { "1" } else { "0" }.into(),
        ]);
    }
    for &(m, k) in &cfg.pairs {
        let max_distinct = rows
            .iter()
            .filter(|r| r.m == m && r.k == k)
            .map(|r| r.distinct)
            .max()
            .unwrap_or(0);
        let bound = orthant_bound(m, k)?;
        csv.row(&[
            tag.into(),
            "aggregate".into(),
            m.to_string(),
            k.to_string(),
            String::new(),
            String::new(),
            cfg.samples.to_string(),
            max_distinct.to_string(),
            bound.to_string(),
            if max_distinct <= bound { "1" } else { "0" }.into(),
        ]);
    }
    Ok(Lemma1Run {
        rows,
        all_within,
        csv: csv.finish(),
    })
}

// ---------------------------------------------------------------------------
// replay: one trial from its stored seed
// ---------------------------------------------------------------------------

/// Re-run a single trial and return its CSV rows (with header). The seed is
/// the one stored in the original output; `m` and `param` identify the cell.
pub fn replay(cfg: &ExperimentConfig, m: usize, param: f64, seed: u64) -> Result<String> {
    cfg.validate()?;
    let tag = cfg.experiment.tag();
    match cfg.experiment {
        ExperimentId::Fig1 | ExperimentId::Fig2 | ExperimentId::Fig3 => {
            let r = metric_single(cfg, m, param, 0, seed);
            let mut csv = Csv::new(METRIC_HEADER);
            csv.row(&[
                tag.into(),
                "trial".into(),
                r.method.into(),
                m.to_string(),
                cfg.n.to_string(),
                cfg.k.to_string(),
                fmt_f64(param),
                String::new(),
                seed.to_string(),
                if r.ok { "ok" } else { "failed" }.into(),
                opt_f64(r.epsilon),
                opt_f64(r.nmse),
                opt_f64(r.rmse),
                opt_usize(r.rounds),
                String::new(),
                String::new(),
            ]);
            Ok(csv.finish())
        }
        ExperimentId::Fig6 => {
            let (a, n) = fig6_single(cfg, m, param, 0, seed);
            let mut csv = Csv::new(METRIC_HEADER);
            for r in [a, n] {
                csv.row(&[
                    tag.into(),
                    "trial".into(),
                    r.method.into(),
                    m.to_string(),
                    cfg.n.to_string(),
                    cfg.k.to_string(),
                    fmt_f64(param),
                    String::new(),
                    seed.to_string(),
                    if r.ok { "ok" } else { "failed" }.into(),
                    opt_f64(r.epsilon),
                    opt_f64(r.nmse),
                    opt_f64(r.rmse),
                    opt_usize(r.rounds),
                    String::new(),
                    String::new(),
                ]);
            }
            Ok(csv.finish())
        }
        ExperimentId::Fig5 => {
            let rows = fig5_single(cfg, m, param, 0, seed).ok_or(HarnessError::Core(
                onebit_core::Error::InfeasibleMeasurements,
            ))?;
            let mut csv = Csv::new(FIG5_HEADER);
            for r in rows {
                csv.row(&[
                    tag.into(),
                    "trial".into(),
                    m.to_string(),
                    cfg.n.to_string(),
                    cfg.k.to_string(),
                    fmt_f64(param),
                    String::new(),
                    seed.to_string(),
                    r.round.to_string(),
                    fmt_f64(r.xi),
                    opt_f64(r.nmse),
                    opt_f64(r.l2_change),
                    r.stop_reason.unwrap_or_default().into(),
                    String::new(),
                    String::new(),
                ]);
            }
            Ok(csv.finish())
        }
        ExperimentId::Theory => {
            let rec = theory_single(cfg, m, param, seed);
            let mut csv = Csv::new(THEORY_HEADER);
            let mut fields = vec![
                tag.to_string(),
                "trial".into(),
                m.to_string(),
                cfg.n.to_string(),
                cfg.k.to_string(),
                cfg.kappa.to_string(),
                fmt_f64(param),
                String::new(),
                seed.to_string(),
            ];
            match rec {
                Some(rec) => {
                    fields.push("ok".into());
                    fields.push(fmt_f64(rec.deviation_norm));
                    fields.push(fmt_f64(rec.mu));
                    fields.push(opt_f64((rec.mu > 0.0).then(|| 1.0 / rec.mu.sqrt())));
                    fields.push(fmt_f64(rec.residual_norm));
                    fields.push(fmt_f64(rec.bound));
                    fields.push(opt_f64(rec.worst_case_radius));
                    fields.push(if rec.violated { "1" } else { "0" }.into());
                }
                None => {
                    fields.push("failed".into());
                    fields.extend(vec![String::new(); 7]);
                }
            }
            fields.extend(vec![String::new(); 7]);
            csv.row(&fields);
            Ok(csv.finish())
        }
        ExperimentId::Lemma1 => {
            // For lemma1 the cell is (m, k) and `param` carries k.
            let k = param as usize;
            let (distinct, bound) = lemma1_single(m, k, cfg.samples, seed)?;
            let mut csv = Csv::new(LEMMA1_HEADER);
            csv.row(&[
                tag.into(),
                "trial".into(),
                m.to_string(),
                k.to_string(),
                String::new(),
                seed.to_string(),
                cfg.samples.to_string(),
                distinct.to_string(),
                bound.to_string(),
                if distinct <= bound { "1" } else { "0" }.into(),
            ]);
            Ok(csv.finish())
        }
    }
}
