//! Runner-level checks: schema shape, aggregate recomputability, pairing
//! behavior of the deviation sweep.

use onebit_harness::config::{ExperimentConfig, ExperimentId};
use onebit_harness::csvio::parse_f64;
use onebit_harness::experiments::{run_fig5, run_metric, run_theory};

fn small_fig1(trials: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default_for(ExperimentId::Fig1);
    cfg.trials = trials;
    cfg.m_grid = vec![30];
    cfg.param_grid = vec![0.01];
    cfg
}

#[test]
fn single_trial_single_cell_schema() {
    let run = run_metric(&small_fig1(1)).unwrap();
    assert_eq!(run.trials.len(), 1);
    assert_eq!(run.cells.len(), 1);
    let lines: Vec<&str> = run.csv.lines().collect();
    assert_eq!(lines.len(), 3, "header + 1 trial row + 1 aggregate row");
    assert!(lines[1].contains(",trial,"));
    assert!(lines[2].contains(",aggregate,"));
}

#[test]
fn aggregate_rows_recomputable_from_trial_rows() {
    let mut cfg = small_fig1(25);
    cfg.param_grid = vec![0.1, 0.01];
    let run = run_metric(&cfg).unwrap();
    let mut lines = run.csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let (kind_c, param_c, nmse_c) = (col("kind"), col("param"), col("nmse"));
    for &param in &cfg.param_grid {
        let rows: Vec<Vec<&str>> = run
            .csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').collect::<Vec<&str>>())
            .filter(|f| parse_f64(f[param_c]) == Some(param))
            .collect();
        let trial_mean = {
            let vals: Vec<f64> = rows
                .iter()
                .filter(|f| f[kind_c] == "trial")
                .map(|f| parse_f64(f[nmse_c]).unwrap())
                .collect();
            vals.iter().sum::<f64>() / vals.len() as f64
        };
        let agg = rows
            .iter()
            .find(|f| f[kind_c] == "aggregate")
            .map(|f| parse_f64(f[nmse_c]).unwrap())
            .unwrap();
        assert!(
            (trial_mean - agg).abs() <= 1e-12 * (1.0 + agg.abs()),
            "aggregate {agg} vs recomputed {trial_mean}"
        );
    }
}

#[test]
fn doubling_the_deviation_doubles_rmse() {
    // Paired sweep: the same trial seeds evaluated at a and 2a.
    let mut cfg = small_fig1(30);
    cfg.m_grid = vec![100];
    cfg.n = 120;
    cfg.k = 2;
    cfg.param_grid = vec![0.01, 0.02];
    let run = run_metric(&cfg).unwrap();
    let rmse_at = |p: f64| {
        run.cells
            .iter()
            .find(|c| c.param == p)
            .and_then(|c| c.mean_rmse)
            .unwrap()
    };
    let ratio = rmse_at(0.02) / rmse_at(0.01);
    assert!(
        (ratio - 2.0).abs() <= 0.5,
        "RMSE ratio {ratio} should be close to 2"
    );
}

#[test]
fn fig5_round_means_do_not_increase() {
    let mut cfg = ExperimentConfig::default_for(ExperimentId::Fig5);
    cfg.trials = 20;
    let run = run_fig5(&cfg).unwrap();
    assert_eq!(run.fail_count, 0);
    assert!(run.round_means.len() >= 2);
    for w in run.round_means.windows(2) {
        assert!(
            w[1].1 <= w[0].1 * 1.05,
            "round mean NMSE rose: {} -> {}",
            w[0].1,
            w[1].1
        );
    }
    let first = run.round_means.first().unwrap().1;
    let last = run.round_means.last().unwrap().1;
    assert!(
        last < 0.8 * first,
        "refinement should reduce NMSE: {first} -> {last}"
    );
}

#[test]
fn theory_trials_are_reproducible_by_seed() {
    let mut cfg = ExperimentConfig::default_for(ExperimentId::Theory);
    cfg.trials = 10;
    let a = run_theory(&cfg).unwrap();
    let b = run_theory(&cfg).unwrap();
    for (ra, rb) in a.rows.iter().zip(&b.rows) {
        assert_eq!(ra.seed, rb.seed);
        assert_eq!(ra.record, rb.record);
    }
    assert_eq!(a.csv, b.csv);
}
