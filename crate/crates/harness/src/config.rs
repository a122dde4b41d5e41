//! Experiment configuration: per-experiment defaults, JSON overlay, CLI
//! overrides (in that precedence order).

use std::path::{Path, PathBuf};

use serde::Deserialize;

use onebit_core::decoders::LogSumConfig;
use onebit_core::model::DeviationSpec;
use onebit_core::Real;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentId {
    Fig1,
    Fig2,
    Fig3,
    Fig5,
    Fig6,
    Theory,
    Lemma1,
}

impl ExperimentId {
    pub fn tag(&self) -> &'static str {
        match self {
            ExperimentId::Fig1 => "fig1",
            ExperimentId::Fig2 => "fig2",
            ExperimentId::Fig3 => "fig3",
            ExperimentId::Fig5 => "fig5",
            ExperimentId::Fig6 => "fig6",
            ExperimentId::Theory => "theory",
            ExperimentId::Lemma1 => "lemma1",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "fig1" => ExperimentId::Fig1,
            "fig2" => ExperimentId::Fig2,
            "fig3" => ExperimentId::Fig3,
            "fig5" => ExperimentId::Fig5,
            "fig6" => ExperimentId::Fig6,
            "theory" => ExperimentId::Theory,
            "lemma1" => ExperimentId::Lemma1,
            other => {
                return Err(HarnessError::config(format!(
                    "unknown experiment {other:?}"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeviationKind {
    Rademacher,
    Gaussian,
}

impl DeviationKind {
    /// Unit-scale spec of this kind; experiment code scales it by the grid
    /// parameter so that one trial seed serves the whole parameter sweep.
    pub fn unit_spec(&self) -> DeviationSpec<Real> {
        match self {
            DeviationKind::Rademacher => DeviationSpec::rademacher(1.0).expect("unit scale"),
            DeviationKind::Gaussian => DeviationSpec::gaussian(1.0).expect("unit scale"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    L1,
    LogSum,
}

impl DecoderKind {
    pub fn tag(&self) -> &'static str {
        match self {
            DecoderKind::L1 => "l1",
            DecoderKind::LogSum => "logsum",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "l1" => DecoderKind::L1,
            "logsum" => DecoderKind::LogSum,
            other => return Err(HarnessError::config(format!("unknown decoder {other:?}"))),
        })
    }
}

/// Fully resolved configuration for one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub n: usize,
    pub k: usize,
    pub m_grid: Vec<usize>,
    /// Deviation parameter grid: `a` (rademacher), `sigma` (gaussian), or the
    /// xi0 scale for the adaptive experiments.
    pub param_grid: Vec<f64>,
    pub deviation: DeviationKind,
    pub decoder: DecoderKind,
    pub trials: usize,
    pub master_seed: u64,
    pub out: Option<PathBuf>,
    pub threads: usize,
    // adaptive loop
    pub xi0: f64,
    pub decay: f64,
    pub omega: f64,
    pub max_rounds: usize,
    // theory
    pub kappa: usize,
    pub eta: f64,
    // lemma1
    pub pairs: Vec<(usize, usize)>,
    pub subspaces: usize,
    pub samples: usize,
    // log-sum decoder
    pub epsilon_smooth: f64,
    pub max_outer: usize,
}

impl ExperimentConfig {
    /// Desk-scale defaults per experiment; full-scale trial counts are
    /// available through [`ExperimentConfig::full_scale`].
    pub fn default_for(id: ExperimentId) -> Self {
        let base = ExperimentConfig {
            experiment: id,
            n: 50,
            k: 3,
            m_grid: vec![40, 80, 120, 160, 200],
            param_grid: vec![1.0, 0.1, 0.01, 0.001],
            deviation: DeviationKind::Rademacher,
            decoder: DecoderKind::L1,
            trials: 200,
            master_seed: 7,
            out: None,
            threads: 0,
            xi0: 1.0,
            decay: 10.0,
            omega: 0.01,
            max_rounds: 12,
            kappa: 8,
            eta: 0.1,
            pairs: vec![(4, 1), (5, 2), (6, 2), (6, 3)],
            subspaces: 10,
            samples: 100_000,
            epsilon_smooth: 0.01,
            max_outer: 10,
        };
        match id {
            ExperimentId::Fig1 => base,
            ExperimentId::Fig2 => ExperimentConfig {
                n: 120,
                k: 2,
                m_grid: vec![100],
                param_grid: log_grid(1e-3, 1.0, 7),
                ..base
            },
            ExperimentId::Fig3 => ExperimentConfig {
                deviation: DeviationKind::Gaussian,
                param_grid: vec![1.0, 0.1, 0.01],
                ..base
            },
            ExperimentId::Fig5 => ExperimentConfig {
                n: 50,
                k: 2,
                m_grid: vec![40],
                param_grid: vec![1.0],
                deviation: DeviationKind::Gaussian,
                trials: 100,
                omega: 1e-6,
                max_rounds: 8,
                ..base
            },
            ExperimentId::Fig6 => ExperimentConfig {
                n: 50,
                k: 2,
                m_grid: vec![30, 40, 50, 60],
                param_grid: vec![1.0],
                deviation: DeviationKind::Gaussian,
                trials: 100,
                omega: 0.01,
                max_rounds: 12,
                ..base
            },
            ExperimentId::Theory => ExperimentConfig {
                n: 8,
                k: 1,
                m_grid: vec![10],
                param_grid: vec![0.1],
                trials: 500,
                kappa: 8,
                eta: 0.1,
                ..base
            },
            ExperimentId::Lemma1 => ExperimentConfig { trials: 1, ..base },
        }
    }

    /// Trial counts used by the reference protocol.
    pub fn full_scale(mut self) -> Self {
        self.trials = match self.experiment {
            ExperimentId::Fig1 | ExperimentId::Fig2 | ExperimentId::Fig3 => 10_000,
            ExperimentId::Fig5 | ExperimentId::Fig6 => 1_000,
            ExperimentId::Theory | ExperimentId::Lemma1 => self.trials,
        };
        self
    }

    pub fn logsum_config(&self) -> LogSumConfig<Real> {
        LogSumConfig {
            epsilon_smooth: self.epsilon_smooth,
            max_outer: self.max_outer,
            weight_floor: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(HarnessError::config("trials must be >= 1"));
        }
        if self.m_grid.is_empty() || self.param_grid.is_empty() {
            return Err(HarnessError::config("grids must be non-empty"));
        }
        if self.m_grid.contains(&0) {
            return Err(HarnessError::config("every m must be >= 1"));
        }
        if self.k > self.n {
            return Err(HarnessError::config("K must not exceed n"));
        }
        if self
            .param_grid
            .iter()
            .any(|&p| !(p > 0.0) || !p.is_finite())
        {
            return Err(HarnessError::config(
                "deviation parameters must be positive",
            ));
        }
        if !(self.decay > 1.0) {
            return Err(HarnessError::config("decay must exceed 1"));
        }
        if !(self.omega > 0.0) {
            return Err(HarnessError::config("omega must be positive"));
        }
        if self.max_rounds == 0 || self.max_outer == 0 {
            return Err(HarnessError::config("round/iteration caps must be >= 1"));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(HarnessError::config("eta must lie in (0, 1)"));
        }
        if self.experiment == ExperimentId::Lemma1 {
            if self.pairs.is_empty() || self.subspaces == 0 || self.samples == 0 {
                return Err(HarnessError::config(
                    "lemma1 needs pairs, subspaces, samples",
                ));
            }
            if self.pairs.iter().any(|&(m, k)| k == 0 || k > m) {
                return Err(HarnessError::config("lemma1 pairs need 1 <= k <= m"));
            }
        }
        Ok(())
    }
}

/// Logarithmically spaced grid from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2 && lo > 0.0 && hi > lo);
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (llo + (lhi - llo) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Optional JSON overlay: any subset of the config fields.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigOverlay {
    pub experiment: Option<ExperimentId>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub m_grid: Option<Vec<usize>>,
    pub param_grid: Option<Vec<f64>>,
    pub deviation: Option<DeviationKind>,
    pub decoder: Option<DecoderKind>,
    pub trials: Option<usize>,
    pub master_seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub xi0: Option<f64>,
    pub decay: Option<f64>,
    pub omega: Option<f64>,
    pub max_rounds: Option<usize>,
    pub kappa: Option<usize>,
    pub eta: Option<f64>,
    pub pairs: Option<Vec<(usize, usize)>>,
    pub subspaces: Option<usize>,
    pub samples: Option<usize>,
    pub epsilon_smooth: Option<f64>,
    pub max_outer: Option<usize>,
}

impl ConfigOverlay {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::io(path.display().to_string(), e))?;
        serde_json::from_str(&text).map_err(|e| HarnessError::Parse {
            path: path.display().to_string(),
            detail: e.to_string(),
        })
    }

    pub fn apply(self, mut cfg: ExperimentConfig) -> ExperimentConfig {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { cfg.$field = v; })*
            };
        }
        take!(
            n,
            k,
            m_grid,
            param_grid,
            deviation,
            decoder,
            trials,
            master_seed,
            threads,
            xi0,
            decay,
            omega,
            max_rounds,
            kappa,
            eta,
            pairs,
            subspaces,
            samples,
            epsilon_smooth,
            max_outer
        );
        if let Some(out) = self.out {
            cfg.out = Some(out);
        }
        // `experiment` is fixed by the CLI subcommand; a differing value in
        // the file is a config error surfaced by the caller.
        cfg
    }
}
