//! Measurement and one-bit quantization model.
//!
//! A K-sparse signal `x` is observed through `y = Ax` and encoded one bit per
//! measurement as `b = sign(y - tau)`. The sign convention is the one used
//! throughout this crate: `sign(t) = +1` iff `t > 0`, and `-1` otherwise
//! (so an exact tie quantizes to -1).

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::RngStream;
use crate::scalar::Scalar;

/// One quantizer output bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// Paper sign convention: +1 for strictly positive values, -1 otherwise.
    #[inline]
    pub fn of<S: Scalar>(v: S) -> Sign {
        if v > S::zero() {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    #[inline]
    pub fn to_scalar<S: Scalar>(self) -> S {
        match self {
            Sign::Plus => S::one(),
            Sign::Minus => -S::one(),
        }
    }

    #[inline]
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// Ground-truth sparse vector: dimension, sorted support, and the coefficient
/// on each support index.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal<S> {
    n: usize,
    support: Vec<usize>,
    values: Vec<S>,
}

impl<S: Scalar> SparseSignal<S> {
    pub fn new(n: usize, support: Vec<usize>, values: Vec<S>) -> Result<Self> {
        if support.len() != values.len() {
            return Err(Error::invalid("support/values length mismatch"));
        }
        if support.len() > n {
            return Err(Error::invalid("support larger than dimension"));
        }
        if !support.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid(
                "support indices must be strictly increasing",
            ));
        }
        if support.iter().any(|&j| j >= n) {
            return Err(Error::invalid("support index out of range"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("signal values must be finite"));
        }
        Ok(SparseSignal { n, support, values })
    }

    /// Build from a dense vector, keeping exact nonzeros as the support.
    pub fn from_dense(x: &[S]) -> Result<Self> {
        let mut support = Vec::new();
        let mut values = Vec::new();
        for (j, &v) in x.iter().enumerate() {
            if v != S::zero() {
                support.push(j);
                values.push(v);
            }
        }
        SparseSignal::new(x.len(), support, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    pub fn dense(&self) -> Vec<S> {
        let mut x = vec![S::zero(); self.n];
        for (&j, &v) in self.support.iter().zip(&self.values) {
            x[j] = v;
        }
        x
    }

    pub fn norm2(&self) -> S {
        linalg::norm2(&self.values)
    }
}

/// Dense m x n sensing matrix plus the seed of the stream that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingEnsemble<S> {
    rows: usize,
    cols: usize,
    entries: Vec<S>,
    seed: u64,
}

impl<S: Scalar> SensingEnsemble<S> {
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<S>, seed: u64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("matrix dimensions must be positive"));
        }
        if entries.len() != rows * cols {
            return Err(Error::invalid("entry count does not match dimensions"));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(SensingEnsemble {
            rows,
            cols,
            entries,
            seed,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> S {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[S] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Dense product A*v for an arbitrary dense vector.
    pub fn matvec(&self, v: &[S]) -> Result<Vec<S>> {
        if v.len() != self.cols {
            return Err(Error::invalid("matvec dimension mismatch"));
        }
        Ok((0..self.rows)
            .map(|i| linalg::dot(self.row(i), v))
            .collect())
    }
}

/// Distribution of the threshold deviation entries. Both kinds are symmetric
/// about zero: positive and negative with probability 1/2 each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationSpec<S> {
    kind: DevKind<S>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum DevKind<S> {
    Rademacher { a: S },
    Gaussian { sigma: S },
}

impl<S: Scalar> DeviationSpec<S> {
    /// Entries are +a or -a with equal probability.
    pub fn rademacher(a: S) -> Result<Self> {
        if !(a > S::zero()) || !a.is_finite() {
            return Err(Error::invalid("rademacher magnitude must be positive"));
        }
        Ok(DeviationSpec {
            kind: DevKind::Rademacher { a },
        })
    }

    /// Entries are N(0, sigma^2).
    pub fn gaussian(sigma: S) -> Result<Self> {
        if !(sigma > S::zero()) || !sigma.is_finite() {
            return Err(Error::invalid("gaussian std-dev must be positive"));
        }
        Ok(DeviationSpec {
            kind: DevKind::Gaussian { sigma },
        })
    }

    /// The scale parameter (a or sigma).
    pub fn scale(&self) -> S {
        match self.kind {
            DevKind::Rademacher { a } => a,
            DevKind::Gaussian { sigma } => sigma,
        }
    }

    /// Same distribution shape with the scale multiplied by `factor`.
    pub fn scaled(&self, factor: S) -> Result<Self> {
        match self.kind {
            DevKind::Rademacher { a } => DeviationSpec::rademacher(a * factor),
            DevKind::Gaussian { sigma } => DeviationSpec::gaussian(sigma * factor),
        }
    }

    pub fn is_rademacher(&self) -> bool {
        matches!(self.kind, DevKind::Rademacher { .. })
    }
}

/// Whether thresholds sit above or below the measurements: tau = y + delta
/// (the experiment convention, default) or tau = y - delta (the analysis
/// convention). The deviation is sign-symmetric, so the two are
/// distributionally identical.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeviationSign {
    #[default]
    Plus,
    Minus,
}

/// Thresholds, the deviation that produced them (when known), and the bits of
/// one encoder query.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizationRound<S> {
    pub tau: Vec<S>,
    pub delta: Option<Vec<S>>,
    pub bits: Vec<Sign>,
}

/// Uniformly random size-K support with i.i.d. standard-normal coefficients.
pub fn gen_sparse_signal<S: Scalar>(
    n: usize,
    k: usize,
    rng: &mut RngStream,
) -> Result<SparseSignal<S>> {
    if k > n {
        return Err(Error::invalid(format!(
            "sparsity {k} exceeds dimension {n}"
        )));
    }
    let mut support = rand::seq::index::sample(rng, n, k).into_vec();
    support.sort_unstable();
    let values = (0..k).map(|_| S::sample_standard_normal(rng)).collect();
    SparseSignal::new(n, support, values)
}

/// Dense m x n matrix with i.i.d. standard-normal entries.
pub fn gen_gaussian_matrix<S: Scalar>(
    m: usize,
    n: usize,
    rng: &mut RngStream,
) -> Result<SensingEnsemble<S>> {
    if m == 0 || n == 0 {
        return Err(Error::invalid("matrix dimensions must be positive"));
    }
    let seed = rng.seed();
    let entries = (0..m * n).map(|_| S::sample_standard_normal(rng)).collect();
    SensingEnsemble::from_entries(m, n, entries, seed)
}

/// y = Ax, touching only the support columns of x.
pub fn measure<S: Scalar>(a: &SensingEnsemble<S>, x: &SparseSignal<S>) -> Result<Vec<S>> {
    if a.cols() != x.n() {
        return Err(Error::invalid(format!(
            "matrix has {} columns but signal dimension is {}",
            a.cols(),
            x.n()
        )));
    }
    let mut y = vec![S::zero(); a.rows()];
    for (&j, &v) in x.support().iter().zip(x.values()) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += a.at(i, j) * v;
        }
    }
    Ok(y)
}

/// b = sign(y - tau), elementwise; ties quantize to -1.
pub fn quantize<S: Scalar>(y: &[S], tau: &[S]) -> Result<QuantizationRound<S>> {
    if y.len() != tau.len() {
        return Err(Error::invalid("y and tau must have equal length"));
    }
    let bits = y
        .iter()
        .zip(tau)
        .map(|(&yi, &ti)| Sign::of(yi - ti))
        .collect();
    Ok(QuantizationRound {
        tau: tau.to_vec(),
        delta: None,
        bits,
    })
}

/// Draw an m-vector from the deviation distribution.
pub fn gen_deviation<S: Scalar>(
    spec: &DeviationSpec<S>,
    m: usize,
    rng: &mut RngStream,
) -> Result<Vec<S>> {
    if m == 0 {
        return Err(Error::invalid("deviation length must be positive"));
    }
    Ok(match spec.kind {
        DevKind::Rademacher { a } => (0..m)
            .map(|_| if rng.random::<bool>() { a } else { -a })
            .collect(),
        DevKind::Gaussian { sigma } => (0..m)
            .map(|_| S::sample_standard_normal(rng) * sigma)
            .collect(),
    })
}

/// tau = y + delta or tau = y - delta, per the chosen convention.
pub fn thresholds_from_deviation<S: Scalar>(
    y: &[S],
    delta: &[S],
    sign: DeviationSign,
) -> Result<Vec<S>> {
    if y.len() != delta.len() {
        return Err(Error::invalid("y and delta must have equal length"));
    }
    Ok(y.iter()
        .zip(delta)
        .map(|(&yi, &di)| match sign {
            DeviationSign::Plus => yi + di,
            DeviationSign::Minus => yi - di,
        })
        .collect())
}
