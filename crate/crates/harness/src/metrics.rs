//! Error metrics reported by the experiments.

use onebit_core::linalg;

/// Normalized mean squared error for one trial: `||x - xhat||^2 / ||x||^2`
/// (plain squared error when x = 0).
pub fn nmse(x: &[f64], xhat: &[f64]) -> f64 {
    let diff = linalg::sub(x, xhat);
    let err = linalg::dot(&diff, &diff);
    let norm_sq = linalg::dot(x, x);
    if norm_sq > 0.0 {
        err / norm_sq
    } else {
        err
    }
}

/// Reconstruction error norm for one trial: `||x - xhat||_2`. Averaging these
/// over trials gives the reported RMSE.
pub fn error_norm(x: &[f64], xhat: &[f64]) -> f64 {
    linalg::norm2(&linalg::sub(x, xhat))
}

/// Mean of the values at the given indices; `None` when empty.
pub fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for v in values {
        sum += v;
        count += 1;
    }
    (count > 0).then(|| sum / count as f64)
}

/// Median (average of middle pair for even lengths); `None` when empty.
pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite metric values"));
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nmse_basics() {
        assert_eq!(nmse(&[1.0, 0.0], &[1.0, 0.0]), 0.0);
        assert_eq!(nmse(&[2.0, 0.0], &[0.0, 0.0]), 1.0);
        assert_eq!(nmse(&[0.0], &[0.5]), 0.25);
    }

    #[test]
    fn median_even_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&mut []), None);
    }
}
