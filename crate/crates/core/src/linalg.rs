//! Small dense linear-algebra helpers shared across the crate.

use crate::scalar::Scalar;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<S> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> S {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut S {
        &mut self.data[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matvec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }
}

#[inline]
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

#[inline]
pub fn norm2<S: Scalar>(a: &[S]) -> S {
    dot(a, a).sqrt()
}

#[inline]
pub fn norm_inf<S: Scalar>(a: &[S]) -> S {
    a.iter().fold(S::zero(), |m, &x| m.max(x.abs()))
}

pub fn sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

/// Binomial coefficient, `None` on u128 overflow.
pub fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)?;
        acc /= (i + 1) as u128; // divides exactly: prefix products of C(n,*)
    }
    Some(acc)
}

/// Smallest eigenvalue of a symmetric matrix, by cyclic Jacobi rotations.
///
/// Intended for the tiny Gram matrices (order <= ~8) that arise when scanning
/// submatrix singular values; not a general-purpose eigensolver.
pub fn symmetric_smallest_eigenvalue<S: Scalar>(g: &Mat<S>) -> S {
    assert_eq!(g.rows, g.cols, "matrix must be square");
    let p = g.rows;
    if p == 0 {
        return S::zero();
    }
    if p == 1 {
        return g.at(0, 0);
    }
    let mut a = g.clone();
    let tol = S::from_f64(1e-14);
    for _sweep in 0..64 {
        let mut off = S::zero();
        for i in 0..p {
            for j in (i + 1)..p {
                off = off.max(a.at(i, j).abs());
            }
        }
        let scale = (0..p).fold(S::zero(), |m, i| m.max(a.at(i, i).abs()));
        if off <= tol * (S::one() + scale) {
            break;
        }
        for i in 0..p {
            for j in (i + 1)..p {
                let apq = a.at(i, j);
                if apq == S::zero() {
                    continue;
                }
                let app = a.at(i, i);
                let aqq = a.at(j, j);
                let theta = (aqq - app) / (S::from_f64(2.0) * apq);
                let t = {
                    let s = if theta >= S::zero() {
                        S::one()
                    } else {
                        -S::one()
                    };
                    s / (theta.abs() + (S::one() + theta * theta).sqrt())
                };
                let c = S::one() / (S::one() + t * t).sqrt();
                let s = t * c;
                for k in 0..p {
                    let aki = a.at(k, i);
                    let akj = a.at(k, j);
                    *a.at_mut(k, i) = c * aki - s * akj;
                    *a.at_mut(k, j) = s * aki + c * akj;
                }
                for k in 0..p {
                    let aik = a.at(i, k);
                    let ajk = a.at(j, k);
                    *a.at_mut(i, k) = c * aik - s * ajk;
                    *a.at_mut(j, k) = s * aik + c * ajk;
                }
            }
        }
    }
    (0..p)
        .map(|i| a.at(i, i))
        .fold(S::infinity(), |m, v| m.min(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_basics() {
        assert_eq!(binomial(5, 2), Some(10));
        assert_eq!(binomial(10, 0), Some(1));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(binomial(40, 20), Some(137_846_528_820));
    }

    #[test]
    fn jacobi_diagonal() {
        let g = Mat::from_rows(vec![vec![4.0, 0.0], vec![0.0, 9.0]]);
        assert!((symmetric_smallest_eigenvalue(&g) - 4.0f64).abs() < 1e-12);
    }

    #[test]
    fn jacobi_2x2_closed_form() {
        // eigenvalues of [[2,1],[1,2]] are 1 and 3
        let g = Mat::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!((symmetric_smallest_eigenvalue(&g) - 1.0f64).abs() < 1e-12);
    }

    #[test]
    fn jacobi_4x4_against_characteristic_values() {
        // Gram matrix of [[1,0],[1,1],[0,1],[1,-1]] columns extended; compare
        // against eigenvalues computed from the closed-form 2x2 blocks of a
        // block-diagonal construction.
        let g = Mat::from_rows(vec![
            vec![5.0, 2.0, 0.0, 0.0],
            vec![2.0, 3.0, 0.0, 0.0],
            vec![0.0, 0.0, 7.0, 1.0],
            vec![0.0, 0.0, 1.0, 7.0],
        ]);
        // block 1: eigs 4 +- sqrt(5); block 2: 6 and 8 -> smallest = 4 - sqrt(5)
        let expect = 4.0 - 5.0f64.sqrt();
        assert!((symmetric_smallest_eigenvalue(&g) - expect).abs() < 1e-12);
    }
}
