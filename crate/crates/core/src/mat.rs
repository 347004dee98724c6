//! Minimal dense row-major matrix plus the handful of vector helpers the
//! solvers need. Sizes here are desk scale, so no blocking or BLAS.

use std::ops::{Index, IndexMut};

use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Real> Mat<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let mut m = Mat::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn diag(values: &[F]) -> Self {
        let mut m = Mat::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Mat<F> {
        Mat::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn matvec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self[(r, c)] * v[c]).sum())
            .collect()
    }

    pub fn matmul(&self, other: &Mat<F>) -> Mat<F> {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        Mat::from_fn(self.rows, other.cols, |r, c| {
            (0..self.cols).map(|k| self[(r, k)] * other[(k, c)]).sum()
        })
    }

    pub fn column(&self, c: usize) -> Vec<F> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn add_scaled(&mut self, alpha: F, other: &Mat<F>) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: F) {
        for a in self.data.iter_mut() {
            *a *= alpha;
        }
    }

    pub fn map(&self, f: impl Fn(F) -> F) -> Mat<F> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn sub(&self, other: &Mat<F>) -> Mat<F> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        out.add_scaled(-F::one(), other);
        out
    }

    pub fn frob_norm(&self) -> F {
        self.data.iter().map(|&v| v * v).sum::<F>().sqrt()
    }

    pub fn max_abs(&self) -> F {
        self.data.iter().fold(F::zero(), |acc, &v| acc.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn max_asymmetry(&self) -> F {
        assert!(self.is_square());
        let mut worst = F::zero();
        for r in 0..self.rows {
            for c in (r + 1)..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)]).abs());
            }
        }
        worst
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Mat<F>) -> Mat<F> {
        let (p, q) = (other.rows, other.cols);
        Mat::from_fn(self.rows * p, self.cols * q, |r, c| {
            self[(r / p, c / q)] * other[(r % p, c % q)]
        })
    }

    pub fn data(&self) -> &[F] {
        &self.data
    }
}

impl<F> Index<(usize, usize)> for Mat<F> {
    type Output = F;

    fn index(&self, (r, c): (usize, usize)) -> &F {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<F> IndexMut<(usize, usize)> for Mat<F> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut F {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

pub fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm2<F: Real>(v: &[F]) -> F {
    dot(v, v).sqrt()
}

/// Normalize in place; returns the original norm (zero vectors are left alone).
pub fn normalize<F: Real>(v: &mut [F]) -> F {
    let n = norm2(v);
    if n > F::zero() {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
    n
}

pub fn sub_scaled<F: Real>(a: &[F], alpha: F, b: &[F]) -> Vec<F> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x - alpha * y).collect()
}

/// Flip signs so the largest-magnitude component is positive (first index wins
/// ties); keeps eigenvector output deterministic.
pub fn canonical_sign<F: Real>(v: &mut [F]) {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if !v.is_empty() && v[best] < F::zero() {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_matches_definition() {
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let b = Mat::from_rows(&[vec![0.0, 5.0], vec![6.0, 7.0]]);
        let k = a.kron(&b);
        assert_eq!(k.rows(), 4);
        assert_eq!(k[(0, 1)], 5.0);
        assert_eq!(k[(2, 0)], 3.0 * 0.0);
        assert_eq!(k[(3, 3)], 4.0 * 7.0);
    }

    #[test]
    fn matvec_and_norms() {
        let m = Mat::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0]]);
        assert_eq!(m.matvec(&[2.0, 3.0]), vec![2.0, 5.0]);
        assert!((norm2(&[3.0, 4.0]) - 5.0_f64).abs() < 1e-15);
    }

    #[test]
    fn canonical_sign_flips_negative_dominant() {
        let mut v = vec![0.1, -0.9, 0.2];
        canonical_sign(&mut v);
        assert!(v[1] > 0.0);
        assert!(v[0] < 0.0);
    }
}
