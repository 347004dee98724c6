//! Dense symmetric eigendecomposition, SVD, and semidefiniteness testing.
//!
//! These are the numeric kernels every other module calls. Both
//! decompositions are cyclic Jacobi iterations: at the matrix sizes this
//! crate targets they are simple, deterministic, and accurate to a few ulps,
//! which is what the boundary-sensitive membership tests need.

use serde::Serialize;
use thiserror::Error;

use crate::mat::{dot, normalize, Mat};
use crate::scalar::Real;

/// Shared tolerance policy. One instance is threaded through every module so
/// that PSD tests, rank cutoffs, and equality checks stay consistent.
///
/// All values are relative: they get multiplied by a caller-provided scale
/// (matrix norm, tensor max-abs) before use.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances<F> {
    /// Partial-symmetry acceptance threshold.
    pub eps_sym: F,
    /// Eigen/SVD residual budget.
    pub eps_eig: F,
    /// Semidefiniteness slack: `β_min ≥ −eps_psd·scale` counts as PSD.
    pub eps_psd: F,
    /// Singular values below `eps_rank·σ₁` count as zero.
    pub eps_rank: F,
    /// Equality threshold for the exact-solution class test.
    pub eps_eq: F,
}

impl<F: Real> Default for Tolerances<F> {
    fn default() -> Self {
        Tolerances {
            eps_sym: F::from_f64(1e-12),
            eps_eig: F::from_f64(1e-10),
            eps_psd: F::from_f64(1e-10),
            eps_rank: F::from_f64(1e-12),
            eps_eq: F::from_f64(1e-8),
        }
    }
}

impl<F: Real> Tolerances<F> {
    /// Policy scaled off the machine epsilon of `F` instead of the default
    /// `f64` constants; use this when running the algebra in `f32`.
    pub fn from_machine_eps() -> Self {
        let eps = F::epsilon();
        let hundred = F::from_f64(100.0);
        let ten_k = F::from_f64(1e4);
        Tolerances {
            eps_sym: ten_k * eps,
            eps_eig: hundred * eps,
            eps_psd: hundred * eps,
            eps_rank: ten_k * eps,
            eps_eq: ten_k * hundred * eps,
        }
    }
}

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("{0} failed to converge")]
    NoConvergence(&'static str),
}

/// Full spectrum of a symmetric matrix, values descending, vectors as
/// orthonormal columns.
#[derive(Clone, Debug, Serialize)]
pub struct SymEig<F> {
    pub values: Vec<F>,
    #[serde(skip)]
    pub vectors: Mat<F>,
}

impl<F: Real> SymEig<F> {
    pub fn max_value(&self) -> F {
        self.values[0]
    }

    pub fn min_value(&self) -> F {
        *self.values.last().unwrap()
    }

    pub fn max_vector(&self) -> Vec<F> {
        self.vectors.column(0)
    }
}

const MAX_JACOBI_SWEEPS: usize = 100;

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// The input is symmetrized as `(S + Sᵀ)/2` first, so mild asymmetry from
/// accumulated roundoff is tolerated.
pub fn sym_eig<F: Real>(s: &Mat<F>) -> Result<SymEig<F>, LinalgError> {
    assert!(s.is_square(), "sym_eig needs a square matrix");
    if !s.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let n = s.rows();
    if n == 0 {
        return Ok(SymEig { values: vec![], vectors: Mat::zeros(0, 0) });
    }
    let mut a = Mat::from_fn(n, n, |r, c| {
        (s[(r, c)] + s[(c, r)]) / F::from_f64(2.0)
    });
    let mut v = Mat::identity(n);
    let scale = a.frob_norm();
    if scale > F::zero() {
        let stop = F::epsilon() * scale;
        let mut converged = false;
        for _ in 0..MAX_JACOBI_SWEEPS {
            let mut off = F::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)] * a[(p, q)];
                }
            }
            if off.sqrt() <= stop {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    if apq.abs() <= F::epsilon() * scale * F::from_f64(0.01) {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (F::from_f64(2.0) * apq);
                    let t = {
                        let sign = if theta >= F::zero() { F::one() } else { -F::one() };
                        sign / (theta.abs() + (theta * theta + F::one()).sqrt())
                    };
                    let c = F::one() / (t * t + F::one()).sqrt();
                    let sn = t * c;
                    // rotate rows/columns p and q of a
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - sn * akq;
                        a[(k, q)] = sn * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - sn * aqk;
                        a[(q, k)] = sn * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - sn * vkq;
                        v[(k, q)] = sn * vkp + c * vkq;
                    }
                }
            }
        }
        if !converged {
            // one final check: the cyclic sweep above almost always ends early
            let mut off = F::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)] * a[(p, q)];
                }
            }
            if off.sqrt() > stop * F::from_f64(100.0) {
                return Err(LinalgError::NoConvergence("jacobi eigendecomposition"));
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<F> = (0..n).map(|i| a[(i, i)]).collect();
    order.sort_by(|&x, &y| diag[y].partial_cmp(&diag[x]).unwrap());
    let values: Vec<F> = order.iter().map(|&i| diag[i]).collect();
    let vectors = Mat::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymEig { values, vectors })
}

/// Thin SVD result. `u` has orthonormal columns (completed for rank-deficient
/// inputs), `sigma` is descending and nonnegative, `v` has orthonormal
/// columns, and `rank_plus` counts singular values above `eps_rank·σ₁`.
#[derive(Clone, Debug)]
pub struct Svd<F> {
    pub u: Mat<F>,
    pub sigma: Vec<F>,
    pub v: Mat<F>,
    pub rank_plus: usize,
}

/// One-sided Jacobi SVD. Works on the tall orientation internally and swaps
/// factors back, so any rectangular shape is accepted.
pub fn svd<F: Real>(m: &Mat<F>, tol: &Tolerances<F>) -> Result<Svd<F>, LinalgError> {
    if !m.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let transposed = m.rows() < m.cols();
    let a = if transposed { m.transpose() } else { m.clone() };
    let (rows, cols) = (a.rows(), a.cols());
    let mut b: Vec<Vec<F>> = (0..cols).map(|c| a.column(c)).collect();
    let mut v = Mat::identity(cols);
    let eps = F::epsilon();
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for i in 0..cols {
            for j in (i + 1)..cols {
                let alpha = dot(&b[i], &b[i]);
                let beta = dot(&b[j], &b[j]);
                let gamma = dot(&b[i], &b[j]);
                if gamma.abs() <= eps * (alpha * beta).sqrt() || gamma == F::zero() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (F::from_f64(2.0) * gamma);
                let t = {
                    let sign = if zeta >= F::zero() { F::one() } else { -F::one() };
                    sign / (zeta.abs() + (F::one() + zeta * zeta).sqrt())
                };
                let c = F::one() / (F::one() + t * t).sqrt();
                let s = c * t;
                for k in 0..rows {
                    let bi = b[i][k];
                    let bj = b[j][k];
                    b[i][k] = c * bi - s * bj;
                    b[j][k] = s * bi + c * bj;
                }
                for k in 0..cols {
                    let vi = v[(k, i)];
                    let vj = v[(k, j)];
                    v[(k, i)] = c * vi - s * vj;
                    v[(k, j)] = s * vi + c * vj;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sigma: Vec<F> = b.iter().map(|col| dot(col, col).sqrt()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&x, &y| sigma[y].partial_cmp(&sigma[x]).unwrap());
    let mut u = Mat::zeros(rows, cols);
    let mut v_sorted = Mat::zeros(cols, cols);
    let sig_sorted: Vec<F> = order.iter().map(|&i| sigma[i]).collect();
    let sigma1 = sig_sorted.first().copied().unwrap_or_else(F::zero);
    for (c, &src) in order.iter().enumerate() {
        let s = sigma[src];
        if s > F::zero() {
            for r in 0..rows {
                u[(r, c)] = b[src][r] / s;
            }
        }
        for r in 0..cols {
            v_sorted[(r, c)] = v[(r, src)];
        }
    }
    sigma = sig_sorted;
    complete_orthonormal_columns(&mut u, &sigma, sigma1, tol);
    let rank_plus = sigma.iter().filter(|&&s| s > tol.eps_rank * sigma1).count();
    let (u, v) = if transposed { (v_sorted, u) } else { (u, v_sorted) };
    Ok(Svd { u, sigma, v, rank_plus })
}

/// Replace zero columns of `u` (from zero singular values) with unit vectors
/// orthogonal to the existing columns, keeping `uᵀu = I`.
fn complete_orthonormal_columns<F: Real>(u: &mut Mat<F>, sigma: &[F], sigma1: F, tol: &Tolerances<F>) {
    let rows = u.rows();
    for c in 0..u.cols() {
        if sigma[c] > tol.eps_rank * sigma1 && sigma[c] > F::zero() {
            continue;
        }
        // pick the coordinate direction with the largest residual after
        // projecting out all other columns
        let mut best: Option<(F, Vec<F>)> = None;
        for seed in 0..rows {
            let mut cand = vec![F::zero(); rows];
            cand[seed] = F::one();
            for other in 0..u.cols() {
                if other == c {
                    continue;
                }
                let col = u.column(other);
                let proj = dot(&cand, &col);
                for k in 0..rows {
                    cand[k] -= proj * col[k];
                }
            }
            let res = normalize(&mut cand);
            if best.as_ref().map_or(true, |(b, _)| res > *b) {
                best = Some((res, cand));
            }
        }
        if let Some((res, cand)) = best {
            if res > F::from_f64(0.1) {
                for k in 0..rows {
                    u[(k, c)] = cand[k];
                }
            }
        }
    }
}

/// `true` iff `β_min(S) ≥ −eps_psd·scale`; `scale` comes from the caller so
/// the test stays dimensionally consistent with the parent tensor.
pub fn is_psd<F: Real>(s: &Mat<F>, scale: F, tol: &Tolerances<F>) -> bool {
    match sym_eig(s) {
        Ok(eig) => {
            if eig.values.is_empty() {
                return true;
            }
            eig.min_value() >= -(tol.eps_psd * scale)
        }
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_sym(n: usize, rng: &mut StdRng) -> Mat<f64> {
        let raw = Mat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        Mat::from_fn(n, n, |r, c| (raw[(r, c)] + raw[(c, r)]) / 2.0)
    }

    #[test]
    fn identity_spectrum_is_all_ones() {
        let eig = sym_eig(&Mat::<f64>::identity(4)).unwrap();
        for v in &eig.values {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn mes_matrix_of_diagonal_tensor_has_known_top_eigenvalue() {
        let d = Mat::diag(&[17.0_f64 / 3.0, 17.0 / 3.0, 20.0 / 3.0]);
        let eig = sym_eig(&d).unwrap();
        assert!((eig.max_value() - 6.6667_f64).abs() < 1e-4);
    }

    #[test]
    fn reconstruction_on_random_symmetric() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let s = random_sym(5, &mut rng);
            let eig = sym_eig(&s).unwrap();
            let vt = eig.vectors.transpose();
            let lam = Mat::diag(&eig.values);
            let rebuilt = eig.vectors.matmul(&lam).matmul(&vt);
            let err = s.sub(&rebuilt).frob_norm();
            assert!(err <= 1e-10 * s.frob_norm().max(1.0), "err={err}");
            // orthonormality
            let gram = vt.matmul(&eig.vectors);
            let dev = gram.sub(&Mat::identity(5)).frob_norm();
            assert!(dev < 1e-10);
        }
    }

    #[test]
    fn rayleigh_quotient_never_exceeds_max_eigenvalue() {
        let mut rng = StdRng::seed_from_u64(11);
        let s = random_sym(6, &mut rng);
        let eig = sym_eig(&s).unwrap();
        for _ in 0..1000 {
            let mut v: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
            normalize(&mut v);
            let q = dot(&v, &s.matvec(&v));
            assert!(q <= eig.max_value() + 1e-10);
        }
    }

    #[test]
    fn svd_of_single_entry_matrix() {
        let mut m = Mat::<f64>::zeros(3, 2);
        m[(0, 0)] = 1.0;
        let tol = Tolerances::default();
        let out = svd(&m, &tol).unwrap();
        assert!((out.sigma[0] - 1.0).abs() < 1e-14);
        assert!(out.sigma[1].abs() < 1e-14);
        assert_eq!(out.rank_plus, 1);
        // u stays orthonormal even with a zero singular value
        let gram = out.u.transpose().matmul(&out.u);
        assert!(gram.sub(&Mat::identity(2)).frob_norm() < 1e-10);
    }

    #[test]
    fn svd_reconstructs_random_rectangular() {
        let mut rng = StdRng::seed_from_u64(3);
        let tol = Tolerances::default();
        for &(r, c) in &[(4usize, 6usize), (6, 4), (5, 5)] {
            let m = Mat::from_fn(r, c, |_, _| rng.gen_range(-2.0..2.0));
            let out = svd(&m, &tol).unwrap();
            let k = out.sigma.len();
            let mut rebuilt = Mat::zeros(r, c);
            for t in 0..k {
                for i in 0..r {
                    for j in 0..c {
                        rebuilt[(i, j)] += out.sigma[t] * out.u[(i, t)] * out.v[(j, t)];
                    }
                }
            }
            assert!(m.sub(&rebuilt).frob_norm() <= 1e-10 * m.frob_norm());
        }
    }

    #[test]
    fn svd_of_kronecker_product_is_outer_product_of_sigmas() {
        let mut rng = StdRng::seed_from_u64(5);
        let tol = Tolerances::default();
        let a = Mat::from_fn(3, 3, |_, _| rng.gen_range(-1.0..1.0));
        let b = Mat::from_fn(3, 3, |_, _| rng.gen_range(-1.0..1.0));
        let sa = svd(&a, &tol).unwrap().sigma;
        let sb = svd(&b, &tol).unwrap().sigma;
        let mut expected: Vec<f64> = sa.iter().flat_map(|&x| sb.iter().map(move |&y| x * y)).collect();
        expected.sort_by(|x, y| y.partial_cmp(x).unwrap());
        let got = svd(&a.kron(&b), &tol).unwrap().sigma;
        for (g, e) in got.iter().zip(expected.iter()) {
            assert!((g - e).abs() < 1e-10, "kron sigma mismatch {g} vs {e}");
        }
    }

    #[test]
    fn sym_eig_values_match_svd_sigmas_in_magnitude() {
        let mut rng = StdRng::seed_from_u64(13);
        let s = random_sym(5, &mut rng);
        let tol = Tolerances::default();
        let mut abs_eig: Vec<f64> = sym_eig(&s).unwrap().values.iter().map(|v| v.abs()).collect();
        abs_eig.sort_by(|x, y| y.partial_cmp(x).unwrap());
        let sig = svd(&s, &tol).unwrap().sigma;
        for (a, b) in abs_eig.iter().zip(sig.iter()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn psd_checks() {
        let tol = Tolerances::default();
        assert!(is_psd(&Mat::<f64>::zeros(3, 3), 0.0, &tol));
        let boundary = Mat::identity(3).sub(&Mat::identity(3));
        assert!(is_psd(&boundary, 1.0, &tol));
        // closed form: eigenvalues of [[1,2],[2,1]] are 3 and −1
        let indef = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(!is_psd(&indef, 1.0, &tol));
    }

    #[test]
    fn non_finite_is_rejected() {
        let mut m = Mat::<f64>::identity(2);
        m[(0, 1)] = f64::NAN;
        assert!(matches!(sym_eig(&m), Err(LinalgError::NonFinite)));
        assert!(matches!(svd(&m, &Tolerances::default()), Err(LinalgError::NonFinite)));
    }
}
