//! Closed-form M-eigenpairs for structured tensors: the equal/mean-ES
//! classes, their shifted relatives, a generator for equal-ES tensors, and
//! the matricization/Kronecker route.

use serde::Serialize;

use crate::error::{ExactError, TensorError};
use crate::linalg::{svd, sym_eig, Svd, Tolerances};
use crate::mat::{canonical_sign, dot, Mat};
use crate::sampling;
use crate::scalar::Real;
use crate::structure;
use crate::tensor::{Eigenpair, PsTensor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExactMethod {
    /// `β_max(C̄)` with uniform right eigenvector.
    MeanEsC,
    /// `β_max(D̄)` with uniform left eigenvector.
    MeanEsD,
    /// Matricization double-SVD closed form under cross-mode orthogonality.
    SvdClosedForm,
    /// Kronecker-built tensor with shared factor bases.
    KroneckerSharedBasis,
}

/// A closed-form greatest M-eigenpair together with how it was obtained.
#[derive(Clone, Debug, Serialize)]
pub struct ExactSolution<F> {
    pub eigenpair: Eigenpair<F>,
    pub method: ExactMethod,
}

/// Exact greatest M-eigenpair for a nonnegative tensor in one of the
/// mean-ES classes.
///
/// When `β_max(C̄)` ties the ES maxima the pair
/// `(top eigenvector of C̄, 𝟙/√n)` attains the M-spectral radius; the D-side
/// class is symmetric. Membership is decided first, so this never reports an
/// "exact" value on a tensor outside the classes.
pub fn exact_from_omega<F: Real>(
    t: &PsTensor<F>,
    tol: &Tolerances<F>,
) -> Result<ExactSolution<F>, ExactError> {
    let (omega1, omega2) = structure::omega_membership(t, tol).map_err(unwrap_structure)?;
    let s = t.struct_matrices();
    if omega1 {
        let eig = sym_eig(&s.c_mes)?;
        let mut x = eig.max_vector();
        canonical_sign(&mut x);
        let y = uniform_unit(t.n());
        let pair = t.eigenpair(eig.max_value(), x, y);
        return Ok(ExactSolution { eigenpair: pair, method: ExactMethod::MeanEsC });
    }
    if omega2 {
        let eig = sym_eig(&s.d_mes)?;
        let mut y = eig.max_vector();
        canonical_sign(&mut y);
        let x = uniform_unit(t.m());
        let pair = t.eigenpair(eig.max_value(), x, y);
        return Ok(ExactSolution { eigenpair: pair, method: ExactMethod::MeanEsD });
    }
    Err(ExactError::NotApplicable(
        "the mean-ES eigenvalue does not reach the ES maxima on either side".into(),
    ))
}

fn unwrap_structure(e: crate::error::StructureError) -> ExactError {
    match e {
        crate::error::StructureError::Bounds(b) => ExactError::Bounds(b),
        other => ExactError::NotApplicable(other.to_string()),
    }
}

fn uniform_unit<F: Real>(dim: usize) -> Vec<F> {
    let v = F::one() / F::from_f64(dim as f64).sqrt();
    vec![v; dim]
}

/// Exact greatest M-eigenpair of `A = B − η·I` for an Ω-class nonnegative
/// `B`: the eigenvectors carry over and the eigenvalue drops by `η`. This is
/// how exact solutions extend to tensors with negative entries.
pub fn exact_shifted<F: Real>(
    t: &PsTensor<F>,
    eta: F,
    tol: &Tolerances<F>,
) -> Result<ExactSolution<F>, ExactError> {
    let base = exact_from_omega(t, tol)?;
    let shifted = t.shift(-eta);
    let pair = shifted.eigenpair(
        base.eigenpair.lambda - eta,
        base.eigenpair.x.clone(),
        base.eigenpair.y.clone(),
    );
    Ok(ExactSolution { eigenpair: pair, method: base.method })
}

/// Randomly construct a nonnegative tensor whose ES matrices `C_l` are all
/// equal, by zeroing the diagonal blocks of a random draw and refilling them
/// against a telescoping target.
///
/// With `T_{i+1} = Σ_j B(:,i,:,j)` after zeroing and the target
/// `Σ_i |T_{i+1} − T_i|`, the refilled diagonal blocks are nonnegative by the
/// triangle inequality, so the output is a valid nonnegative member.
pub fn gen_delta1<F: Real>(m: usize, n: usize, seed: u64) -> PsTensor<F> {
    let mut rng = sampling::rng_from_seed(seed);
    let mut t = PsTensor::from_fn_symmetrized(m, n, |_, _, _, _| {
        F::from_f64(rand::Rng::gen_range(&mut rng, 0.0..1.0))
    });
    let mut partial = vec![Mat::<F>::zeros(m, m); n + 1];
    let mut target = Mat::<F>::zeros(m, m);
    for i in 0..n {
        for s in 0..m {
            for tt in 0..m {
                t.set_raw(s, i, tt, i, F::zero());
            }
        }
        let mut sum = Mat::zeros(m, m);
        for j in 0..n {
            for s in 0..m {
                for tt in 0..m {
                    sum[(s, tt)] += t.at(s, i, tt, j);
                }
            }
        }
        let diff = sum.sub(&partial[i]).map(|v| v.abs());
        target.add_scaled(F::one(), &diff);
        partial[i + 1] = sum;
    }
    for i in 0..n {
        let block = target.sub(&partial[i + 1]);
        let slack = F::from_f64(1e-12) * target.max_abs().max(F::one());
        assert!(
            block.data().iter().all(|&v| v >= -slack),
            "telescoping bound guarantees nonnegative diagonal blocks"
        );
        assert!(block.max_asymmetry() <= slack);
        for s in 0..m {
            for tt in 0..m {
                t.set_raw(s, i, tt, i, block[(s, tt)].max(F::zero()));
            }
        }
    }
    debug_assert!(t.is_nonnegative());
    t
}

/// Per-singular-triplet data of the matricization: the symmetric reshaped
/// factors and their eigendecompositions.
#[derive(Clone, Debug)]
pub struct MatricizationMode<F> {
    /// Symmetric `n×n` matrix acting on `y` (reshaped left singular vector).
    pub y_slice: Mat<F>,
    /// Symmetric `m×m` matrix acting on `x` (reshaped right singular vector).
    pub x_slice: Mat<F>,
    pub y_basis: Mat<F>,
    pub y_weights: Vec<F>,
    pub x_basis: Mat<F>,
    pub x_weights: Vec<F>,
}

/// Matrix representation of the tensor as a map between symmetric matrix
/// spaces, with its SVD expanded into per-mode eigendecompositions:
///
/// ```text
/// f(x,y) = Σ_r σ_r (yᵀ Ũ_r y)(xᵀ Ṽ_r x)
///        = Σ_{r,i,j} σ_r λ_ri μ_rj (P_{r,·i}ᵀ y)² (Q_{r,·j}ᵀ x)² .
/// ```
#[derive(Clone, Debug)]
pub struct Matricization<F> {
    /// `n²×m²` matrix with `row(n·j+l) = vec(a_{·,j,·,l})`.
    pub a_tilde: Mat<F>,
    pub svd: Svd<F>,
    /// One entry per singular value above the rank cutoff.
    pub modes: Vec<MatricizationMode<F>>,
}

pub fn matricize<F: Real>(t: &PsTensor<F>, tol: &Tolerances<F>) -> Result<Matricization<F>, ExactError> {
    let (m, n) = (t.m(), t.n());
    let a_tilde = Mat::from_fn(n * n, m * m, |s, c| {
        let (j, l) = (s / n, s % n);
        let (i, k) = (c / m, c % m);
        t.at(i, j, k, l)
    });
    let decomp = svd(&a_tilde, tol)?;
    let mut modes = Vec::with_capacity(decomp.rank_plus);
    for r in 0..decomp.rank_plus {
        let ucol = decomp.u.column(r);
        let vcol = decomp.v.column(r);
        // partial symmetry forces both reshapes symmetric; enforce exactly
        let y_slice = {
            let raw = Mat::from_fn(n, n, |a, b| ucol[a * n + b]);
            Mat::from_fn(n, n, |a, b| (raw[(a, b)] + raw[(b, a)]) / F::from_f64(2.0))
        };
        let x_slice = {
            let raw = Mat::from_fn(m, m, |a, b| vcol[a * m + b]);
            Mat::from_fn(m, m, |a, b| (raw[(a, b)] + raw[(b, a)]) / F::from_f64(2.0))
        };
        let ye = sym_eig(&y_slice)?;
        let xe = sym_eig(&x_slice)?;
        modes.push(MatricizationMode {
            y_slice,
            x_slice,
            y_basis: ye.vectors,
            y_weights: ye.values,
            x_basis: xe.vectors,
            x_weights: xe.values,
        });
    }
    Ok(Matricization { a_tilde, svd: decomp, modes })
}

impl<F: Real> Matricization<F> {
    /// Evaluate the double-SVD expansion at one unit pair.
    pub fn expansion_eval(&self, x: &[F], y: &[F]) -> F {
        let mut total = F::zero();
        for (r, mode) in self.modes.iter().enumerate() {
            let sigma = self.svd.sigma[r];
            for i in 0..mode.y_weights.len() {
                let py = dot(&mode.y_basis.column(i), y);
                for j in 0..mode.x_weights.len() {
                    let qx = dot(&mode.x_basis.column(j), x);
                    total += sigma * mode.y_weights[i] * mode.x_weights[j] * py * py * qx * qx;
                }
            }
        }
        total
    }

    /// Largest defect `|f(x,y) − expansion(x,y)|` over seeded random unit
    /// samples; an identity check for the decomposition.
    pub fn expansion_defect(&self, t: &PsTensor<F>, samples: usize, seed: u64) -> F {
        let mut rng = sampling::rng_from_seed(seed);
        let mut worst = F::zero();
        for _ in 0..samples {
            let x = sampling::unit_vector(t.m(), &mut rng);
            let y = sampling::unit_vector(t.n(), &mut rng);
            worst = worst.max((t.f_eval(&x, &y) - self.expansion_eval(&x, &y)).abs());
        }
        worst
    }
}

/// Closed-form global maximizer from the matricization, applicable only when
/// the eigenvector columns with nonzero weight are pairwise orthogonal
/// across modes on both sides (automatic within a mode, generically false
/// across modes). Ties in the arg-max break lexicographically by
/// `(mode, i, j)`.
pub fn closed_form_if_orthogonal<F: Real>(
    t: &PsTensor<F>,
    decomp: &Matricization<F>,
    tol: &Tolerances<F>,
) -> Result<ExactSolution<F>, ExactError> {
    let sigma1 = decomp.svd.sigma.first().copied().unwrap_or_else(F::zero);
    let cutoff = tol.eps_rank * sigma1;
    let ortho_tol = F::from_f64(1e-10);
    let mut y_cols: Vec<Vec<F>> = Vec::new();
    let mut x_cols: Vec<Vec<F>> = Vec::new();
    for (r, mode) in decomp.modes.iter().enumerate() {
        let sigma = decomp.svd.sigma[r];
        for (i, &w) in mode.y_weights.iter().enumerate() {
            if (sigma * w).abs() > cutoff {
                y_cols.push(mode.y_basis.column(i));
            }
        }
        for (j, &w) in mode.x_weights.iter().enumerate() {
            if (sigma * w).abs() > cutoff {
                x_cols.push(mode.x_basis.column(j));
            }
        }
    }
    for (set, side) in [(&y_cols, "y"), (&x_cols, "x")] {
        for a in 0..set.len() {
            for b in (a + 1)..set.len() {
                if dot(&set[a], &set[b]).abs() > ortho_tol {
                    return Err(ExactError::NotApplicable(format!(
                        "{side}-side eigenvector columns with nonzero weight are not orthogonal"
                    )));
                }
            }
        }
    }
    let mut best: Option<(F, usize, usize, usize)> = None;
    for (r, mode) in decomp.modes.iter().enumerate() {
        let sigma = decomp.svd.sigma[r];
        for (i, &wy) in mode.y_weights.iter().enumerate() {
            for (j, &wx) in mode.x_weights.iter().enumerate() {
                let value = sigma * wy * wx;
                if best.as_ref().map_or(true, |(b, _, _, _)| value > *b) {
                    best = Some((value, r, i, j));
                }
            }
        }
    }
    let (lambda, r, i, j) =
        best.ok_or_else(|| ExactError::NotApplicable("tensor is numerically zero".into()))?;
    let mode = &decomp.modes[r];
    let mut y = mode.y_basis.column(i);
    let mut x = mode.x_basis.column(j);
    canonical_sign(&mut x);
    canonical_sign(&mut y);
    let pair = t.eigenpair(lambda, x, y);
    Ok(ExactSolution { eigenpair: pair, method: ExactMethod::SvdClosedForm })
}

/// Factor pair for the Kronecker construction `Ã = A₁ ⊗ A₂`.
#[derive(Clone, Debug)]
pub struct KroneckerSpec<F> {
    pub a1: Mat<F>,
    pub a2: Mat<F>,
    shared: Option<SharedFactors<F>>,
}

/// Common SVD factors `A_i = U Σ_i Vᵀ` recorded at construction time; the
/// closed-form maximizer needs them.
#[derive(Clone, Debug)]
pub struct SharedFactors<F> {
    pub u: Mat<F>,
    pub v: Mat<F>,
    pub sigma1: Vec<F>,
    pub sigma2: Vec<F>,
}

impl<F: Real> KroneckerSpec<F> {
    /// Plain factor pair (no shared-basis structure assumed).
    pub fn new(a1: Mat<F>, a2: Mat<F>) -> Result<Self, TensorError> {
        if a1.rows() != a2.rows() || a1.cols() != a2.cols() {
            return Err(TensorError::DimensionMismatch(format!(
                "factors must share a shape, got {}x{} and {}x{}",
                a1.rows(),
                a1.cols(),
                a2.rows(),
                a2.cols()
            )));
        }
        Ok(KroneckerSpec { a1, a2, shared: None })
    }

    /// Build both factors from one pair of orthonormal column sets and two
    /// descending nonnegative diagonals.
    pub fn with_shared_basis(
        u: Mat<F>,
        v: Mat<F>,
        sigma1: Vec<F>,
        sigma2: Vec<F>,
    ) -> Result<Self, TensorError> {
        let k = sigma1.len();
        if sigma2.len() != k || u.cols() != k || v.cols() != k {
            return Err(TensorError::DimensionMismatch(
                "shared factors need matching column counts".into(),
            ));
        }
        for s in [&sigma1, &sigma2] {
            if s.windows(2).any(|w| w[0] < w[1]) || s.iter().any(|&v| v < F::zero()) {
                return Err(TensorError::DimensionMismatch(
                    "singular values must be descending and nonnegative".into(),
                ));
            }
        }
        for (mat, side) in [(&u, "u"), (&v, "v")] {
            let gram = mat.transpose().matmul(mat);
            if gram.sub(&Mat::identity(k)).max_abs() > F::from_f64(1e-10) {
                return Err(TensorError::DimensionMismatch(format!(
                    "{side} must have orthonormal columns"
                )));
            }
        }
        // A = U·diag(sig)·Vᵀ
        let build = |sig: &[F]| {
            let mut out = Mat::zeros(u.rows(), v.rows());
            for r in 0..u.rows() {
                for c in 0..v.rows() {
                    let mut acc = F::zero();
                    for t in 0..sig.len() {
                        acc += u[(r, t)] * sig[t] * v[(c, t)];
                    }
                    out[(r, c)] = acc;
                }
            }
            out
        };
        let a1 = build(&sigma1);
        let a2 = build(&sigma2);
        Ok(KroneckerSpec { a1, a2, shared: Some(SharedFactors { u, v, sigma1, sigma2 }) })
    }

    /// Random shared-basis instance: `y` dimension `n`, `x` dimension `m`.
    pub fn random_shared(n: usize, m: usize, seed: u64) -> Self {
        let mut rng = sampling::rng_from_seed(seed);
        let k = n.min(m);
        let u = sampling::orthonormal_columns(n, k, &mut rng);
        let v = sampling::orthonormal_columns(m, k, &mut rng);
        let mut sig1: Vec<F> =
            (0..k).map(|_| F::from_f64(rand::Rng::gen_range(&mut rng, 0.1..3.0))).collect();
        let mut sig2: Vec<F> =
            (0..k).map(|_| F::from_f64(rand::Rng::gen_range(&mut rng, 0.1..3.0))).collect();
        sig1.sort_by(|a, b| b.partial_cmp(a).unwrap());
        sig2.sort_by(|a, b| b.partial_cmp(a).unwrap());
        KroneckerSpec::with_shared_basis(u, v, sig1, sig2).expect("construction is valid")
    }

    pub fn shared_basis(&self) -> bool {
        self.shared.is_some()
    }
}

/// Tensor whose matricization is `A₁ ⊗ A₂`, partially symmetrized. The raw
/// Kronecker tensor `a_ijkl = (A₁)_{ji}(A₂)_{lk}` is not partially symmetric
/// in general, but `f` only sees the symmetric part on rank-one symmetric
/// inputs, so the symmetrized tensor keeps every `f` value.
pub fn kron_build<F: Real>(spec: &KroneckerSpec<F>) -> PsTensor<F> {
    let n = spec.a1.rows();
    let m = spec.a1.cols();
    PsTensor::from_fn_symmetrized(m, n, |i, j, k, l| spec.a1[(j, i)] * spec.a2[(l, k)])
}

/// Closed-form global maximizer of the Kronecker-built tensor under shared
/// factor bases: `x* = V_{·1}`, `y* = U_{·1}`, `λ = σ₁(A₁)·σ₁(A₂)`.
pub fn kron_exact_max<F: Real>(spec: &KroneckerSpec<F>) -> Result<ExactSolution<F>, ExactError> {
    let shared = spec.shared.as_ref().ok_or_else(|| {
        ExactError::NotApplicable("closed form needs factors with a shared basis".into())
    })?;
    let lambda = shared.sigma1[0] * shared.sigma2[0];
    let mut x = shared.v.column(0);
    let mut y = shared.u.column(0);
    canonical_sign(&mut x);
    canonical_sign(&mut y);
    let t = kron_build(spec);
    let pair = t.eigenpair(lambda, x, y);
    Ok(ExactSolution { eigenpair: pair, method: ExactMethod::KroneckerSharedBasis })
}
