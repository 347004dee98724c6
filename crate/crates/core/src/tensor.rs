//! Fourth-order partially symmetric tensors: representation, validation,
//! contraction algebra, unfoldings, and structural-matrix extraction.
//!
//! A `PsTensor` stores a dense `m×n×m×n` array `a[i][j][k][l]` with the
//! partial symmetries `a_ijkl = a_kjil = a_ilkj`. Indices `i,k` run over the
//! left (x) mode of size `m`, indices `j,l` over the right (y) mode of size
//! `n`. The bi-quadratic form evaluated everywhere in this crate is
//!
//! ```text
//! f(x, y) = Σ_{i,k,j,l} a_ijkl · x_i y_j x_k y_l .
//! ```

use serde::Serialize;

use crate::error::TensorError;
use crate::linalg::Tolerances;
use crate::mat::{norm2, sub_scaled, Mat};
use crate::scalar::Real;

/// Dense fourth-order partially symmetric tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct PsTensor<F> {
    m: usize,
    n: usize,
    data: Vec<F>,
}

/// Structural classification flags, pure functions of the entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClassFlags {
    /// Every entry is `≥ 0`.
    pub nonnegative: bool,
    /// Every off-diagonal entry (`i≠k` or `j≠l`) is `≤ 0`.
    pub z_tensor: bool,
    /// Nonzero entries only at `i=k`, `j=l`.
    pub diagonal: bool,
}

/// Result of validating raw entries, including whether repair ran.
#[derive(Clone, Debug)]
pub struct Validated<F> {
    pub tensor: PsTensor<F>,
    pub flags: ClassFlags,
    /// Worst symmetry deviation found in the raw input, relative to scale.
    pub max_deviation: F,
    /// True when repair mode replaced the input by its symmetrization.
    pub repaired: bool,
}

/// An M-eigenpair candidate with its defect against the eigen equations.
#[derive(Clone, Debug, Serialize)]
pub struct Eigenpair<F> {
    pub lambda: F,
    pub x: Vec<F>,
    pub y: Vec<F>,
    /// `‖A(·,y,x,y) − λx‖`
    pub residual_x: F,
    /// `‖A(x,y,x,·) − λy‖`
    pub residual_y: F,
}

/// Bi-quadratic structural (BS), elasticity structure (ES), and mean
/// elasticity structure (MES) matrices of a tensor.
///
/// * BS grid: `C_jl` with `(C_jl)_st = a_sjtl` (m×m, symmetric, `C_jl = C_lj`)
///   and `D_ik` with `(D_ik)_uv = a_iukv` (n×n, symmetric, `D_ik = D_ki`).
/// * ES lists: `C_l = Σ_j C_jl`, `D_i = Σ_k D_ik`.
/// * MES means: `C̄ = (1/n) Σ_l C_l`, `D̄ = (1/m) Σ_i D_i`.
#[derive(Clone, Debug)]
pub struct StructMatrices<F> {
    m: usize,
    n: usize,
    pub c_grid: Vec<Mat<F>>,
    pub d_grid: Vec<Mat<F>>,
    pub c_es: Vec<Mat<F>>,
    pub d_es: Vec<Mat<F>>,
    pub c_mes: Mat<F>,
    pub d_mes: Mat<F>,
}

impl<F: Real> StructMatrices<F> {
    pub fn c(&self, j: usize, l: usize) -> &Mat<F> {
        &self.c_grid[j * self.n + l]
    }

    pub fn d(&self, i: usize, k: usize) -> &Mat<F> {
        &self.d_grid[i * self.m + k]
    }
}

impl<F: Real> PsTensor<F> {
    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.m + k) * self.n + l
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize, l: usize) -> F {
        self.data[self.idx(i, j, k, l)]
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Tensor scale `s = max |a_ijkl|`; tolerances are taken relative to it.
    pub fn scale(&self) -> F {
        self.data.iter().fold(F::zero(), |acc, &v| acc.max(v.abs()))
    }

    pub fn zero(m: usize, n: usize) -> Self {
        assert!(m > 0 && n > 0, "modes must be positive");
        PsTensor { m, n, data: vec![F::zero(); m * n * m * n] }
    }

    /// Identity tensor: `δ_ijkl = 1` iff `i=k` and `j=l`.
    pub fn identity(m: usize, n: usize) -> Self {
        let mut t = PsTensor::zero(m, n);
        for i in 0..m {
            for j in 0..n {
                let at = t.idx(i, j, i, j);
                t.data[at] = F::one();
            }
        }
        t
    }

    /// Validate raw entries (strict: reject on symmetry violation).
    pub fn from_dense(m: usize, n: usize, raw: Vec<F>, tol: &Tolerances<F>) -> Result<Self, TensorError> {
        let v = Self::validate(m, n, raw, tol, false)?;
        Ok(v.tensor)
    }

    /// Full validation with optional repair. With `repair = true` a
    /// symmetry-violating input is replaced by its partial symmetrization and
    /// flagged instead of rejected; non-finite entries are always rejected.
    pub fn validate(
        m: usize,
        n: usize,
        raw: Vec<F>,
        tol: &Tolerances<F>,
        repair: bool,
    ) -> Result<Validated<F>, TensorError> {
        let expected = m * n * m * n;
        if m == 0 || n == 0 || raw.len() != expected {
            return Err(TensorError::ShapeMismatch { m, n, expected, got: raw.len() });
        }
        let mut t = PsTensor { m, n, data: raw };
        if let Some((i, j, k, l)) = t.first_non_finite() {
            return Err(TensorError::NonFinite { i: i + 1, j: j + 1, k: k + 1, l: l + 1 });
        }
        let scale = t.scale();
        let allowed = tol.eps_sym * scale;
        let (dev, worst) = t.max_symmetry_deviation();
        let mut repaired = false;
        if dev > allowed {
            if repair {
                t = t.symmetrized();
                repaired = true;
            } else {
                let (i, j, k, l, lhs, rhs) = worst;
                return Err(TensorError::SymmetryViolation {
                    i: i + 1,
                    j: j + 1,
                    k: k + 1,
                    l: l + 1,
                    lhs: lhs.as_f64(),
                    rhs: rhs.as_f64(),
                    deviation: dev.as_f64(),
                    allowed: allowed.as_f64(),
                });
            }
        }
        let flags = t.class_flags();
        Ok(Validated { tensor: t, flags, max_deviation: dev, repaired })
    }

    /// Partial symmetrization `b_ijkl = (c_ijkl + c_kjil + c_ilkj + c_klij)/4`
    /// of arbitrary raw entries. Idempotent, and preserves `f(x,y)` for every
    /// `x, y` because the form only sees the symmetric part.
    pub fn symmetrize(m: usize, n: usize, raw: Vec<F>) -> Result<Self, TensorError> {
        let expected = m * n * m * n;
        if m == 0 || n == 0 || raw.len() != expected {
            return Err(TensorError::ShapeMismatch { m, n, expected, got: raw.len() });
        }
        let t = PsTensor { m, n, data: raw };
        if let Some((i, j, k, l)) = t.first_non_finite() {
            return Err(TensorError::NonFinite { i: i + 1, j: j + 1, k: k + 1, l: l + 1 });
        }
        Ok(t.symmetrized())
    }

    fn symmetrized(&self) -> PsTensor<F> {
        let quarter = F::from_f64(0.25);
        let mut out = PsTensor::zero(self.m, self.n);
        for i in 0..self.m {
            for j in 0..self.n {
                for k in 0..self.m {
                    for l in 0..self.n {
                        // one canonically ordered average per symmetry orbit,
                        // written to all four positions, so the output is
                        // bit-exactly symmetric
                        let orbit = [(i, j, k, l), (k, j, i, l), (i, l, k, j), (k, l, i, j)];
                        if orbit.iter().any(|&o| o < (i, j, k, l)) {
                            continue;
                        }
                        let s = self.at(i, j, k, l)
                            + self.at(k, j, i, l)
                            + self.at(i, l, k, j)
                            + self.at(k, l, i, j);
                        let v = quarter * s;
                        for (a, b, c, d) in orbit {
                            let at = out.idx(a, b, c, d);
                            out.data[at] = v;
                        }
                    }
                }
            }
        }
        out
    }

    fn first_non_finite(&self) -> Option<(usize, usize, usize, usize)> {
        for i in 0..self.m {
            for j in 0..self.n {
                for k in 0..self.m {
                    for l in 0..self.n {
                        if !self.at(i, j, k, l).is_finite() {
                            return Some((i, j, k, l));
                        }
                    }
                }
            }
        }
        None
    }

    /// Worst deviation from both partial symmetries, with the offending
    /// index quadruple (0-based) and the two entries compared.
    fn max_symmetry_deviation(&self) -> (F, (usize, usize, usize, usize, F, F)) {
        let mut dev = F::zero();
        let mut worst = (0, 0, 0, 0, F::zero(), F::zero());
        for i in 0..self.m {
            for j in 0..self.n {
                for k in 0..self.m {
                    for l in 0..self.n {
                        let a = self.at(i, j, k, l);
                        let b = self.at(k, j, i, l);
                        let c = self.at(i, l, k, j);
                        let d1 = (a - b).abs();
                        if d1 > dev {
                            dev = d1;
                            worst = (i, j, k, l, a, b);
                        }
                        let d2 = (a - c).abs();
                        if d2 > dev {
                            dev = d2;
                            worst = (i, j, k, l, a, c);
                        }
                    }
                }
            }
        }
        (dev, worst)
    }

    pub fn class_flags(&self) -> ClassFlags {
        let mut nonnegative = true;
        let mut z_tensor = true;
        let mut diagonal = true;
        for i in 0..self.m {
            for j in 0..self.n {
                for k in 0..self.m {
                    for l in 0..self.n {
                        let v = self.at(i, j, k, l);
                        if v < F::zero() {
                            nonnegative = false;
                        }
                        let off = i != k || j != l;
                        if off {
                            if v > F::zero() {
                                z_tensor = false;
                            }
                            if v != F::zero() {
                                diagonal = false;
                            }
                        }
                    }
                }
            }
        }
        ClassFlags { nonnegative, z_tensor, diagonal }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&v| v >= F::zero())
    }

    /// First strictly negative entry (1-based indices), if any.
    pub fn first_negative(&self) -> Option<(usize, usize, usize, usize, F)> {
        for i in 0..self.m {
            for j in 0..self.n {
                for k in 0..self.m {
                    for l in 0..self.n {
                        let v = self.at(i, j, k, l);
                        if v < F::zero() {
                            return Some((i + 1, j + 1, k + 1, l + 1, v));
                        }
                    }
                }
            }
        }
        None
    }

    /// `f(x,y) = Σ a_ijkl x_i y_j x_k y_l`.
    pub fn f_eval(&self, x: &[F], y: &[F]) -> F {
        self.check_dims(x, y);
        let mut total = F::zero();
        for i in 0..self.m {
            for j in 0..self.n {
                let mut inner = F::zero();
                for k in 0..self.m {
                    for l in 0..self.n {
                        inner += self.at(i, j, k, l) * x[k] * y[l];
                    }
                }
                total += x[i] * y[j] * inner;
            }
        }
        total
    }

    /// `A(·,y,x,y)_i = Σ_{j,k,l} a_ijkl y_j x_k y_l`.
    pub fn contract_x(&self, x: &[F], y: &[F]) -> Vec<F> {
        self.check_dims(x, y);
        (0..self.m)
            .map(|i| {
                let mut acc = F::zero();
                for j in 0..self.n {
                    for k in 0..self.m {
                        for l in 0..self.n {
                            acc += self.at(i, j, k, l) * y[j] * x[k] * y[l];
                        }
                    }
                }
                acc
            })
            .collect()
    }

    /// `A(x,y,x,·)_l = Σ_{i,j,k} a_ijkl x_i y_j x_k`.
    pub fn contract_y(&self, x: &[F], y: &[F]) -> Vec<F> {
        self.check_dims(x, y);
        (0..self.n)
            .map(|l| {
                let mut acc = F::zero();
                for i in 0..self.m {
                    for j in 0..self.n {
                        for k in 0..self.m {
                            acc += self.at(i, j, k, l) * x[i] * y[j] * x[k];
                        }
                    }
                }
                acc
            })
            .collect()
    }

    fn check_dims(&self, x: &[F], y: &[F]) {
        assert_eq!(x.len(), self.m, "x has dimension {}, tensor wants {}", x.len(), self.m);
        assert_eq!(y.len(), self.n, "y has dimension {}, tensor wants {}", y.len(), self.n);
    }

    /// Square unfolding `A_st = a_ijkl`, `s = n·i + j`, `t = n·k + l`
    /// (0-based). Symmetric whenever the tensor is partially symmetric.
    pub fn unfold(&self) -> Mat<F> {
        let mn = self.m * self.n;
        Mat::from_fn(mn, mn, |s, t| {
            let (i, j) = (s / self.n, s % self.n);
            let (k, l) = (t / self.n, t % self.n);
            self.at(i, j, k, l)
        })
    }

    /// Block unfolding with `m×m` blocks: block `(j,l)` is the BS matrix
    /// `(a_sjtl)_st`. Contains the same entry multiset as `unfold`, permuted.
    pub fn unfold_wx(&self) -> Mat<F> {
        let nm = self.n * self.m;
        Mat::from_fn(nm, nm, |r, c| {
            let (j, s) = (r / self.m, r % self.m);
            let (l, t) = (c / self.m, c % self.m);
            self.at(s, j, t, l)
        })
    }

    /// All BS, ES, and MES matrices.
    pub fn struct_matrices(&self) -> StructMatrices<F> {
        let (m, n) = (self.m, self.n);
        let mut c_grid = Vec::with_capacity(n * n);
        for j in 0..n {
            for l in 0..n {
                c_grid.push(Mat::from_fn(m, m, |s, t| self.at(s, j, t, l)));
            }
        }
        let mut d_grid = Vec::with_capacity(m * m);
        for i in 0..m {
            for k in 0..m {
                d_grid.push(Mat::from_fn(n, n, |u, v| self.at(i, u, k, v)));
            }
        }
        let mut c_es = Vec::with_capacity(n);
        for l in 0..n {
            let mut acc = Mat::zeros(m, m);
            for j in 0..n {
                acc.add_scaled(F::one(), &c_grid[j * n + l]);
            }
            c_es.push(acc);
        }
        let mut d_es = Vec::with_capacity(m);
        for i in 0..m {
            let mut acc = Mat::zeros(n, n);
            for k in 0..m {
                acc.add_scaled(F::one(), &d_grid[i * m + k]);
            }
            d_es.push(acc);
        }
        let mut c_mes = Mat::zeros(m, m);
        for c in &c_es {
            c_mes.add_scaled(F::one(), c);
        }
        c_mes.scale(F::one() / F::from_f64(n as f64));
        let mut d_mes = Mat::zeros(n, n);
        for d in &d_es {
            d_mes.add_scaled(F::one(), d);
        }
        d_mes.scale(F::one() / F::from_f64(m as f64));
        StructMatrices { m, n, c_grid, d_grid, c_es, d_es, c_mes, d_mes }
    }

    /// Entrywise `α·A + β·B`.
    pub fn axpy(alpha: F, a: &PsTensor<F>, beta: F, b: &PsTensor<F>) -> Result<PsTensor<F>, TensorError> {
        if a.m != b.m || a.n != b.n {
            return Err(TensorError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                a.m, a.n, b.m, b.n
            )));
        }
        let data = a
            .data
            .iter()
            .zip(b.data.iter())
            .map(|(&x, &y)| alpha * x + beta * y)
            .collect();
        Ok(PsTensor { m: a.m, n: a.n, data })
    }

    /// `A + η·I` (negative `η` subtracts the identity tensor).
    pub fn shift(&self, eta: F) -> PsTensor<F> {
        let mut out = self.clone();
        for i in 0..self.m {
            for j in 0..self.n {
                let at = out.idx(i, j, i, j);
                out.data[at] += eta;
            }
        }
        out
    }

    pub fn max_diagonal(&self) -> F {
        let mut best = F::neg_infinity();
        for i in 0..self.m {
            for j in 0..self.n {
                best = best.max(self.at(i, j, i, j));
            }
        }
        best
    }

    /// Defects of `(λ, x, y)` against the M-eigenvalue equations:
    /// `(‖A(·,y,x,y) − λx‖, ‖A(x,y,x,·) − λy‖)`.
    pub fn residuals(&self, lambda: F, x: &[F], y: &[F]) -> (F, F) {
        let rx = norm2(&sub_scaled(&self.contract_x(x, y), lambda, x));
        let ry = norm2(&sub_scaled(&self.contract_y(x, y), lambda, y));
        (rx, ry)
    }

    /// Package an eigenpair candidate with its residuals.
    pub fn eigenpair(&self, lambda: F, x: Vec<F>, y: Vec<F>) -> Eigenpair<F> {
        let (residual_x, residual_y) = self.residuals(lambda, &x, &y);
        Eigenpair { lambda, x, y, residual_x, residual_y }
    }

    /// Raw entries in canonical `(i,j,k,l)` row-major order.
    pub fn raw(&self) -> &[F] {
        &self.data
    }

    /// Build directly from a closure; the result is symmetrized so callers
    /// only need to give a generating formula.
    pub fn from_fn_symmetrized(m: usize, n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> F) -> PsTensor<F> {
        let mut t = PsTensor::zero(m, n);
        for i in 0..m {
            for j in 0..n {
                for k in 0..m {
                    for l in 0..n {
                        let at = t.idx(i, j, k, l);
                        t.data[at] = f(i, j, k, l);
                    }
                }
            }
        }
        t.symmetrized()
    }

    /// Mutate one entry without any symmetry bookkeeping. Callers are
    /// responsible for writing the full symmetry orbit.
    pub(crate) fn set_raw(&mut self, i: usize, j: usize, k: usize, l: usize, v: F) {
        let at = self.idx(i, j, k, l);
        self.data[at] = v;
    }
}
