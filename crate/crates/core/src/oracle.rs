//! Independent reference maximizer for desk-scale ground truth.
//!
//! Each sweep of the ascent solves its block subproblem exactly by
//! eigendecomposition: for fixed `y` the form is `xᵀM(y)x` with
//! `M(y) = Σ_{j,l} y_j y_l C_jl`, so the optimal `x` is the top eigenvector,
//! and symmetrically for `y`. That keeps this path independent of the power
//! iteration it is used to check. Multistart plus (for tiny modes) a dense
//! angular grid gives a certified-feasible lower bound on the true maximum.

use serde::Serialize;

use crate::error::OracleError;
use crate::linalg::sym_eig;
use crate::mat::{canonical_sign, Mat};
use crate::sampling;
use crate::scalar::Real;
use crate::bim;
use crate::tensor::{Eigenpair, PsTensor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    Multistart,
    Grid,
}

/// Best feasible point found, with every converged local value for context.
#[derive(Clone, Debug, Serialize)]
pub struct OracleResult<F> {
    pub best: Eigenpair<F>,
    pub local_values: Vec<F>,
    pub restarts: usize,
    pub method: OracleMethod,
}

fn x_block_matrix<F: Real>(t: &PsTensor<F>, y: &[F]) -> Mat<F> {
    Mat::from_fn(t.m(), t.m(), |s, tt| {
        let mut acc = F::zero();
        for j in 0..t.n() {
            for l in 0..t.n() {
                acc += y[j] * y[l] * t.at(s, j, tt, l);
            }
        }
        acc
    })
}

fn y_block_matrix<F: Real>(t: &PsTensor<F>, x: &[F]) -> Mat<F> {
    Mat::from_fn(t.n(), t.n(), |u, v| {
        let mut acc = F::zero();
        for i in 0..t.m() {
            for k in 0..t.m() {
                acc += x[i] * x[k] * t.at(i, u, k, v);
            }
        }
        acc
    })
}

/// Alternating exact block maximization from a given unit start. Every sweep
/// is block-optimal, so the objective is non-decreasing; stops when the gain
/// drops to `tol` (relative to scale) or after `max_sweeps`.
pub fn alternating_exact_ascent<F: Real>(
    t: &PsTensor<F>,
    x0: &[F],
    y0: &[F],
    tol: F,
    max_sweeps: usize,
) -> Eigenpair<F> {
    let mut x = x0.to_vec();
    let mut y = y0.to_vec();
    let mut value = t.f_eval(&x, &y);
    for _ in 0..max_sweeps {
        let mx = x_block_matrix(t, &y);
        x = sym_eig(&mx).expect("finite block matrix").max_vector();
        let ny = y_block_matrix(t, &x);
        y = sym_eig(&ny).expect("finite block matrix").max_vector();
        let next = t.f_eval(&x, &y);
        debug_assert!(next >= value - F::from_f64(1e-12) * value.abs().max(F::one()));
        if (next - value).abs() <= tol * t.scale().max(F::one()) {
            value = next;
            break;
        }
        value = next;
    }
    canonical_sign(&mut x);
    canonical_sign(&mut y);
    t.eigenpair(value, x, y)
}

/// Multistart search: seeded uniform sphere starts plus the two structured
/// starting pairs the solver itself uses.
pub fn global_max_multistart<F: Real>(
    t: &PsTensor<F>,
    restarts: usize,
    seed: u64,
    tol: F,
) -> OracleResult<F> {
    let restarts = restarts.max(1);
    let mut rng = sampling::rng_from_seed(seed);
    let mut starts: Vec<(Vec<F>, Vec<F>)> = Vec::with_capacity(restarts + 2);
    starts.push(bim::init_unfold(t));
    starts.push(bim::init_mes(t));
    for _ in 0..restarts {
        starts.push((sampling::unit_vector(t.m(), &mut rng), sampling::unit_vector(t.n(), &mut rng)));
    }
    let mut local_values = Vec::with_capacity(starts.len());
    let mut best: Option<Eigenpair<F>> = None;
    for (x0, y0) in &starts {
        let pair = alternating_exact_ascent(t, x0, y0, tol, 10_000);
        local_values.push(pair.lambda);
        if best.as_ref().map_or(true, |b| pair.lambda > b.lambda) {
            best = Some(pair);
        }
    }
    OracleResult {
        best: best.expect("at least one start"),
        local_values,
        restarts,
        method: OracleMethod::Multistart,
    }
}

fn sphere_points<F: Real>(dim: usize, resolution: usize) -> Vec<Vec<F>> {
    let res = resolution.max(2);
    match dim {
        1 => vec![vec![F::one()]],
        2 => (0..res)
            .map(|i| {
                let theta = F::from_f64(std::f64::consts::PI * i as f64 / res as f64);
                vec![theta.cos(), theta.sin()]
            })
            .collect(),
        3 => {
            let mut pts = Vec::with_capacity(res * res);
            for a in 0..=res {
                let theta = F::from_f64(std::f64::consts::PI * a as f64 / res as f64);
                for b in 0..res {
                    let phi = F::from_f64(std::f64::consts::PI * b as f64 / res as f64);
                    pts.push(vec![
                        theta.sin() * phi.cos(),
                        theta.sin() * phi.sin(),
                        theta.cos(),
                    ]);
                }
            }
            pts
        }
        _ => unreachable!("grid search is gated to dim <= 3"),
    }
}

/// Dense scan over angular sphere parameterizations followed by an exact
/// ascent polish of the best grid point. Half spheres suffice because the
/// form is even in each argument. Restricted to `m, n ≤ 3`.
pub fn grid_search<F: Real>(
    t: &PsTensor<F>,
    resolution: usize,
) -> Result<OracleResult<F>, OracleError> {
    if t.m() > 3 || t.n() > 3 {
        return Err(OracleError::DimensionTooLarge { m: t.m(), n: t.n() });
    }
    let xs = sphere_points::<F>(t.m(), resolution);
    let ys = sphere_points::<F>(t.n(), resolution);
    let mut best_val = F::neg_infinity();
    let mut best_pair = (xs[0].clone(), ys[0].clone());
    for x in &xs {
        for y in &ys {
            let v = t.f_eval(x, y);
            if v > best_val {
                best_val = v;
                best_pair = (x.clone(), y.clone());
            }
        }
    }
    let polished =
        alternating_exact_ascent(t, &best_pair.0, &best_pair.1, F::from_f64(1e-14), 10_000);
    let local_values = vec![best_val, polished.lambda];
    Ok(OracleResult {
        best: polished,
        local_values,
        restarts: xs.len() * ys.len(),
        method: OracleMethod::Grid,
    })
}
