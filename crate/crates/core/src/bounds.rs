//! Closed-form lower and upper bounds of the M-spectral radius.
//!
//! For a nonnegative tensor the certified bracket is
//!
//! ```text
//! max{β_max(C̄), β_max(D̄)}  ≤  ρ_M  ≤  min{R₁, R₂}
//! ```
//!
//! with `R₁ = max_l β_max(C_l)` and `R₂ = max_i β_max(D_i)`. The looser
//! comparison bounds `τ` (upper-triangle entry sum of the unfolding), `τ₁`
//! and `τ₂` (row-sum style bounds) are computed alongside for benchmarking;
//! the proven orderings are `R₁ ≤ τ`, `R₂ ≤ τ`, and `min(R₁,R₂) ≤ τ₁`.

use serde::Serialize;

use crate::error::BoundsError;
use crate::linalg::sym_eig;
use crate::mat::canonical_sign;
use crate::scalar::Real;
use crate::tensor::PsTensor;

/// A bound value together with the 1-based index of the slice achieving it.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessedBound<F> {
    pub value: F,
    pub index: usize,
}

/// A bound value achieved by an explicit eigenvector.
#[derive(Clone, Debug, Serialize)]
pub struct EigBound<F> {
    pub value: F,
    pub vector: Vec<F>,
}

/// ES upper bounds with their argmax witnesses (ties take the smallest index).
#[derive(Clone, Debug, Serialize)]
pub struct EsUpper<F> {
    pub r1: WitnessedBound<F>,
    pub r2: WitnessedBound<F>,
}

impl<F: Real> EsUpper<F> {
    pub fn min(&self) -> F {
        self.r1.value.min(self.r2.value)
    }
}

/// MES lower bounds with the witnessing eigenvectors. The pair
/// `(x⋆, 1/√n·𝟙)` attains `lower_c` as a value of `f`, and `(1/√m·𝟙, y⋆)`
/// attains `lower_d`, so both are feasible candidates for the maximization.
#[derive(Clone, Debug, Serialize)]
pub struct MesLower<F> {
    pub lower_c: EigBound<F>,
    pub lower_d: EigBound<F>,
}

impl<F: Real> MesLower<F> {
    pub fn max(&self) -> F {
        self.lower_c.value.max(self.lower_d.value)
    }
}

/// Everything the bounds stage can say about one tensor. Bounds that require
/// nonnegativity are `None` with an explanation in `skipped` when the input
/// has negative entries; `tau` is always defined.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport<F> {
    pub r1: Option<WitnessedBound<F>>,
    pub r2: Option<WitnessedBound<F>>,
    pub tau: F,
    pub tau1: Option<F>,
    pub tau2: Option<F>,
    pub lower_c: Option<EigBound<F>>,
    pub lower_d: Option<EigBound<F>>,
    pub best_upper: F,
    pub best_lower: Option<F>,
    pub skipped: Vec<String>,
}

fn require_nonnegative<F: Real>(t: &PsTensor<F>) -> Result<(), BoundsError> {
    if let Some((i, j, k, l, v)) = t.first_negative() {
        return Err(BoundsError::NotNonnegative { i, j, k, l, value: v.as_f64() });
    }
    Ok(())
}

/// `R₁ = max_l β_max(C_l)` and `R₂ = max_i β_max(D_i)` for a nonnegative
/// tensor; both are upper bounds on the M-spectral radius.
pub fn es_upper<F: Real>(t: &PsTensor<F>) -> Result<EsUpper<F>, BoundsError> {
    require_nonnegative(t)?;
    let s = t.struct_matrices();
    let mut r1 = WitnessedBound { value: F::neg_infinity(), index: 0 };
    for (l, c) in s.c_es.iter().enumerate() {
        let beta = sym_eig(c).expect("ES matrix is finite").max_value();
        if beta > r1.value {
            r1 = WitnessedBound { value: beta, index: l + 1 };
        }
    }
    let mut r2 = WitnessedBound { value: F::neg_infinity(), index: 0 };
    for (i, d) in s.d_es.iter().enumerate() {
        let beta = sym_eig(d).expect("ES matrix is finite").max_value();
        if beta > r2.value {
            r2 = WitnessedBound { value: beta, index: i + 1 };
        }
    }
    Ok(EsUpper { r1, r2 })
}

/// `β_max(C̄)` and `β_max(D̄)` with eigenvectors; lower bounds on the
/// M-spectral radius of a nonnegative tensor.
pub fn mes_lower<F: Real>(t: &PsTensor<F>) -> Result<MesLower<F>, BoundsError> {
    require_nonnegative(t)?;
    let s = t.struct_matrices();
    let ec = sym_eig(&s.c_mes).expect("MES matrix is finite");
    let ed = sym_eig(&s.d_mes).expect("MES matrix is finite");
    let mut xv = ec.max_vector();
    let mut yv = ed.max_vector();
    canonical_sign(&mut xv);
    canonical_sign(&mut yv);
    Ok(MesLower {
        lower_c: EigBound { value: ec.max_value(), vector: xv },
        lower_d: EigBound { value: ed.max_value(), vector: yv },
    })
}

/// Shift parameter of the original block improvement method: the sum of
/// absolute values of the upper triangle (diagonal included) of the square
/// unfolding. Defined for any partially symmetric tensor.
pub fn tau_wang<F: Real>(t: &PsTensor<F>) -> F {
    let u = t.unfold();
    let mn = u.rows();
    let mut acc = F::zero();
    for s in 0..mn {
        for tt in s..mn {
            acc += u[(s, tt)].abs();
        }
    }
    acc
}

fn gamma_l<F: Real>(t: &PsTensor<F>, l: usize) -> F {
    let mut acc = F::zero();
    for j in 0..t.n() {
        for i in 0..t.m() {
            for k in 0..t.m() {
                acc += t.at(i, j, k, l).abs();
            }
        }
    }
    acc
}

fn psi_i<F: Real>(t: &PsTensor<F>, i: usize) -> F {
    let mut acc = F::zero();
    for k in 0..t.m() {
        for j in 0..t.n() {
            for l in 0..t.n() {
                acc += t.at(i, j, k, l).abs();
            }
        }
    }
    acc
}

/// Row-sum upper bound `τ₁ = min{max_i Ψ_i, max_l Γ_l}`.
pub fn tau1_li<F: Real>(t: &PsTensor<F>) -> Result<F, BoundsError> {
    require_nonnegative(t)?;
    let max_gamma = (0..t.n()).map(|l| gamma_l(t, l)).fold(F::neg_infinity(), F::max);
    let max_psi = (0..t.m()).map(|i| psi_i(t, i)).fold(F::neg_infinity(), F::max);
    Ok(max_gamma.min(max_psi))
}

/// Quadratic refinement `τ₂ = min{Θ₁, Θ₂}` over index pairs `j≠l` / `i≠k`;
/// undefined (rejected) when `m = 1` or `n = 1`.
pub fn tau2_li<F: Real>(t: &PsTensor<F>) -> Result<F, BoundsError> {
    require_nonnegative(t)?;
    if t.m() < 2 || t.n() < 2 {
        return Err(BoundsError::DegenerateDimension { bound: "tau2" });
    }
    let half = F::from_f64(0.5);
    let four = F::from_f64(4.0);
    let gammas: Vec<F> = (0..t.n()).map(|l| gamma_l(t, l)).collect();
    let psis: Vec<F> = (0..t.m()).map(|i| psi_i(t, i)).collect();
    // Σ_{i,k} |b_ilkl| for each l: the same-slice part of Γ_l
    let diag_c: Vec<F> = (0..t.n())
        .map(|l| {
            let mut acc = F::zero();
            for i in 0..t.m() {
                for k in 0..t.m() {
                    acc += t.at(i, l, k, l).abs();
                }
            }
            acc
        })
        .collect();
    // Σ_{j,l} |b_ijil| for each i: the same-slice part of Ψ_i
    let diag_d: Vec<F> = (0..t.m())
        .map(|i| {
            let mut acc = F::zero();
            for j in 0..t.n() {
                for l in 0..t.n() {
                    acc += t.at(i, j, i, l).abs();
                }
            }
            acc
        })
        .collect();
    let mut theta1 = F::neg_infinity();
    for j in 0..t.n() {
        for l in 0..t.n() {
            if j == l {
                continue;
            }
            let s = diag_c[l];
            let val = half * (s + (s * s + four * (gammas[l] - s) * gammas[j]).sqrt());
            theta1 = theta1.max(val);
        }
    }
    let mut theta2 = F::neg_infinity();
    for i in 0..t.m() {
        for k in 0..t.m() {
            if i == k {
                continue;
            }
            let s = diag_d[i];
            let val = half * (s + (s * s + four * (psis[i] - s) * psis[k]).sqrt());
            theta2 = theta2.max(val);
        }
    }
    Ok(theta1.min(theta2))
}

/// Aggregate every applicable bound. Never fails: bounds whose hypotheses do
/// not hold are skipped with a recorded reason.
pub fn bound_report<F: Real>(t: &PsTensor<F>) -> BoundReport<F> {
    let tau = tau_wang(t);
    let mut skipped = Vec::new();
    let nonneg = t.is_nonnegative();
    let (r1, r2, lower_c, lower_d, tau1, tau2) = if nonneg {
        let es = es_upper(t).expect("nonnegativity just checked");
        let mes = mes_lower(t).expect("nonnegativity just checked");
        let tau1 = tau1_li(t).expect("nonnegativity just checked");
        let tau2 = match tau2_li(t) {
            Ok(v) => Some(v),
            Err(e) => {
                skipped.push(format!("tau2: {e}"));
                None
            }
        };
        (Some(es.r1), Some(es.r2), Some(mes.lower_c), Some(mes.lower_d), Some(tau1), tau2)
    } else {
        skipped.push("R1/R2, tau1/tau2, and MES lower bounds need a nonnegative tensor".into());
        (None, None, None, None, None, None)
    };
    let mut best_upper = tau;
    for v in [r1.as_ref().map(|b| b.value), r2.as_ref().map(|b| b.value), tau1, tau2]
        .into_iter()
        .flatten()
    {
        best_upper = best_upper.min(v);
    }
    let best_lower = match (&lower_c, &lower_d) {
        (Some(c), Some(d)) => Some(c.value.max(d.value)),
        _ => None,
    };
    BoundReport { r1, r2, tau, tau1, tau2, lower_c, lower_d, best_upper, best_lower, skipped }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Tolerances;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_nonneg(m: usize, n: usize, seed: u64) -> PsTensor<f64> {
        let mut rng = StdRng::seed_from_u64(seed);
        PsTensor::from_fn_symmetrized(m, n, |_, _, _, _| rng.gen_range(0.0..1.0))
    }

    #[test]
    fn identity_bounds() {
        let id = PsTensor::<f64>::identity(2, 2);
        let es = es_upper(&id).unwrap();
        assert!((es.r1.value - 1.0).abs() < 1e-12);
        assert!((es.r2.value - 1.0).abs() < 1e-12);
        let mes = mes_lower(&id).unwrap();
        assert!((mes.max() - 1.0).abs() < 1e-12);
        // mn diagonal ones in the unfolding
        assert!((tau_wang(&id) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn zero_tensor_bounds_are_zero() {
        let z = PsTensor::<f64>::zero(2, 3);
        let rep = bound_report(&z);
        assert_eq!(rep.tau, 0.0);
        assert_eq!(rep.best_upper, 0.0);
        assert_eq!(rep.best_lower, Some(0.0));
    }

    #[test]
    fn negative_tensor_is_rejected_by_hypothesis_checks() {
        let t = PsTensor::<f64>::identity(2, 2).shift(-2.0);
        assert!(matches!(es_upper(&t), Err(BoundsError::NotNonnegative { .. })));
        assert!(matches!(mes_lower(&t), Err(BoundsError::NotNonnegative { .. })));
        assert!(matches!(tau1_li(&t), Err(BoundsError::NotNonnegative { .. })));
        let rep = bound_report(&t);
        assert!(rep.r1.is_none());
        assert!(!rep.skipped.is_empty());
        // tau still works through absolute values
        assert!(rep.tau > 0.0);
    }

    #[test]
    fn tau2_needs_both_modes_at_least_two() {
        let t = random_nonneg(1, 3, 5);
        assert!(matches!(tau2_li(&t), Err(BoundsError::DegenerateDimension { .. })));
    }

    #[test]
    fn tau1_of_identity_matches_hand_computation() {
        // Γ_l = m and Ψ_i = n for the identity tensor
        let id = PsTensor::<f64>::identity(3, 4);
        let tau1 = tau1_li(&id).unwrap();
        assert!((tau1 - 3.0_f64.min(4.0)).abs() < 1e-12);
        assert!(tau1 >= 1.0);
    }

    #[test]
    fn proven_orderings_hold_on_random_batch() {
        for seed in 0..200 {
            let t = random_nonneg(3, 3, seed);
            let es = es_upper(&t).unwrap();
            let mes = mes_lower(&t).unwrap();
            let tau = tau_wang(&t);
            let tau1 = tau1_li(&t).unwrap();
            let scale = t.scale();
            let eps = 1e-9 * scale;
            assert!(es.r1.value <= tau + eps, "R1 <= tau violated at seed {seed}");
            assert!(es.r2.value <= tau + eps, "R2 <= tau violated at seed {seed}");
            assert!(es.min() <= tau1 + eps, "min(R1,R2) <= tau1 violated at seed {seed}");
            // sandwich: MES lower bounds never exceed the ES uppers
            assert!(mes.lower_c.value <= es.min() + eps, "lower_C > upper at seed {seed}");
            assert!(mes.lower_d.value <= es.min() + eps, "lower_D > upper at seed {seed}");
        }
    }

    #[test]
    fn mes_witness_pairs_attain_their_bounds() {
        let tol = Tolerances::<f64>::default();
        let _ = tol;
        for seed in [3u64, 17, 99] {
            let t = random_nonneg(3, 4, seed);
            let mes = mes_lower(&t).unwrap();
            let n = t.n() as f64;
            let m = t.m() as f64;
            let uniform_y = vec![1.0 / n.sqrt(); t.n()];
            let uniform_x = vec![1.0 / m.sqrt(); t.m()];
            let f_c = t.f_eval(&mes.lower_c.vector, &uniform_y);
            let f_d = t.f_eval(&uniform_x, &mes.lower_d.vector);
            assert!((f_c - mes.lower_c.value).abs() < 1e-10 * t.scale().max(1.0));
            assert!((f_d - mes.lower_d.value).abs() < 1e-10 * t.scale().max(1.0));
        }
    }

    #[test]
    fn single_precision_path_works_with_relaxed_tolerances() {
        let tol = Tolerances::<f32>::from_machine_eps();
        let mut rng = StdRng::seed_from_u64(44);
        let t: PsTensor<f32> =
            PsTensor::from_fn_symmetrized(3, 3, |_, _, _, _| rng.gen_range(0.0f32..1.0));
        PsTensor::validate(3, 3, t.raw().to_vec(), &tol, false).unwrap();
        let es = es_upper(&t).unwrap();
        let mes = mes_lower(&t).unwrap();
        assert!(mes.max() <= es.min() + 1e-4);
        let id = PsTensor::<f32>::identity(2, 2);
        assert!((tau_wang(&id) - 4.0f32).abs() < 1e-6);
    }

    #[test]
    fn report_on_nonnegative_tensor_is_fully_populated() {
        let t = random_nonneg(2, 2, 1);
        let rep = bound_report(&t);
        assert!(rep.r1.is_some() && rep.r2.is_some());
        assert!(rep.tau1.is_some() && rep.tau2.is_some());
        let bl = rep.best_lower.unwrap();
        assert!(bl <= rep.best_upper + 1e-9);
        assert!(rep.skipped.is_empty());
    }
}
