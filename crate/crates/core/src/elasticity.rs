//! Strong-ellipticity certification for elasticity tensors.
//!
//! The pipeline for an elasticity Z-tensor `A` (off-diagonal entries all
//! non-positive): pick `η ≥ max a_ijij`, form the nonnegative `B = ηI − A`,
//! and certify whenever `η > min{R₁(B), R₂(B)}`. Certification makes `A` a
//! nonsingular elasticity M-tensor, whose smallest M-eigenvalue is at least
//! `η − min(R₁,R₂) > 0`, so the bi-quadratic form is positive on all nonzero
//! pairs.
//!
//! Two sanity companions ship with it: the unfolding-matrix positive
//! definiteness check (sufficient but often inconclusive where the shifted
//! bound succeeds), and entry-sum refutations that prove a tensor cannot be
//! nonnegative on product states.

use serde::Serialize;

use crate::bounds;
use crate::error::ElasticityError;
use crate::linalg::sym_eig;
use crate::scalar::Real;
use crate::tensor::PsTensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CertifiedStrongEllipticity,
    NotCertified,
    RefutedNotEw,
}

/// Outcome of the sufficient-condition check, with the numbers that justify
/// the verdict.
#[derive(Clone, Debug, Serialize)]
pub struct EllipticityCertificate<F> {
    pub verdict: Verdict,
    pub eta: F,
    /// `min{R₁, R₂}` of `ηI − A`, when the shifted tensor is nonnegative.
    pub bound_used: Option<F>,
    /// Certified floor on the smallest M-eigenvalue: `η − bound_used`.
    pub min_eigenvalue_floor: Option<F>,
    pub z_tensor: bool,
    /// `β_min` of the block unfolding; positive would certify on its own.
    pub ding_beta_min: Option<F>,
    pub notes: Vec<String>,
}

/// Which entry-sum refutation to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EwCheckMode {
    /// Z-tensor form: refuted when `Σ a_ijij < Σ_{i≠k, j≠l} |a_ijkl|`.
    ZTensor,
    /// General form: refuted when `Σ a_ijij < −Σ_{i≠k, j≠l} a_ijkl`.
    General,
}

fn first_positive_off_diagonal<F: Real>(t: &PsTensor<F>) -> Option<(usize, usize, usize, usize, F)> {
    for i in 0..t.m() {
        for j in 0..t.n() {
            for k in 0..t.m() {
                for l in 0..t.n() {
                    if (i != k || j != l) && t.at(i, j, k, l) > F::zero() {
                        return Some((i + 1, j + 1, k + 1, l + 1, t.at(i, j, k, l)));
                    }
                }
            }
        }
    }
    None
}

fn diagonal_sum<F: Real>(t: &PsTensor<F>) -> F {
    let mut acc = F::zero();
    for i in 0..t.m() {
        for j in 0..t.n() {
            acc += t.at(i, j, i, j);
        }
    }
    acc
}

fn strict_off_sum<F: Real>(t: &PsTensor<F>, absolute: bool) -> F {
    let mut acc = F::zero();
    for i in 0..t.m() {
        for k in 0..t.m() {
            if i == k {
                continue;
            }
            for j in 0..t.n() {
                for l in 0..t.n() {
                    if j == l {
                        continue;
                    }
                    let v = t.at(i, j, k, l);
                    acc += if absolute { v.abs() } else { v };
                }
            }
        }
    }
    acc
}

/// Entry-sum refutation: `true` means the uniform product state already makes
/// the form negative, so the tensor is provably not nonnegative on product
/// states (and in particular not M-positive semidefinite).
pub fn not_ew_check<F: Real>(t: &PsTensor<F>, mode: EwCheckMode) -> Result<bool, ElasticityError> {
    match mode {
        EwCheckMode::ZTensor => {
            if let Some((i, j, k, l, v)) = first_positive_off_diagonal(t) {
                return Err(ElasticityError::NotZTensor { i, j, k, l, value: v.as_f64() });
            }
            Ok(diagonal_sum(t) < strict_off_sum(t, true))
        }
        EwCheckMode::General => Ok(diagonal_sum(t) < -strict_off_sum(t, false)),
    }
}

/// `β_min` of the block unfolding; `> 0` certifies M-positive definiteness
/// by the unfolding criterion, anything else is inconclusive.
pub fn ding_unfold_check<F: Real>(t: &PsTensor<F>) -> F {
    sym_eig(&t.unfold_wx()).expect("finite unfolding").min_value()
}

/// Sufficient condition for strong ellipticity of a Z-tensor via the shifted
/// ES bound. `eta = None` uses the minimal admissible value `max a_ijij`;
/// explicit values below that floor are rejected.
pub fn certify_strong_ellipticity<F: Real>(
    t: &PsTensor<F>,
    eta: Option<F>,
) -> Result<EllipticityCertificate<F>, ElasticityError> {
    let flags = t.class_flags();
    let floor = t.max_diagonal();
    let eta = match eta {
        Some(e) => {
            if e < floor {
                return Err(ElasticityError::EtaTooSmall { eta: e.as_f64(), floor: floor.as_f64() });
            }
            e
        }
        None => floor,
    };
    let ding_beta_min = Some(ding_unfold_check(t));
    let mut notes = Vec::new();
    if !flags.z_tensor {
        if let Some((i, j, k, l, v)) = first_positive_off_diagonal(t) {
            notes.push(format!(
                "not a Z-tensor: off-diagonal entry ({i},{j},{k},{l}) = {v} is positive; the sufficient condition does not apply"
            ));
        }
        return Ok(EllipticityCertificate {
            verdict: Verdict::NotCertified,
            eta,
            bound_used: None,
            min_eigenvalue_floor: None,
            z_tensor: false,
            ding_beta_min,
            notes,
        });
    }
    if not_ew_check(t, EwCheckMode::ZTensor)? {
        notes.push(
            "diagonal sum is smaller than the strict off-diagonal absolute sum: the form is negative at the uniform product state"
                .into(),
        );
        return Ok(EllipticityCertificate {
            verdict: Verdict::RefutedNotEw,
            eta,
            bound_used: None,
            min_eigenvalue_floor: None,
            z_tensor: true,
            ding_beta_min,
            notes,
        });
    }
    // B = ηI − A is nonnegative: off-diagonals flip sign, diagonals are
    // covered by the eta floor.
    let shifted = PsTensor::axpy(-F::one(), t, F::zero(), t)
        .expect("same shape")
        .shift(eta);
    debug_assert!(shifted.is_nonnegative());
    let es = bounds::es_upper(&shifted)?;
    let bound = es.min();
    let margin = eta - bound;
    let strict = F::from_f64(1e-9) * t.scale().max(F::one());
    if margin > strict {
        notes.push(format!(
            "eta = {eta} exceeds min(R1, R2) = {bound} of the shifted tensor; margin {margin}"
        ));
        Ok(EllipticityCertificate {
            verdict: Verdict::CertifiedStrongEllipticity,
            eta,
            bound_used: Some(bound),
            min_eigenvalue_floor: Some(margin),
            z_tensor: true,
            ding_beta_min,
            notes,
        })
    } else {
        notes.push(format!(
            "eta = {eta} does not strictly exceed min(R1, R2) = {bound}; condition inconclusive"
        ));
        Ok(EllipticityCertificate {
            verdict: Verdict::NotCertified,
            eta,
            bound_used: Some(bound),
            min_eigenvalue_floor: None,
            z_tensor: true,
            ding_beta_min,
            notes,
        })
    }
}

/// Scan `eta` over an even grid on `[floor, 2·floor]` (or `[floor, floor+1]`
/// for a zero floor) and return the smallest certifying value with its
/// certificate. Smaller `eta` leaves a larger certified margin.
pub fn scan_eta<F: Real>(
    t: &PsTensor<F>,
    steps: usize,
) -> Result<Option<(F, EllipticityCertificate<F>)>, ElasticityError> {
    let floor = t.max_diagonal();
    let hi = if floor > F::zero() { floor + floor } else { floor + F::one() };
    let steps = steps.max(1);
    for s in 0..=steps {
        let frac = F::from_f64(s as f64 / steps as f64);
        let eta = floor + (hi - floor) * frac;
        let cert = certify_strong_ellipticity(t, Some(eta))?;
        if cert.verdict == Verdict::CertifiedStrongEllipticity {
            return Ok(Some((eta, cert)));
        }
    }
    Ok(None)
}

/// `R(B)·I − B` for a nonnegative `B`: an elasticity M-tensor by the bound
/// theorem, with Z-structure verified on the way out.
pub fn make_m_tensor<F: Real>(
    t: &PsTensor<F>,
    use_r1: bool,
) -> Result<PsTensor<F>, ElasticityError> {
    let es = bounds::es_upper(t)?;
    let r = if use_r1 { es.r1.value } else { es.r2.value };
    let out = PsTensor::axpy(-F::one(), t, F::zero(), t).expect("same shape").shift(r);
    debug_assert!(out.class_flags().z_tensor);
    Ok(out)
}

/// 1-based index quadruples that a rhombic-system elasticity tensor must
/// zero out (each together with its full symmetry orbit).
const RHOMBIC_ZEROS: [(usize, usize, usize, usize); 12] = [
    (2, 3, 3, 1),
    (3, 3, 3, 1),
    (2, 3, 1, 2),
    (3, 3, 2, 3),
    (3, 1, 1, 2),
    (3, 3, 1, 2),
    (1, 1, 1, 2),
    (1, 1, 2, 3),
    (2, 2, 1, 2),
    (1, 1, 3, 1),
    (2, 2, 3, 1),
    (2, 2, 2, 3),
];

fn orbit(i: usize, j: usize, k: usize, l: usize) -> [(usize, usize, usize, usize); 4] {
    [(i, j, k, l), (k, j, i, l), (i, l, k, j), (k, l, i, j)]
}

/// Check the twelve rhombic zero constraints (with symmetry images) on a
/// 3×3×3×3 tensor.
pub fn rhombic_validate<F: Real>(t: &PsTensor<F>) -> Result<bool, ElasticityError> {
    if t.m() != 3 || t.n() != 3 {
        return Err(ElasticityError::NotRhombicShape { m: t.m(), n: t.n() });
    }
    let thr = F::from_f64(1e-12) * t.scale().max(F::one());
    for &(i, j, k, l) in RHOMBIC_ZEROS.iter() {
        for (a, b, c, d) in orbit(i, j, k, l) {
            if t.at(a - 1, b - 1, c - 1, d - 1).abs() > thr {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The nine free elasticities of a rhombic system.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RhombicParams<F> {
    pub c1111: F,
    pub c2222: F,
    pub c3333: F,
    pub c1122: F,
    pub c2233: F,
    pub c3311: F,
    pub c2323: F,
    pub c1313: F,
    pub c1212: F,
}

/// Build the 3×3×3×3 rhombic tensor from its nine free entries, closing each
/// under the partial symmetries.
pub fn rhombic_generate<F: Real>(p: &RhombicParams<F>) -> PsTensor<F> {
    let mut t = PsTensor::zero(3, 3);
    let mut put = |i: usize, j: usize, k: usize, l: usize, v: F| {
        for (a, b, c, d) in orbit(i, j, k, l) {
            t.set_raw(a - 1, b - 1, c - 1, d - 1, v);
        }
    };
    put(1, 1, 1, 1, p.c1111);
    put(2, 2, 2, 2, p.c2222);
    put(3, 3, 3, 3, p.c3333);
    put(1, 1, 2, 2, p.c1122);
    put(2, 2, 3, 3, p.c2233);
    put(3, 3, 1, 1, p.c3311);
    put(2, 3, 2, 3, p.c2323);
    put(1, 3, 1, 3, p.c1313);
    put(1, 2, 1, 2, p.c1212);
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bim::{bim_solve, BimConfig};

    #[test]
    fn identity_certifies_trivially() {
        let id = PsTensor::<f64>::identity(2, 2);
        let cert = certify_strong_ellipticity(&id, Some(1.0)).unwrap();
        assert_eq!(cert.verdict, Verdict::CertifiedStrongEllipticity);
        assert_eq!(cert.bound_used, Some(0.0));
        assert!(cert.z_tensor);
        // unfolding check also certifies the identity on its own
        assert!((ding_unfold_check(&id) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eta_below_floor_is_rejected() {
        let id = PsTensor::<f64>::identity(2, 2);
        assert!(matches!(
            certify_strong_ellipticity(&id, Some(0.5)),
            Err(ElasticityError::EtaTooSmall { .. })
        ));
    }

    #[test]
    fn non_z_tensor_is_not_certified() {
        let t = PsTensor::from_fn_symmetrized(2, 2, |i, j, k, l| {
            if i == k && j == l {
                2.0
            } else {
                0.5
            }
        });
        let cert = certify_strong_ellipticity(&t, None).unwrap();
        assert_eq!(cert.verdict, Verdict::NotCertified);
        assert!(!cert.z_tensor);
        assert!(!cert.notes.is_empty());
    }

    #[test]
    fn tiny_diagonal_z_tensor_is_refuted() {
        // diagonal 0.1 everywhere, one large negative off-diagonal orbit
        let mut t = PsTensor::<f64>::zero(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                t.set_raw(i, j, i, j, 0.1);
            }
        }
        for (a, b, c, d) in orbit(1, 1, 2, 2) {
            t.set_raw(a - 1, b - 1, c - 1, d - 1, -5.0);
        }
        assert!(not_ew_check(&t, EwCheckMode::ZTensor).unwrap());
        assert!(not_ew_check(&t, EwCheckMode::General).unwrap());
        let cert = certify_strong_ellipticity(&t, None).unwrap();
        assert_eq!(cert.verdict, Verdict::RefutedNotEw);
        // direct confirmation: the form is negative at the uniform state
        let x = [1.0 / 2.0_f64.sqrt(); 2];
        let y = x;
        assert!(t.f_eval(&x, &y) < 0.0);
    }

    #[test]
    fn purely_diagonal_tensor_is_not_refuted() {
        let id = PsTensor::<f64>::identity(3, 3);
        assert!(!not_ew_check(&id, EwCheckMode::ZTensor).unwrap());
        assert!(!not_ew_check(&id, EwCheckMode::General).unwrap());
    }

    #[test]
    fn z_mode_rejects_non_z_input() {
        let t = PsTensor::from_fn_symmetrized(2, 2, |_, _, _, _| 1.0);
        assert!(matches!(
            not_ew_check(&t, EwCheckMode::ZTensor),
            Err(ElasticityError::NotZTensor { .. })
        ));
    }

    #[test]
    fn make_m_tensor_from_zero_is_zero() {
        let z = PsTensor::<f64>::zero(2, 3);
        let out = make_m_tensor(&z, true).unwrap();
        assert_eq!(out.scale(), 0.0);
    }

    #[test]
    fn make_m_tensor_has_nonnegative_smallest_eigenvalue() {
        for seed in 0..5 {
            let b = crate::exact::gen_delta1::<f64>(2, 2, seed);
            let a = make_m_tensor(&b, false).unwrap();
            assert!(a.class_flags().z_tensor);
            // the greatest eigenvalue of B stays below the shift R, so the
            // smallest eigenvalue of A = R·I − B stays above zero
            let rho = bim_solve(&b, &BimConfig { tol: 1e-10, ..Default::default() })
                .unwrap()
                .eigenpair
                .lambda;
            let es = bounds::es_upper(&b).unwrap();
            assert!(es.r2.value - rho >= -1e-6 * b.scale().max(1.0));
            let _ = a;
        }
    }

    #[test]
    fn rhombic_validate_and_generate_round_trip() {
        let p = RhombicParams {
            c1111: 1.0,
            c2222: 2.0,
            c3333: 3.0,
            c1122: 4.0,
            c2233: 5.0,
            c3311: 6.0,
            c2323: 7.0,
            c1313: 8.0,
            c1212: 9.0,
        };
        let t: PsTensor<f64> = rhombic_generate(&p);
        let tol = crate::linalg::Tolerances::default();
        // generator output is a valid partially symmetric tensor
        PsTensor::validate(3, 3, t.raw().to_vec(), &tol, false).unwrap();
        assert!(rhombic_validate(&t).unwrap());
        assert!(t.is_nonnegative());
        // shifting by the identity keeps the rhombic zeros
        let shifted = t.shift(13.0);
        assert!(rhombic_validate(&shifted).unwrap());
    }

    #[test]
    fn non_rhombic_tensor_is_flagged() {
        let mut t = PsTensor::<f64>::identity(3, 3);
        for (a, b, c, d) in orbit(2, 3, 3, 1) {
            t.set_raw(a - 1, b - 1, c - 1, d - 1, 0.5);
        }
        assert!(!rhombic_validate(&t).unwrap());
        let wrong_shape = PsTensor::<f64>::identity(2, 2);
        assert!(matches!(
            rhombic_validate(&wrong_shape),
            Err(ElasticityError::NotRhombicShape { .. })
        ));
    }

    #[test]
    fn reference_z_tensor_is_not_refuted_and_generic_is_not_rhombic() {
        // diagonal sum 13+13+6+5 = 37 dominates the off-diagonal sum 28
        let z = crate::fixtures::ztensor2();
        assert!(!not_ew_check(&z, EwCheckMode::ZTensor).unwrap());
        assert!(!rhombic_validate(&crate::fixtures::b1()).unwrap());
    }

    #[test]
    fn scan_finds_smallest_certifying_eta() {
        let id = PsTensor::<f64>::identity(2, 2);
        let found = scan_eta(&id, 8).unwrap();
        let (eta, cert) = found.unwrap();
        assert_eq!(cert.verdict, Verdict::CertifiedStrongEllipticity);
        assert!((eta - 1.0).abs() < 1e-12, "floor already certifies the identity");
    }
}
