//! Membership tests for the structural tensor classes that make bounds and
//! exact solutions cheap, and the semigroup-closure verifier for them.
//!
//! * Position classes: index `p` such that `C_jp − C_jl ⪰ 0` for all `j,l`
//!   (symmetrically `q` on the D side). Membership pins where the largest
//!   component of the Perron right (left) eigenvector sits, so a single ES
//!   eigendecomposition yields the upper bound.
//! * Equal-ES classes: all `C_l` equal (`Δ₁`), all `D_i` equal (`Δ₂`).
//! * Exact-solution classes: `β_max(C̄)` (resp. `β_max(D̄)`) ties the max of
//!   the ES maxima (`Ω₁`, `Ω₂`), which makes the MES eigenpair exact.
//!
//! Each membership family is closed under entrywise addition with the zero
//! tensor as identity (a commutative monoid); `check_closure` verifies that
//! on concrete pairs.

use serde::Serialize;

use crate::bounds;
use crate::error::StructureError;
use crate::linalg::{is_psd, sym_eig, Tolerances};
use crate::mat::Mat;
use crate::scalar::Real;
use crate::tensor::PsTensor;

/// Named structural classes, used by the closure checker.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StructClass {
    /// Position class on the C side for a fixed 1-based index `p`.
    Upsilon1(usize),
    /// Position class on the D side for a fixed 1-based index `q`.
    Upsilon2(usize),
    /// All ES matrices `C_l` equal.
    Delta1,
    /// All ES matrices `D_i` equal.
    Delta2,
}

impl std::fmt::Display for StructClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StructClass::Upsilon1(p) => write!(f, "position class (C side, p={p})"),
            StructClass::Upsilon2(q) => write!(f, "position class (D side, q={q})"),
            StructClass::Delta1 => write!(f, "equal-ES class (C side)"),
            StructClass::Delta2 => write!(f, "equal-ES class (D side)"),
        }
    }
}

/// Summary emitted by the CLI `structure` command. Indices are 1-based.
#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub position_p: Option<usize>,
    pub position_q: Option<usize>,
    pub delta1: bool,
    pub delta2: bool,
    pub omega1: Option<bool>,
    pub omega2: Option<bool>,
    pub notes: Vec<String>,
}

fn require_nonnegative<F: Real>(t: &PsTensor<F>) -> Result<(), StructureError> {
    if let Some((i, j, k, l, v)) = t.first_negative() {
        return Err(StructureError::Bounds(crate::error::BoundsError::NotNonnegative {
            i,
            j,
            k,
            l,
            value: v.as_f64(),
        }));
    }
    Ok(())
}

fn position_p_holds<F: Real>(s: &crate::tensor::StructMatrices<F>, n: usize, p: usize, scale: F, tol: &Tolerances<F>) -> bool {
    for j in 0..n {
        for l in 0..n {
            let diff = s.c(j, p).sub(s.c(j, l));
            if !is_psd(&diff, scale, tol) {
                return false;
            }
        }
    }
    true
}

fn position_q_holds<F: Real>(s: &crate::tensor::StructMatrices<F>, m: usize, q: usize, scale: F, tol: &Tolerances<F>) -> bool {
    for i in 0..m {
        for k in 0..m {
            let diff = s.d(q, k).sub(s.d(i, k));
            if !is_psd(&diff, scale, tol) {
                return false;
            }
        }
    }
    true
}

/// Smallest `p` with `C_jp − C_jl ⪰ 0` for all `j,l`, and smallest `q` with
/// `D_qk − D_ik ⪰ 0` for all `i,k`; `None` where no index qualifies.
/// Returned indices are 1-based. Zero differences count as members (the
/// condition is non-strict).
pub fn position_membership<F: Real>(
    t: &PsTensor<F>,
    tol: &Tolerances<F>,
) -> Result<(Option<usize>, Option<usize>), StructureError> {
    require_nonnegative(t)?;
    let s = t.struct_matrices();
    let scale = t.scale();
    let p = (0..t.n()).find(|&p| position_p_holds(&s, t.n(), p, scale, tol)).map(|p| p + 1);
    let q = (0..t.m()).find(|&q| position_q_holds(&s, t.m(), q, scale, tol)).map(|q| q + 1);
    Ok((p, q))
}

/// Which side a position witness lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PositionIndex {
    /// 1-based column index `p` on the C side.
    P(usize),
    /// 1-based row index `q` on the D side.
    Q(usize),
}

/// Upper bound on the M-spectral radius from a single ES eigendecomposition,
/// valid when `index` witnesses the position condition (re-checked here;
/// `InvalidWitness` otherwise).
pub fn upper_from_position<F: Real>(
    t: &PsTensor<F>,
    index: PositionIndex,
    tol: &Tolerances<F>,
) -> Result<F, StructureError> {
    require_nonnegative(t)?;
    let s = t.struct_matrices();
    let scale = t.scale();
    match index {
        PositionIndex::P(p1) => {
            let p = p1 - 1;
            for j in 0..t.n() {
                for l in 0..t.n() {
                    let diff = s.c(j, p).sub(s.c(j, l));
                    if !is_psd(&diff, scale, tol) {
                        return Err(StructureError::InvalidWitness { index: p1, j: j + 1, l: l + 1 });
                    }
                }
            }
            Ok(sym_eig(&s.c_es[p]).expect("finite ES matrix").max_value())
        }
        PositionIndex::Q(q1) => {
            let q = q1 - 1;
            for i in 0..t.m() {
                for k in 0..t.m() {
                    let diff = s.d(q, k).sub(s.d(i, k));
                    if !is_psd(&diff, scale, tol) {
                        return Err(StructureError::InvalidWitness { index: q1, j: i + 1, l: k + 1 });
                    }
                }
            }
            Ok(sym_eig(&s.d_es[q]).expect("finite ES matrix").max_value())
        }
    }
}

/// `(Δ₁, Δ₂)`: whether all `C_l` (resp. all `D_i`) agree entrywise within
/// `eps_sym·scale`.
pub fn delta_membership<F: Real>(t: &PsTensor<F>, tol: &Tolerances<F>) -> (bool, bool) {
    let s = t.struct_matrices();
    let thr = tol.eps_sym * t.scale();
    let delta1 = s.c_es.windows(2).all(|w| w[0].sub(&w[1]).max_abs() <= thr);
    let delta2 = s.d_es.windows(2).all(|w| w[0].sub(&w[1]).max_abs() <= thr);
    (delta1, delta2)
}

/// `(Ω₁, Ω₂)`: whether `β_max(C̄)` (resp. `β_max(D̄)`) equals the max of the
/// ES maxima on either side, within `eps_eq·scale`.
pub fn omega_membership<F: Real>(
    t: &PsTensor<F>,
    tol: &Tolerances<F>,
) -> Result<(bool, bool), StructureError> {
    require_nonnegative(t)?;
    let es = bounds::es_upper(t)?;
    let mes = bounds::mes_lower(t)?;
    let thr = tol.eps_eq * t.scale().max(F::one());
    let omega1 = (mes.lower_c.value - es.r1.value).abs() <= thr
        || (mes.lower_c.value - es.r2.value).abs() <= thr;
    let omega2 = (mes.lower_d.value - es.r2.value).abs() <= thr
        || (mes.lower_d.value - es.r1.value).abs() <= thr;
    Ok((omega1, omega2))
}

fn is_member<F: Real>(t: &PsTensor<F>, class: StructClass, tol: &Tolerances<F>) -> Result<bool, StructureError> {
    match class {
        StructClass::Upsilon1(p) => {
            require_nonnegative(t)?;
            let s = t.struct_matrices();
            Ok(position_p_holds(&s, t.n(), p - 1, t.scale(), tol))
        }
        StructClass::Upsilon2(q) => {
            require_nonnegative(t)?;
            let s = t.struct_matrices();
            Ok(position_q_holds(&s, t.m(), q - 1, t.scale(), tol))
        }
        StructClass::Delta1 => Ok(delta_membership(t, tol).0),
        StructClass::Delta2 => Ok(delta_membership(t, tol).1),
    }
}

/// Verify additive closure: both inputs must already belong to `class`
/// (`NotMember` otherwise); the returned value is the membership of `X + Y`,
/// which the monoid structure predicts to be `true`.
pub fn check_closure<F: Real>(
    x: &PsTensor<F>,
    y: &PsTensor<F>,
    class: StructClass,
    tol: &Tolerances<F>,
) -> Result<bool, StructureError> {
    if !is_member(x, class, tol)? {
        return Err(StructureError::NotMember { which: "X", set: class.to_string() });
    }
    if !is_member(y, class, tol)? {
        return Err(StructureError::NotMember { which: "Y", set: class.to_string() });
    }
    let sum = PsTensor::axpy(F::one(), x, F::one(), y)
        .map_err(|e| StructureError::NotMember { which: "X+Y", set: format!("{class}: {e}") })?;
    is_member(&sum, class, tol)
}

/// Full structure report for one tensor. The position and Ω tests require
/// nonnegativity and are reported as absent (with a note) otherwise.
pub fn structure_report<F: Real>(t: &PsTensor<F>, tol: &Tolerances<F>) -> StructureReport {
    let (delta1, delta2) = delta_membership(t, tol);
    let mut notes = Vec::new();
    let (position_p, position_q, omega1, omega2) = if t.is_nonnegative() {
        let (p, q) = position_membership(t, tol).expect("nonnegative");
        let (o1, o2) = omega_membership(t, tol).expect("nonnegative");
        (p, q, Some(o1), Some(o2))
    } else {
        notes.push("position and exact-solution class tests need a nonnegative tensor".into());
        (None, None, None, None)
    };
    StructureReport { position_p, position_q, delta1, delta2, omega1, omega2, notes }
}

/// Separable position-class member `b_sjtl = u_j u_l M_st` from a nonnegative
/// weight vector `u` and a symmetric PSD nonnegative matrix `M`. Its position
/// index is the argmax of `u`, and its greatest M-eigenvalue is
/// `β_max(M)·‖u‖²` with maximizer `y = u/‖u‖`, `x` the top eigenvector of `M`.
pub fn separable_member<F: Real>(u: &[F], m_mat: &Mat<F>) -> PsTensor<F> {
    assert!(m_mat.is_square());
    assert!(u.iter().all(|&v| v >= F::zero()), "weights must be nonnegative");
    let m = m_mat.rows();
    let n = u.len();
    let mut t = PsTensor::zero(m, n);
    for s in 0..m {
        for j in 0..n {
            for tt in 0..m {
                for l in 0..n {
                    t.set_raw(s, j, tt, l, u[j] * u[l] * m_mat[(s, tt)]);
                }
            }
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::norm2;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn psd_nonneg_matrix(m: usize, rng: &mut StdRng) -> Mat<f64> {
        // Gram matrix of nonnegative columns: PSD and entrywise nonnegative
        let g = Mat::from_fn(m, m, |_, _| rng.gen_range(0.0..1.0));
        g.transpose().matmul(&g)
    }

    #[test]
    fn zero_tensor_is_everywhere() {
        let z = PsTensor::<f64>::zero(3, 3);
        let (p, q) = position_membership(&z, &tol()).unwrap();
        assert_eq!((p, q), (Some(1), Some(1)));
        assert_eq!(delta_membership(&z, &tol()), (true, true));
        assert_eq!(omega_membership(&z, &tol()).unwrap(), (true, true));
        assert_eq!(upper_from_position(&z, PositionIndex::P(1), &tol()).unwrap(), 0.0);
    }

    #[test]
    fn identity_tensor_fails_the_position_condition() {
        // C_jj − C_jp = I for j≠p, so the reverse difference is −I and no
        // index can witness the condition as printed.
        let id = PsTensor::<f64>::identity(3, 3);
        let (p, q) = position_membership(&id, &tol()).unwrap();
        assert_eq!(p, None);
        assert_eq!(q, None);
    }

    #[test]
    fn separable_member_has_argmax_position_and_known_bound() {
        let mut rng = StdRng::seed_from_u64(7);
        let m_mat = psd_nonneg_matrix(3, &mut rng);
        let u = [1.0, 2.0, 3.0];
        let t = separable_member(&u, &m_mat);
        assert!(t.is_nonnegative());
        let (p, q) = position_membership(&t, &tol()).unwrap();
        assert_eq!(p, Some(3), "position is the argmax of the weights");
        assert!(q.is_some(), "D side: D_ik = (u·u) M_ik-scaled structure is rank-one too");

        let beta = sym_eig(&m_mat).unwrap().max_value();
        let sum_u: f64 = u.iter().sum();
        let bound = upper_from_position(&t, PositionIndex::P(3), &tol()).unwrap();
        // β_max(C_p) = (Σ_j u_j)·u_p·β_max(M)
        assert!((bound - sum_u * 3.0 * beta).abs() < 1e-9 * bound.abs().max(1.0));
        // the analytic greatest M-eigenvalue is β_max(M)·‖u‖², below the bound
        let rho = beta * norm2(&u.to_vec()).powi(2);
        assert!(rho <= bound + 1e-9);
        // and it is attained at y = u/‖u‖, x = top eigenvector of M
        let mut y = u.to_vec();
        crate::mat::normalize(&mut y);
        let x = sym_eig(&m_mat).unwrap().max_vector();
        assert!((t.f_eval(&x, &y) - rho).abs() < 1e-9 * rho.max(1.0));
        // the witnessed bound equals R1 (it is the argmax candidate)
        let es = bounds::es_upper(&t).unwrap();
        assert!((bound - es.r1.value).abs() < 1e-9 * bound.max(1.0));
    }

    #[test]
    fn invalid_witness_is_rejected() {
        let mut rng = StdRng::seed_from_u64(9);
        let m_mat = psd_nonneg_matrix(2, &mut rng);
        let t = separable_member(&[1.0, 2.0], &m_mat);
        assert!(matches!(
            upper_from_position(&t, PositionIndex::P(1), &tol()),
            Err(StructureError::InvalidWitness { .. })
        ));
    }

    #[test]
    fn delta_and_omega_relation() {
        // Δ ⊆ Ω: every equal-ES tensor admits the exact MES solution
        for seed in 0..20 {
            let t = crate::exact::gen_delta1(3, 3, seed);
            let (d1, _) = delta_membership(&t, &tol());
            assert!(d1, "generator output must be in the equal-ES class");
            let (o1, _) = omega_membership(&t, &tol()).unwrap();
            assert!(o1, "equal ES matrices imply the exact-solution class");
        }
    }

    #[test]
    fn closure_under_addition_for_separable_members() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..20 {
            let ma = psd_nonneg_matrix(3, &mut rng);
            let mb = psd_nonneg_matrix(3, &mut rng);
            // same argmax position (index 3) for both
            let ua = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), 2.0];
            let ub = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), 3.0];
            let x = separable_member(&ua, &ma);
            let y = separable_member(&ub, &mb);
            assert!(check_closure(&x, &y, StructClass::Upsilon1(3), &tol()).unwrap());
        }
    }

    #[test]
    fn closure_with_zero_identity_element() {
        let t = crate::exact::gen_delta1(2, 3, 4);
        let z = PsTensor::<f64>::zero(2, 3);
        assert!(check_closure(&t, &z, StructClass::Delta1, &tol()).unwrap());
    }

    #[test]
    fn non_members_are_rejected() {
        let id = PsTensor::<f64>::identity(2, 2);
        let z = PsTensor::<f64>::zero(2, 2);
        assert!(matches!(
            check_closure(&id, &z, StructClass::Upsilon1(1), &tol()),
            Err(StructureError::NotMember { which: "X", .. })
        ));
    }

    #[test]
    fn generic_dense_tensor_is_in_no_class() {
        let t = crate::fixtures::b1();
        assert_eq!(delta_membership(&t, &tol()), (false, false));
        assert_eq!(omega_membership(&t, &tol()).unwrap(), (false, false));
        let report = structure_report(&t, &tol());
        assert!(report.notes.is_empty());
    }

    #[test]
    fn position_index_pins_the_peak_of_the_perron_eigenvector() {
        // when a position witness exists and the solver converges with a
        // positive eigenvalue, the right eigenvector peaks at that index
        let mut rng = StdRng::seed_from_u64(21);
        for _ in 0..20 {
            let m_mat = psd_nonneg_matrix(3, &mut rng);
            let u = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), 2.5];
            let t = separable_member(&u, &m_mat);
            let (p, _) = position_membership(&t, &tol()).unwrap();
            let p = p.expect("separable construction is a member");
            let out = crate::bim::bim_solve(
                &t,
                &crate::bim::BimConfig { tol: 1e-10, ..Default::default() },
            )
            .unwrap();
            if out.eigenpair.lambda <= 1e-9 {
                continue;
            }
            let y = &out.eigenpair.y;
            for l in 0..3 {
                assert!(y[p - 1] >= y[l] - 1e-6, "y = {y:?}, p = {p}");
            }
        }
    }
}
