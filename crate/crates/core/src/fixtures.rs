//! Bundled example tensors, shipped as JSON files under `fixtures/` so the
//! CLI, the tests, and downstream users all read the same bytes.
//!
//! * `b1` — dense nonnegative 3×3×3×3 with a known tight bound bracket.
//! * `b2` — diagonal nonnegative 3×3×3×3 from a rhombic elasticity system;
//!   its greatest M-eigenvalue is exactly 10.
//! * `b3` — integer-valued nonnegative 3×3×3×3.
//! * `b4` — 2×2×2×2 equal-D-ES tensor with closed-form eigenpair
//!   (`a,b,c,x,y,z = 4,1,1,4,3,1`); see [`b4_param`] for the free template.
//! * `equal_es4` — 4×4×4×4 tensor whose ES matrices all coincide, so the
//!   mean-ES eigenpair is exact.
//! * `ztensor2` — 2×2×2×2 elasticity Z-tensor certified strongly elliptic by
//!   the shifted bound while the unfolding test stays inconclusive.
//! * `rhombic3` — nonnegative rhombic-system 3×3×3×3 tensor.

use crate::io;
use crate::linalg::Tolerances;
use crate::scalar::Real;
use crate::tensor::PsTensor;

macro_rules! fixture_fn {
    ($name:ident, $file:literal) => {
        pub fn $name() -> PsTensor<f64> {
            io::tensor_from_json(
                include_str!(concat!("../fixtures/", $file)),
                &Tolerances::default(),
                false,
            )
            .expect(concat!("bundled fixture ", $file, " must parse"))
            .tensor
        }
    };
}

fixture_fn!(b1, "b1.json");
fixture_fn!(b2, "b2.json");
fixture_fn!(b3, "b3.json");
fixture_fn!(b4, "b4.json");
fixture_fn!(equal_es4, "equal_es4.json");
fixture_fn!(ztensor2, "ztensor2.json");
fixture_fn!(rhombic3, "rhombic3.json");

/// All bundled fixtures with their names.
pub fn all() -> Vec<(&'static str, PsTensor<f64>)> {
    vec![
        ("b1", b1()),
        ("b2", b2()),
        ("b3", b3()),
        ("b4", b4()),
        ("equal_es4", equal_es4()),
        ("ztensor2", ztensor2()),
        ("rhombic3", rhombic3()),
    ]
}

/// The `b4` family with free nonnegative parameters: slices
/// `B(:,:,1,1) = [[a,b],[x,y]]`, `B(:,:,2,1) = [[x,y],[a,b]]`,
/// `B(:,:,1,2) = [[b,c],[y,z]]`, `B(:,:,2,2) = [[y,z],[b,c]]`.
/// For any parameters its D-side ES matrices coincide:
/// `D̄ = D₁ = D₂ = [[a+x, b+y],[b+y, c+z]]`.
pub fn b4_param<F: Real>(a: F, b: F, c: F, x: F, y: F, z: F) -> PsTensor<F> {
    let mut t = PsTensor::zero(2, 2);
    let slices = [
        ((0usize, 0usize), [[a, b], [x, y]]),
        ((1, 0), [[x, y], [a, b]]),
        ((0, 1), [[b, c], [y, z]]),
        ((1, 1), [[y, z], [b, c]]),
    ];
    for ((k, l), m_slice) in slices {
        for i in 0..2 {
            for j in 0..2 {
                t.set_raw(i, j, k, l, m_slice[i][j]);
            }
        }
    }
    t
}

/// The 4×4×4×4 equal-ES tensor built from its generating formula:
/// off-diagonal blocks `b(i,p,k,q) = i + k + |p−q|` and diagonal blocks
/// chosen so every row slice sums to the same ES matrix
/// (`C̄_ik = 4(i+k) + 6`, 1-based).
pub fn equal_es4_formula<F: Real>() -> PsTensor<F> {
    let size = 4usize;
    let off = |i: usize, p: usize, k: usize, q: usize| (i + k) as f64 + (p as f64 - q as f64).abs();
    let mut t = PsTensor::zero(size, size);
    for i in 1..=size {
        for k in 1..=size {
            for p in 1..=size {
                for q in 1..=size {
                    if p != q {
                        t.set_raw(i - 1, p - 1, k - 1, q - 1, F::from_f64(off(i, p, k, q)));
                    }
                }
            }
            for tt in 1..=size {
                let v = if tt == 1 {
                    (i + k) as f64
                } else {
                    let row1: f64 =
                        (i + k) as f64 + (2..=size).map(|l| off(i, 1, k, l)).sum::<f64>();
                    let offt: f64 =
                        (1..=size).filter(|&l| l != tt).map(|l| off(i, tt, k, l)).sum();
                    row1 - offt
                };
                t.set_raw(i - 1, tt - 1, k - 1, tt - 1, F::from_f64(v));
            }
        }
    }
    t
}
