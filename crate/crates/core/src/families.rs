//! Trigonometric benchmark tensor families used by the shift and
//! initialization experiments. All are nonnegative and partially symmetric
//! by construction; entries use 1-based loop indices in the formulas.

use serde::Serialize;

use crate::scalar::Real;
use crate::tensor::PsTensor;

/// Index quadruple (1-based) where a singular denominator was clamped.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Clamp {
    pub i: usize,
    pub p: usize,
    pub j: usize,
    pub q: usize,
}

/// A generated family tensor plus any denominator clamps that occurred.
#[derive(Clone, Debug)]
pub struct FamilyTensor<F> {
    pub tensor: PsTensor<F>,
    pub clamps: Vec<Clamp>,
}

const DENOM_FLOOR: f64 = 1e-12;

fn clamped_recip(d: f64, at: Clamp, clamps: &mut Vec<Clamp>) -> f64 {
    if d.abs() < DENOM_FLOOR {
        clamps.push(at);
        let sign = if d < 0.0 { -1.0 } else { 1.0 };
        1.0 / (sign * DENOM_FLOOR)
    } else {
        1.0 / d
    }
}

/// Shift-comparison family: diagonal blocks `(1+cos(p+q+i))/h`, off-diagonal
/// blocks `(1+sin(p+q+i+j))/h`.
pub fn shift_family<F: Real>(size: usize, h: f64) -> PsTensor<F> {
    let mut t = PsTensor::zero(size, size);
    for i in 1..=size {
        for j in 1..=size {
            for p in 1..=size {
                for q in 1..=size {
                    let v = if i == j {
                        (1.0 + ((p + q + i) as f64).cos()) / h
                    } else {
                        (1.0 + ((p + q + i + j) as f64).sin()) / h
                    };
                    t.set_raw(i - 1, p - 1, j - 1, q - 1, F::from_f64(v));
                }
            }
        }
    }
    t
}

/// Tangent family: diagonal blocks `|tan(1/(p+q−sin i−1))|`, off-diagonal
/// blocks `|tan(1/(h(cos(p+q)−sin i−cos i−cos j)))|` evaluated once per
/// unordered pair `{i,j}` (with `i<j`) and mirrored. Near-zero denominators
/// are clamped and reported.
pub fn tan_family<F: Real>(size: usize, h: f64) -> FamilyTensor<F> {
    let mut t = PsTensor::zero(size, size);
    let mut clamps = Vec::new();
    for i in 1..=size {
        for p in 1..=size {
            for q in 1..=size {
                let d = (p + q) as f64 - (i as f64).sin() - 1.0;
                let arg = clamped_recip(d, Clamp { i, p, j: i, q }, &mut clamps);
                t.set_raw(i - 1, p - 1, i - 1, q - 1, F::from_f64(arg.tan().abs()));
            }
        }
    }
    for i in 1..=size {
        for j in (i + 1)..=size {
            for p in 1..=size {
                for q in 1..=size {
                    let d = h * (((p + q) as f64).cos()
                        - (i as f64).sin()
                        - (i as f64).cos()
                        - (j as f64).cos());
                    let arg = clamped_recip(d, Clamp { i, p, j, q }, &mut clamps);
                    let v = F::from_f64(arg.tan().abs());
                    t.set_raw(i - 1, p - 1, j - 1, q - 1, v);
                    t.set_raw(j - 1, p - 1, i - 1, q - 1, v);
                }
            }
        }
    }
    FamilyTensor { tensor: t, clamps }
}

/// Reciprocal-sine family: diagonal blocks `1/|sin(p+q+i)|`, off-diagonal
/// blocks `|cos(p+q+i+j)|`.
pub fn inverse_sine_family<F: Real>(size: usize) -> FamilyTensor<F> {
    let mut t = PsTensor::zero(size, size);
    let mut clamps = Vec::new();
    for i in 1..=size {
        for j in 1..=size {
            for p in 1..=size {
                for q in 1..=size {
                    let v = if i == j {
                        let s = ((p + q + i) as f64).sin().abs();
                        if s < DENOM_FLOOR {
                            clamps.push(Clamp { i, p, j, q });
                            1.0 / DENOM_FLOOR
                        } else {
                            1.0 / s
                        }
                    } else {
                        ((p + q + i + j) as f64).cos().abs()
                    };
                    t.set_raw(i - 1, p - 1, j - 1, q - 1, F::from_f64(v));
                }
            }
        }
    }
    FamilyTensor { tensor: t, clamps }
}

/// Which diagonal offset the initialization-comparison family uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitFamilyVariant {
    SinOffset,
    CosOffset,
}

/// Initialization-comparison family: diagonal blocks `|sin(p+q+i)+h|` with
/// `h = sin i` or `h = cos i`, off-diagonal blocks `sin(p+q+i+j)+1`.
pub fn init_family<F: Real>(size: usize, variant: InitFamilyVariant) -> PsTensor<F> {
    let mut t = PsTensor::zero(size, size);
    for i in 1..=size {
        for j in 1..=size {
            for p in 1..=size {
                for q in 1..=size {
                    let v = if i == j {
                        let h = match variant {
                            InitFamilyVariant::SinOffset => (i as f64).sin(),
                            InitFamilyVariant::CosOffset => (i as f64).cos(),
                        };
                        (((p + q + i) as f64).sin() + h).abs()
                    } else {
                        ((p + q + i + j) as f64).sin() + 1.0
                    };
                    t.set_raw(i - 1, p - 1, j - 1, q - 1, F::from_f64(v));
                }
            }
        }
    }
    t
}
