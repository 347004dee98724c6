//! Randomized invariants over the public surface.

use proptest::prelude::*;

use mspectral::bounds;
use mspectral::io;
use mspectral::linalg::Tolerances;
use mspectral::mat::{dot, normalize};
use mspectral::tensor::PsTensor;

fn raw_entries(m: usize, n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, m * n * m * n)
}

fn unit_vec(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, dim).prop_filter_map("nonzero direction", |mut v| {
        if normalize(&mut v) > 1e-3 {
            Some(v)
        } else {
            None
        }
    })
}

proptest! {
    #[test]
    fn symmetrize_is_idempotent_and_preserves_the_form(
        raw in raw_entries(2, 3),
        x in unit_vec(2),
        y in unit_vec(3),
    ) {
        let sym = PsTensor::symmetrize(2, 3, raw.clone()).unwrap();
        let twice = PsTensor::symmetrize(2, 3, sym.raw().to_vec()).unwrap();
        prop_assert_eq!(sym.raw(), twice.raw());
        // quadruple loop over the raw entries
        let mut f_raw = 0.0;
        for i in 0..2 {
            for j in 0..3 {
                for k in 0..2 {
                    for l in 0..3 {
                        f_raw += raw[((i * 3 + j) * 2 + k) * 3 + l] * x[i] * y[j] * x[k] * y[l];
                    }
                }
            }
        }
        let f_sym = sym.f_eval(&x, &y);
        prop_assert!((f_raw - f_sym).abs() <= 1e-10 * sym.scale().max(1.0));
    }

    #[test]
    fn contraction_identities_and_shift_relation(
        raw in raw_entries(3, 2),
        x in unit_vec(3),
        y in unit_vec(2),
        eta in -5.0..5.0f64,
    ) {
        let t = PsTensor::symmetrize(3, 2, raw).unwrap();
        let f = t.f_eval(&x, &y);
        let scale = t.scale().max(1.0);
        prop_assert!((dot(&x, &t.contract_x(&x, &y)) - f).abs() <= 1e-12 * scale);
        prop_assert!((dot(&y, &t.contract_y(&x, &y)) - f).abs() <= 1e-12 * scale);
        let shifted = t.shift(eta);
        prop_assert!((shifted.f_eval(&x, &y) - (f + eta)).abs() <= 1e-10 * scale.max(eta.abs()));
    }

    #[test]
    fn bound_orderings_on_nonnegative_tensors(raw in prop::collection::vec(0.0..5.0f64, 81)) {
        let t = PsTensor::symmetrize(3, 3, raw).unwrap();
        let es = bounds::es_upper(&t).unwrap();
        let mes = bounds::mes_lower(&t).unwrap();
        let tau = bounds::tau_wang(&t);
        let tau1 = bounds::tau1_li(&t).unwrap();
        let eps = 1e-9 * t.scale().max(1.0);
        prop_assert!(es.r1.value <= tau + eps);
        prop_assert!(es.r2.value <= tau + eps);
        prop_assert!(es.min() <= tau1 + eps);
        prop_assert!(mes.max() <= es.min() + eps);
    }

    #[test]
    fn json_round_trip_is_exact(raw in raw_entries(2, 2)) {
        let t = PsTensor::symmetrize(2, 2, raw).unwrap();
        let text = io::tensor_to_json(&t);
        let back = io::tensor_from_json(&text, &Tolerances::default(), false).unwrap();
        prop_assert_eq!(back.tensor.raw(), t.raw());
    }
}
