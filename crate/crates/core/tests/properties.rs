use isoladder::coherent::{bargmann_transform, cs_vector, normalization_h, q_factorial, radius_of_convergence};
use isoladder::ladder::ladder_matrices_direct;
use isoladder::verify;
use isoladder::{BasisTag, CsSpec, WeightSequence, C64};
use proptest::prelude::*;

const TAG: BasisTag = BasisTag::Theta(2.0);

#[test]
fn h_tilde_1_matches_shifted_h_tilde_for_unit_weights() {
    // a1~^dagger a1~ = H~ + w - 2 on theta_n, n >= 1, when w = 1.
    let r = verify::h_tilde_1_matrix_residual(2.0, 64).unwrap();
    assert!(r < 1e-6, "{r:e}");
}

#[test]
fn geometric_weights_below_one_have_finite_radius() {
    for q in [0.3, 0.5, 0.8] {
        let r = radius_of_convergence(&WeightSequence::Geometric(q));
        assert!((r - (q / (1.0 - q)).sqrt()).abs() < 1e-3, "q = {q}: {r}");
    }
}

#[test]
fn beyond_radius_is_rejected() {
    let spec = CsSpec { zeta: C64::new(1.5, 0.0), weights: WeightSequence::Geometric(0.5), n: 64 };
    assert!(matches!(cs_vector(&spec, TAG), Err(isoladder::Error::BeyondRadius { .. })));
}

fn weights() -> impl Strategy<Value = WeightSequence> {
    prop_oneof![
        (0.2f64..5.0).prop_map(WeightSequence::Constant),
        (0.2f64..5.0).prop_map(WeightSequence::Distorted),
        Just(WeightSequence::Linear),
        (1.0f64..1.5).prop_map(WeightSequence::Geometric),
        (0.0f64..2.0).prop_map(WeightSequence::Power),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coherent_states_are_normalized_eigenvectors(ws in weights(), re in -1.5f64..1.5, im in -1.5f64..1.5) {
        let zeta = C64::new(re, im);
        let n = 96;
        let cs = cs_vector(&CsSpec { zeta, weights: ws.clone(), n }, TAG).unwrap();
        prop_assert!((cs.norm() - 1.0).abs() < 1e-10);
        let (lo, _) = ladder_matrices_direct(&ws, n, TAG).unwrap();
        let r = lo.apply(&cs).unwrap().sub(&cs.scale(zeta)).unwrap().norm();
        prop_assert!(r < 1e-8, "{r:e}");
    }

    #[test]
    fn bargmann_reproduces_h(ws in weights(), re in -1.0f64..1.0, im in -1.0f64..1.0) {
        // <zeta|zeta'>-type kernel: Psi_cs(conj zeta) = h(|zeta|^2)^(1/2).
        let zeta = C64::new(re, im);
        let cs = cs_vector(&CsSpec { zeta, weights: ws.clone(), n: 80 }, TAG).unwrap();
        let v = bargmann_transform(&cs, &ws, &[zeta.conj()]).unwrap()[0];
        let h = normalization_h(zeta.norm_sqr(), &ws).unwrap();
        prop_assert!((v - C64::new(h.sqrt(), 0.0)).norm() < 1e-10 * h.sqrt());
    }

    #[test]
    fn q_factorial_sides_agree(q in 0.05f64..3.0, n in 1usize..400) {
        let f = q_factorial(q, n).unwrap();
        prop_assert!(f.relative_difference() < 1e-9, "{q} {n}: {f:?}");
    }
}
