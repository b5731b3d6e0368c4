use fhrn::dynamics::{gain, homeostatic_field, ModelParams, ReentryFlow, ReentryOperator, StateVector};
use fhrn::lyapunov::{lyapunov_rate, lyapunov_value};
use fhrn::operators::rotation_generator;
use fhrn::spectral::eigenvalues_of;
use fhrn::sweep::{critical_norm, effective_gain};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn vector(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, d)
}

proptest! {
    #[test]
    fn homeostatic_field_is_radial(y in vector(4), kappa in 0.0f64..20.0, theta in 0.1f64..2.0) {
        let s = StateVector::from_slice(&y);
        let f = homeostatic_field(&s, kappa, theta);
        let yv = s.as_vector();
        // f is parallel to y: f − (f·ŷ)ŷ = 0
        if yv.norm() > 1e-9 {
            let u = yv.normalize();
            let perp = &f - &u * f.dot(&u);
            prop_assert!(perp.norm() <= 1e-9 * (1.0 + f.norm()));
        }
        // and restores toward the shell
        let r = yv.norm();
        prop_assert!(f.dot(yv) * (r - theta) <= 1e-12);
    }

    #[test]
    fn rotation_does_not_change_lyapunov_rate(y in vector(2), gamma in 0.0f64..3.0) {
        let s = StateVector::from_slice(&y);
        let rot = ReentryOperator::new(rotation_generator(2)).unwrap();
        let none = ReentryOperator::new(DMatrix::zeros(2, 2)).unwrap();
        let p = ModelParams { gamma, ..ModelParams::default() };
        let a = ReentryFlow::autonomous(rot, p).unwrap().eval(&s).unwrap();
        let b = ReentryFlow::autonomous(none, p).unwrap().eval(&s).unwrap();
        let scale = 1.0 + lyapunov_value(&s).abs() * 100.0;
        prop_assert!((lyapunov_rate(&s, &a) - lyapunov_rate(&s, &b)).abs() <= 1e-9 * scale);
    }

    #[test]
    fn gain_is_one_on_unit_shell(beta in 0.01f64..10.0) {
        prop_assert_eq!(gain(1.0, beta).unwrap(), 1.0);
    }

    #[test]
    fn gain_decreases_outside_shell(r in 1.0f64..4.0, beta in 0.01f64..10.0) {
        let g = gain(r, beta).unwrap();
        prop_assert!(g > 0.0 && g <= 1.0);
    }

    #[test]
    fn duality_holds(gamma in 0.01f64..5.0, beta in 0.01f64..10.0, r in 1.0f64..3.0) {
        let w = critical_norm(gamma, beta, r).unwrap();
        prop_assert!((effective_gain(gamma, beta, r, w).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn eigenvalues_of_similar_matrices_agree(entries in prop::collection::vec(-2.0f64..2.0, 9), shift in -3.0f64..3.0) {
        let a = DMatrix::from_row_slice(3, 3, &entries);
        let shifted = &a + DMatrix::identity(3, 3) * shift;
        let ea = eigenvalues_of(&a).unwrap();
        let eb = eigenvalues_of(&shifted).unwrap();
        let sa: f64 = ea.iter().map(|z| z.re).sum::<f64>() + 3.0 * shift;
        let sb: f64 = eb.iter().map(|z| z.re).sum();
        prop_assert!((sa - sb).abs() <= 1e-9);
    }

    #[test]
    fn state_round_trips(y in vector(5)) {
        let s = StateVector::from(y.clone());
        prop_assert_eq!(s.as_slice(), &y[..]);
        prop_assert!((s.radius() - DVector::from_vec(y).norm()).abs() <= 1e-15);
    }
}
