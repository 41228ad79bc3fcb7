use freemoments::classical_ensemble::{classical_omega4, omega4_scale, ParticleEnsemble};
use freemoments::geometry::{classify, CaseLabel};
use freemoments::moment_core::{moments_from_invariants, MomentVector};
use proptest::prelude::*;

fn moment_vector() -> impl Strategy<Value = MomentVector> {
    (2usize..=6, 0.5f64..2.0, any::<bool>()).prop_flat_map(|(n, mass, negative)| {
        (prop::collection::vec(-1.0f64..1.0, n), 0.1f64..1.0).prop_map(move |(mut v, top)| {
            v.push(if negative { -top } else { top });
            MomentVector::new(v, mass, 1.0).unwrap()
        })
    })
}

fn close(a: f64, b: f64, scale: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * scale.max(1.0)
}

proptest! {
    #[test]
    fn invariants_do_not_drift(y in moment_vector(), t in -5.0f64..5.0) {
        let before = y.invariants().unwrap();
        let after = y.propagate(t).unwrap().invariants().unwrap();
        let scale = y.invariant_scales().iter().zip(y.propagate(t).unwrap().invariant_scales()).map(|(a, b)| a.max(b)).collect::<Vec<_>>();
        for ((b, a), s) in before.z().iter().zip(after.z()).zip(&scale) {
            prop_assert!(close(*b, *a, *s, 1e-11));
        }
        prop_assert!(close(before.t0() - t, after.t0(), before.t0().abs() + t.abs(), 1e-11));
    }

    #[test]
    fn propagation_composes(y in moment_vector(), t1 in -3.0f64..3.0, t2 in -3.0f64..3.0) {
        let stepwise = y.propagate(t1).unwrap().propagate(t2).unwrap();
        let direct = y.propagate(t1 + t2).unwrap();
        let scale = y.values().iter().map(|v| v.abs()).sum::<f64>() * (1.0 + (t1.abs() + t2.abs()) / y.mass()).powi(y.order() as i32);
        for k in 0..=y.order() {
            prop_assert!(close(stepwise.get(k), direct.get(k), scale, 1e-12));
        }
    }

    #[test]
    fn invariants_rebuild_the_trajectory(y in moment_vector(), t in -4.0f64..4.0) {
        let z = y.invariants().unwrap();
        let u = (t - z.t0()) / y.mass();
        let rebuilt = moments_from_invariants(&z, u, y.mass(), y.hbar()).unwrap();
        let direct = y.propagate(t).unwrap();
        let scale: f64 = direct.values().iter().map(|v| v.abs()).sum::<f64>() + y.values().iter().map(|v| v.abs()).sum::<f64>();
        // the rebuild divides by powers of y_n, so allow for its conditioning
        let cond = (1.0 / y.top().abs()).powi(y.order() as i32 - 1) * (1.0 + z.t0().abs()).powi(y.order() as i32);
        for k in 0..=y.order() {
            prop_assert!(close(rebuilt.get(k), direct.get(k), scale * cond, 1e-11));
        }
    }

    #[test]
    fn top_moment_is_conserved_and_values_stay_real(y in moment_vector(), t in -10.0f64..10.0) {
        let p = y.propagate(t).unwrap();
        prop_assert_eq!(p.top(), y.top());
        prop_assert!(p.values().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn derivative_matches_finite_difference(y in moment_vector()) {
        let h = 1e-5;
        let plus = y.propagate(h).unwrap();
        let minus = y.propagate(-h).unwrap();
        for (k, d) in y.derivative().iter().enumerate() {
            let fd = (plus.get(k) - minus.get(k)) / (2.0 * h);
            prop_assert!(close(*d, fd, y.values().iter().map(|v| v.abs()).sum(), 1e-7));
        }
    }

    #[test]
    fn classification_is_time_independent(y in moment_vector(), t in -4.0f64..4.0) {
        prop_assume!(y.order() == 3 || y.order() == 4);
        prop_assume!(y.order() != 4 || y.get(0) > 0.0);
        let a = classify(&y);
        let b = classify(&y.propagate(t).unwrap());
        if let (Ok(a), Ok(b)) = (a, b) {
            if !a.boundary && !b.boundary {
                prop_assert_eq!(a.case_label, b.case_label);
                prop_assert!(a.case_label != CaseLabel::NoCriticalPoints);
            }
        }
    }

    #[test]
    fn ensemble_drift_obeys_the_propagator(
        pairs in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 2..200),
        mass in 0.5f64..3.0,
        t in -3.0f64..3.0,
        n in 1usize..=6,
    ) {
        let (xs, ps): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let e = ParticleEnsemble::new(xs, ps, mass).unwrap();
        let y = e.moments(n, 1.0).unwrap();
        let moved = e.drift(t).unwrap().moments(n, 1.0).unwrap();
        let predicted = y.propagate(t).unwrap();
        let scale = y.values().iter().map(|v| v.abs()).sum::<f64>() * (1.0 + t.abs() / mass).powi(n as i32);
        for k in 0..=n {
            prop_assert!(close(moved.get(k), predicted.get(k), scale, 1e-10));
        }
    }

    #[test]
    fn classical_omega4_is_never_negative(
        pairs in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 2..300),
    ) {
        let (xs, ps): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let e = ParticleEnsemble::new(xs, ps, 1.0).unwrap();
        prop_assert!(classical_omega4(&e) >= -1e-12 * omega4_scale(&e));
    }
}
