use flowembed_core::theta::{
    derive_params, select_r1, theta, theta_lower_bound, theta_modulus, validate_params, ParamInputs,
    R1_POINTS_PER_RADIUS, THETA_GRID_STEP,
};
use flowembed_core::Complex64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn modulus_is_periodic(x in -50.0..50.0f64, y in -1.0..1.0f64, l in 6.0..20.0f64) {
        let b = 2.4;
        let z = Complex64::new(x, y);
        let a = theta_modulus(z, l, b);
        let s = theta_modulus(z + l, l, b);
        prop_assert!((a - s).abs() <= 1e-12 * a.max(1.0));
        let direct = theta(z, l, b).norm();
        prop_assert!((direct - a).abs() <= 1e-12 * a.max(1.0));
    }
}

#[test]
fn r1_shrinks_with_l() {
    let b = 2.4;
    let mut prev = f64::INFINITY;
    for l in [8.0, 10.0, 16.0, 32.0, 64.0] {
        let cert = select_r1(l, b, R1_POINTS_PER_RADIUS).unwrap();
        assert!(cert.pass);
        assert!(cert.r1 < (1.0 / 16.0f64).min(1.0 / l));
        assert!(cert.r1 <= prev);
        prev = cert.r1;
        let bound = theta_lower_bound(l, b, cert.r1, THETA_GRID_STEP).unwrap();
        assert!(bound.value > 0.0);
    }
}

#[test]
fn validated_records_have_positive_theta() {
    for (delta, l) in [(0.8, 10.0), (0.8, 16.0), (1.0, 8.0)] {
        let (p, _) = derive_params(ParamInputs::new(2.0, delta, l, 10, 25, 1.02)).unwrap();
        let report = validate_params(&p);
        assert!(p.theta_l > 0.0);
        assert!(report.check("0 < theta_L <= 9/(16L)").unwrap().pass);
    }
}
