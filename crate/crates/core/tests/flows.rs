use flowembed_core::flows::{
    conjugacy_roundtrip, first_return, flow_boundary_probe, return_orbit_length, suspension_flow, Flow,
    PermutationSystem, ProductFlow, ProductSection, Section, SuspensionPoint, TruncatedSolenoid,
};
use proptest::prelude::*;

fn solenoid() -> TruncatedSolenoid {
    TruncatedSolenoid::new(4).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn solenoid_flow_law(x in 0.0..24.0f64, r in -30.0..30.0f64, s in -30.0..30.0f64) {
        let flow = solenoid();
        let p = flow.point(x);
        let twice = flow.flow(&flow.flow(&p, s).unwrap(), r).unwrap();
        let once = flow.flow(&p, r + s).unwrap();
        prop_assert!(flow.distance(&twice, &once) < 1e-12);
        prop_assert!(flow.is_consistent(&once, 1e-9));
    }

    #[test]
    fn solenoid_collapses_to_circle(x in 0.0..24.0f64, t in -50.0..50.0f64) {
        let flow = solenoid();
        let p = flow.point(x);
        prop_assert!((flow.to_circle(&p) - x).abs() < 1e-12);
        let moved = flow.to_circle(&flow.flow(&p, t).unwrap());
        let d = (moved - (x + t).rem_euclid(24.0)).abs();
        prop_assert!(d.min(24.0 - d) < 1e-12);
        prop_assert!(flow.distance(&flow.point(flow.to_circle(&p)), &p) < 1e-12);
    }

    #[test]
    fn sections_are_nested(k in 0i64..24, eps in -1e-3..1e-3f64) {
        let flow = solenoid();
        let p = flow.point(k as f64 + eps);
        for n in 2..=4 {
            if flow.in_section(&p, n, 1e-9).unwrap() {
                for m in 1..n {
                    prop_assert!(flow.in_section(&p, m, 1e-9).unwrap());
                }
            }
        }
    }

    #[test]
    fn suspension_flow_law(base in 0usize..10, h in 0.0..1.0f64, r in -7.0..7.0f64, s in -7.0..7.0f64) {
        let system = PermutationSystem::cyclic_product(5, 2).unwrap();
        let p = SuspensionPoint { base, height: h };
        let twice = suspension_flow(&system, &suspension_flow(&system, &p, s).unwrap(), r).unwrap();
        let once = suspension_flow(&system, &p, r + s).unwrap();
        let gap = (twice.height - once.height).abs();
        prop_assert!(
            (twice.base == once.base && gap < 1e-12) || (1.0 - gap < 1e-12),
            "{twice:?} {once:?}"
        );
    }
}

#[test]
fn section_returns_are_rotations() {
    let flow = solenoid();
    for n in 1..=3usize {
        let section = flow.section(n).unwrap();
        let period = flow.modulus(n);
        let p = flow.point(5.0 * period);
        let (t, q) = first_return(&flow, &section, &p, 2.0 * period).unwrap();
        assert_eq!(t, period);
        assert!((flow.to_circle(&q) - (6.0 * period).rem_euclid(24.0)).abs() < 1e-12);
        assert_eq!(return_orbit_length(&flow, &section, &p, 100).unwrap(), 24 / period as usize);
        assert!(flow_boundary_probe(&flow, &section, period / 8.0, 50).unwrap().pass);
    }
}

#[test]
fn product_extension_conjugacy() {
    let solenoid = solenoid();
    let flow = ProductFlow { inner: solenoid, fiber: 5 };
    let section = ProductSection::new(solenoid.section(2).unwrap());
    let samples: Vec<_> = (0..100)
        .map(|i| (section.sample(&flow, i, 100), (i as f64 * 0.37).fract()))
        .collect();
    let report = conjugacy_roundtrip(&flow, &section, &samples).unwrap();
    assert!(report.pass, "{report:?}");
    assert!(report.max_roundtrip_error < 1e-9);
}
