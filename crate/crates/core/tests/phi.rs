use std::collections::BTreeMap;
use std::sync::OnceLock;

use flowembed_core::phi::{equivariance_defect, g2, PhiFunction};
use flowembed_core::signals::SpectralKernel;
use flowembed_core::theta::{derive_params, EmbeddingParams, ParamInputs};
use flowembed_core::tiling::MarkerSequence;
use flowembed_core::Complex64;
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn defaults() -> &'static (EmbeddingParams, SpectralKernel) {
    static P: OnceLock<(EmbeddingParams, SpectralKernel)> = OnceLock::new();
    P.get_or_init(|| derive_params(ParamInputs::new(2.0, 0.8, 10.0, 10, 25, 1.02)).unwrap())
}

fn marker(gaps: &[i64]) -> MarkerSequence {
    let mut values = BTreeMap::new();
    let mut n = -1800;
    let mut i = 0;
    while n <= 1800 {
        values.insert(n, 1.0);
        n += gaps[i % gaps.len()];
        i += 1;
    }
    MarkerSequence::new(-1800, 1800, values, 10, 25)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn bounded_equivariant_and_scaled(gaps in prop::collection::vec(10i64..50, 7..13), k in 1i64..4) {
        let (p, kernel) = defaults();
        let phi = PhiFunction::new(&marker(&gaps), p, kernel, TOL).unwrap();
        let (lo, hi) = phi.domain();
        let reals: Vec<Complex64> = (0..1000)
            .map(|i| Complex64::new(lo + 10.0 + (hi - lo - 20.0) * i as f64 / 999.0, 0.0))
            .collect();
        let sup = phi.eval_many(&reals).unwrap().iter().map(|v| v.norm()).fold(0.0, f64::max);
        prop_assert!(sup <= p.k1 + 2.0 * TOL);

        let grid: Vec<Complex64> = (0..100)
            .map(|i| Complex64::new(-150.0 + 3.0 * i as f64, -0.9 + 0.018 * i as f64))
            .collect();
        prop_assert!(equivariance_defect(&phi, k, &grid).unwrap() < 10.0 * TOL);

        let g = g2(&phi).unwrap();
        prop_assert!(g.sup_norm() <= p.delta / 2.0 + 1e-12);
    }
}
