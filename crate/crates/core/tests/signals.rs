use std::f64::consts::PI;

use flowembed_core::signals::{
    b1_to_real, fourier_leakage, metric_d, translate, Band, BandLimitedSignal, ValueKind,
};
use flowembed_core::Complex64;
use proptest::prelude::*;

fn tones(window: f64, band: Band, parts: &[(f64, f64, f64)]) -> BandLimitedSignal {
    let step = 1.0 / (4.0 * band.max_abs());
    BandLimitedSignal::from_fn(window, step, band, ValueKind::Complex, |x| {
        parts
            .iter()
            .map(|&(u, amp, phase)| {
                let freq = band.lo + (band.hi - band.lo) * (0.1 + 0.8 * u);
                Complex64::from_polar(amp, 2.0 * PI * freq * x + phase)
            })
            .sum()
    })
    .unwrap()
}

fn parts() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((0.0..1.0f64, 0.1..1.0f64, 0.0..6.3f64), 1..5)
}

fn common(a: &BandLimitedSignal, b: &BandLimitedSignal) -> (BandLimitedSignal, BandLimitedSignal) {
    let n = a.len().min(b.len());
    (a.trim((a.len() - n) / 2).unwrap(), b.trim((b.len() - n) / 2).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn translation_flow_law(p in parts(), r in -3.0..3.0f64, s in -3.0..3.0f64) {
        let f = tones(60.0, Band::symmetric(1.0), &p);
        let once = translate(&f, r + s).unwrap();
        let twice = translate(&translate(&f, s).unwrap(), r).unwrap();
        let (a, b) = common(&once, &twice);
        prop_assert!(a.max_abs_diff(&b).unwrap() < 1e-6);
    }

    #[test]
    fn translation_matches_closed_form(p in parts(), r in -3.0..3.0f64) {
        let band = Band::new(1.0, 1.4);
        let f = tones(60.0, band, &p);
        let moved = translate(&f, r).unwrap();
        let err = moved
            .positions()
            .zip(moved.samples())
            .map(|(x, v)| {
                let want: Complex64 = p
                    .iter()
                    .map(|&(u, amp, phase)| {
                        let freq = band.lo + (band.hi - band.lo) * (0.1 + 0.8 * u);
                        Complex64::from_polar(amp, 2.0 * PI * freq * (x + r) + phase)
                    })
                    .sum();
                (v - want).norm()
            })
            .fold(0.0, f64::max);
        prop_assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn metric_axioms(p in parts(), q in parts(), s in parts()) {
        let band = Band::symmetric(1.0);
        let (f, g, h) = (tones(25.0, band, &p), tones(25.0, band, &q), tones(25.0, band, &s));
        let fg = metric_d(&f, &g, 20).unwrap().value;
        let gf = metric_d(&g, &f, 20).unwrap().value;
        let gh = metric_d(&g, &h, 20).unwrap().value;
        let fh = metric_d(&f, &h, 20).unwrap().value;
        prop_assert_eq!(fg, gf);
        prop_assert!(fh <= fg + gh + 1e-12);
        prop_assert_eq!(metric_d(&f, &f, 20).unwrap().value, 0.0);
        if f.samples() != g.samples() {
            prop_assert!(fg > 0.0);
        }
    }

    #[test]
    fn realification_is_real_and_contracting(p in parts()) {
        let f = tones(60.0, Band::new(1.0, 1.4), &p);
        let g = b1_to_real(&f).unwrap();
        prop_assert!(g.samples().iter().all(|v| v.im == 0.0));
        prop_assert!(g.sup_norm() <= f.sup_norm());
        prop_assert_eq!(g.band(), Band::symmetric(1.4));
    }

    #[test]
    fn leakage_is_translation_invariant(p in parts(), r in -2.0..2.0f64) {
        let band = Band::new(1.0, 1.4);
        let f = tones(100.0, band, &p);
        let moved = translate(&f, r).unwrap();
        let j = (f.len() - moved.len()) / 2;
        let base = f.trim(j).unwrap();
        let diff = (fourier_leakage(&base, band) - fourier_leakage(&moved, band)).abs();
        prop_assert!(diff < 1e-6, "{diff}");
    }
}

#[test]
fn metric_matches_per_window_maximum() {
    let band = Band::symmetric(1.0);
    let f = tones(25.0, band, &[(0.2, 1.0, 0.0), (0.7, 0.5, 1.0)]);
    let g = tones(25.0, band, &[(0.4, 0.8, 2.0)]);
    let mut oracle = 0.0;
    for n in 1..=20u32 {
        let sup = f
            .positions()
            .zip(f.samples().iter().zip(g.samples()))
            .filter(|(x, _)| x.abs() <= n as f64 + 1e-9)
            .map(|(_, (a, b))| (a - b).norm())
            .fold(0.0, f64::max);
        oracle += sup / 2f64.powi(n as i32);
    }
    let d = metric_d(&f, &g, 20).unwrap();
    assert!((d.value - oracle).abs() < 1e-9);
}
