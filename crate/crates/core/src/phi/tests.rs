use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::quadrature;
use crate::signals::{eval_chi1_complex, translate};
use crate::theta::{derive_params, ParamInputs};

const TOL: f64 = EVAL_TOLERANCE;

fn defaults() -> &'static (EmbeddingParams, SpectralKernel) {
    static P: OnceLock<(EmbeddingParams, SpectralKernel)> = OnceLock::new();
    P.get_or_init(|| derive_params(ParamInputs::new(2.0, 0.8, 10.0, 10, 25, 1.02)).unwrap())
}

fn lemma_defaults() -> &'static (EmbeddingParams, SpectralKernel) {
    static P: OnceLock<(EmbeddingParams, SpectralKernel)> = OnceLock::new();
    P.get_or_init(|| {
        let (p, k) = defaults().clone();
        let m = theta::min_marker_gap(p.l, p.e, p.c);
        (theta::with_marker_gap(&p, m, theta::coverage_for_gap(m)), k)
    })
}

fn random_marker(seed: u64, lo: i64, hi: i64, m: i64, m1: i64) -> MarkerSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = BTreeMap::new();
    let mut n = lo + rng.gen_range(0..m);
    while n <= hi {
        values.insert(n, 1.0);
        n += rng.gen_range(m..2 * m1);
    }
    MarkerSequence::new(lo, hi, values, m, m1)
}

fn default_phi(seed: u64) -> PhiFunction {
    let (p, k) = defaults();
    PhiFunction::new(&random_marker(seed, -1800, 1800, p.m, p.m1), p, k, TOL).unwrap()
}

fn periodic_phi() -> PhiFunction {
    let (p, k) = defaults();
    let marker = MarkerSequence::periodic(&[(0, 1.0), (17, 1.0)], 40, -1800, 1800, p.m, p.m1);
    PhiFunction::new(&marker, p, k, TOL).unwrap()
}

fn toy(cells: &[(i64, Interval)]) -> PhiFunction {
    let (p, k) = defaults();
    PhiFunction::from_tiling(IntervalTiling::from_cells(cells, p.h), p, k, TOL).unwrap()
}

#[test]
fn domain_is_shrunk_by_truncation_radius() {
    let phi = default_phi(1);
    let (lo, hi) = phi.domain();
    let (sl, sr) = phi.tiling().valid_segment().unwrap();
    assert!(lo - sl >= phi.truncation_radius() && sr - hi >= phi.truncation_radius());
    assert!(lo < -200.0 && hi > 200.0);
    assert!(matches!(phi.eval(Complex64::new(hi + 1.0, 0.0)), Err(PhiError::Domain(_))));
    assert!(matches!(phi.eval(Complex64::new(0.0, 1.5)), Err(PhiError::Domain(_))));
    assert!(!phi.m2_condition());
}

#[test]
fn empty_tiling_is_zero() {
    let phi = toy(&[]);
    assert_eq!(phi.eval(Complex64::new(3.0, 0.5)).unwrap(), Complex64::new(0.0, 0.0));
    let g = g2(&phi).unwrap();
    assert_eq!(g.sup_norm(), 0.0);
    let report = spectral_support_report(&phi, 200.0).unwrap();
    assert_eq!(report.leakage, 0.0);
}

#[test]
fn single_cell_matches_direct_product() {
    let phi = toy(&[(0, Interval::new(-5.0, 5.0))]);
    let (p, k) = defaults();
    for z in [Complex64::new(0.3, 0.2), Complex64::new(2.0, 0.9), Complex64::new(-7.0, -0.5), Complex64::new(40.0, 1.0)] {
        let integral = quadrature::integrate(|t| eval_chi1_complex(k, z - t).unwrap(), -5.0, 5.0, 1e-12)
            .unwrap()
            .value;
        let expect = theta::theta(z, p.l, p.b) * integral;
        let got = phi.eval(z).unwrap();
        assert!((got - expect).norm() < TOL, "{z}: {got} vs {expect}");
    }
}

#[test]
fn engine_matches_reference_quadrature() {
    let phi = default_phi(3);
    for z in [Complex64::new(0.0, 0.0), Complex64::new(13.37, 0.6), Complex64::new(-101.2, -1.0)] {
        let a = phi.eval(z).unwrap();
        let b = phi.eval_quadrature(z).unwrap();
        assert!((a - b).norm() < TOL, "{z}: {a} vs {b}");
    }
}

#[test]
fn real_line_bounded_by_k1() {
    let phi = default_phi(4);
    let zs: Vec<Complex64> = (0..1000).map(|j| Complex64::new(-300.0 + 0.6 * j as f64, 0.0)).collect();
    let k1 = phi.params().k1;
    let sup = phi.eval_many(&zs).unwrap().iter().map(|v| v.norm()).fold(0.0, f64::max);
    assert!(sup <= k1 + TOL, "{sup} vs {k1}");
}

#[test]
fn equivariance_defects() {
    let grid: Vec<Complex64> = (0..100)
        .map(|j| Complex64::new(-150.0 + 3.0 * j as f64, -1.0 + 0.02 * j as f64))
        .collect();
    let periodic = periodic_phi();
    assert_eq!(equivariance_defect(&periodic, 0, &grid).unwrap(), 0.0);
    assert!(equivariance_defect(&periodic, 40, &grid).unwrap() < 2.0 * TOL);
    let phi = default_phi(5);
    for k in 1..=3 {
        let d = equivariance_defect(&phi, k, &grid).unwrap();
        assert!(d < 10.0 * TOL, "k = {k}: {d}");
    }
}

#[test]
fn spectrum_in_upper_band() {
    let phi = default_phi(6);
    let report = spectral_support_report(&phi, 200.0).unwrap();
    assert!(report.leakage < 1e-2, "{}", report.leakage);
    assert!(report.conjugate_leakage < 1e-2);
    assert!(report.bands_disjoint && report.pass);
    assert!(matches!(spectral_support_report(&phi, 99.0), Err(PhiError::Window(_))));
}

#[test]
fn theta_alone_has_lattice_zeros() {
    let (p, _) = defaults();
    let f = |z: Complex64| theta::theta(z, p.l, p.b);
    for m in -2..=2 {
        let c = Complex64::new(p.l * m as f64, 0.0);
        let w = winding_number(f, c, p.r1, zeros::WINDING_NODES);
        assert_eq!(w.value, 1);
        let z = newton(f, c + Complex64::new(0.3 * p.r1, 0.2 * p.r1), 1e-3 * p.r1, 1e-14, 50).unwrap();
        assert!((z - c).norm() < 1e-10);
    }
    let off = winding_number(f, Complex64::new(5.0, 0.0), p.r1, zeros::WINDING_NODES);
    assert_eq!(off.value, 0);
}

#[test]
fn single_long_cell_keeps_its_zeros() {
    let (p, _) = defaults();
    let phi = toy(&[(0, Interval::new(-p.e - 2.0, p.l + p.e + 2.0))]);
    let report = locate_zeros(&phi, (-1.0, p.l + 1.0)).unwrap();
    let centers: Vec<f64> = report.disks.iter().map(|d| d.center).collect();
    assert_eq!(centers, vec![0.0, p.l]);
    assert!(report.windings_one && report.zeros_confined);
    assert!(report.off_disk.pass, "{:?}", report.off_disk);
}

#[test]
fn lemma_regime_zeros_and_off_disk_bound() {
    let (p, k) = lemma_defaults();
    let marker = MarkerSequence::periodic(&[(0, 1.0)], p.m + 3, -5 * p.m1, 5 * p.m1, p.m, p.m1);
    let phi = PhiFunction::new(&marker, p, k, TOL).unwrap();
    assert!(phi.m2_condition());
    let boundary = phi.cells().iter().find(|(_, c)| c.l > phi.domain().0 + 1500.0).unwrap().1.l;
    let report = locate_zeros(&phi, (boundary - 1000.0, boundary + 1000.0)).unwrap();
    assert!(report.disks.len() >= 80);
    let bad: Vec<_> = report.disks.iter().filter(|d| d.winding.value != 1 || d.zero.is_none()).collect();
    assert!(bad.is_empty(), "{bad:?}");
    assert!(report.pass, "{:?}", report.off_disk);
    assert!(report.off_disk.skipped > 0);
}

#[test]
fn rigidity_of_identical_and_distinct_maps() {
    let phi = default_phi(7);
    let same = shift_rigidity_margin(&phi, &phi, 0.01, (-20.0, 20.0)).unwrap();
    assert!(same.distance_at_zero < 2.0 * TOL);
    assert!(same.margin > 0.0);
    let other = default_phi(8);
    let pair = shift_rigidity_margin(&phi, &other, 0.01, (-20.0, 20.0)).unwrap();
    assert!(pair.margin > 0.0);
    assert!(rigidity_shifts(phi.params().r1, 0.01).iter().all(|r| r.abs() > 2.0 * phi.params().r1));
}

#[test]
fn g2_scaling_and_equivariance() {
    let phi = default_phi(9);
    let p = phi.params();
    let g = g2(&phi).unwrap();
    assert!(g.sup_norm() <= p.delta / 2.0);
    assert!(g.in_b(p.a + p.delta, 0.0));
    let k = 3;
    let gs = g2(&phi.shifted(k).unwrap()).unwrap();
    let moved = translate(&g, k as f64).unwrap();
    let j = (gs.len() - moved.len()) / 2;
    let d = gs.trim(j).unwrap().max_abs_diff(&moved).unwrap();
    assert!(d < 10.0 * TOL, "{d}");
}

#[test]
fn perturb_zero_input() {
    let phi = default_phi(10);
    let p = phi.params().clone();
    let f = BandLimitedSignal::zero(40.0, 0.25, Band::symmetric(p.a / 2.0)).unwrap();
    let (g, report) = perturb_step(&f, &phi, &PerturbOptions::default()).unwrap();
    let g2v = g2_on(&phi, 40.0, 0.25).unwrap();
    assert_eq!(g.max_abs_diff(&g2v).unwrap(), 0.0);
    assert!(report.metric.value <= g2v.sup_norm() && report.metric.value < p.delta);
    assert!(report.resubtraction_error <= 1e-9);
    assert!(report.pass, "{report:?}");
}

#[test]
fn perturb_tone_with_partner() {
    let phi = default_phi(11);
    let p = phi.params().clone();
    let band = Band::symmetric(p.a / 2.0);
    let f = BandLimitedSignal::from_fn(40.0, 0.25, band, ValueKind::Real, |x| {
        Complex64::new(0.4 * (2.0 * std::f64::consts::PI * 0.3 * x).cos(), 0.0)
    })
    .unwrap();
    let (partner, _) = perturb_step(&f, &default_phi(12), &PerturbOptions::default()).unwrap();
    let options = PerturbOptions { partner: Some(partner), ..Default::default() };
    let (g, report) = perturb_step(&f, &phi, &options).unwrap();
    assert!(report.pass, "{report:?}");
    assert!(report.rigidity.unwrap().margin > 0.0);
    let back = g.sub(&g2_on(&phi, 40.0, 0.25).unwrap()).unwrap();
    assert!(back.max_abs_diff(&f).unwrap() < 1e-9);
}

#[test]
fn perturb_rejects_wide_input() {
    let phi = default_phi(13);
    let f = BandLimitedSignal::zero(40.0, 0.25, Band::symmetric(1.2)).unwrap();
    assert!(matches!(
        perturb_step(&f, &phi, &PerturbOptions::default()),
        Err(PhiError::Decomposition(_))
    ));
}

#[test]
fn ladder_values() {
    let l = ladder(2.0, 3);
    let deltas: Vec<f64> = l.iter().map(|s| s.delta).collect();
    assert_eq!(deltas, vec![0.125, 0.03125, 0.0078125]);
    let ls: Vec<f64> = l.iter().map(|s| s.l).collect();
    assert_eq!(ls, vec![64.0, 256.0, 1024.0]);
    for s in &l {
        assert!(s.l > 4.0 / s.delta);
        assert!(s.delta <= s.epsilon_next / 2.0);
    }
}

fn lemma_marker(_: &LadderStep, p: &EmbeddingParams, point: usize) -> Result<MarkerSequence, PhiError> {
    let offset = 7 * point as i64;
    Ok(MarkerSequence::periodic(&[(offset, 1.0)], p.m, -5 * p.m1, 5 * p.m1, p.m, p.m1))
}

#[test]
fn one_step_is_g2() {
    let config = IterationConfig { steps: 1, points: 2, ..Default::default() };
    let out = iterate_embedding(&config, lemma_marker).unwrap();
    let step = &out.report.steps[0];
    assert!(step.params.r1 < 0.125);
    let marker = lemma_marker(&step.ladder, &step.params, 1).unwrap();
    let kernel = crate::signals::make_chi1(step.params.delta, theta::KERNEL_TOLERANCE).unwrap();
    let phi = PhiFunction::new(&marker, &step.params, &kernel, TOL).unwrap();
    let expect = g2_on(&phi, config.window_radius, 0.25).unwrap();
    assert_eq!(out.maps[1][1].max_abs_diff(&expect).unwrap(), 0.0);
}

#[test]
fn three_steps_stay_on_the_ladder() {
    let config = IterationConfig { points: 2, ..Default::default() };
    let out = iterate_embedding(&config, lemma_marker).unwrap();
    let r = &out.report;
    assert_eq!(r.steps.len(), 3);
    for s in &r.steps {
        assert!(s.sup_distance <= s.ladder.delta / 2.0 + TOL);
        assert!(s.params.r1 < s.r_bound / 2.0);
    }
    assert!(r.partial_sums.last().unwrap() < &r.epsilon2);
    assert_eq!(r.cauchy.len(), 6);
    assert!(matches!(
        iterate_embedding(&IterationConfig { steps: 6, ..config }, lemma_marker),
        Err(PhiError::Params(_))
    ));
}
