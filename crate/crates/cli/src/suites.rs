//! The eight verification suites run by `verify-all`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use flowembed_core::flows::{
    conjugacy_roundtrip, first_return, flow_boundary_probe, pairwise_separation, return_orbit_length,
    strong_embedding_probe, suspend_embedding, suspension_flow, DiscreteSystem, Flow, LinearTorusFlow,
    ProductFlow, ProductSection, ProductSystem, ReturnSystem, Section, SuspensionPoint, TorusSection,
    TruncatedSolenoid,
};
use flowembed_core::phi::{
    equivariance_defect, g2, iterate_embedding, locate_zeros, perturb_step, shift_rigidity_margin,
    spectral_support_report, IterationConfig, PerturbOptions, PhiError, PhiFunction, EVAL_TOLERANCE,
    LEAKAGE_THRESHOLD,
};
use flowembed_core::signals::{
    self, b1_to_real, default_step, fourier_leakage, Band, BandLimitedSignal, KernelTail,
    SpectralKernel, ValueKind,
};
use flowembed_core::theta::{
    certify_r1, coverage_for_gap, derive_params, min_marker_gap, theta_lower_bound, theta_sup_norm,
    validate_params, with_marker_gap, EmbeddingParams, ParamInputs, R1_POINTS_PER_RADIUS,
    THETA_GRID_STEP,
};
use flowembed_core::tiling::{
    build_tiling, check_geometry, coverage_report, m2, shift_equivariance_defect, Arithmetic, MarkerSequence,
};
use flowembed_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::CliError;
use crate::marker::random_marker;
use crate::report::{Check, Relation, SuiteReport, VerifyReport, SCHEMA_VERSION};

pub const SUITE_IDS: [u32; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

pub mod tol {
    pub const TILING_MISMATCH: f64 = 1e-9;
    pub const TILING_EQUIVARIANCE: f64 = 1e-12;
    pub const M2_REFERENCE: f64 = 0.1994;
    pub const M2_REFERENCE_TOL: f64 = 5e-5;
    pub const THETA_REFINEMENT: f64 = 0.05;
    pub const PHI_SUP_SLACK: f64 = 2e-9;
    pub const PHI_EQUIVARIANCE: f64 = 1e-8;
    pub const RESUBTRACTION: f64 = 1e-9;
    pub const CONJUGACY: f64 = 1e-9;
    pub const FLOW_LAW: f64 = 1e-12;
    pub const SUSPENSION_EQUIVARIANCE: f64 = 1e-6;
    pub const PROBE_THRESHOLD: f64 = 1e-4;
    pub const REAL_TONE: f64 = 1e-10;
}

/// Default showcase inputs.
pub const A: f64 = 2.0;
pub const DELTA: f64 = 0.8;
pub const L: f64 = 10.0;
pub const M: i64 = 10;
pub const M1: i64 = 25;
pub const C: f64 = 1.02;

/// Marker window of the default regime.
pub const PHI_WINDOW: (i64, i64) = (-1800, 1800);
pub const SPECTRUM_WINDOW: f64 = 200.0;
pub const RIGIDITY_STEP: f64 = 1e-3;
pub const RIGIDITY_WINDOW: (f64, f64) = (-20.0, 20.0);

/// Independent stream per suite and draw.
pub fn sub_seed(seed: u64, suite: u64, i: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (suite << 40) ^ i
}

pub fn default_params() -> Result<(EmbeddingParams, SpectralKernel), CliError> {
    Ok(derive_params(ParamInputs::new(A, DELTA, L, M, M1, C))?)
}

pub fn default_phi(seed: u64, params: &EmbeddingParams, kernel: &SpectralKernel) -> Result<PhiFunction, CliError> {
    let marker = random_marker(seed, PHI_WINDOW, params.m, params.m1)?;
    Ok(PhiFunction::new(&marker, params, kernel, EVAL_TOLERANCE)?)
}

/// Record whose marker gap satisfies the cell-length condition `M2 > 4L + E + 1`.
pub fn lemma_params(p: &EmbeddingParams) -> EmbeddingParams {
    let m = min_marker_gap(p.l, p.e, p.c);
    with_marker_gap(p, m, coverage_for_gap(m))
}

pub fn run_suite(id: u32, seed: u64) -> Result<SuiteReport, CliError> {
    match id {
        1 => tiling_suite(seed),
        2 => parameter_suite(),
        3 => phi_suite(seed),
        4 => rigidity_suite(seed),
        5 => perturbation_suite(seed),
        6 => flows_suite(),
        7 => suspension_suite(seed),
        8 => realification_suite(seed),
        _ => Err(CliError::Config(format!("no suite {id}; suites are 1..=8"))),
    }
}

pub fn verify_all(seed: u64, ids: &[u32]) -> Result<VerifyReport, CliError> {
    let suites = ids.iter().map(|id| run_suite(*id, seed)).collect::<Result<Vec<_>, _>>()?;
    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION,
        seed,
        pass: suites.iter().all(|s| s.pass),
        suites,
    })
}

fn max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn min(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::INFINITY, f64::min)
}

pub fn tiling_suite(seed: u64) -> Result<SuiteReport, CliError> {
    let mut report = SuiteReport::new(1, "tiling");
    let window = (-300, 299);
    let mut mismatch = 0.0f64;
    let mut defect = 0.0f64;
    let mut cells = 0;
    let mut sub_markers = 0;
    let mut min_length = f64::INFINITY;
    let (mut above_half, mut in_ball, mut long_enough) = (true, true, true);
    for i in 0..100 {
        let marker = random_marker(sub_seed(seed, 1, i), window, M, M1)?;
        sub_markers += marker.values.values().filter(|v| **v < 1.0).count();
        let tiling = build_tiling(&marker)?;
        let cov = coverage_report(&tiling);
        if cov.segment.is_none() {
            mismatch = f64::INFINITY;
        }
        mismatch = mismatch.max(cov.max_mismatch);
        cells += cov.cells;
        for k in 1..=3 {
            defect = defect.max(shift_equivariance_defect(&marker, k, Arithmetic::Float)?);
        }
        let geometry = check_geometry(&tiling, &marker, C)?;
        above_half &= geometry.value_above_half;
        in_ball &= geometry.inside_ball;
        long_enough &= geometry.long_enough;
        min_length = min_length.min(geometry.min_length);
    }
    let m2 = m2(M, M1, C);
    report.push(Check::new("endpoint mismatch on valid range", mismatch, Relation::Lt, tol::TILING_MISMATCH));
    report.push(Check::new("equivariance defect, k in 1..=3", defect, Relation::Lt, tol::TILING_EQUIVARIANCE));
    report.push(Check::flag("cells inside B_{M1+1}(n)", in_ball));
    report.push(Check::flag("site values above 1/2", above_half));
    report.push(Check::new("min cell length over 2 M2", min_length, Relation::Ge, 2.0 * m2));
    report.push(Check::flag("every cell at least 2 M2 long", long_enough));
    report.push(Check::new("|M2 - 0.1994|", (m2 - tol::M2_REFERENCE).abs(), Relation::Lt, tol::M2_REFERENCE_TOL));
    report.detail("markers", &100);
    report.detail("window", &window);
    report.detail("cells", &cells);
    report.detail("sub_markers", &sub_markers);
    report.detail("M2", &m2);
    Ok(report)
}

pub fn parameter_suite() -> Result<SuiteReport, CliError> {
    let mut report = SuiteReport::new(2, "parameters");
    let (p, kernel) = default_params()?;
    report.push(Check::new("r1 below min(1/16, 1/L)", p.r1, Relation::Lt, (1.0f64 / 16.0).min(1.0 / p.l)));
    let fine = certify_r1(p.l, p.b, p.r1, 10 * R1_POINTS_PER_RADIUS);
    report.push(Check::new(
        "disk inequality margin on the 10x grid",
        fine.min_lhs - fine.threshold - fine.required_margin,
        Relation::Gt,
        0.0,
    ));
    report.push(Check::new("theta_L", p.theta_l, Relation::Gt, 0.0));
    let refined = theta_lower_bound(p.l, p.b, p.r1, THETA_GRID_STEP / 4.0)?;
    let drift = (refined.value - p.theta_l).abs() / p.theta_l;
    report.push(Check::new("theta_L drift under 4x refinement", drift, Relation::Lt, tol::THETA_REFINEMENT));
    let tail = KernelTail::build(&kernel, 4);
    let lhs = theta_sup_norm(p.l, p.b) * tail.tail(p.e);
    report.push(Check::new("tail inequality at E, 4x quadrature", lhs, Relation::Lt, p.theta_l / 2.0));

    let default_report = validate_params(&p);
    let failing: Vec<&str> = default_report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    let scaled = lemma_params(&p);
    let scaled_report = validate_params(&scaled);
    report.push(Check::flag("validate_params on the scaled fixture", scaled_report.pass));
    if let Some(c) = scaled_report.check("M2 > 4L + E + 1") {
        report.push(Check::new("M2 - (4L + E + 1) on the scaled fixture", c.margin, Relation::Gt, 0.0));
    }
    report.detail("params", &p);
    report.detail("r1_certificate_10x", &fine);
    report.detail("theta_refined", &refined);
    report.detail("default_record_failures", &failing);
    report.detail("scaled_fixture", &scaled);
    report.detail("scaled_checks", &scaled_report.checks);
    Ok(report)
}

#[derive(Debug, Serialize)]
struct ZeroSummary {
    seed: u64,
    range: (f64, f64),
    disks: usize,
    not_winding_once: usize,
    off_disk_points: usize,
    off_disk_min: f64,
    threshold: f64,
}

/// Zero placement needs `Int_{E+1}` of a cell to be nonempty, which the
/// default gap `M` never allows; those checks run on the scaled record.
pub fn phi_suite(seed: u64) -> Result<SuiteReport, CliError> {
    let mut report = SuiteReport::new(3, "phi");
    let (p, kernel) = default_params()?;
    let mut sup = 0.0f64;
    let mut defect = 0.0f64;
    let mut leakage = 0.0f64;
    let mut default_disks = 0;
    for i in 0..3 {
        let phi = default_phi(sub_seed(seed, 3, i), &p, &kernel)?;
        let (lo, hi) = phi.domain();
        let reals: Vec<Complex64> = (0..1000)
            .map(|j| Complex64::new(lo + (hi - lo) * j as f64 / 999.0, 0.0))
            .collect();
        sup = sup.max(max(phi.eval_many(&reals)?.iter().map(|v| v.norm())));
        let grid: Vec<Complex64> = (0..100)
            .map(|j| {
                let u = j as f64 / 99.0;
                Complex64::new(lo + 4.0 + (hi - lo - 8.0) * u, (2.0 * u - 1.0) * 0.95 * ((7 * j % 13) as f64 / 12.0))
            })
            .collect();
        for k in 1..=3 {
            defect = defect.max(equivariance_defect(&phi, k, &grid)?);
        }
        leakage = leakage.max(spectral_support_report(&phi, SPECTRUM_WINDOW)?.leakage);
        default_disks += locate_zeros(&phi, (-100.0, 100.0))?.disks.len();
    }
    report.push(Check::new("sup |Phi| on 1000 real points", sup, Relation::Le, p.k1 + tol::PHI_SUP_SLACK));
    report.push(Check::new("equivariance defect, k in 1..=3", defect, Relation::Lt, tol::PHI_EQUIVARIANCE));
    report.push(Check::new("leakage outside (a/2, a/2 + delta/2)", leakage, Relation::Lt, LEAKAGE_THRESHOLD));

    let lp = lemma_params(&p);
    let mut zeros = Vec::new();
    for i in 0..3 {
        let s = sub_seed(seed, 3, 100 + i);
        let marker = random_marker(s, (-5 * lp.m1, 5 * lp.m1), lp.m, lp.m1)?;
        let phi = PhiFunction::new(&marker, &lp, &kernel, EVAL_TOLERANCE)?;
        let (lo, _) = phi.domain();
        let boundary = phi
            .cells()
            .iter()
            .find(|(_, c)| c.l > lo + 1500.0)
            .ok_or_else(|| PhiError::Window("no cell boundary inside the domain".into()))?
            .1
            .l;
        let range = (boundary - 1000.0, boundary + 1000.0);
        let z = locate_zeros(&phi, range)?;
        zeros.push(ZeroSummary {
            seed: s,
            range,
            disks: z.disks.len(),
            not_winding_once: z.disks.iter().filter(|d| d.winding.value != 1).count(),
            off_disk_points: z.off_disk.points,
            off_disk_min: z.off_disk.min_modulus,
            threshold: z.off_disk.threshold,
        });
        report.push(Check::flag(format!("zeros confined to the disks, marker {i}"), z.zeros_confined));
    }
    report.push(Check::new("disks examined", zeros.iter().map(|z| z.disks).sum::<usize>() as f64, Relation::Gt, 0.0));
    report.push(Check::new(
        "disks not winding once",
        zeros.iter().map(|z| z.not_winding_once).sum::<usize>() as f64,
        Relation::Eq,
        0.0,
    ));
    report.push(Check::new(
        "min off-disk |Phi|",
        min(zeros.iter().map(|z| z.off_disk_min)),
        Relation::Ge,
        lp.theta_l / 2.0,
    ));
    report.detail("default_regime_disks", &default_disks);
    report.detail("scaled_record", &lp);
    report.detail("zeros", &zeros);
    Ok(report)
}

#[derive(Debug, Serialize)]
struct RigidityPair {
    seeds: (u64, u64),
    margin: f64,
    argmin_r: f64,
    shifts: usize,
}

pub fn rigidity_suite(seed: u64) -> Result<SuiteReport, CliError> {
    let mut report = SuiteReport::new(4, "rigidity");
    let (p, kernel) = default_params()?;
    let mut pairs = Vec::new();
    for i in 0..3 {
        let seeds = (sub_seed(seed, 4, 2 * i), sub_seed(seed, 4, 2 * i + 1));
        let x = default_phi(seeds.0, &p, &kernel)?;
        let y = default_phi(seeds.1, &p, &kernel)?;
        let r = shift_rigidity_margin(&x, &y, RIGIDITY_STEP, RIGIDITY_WINDOW)?;
        report.push(Check::new(format!("rigidity margin, pair {i}"), r.margin, Relation::Gt, 0.0));
        pairs.push(RigidityPair { seeds, margin: r.margin, argmin_r: r.argmin_r, shifts: r.shifts });
    }
    report.detail("pairs", &pairs);
    report.detail("r_range", &(2.0 * p.r1 + RIGIDITY_STEP, 0.5));
    report.detail("window", &RIGIDITY_WINDOW);
    Ok(report)
}

/// A real trigonometric sum with frequencies in `(-a/2, a/2)` and sup at most 1.
pub fn random_b_signal(seed: u64, a: f64, window: f64, step: f64) -> Result<BandLimitedSignal, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| (rng.gen_range(0.0..0.45 * a), rng.gen_range(0.0..1.0 / 3.0), rng.gen_range(0.0..2.0 * PI)))
        .collect();
    Ok(BandLimitedSignal::from_fn(window, step, Band::symmetric(a / 2.0), ValueKind::Real, |x| {
        Complex64::new(terms.iter().map(|(f, amp, ph)| amp * (2.0 * PI * f * x + ph).cos()).sum(), 0.0)
    })?)
}

pub fn perturbation_suite(seed: u64) -> Result<SuiteReport, CliError> {
    let mut report = SuiteReport::new(5, "perturbation");
    let (p, kernel) = default_params()?;
    let phi = default_phi(sub_seed(seed, 5, 0), &p, &kernel)?;
    let mut metric = 0.0f64;
    let mut resub = 0.0f64;
    let mut all_pass = true;
    let mut reports = Vec::new();
    for i in 0..10 {
        let f = random_b_signal(sub_seed(seed, 5, 1 + i), p.a, 40.0, 0.25)?;
        let (_, r) = perturb_step(&f, &phi, &PerturbOptions::default())?;
        metric = metric.max(r.metric.value);
        resub = resub.max(r.resubtraction_error);
        all_pass &= r.pass;
        reports.push(r);
    }
    report.push(Check::new("max metric_d(g, f), depth 20", metric, Relation::Lt, p.delta));
    report.push(Check::new("max |g - g1 - g2|", resub, Relation::Lt, tol::RESUBTRACTION));
    report.push(Check::flag("perturbation reports pass", all_pass));

    let config = IterationConfig::default();
    let base = sub_seed(seed, 5, 1000);
    let outcome = iterate_embedding(&config, |step, params, point| {
        let s = base ^ ((step.n as u64) << 16) ^ point as u64;
        random_marker(s, (-5 * params.m1, 5 * params.m1), params.m, params.m1)
            .map_err(|e| PhiError::Iteration { step: step.n, reason: e.to_string() })
    })?;
    for s in &outcome.report.steps {
        report.push(Check::new(
            format!("step {} sup distance below delta_n", s.ladder.n),
            s.sup_distance,
            Relation::Lt,
            s.ladder.delta,
        ));
    }
    let total = outcome.report.partial_sums.last().copied().unwrap_or(0.0);
    report.push(Check::new("summed step distances below epsilon_2", total, Relation::Lt, outcome.report.epsilon2));
    report.push(Check::flag("iteration report passes", outcome.report.pass));
    report.detail("perturb", &reports);
    report.detail("iteration", &outcome.report);
    Ok(report)
}

pub fn flows_suite() -> Result<SuiteReport, CliError> {
    let mut report = SuiteReport::new(6, "flows");
    let solenoid = TruncatedSolenoid::new(4)?;
    let mut law = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let p = solenoid.point(rng.gen_range(0.0..24.0));
        let (r, s) = (rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
        let twice = solenoid.flow(&solenoid.flow(&p, s)?, r)?;
        law = law.max(solenoid.distance(&twice, &solenoid.flow(&p, r + s)?));
    }
    report.push(Check::new("solenoid flow law", law, Relation::Lt, tol::FLOW_LAW));

    let s2 = solenoid.section(2)?;
    let start = solenoid.point(0.0);
    let (t, _) = first_return(&solenoid, &s2, &start, 4.0)?;
    report.push(Check::new("first return time to S_2", t, Relation::Eq, 2.0));
    let orbit = return_orbit_length(&solenoid, &s2, &start, 100)?;
    report.push(Check::new("return orbit length on S_2", orbit as f64, Relation::Eq, 12.0));

    let samples: Vec<_> = (0..100).map(|i| (s2.sample(&solenoid, i, 100), (i as f64 * 0.37).fract())).collect();
    let conj = conjugacy_roundtrip(&solenoid, &s2, &samples)?;
    let product = ProductFlow { inner: solenoid, fiber: 5 };
    let ps = ProductSection::new(s2.clone());
    let psamples: Vec<_> = (0..100).map(|i| (ps.sample(&product, i, 100), (i as f64 * 0.37).fract())).collect();
    let pconj = conjugacy_roundtrip(&product, &ps, &psamples)?;
    let worst = |c: &flowembed_core::flows::ConjugacyReport| {
        c.max_roundtrip_error.max(max(c.equivariance.iter().map(|e| e.1)))
    };
    report.push(Check::new("solenoid conjugacy error", worst(&conj), Relation::Lt, tol::CONJUGACY));
    report.push(Check::new("Y x K5 conjugacy error", worst(&pconj), Relation::Lt, tol::CONJUGACY));

    let mut probes = Vec::new();
    for n in 1..=4 {
        let section = solenoid.section(n)?;
        let probe = flow_boundary_probe(&solenoid, &section, section.data().eta / 2.0, 100)?;
        report.push(Check::new(format!("boundary probe pass fraction on S_{n}"), probe.fraction, Relation::Eq, 1.0));
        probes.push(probe);
    }
    let torus = LinearTorusFlow { slope: (5f64.sqrt() - 1.0) / 2.0 };
    let clipped = TorusSection::clipped(0.0, 0.5);
    let probe = flow_boundary_probe(&torus, &clipped, 0.2, 101)?;
    report.push(Check::flag("clipped fixture fails at both edges", {
        probe.failures.contains(&0) && probe.failures.contains(&100)
    }));
    report.push(Check::new("clipped fixture pass fraction", probe.fraction, Relation::Lt, 1.0));
    probes.push(probe);
    report.detail("conjugacy", &[conj, pconj]);
    report.detail("probes", &probes);
    Ok(report)
}

/// Fiber patterns of period 24 with pairwise distinct tilings up to translation.
pub const FIBER_PATTERNS: [&[(i64, f64)]; 5] = [
    &[(0, 1.0)],
    &[(0, 1.0), (12, 1.0)],
    &[(0, 1.0), (10, 1.0)],
    &[(0, 1.0), (11, 1.0)],
    &[(0, 1.0), (12, 0.9609375)],
];

type Base = ProductSystem<ReturnSystem<flowembed_core::flows::SolenoidPoint>>;

/// The S_1 return system of the depth-4 solenoid times five fiber symbols, and
/// `h(j, k) = g2` of the map built from fiber pattern `k` shifted by `j`.
pub fn suspension_fixture(fiber: usize) -> Result<(Base, Vec<Vec<BandLimitedSignal>>), CliError> {
    let solenoid = TruncatedSolenoid::new(4)?;
    let section = solenoid.section(1)?;
    let base = ReturnSystem::from_orbit(&solenoid, &section, &solenoid.point(0.0), 64)?;
    let period = base.len() as i64;
    let (p, kernel) = default_params()?;
    let mut table = Vec::new();
    for pattern in FIBER_PATTERNS.iter().take(fiber) {
        let marker = MarkerSequence::periodic(pattern, period, PHI_WINDOW.0, PHI_WINDOW.1, p.m, p.m1);
        let phi = PhiFunction::new(&marker, &p, &kernel, EVAL_TOLERANCE)?;
        let row = (0..period)
            .map(|j| Ok(g2(&phi.shifted(j)?)?))
            .collect::<Result<Vec<_>, CliError>>()?;
        table.push(row);
    }
    Ok((ProductSystem { base, fiber }, table))
}

pub fn suspension_suite(seed: u64) -> Result<SuiteReport, CliError> {
    suspension_embedding_report(seed, FIBER_PATTERNS.len())
}

/// Two-path equivariance, pairwise separation and the strong-embedding probe
/// for the fixture with `fiber` symbols.
pub fn suspension_embedding_report(seed: u64, fiber: usize) -> Result<SuiteReport, CliError> {
    if fiber == 0 || fiber > FIBER_PATTERNS.len() {
        return Err(CliError::Config(format!("fiber must lie in 1..={}", FIBER_PATTERNS.len())));
    }
    let mut report = SuiteReport::new(7, "suspension embedding");
    let (system, table) = suspension_fixture(fiber)?;
    let h = |s: &(usize, usize)| table[s.1][s.0].clone();
    let states: Vec<(usize, usize)> = (0..system.fiber).flat_map(|k| (0..24).map(move |j| (j, k))).collect();

    let mut two_path = 0.0f64;
    for s in &states {
        for t in [0.25, 0.5] {
            let p = SuspensionPoint { base: *s, height: t };
            let hp = suspend_embedding(&system, h, &p)?;
            for tau in [1.0 - t, 0.3, 1.7] {
                let moved = suspension_flow(&system, &p, tau)?;
                let lhs = suspend_embedding(&system, h, &moved)?;
                let rhs = signals::translate(&hp, tau)?;
                let (a, b) = signals::common_window(&lhs, &rhs)?;
                two_path = two_path.max(a.max_abs_diff(&b)?);
            }
        }
    }
    report.push(Check::new("h_f equivariance two-path error", two_path, Relation::Lt, tol::SUSPENSION_EQUIVARIANCE));

    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, 7, 0));
    let mut samples: Vec<SuspensionPoint<(usize, usize)>> = Vec::new();
    while samples.len() < 50 {
        let p = SuspensionPoint {
            base: states[rng.gen_range(0..states.len())],
            height: rng.gen_range(0..64) as f64 / 64.0,
        };
        if !samples.contains(&p) {
            samples.push(p);
        }
    }
    let sep = pairwise_separation(&system, h, &samples, 20, 0.0)?;
    report.push(Check::new("min pairwise metric_d over 50 samples", sep.min_distance, Relation::Gt, 0.0));

    let mut pairs = Vec::new();
    for i in 0..6 {
        let x = states[rng.gen_range(0..states.len())];
        let m: i64 = [0, 1, 2, -3, 4, -4][i];
        let mut y = x;
        for _ in 0..m.unsigned_abs() {
            y = if m > 0 { system.step(&y) } else { system.inverse(&y).expect("cyclic base") };
        }
        pairs.push((x, y));
        if system.fiber > 1 {
            let mut z = states[rng.gen_range(0..states.len())];
            while z.1 == x.1 {
                z = states[rng.gen_range(0..states.len())];
            }
            pairs.push((x, z));
        }
    }
    let probe = strong_embedding_probe(&system, h, &pairs, 4.0, 0.01, tol::PROBE_THRESHOLD)?;
    let flags: usize = probe.pairs.iter().map(|p| p.flags.len()).sum();
    let stray = probe.pairs.iter().flat_map(|p| &p.flags).filter(|f| f.orbit_offset.is_none()).count();
    let missing: usize = probe.pairs.iter().map(|p| p.missing.len()).sum();
    report.push(Check::new("flags off integer orbit offsets", stray as f64, Relation::Eq, 0.0));
    report.push(Check::new("orbit offsets without a flag", missing as f64, Relation::Eq, 0.0));
    report.push(Check::new("flagged shifts", flags as f64, Relation::Gt, 0.0));
    let off_orbit = min(probe.pairs.iter().filter(|p| p.offsets.is_empty()).map(|p| p.min_distance));
    report.detail("states", &states.len());
    report.detail("off_orbit_min_distance", &off_orbit);
    report.detail("separation", &sep);
    report.detail("probe", &probe);
    Ok(report)
}

pub fn realification_suite(seed: u64) -> Result<SuiteReport, CliError> {
    let mut report = SuiteReport::new(8, "realification");
    let (p, kernel) = default_params()?;
    let mut imag = 0.0f64;
    let mut ratio = 0.0f64;
    let mut leakage = 0.0f64;
    let mut cases = BTreeMap::new();
    for i in 0..3 {
        let phi = default_phi(sub_seed(seed, 8, i), &p, &kernel)?;
        let f = phi.sample(SPECTRUM_WINDOW, default_step(phi.band()))?;
        let g = b1_to_real(&f)?;
        imag = imag.max(max(g.samples().iter().map(|v| v.im.abs())));
        ratio = ratio.max(g.sup_norm() / f.sup_norm());
        let l = fourier_leakage(&g, g.band());
        leakage = leakage.max(l);
        cases.insert(format!("marker {i}"), (f.sup_norm(), g.sup_norm(), l));
    }
    report.push(Check::new("max |Im| of the realified signal", imag, Relation::Eq, 0.0));
    report.push(Check::new("sup ratio output / input", ratio, Relation::Le, 1.0));
    report.push(Check::new("leakage outside [-b, b]", leakage, Relation::Lt, LEAKAGE_THRESHOLD));

    let band = Band::new(p.a / 2.0, p.a / 2.0 + p.delta / 2.0);
    let freq = 1.2;
    let tone = BandLimitedSignal::tone(50.0, freq, band)?;
    let real = b1_to_real(&tone)?;
    let err = max(
        real.positions()
            .zip(real.samples())
            .map(|(x, v)| (v - Complex64::new((2.0 * PI * freq * x).cos(), 0.0)).norm()),
    );
    report.push(Check::new("pure tone against cos", err, Relation::Lt, tol::REAL_TONE));
    report.detail("cases", &cases);
    Ok(report)
}
