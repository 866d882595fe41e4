//! Dispatch of the subcommands to the core operations.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use flowembed_core::flows::{
    conjugacy_roundtrip, first_return, first_return_search, flow_boundary_probe, return_orbit_length,
    BaseSection, DiscreteSystem, Flow, FlowError, PermutationSystem, ProductFlow, ProductSection, Section,
    SolenoidPoint, Suspension, SuspensionPoint, TruncatedSolenoid,
};
use flowembed_core::phi::{
    equivariance_defect, locate_zeros, perturb_step, rigidity_shifts, shift_rigidity_margin,
    spectral_support_report, PerturbOptions, PhiFunction, EVAL_TOLERANCE,
};
use flowembed_core::signals::make_chi1;
use flowembed_core::theta::{derive_params, validate_params, EmbeddingParams, ParamInputs, KERNEL_TOLERANCE};
use flowembed_core::tiling::{
    build_tiling, check_geometry, coverage_report, shift_equivariance_defect, Arithmetic, MarkerSequence,
};
use flowembed_core::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::args::{Command, FlowAction, FlowArgs, MarkerSource, ParamsArgs, PhiAction, PhiArgs, TileArgs, VerifyArgs};
use crate::error::CliError;
use crate::marker::random_marker;
use crate::plot;
use crate::report::{self, Check, CommandReport, Relation, VerifyReport};
use crate::suites::{self, SUITE_IDS};

/// Runs one command; `Ok(false)` when a check failed.
pub fn run(command: Command) -> Result<bool, CliError> {
    match command {
        Command::Params(a) => params(a),
        Command::Tile(a) => tile(a),
        Command::Phi(a) => phi(a),
        Command::Flow(a) => flow(a),
        Command::VerifyAll(a) => verify_all(a),
    }
}

fn emit<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), CliError> {
    match out {
        Some(path) => report::write_json(path, value),
        None => {
            print!("{}", report::to_json(value));
            Ok(())
        }
    }
}

fn params(a: ParamsArgs) -> Result<bool, CliError> {
    let (p, _) = derive_params(ParamInputs::new(a.a, a.delta, a.l, a.m, a.m1, a.c))?;
    if !a.validate {
        emit(a.out.as_deref(), &p)?;
        return Ok(true);
    }
    let checks = validate_params(&p)
        .checks
        .into_iter()
        .map(|c| Check::flag(c.name, c.pass))
        .collect();
    let report = CommandReport::new("params", &p, checks);
    emit(a.out.as_deref(), &report)?;
    Ok(report.pass)
}

fn load_marker(source: &MarkerSource) -> Result<MarkerSequence, CliError> {
    match (&source.marker, source.seed) {
        (Some(path), _) => {
            let marker: MarkerSequence = report::read_json(path)?;
            marker.validate()?;
            Ok(marker)
        }
        (None, Some(seed)) => {
            let window = match source.window.as_deref() {
                Some([lo, hi]) => (*lo, *hi),
                Some(_) => return Err(CliError::Config("--window takes two integers".into())),
                None => suites::PHI_WINDOW,
            };
            random_marker(seed, window, source.m, source.m1)
        }
        (None, None) => Err(CliError::Config("one of --marker or --seed is required".into())),
    }
}

fn tile(a: TileArgs) -> Result<bool, CliError> {
    let marker = load_marker(&a.source)?;
    let tiling = build_tiling(&marker)?;
    emit(a.out.as_deref(), &tiling)?;
    let mut pass = true;
    if let Some(path) = &a.report {
        let cov = coverage_report(&tiling);
        let geometry = check_geometry(&tiling, &marker, a.c)?;
        let mut checks = vec![
            Check::new("endpoint mismatch", cov.max_mismatch, Relation::Lt, suites::tol::TILING_MISMATCH),
            Check::flag("cells inside B_{M1+1}(n)", geometry.inside_ball),
            Check::flag("site values above 1/2", geometry.value_above_half),
            Check::new("min cell length", geometry.min_length, Relation::Ge, 2.0 * geometry.m2),
        ];
        for k in 1..=3 {
            let d = shift_equivariance_defect(&marker, k, Arithmetic::Float)?;
            checks.push(Check::new(format!("equivariance defect, k = {k}"), d, Relation::Lt, suites::tol::TILING_EQUIVARIANCE));
        }
        let result = json!({ "coverage": cov, "geometry": geometry });
        let report = CommandReport::new("tile", &result, checks);
        report::write_json(path, &report)?;
        pass = report.pass;
    }
    if let Some(path) = &a.plot {
        let span = tiling.valid_segment().unwrap_or((marker.lo as f64, marker.hi as f64));
        let width = (span.1 - span.0).min(300.0);
        let mid = 0.5 * (span.0 + span.1);
        plot::tiling_diagram(&tiling, (mid - width / 2.0, mid + width / 2.0), path)?;
    }
    Ok(pass)
}

fn load_params(path: Option<&Path>) -> Result<EmbeddingParams, CliError> {
    match path {
        Some(p) => report::read_json(p),
        None => Ok(suites::default_params()?.0),
    }
}

fn second_marker(a: &PhiArgs, first: &MarkerSequence) -> Result<Option<MarkerSequence>, CliError> {
    let source = MarkerSource {
        marker: a.marker2.clone(),
        seed: a.seed2,
        window: Some(vec![first.lo, first.hi]),
        m: first.m,
        m1: first.m1,
    };
    if source.marker.is_none() && source.seed.is_none() {
        return Ok(None);
    }
    load_marker(&source).map(Some)
}

fn range_or(a: &PhiArgs, phi: &PhiFunction) -> Result<(f64, f64), CliError> {
    match a.range.as_deref() {
        Some([lo, hi]) => Ok((*lo, *hi)),
        Some(_) => Err(CliError::Config("--range takes two numbers".into())),
        None => {
            let w = phi.standard_window();
            Ok((-w, w))
        }
    }
}

fn phi(a: PhiArgs) -> Result<bool, CliError> {
    let params = load_params(a.params.as_deref())?;
    let kernel = make_chi1(params.delta, KERNEL_TOLERANCE)?;
    let marker = load_marker(&a.source)?;
    let phi = PhiFunction::new(&marker, &params, &kernel, EVAL_TOLERANCE)?;
    let report = match a.action {
        PhiAction::Eval => {
            let (lo, hi) = range_or(&a, &phi)?;
            let n = a.points.max(2);
            let zs: Vec<Complex64> = (0..n).map(|i| Complex64::new(lo + (hi - lo) * i as f64 / (n - 1) as f64, 0.0)).collect();
            let values = phi.eval_many(&zs)?;
            let sup = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let mut checks = vec![Check::new("sup |Phi|", sup, Relation::Le, params.k1 + 2.0 * EVAL_TOLERANCE)];
            let inner: Vec<Complex64> = zs.iter().filter(|z| phi.in_domain(*z + 3.0) && phi.in_domain(*z - 3.0)).copied().collect();
            for k in 1..=3 {
                let d = equivariance_defect(&phi, k, &inner)?;
                checks.push(Check::new(format!("equivariance defect, k = {k}"), d, Relation::Lt, 10.0 * EVAL_TOLERANCE));
            }
            let grid: Vec<(f64, f64, f64)> = zs.iter().zip(&values).map(|(z, v)| (z.re, v.re, v.im)).collect();
            CommandReport::new("phi eval", &json!({ "domain": phi.domain(), "grid": grid }), checks)
        }
        PhiAction::Zeros => {
            let range = range_or(&a, &phi)?;
            let z = locate_zeros(&phi, range)?;
            let checks = vec![
                Check::new("disks not winding once", z.disks.iter().filter(|d| d.winding.value != 1).count() as f64, Relation::Eq, 0.0),
                Check::new("min off-disk |Phi|", z.off_disk.min_modulus, Relation::Ge, z.off_disk.threshold),
                Check::flag("zeros confined to the disks", z.zeros_confined),
            ];
            CommandReport::new("phi zeros", &z, checks)
        }
        PhiAction::Rigidity => {
            let other = second_marker(&a, &marker)?
                .ok_or_else(|| CliError::Config("rigidity needs --marker2 or --seed2".into()))?;
            let psi = PhiFunction::new(&other, &params, &kernel, EVAL_TOLERANCE)?;
            let window = (-20.0, 20.0);
            let r = shift_rigidity_margin(&phi, &psi, a.r_step, window)?;
            if let Some(dir) = &a.plot {
                fs::create_dir_all(dir).map_err(|e| report::io_error(dir, e))?;
                let shifts: Vec<f64> = (-500..=500).map(|i| i as f64 * 1e-3).collect();
                let curve = plot::shift_distances(&phi, &psi, window, &shifts)?;
                plot::rigidity_curve(&curve, 2.0 * params.r1, &plot::figure_path(dir, "rigidity"))?;
            }
            let checks = vec![Check::new("rigidity margin", r.margin, Relation::Gt, 0.0)];
            CommandReport::new("phi rigidity", &r, checks)
        }
        PhiAction::Spectrum => {
            let s = spectral_support_report(&phi, a.window_radius)?;
            let checks = vec![
                Check::new("leakage", s.leakage, Relation::Lt, s.threshold),
                Check::new("conjugate leakage", s.conjugate_leakage, Relation::Lt, s.threshold),
            ];
            CommandReport::new("phi spectrum", &s, checks)
        }
        PhiAction::Perturb => {
            let f = suites::random_b_signal(a.source.seed.unwrap_or(7) ^ 0x5eed, params.a, 40.0, 0.25)?;
            let partner = match second_marker(&a, &marker)? {
                Some(m) => {
                    let psi = PhiFunction::new(&m, &params, &kernel, EVAL_TOLERANCE)?;
                    Some(perturb_step(&f, &psi, &PerturbOptions::default())?.0)
                }
                None => None,
            };
            let (_, r) = perturb_step(&f, &phi, &PerturbOptions { partner, ..Default::default() })?;
            let checks = vec![
                Check::new("metric_d(g, f)", r.metric.value, Relation::Lt, r.delta),
                Check::new("|g - g1 - g2|", r.resubtraction_error, Relation::Lt, suites::tol::RESUBTRACTION),
                Check::flag("perturbation report", r.pass),
            ];
            CommandReport::new("phi perturb", &r, checks)
        }
    };
    if let Some(dir) = &a.plot {
        fs::create_dir_all(dir).map_err(|e| report::io_error(dir, e))?;
        let w = phi.standard_window().min(30.0);
        plot::phi_heatmap(&phi, (-w, w), &plot::figure_path(dir, "phi_heatmap"))?;
        if phi.standard_window() >= 4.0 * params.m1 as f64 {
            plot::spectrum(&phi, phi.standard_window(), &plot::figure_path(dir, "spectrum"))?;
        }
        plot::tiling_diagram(phi.tiling(), (-w * 3.0, w * 3.0), &plot::figure_path(dir, "tiling"))?;
    }
    emit(a.out.as_deref(), &report)?;
    Ok(report.pass)
}

/// Registered systems of the `--system` flag.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemSpec {
    Solenoid(usize),
    Product(usize, usize),
    Suspension(PathBuf),
}

impl std::str::FromStr for SystemSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::Config(format!("unknown system {s:?}; use solenoid:N, product:N:k or suspension:FILE"));
        let mut parts = s.splitn(2, ':');
        let kind = parts.next().ok_or_else(bad)?;
        let rest = parts.next().ok_or_else(bad)?;
        match kind {
            "solenoid" => Ok(SystemSpec::Solenoid(rest.parse().map_err(|_| bad())?)),
            "product" => {
                let (n, k) = rest.split_once(':').ok_or_else(bad)?;
                Ok(SystemSpec::Product(n.parse().map_err(|_| bad())?, k.parse().map_err(|_| bad())?))
            }
            "suspension" => Ok(SystemSpec::Suspension(PathBuf::from(rest))),
            _ => Err(bad()),
        }
    }
}

/// A finite permutation with a roof value per state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuspensionFile {
    pub perm: Vec<usize>,
    pub roof: Vec<f64>,
}

trait Coordinates {
    fn header(&self) -> String;
    fn row(&self) -> String;
}

impl Coordinates for SolenoidPoint {
    fn header(&self) -> String {
        (1..=self.coords.len()).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",")
    }

    fn row(&self) -> String {
        self.coords.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
    }
}

impl Coordinates for (SolenoidPoint, usize) {
    fn header(&self) -> String {
        format!("{},fiber", self.0.header())
    }

    fn row(&self) -> String {
        format!("{},{}", self.0.row(), self.1)
    }
}

impl Coordinates for SuspensionPoint<usize> {
    fn header(&self) -> String {
        "base,height".into()
    }

    fn row(&self) -> String {
        format!("{},{}", self.base, self.height)
    }
}

fn flow_actions<F, S>(a: &FlowArgs, flow: &F, section: &S, start: F::Point) -> Result<CommandReport, CliError>
where
    F: Flow,
    F::Point: Serialize + Coordinates,
    S: Section<F>,
{
    let data = section.data().clone();
    let report = match a.action {
        FlowAction::Simulate => {
            if !(a.dt > 0.0 && a.t_max >= 0.0) {
                return Err(CliError::Config("need dt > 0 and t_max >= 0".into()));
            }
            let steps = (a.t_max / a.dt).round() as usize;
            let mut csv = format!("t,{}\n", start.header());
            let mut law = 0.0f64;
            let mut prev = start.clone();
            for i in 0..=steps {
                let t = i as f64 * a.dt;
                let p = flow.flow(&start, t)?;
                if i > 0 {
                    law = law.max(flow.distance(&flow.flow(&prev, a.dt)?, &p));
                }
                writeln!(csv, "{t},{}", p.row()).expect("string write");
                prev = p;
            }
            if let Some(path) = &a.csv {
                fs::write(path, &csv).map_err(|e| report::io_error(path, e))?;
            }
            let checks = vec![Check::new("flow law along the trajectory", law, Relation::Lt, 1e-9)];
            CommandReport::new("flow simulate", &json!({ "start": start, "steps": steps, "dt": a.dt }), checks)
        }
        FlowAction::Return => {
            let p = section.sample(flow, 0, a.samples.max(1));
            let t_max = 2.0 * data.xi;
            let (t, q) = first_return(flow, section, &p, t_max)?;
            let (ts, _) = first_return_search(flow, section, &p, t_max)?;
            let orbit = return_orbit_length(flow, section, &p, 100_000)?;
            let checks = vec![Check::new("closed form against search", (t - ts).abs(), Relation::Lt, 1e-9)];
            CommandReport::new(
                "flow return",
                &json!({ "section": data, "time": t, "search_time": ts, "return_point": q, "orbit_length": orbit }),
                checks,
            )
        }
        FlowAction::Conjugacy => {
            let n = a.samples.max(1);
            let samples: Vec<_> = (0..n).map(|i| (section.sample(flow, i, n), (i as f64 * 0.37).fract())).collect();
            let r = conjugacy_roundtrip(flow, section, &samples)?;
            let worst = r.equivariance.iter().map(|e| e.1).fold(r.max_roundtrip_error, f64::max);
            let checks = vec![Check::new("conjugacy error", worst, Relation::Lt, r.tolerance)];
            CommandReport::new("flow conjugacy", &r, checks)
        }
        FlowAction::Boundary => {
            let gamma = a.gamma.unwrap_or(data.eta / 2.0);
            let r = flow_boundary_probe(flow, section, gamma, a.samples.max(1))?;
            let checks = vec![Check::new("pass fraction", r.fraction, Relation::Eq, 1.0)];
            CommandReport::new("flow boundary", &r, checks)
        }
        FlowAction::SuspendEmbed => unreachable!("handled by the caller"),
    };
    Ok(report)
}

fn flow(a: FlowArgs) -> Result<bool, CliError> {
    let spec: SystemSpec = a.system.parse()?;
    let report = if a.action == FlowAction::SuspendEmbed {
        let fiber = match &spec {
            SystemSpec::Solenoid(4) => 1,
            SystemSpec::Product(4, k) => *k,
            SystemSpec::Suspension(path) => {
                let file: SuspensionFile = report::read_json(path)?;
                let system = PermutationSystem::new(file.perm, file.roof)?;
                if let Some(s) = system.states().into_iter().find(|s| system.roof(s) != 1.0) {
                    return Err(FlowError::UnsupportedRoof(system.roof(&s)).into());
                }
                return Err(CliError::Config("suspend-embed builds h on solenoid:4 or product:4:k".into()));
            }
            _ => return Err(CliError::Config("suspend-embed builds h on solenoid:4 or product:4:k".into())),
        };
        let suite = suites::suspension_embedding_report(a.seed, fiber)?;
        CommandReport::new("flow suspend-embed", &suite.details, suite.checks)
    } else {
        match spec {
            SystemSpec::Solenoid(n) => {
                let s = TruncatedSolenoid::new(n)?;
                let section = s.section(a.section)?;
                flow_actions(&a, &s, &section, s.point(a.x0))?
            }
            SystemSpec::Product(n, k) => {
                if k == 0 {
                    return Err(CliError::Config("fiber must be positive".into()));
                }
                let s = TruncatedSolenoid::new(n)?;
                let product = ProductFlow { inner: s, fiber: k };
                let section = ProductSection::new(s.section(a.section)?);
                flow_actions(&a, &product, &section, (s.point(a.x0), 0))?
            }
            SystemSpec::Suspension(path) => {
                let file: SuspensionFile = report::read_json(&path)?;
                let system = PermutationSystem::new(file.perm, file.roof)?;
                let states = system.states();
                let base = (a.x0.max(0.0) as usize).min(states.len() - 1);
                let section = BaseSection::new(&system, states);
                let flow = Suspension::new(system);
                flow_actions(&a, &flow, &section, SuspensionPoint { base, height: 0.0 })?
            }
        }
    };
    emit(a.out.as_deref(), &report)?;
    Ok(report.pass)
}

fn verify_all(a: VerifyArgs) -> Result<bool, CliError> {
    let ids = if a.suites.is_empty() { SUITE_IDS.to_vec() } else { a.suites.clone() };
    let mut runs = Vec::with_capacity(ids.len());
    for id in ids {
        let start = Instant::now();
        let suite = suites::run_suite(id, a.seed)?;
        eprintln!(
            "suite {} {:<16} {} ({:.1} s)",
            suite.id,
            suite.name,
            if suite.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
        for c in suite.failures() {
            eprintln!("  {} = {:e}, want {} {:e}", c.name, c.value, c.relation, c.bound);
        }
        runs.push(suite);
    }
    let report = VerifyReport {
        schema_version: report::SCHEMA_VERSION,
        seed: a.seed,
        pass: runs.iter().all(|s| s.pass),
        suites: runs,
    };
    if let Some(dir) = &a.plot {
        figures(a.seed, dir)?;
    }
    emit(a.out.as_deref(), &report)?;
    Ok(report.pass)
}

/// Tiling diagram, heatmap, spectrum and rigidity curve for the first seeded marker.
pub fn figures(seed: u64, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| report::io_error(dir, e))?;
    let (p, kernel) = suites::default_params()?;
    let x = suites::default_phi(suites::sub_seed(seed, 4, 0), &p, &kernel)?;
    let y = suites::default_phi(suites::sub_seed(seed, 4, 1), &p, &kernel)?;
    plot::tiling_diagram(x.tiling(), (-150.0, 150.0), &plot::figure_path(dir, "tiling"))?;
    plot::phi_heatmap(&x, (-30.0, 30.0), &plot::figure_path(dir, "phi_heatmap"))?;
    plot::spectrum(&x, suites::SPECTRUM_WINDOW, &plot::figure_path(dir, "spectrum"))?;
    let mut shifts = rigidity_shifts(p.r1, 5e-3);
    shifts.push(0.0);
    shifts.sort_by(f64::total_cmp);
    let curve = plot::shift_distances(&x, &y, suites::RIGIDITY_WINDOW, &shifts)?;
    plot::rigidity_curve(&curve, 2.0 * p.r1, &plot::figure_path(dir, "rigidity"))
}
