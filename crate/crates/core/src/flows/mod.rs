//! Desk-scale flows, cross-sections, first returns and suspensions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::signals::SignalError;

mod embedding;
mod product;
mod solenoid;
mod suspension;
mod torus;

pub use embedding::{
    pairwise_separation, strong_embedding_probe, suspend_embedding, Collision, FlaggedShift,
    PairProbe, SeparationReport, StrongEmbeddingReport,
};
pub use product::{ProductFlow, ProductSection};
pub use solenoid::{SolenoidPoint, SolenoidSection, TruncatedSolenoid};
pub use suspension::{
    orbit_offsets, suspension_flow, BaseSection, DiscreteSystem, PermutationSystem, ProductSystem, ReturnSystem,
    Suspension, SuspensionPoint,
};
pub use torus::{LinearTorusFlow, TorusPoint, TorusSection};

/// Membership tolerance of section points.
pub const SECTION_TOLERANCE: f64 = 1e-9;
/// Width at which crossing bisection stops.
pub const CROSSING_TOLERANCE: f64 = 1e-10;
/// Perturbations tried around each probed section point.
pub const PROBE_PERTURBATIONS: usize = 8;
/// Times at which the conjugacy is compared with the ambient flow.
pub const EQUIVARIANCE_TIMES: [f64; 3] = [0.3, 1.7, 5.0];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("section index {n} exceeds the truncation depth {depth}")]
    Depth { n: usize, depth: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("no return to the section before time {t_max}")]
    NoReturn { t_max: f64 },
    #[error("base map is not invertible at the requested state")]
    NotInvertible,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("roof value {0} is not the constant 1")]
    UnsupportedRoof(f64),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// A continuous real action on a metric space.
pub trait Flow {
    type Point: Clone + Send + Sync + std::fmt::Debug;

    fn flow(&self, p: &Self::Point, t: f64) -> Result<Self::Point, FlowError>;
    fn distance(&self, p: &Self::Point, q: &Self::Point) -> f64;
    /// A point within `radius` of `p`; distinct `probe` values spread around `p`.
    fn perturb(&self, p: &Self::Point, radius: f64, probe: usize) -> Self::Point;
}

/// Descriptor of a cross-section with its injectivity and covering times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossSectionData {
    pub section_id: String,
    pub eta: f64,
    pub xi: f64,
}

/// A cross-section given by a signed transversal coordinate that increases at
/// unit speed along the flow near the section.
pub trait Section<F: Flow> {
    fn data(&self) -> &CrossSectionData;
    fn offset(&self, flow: &F, p: &F::Point) -> f64;
    fn contains(&self, flow: &F, p: &F::Point, tol: f64) -> bool;
    /// Point of the section at parameter `u` in `[0, 1]`.
    fn at(&self, flow: &F, u: f64) -> F::Point;

    fn sample(&self, flow: &F, i: usize, count: usize) -> F::Point {
        self.at(flow, i as f64 / count.max(1) as f64)
    }

    fn closed_form_return(&self, _flow: &F, _p: &F::Point) -> Option<(f64, F::Point)> {
        None
    }
}

/// Refines a sign change of the offset on `[lo, hi]` and snaps the time with
/// one unit-slope correction.
fn refine_crossing<F: Flow, S: Section<F>>(
    flow: &F,
    section: &S,
    p: &F::Point,
    mut lo: f64,
    mut hi: f64,
) -> Result<(f64, F::Point), FlowError> {
    while hi - lo > CROSSING_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if section.offset(flow, &flow.flow(p, mid)?) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut t = 0.5 * (lo + hi);
    let q = flow.flow(p, t)?;
    t -= section.offset(flow, &q);
    Ok((t, flow.flow(p, t)?))
}

fn is_crossing(before: f64, after: f64, dt: f64) -> bool {
    before < 0.0 && after >= 0.0 && after - before <= 2.0 * dt
}

/// First return by scanning the offset forward at half the injectivity time
/// and bisecting each upward zero crossing.
pub fn first_return_search<F: Flow, S: Section<F>>(
    flow: &F,
    section: &S,
    p: &F::Point,
    t_max: f64,
) -> Result<(f64, F::Point), FlowError> {
    let dt = 0.5 * section.data().eta;
    if !(dt > 0.0) {
        return Err(FlowError::Parameter("section injectivity time must be positive".into()));
    }
    let mut t_prev = dt;
    let mut o_prev = section.offset(flow, &flow.flow(p, t_prev)?);
    while t_prev < t_max {
        let t = t_prev + dt;
        let o = section.offset(flow, &flow.flow(p, t)?);
        if is_crossing(o_prev, o, dt) {
            let (tc, q) = refine_crossing(flow, section, p, t_prev, t)?;
            if section.contains(flow, &q, SECTION_TOLERANCE) && tc <= t_max {
                return Ok((tc, q));
            }
        }
        t_prev = t;
        o_prev = o;
    }
    Err(FlowError::NoReturn { t_max })
}

/// First return time and point: closed form where the section provides one,
/// otherwise [`first_return_search`].
pub fn first_return<F: Flow, S: Section<F>>(
    flow: &F,
    section: &S,
    p: &F::Point,
    t_max: f64,
) -> Result<(f64, F::Point), FlowError> {
    if !section.contains(flow, p, SECTION_TOLERANCE) {
        return Err(FlowError::Precondition("start point is not on the section".into()));
    }
    match section.closed_form_return(flow, p) {
        Some((t, q)) if t <= t_max => Ok((t, q)),
        Some(_) => Err(FlowError::NoReturn { t_max }),
        None => first_return_search(flow, section, p, t_max),
    }
}

/// Number of first returns until the orbit comes back to `start`.
pub fn return_orbit_length<F: Flow, S: Section<F>>(
    flow: &F,
    section: &S,
    start: &F::Point,
    max_returns: usize,
) -> Result<usize, FlowError> {
    let t_max = 2.0 * section.data().xi;
    let mut p = start.clone();
    for k in 1..=max_returns {
        p = first_return(flow, section, &p, t_max)?.1;
        if flow.distance(&p, start) < SECTION_TOLERANCE {
            return Ok(k);
        }
    }
    Err(FlowError::NoReturn { t_max: max_returns as f64 * t_max })
}

/// Latest time `tau <= 0` with the flow of `p` on the section.
pub fn last_crossing<F: Flow, S: Section<F>>(
    flow: &F,
    section: &S,
    p: &F::Point,
    t_max: f64,
) -> Result<(f64, F::Point), FlowError> {
    let o0 = section.offset(flow, p);
    if o0.abs() <= SECTION_TOLERANCE && section.contains(flow, p, SECTION_TOLERANCE) {
        return Ok((0.0, p.clone()));
    }
    let dt = 0.5 * section.data().eta;
    let mut t_after = 0.0;
    let mut o_after = o0;
    while -t_after < t_max {
        let t = t_after - dt;
        let o = section.offset(flow, &flow.flow(p, t)?);
        if is_crossing(o, o_after, dt) {
            let (tc, q) = refine_crossing(flow, section, p, t, t_after)?;
            if section.contains(flow, &q, SECTION_TOLERANCE) {
                return Ok((tc, q));
            }
        }
        t_after = t;
        o_after = o;
    }
    Err(FlowError::NoReturn { t_max })
}

/// Time in `(-gamma, gamma)` at which the flow of `q` meets the section.
pub fn local_crossing<F: Flow, S: Section<F>>(
    flow: &F,
    section: &S,
    q: &F::Point,
    gamma: f64,
) -> Result<Option<f64>, FlowError> {
    let steps = 16;
    let dt = 2.0 * gamma / steps as f64;
    let mut t_prev = -gamma + 1e-12;
    let mut o_prev = section.offset(flow, &flow.flow(q, t_prev)?);
    for k in 1..=steps {
        let t = (-gamma + k as f64 * dt).min(gamma - 1e-12);
        let o = section.offset(flow, &flow.flow(q, t)?);
        if is_crossing(o_prev, o, dt) {
            let (tc, r) = refine_crossing(flow, section, q, t_prev, t)?;
            if tc.abs() < gamma && section.contains(flow, &r, SECTION_TOLERANCE) {
                return Ok(Some(tc));
            }
        }
        t_prev = t;
        o_prev = o;
    }
    Ok(None)
}

/// Interiority check of the flow tube around sampled section points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryProbeReport {
    pub section_id: String,
    pub gamma: f64,
    pub probes: usize,
    pub passed: usize,
    pub fraction: f64,
    pub failures: Vec<usize>,
    pub pass: bool,
}

/// For each sampled section point, perturbs it within `gamma / 4` in
/// [`PROBE_PERTURBATIONS`] directions and requires every perturbed point to
/// meet the section within time `gamma`.
pub fn flow_boundary_probe<F: Flow, S: Section<F>>(
    flow: &F,
    section: &S,
    gamma: f64,
    probes: usize,
) -> Result<BoundaryProbeReport, FlowError> {
    let eta = section.data().eta;
    if !(gamma > 0.0 && gamma < eta) {
        return Err(FlowError::Parameter(format!("gamma {gamma} must lie in (0, {eta})")));
    }
    let mut failures = Vec::new();
    for i in 0..probes {
        let s = section.sample(flow, i, probes);
        let mut ok = true;
        for j in 0..PROBE_PERTURBATIONS {
            let q = flow.perturb(&s, gamma / 4.0, j);
            if local_crossing(flow, section, &q, gamma)?.is_none() {
                ok = false;
                break;
            }
        }
        if !ok {
            failures.push(i);
        }
    }
    let passed = probes - failures.len();
    Ok(BoundaryProbeReport {
        section_id: section.data().section_id.clone(),
        gamma,
        probes,
        passed,
        fraction: if probes == 0 { 1.0 } else { passed as f64 / probes as f64 },
        pass: failures.is_empty(),
        failures,
    })
}

/// Roundtrip and time-equivariance errors of the map from the suspension over
/// the first-return system to the ambient flow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyReport {
    pub section_id: String,
    pub samples: usize,
    pub max_roundtrip_error: f64,
    /// `(t, max error)` for each compared time.
    pub equivariance: Vec<(f64, f64)>,
    pub tolerance: f64,
    pub pass: bool,
}

/// Conjugacy tolerance of [`conjugacy_roundtrip`].
pub const CONJUGACY_TOLERANCE: f64 = 1e-9;

/// `samples` are section points with a height fraction in `[0, 1)` of their return time.
pub fn conjugacy_roundtrip<F: Flow, S: Section<F>>(
    flow: &F,
    section: &S,
    samples: &[(F::Point, f64)],
) -> Result<ConjugacyReport, FlowError> {
    let data = section.data();
    let probe = flow_boundary_probe(flow, section, 0.5 * data.eta, 16)?;
    if !probe.pass {
        return Err(FlowError::Precondition(format!(
            "section {} has flow boundary at probes {:?}",
            data.section_id, probe.failures
        )));
    }
    let t_max = 2.0 * data.xi;
    let mut roundtrip = 0.0f64;
    let mut equivariance: Vec<(f64, f64)> = EQUIVARIANCE_TIMES.iter().map(|t| (*t, 0.0)).collect();
    for (s, u) in samples {
        let (ret, _) = first_return(flow, section, s, t_max)?;
        let h = u.clamp(0.0, 1.0 - 1e-12) * ret;
        let p = flow.flow(s, h)?;
        let (tau, s_back) = last_crossing(flow, section, &p, t_max)?;
        roundtrip = roundtrip.max(flow.distance(&s_back, s) + (-tau - h).abs());
        for (t, err) in equivariance.iter_mut() {
            let mut base = s.clone();
            let mut height = h + *t;
            loop {
                let (r, next) = first_return(flow, section, &base, t_max)?;
                if height < r {
                    break;
                }
                height -= r;
                base = next;
            }
            let via_suspension = flow.flow(&base, height)?;
            let via_flow = flow.flow(&p, *t)?;
            *err = err.max(flow.distance(&via_suspension, &via_flow));
        }
    }
    let pass = roundtrip < CONJUGACY_TOLERANCE && equivariance.iter().all(|(_, e)| *e < CONJUGACY_TOLERANCE);
    Ok(ConjugacyReport {
        section_id: data.section_id.clone(),
        samples: samples.len(),
        max_roundtrip_error: roundtrip,
        equivariance,
        tolerance: CONJUGACY_TOLERANCE,
        pass,
    })
}

/// A jump of the first-return time along the section and where the left
/// limit returns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnJump<P> {
    pub u: f64,
    pub time_before: f64,
    pub time_after: f64,
    pub return_point: P,
}

/// Scans the section parameter for a jump of the return time larger than
/// the injectivity time and bisects it down to `width`.
pub fn return_time_jump<F: Flow, S: Section<F>>(
    flow: &F,
    section: &S,
    count: usize,
    width: f64,
) -> Result<Option<ReturnJump<F::Point>>, FlowError> {
    let data = section.data();
    let t_max = 4.0 * data.xi;
    let time = |u: f64| first_return(flow, section, &section.at(flow, u), t_max);
    let mut prev = time(0.0)?.0;
    for i in 1..=count {
        let u1 = i as f64 / count as f64;
        let t1 = time(u1)?.0;
        if (t1 - prev).abs() > data.eta {
            let (mut lo, mut hi) = ((i - 1) as f64 / count as f64, u1);
            while hi - lo > width {
                let mid = 0.5 * (lo + hi);
                if (time(mid)?.0 - prev).abs() > data.eta {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let (time_before, return_point) = time(lo)?;
            return Ok(Some(ReturnJump {
                u: lo,
                time_before,
                time_after: time(hi)?.0,
                return_point,
            }));
        }
        prev = t1;
    }
    Ok(None)
}
