//! One perturbation step `f -> f + g2` and the finite iteration ladder.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{rigidity_shifts, PhiError, PhiFunction, RigidityReport, LEAKAGE_THRESHOLD};
use crate::signals::{self, Band, BandLimitedSignal, MetricValue, SpectralKernel, ValueKind};
use crate::theta::{self, EmbeddingParams, ParamInputs};
use crate::tiling::MarkerSequence;

/// Window depth of the truncated metric in [`perturb_step`].
pub const METRIC_DEPTH: u32 = 20;
/// Largest number of iteration steps.
pub const MAX_STEPS: usize = 5;
/// Ratio between consecutive entries of the epsilon ladder.
pub const EPSILON_RATIO: f64 = 0.25;

fn g2_band(p: &EmbeddingParams) -> Band {
    Band::symmetric(p.a / 2.0 + p.delta / 2.0)
}

/// `(delta / 2 K1) Re Phi` sampled on `[-T, T]` at `step`.
pub fn g2_on(phi: &PhiFunction, window_radius: f64, step: f64) -> Result<BandLimitedSignal, PhiError> {
    let p = phi.params();
    for x in [-window_radius, window_radius] {
        if !phi.in_domain(Complex64::new(x, 0.0)) {
            return Err(PhiError::Domain(Complex64::new(x, 0.0)));
        }
    }
    let scale = p.delta / (2.0 * p.k1);
    Ok(BandLimitedSignal::from_fn(window_radius, step, g2_band(p), ValueKind::Real, |x| {
        Complex64::new(scale * phi.eval_unchecked(Complex64::new(x, 0.0)).re, 0.0)
    })?)
}

/// [`g2_on`] over the standard window at four samples per period of the top frequency.
pub fn g2(phi: &PhiFunction) -> Result<BandLimitedSignal, PhiError> {
    let band = g2_band(phi.params());
    g2_on(phi, phi.standard_window(), signals::default_step(band))
}

#[derive(Debug, Clone)]
pub struct PerturbOptions {
    pub metric_depth: u32,
    /// Perturbed signal of a second point, compared against the output under shifts.
    pub partner: Option<BandLimitedSignal>,
    pub r_step: f64,
}

impl Default for PerturbOptions {
    fn default() -> Self {
        Self {
            metric_depth: METRIC_DEPTH,
            partner: None,
            r_step: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbReport {
    pub delta: f64,
    pub metric: MetricValue,
    pub metric_depth: u32,
    pub metric_pass: bool,
    pub g2_sup: f64,
    pub g2_bound: f64,
    pub g_sup: f64,
    pub g1_band: Band,
    pub g2_bands: [Band; 2],
    pub bands_disjoint: bool,
    pub g1_leakage: f64,
    pub g2_leakage: f64,
    pub resubtraction_error: f64,
    pub rigidity: Option<RigidityReport>,
    pub pass: bool,
}

/// `g = g1 + g2` with `g1 = f` and `g2` from the map, on the grid of `f`.
pub fn perturb_step(
    f: &BandLimitedSignal,
    phi: &PhiFunction,
    options: &PerturbOptions,
) -> Result<(BandLimitedSignal, PerturbReport), PhiError> {
    let p = phi.params();
    let g1_band = Band::symmetric(p.a / 2.0);
    if f.band().max_abs() > g1_band.hi * (1.0 + 1e-12) {
        return Err(PhiError::Decomposition(format!(
            "input band [{}, {}] reaches into the perturbation band above {}",
            f.band().lo,
            f.band().hi,
            g1_band.hi
        )));
    }
    let upper = phi.band();
    let g2_bands = [upper.reflected(), upper];
    let bands_disjoint = g2_bands.iter().all(|b| b.lo >= g1_band.hi || b.hi <= g1_band.lo);
    if !bands_disjoint {
        return Err(PhiError::Decomposition("perturbation band meets the input band".into()));
    }
    let g1 = f.clone().with_band(g1_band);
    let g2 = g2_on(phi, f.window_radius(), f.sample_step())?;
    let g = g1.zip_with(&g2, g2.band(), |u, v| u + v)?;
    let resub = g.sub(&g2)?.max_abs_diff(&g1)?;
    let metric = signals::metric_d(&g, f, options.metric_depth)?;
    let g2_sup = g2.sup_norm();
    let g1_leakage = signals::fourier_leakage(&g1, g1_band);
    let g2_leakage = signals::fourier_leakage_bands(&g2, &g2_bands);
    let rigidity = match &options.partner {
        Some(other) => Some(signal_rigidity_margin(&g, other, p.r1, options.r_step)?),
        None => None,
    };
    let metric_pass = metric.value < p.delta;
    let pass = metric_pass
        && g2_sup <= p.delta / 2.0 * (1.0 + 1e-12) + phi.eval_tolerance()
        && resub <= 1e-9
        && g1_leakage < LEAKAGE_THRESHOLD
        && g2_leakage < LEAKAGE_THRESHOLD
        && rigidity.as_ref().is_none_or(|r| r.margin > 0.0);
    let report = PerturbReport {
        delta: p.delta,
        metric,
        metric_depth: options.metric_depth,
        metric_pass,
        g2_sup,
        g2_bound: p.delta / 2.0,
        g_sup: g.sup_norm(),
        g1_band,
        g2_bands,
        bands_disjoint,
        g1_leakage,
        g2_leakage,
        resubtraction_error: resub,
        rigidity,
        pass,
    };
    Ok((g, report))
}

/// Signal version of the rigidity margin: `sup |tau_r g_y - g_x|` minimised
/// over the shift grid, with shifts computed by band-limited interpolation.
pub fn signal_rigidity_margin(
    gx: &BandLimitedSignal,
    gy: &BandLimitedSignal,
    r1: f64,
    r_step: f64,
) -> Result<RigidityReport, PhiError> {
    if !gx.same_grid(gy) {
        return Err(PhiError::Signal(signals::SignalError::Grid("rigidity inputs differ".into())));
    }
    let distance = |r: f64| -> Result<(f64, f64), PhiError> {
        let moved = signals::translate(gy, r)?;
        let j = (gx.len() - moved.len()) / 2;
        let base = gx.trim(j)?;
        Ok((base.max_abs_diff(&moved)?, base.window_radius()))
    };
    let shifts = rigidity_shifts(r1, r_step);
    let mut margin = f64::INFINITY;
    let mut argmin_r = f64::NAN;
    let mut radius = gx.window_radius();
    for r in &shifts {
        let (d, w) = distance(*r)?;
        radius = radius.min(w);
        if d < margin {
            margin = d;
            argmin_r = *r;
        }
    }
    Ok(RigidityReport {
        margin,
        argmin_r,
        distance_at_zero: distance(0.0)?.0,
        r_step,
        window: (-radius, radius),
        shifts: shifts.len(),
    })
}

/// Constants of one iteration step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderStep {
    pub n: usize,
    pub a: f64,
    pub a_next: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub epsilon_next: f64,
    #[serde(rename = "L")]
    pub l: f64,
}

/// `eps_1 = 1`, `eps_{n+1} = eps_n / 4`, `a_n = a (1 - 2^-n)`,
/// `delta_n = min(1/(n+1), eps_{n+1}/2, a_{n+1} - a_n)` and `L_n` the power of
/// two at least twice `4 / delta_n`.
pub fn ladder(a: f64, steps: usize) -> Vec<LadderStep> {
    let mut epsilon = 1.0;
    (1..=steps)
        .map(|n| {
            let epsilon_next = EPSILON_RATIO * epsilon;
            let a_n = a * (1.0 - 0.5f64.powi(n as i32));
            let a_next = a * (1.0 - 0.5f64.powi(n as i32 + 1));
            let delta = (1.0 / (n as f64 + 1.0)).min(epsilon_next / 2.0).min(a_next - a_n);
            let l = 2f64.powi((4.0 / delta).log2().ceil() as i32 + 1);
            let step = LadderStep {
                n,
                a: a_n,
                a_next,
                delta,
                epsilon,
                epsilon_next,
                l,
            };
            epsilon = epsilon_next;
            step
        })
        .collect()
}

/// Parameters of a ladder step with disk radius below `r_cap` and the
/// smallest marker gap satisfying the gap condition.
pub fn step_params(step: &LadderStep, r_cap: f64, c: f64) -> Result<(EmbeddingParams, SpectralKernel), PhiError> {
    let mut inputs = ParamInputs::new(step.a, step.delta, step.l, 1, 2, c);
    inputs.r1_cap = r_cap;
    let (p, kernel) = theta::derive_params(inputs)?;
    let m = theta::min_marker_gap(p.l, p.e, c);
    Ok((theta::with_marker_gap(&p, m, theta::coverage_for_gap(m)), kernel))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationConfig {
    pub a: f64,
    pub steps: usize,
    pub points: usize,
    pub window_radius: f64,
    pub c: f64,
    pub eval_tolerance: f64,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            a: 2.0,
            steps: 3,
            points: 5,
            window_radius: 24.0,
            c: 1.02,
            eval_tolerance: super::EVAL_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationStep {
    pub ladder: LadderStep,
    pub params: EmbeddingParams,
    /// Rigidity radius carried into the step.
    pub r_bound: f64,
    pub sup_distance: f64,
    pub pass: bool,
}

/// `sup_x ||h_n(x) - h_m(x)||` against the bound `eps_{m+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CauchyCheck {
    pub m: usize,
    pub n: usize,
    pub distance: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub steps: Vec<IterationStep>,
    /// Running sums of the per-step distances.
    pub partial_sums: Vec<f64>,
    pub epsilon2: f64,
    pub cauchy: Vec<CauchyCheck>,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct IterationOutcome {
    /// `maps[k][p]` is `h_{k+1}` at sample point `p`; `maps[0]` is zero.
    pub maps: Vec<Vec<BandLimitedSignal>>,
    pub report: IterationReport,
}

/// Runs `steps` perturbation steps from `h_1 = 0` on `points` sample points.
/// `markers(step, params, p)` supplies the marker sequence of point `p` at a step.
pub fn iterate_embedding<F>(config: &IterationConfig, mut markers: F) -> Result<IterationOutcome, PhiError>
where
    F: FnMut(&LadderStep, &EmbeddingParams, usize) -> Result<MarkerSequence, PhiError>,
{
    if config.steps == 0 || config.steps > MAX_STEPS {
        return Err(PhiError::Params(format!("steps must lie in 1..={MAX_STEPS}")));
    }
    let rungs = ladder(config.a, config.steps);
    let step_size = 1.0 / (2.0 * config.a);
    let h1 = BandLimitedSignal::zero(config.window_radius, step_size, Band::symmetric(rungs[0].a / 2.0))?;
    let mut maps = vec![vec![h1; config.points]];
    let mut r_bound = 0.25;
    let mut steps = Vec::new();
    let options = PerturbOptions::default();
    for rung in &rungs {
        let fail = |reason: String| PhiError::Iteration { step: rung.n, reason };
        if rung.delta > rung.epsilon_next / 2.0 || rung.delta > rung.a_next - rung.a {
            return Err(fail(format!("delta {} breaks the ladder", rung.delta)));
        }
        let (params, kernel) = step_params(rung, r_bound / 2.0, config.c)?;
        if !(params.r1 < r_bound / 2.0) {
            return Err(fail(format!("disk radius {} not below {}", params.r1, r_bound / 2.0)));
        }
        let current = maps.last().expect("base map present");
        let mut next = Vec::with_capacity(config.points);
        let mut sup_distance = 0.0f64;
        for (p, h) in current.iter().enumerate() {
            let marker = markers(rung, &params, p)?;
            let phi = PhiFunction::new(&marker, &params, &kernel, config.eval_tolerance)?;
            let (g, _) = perturb_step(h, &phi, &options)?;
            sup_distance = sup_distance.max(g.max_abs_diff(h)?);
            next.push(g.with_band(Band::symmetric(rung.a_next / 2.0)));
        }
        if !(sup_distance < rung.delta) {
            return Err(fail(format!("step distance {sup_distance} not below delta {}", rung.delta)));
        }
        steps.push(IterationStep {
            ladder: *rung,
            params: params.clone(),
            r_bound,
            sup_distance,
            pass: true,
        });
        r_bound = params.r1;
        maps.push(next);
    }
    let epsilon2 = rungs[0].epsilon_next;
    let mut partial_sums = Vec::new();
    let mut acc = 0.0;
    for s in &steps {
        acc += s.sup_distance;
        partial_sums.push(acc);
    }
    if let Some(k) = partial_sums.iter().position(|s| !(*s < epsilon2)) {
        return Err(PhiError::Iteration {
            step: k + 1,
            reason: format!("partial sum {} not below {epsilon2}", partial_sums[k]),
        });
    }
    let mut cauchy = Vec::new();
    for m in 0..maps.len() {
        for n in m + 1..maps.len() {
            let mut distance = 0.0f64;
            for (u, v) in maps[n].iter().zip(&maps[m]) {
                distance = distance.max(u.max_abs_diff(v)?);
            }
            let bound = rungs[m].epsilon_next;
            if !(distance < bound) {
                return Err(PhiError::Iteration {
                    step: n,
                    reason: format!("distance {distance} to map {} not below {bound}", m + 1),
                });
            }
            cauchy.push(CauchyCheck { m: m + 1, n: n + 1, distance, bound });
        }
    }
    Ok(IterationOutcome {
        maps,
        report: IterationReport {
            steps,
            partial_sums,
            epsilon2,
            cauchy,
            pass: true,
        },
    })
}
