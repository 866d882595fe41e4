//! The tiling-like map: a band-limited function that vanishes near the
//! lattice `n + L Z` of each tile's site and nowhere else in the tile interior.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{self, QuadratureError};
use crate::signals::{
    self, Band, BandLimitedSignal, KernelPrimitive, KernelTail, RealPrimitiveTable, SignalError, SpectralKernel,
    ValueKind,
};
use crate::theta::{self, EmbeddingParams, ThetaError};
use crate::tiling::{self, Interval, IntervalTiling, MarkerSequence, TilingError};

mod perturb;
pub mod zeros;

pub use perturb::{
    g2, g2_on, iterate_embedding, ladder, perturb_step, signal_rigidity_margin, step_params,
    IterationConfig, IterationOutcome, IterationReport, IterationStep, LadderStep, PerturbOptions,
    PerturbReport,
};
pub use zeros::{locate_zeros, newton, winding_number, OffDiskCertificate, Winding, ZeroDisk, ZeroReport};

/// Default evaluation tolerance.
pub const EVAL_TOLERANCE: f64 = 1e-9;
/// Node spacing of the real primitive table, in units of `1 / half_width`.
const TABLE_STEP: f64 = 1e-3;
/// Real-line sampling step of the rigidity sup.
pub const RIGIDITY_SAMPLE_STEP: f64 = 0.05;
/// Largest half-width of the standard sampling window.
pub const STANDARD_WINDOW: f64 = 200.0;
/// Leakage ratio accepted by the spectral report.
pub const LEAKAGE_THRESHOLD: f64 = 1e-2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhiError {
    #[error("argument {0} outside the evaluation domain")]
    Domain(Complex64),
    #[error("window too small: {0}")]
    Window(String),
    #[error("parameter record rejected: {0}")]
    Params(String),
    #[error("winding quadrature failed on the circle of radius {radius} about {center}")]
    Contour { center: f64, radius: f64 },
    #[error("band decomposition failed: {0}")]
    Decomposition(String),
    #[error("iteration step {step}: {reason}")]
    Iteration { step: usize, reason: String },
    #[error(transparent)]
    Tiling(#[from] TilingError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// `z -> sum_n theta(z - n) int_{W_n} chi_1(z - t) dt` for one tiling.
#[derive(Debug, Clone)]
pub struct PhiFunction {
    marker: Option<MarkerSequence>,
    tiling: IntervalTiling,
    params: EmbeddingParams,
    kernel: SpectralKernel,
    eval_tolerance: f64,
    radius: f64,
    engine: KernelPrimitive,
    table: Arc<RealPrimitiveTable>,
    cells: Vec<(i64, Interval)>,
    domain: (f64, f64),
}

fn check_params(params: &EmbeddingParams) -> Result<(), PhiError> {
    let report = theta::validate_params(params);
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| !c.pass && c.name != "M2 > 4L + E + 1")
        .map(|c| c.name.as_str())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(PhiError::Params(failed.join("; ")))
    }
}

/// Truncation radius `R` with `2 ||theta|| tail(R) < tolerance`.
pub fn truncation_radius(params: &EmbeddingParams, kernel: &SpectralKernel, tolerance: f64) -> Result<f64, PhiError> {
    let tail = KernelTail::build(kernel, 1);
    let bound = tolerance / (2.0 * theta::theta_sup_norm(params.l, params.b));
    tail.radius_for(bound)
        .map(|r| r.max(1.0))
        .ok_or_else(|| PhiError::Params(format!("tolerance {tolerance:e} below the kernel tail resolution")))
}

impl PhiFunction {
    /// Map of a marker sequence. The parameter record must pass every check
    /// except the marker-gap condition, which is recorded instead.
    pub fn new(
        marker: &MarkerSequence,
        params: &EmbeddingParams,
        kernel: &SpectralKernel,
        eval_tolerance: f64,
    ) -> Result<Self, PhiError> {
        marker.validate()?;
        let tiling = tiling::build_tiling(marker)?;
        let mut phi = Self::assemble(tiling, params, kernel, eval_tolerance)?;
        let shrink = phi.radius.max(params.e + 1.0);
        phi.domain = match phi.tiling.valid_segment() {
            Some((l, r)) if r - l > 2.0 * shrink => (l + shrink, r - shrink),
            _ => {
                return Err(PhiError::Window(format!(
                    "valid segment narrower than twice the truncation radius {shrink}"
                )))
            }
        };
        phi.marker = Some(marker.clone());
        Ok(phi)
    }

    /// Map of an explicit tiling whose listed cells are all there is; the
    /// evaluation domain is the whole strip.
    pub fn from_tiling(
        tiling: IntervalTiling,
        params: &EmbeddingParams,
        kernel: &SpectralKernel,
        eval_tolerance: f64,
    ) -> Result<Self, PhiError> {
        Self::assemble(tiling, params, kernel, eval_tolerance)
    }

    fn assemble(
        tiling: IntervalTiling,
        params: &EmbeddingParams,
        kernel: &SpectralKernel,
        eval_tolerance: f64,
    ) -> Result<Self, PhiError> {
        if !(eval_tolerance > 0.0) {
            return Err(PhiError::Params(format!("tolerance {eval_tolerance}")));
        }
        check_params(params)?;
        if (kernel.half_width - params.delta / 8.0).abs() > 1e-15 * params.delta {
            return Err(PhiError::Params("kernel does not match delta".into()));
        }
        let radius = truncation_radius(params, kernel, eval_tolerance)?;
        let cells = tiling.valid_cells();
        let engine = KernelPrimitive::new(kernel, 4.0 * radius);
        Ok(Self {
            marker: None,
            tiling,
            params: params.clone(),
            kernel: *kernel,
            eval_tolerance,
            radius,
            table: Arc::new(RealPrimitiveTable::new(&engine, radius, TABLE_STEP / kernel.half_width)),
            engine,
            cells,
            domain: (f64::NEG_INFINITY, f64::INFINITY),
        })
    }

    pub fn marker(&self) -> Option<&MarkerSequence> {
        self.marker.as_ref()
    }

    pub fn tiling(&self) -> &IntervalTiling {
        &self.tiling
    }

    pub fn params(&self) -> &EmbeddingParams {
        &self.params
    }

    pub fn kernel(&self) -> &SpectralKernel {
        &self.kernel
    }

    pub fn eval_tolerance(&self) -> f64 {
        self.eval_tolerance
    }

    pub fn truncation_radius(&self) -> f64 {
        self.radius
    }

    /// Real parts where evaluation is exact to the tolerance.
    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// Cells entering the sum, ascending.
    pub fn cells(&self) -> &[(i64, Interval)] {
        &self.cells
    }

    /// Whether the marker gap is large enough for the lemma constants.
    pub fn m2_condition(&self) -> bool {
        self.params.m2 > 4.0 * self.params.l + self.params.e + 1.0
    }

    /// Largest symmetric window inside the domain, capped at [`STANDARD_WINDOW`].
    pub fn standard_window(&self) -> f64 {
        (-self.domain.0).min(self.domain.1).min(STANDARD_WINDOW).floor().max(0.0)
    }

    /// Spectral band of the map on the real line.
    pub fn band(&self) -> Band {
        Band::new(self.params.a / 2.0, self.params.a / 2.0 + self.params.delta / 2.0)
    }

    pub fn in_domain(&self, z: Complex64) -> bool {
        z.im.abs() <= 1.0 + 1e-12 && z.re >= self.domain.0 && z.re <= self.domain.1
    }

    fn check(&self, z: Complex64) -> Result<(), PhiError> {
        if self.in_domain(z) {
            Ok(())
        } else {
            Err(PhiError::Domain(z))
        }
    }

    fn primitive_at(&self, z: Complex64, endpoint: f64) -> Complex64 {
        let s = z - endpoint;
        if s.re > self.radius {
            Complex64::new(self.kernel.amplitude, 0.0)
        } else if s.re < -self.radius {
            Complex64::new(0.0, 0.0)
        } else if s.im == 0.0 && self.table.covers(s.re) {
            Complex64::new(self.table.primitive(s.re), 0.0)
        } else {
            self.engine.primitive(s)
        }
    }

    fn window_cells(&self, x: f64, radius: f64) -> &[(i64, Interval)] {
        let start = self.cells.partition_point(|(_, c)| c.r < x - radius);
        let end = self.cells.partition_point(|(_, c)| c.l <= x + radius);
        &self.cells[start..end.max(start)]
    }

    /// Evaluation without the domain check.
    pub fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut carry: Option<(f64, Complex64)> = None;
        for (n, cell) in self.window_cells(z.re, self.radius) {
            let left = match carry {
                Some((e, g)) if e == cell.l => g,
                _ => self.primitive_at(z, cell.l),
            };
            let right = self.primitive_at(z, cell.r);
            carry = Some((cell.r, right));
            acc += theta::theta(z - *n as f64, self.params.l, self.params.b) * (left - right);
        }
        acc
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64, PhiError> {
        self.check(z)?;
        Ok(self.eval_unchecked(z))
    }

    pub fn eval_many(&self, zs: &[Complex64]) -> Result<Vec<Complex64>, PhiError> {
        if let Some(z) = zs.iter().find(|z| !self.in_domain(**z)) {
            return Err(PhiError::Domain(*z));
        }
        Ok(zs.par_iter().map(|z| self.eval_unchecked(*z)).collect())
    }

    /// Reference evaluation: each cell integral is written as a frequency
    /// integral and computed by adaptive quadrature, over every cell within
    /// twice the truncation radius.
    pub fn eval_quadrature(&self, z: Complex64) -> Result<Complex64, PhiError> {
        self.check(z)?;
        let w = self.kernel.half_width;
        let tol = 0.01 * self.eval_tolerance;
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, cell) in self.window_cells(z.re, 2.0 * self.radius) {
            let mid = 0.5 * (cell.l + cell.r);
            let len = cell.length();
            let integrand = |xi: f64| {
                let sinc = if xi == 0.0 { len } else { (PI * xi * len).sin() / (PI * xi) };
                (Complex64::new(0.0, 2.0 * PI * xi) * (z - mid)).exp() * (self.kernel.profile(xi) * sinc)
            };
            let q = quadrature::integrate(integrand, -w, w, tol)?;
            acc += theta::theta(z - *n as f64, self.params.l, self.params.b) * q.value;
        }
        Ok(acc)
    }

    /// The map of the shifted point: cells and sites move by `-k`.
    pub fn shifted(&self, k: i64) -> Result<Self, PhiError> {
        match &self.marker {
            Some(m) => Self::new(&m.shifted(k), &self.params, &self.kernel, self.eval_tolerance),
            None => {
                let cells: Vec<(i64, Interval)> = self
                    .cells
                    .iter()
                    .map(|(n, c)| (n - k, Interval::new(c.l - k as f64, c.r - k as f64)))
                    .collect();
                Self::from_tiling(
                    IntervalTiling::from_cells(&cells, self.tiling.h),
                    &self.params,
                    &self.kernel,
                    self.eval_tolerance,
                )
            }
        }
    }

    /// Samples on `[-T, T]` as a complex signal declared in [`PhiFunction::band`].
    pub fn sample(&self, window_radius: f64, step: f64) -> Result<BandLimitedSignal, PhiError> {
        let t = Complex64::new(window_radius, 0.0);
        self.check(t)?;
        self.check(-t)?;
        Ok(BandLimitedSignal::from_fn(window_radius, step, self.band(), ValueKind::Complex, |x| {
            self.eval_unchecked(Complex64::new(x, 0.0))
        })?)
    }
}

/// `max |Phi(T^k x)(z) - Phi(x)(z + k)|` over the grid.
pub fn equivariance_defect(phi: &PhiFunction, k: i64, grid: &[Complex64]) -> Result<f64, PhiError> {
    if k == 0 {
        return Ok(0.0);
    }
    let shifted = phi.shifted(k)?;
    let moved: Vec<Complex64> = grid.iter().map(|z| z + k as f64).collect();
    let a = shifted.eval_many(grid)?;
    let b = phi.eval_many(&moved)?;
    Ok(a.iter().zip(&b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max))
}

/// Spectral leakage of the map and of its conjugate on a finite window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub window_radius: f64,
    pub sample_step: f64,
    pub band: Band,
    pub leakage: f64,
    pub conjugate_band: Band,
    pub conjugate_leakage: f64,
    pub bands_disjoint: bool,
    /// Frequency width added to each band edge to absorb the window's main lobe.
    pub taper_width: f64,
    pub threshold: f64,
    pub pass: bool,
}

pub fn spectral_support_report(phi: &PhiFunction, window_radius: f64) -> Result<SpectrumReport, PhiError> {
    let p = phi.params();
    if window_radius < 4.0 * p.m1 as f64 {
        return Err(PhiError::Window(format!(
            "window {window_radius} below 4 M1 = {}",
            4 * p.m1
        )));
    }
    if !(p.l > 4.0 / p.delta) {
        return Err(PhiError::Params("L must exceed 4/delta".into()));
    }
    let band = phi.band();
    let step = signals::default_step(band);
    let f = phi.sample(window_radius, step)?;
    let conj: Vec<Complex64> = f.samples().iter().map(|s| s.conj()).collect();
    let g = BandLimitedSignal::new(window_radius, step, conj, band.reflected(), ValueKind::Complex)?;
    let leakage = signals::fourier_leakage(&f, band);
    let conjugate_leakage = signals::fourier_leakage(&g, band.reflected());
    let tw = signals::taper_width(&f);
    let bands_disjoint = band.reflected().hi + tw < band.lo - tw;
    Ok(SpectrumReport {
        window_radius,
        sample_step: step,
        band,
        leakage,
        conjugate_band: band.reflected(),
        conjugate_leakage,
        bands_disjoint,
        taper_width: tw,
        threshold: LEAKAGE_THRESHOLD,
        pass: leakage < LEAKAGE_THRESHOLD && conjugate_leakage < LEAKAGE_THRESHOLD && bands_disjoint,
    })
}

/// Smallest sup distance between `Phi(y)` shifted by `r` and `Phi(x)` over
/// the shifts `2 r1 < |r| <= 1/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub margin: f64,
    pub argmin_r: f64,
    /// Distance at `r = 0`, outside the searched shifts.
    pub distance_at_zero: f64,
    pub r_step: f64,
    pub window: (f64, f64),
    pub shifts: usize,
}

/// Shift grid `{2 r1 + r_step, 2 r1 + 2 r_step, ...} <= 1/2` and its negatives.
pub fn rigidity_shifts(r1: f64, r_step: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut j = 1;
    loop {
        let r = 2.0 * r1 + j as f64 * r_step;
        if r > 0.5 + 1e-12 {
            break;
        }
        out.push(-r);
        out.push(r);
        j += 1;
    }
    out.sort_by(f64::total_cmp);
    out
}

pub fn shift_rigidity_margin(
    phi_x: &PhiFunction,
    phi_y: &PhiFunction,
    r_step: f64,
    window: (f64, f64),
) -> Result<RigidityReport, PhiError> {
    if !(r_step > 0.0) || !(window.0 < window.1) {
        return Err(PhiError::Window(format!("shift step {r_step}, window {window:?}")));
    }
    let count = ((window.1 - window.0) / RIGIDITY_SAMPLE_STEP).ceil() as usize + 1;
    let ts: Vec<f64> = (0..count)
        .map(|j| (window.0 + j as f64 * RIGIDITY_SAMPLE_STEP).min(window.1))
        .collect();
    for (phi, pad) in [(phi_x, 0.0), (phi_y, 0.5)] {
        phi.check(Complex64::new(window.0 - pad, 0.0))?;
        phi.check(Complex64::new(window.1 + pad, 0.0))?;
    }
    let base: Vec<Complex64> = ts.par_iter().map(|t| phi_x.eval_unchecked(Complex64::new(*t, 0.0))).collect();
    let distance = |r: f64| {
        ts.par_iter()
            .zip(&base)
            .map(|(t, v)| (phi_y.eval_unchecked(Complex64::new(t + r, 0.0)) - v).norm())
            .reduce(|| 0.0, f64::max)
    };
    let shifts = rigidity_shifts(phi_x.params().r1.max(phi_y.params().r1), r_step);
    let mut margin = f64::INFINITY;
    let mut argmin_r = f64::NAN;
    for r in &shifts {
        let d = distance(*r);
        if d < margin {
            margin = d;
            argmin_r = *r;
        }
    }
    Ok(RigidityReport {
        margin,
        argmin_r,
        distance_at_zero: distance(0.0),
        r_step,
        window,
        shifts: shifts.len(),
    })
}

#[cfg(test)]
mod tests;
