//! Windowed, sampled band-limited signals and the shift action on them.

mod io;
mod kernel;

pub use io::{read_signal, signal_from_csv, signal_to_csv, write_signal, SignalHeader};
pub use kernel::{
    eval_chi1, eval_chi1_complex, k1, make_chi1, K1Estimate, KernelPrimitive, KernelTail, RealPrimitiveTable,
    SpectralKernel,
};

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Target accuracy of the regularised sinc interpolation in [`translate`].
pub const INTERPOLATION_TOLERANCE: f64 = 1e-13;

const GRID_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("invalid signal: {0}")]
    Invalid(String),
    #[error("window too small: {0}")]
    Window(String),
    #[error("sample grids differ: {0}")]
    Grid(String),
    #[error("argument {0} outside the strip |Im z| <= 1")]
    Domain(Complex64),
    #[error("oversampling too low for interpolation: band width {band_width} at step {step}")]
    Oversampling { band_width: f64, step: f64 },
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] crate::quadrature::QuadratureError),
    #[error("io: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueKind {
    Complex,
    Real,
}

/// Closed frequency interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn symmetric(half: f64) -> Self {
        Self { lo: -half, hi: half }
    }

    pub fn max_abs(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains_band(&self, other: &Band) -> bool {
        other.lo >= self.lo && other.hi <= self.hi
    }

    pub fn reflected(&self) -> Band {
        Band::new(-self.hi, -self.lo)
    }
}

/// Number of lattice points `-T + j h` in `[-T, T]`.
pub fn sample_count(window_radius: f64, step: f64) -> usize {
    (2.0 * window_radius / step + GRID_EPS).floor() as usize + 1
}

/// Step used by the generators: twice the Nyquist rate of the band.
pub fn default_step(band: Band) -> f64 {
    1.0 / (4.0 * band.max_abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandLimitedSignal {
    window_radius: f64,
    sample_step: f64,
    samples: Vec<Complex64>,
    band: Band,
    value_kind: ValueKind,
}

impl BandLimitedSignal {
    pub fn new(
        window_radius: f64,
        sample_step: f64,
        samples: Vec<Complex64>,
        band: Band,
        value_kind: ValueKind,
    ) -> Result<Self, SignalError> {
        if !(sample_step > 0.0) || !sample_step.is_finite() {
            return Err(SignalError::Invalid(format!("sample step {sample_step}")));
        }
        if !(window_radius >= 0.0) || !window_radius.is_finite() {
            return Err(SignalError::Invalid(format!("window radius {window_radius}")));
        }
        if !(band.lo <= band.hi) {
            return Err(SignalError::Invalid(format!("band [{}, {}]", band.lo, band.hi)));
        }
        if band.max_abs() > 0.0 && sample_step > 1.0 / (2.0 * band.max_abs()) * (1.0 + 1e-12) {
            return Err(SignalError::Invalid(format!(
                "step {sample_step} above Nyquist step {}",
                1.0 / (2.0 * band.max_abs())
            )));
        }
        let expected = sample_count(window_radius, sample_step);
        if samples.len() != expected {
            return Err(SignalError::Invalid(format!(
                "{} samples, expected {expected}",
                samples.len()
            )));
        }
        if value_kind == ValueKind::Real && samples.iter().any(|s| s.im != 0.0) {
            return Err(SignalError::Invalid("real signal with imaginary part".into()));
        }
        Ok(Self {
            window_radius,
            sample_step,
            samples,
            band,
            value_kind,
        })
    }

    /// Samples `f` on the lattice of `[-T, T]` with the given step.
    pub fn from_fn<F>(
        window_radius: f64,
        sample_step: f64,
        band: Band,
        value_kind: ValueKind,
        f: F,
    ) -> Result<Self, SignalError>
    where
        F: Fn(f64) -> Complex64 + Sync,
    {
        let n = sample_count(window_radius, sample_step);
        let samples: Vec<Complex64> = (0..n)
            .into_par_iter()
            .map(|j| {
                let v = f(-window_radius + j as f64 * sample_step);
                match value_kind {
                    ValueKind::Real => Complex64::new(v.re, 0.0),
                    ValueKind::Complex => v,
                }
            })
            .collect();
        Self::new(window_radius, sample_step, samples, band, value_kind)
    }

    /// The pure tone `x -> e^{2 pi i freq x}`, declared in `band`.
    pub fn tone(window_radius: f64, freq: f64, band: Band) -> Result<Self, SignalError> {
        Self::from_fn(
            window_radius,
            default_step(band),
            band,
            ValueKind::Complex,
            |x| Complex64::new(0.0, 2.0 * PI * freq * x).exp(),
        )
    }

    pub fn zero(window_radius: f64, sample_step: f64, band: Band) -> Result<Self, SignalError> {
        let n = sample_count(window_radius, sample_step);
        Self::new(
            window_radius,
            sample_step,
            vec![Complex64::new(0.0, 0.0); n],
            band,
            ValueKind::Real,
        )
    }

    pub fn window_radius(&self) -> f64 {
        self.window_radius
    }

    pub fn sample_step(&self) -> f64 {
        self.sample_step
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn band(&self) -> Band {
        self.band
    }

    pub fn value_kind(&self) -> ValueKind {
        self.value_kind
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn position(&self, j: usize) -> f64 {
        -self.window_radius + j as f64 * self.sample_step
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |j| self.position(j))
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }

    /// Membership predicate for `B(a)`: real, band inside `[-a/2, a/2]`, sup at most `1 + tol`.
    pub fn in_b(&self, a: f64, tol: f64) -> bool {
        self.value_kind == ValueKind::Real
            && Band::symmetric(a / 2.0).contains_band(&self.band)
            && self.sup_norm() <= 1.0 + tol
    }

    /// Membership predicate for `B1(V[a, b])`: band inside `[a, b]`, sup at most `1 + tol`.
    pub fn in_b1(&self, a: f64, b: f64, tol: f64) -> bool {
        Band::new(a, b).contains_band(&self.band) && self.sup_norm() <= 1.0 + tol
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        (self.window_radius - other.window_radius).abs() <= GRID_EPS
            && (self.sample_step - other.sample_step).abs() <= 1e-15 * self.sample_step.max(1.0)
            && self.len() == other.len()
    }

    /// Largest lattice-aligned sub-window of radius at most `radius`.
    pub fn restrict(&self, radius: f64) -> Result<Self, SignalError> {
        if radius > self.window_radius + GRID_EPS {
            return Err(SignalError::Window(format!(
                "radius {radius} exceeds window {}",
                self.window_radius
            )));
        }
        let j = ((self.window_radius - radius) / self.sample_step - GRID_EPS)
            .ceil()
            .max(0.0) as usize;
        self.trim(j)
    }

    /// Drops `j` samples at each end.
    pub fn trim(&self, j: usize) -> Result<Self, SignalError> {
        if 2 * j >= self.len() {
            return Err(SignalError::Window(format!(
                "cannot trim {j} samples from each end of {}",
                self.len()
            )));
        }
        let window_radius = self.window_radius - j as f64 * self.sample_step;
        let samples = self.samples[j..self.len() - j].to_vec();
        Ok(Self {
            window_radius,
            samples,
            ..self.clone()
        })
    }

    pub fn with_band(mut self, band: Band) -> Self {
        self.band = band;
        self
    }

    /// Pointwise combination on a shared grid.
    pub fn zip_with<F>(&self, other: &Self, band: Band, f: F) -> Result<Self, SignalError>
    where
        F: Fn(Complex64, Complex64) -> Complex64,
    {
        if !self.same_grid(other) {
            return Err(SignalError::Grid(format!(
                "radius {} step {} vs radius {} step {}",
                self.window_radius, self.sample_step, other.window_radius, other.sample_step
            )));
        }
        let samples: Vec<Complex64> = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| f(*a, *b))
            .collect();
        let real = self.value_kind == ValueKind::Real
            && other.value_kind == ValueKind::Real
            && samples.iter().all(|s| s.im == 0.0);
        let kind = if real { ValueKind::Real } else { ValueKind::Complex };
        Self::new(self.window_radius, self.sample_step, samples, band, kind)
    }

    /// Sum of two signals on a shared grid; the band is the hull of both bands.
    pub fn add(&self, other: &Self) -> Result<Self, SignalError> {
        let band = Band::new(self.band.lo.min(other.band.lo), self.band.hi.max(other.band.hi));
        self.zip_with(other, band, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SignalError> {
        let band = Band::new(self.band.lo.min(other.band.lo), self.band.hi.max(other.band.hi));
        self.zip_with(other, band, |a, b| a - b)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64, SignalError> {
        if !self.same_grid(other) {
            return Err(SignalError::Grid("max_abs_diff on different grids".into()));
        }
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Half-width (in samples) of the regularised sinc kernel that reaches
/// [`INTERPOLATION_TOLERANCE`] for a band of the given width.
pub fn interpolation_half_width(band_width: f64, step: f64) -> Result<usize, SignalError> {
    let theta = PI * band_width * step;
    if theta >= 0.95 * PI {
        return Err(SignalError::Oversampling { band_width, step });
    }
    let n = (2.0 * (1.0 / INTERPOLATION_TOLERANCE).ln() / (PI - theta)).ceil() as usize + 2;
    Ok(n)
}

fn sinc(v: f64) -> f64 {
    if v.abs() < 1e-12 {
        1.0
    } else {
        (PI * v).sin() / (PI * v)
    }
}

/// `(tau_r f)(x) = f(x + r)`.
///
/// The result lives on the sub-lattice of the input grid that keeps every
/// interpolation stencil inside the window. Shifts by a multiple of the
/// sample step are exact index shifts.
pub fn translate(f: &BandLimitedSignal, r: f64) -> Result<BandLimitedSignal, SignalError> {
    if r.abs() > f.window_radius / 4.0 {
        return Err(SignalError::Window(format!(
            "|r| = {} above a quarter of the window {}",
            r.abs(),
            f.window_radius
        )));
    }
    if r == 0.0 {
        return Ok(f.clone());
    }
    let h = f.sample_step;
    let k = (r / h).round();
    if (r - k * h).abs() <= 1e-12 * r.abs().max(1.0) {
        let k = k as i64;
        let j = k.unsigned_abs() as usize;
        let out = f.trim(j)?;
        let samples = (0..out.len())
            .map(|i| f.samples[(i as i64 + j as i64 + k) as usize])
            .collect();
        return Ok(BandLimitedSignal { samples, ..out });
    }

    let n = interpolation_half_width(f.band.width(), h)?;
    let j = (r.abs() / h).ceil() as usize + n;
    if 2 * j >= f.len() {
        return Err(SignalError::Window(format!(
            "interpolation margin of {j} samples exceeds the window"
        )));
    }
    let center = f.band.center();
    let demod: Vec<Complex64> = f
        .positions()
        .zip(&f.samples)
        .map(|(x, s)| s * Complex64::new(0.0, -2.0 * PI * center * x).exp())
        .collect();
    let sigma2 = (n as f64 - 1.0) / (PI - PI * f.band.width() * h);
    let out_len = f.len() - 2 * j;
    let t0 = f.window_radius;
    let samples: Vec<Complex64> = (0..out_len)
        .into_par_iter()
        .map(|i| {
            let t = f.position(i + j) + r;
            let u = (t + t0) / h;
            let m0 = u.floor() as i64;
            let mut acc = Complex64::new(0.0, 0.0);
            for m in (m0 - n as i64 + 1)..=(m0 + n as i64) {
                let v = u - m as f64;
                let w = sinc(v) * (-v * v / (2.0 * sigma2)).exp();
                acc += demod[m as usize] * w;
            }
            let s = acc * Complex64::new(0.0, 2.0 * PI * center * t).exp();
            match f.value_kind {
                ValueKind::Real => Complex64::new(s.re, 0.0),
                ValueKind::Complex => s,
            }
        })
        .collect();
    Ok(BandLimitedSignal {
        window_radius: f.window_radius - j as f64 * h,
        sample_step: h,
        samples,
        band: f.band,
        value_kind: f.value_kind,
    })
}

/// Trims the longer of two signals on one lattice so both share a window.
pub fn common_window(
    a: &BandLimitedSignal,
    b: &BandLimitedSignal,
) -> Result<(BandLimitedSignal, BandLimitedSignal), SignalError> {
    let (la, lb) = (a.len(), b.len());
    let a = if la > lb { a.trim((la - lb) / 2)? } else { a.clone() };
    let b = if lb > la { b.trim((lb - la) / 2)? } else { b.clone() };
    if !a.same_grid(&b) {
        return Err(SignalError::Grid(format!(
            "windows {} and {} are not on one lattice",
            a.window_radius, b.window_radius
        )));
    }
    Ok((a, b))
}

/// Truncated metric: partial sum to `depth` and a bound on the discarded tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub value: f64,
    pub tail_bound: f64,
}

/// `sum_{n <= depth} sup_{|x| <= n} |f - g| / 2^n`.
pub fn metric_d(
    f: &BandLimitedSignal,
    g: &BandLimitedSignal,
    depth: u32,
) -> Result<MetricValue, SignalError> {
    if !f.same_grid(g) {
        return Err(SignalError::Grid(format!(
            "radius {} step {} vs radius {} step {}",
            f.window_radius, f.sample_step, g.window_radius, g.sample_step
        )));
    }
    if f.window_radius + GRID_EPS < depth as f64 {
        return Err(SignalError::Window(format!(
            "window {} below depth {depth}",
            f.window_radius
        )));
    }
    let mut sup = vec![0.0f64; depth as usize + 1];
    for (j, (a, b)) in f.samples.iter().zip(&g.samples).enumerate() {
        let x = f.position(j).abs();
        let first = (x - GRID_EPS).ceil().max(1.0) as usize;
        if first <= depth as usize {
            let d = (a - b).norm();
            if d > sup[first] {
                sup[first] = d;
            }
        }
    }
    let mut value = 0.0;
    let mut running = 0.0f64;
    let mut weight = 1.0;
    for s in sup.iter().skip(1) {
        running = running.max(*s);
        weight *= 0.5;
        value += running * weight;
    }
    let tail_bound = (f.sup_norm() + g.sup_norm()) * 0.5f64.powi(depth as i32);
    Ok(MetricValue { value, tail_bound })
}

fn blackman_harris(n: usize) -> Vec<f64> {
    let (a0, a1, a2, a3) = (0.35875, 0.48829, 0.14128, 0.01168);
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|j| {
            let p = 2.0 * PI * j as f64 / (n - 1) as f64;
            a0 - a1 * p.cos() + a2 * (2.0 * p).cos() - a3 * (3.0 * p).cos()
        })
        .collect()
}

/// Spectral width added on each side of a band to absorb the taper's main lobe.
pub fn taper_width(f: &BandLimitedSignal) -> f64 {
    4.0 / (f.len() as f64 * f.sample_step)
}

/// Tapered periodogram as (frequency, energy) pairs.
pub fn periodogram(f: &BandLimitedSignal) -> Vec<(f64, f64)> {
    let n = f.len();
    let taper = blackman_harris(n);
    let mut buf: Vec<Complex64> = f.samples.iter().zip(&taper).map(|(s, w)| s * w).collect();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let df = 1.0 / (n as f64 * f.sample_step);
    buf.iter()
        .enumerate()
        .map(|(k, c)| {
            let kk = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            (kk * df, c.norm_sqr())
        })
        .collect()
}

/// Fraction of tapered spectral energy outside the union of `bands`, each
/// widened by the taper width.
pub fn fourier_leakage_bands(f: &BandLimitedSignal, bands: &[Band]) -> f64 {
    if f.sup_norm() == 0.0 {
        return 0.0;
    }
    let tw = taper_width(f);
    let mut total = 0.0;
    let mut outside = 0.0;
    for (freq, e) in periodogram(f) {
        total += e;
        if !bands.iter().any(|b| freq >= b.lo - tw && freq <= b.hi + tw) {
            outside += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        outside / total
    }
}

/// Fraction of tapered spectral energy outside `band` (widened by the taper width).
pub fn fourier_leakage(f: &BandLimitedSignal, band: Band) -> f64 {
    fourier_leakage_bands(f, &[band])
}

/// `phi -> (phi + conj(phi)) / 2`, mapping `B1(V[a, b])` into `B(2b)`.
pub fn b1_to_real(f: &BandLimitedSignal) -> Result<BandLimitedSignal, SignalError> {
    let band = f.band;
    if !(band.lo > 0.0 && band.lo < band.hi) {
        return Err(SignalError::Parameter(format!(
            "band [{}, {}] is not a positive interval",
            band.lo, band.hi
        )));
    }
    let samples = f.samples.iter().map(|s| Complex64::new(s.re, 0.0)).collect();
    BandLimitedSignal::new(
        f.window_radius,
        f.sample_step,
        samples,
        Band::symmetric(band.hi),
        ValueKind::Real,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone_at(freq: f64, band: Band, t: f64) -> BandLimitedSignal {
        BandLimitedSignal::tone(t, freq, band).unwrap()
    }

    #[test]
    fn sample_count_matches_lattice() {
        assert_eq!(sample_count(1.0, 0.25), 9);
        assert_eq!(sample_count(1.0, 0.3), 7);
        let f = tone_at(0.3, Band::symmetric(0.5), 10.0);
        assert_eq!(f.len(), 41);
        assert!((f.position(40) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn nyquist_is_enforced() {
        let err = BandLimitedSignal::new(1.0, 0.5, vec![Complex64::new(0.0, 0.0); 5], Band::symmetric(2.0), ValueKind::Real);
        assert!(err.is_err());
    }

    #[test]
    fn translate_zero_is_identity() {
        let f = tone_at(0.37, Band::symmetric(0.5), 20.0);
        assert_eq!(translate(&f, 0.0).unwrap(), f);
    }

    #[test]
    fn translate_tone_is_phase_shift() {
        let band = Band::new(1.0, 1.4);
        let xi = 1.23;
        let f = tone_at(xi, band, 40.0);
        for r in [0.31, -1.7, 4.05] {
            let g = translate(&f, r).unwrap();
            let phase = Complex64::new(0.0, 2.0 * PI * xi * r).exp();
            for (x, v) in g.positions().zip(g.samples()) {
                let expect = phase * Complex64::new(0.0, 2.0 * PI * xi * x).exp();
                assert!((v - expect).norm() < 1e-8, "r={r} x={x}");
            }
        }
    }

    #[test]
    fn lattice_translate_is_exact() {
        let f = tone_at(0.2, Band::symmetric(0.5), 10.0);
        let h = f.sample_step();
        let g = translate(&f, 3.0 * h).unwrap();
        assert_eq!(g.len(), f.len() - 6);
        assert_eq!(g.samples()[0], f.samples()[6]);
    }

    #[test]
    fn translate_rejects_large_shift() {
        let f = tone_at(0.2, Band::symmetric(0.5), 8.0);
        assert!(matches!(translate(&f, 2.5), Err(SignalError::Window(_))));
    }

    #[test]
    fn metric_of_constant_gap() {
        let band = Band::symmetric(0.5);
        let f = BandLimitedSignal::from_fn(30.0, 0.5, band, ValueKind::Real, |_| Complex64::new(0.25, 0.0)).unwrap();
        let g = BandLimitedSignal::zero(30.0, 0.5, band).unwrap();
        let d = metric_d(&f, &g, 25).unwrap();
        assert!((d.value - 0.25 * (1.0 - 0.5f64.powi(25))).abs() < 1e-15);
        assert!((d.value + d.tail_bound - 0.25).abs() < 1e-6);
        assert_eq!(metric_d(&f, &f, 25).unwrap().value, 0.0);
    }

    #[test]
    fn metric_rejects_mismatched_grid() {
        let band = Band::symmetric(0.5);
        let f = BandLimitedSignal::zero(30.0, 0.5, band).unwrap();
        let g = BandLimitedSignal::zero(30.0, 0.25, band).unwrap();
        assert!(matches!(metric_d(&f, &g, 5), Err(SignalError::Grid(_))));
        assert!(matches!(metric_d(&f, &f, 31), Err(SignalError::Window(_))));
    }

    #[test]
    fn leakage_of_tones() {
        let band = Band::new(-0.5, 0.5);
        let inside = BandLimitedSignal::from_fn(200.0, 0.25, Band::symmetric(1.0), ValueKind::Complex, |x| {
            Complex64::new(0.0, 2.0 * PI * 0.3 * x).exp()
        })
        .unwrap();
        assert!(fourier_leakage(&inside, band) < 1e-3);
        let outside = BandLimitedSignal::from_fn(200.0, 0.25, Band::symmetric(1.0), ValueKind::Complex, |x| {
            Complex64::new(0.0, 2.0 * PI * 1.0 * x).exp()
        })
        .unwrap();
        assert!(fourier_leakage(&outside, band) > 0.5);
        let zero = BandLimitedSignal::zero(50.0, 0.25, band).unwrap();
        assert_eq!(fourier_leakage(&zero, band), 0.0);
    }

    #[test]
    fn realification_of_tone_is_cosine() {
        let f = tone_at(1.2, Band::new(1.0, 1.4), 30.0);
        let g = b1_to_real(&f).unwrap();
        assert_eq!(g.value_kind(), ValueKind::Real);
        assert_eq!(g.band(), Band::symmetric(1.4));
        for (x, v) in g.positions().zip(g.samples()) {
            assert!((v.re - (2.0 * PI * 1.2 * x).cos()).abs() < 1e-10);
        }
        let again = b1_to_real(&g.clone().with_band(Band::new(1.0, 1.4))).unwrap();
        assert_eq!(again.samples(), g.samples());
    }

    #[test]
    fn realification_needs_positive_band() {
        let f = tone_at(0.1, Band::symmetric(0.5), 10.0);
        assert!(matches!(b1_to_real(&f), Err(SignalError::Parameter(_))));
    }

    #[test]
    fn restrict_stays_on_lattice() {
        let f = tone_at(0.1, Band::symmetric(0.5), 10.0);
        let g = f.restrict(7.3).unwrap();
        assert!(g.window_radius() <= 7.3 + 1e-12);
        assert!((g.window_radius() - 7.0).abs() < 1e-12);
        assert_eq!(g.samples()[0], f.samples()[6]);
    }
}
