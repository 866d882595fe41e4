//! The smoothing kernel whose Fourier transform is a compact bump of unit height.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::SignalError;
use crate::quadrature;

/// FFT length of the base tail table.
const TAIL_FFT_LEN: usize = 1 << 16;
/// Samples per unit of `1 / half_width` in the base tail table.
const TAIL_SAMPLES_PER_WIDTH: f64 = 40.0;
/// Imaginary-part slices per unit in the base tail table.
const TAIL_Y_SLICES: usize = 8;
/// Relative resynchronisation period of the exponential recurrences.
const RESYNC: usize = 32;

/// Smooth even bump in frequency, `exp(1 - 1/(1 - (xi/w)^2))` on `|xi| < w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralKernel {
    pub half_width: f64,
    pub amplitude: f64,
    pub quadrature_tolerance: f64,
}

/// Kernel for the spectral gap `delta`: half-width `delta / 8`, unit profile at 0.
pub fn make_chi1(delta: f64, tolerance: f64) -> Result<SpectralKernel, SignalError> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(SignalError::Parameter(format!("delta must be positive, got {delta}")));
    }
    if !(tolerance > 0.0) {
        return Err(SignalError::Parameter(format!("tolerance must be positive, got {tolerance}")));
    }
    Ok(SpectralKernel {
        half_width: delta / 8.0,
        amplitude: 1.0,
        quadrature_tolerance: tolerance,
    })
}

impl SpectralKernel {
    pub fn profile(&self, xi: f64) -> f64 {
        let s = xi / self.half_width;
        if s.abs() >= 1.0 {
            0.0
        } else {
            self.amplitude * (1.0 - 1.0 / (1.0 - s * s)).exp()
        }
    }

    /// Same kernel with amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            amplitude: self.amplitude * factor,
            ..*self
        }
    }

    /// `int chi_1 = profile(0)`.
    pub fn total_integral(&self) -> f64 {
        self.amplitude
    }
}

/// `chi_1(x)` by adaptive quadrature of the inverse Fourier integral.
pub fn eval_chi1(kernel: &SpectralKernel, x: f64) -> f64 {
    eval_chi1_complex(kernel, Complex64::new(x, 0.0))
        .expect("real arguments lie in the strip")
        .re
}

/// Analytic continuation of `chi_1` to the strip `|Im z| <= 1`.
pub fn eval_chi1_complex(kernel: &SpectralKernel, z: Complex64) -> Result<Complex64, SignalError> {
    if z.im.abs() > 1.0 + 1e-12 {
        return Err(SignalError::Domain(z));
    }
    let q = quadrature::integrate(
        |xi| (Complex64::new(2.0 * PI * xi, 0.0) * z).cos() * (2.0 * kernel.profile(xi)),
        0.0,
        kernel.half_width,
        kernel.quadrature_tolerance,
    )?;
    Ok(q.value)
}

/// Periodised trapezoid evaluation of `chi_1` and of its primitive.
///
/// For a band-limited kernel the trapezoid sum over frequencies `k / P` equals
/// the `P`-periodisation of the time-domain function, so values at `|Re s|`
/// well below `P` are exact up to the kernel tail beyond `P - |Re s|`.
#[derive(Debug, Clone)]
pub struct KernelPrimitive {
    period: f64,
    amplitude: f64,
    coeffs: Vec<f64>,
}

impl KernelPrimitive {
    pub fn new(kernel: &SpectralKernel, period: f64) -> Self {
        let count = (kernel.half_width * period).ceil() as usize;
        let coeffs = (0..=count)
            .map(|k| kernel.profile(k as f64 / period) / period)
            .collect();
        Self {
            period,
            amplitude: kernel.amplitude,
            coeffs,
        }
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn terms(&self) -> usize {
        self.coeffs.len()
    }

    /// `chi_1(s)`.
    pub fn chi(&self, s: Complex64) -> Complex64 {
        let base = Complex64::new(0.0, 2.0 * PI / self.period) * s;
        let step = base.exp();
        let step_inv = 1.0 / step;
        let mut e = Complex64::new(1.0, 0.0);
        let mut e_inv = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(self.coeffs[0], 0.0);
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            if k % RESYNC == 0 {
                e = (base * k as f64).exp();
                e_inv = 1.0 / e;
            } else {
                e *= step;
                e_inv *= step_inv;
            }
            acc += (e + e_inv) * *c;
        }
        acc
    }

    /// `int_{-inf}^{s} chi_1`.
    pub fn primitive(&self, s: Complex64) -> Complex64 {
        let base = Complex64::new(0.0, 2.0 * PI / self.period) * s;
        let step = base.exp();
        let step_inv = 1.0 / step;
        let mut e = Complex64::new(1.0, 0.0);
        let mut e_inv = Complex64::new(1.0, 0.0);
        let mut acc = s * self.coeffs[0];
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            if k % RESYNC == 0 {
                e = (base * k as f64).exp();
                e_inv = 1.0 / e;
            } else {
                e *= step;
                e_inv *= step_inv;
            }
            let xi = k as f64 / self.period;
            acc += (e - e_inv) * Complex64::new(0.0, -c / (2.0 * PI * xi));
        }
        acc + 0.5 * self.amplitude
    }
}

/// Cubic Hermite table of the primitive on the real segment `[-R, R]`,
/// sampled from the same periodised series by one inverse FFT.
#[derive(Debug, Clone)]
pub struct RealPrimitiveTable {
    start: f64,
    step: f64,
    slope: f64,
    offset: f64,
    /// `(Q, chi)` where `Q` is the periodic part of the primitive.
    nodes: Vec<(f64, f64)>,
}

impl RealPrimitiveTable {
    /// Node spacing at most `max_step`, covering `[-radius, radius]`.
    pub fn new(engine: &KernelPrimitive, radius: f64, max_step: f64) -> Self {
        let n = ((engine.period / max_step).ceil() as usize).next_power_of_two();
        let step = engine.period / n as f64;
        let mut chi = vec![Complex64::new(0.0, 0.0); n];
        let mut prim = vec![Complex64::new(0.0, 0.0); n];
        chi[0] = Complex64::new(engine.coeffs[0], 0.0);
        for (k, c) in engine.coeffs.iter().enumerate().skip(1) {
            let xi = k as f64 / engine.period;
            let q = Complex64::new(0.0, -c / (2.0 * PI * xi));
            chi[k % n] += *c;
            chi[(n - k % n) % n] += *c;
            prim[k % n] += q;
            prim[(n - k % n) % n] -= q;
        }
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_inverse(n);
        fft.process(&mut chi);
        fft.process(&mut prim);
        let half = ((radius / step).ceil() as usize + 2).min(n / 2 - 1);
        let nodes = (0..=2 * half)
            .map(|i| {
                let j = (i + n - half) % n;
                (prim[j].re, chi[j].re - engine.coeffs[0])
            })
            .collect();
        Self {
            start: -(half as f64) * step,
            step,
            slope: engine.coeffs[0],
            offset: 0.5 * engine.amplitude,
            nodes,
        }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Whether `s` lies strictly inside the tabulated segment.
    pub fn covers(&self, s: f64) -> bool {
        s > self.start && s < self.start + (self.nodes.len() - 1) as f64 * self.step
    }

    /// `int_{-inf}^{s} chi_1` for real `s` inside the table.
    pub fn primitive(&self, s: f64) -> f64 {
        let u = (s - self.start) / self.step;
        let j = (u.floor() as usize).min(self.nodes.len() - 2);
        let t = u - j as f64;
        let (p0, m0) = self.nodes[j];
        let (p1, m1) = self.nodes[j + 1];
        let t2 = t * t;
        let t3 = t2 * t;
        let q = (2.0 * t3 - 3.0 * t2 + 1.0) * p0
            + (t3 - 2.0 * t2 + t) * self.step * m0
            + (-2.0 * t3 + 3.0 * t2) * p1
            + (t3 - t2) * self.step * m1;
        self.offset + self.slope * s + q
    }
}

/// Table of `sup_{|y| <= 1} int_{|t| > R} |chi_1(t + i y)| dt` on a grid of radii.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelTail {
    pub step: f64,
    pub y_slices: usize,
    tail: Vec<f64>,
}

impl KernelTail {
    /// Tail table at `oversample` times the base resolution in both the radius
    /// and the imaginary direction.
    pub fn build(kernel: &SpectralKernel, oversample: usize) -> Self {
        let oversample = oversample.max(1);
        let n = TAIL_FFT_LEN * oversample;
        let du = 1.0 / (TAIL_SAMPLES_PER_WIDTH * kernel.half_width * oversample as f64);
        let period = n as f64 * du;
        let half = n / 2;
        let slices = TAIL_Y_SLICES * oversample;
        let per_slice: Vec<Vec<f64>> = (0..=slices)
            .into_par_iter()
            .map(|iy| {
                let y = iy as f64 / slices as f64;
                let mut buf = vec![Complex64::new(0.0, 0.0); n];
                for (k, slot) in buf.iter_mut().enumerate() {
                    let kk = if k <= half { k as f64 } else { k as f64 - n as f64 };
                    let xi = kk / period;
                    let p = kernel.profile(xi);
                    if p != 0.0 {
                        *slot = Complex64::new(p * (-2.0 * PI * xi * y).exp() / period, 0.0);
                    }
                }
                let mut planner = FftPlanner::<f64>::new();
                planner.plan_fft_inverse(n).process(&mut buf);
                let mut tail = vec![0.0; half + 1];
                let mut acc = 0.0;
                for j in (0..half).rev() {
                    acc += 0.5 * (buf[j].norm() + buf[j + 1].norm()) * du;
                    tail[j] = 2.0 * acc;
                }
                tail
            })
            .collect();
        let tail = (0..=half)
            .map(|j| per_slice.iter().map(|t| t[j]).fold(0.0, f64::max))
            .collect();
        Self {
            step: du,
            y_slices: slices,
            tail,
        }
    }

    pub fn horizon(&self) -> f64 {
        (self.tail.len() - 1) as f64 * self.step
    }

    /// Tail at radius `r`, rounded down to the grid so the value is an upper bound.
    pub fn tail(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return self.tail[0];
        }
        let j = ((r / self.step).floor() as usize).min(self.tail.len() - 1);
        self.tail[j]
    }

    /// Smallest grid radius whose tail is strictly below `bound`.
    pub fn radius_for(&self, bound: f64) -> Option<f64> {
        self.tail
            .iter()
            .position(|t| *t < bound)
            .map(|j| j as f64 * self.step)
    }
}

/// `K_1 = int |chi_1|` with the radius where the integral was truncated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct K1Estimate {
    pub value: f64,
    pub truncation_radius: f64,
    pub error_bound: f64,
}

/// Relative tail level at which the `K_1` integral is truncated.
pub const K1_TAIL_LEVEL: f64 = 1e-12;

/// `int |chi_1|`: adaptive quadrature between consecutive sign changes out to
/// the radius where the tail drops below [`K1_TAIL_LEVEL`] times the amplitude.
pub fn k1(kernel: &SpectralKernel) -> K1Estimate {
    let tail = KernelTail::build(kernel, 1);
    let radius = tail
        .radius_for(K1_TAIL_LEVEL * kernel.amplitude)
        .unwrap_or_else(|| tail.horizon());
    let engine = KernelPrimitive::new(kernel, 4.0 * radius.max(1.0 / kernel.half_width));
    let chi = |x: f64| engine.chi(Complex64::new(x, 0.0)).re;

    let du = 1.0 / (TAIL_SAMPLES_PER_WIDTH * kernel.half_width);
    let steps = (radius / du).ceil() as usize;
    let mut breaks = vec![0.0];
    let mut prev = chi(0.0);
    for j in 1..=steps {
        let x = j as f64 * du;
        let v = chi(x);
        if v == 0.0 || v.signum() != prev.signum() {
            let (mut lo, mut hi) = (x - du, x);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if chi(mid).signum() == prev.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            breaks.push(0.5 * (lo + hi));
        }
        prev = v;
    }
    let end = steps as f64 * du;
    breaks.push(end);
    let tol = kernel.quadrature_tolerance * kernel.amplitude;
    let pieces: Vec<(f64, f64)> = breaks
        .windows(2)
        .map(|w| {
            let (v, e) = quadrature::integrate_real(&chi, w[0], w[1], tol / breaks.len() as f64)
                .expect("bounded smooth integrand");
            (v.abs(), e)
        })
        .collect();
    let half: f64 = pieces.iter().map(|p| p.0).sum();
    let err: f64 = pieces.iter().map(|p| p.1).sum();
    let tail_end = tail.tail(end);
    K1Estimate {
        value: 2.0 * half + tail_end,
        truncation_radius: end,
        error_bound: 2.0 * err + tail_end,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kernel() -> SpectralKernel {
        make_chi1(0.8, 1e-10).unwrap()
    }

    #[test]
    fn half_width_and_profile() {
        let k = kernel();
        assert!((k.half_width - 0.1).abs() < 1e-15);
        assert_eq!(k.profile(0.0), 1.0);
        assert_eq!(k.profile(0.1), 0.0);
        assert_eq!(k.profile(-0.2), 0.0);
        assert!(k.profile(0.05) > 0.0 && k.profile(0.05) < 1.0);
        assert!(make_chi1(0.0, 1e-9).is_err());
        assert!(make_chi1(-1.0, 1e-9).is_err());
    }

    #[test]
    fn value_at_zero_is_profile_integral() {
        let k = kernel();
        let (area, _) = quadrature::integrate_real(|x| k.profile(x), -0.1, 0.1, 1e-13).unwrap();
        assert!((eval_chi1(&k, 0.0) - area).abs() < 1e-10);
        assert!(area > 0.0);
    }

    #[test]
    fn evenness() {
        let k = kernel();
        for x in [0.5, 1.0, 5.0, 37.3] {
            assert!((eval_chi1(&k, x) - eval_chi1(&k, -x)).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_dense_riemann_sum() {
        let k = kernel();
        let n = 1_000_000;
        let h = 2.0 * k.half_width / n as f64;
        let x = 3.7;
        let riemann: f64 = (0..n)
            .map(|j| {
                let xi = -k.half_width + (j as f64 + 0.5) * h;
                k.profile(xi) * (2.0 * PI * xi * x).cos() * h
            })
            .sum();
        assert!((eval_chi1(&k, x) - riemann).abs() < 1e-8);
    }

    #[test]
    fn strip_is_enforced() {
        let k = kernel();
        assert!(eval_chi1_complex(&k, Complex64::new(0.0, 1.5)).is_err());
        let z = Complex64::new(2.0, 0.7);
        let v = eval_chi1_complex(&k, z).unwrap();
        let w = eval_chi1_complex(&k, z.conj()).unwrap();
        assert!((v - w.conj()).norm() < 1e-12);
    }

    #[test]
    fn trapezoid_engine_agrees_with_quadrature() {
        let k = kernel();
        let engine = KernelPrimitive::new(&k, 4096.0);
        for z in [
            Complex64::new(0.0, 0.0),
            Complex64::new(3.7, 0.0),
            Complex64::new(-41.2, 0.9),
            Complex64::new(250.0, -1.0),
        ] {
            let a = engine.chi(z);
            let b = eval_chi1_complex(&k, z).unwrap();
            assert!((a - b).norm() < 1e-10, "{z}: {a} vs {b}");
        }
    }

    #[test]
    fn primitive_limits_and_derivative() {
        let k = kernel();
        let engine = KernelPrimitive::new(&k, 8192.0);
        assert!((engine.primitive(Complex64::new(0.0, 0.0)).re - 0.5).abs() < 1e-14);
        assert!((engine.primitive(Complex64::new(1500.0, 0.0)).re - 1.0).abs() < 1e-11);
        assert!(engine.primitive(Complex64::new(-1500.0, 0.0)).re.abs() < 1e-11);
        let z = Complex64::new(12.3, 0.4);
        let h = 1e-4;
        let fd = (engine.primitive(z + h) - engine.primitive(z - h)) / (2.0 * h);
        assert!((fd - engine.chi(z)).norm() < 1e-9);
    }

    #[test]
    fn total_integral_by_tail_radius() {
        let k = kernel();
        let tail = KernelTail::build(&k, 1);
        let r = tail.radius_for(1e-7).unwrap();
        let engine = KernelPrimitive::new(&k, 4.0 * r);
        let coarse = quadrature::integrate_real(|x| engine.chi(Complex64::new(x, 0.0)).re, -r, r, 1e-9)
            .unwrap()
            .0;
        let fine = quadrature::integrate_real(|x| engine.chi(Complex64::new(x, 0.0)).re, -r, r, 1e-12)
            .unwrap()
            .0;
        assert!((coarse - fine).abs() < 1e-9);
        assert!((fine - 1.0).abs() < 1e-6);
    }

    #[test]
    fn tail_is_monotone_and_refines() {
        let k = kernel();
        let t1 = KernelTail::build(&k, 1);
        for r in [10.0, 100.0, 400.0, 512.0] {
            assert!(t1.tail(r + 1.0) < t1.tail(r));
        }
        let t4 = KernelTail::build(&k, 4);
        let (a, b) = (t1.tail(512.0), t4.tail(512.0));
        assert!((a - b).abs() < 0.05 * a, "{a} vs {b}");
    }

    #[test]
    fn k1_bounds_and_homogeneity() {
        let k = kernel();
        let est = k1(&k);
        assert!(est.value >= 1.0);
        assert!(est.error_bound < 1e-8);
        assert!((est.value - 1.2286).abs() < 1e-3, "{}", est.value);
        let doubled = k1(&k.scaled(2.0));
        assert!((doubled.value - 2.0 * est.value).abs() < 1e-8);
    }

    #[test]
    fn k1_is_scale_invariant() {
        let a = k1(&make_chi1(0.8, 1e-10).unwrap()).value;
        let b = k1(&make_chi1(0.2, 1e-10).unwrap()).value;
        assert!((a - b).abs() < 1e-7, "{a} vs {b}");
    }

    #[test]
    fn real_table_agrees_with_series() {
        let engine = KernelPrimitive::new(&kernel(), 4000.0);
        let table = RealPrimitiveTable::new(&engine, 1000.0, 5e-3);
        assert!(table.step() <= 5e-3);
        assert!(table.covers(-1000.0) && table.covers(1000.0) && !table.covers(1500.0));
        let mut worst = 0.0f64;
        for i in 0..=4000 {
            let s = -1000.0 + i as f64 * 0.5 + 0.1234;
            let exact = engine.primitive(Complex64::new(s, 0.0)).re;
            worst = worst.max((table.primitive(s) - exact).abs());
        }
        assert!(worst < 1e-10, "{worst}");
    }
}
