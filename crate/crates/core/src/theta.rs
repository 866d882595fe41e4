//! The zero-placing factor `e^{i pi b z} sin(pi z / L)` and the constants
//! derived from it: the disk radius, the off-disk modulus bound and the
//! kernel truncation radius.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::signals::{self, KernelTail, SignalError, SpectralKernel};
use crate::tiling;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThetaError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("certified modulus bound {0:e} is not positive")]
    NonPositive(f64),
    #[error("no truncation radius up to {max_e} satisfies the tail inequality")]
    SearchExhausted { max_e: f64 },
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// Default points per radius on the disk grid of [`select_r1`].
pub const R1_POINTS_PER_RADIUS: usize = 100;
/// Safety factor on the truncation inequality of [`select_e`].
pub const E_SAFETY: f64 = 1.1;
/// Default grid step of [`theta_lower_bound`].
pub const THETA_GRID_STEP: f64 = 0.01;

/// `e^{i pi b z} sin(pi z / L)`.
pub fn theta(z: Complex64, l: f64, b: f64) -> Complex64 {
    (Complex64::new(0.0, PI * b) * z).exp() * (z * (PI / l)).sin()
}

/// `|theta(x + iy)| = e^{-pi b y} sqrt(sin^2(pi x / L) + sinh^2(pi y / L))`.
pub fn theta_modulus(z: Complex64, l: f64, b: f64) -> f64 {
    let s = (PI * z.re / l).sin();
    let sh = (PI * z.im / l).sinh();
    (-PI * b * z.im).exp() * (s * s + sh * sh).sqrt()
}

/// `sup_{|Im z| <= 1} |theta| = e^{pi b} cosh(pi / L)`, attained at `y = -1`, `x = L/2`.
pub fn theta_sup_norm(l: f64, b: f64) -> f64 {
    (PI * b.abs()).exp() * (PI / l).cosh()
}

/// `pi |b sin(pi z / L) + cos(pi z / L) / L|`.
pub fn r1_inequality_lhs(z: Complex64, l: f64, b: f64) -> f64 {
    let w = z * (PI / l);
    PI * (w.sin() * b + w.cos() / l).norm()
}

/// Outcome of checking the disk inequality on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct R1Certificate {
    pub r1: f64,
    pub grid_step: f64,
    pub min_lhs: f64,
    pub threshold: f64,
    /// Ten times the Lipschitz bound times the largest distance to a grid point.
    pub required_margin: f64,
    pub pass: bool,
}

/// Checks `pi |b sin + cos / L| > 3 / L` on the closed disk `|z| <= r1` at grid
/// step `r1 / points_per_radius`, requiring a margin of ten grid moduli.
pub fn certify_r1(l: f64, b: f64, r1: f64, points_per_radius: usize) -> R1Certificate {
    let s = r1 / points_per_radius as f64;
    let reach = points_per_radius as i64 + 1;
    let min_lhs = (-reach..=reach)
        .into_par_iter()
        .map(|i| {
            let mut m = f64::INFINITY;
            for j in -reach..=reach {
                let z = Complex64::new(i as f64 * s, j as f64 * s);
                if z.norm() <= r1 + s {
                    m = m.min(r1_inequality_lhs(z, l, b));
                }
            }
            m
        })
        .reduce(|| f64::INFINITY, f64::min);
    let lipschitz = PI * PI / l * (b.abs() + 1.0 / l) * (PI * (r1 + s) / l).cosh();
    let required_margin = 10.0 * lipschitz * s / std::f64::consts::SQRT_2;
    let threshold = 3.0 / l;
    R1Certificate {
        r1,
        grid_step: s,
        min_lhs,
        threshold,
        required_margin,
        pass: min_lhs - threshold >= required_margin,
    }
}

/// Largest `r1 = min(1/16, 1/L) / 2^j` (`j >= 1`) below `cap` whose disk inequality is certified.
pub fn select_r1_below(
    l: f64,
    b: f64,
    points_per_radius: usize,
    cap: f64,
) -> Result<R1Certificate, ThetaError> {
    if !(l > 1.0) {
        return Err(ThetaError::Parameter(format!("L must exceed 1, got {l}")));
    }
    if points_per_radius < R1_POINTS_PER_RADIUS {
        return Err(ThetaError::Parameter(format!(
            "grid must have at least {R1_POINTS_PER_RADIUS} points per radius"
        )));
    }
    let start = (1.0f64 / 16.0).min(1.0 / l);
    for j in 1..64 {
        let r = start / 2f64.powi(j);
        if r >= cap {
            continue;
        }
        let cert = certify_r1(l, b, r, points_per_radius);
        if cert.pass {
            return Ok(cert);
        }
    }
    Err(ThetaError::Parameter(format!("no disk radius certified for L = {l}, b = {b}")))
}

/// Largest ladder radius whose disk inequality is certified.
pub fn select_r1(l: f64, b: f64, points_per_radius: usize) -> Result<R1Certificate, ThetaError> {
    select_r1_below(l, b, points_per_radius, f64::INFINITY)
}

/// Certified lower bound for `|theta|` off the disks, capped at `9 / (16 L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaBound {
    pub value: f64,
    pub uncapped: f64,
    pub cap: f64,
    pub cells: usize,
}

/// Lower bound of `|sin w|` for `|w|` in `[lo, hi]`: `2|w| - sinh|w|` is concave.
fn sin_floor(lo: f64, hi: f64) -> f64 {
    let g = |t: f64| 2.0 * t - t.sinh();
    g(lo).min(g(hi)).max(0.0)
}

/// Interval lower bound of `|theta|` on `{0 <= x <= L, |y| <= 1}` minus the
/// closed disks of radius `r1` at `0` and `L`. Uses the L-periodicity and the
/// mirror symmetry about `x = L/2` of the modulus, interval minima of the
/// monotone factors on each cell, and `|sin w| >= 2|w| - sinh|w|` next to the
/// lattice points.
pub fn theta_lower_bound(l: f64, b: f64, r1: f64, grid_step: f64) -> Result<ThetaBound, ThetaError> {
    if !(grid_step > 0.0 && r1 > 0.0 && l > 0.0) {
        return Err(ThetaError::Parameter("need positive L, r1 and grid step".into()));
    }
    let mut xs = vec![0.0];
    while *xs.last().unwrap() < 0.5 * l {
        let x = *xs.last().unwrap();
        xs.push((x + grid_step * x.max(1.0)).min(0.5 * l));
    }
    let ny = (2.0 / grid_step).ceil() as usize;
    let ys: Vec<f64> = (0..=ny).map(|j| -1.0 + 2.0 * j as f64 / ny as f64).collect();
    let sinh2 = |y: f64| (PI * y / l).sinh().powi(2);
    let uncapped = xs
        .par_windows(2)
        .map(|xw| {
            let (x0, x1) = (xw[0], xw[1]);
            let sin2 = (PI * x0 / l).sin().powi(2);
            let mut m = f64::INFINITY;
            for yw in ys.windows(2) {
                let (y0, y1) = (yw[0], yw[1]);
                let sh2 = if y0 <= 0.0 && y1 >= 0.0 { 0.0 } else { sinh2(y0).min(sinh2(y1)) };
                let decay = (-PI * b * y1).exp();
                let coarse = decay * (sin2 + sh2).sqrt();
                let ynear = if y0 <= 0.0 && y1 >= 0.0 { 0.0 } else { y0.abs().min(y1.abs()) };
                let dmin = (x0 * x0 + ynear * ynear).sqrt();
                let dmax = (x1 * x1 + y0.abs().max(y1.abs()).powi(2)).sqrt();
                if dmax <= r1 {
                    continue;
                }
                let near = decay * sin_floor(PI * dmin.max(r1) / l, PI * dmax / l);
                m = m.min(coarse.max(near));
            }
            m
        })
        .reduce(|| f64::INFINITY, f64::min);
    let cap = 9.0 / (16.0 * l);
    let value = uncapped.min(cap);
    if !(value > 0.0) {
        return Err(ThetaError::NonPositive(value));
    }
    Ok(ThetaBound {
        value,
        uncapped,
        cap,
        cells: (xs.len() - 1) * ny,
    })
}

/// Outcome of the truncation-radius search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ESelection {
    pub e: f64,
    pub tail: f64,
    pub theta_norm: f64,
    /// `||theta|| * tail(E)`, required to stay below `theta_L / 2` with the safety factor.
    pub lhs: f64,
    pub rhs: f64,
}

/// Smallest `E` on the quarter-octave ladder `2^{j/4}` with
/// `||theta|| * tail(E) * 1.1 < theta_L / 2`.
pub fn select_e_with(l: f64, b: f64, theta_l: f64, tail: &KernelTail) -> Result<ESelection, ThetaError> {
    if !(theta_l > 0.0) {
        return Err(ThetaError::Parameter(format!("theta_L must be positive, got {theta_l}")));
    }
    let norm = theta_sup_norm(l, b);
    let max_e = 0.5 * tail.horizon();
    for j in 0.. {
        let e = 2f64.powf(j as f64 / 4.0);
        if e > max_e {
            break;
        }
        let t = tail.tail(e);
        if norm * t * E_SAFETY < theta_l / 2.0 {
            return Ok(ESelection {
                e,
                tail: t,
                theta_norm: norm,
                lhs: norm * t,
                rhs: theta_l / 2.0,
            });
        }
    }
    Err(ThetaError::SearchExhausted { max_e })
}

pub fn select_e(l: f64, b: f64, theta_l: f64, kernel: &SpectralKernel) -> Result<ESelection, ThetaError> {
    select_e_with(l, b, theta_l, &KernelTail::build(kernel, 1))
}

/// The complete constant record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingParams {
    pub a: f64,
    pub delta: f64,
    pub b: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub r1: f64,
    #[serde(rename = "theta_L")]
    pub theta_l: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "K1")]
    pub k1: f64,
    #[serde(rename = "M")]
    pub m: i64,
    #[serde(rename = "M1")]
    pub m1: i64,
    #[serde(rename = "M2")]
    pub m2: f64,
    pub c: f64,
    #[serde(rename = "H")]
    pub h: f64,
}

/// Inputs of [`derive_params`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamInputs {
    pub a: f64,
    pub delta: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "M")]
    pub m: i64,
    #[serde(rename = "M1")]
    pub m1: i64,
    pub c: f64,
    /// Upper bound on the disk radius (strict).
    pub r1_cap: f64,
}

impl ParamInputs {
    pub fn new(a: f64, delta: f64, l: f64, m: i64, m1: i64, c: f64) -> Self {
        Self { a, delta, l, m, m1, c, r1_cap: f64::INFINITY }
    }
}

/// Kernel tolerance used by the derivation pipeline.
pub const KERNEL_TOLERANCE: f64 = 1e-10;

/// Runs the selection pipeline: kernel, `r1`, `theta_L`, `E`, `K1`, `M2`.
pub fn derive_params(inputs: ParamInputs) -> Result<(EmbeddingParams, SpectralKernel), ThetaError> {
    let ParamInputs { a, delta, l, m, m1, c, r1_cap } = inputs;
    if !(a > 0.0) {
        return Err(ThetaError::Parameter(format!("a must be positive, got {a}")));
    }
    let kernel = signals::make_chi1(delta, KERNEL_TOLERANCE)?;
    let b = a + delta / 2.0;
    let r1 = select_r1_below(l, b, R1_POINTS_PER_RADIUS, r1_cap)?.r1;
    let theta_l = theta_lower_bound(l, b, r1, THETA_GRID_STEP)?.value;
    let e = select_e(l, b, theta_l, &kernel)?.e;
    let k1 = signals::k1(&kernel).value;
    let h = ((m1 + 1) * (m1 + 1)) as f64;
    Ok((
        EmbeddingParams {
            a,
            delta,
            b,
            l,
            r1,
            theta_l,
            e,
            k1,
            m,
            m1,
            m2: tiling::m2(m, m1, c),
            c,
            h,
        },
        kernel,
    ))
}

/// The record with the marker constants replaced and `H`, `M2` recomputed.
pub fn with_marker_gap(p: &EmbeddingParams, m: i64, m1: i64) -> EmbeddingParams {
    EmbeddingParams {
        m,
        m1,
        h: ((m1 + 1) * (m1 + 1)) as f64,
        m2: tiling::m2(m, m1, p.c),
        ..p.clone()
    }
}

/// Coverage radius paired with a marker gap in the lemma regime.
pub fn coverage_for_gap(m: i64) -> i64 {
    (5 * m + 3) / 4
}

/// Smallest marker gap `M` (with `M1 = ceil(5M/4)`) for which `M2 > 4L + E + 1`.
pub fn min_marker_gap(l: f64, e: f64, c: f64) -> i64 {
    let target = 4.0 * l + e + 1.0;
    let mut m = ((target / (c - 1.0)).floor() as i64 - 2).max(1);
    while tiling::m2(m, coverage_for_gap(m), c) <= target {
        m += 1;
    }
    m
}

/// One named condition of [`validate_params`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamCheck {
    pub name: String,
    pub pass: bool,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamReport {
    pub checks: Vec<ParamCheck>,
    pub pass: bool,
}

impl ParamReport {
    pub fn check(&self, name: &str) -> Option<&ParamCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn check(name: &str, pass: bool, margin: f64) -> ParamCheck {
    ParamCheck { name: name.to_string(), pass, margin }
}

/// Checks every invariant of the record and recomputes the certificates.
pub fn validate_params(p: &EmbeddingParams) -> ParamReport {
    let mut checks = Vec::new();
    let b_exact = p.a + p.delta / 2.0;
    checks.push(check("b = a + delta/2", p.b == b_exact, -(p.b - b_exact).abs()));
    checks.push(check("L > 4/delta", p.l > 4.0 / p.delta, p.l - 4.0 / p.delta));
    let r_cap = (1.0f64 / 16.0).min(1.0 / p.l);
    checks.push(check(
        "0 < r1 < min(1/16, 1/L)",
        p.r1 > 0.0 && p.r1 < r_cap,
        p.r1.min(r_cap - p.r1),
    ));
    if p.r1 > 0.0 && p.l > 1.0 {
        let cert = certify_r1(p.l, p.b, p.r1, R1_POINTS_PER_RADIUS);
        checks.push(check(
            "disk inequality on |z| <= r1",
            cert.pass,
            cert.min_lhs - cert.threshold - cert.required_margin,
        ));
    } else {
        checks.push(check("disk inequality on |z| <= r1", false, f64::NAN));
    }
    let cap = 9.0 / (16.0 * p.l);
    checks.push(check(
        "0 < theta_L <= 9/(16L)",
        p.theta_l > 0.0 && p.theta_l <= cap,
        p.theta_l.min(cap - p.theta_l),
    ));
    match theta_lower_bound(p.l, p.b, p.r1, THETA_GRID_STEP) {
        Ok(bound) => checks.push(check(
            "theta_L below the off-disk modulus",
            p.theta_l <= bound.value,
            bound.value - p.theta_l,
        )),
        Err(_) => checks.push(check("theta_L below the off-disk modulus", false, f64::NAN)),
    }
    match signals::make_chi1(p.delta, KERNEL_TOLERANCE) {
        Ok(kernel) => {
            let tail = KernelTail::build(&kernel, 1);
            let lhs = theta_sup_norm(p.l, p.b) * tail.tail(p.e);
            let rhs = p.theta_l / 2.0;
            checks.push(check("tail inequality at E", p.e > 0.0 && lhs < rhs, rhs - lhs));
        }
        Err(_) => checks.push(check("tail inequality at E", false, f64::NAN)),
    }
    checks.push(check("K1 >= 1", p.k1 >= 1.0, p.k1 - 1.0));
    checks.push(check("1 < c", p.c > 1.0, p.c - 1.0));
    checks.push(check("M < M1", p.m < p.m1, (p.m1 - p.m) as f64));
    let h = ((p.m1 + 1) * (p.m1 + 1)) as f64;
    checks.push(check("H = (M1+1)^2", p.h == h, -(p.h - h).abs()));
    let m2 = tiling::m2(p.m, p.m1, p.c);
    let rel = (p.m2 - m2).abs() / m2.abs().max(f64::MIN_POSITIVE);
    checks.push(check("M2 = (c-1)HM/(H+2)", rel <= 1e-12, -rel));
    let target = 4.0 * p.l + p.e + 1.0;
    checks.push(check("M2 > 4L + E + 1", p.m2 > target, p.m2 - target));
    let pass = checks.iter().all(|c| c.pass);
    ParamReport { checks, pass }
}

#[cfg(test)]
mod tests {
    use super::*;

    const L: f64 = 10.0;
    const B: f64 = 2.4;

    #[test]
    fn lattice_zeros_and_half_period() {
        for k in -3..=3 {
            assert!(theta(Complex64::new(L * k as f64, 0.0), L, B).norm() < 1e-14);
        }
        let v = theta(Complex64::new(L / 2.0, 0.0), L, B);
        assert!((v.norm() - 1.0).abs() < 1e-15);
        let expect = Complex64::new(0.0, PI * B * L / 2.0).exp();
        assert!((v - expect).norm() < 1e-14);
    }

    #[test]
    fn sup_norm_is_attained() {
        let v = theta_modulus(Complex64::new(L / 2.0, -1.0), L, B);
        assert!((v - theta_sup_norm(L, B)).abs() < 1e-9 * v);
    }

    #[test]
    fn center_of_disk_inequality() {
        let v = r1_inequality_lhs(Complex64::new(0.0, 0.0), L, B);
        assert!((v - PI / L).abs() < 1e-15);
        assert!(v > 3.0 / L);
    }

    #[test]
    fn r1_for_default_parameters() {
        let cert = select_r1(L, 1.2, R1_POINTS_PER_RADIUS).unwrap();
        assert!(cert.r1 < 1.0 / 16.0 && cert.r1 < 1.0 / L);
        let fine = certify_r1(L, 1.2, cert.r1, 10 * R1_POINTS_PER_RADIUS);
        assert!(fine.min_lhs > fine.threshold);
        let default = select_r1(L, B, R1_POINTS_PER_RADIUS).unwrap();
        assert_eq!(default.r1, 2f64.powi(-8));
    }

    #[test]
    fn r1_shrinks_with_l() {
        for l in [5.0, 20.0, 100.0, 1000.0] {
            let r = select_r1(l, B, R1_POINTS_PER_RADIUS).unwrap().r1;
            assert!(r < 1.0 / l);
        }
        assert!(select_r1(1.0, B, R1_POINTS_PER_RADIUS).is_err());
    }

    #[test]
    fn r1_cap_is_respected() {
        let r = select_r1_below(L, B, R1_POINTS_PER_RADIUS, 1e-3).unwrap().r1;
        assert!(r < 1e-3);
    }

    #[test]
    fn theta_bound_matches_corner_value() {
        let r1 = select_r1(L, B, R1_POINTS_PER_RADIUS).unwrap().r1;
        let bound = theta_lower_bound(L, B, r1, THETA_GRID_STEP).unwrap();
        let corner = (-PI * B).exp() * (PI / L).sinh();
        assert!(bound.value <= corner);
        assert!(bound.value > 0.97 * corner, "{} vs {corner}", bound.value);
        assert!(bound.value <= 9.0 / (16.0 * L));
        let finer = theta_lower_bound(L, B, r1, THETA_GRID_STEP / 4.0).unwrap();
        assert!((finer.value - bound.value).abs() < 0.05 * finer.value);
    }

    #[test]
    fn theta_bound_holds_on_disk_boundary() {
        for (l, b) in [(L, 1.2), (L, B), (64.0, 1.06)] {
            let r1 = select_r1(l, b, R1_POINTS_PER_RADIUS).unwrap().r1;
            let bound = theta_lower_bound(l, b, r1, THETA_GRID_STEP).unwrap().value;
            for k in 0..720 {
                let t = 2.0 * PI * k as f64 / 720.0;
                for c in [0.0, l] {
                    let z = Complex64::new(c + r1 * t.cos(), r1 * t.sin());
                    assert!(theta(z, l, b).norm() >= bound);
                }
            }
        }
    }

    #[test]
    fn e_selection_default() {
        let kernel = signals::make_chi1(0.8, KERNEL_TOLERANCE).unwrap();
        let r1 = select_r1(L, B, R1_POINTS_PER_RADIUS).unwrap().r1;
        let theta_l = theta_lower_bound(L, B, r1, THETA_GRID_STEP).unwrap().value;
        let sel = select_e(L, B, theta_l, &kernel).unwrap();
        assert_eq!(sel.e, 512.0);
        let fine = KernelTail::build(&kernel, 4);
        assert!(theta_sup_norm(L, B) * fine.tail(sel.e) < theta_l / 2.0);
        let doubled = select_e(L, B, 2.0 * theta_l, &kernel).unwrap();
        assert!(doubled.e <= sel.e);
    }

    #[test]
    fn marker_gap_for_condition() {
        let m = min_marker_gap(L, 512.0, 1.02);
        let m1 = coverage_for_gap(m);
        assert!(m1 > m);
        assert!(tiling::m2(m, m1, 1.02) > 4.0 * L + 513.0);
        assert!(tiling::m2(m - 1, coverage_for_gap(m - 1), 1.02) <= 4.0 * L + 513.0);
    }
}
