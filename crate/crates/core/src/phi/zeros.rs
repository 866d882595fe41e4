//! Zero counting by the argument principle and the off-disk modulus certificate.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{PhiError, PhiFunction};
use crate::tiling::{self, Interval};

/// Nodes on each circle before refinement.
pub const WINDING_NODES: usize = 1024;
const MAX_WINDING_NODES: usize = 1 << 15;
/// Radii tried on a circle where the map nearly vanishes, as fractions of `r1`.
const RETRY_RADII: [f64; 6] = [1.0, 0.9, 0.8, 0.7, 0.6, 0.5];
/// Off-disk grid steps in the real and imaginary direction.
pub const OFF_DISK_DX: f64 = 0.05;
pub const OFF_DISK_DY: f64 = 0.125;

/// Winding number of `f` along a circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Winding {
    pub value: i64,
    /// Summed phase increments divided by `2 pi`.
    pub raw: f64,
    pub nodes: usize,
    pub min_modulus: f64,
    pub max_increment: f64,
}

/// Sums the principal phase increments of `f` over `nodes` equispaced points
/// on the circle, doubling the node count until no increment exceeds `pi/2`.
pub fn winding_number<F>(f: F, center: Complex64, radius: f64, nodes: usize) -> Winding
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let mut n = nodes.max(8);
    loop {
        let values: Vec<Complex64> = (0..n)
            .into_par_iter()
            .map(|k| f(center + Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64)))
            .collect();
        let mut total = 0.0;
        let mut max_increment = 0.0f64;
        for k in 0..n {
            let step = (values[(k + 1) % n] / values[k]).arg();
            total += step;
            max_increment = max_increment.max(step.abs());
        }
        let min_modulus = values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
        if max_increment <= PI / 2.0 || n >= MAX_WINDING_NODES {
            let raw = total / (2.0 * PI);
            return Winding {
                value: raw.round() as i64,
                raw,
                nodes: n,
                min_modulus,
                max_increment,
            };
        }
        n *= 2;
    }
}

/// Newton iteration with a central-difference derivative of step `h`, stopped
/// once a step falls below `tol (1 + |z|)`.
pub fn newton<F>(f: F, start: Complex64, h: f64, tol: f64, max_iter: usize) -> Option<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let mut z = start;
    for _ in 0..max_iter {
        let v = f(z);
        let d = (f(z + h) - f(z - h)) / (2.0 * h);
        let step = v / d;
        if !step.re.is_finite() || !step.im.is_finite() {
            return None;
        }
        z -= step;
        if step.norm() < tol * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    None
}

/// One disk `D_{r1}(n + L m)` with its winding number and refined zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroDisk {
    pub center: f64,
    pub site: i64,
    pub radius: f64,
    pub winding: Winding,
    pub zero: Option<Complex64>,
}

/// Lower bound check of `|Phi|` on the grid points outside the disks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffDiskCertificate {
    pub points: usize,
    /// Grid points skipped because they lie within `E` of a cell boundary.
    pub skipped: usize,
    pub min_modulus: f64,
    pub argmin: Option<Complex64>,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroReport {
    pub re_range: (f64, f64),
    pub disks: Vec<ZeroDisk>,
    pub off_disk: OffDiskCertificate,
    pub windings_one: bool,
    pub zeros_confined: bool,
    pub pass: bool,
}

fn disk_at(phi: &PhiFunction, center: f64, site: i64) -> Result<ZeroDisk, PhiError> {
    let r1 = phi.params().r1;
    let c = Complex64::new(center, 0.0);
    let f = |z: Complex64| phi.eval_unchecked(z);
    for frac in RETRY_RADII {
        let radius = frac * r1;
        let winding = winding_number(f, c, radius, WINDING_NODES);
        if winding.min_modulus < 10.0 * phi.eval_tolerance() {
            continue;
        }
        let zero = if winding.value >= 1 {
            newton(f, c, 1e-3 * r1, 1e-12, 60).filter(|z| (z - c).norm() <= r1)
        } else {
            None
        };
        return Ok(ZeroDisk {
            center,
            site,
            radius,
            winding,
            zero,
        });
    }
    Err(PhiError::Contour { center, radius: r1 })
}

/// Disk centers `n + L m` inside `Int_{E+1}` of their cell and inside `range`.
pub fn disk_centers(phi: &PhiFunction, range: (f64, f64)) -> Vec<(f64, i64)> {
    let p = phi.params();
    let mut out = Vec::new();
    for (n, cell) in phi.cells() {
        if cell.r < range.0 || cell.l > range.1 {
            continue;
        }
        let Some(inner) = tiling::int_e(*cell, p.e + 1.0) else { continue };
        let lo = inner.l.max(range.0);
        let hi = inner.r.min(range.1);
        let n0 = *n as f64;
        let first = ((lo - n0) / p.l).ceil() as i64;
        let last = ((hi - n0) / p.l).floor() as i64;
        for m in first..=last {
            out.push((n0 + p.l * m as f64, *n));
        }
    }
    out
}

fn owner(cells: &[(i64, Interval)], x: f64) -> Option<(i64, Interval)> {
    let i = cells.partition_point(|(_, c)| c.r < x);
    cells.get(i).filter(|(_, c)| c.l <= x).copied()
}

/// Checks `|Phi| >= theta_L / 2` on the grid of `range x [-1, 1]` restricted
/// to points in `Int_E` of their cell and outside every closed disk.
pub fn off_disk_certificate(
    phi: &PhiFunction,
    range: (f64, f64),
    dx: f64,
    dy: f64,
) -> Result<OffDiskCertificate, PhiError> {
    let p = phi.params();
    let nx = ((range.1 - range.0) / dx).floor() as usize + 1;
    let ny = (2.0 / dy).round() as usize;
    let rows: Vec<(usize, usize, f64, Option<Complex64>)> = (0..nx)
        .into_par_iter()
        .map(|i| {
            let x = range.0 + i as f64 * dx;
            let Some((n, cell)) = owner(phi.cells(), x) else { return (0, ny + 1, f64::INFINITY, None) };
            if x < cell.l + p.e || x > cell.r - p.e {
                return (0, ny + 1, f64::INFINITY, None);
            }
            let rel = x - n as f64;
            let dist_re = (rel - p.l * (rel / p.l).round()).abs();
            let mut count = 0;
            let mut best = (f64::INFINITY, None);
            for j in 0..=ny {
                let y = -1.0 + j as f64 * dy;
                if (dist_re * dist_re + y * y).sqrt() <= p.r1 {
                    continue;
                }
                let z = Complex64::new(x, y);
                let v = phi.eval_unchecked(z).norm();
                count += 1;
                if v < best.0 {
                    best = (v, Some(z));
                }
            }
            (count, 0, best.0, best.1)
        })
        .collect();
    let points = rows.iter().map(|r| r.0).sum();
    let skipped = rows.iter().map(|r| r.1).sum();
    let (min_modulus, argmin) = rows
        .iter()
        .fold((f64::INFINITY, None), |acc, r| if r.2 < acc.0 { (r.2, r.3) } else { acc });
    let threshold = p.theta_l / 2.0;
    Ok(OffDiskCertificate {
        points,
        skipped,
        min_modulus,
        argmin,
        threshold,
        pass: min_modulus >= threshold,
    })
}

/// Winding numbers on every disk centered in `Int_{E+1}` of its cell within
/// `re_range`, a refined zero in each disk that winds, and the off-disk certificate.
pub fn locate_zeros(phi: &PhiFunction, re_range: (f64, f64)) -> Result<ZeroReport, PhiError> {
    if !(re_range.0 <= re_range.1) {
        return Err(PhiError::Window(format!("empty range {re_range:?}")));
    }
    for x in [re_range.0, re_range.1] {
        if !phi.in_domain(Complex64::new(x, 0.0)) {
            return Err(PhiError::Domain(Complex64::new(x, 0.0)));
        }
    }
    let disks = disk_centers(phi, re_range)
        .into_iter()
        .map(|(c, n)| disk_at(phi, c, n))
        .collect::<Result<Vec<_>, _>>()?;
    let off_disk = off_disk_certificate(phi, re_range, OFF_DISK_DX, OFF_DISK_DY)?;
    let windings_one = disks.iter().all(|d| d.winding.value == 1);
    let r1 = phi.params().r1;
    let zeros_confined = disks
        .iter()
        .all(|d| d.winding.value == 0 || d.zero.is_some_and(|z| (z - d.center).norm() <= r1));
    let pass = windings_one && zeros_confined && off_disk.pass;
    Ok(ZeroReport {
        re_range,
        disks,
        off_disk,
        windings_one,
        zeros_confined,
        pass,
    })
}
