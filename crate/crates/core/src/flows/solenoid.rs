//! The solenoid truncated at a finite depth: redundant coordinates
//! `x_n in [0, n!)` with `x_{n+1} = x_n mod n!`, flowing by translation.

use serde::{Deserialize, Serialize};

use super::{CrossSectionData, Flow, FlowError, Section};

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn circular(x: f64, m: f64) -> f64 {
    let r = x.rem_euclid(m);
    r.min(m - r)
}

/// Signed representative of `x mod m` in `[-m/2, m/2)`.
fn signed_mod(x: f64, m: f64) -> f64 {
    let r = x.rem_euclid(m);
    if r >= 0.5 * m {
        r - m
    } else {
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolenoidPoint {
    pub coords: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSolenoid {
    depth: usize,
}

impl TruncatedSolenoid {
    pub const MAX_DEPTH: usize = 12;

    pub fn new(depth: usize) -> Result<Self, FlowError> {
        if depth == 0 || depth > Self::MAX_DEPTH {
            return Err(FlowError::Parameter(format!("depth must lie in 1..={}", Self::MAX_DEPTH)));
        }
        Ok(Self { depth })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Circumference `n!` of the `n`-th circle.
    pub fn modulus(&self, n: usize) -> f64 {
        factorial(n)
    }

    /// The point with top coordinate `x` (mod `N!`).
    pub fn point(&self, x: f64) -> SolenoidPoint {
        SolenoidPoint {
            coords: (1..=self.depth).map(|n| x.rem_euclid(factorial(n))).collect(),
        }
    }

    /// Top coordinate, identifying the truncation with the circle of length `N!`.
    pub fn to_circle(&self, p: &SolenoidPoint) -> f64 {
        p.coords[self.depth - 1]
    }

    pub fn is_consistent(&self, p: &SolenoidPoint, tol: f64) -> bool {
        p.coords.len() == self.depth
            && p.coords.iter().enumerate().all(|(i, x)| *x >= 0.0 && *x < factorial(i + 1))
            && p.coords
                .windows(2)
                .enumerate()
                .all(|(i, w)| circular(w[1] - w[0], factorial(i + 1)) <= tol)
    }

    /// Whether `p` lies in `S_n = {x_1 = ... = x_n = 0}`.
    pub fn in_section(&self, p: &SolenoidPoint, n: usize, tol: f64) -> Result<bool, FlowError> {
        if n == 0 || n > self.depth {
            return Err(FlowError::Depth { n, depth: self.depth });
        }
        Ok(circular(p.coords[n - 1], factorial(n)) <= tol)
    }

    pub fn section(&self, n: usize) -> Result<SolenoidSection, FlowError> {
        if n == 0 || n > self.depth {
            return Err(FlowError::Depth { n, depth: self.depth });
        }
        let period = factorial(n);
        Ok(SolenoidSection {
            n,
            data: CrossSectionData {
                section_id: format!("S_{n}"),
                eta: period / 4.0,
                xi: period,
            },
        })
    }
}

impl Flow for TruncatedSolenoid {
    type Point = SolenoidPoint;

    fn flow(&self, p: &SolenoidPoint, t: f64) -> Result<SolenoidPoint, FlowError> {
        Ok(SolenoidPoint {
            coords: p
                .coords
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    let m = factorial(i + 1);
                    let y = (x + t).rem_euclid(m);
                    if y >= m { 0.0 } else { y }
                })
                .collect(),
        })
    }

    fn distance(&self, p: &SolenoidPoint, q: &SolenoidPoint) -> f64 {
        p.coords
            .iter()
            .zip(&q.coords)
            .enumerate()
            .map(|(i, (a, b))| circular(a - b, factorial(i + 1)))
            .fold(0.0, f64::max)
    }

    /// Within the truncation the space is a circle, so neighbours lie along the orbit.
    fn perturb(&self, p: &SolenoidPoint, radius: f64, probe: usize) -> SolenoidPoint {
        let u = ((probe as f64 + 1.0) * 0.618_033_988_749_895).fract();
        self.flow(p, radius * (2.0 * u - 1.0)).expect("solenoid flow is total")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolenoidSection {
    pub n: usize,
    data: CrossSectionData,
}

impl Section<TruncatedSolenoid> for SolenoidSection {
    fn data(&self) -> &CrossSectionData {
        &self.data
    }

    fn offset(&self, _flow: &TruncatedSolenoid, p: &SolenoidPoint) -> f64 {
        signed_mod(p.coords[self.n - 1], factorial(self.n))
    }

    fn contains(&self, flow: &TruncatedSolenoid, p: &SolenoidPoint, tol: f64) -> bool {
        flow.in_section(p, self.n, tol).unwrap_or(false)
    }

    fn at(&self, flow: &TruncatedSolenoid, u: f64) -> SolenoidPoint {
        let period = factorial(self.n);
        let count = (flow.modulus(flow.depth) / period).round();
        let k = (u * count).floor().rem_euclid(count);
        flow.point(k * period)
    }

    /// The return time to `S_n` is `n!` everywhere.
    fn closed_form_return(&self, flow: &TruncatedSolenoid, p: &SolenoidPoint) -> Option<(f64, SolenoidPoint)> {
        let t = factorial(self.n);
        Some((t, flow.flow(p, t).ok()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::{first_return, first_return_search, flow_boundary_probe, return_orbit_length};

    #[test]
    fn flow_arithmetic() {
        let s = TruncatedSolenoid::new(3).unwrap();
        let p = s.point(0.0);
        assert_eq!(s.flow(&p, 0.0).unwrap(), p);
        assert_eq!(s.flow(&p, 2.0).unwrap().coords, vec![0.0, 0.0, 2.0]);
        let q = s.flow(&p, 2.0).unwrap();
        assert!(s.in_section(&q, 1, 1e-12).unwrap());
        assert!(s.in_section(&q, 2, 1e-12).unwrap());
        assert!(!s.in_section(&q, 3, 1e-12).unwrap());
        assert!(matches!(s.in_section(&q, 4, 1e-12), Err(FlowError::Depth { .. })));
    }

    #[test]
    fn return_to_s2() {
        let s = TruncatedSolenoid::new(4).unwrap();
        let sec = s.section(2).unwrap();
        let p = s.point(10.0);
        let (t, q) = first_return(&s, &sec, &p, 10.0).unwrap();
        assert_eq!(t, 2.0);
        let (ts, qs) = first_return_search(&s, &sec, &p, 10.0).unwrap();
        assert!((ts - 2.0).abs() < 1e-9);
        assert!(s.distance(&q, &qs) < 1e-9);
        assert_eq!(return_orbit_length(&s, &sec, &p, 100).unwrap(), 12);
        assert!(flow_boundary_probe(&s, &sec, 0.25, 24).unwrap().pass);
    }
}
