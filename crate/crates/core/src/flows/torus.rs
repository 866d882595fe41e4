//! Linear flow on the unit torus, with the full vertical circle as a section
//! and a clipped half of it as a section with flow boundary.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{CrossSectionData, Flow, FlowError, Section};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    pub x: f64,
    pub y: f64,
}

fn wrap(v: f64) -> f64 {
    let r = v.rem_euclid(1.0);
    if r >= 1.0 { 0.0 } else { r }
}

fn circ(d: f64) -> f64 {
    let r = d.rem_euclid(1.0);
    r.min(1.0 - r)
}

/// `(x, y) -> (x + t, y + slope t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearTorusFlow {
    pub slope: f64,
}

impl Flow for LinearTorusFlow {
    type Point = TorusPoint;

    fn flow(&self, p: &TorusPoint, t: f64) -> Result<TorusPoint, FlowError> {
        Ok(TorusPoint { x: wrap(p.x + t), y: wrap(p.y + self.slope * t) })
    }

    fn distance(&self, p: &TorusPoint, q: &TorusPoint) -> f64 {
        circ(p.x - q.x).max(circ(p.y - q.y))
    }

    fn perturb(&self, p: &TorusPoint, radius: f64, probe: usize) -> TorusPoint {
        let angle = 2.0 * PI * probe as f64 / 8.0 + 0.3;
        TorusPoint {
            x: wrap(p.x + radius * angle.cos()),
            y: wrap(p.y + radius * angle.sin()),
        }
    }
}

/// `{x = 0}` with `y` restricted to `[lo, hi]` (the whole circle when unclipped).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusSection {
    pub clip: Option<(f64, f64)>,
    data: CrossSectionData,
}

impl TorusSection {
    pub fn full() -> Self {
        Self {
            clip: None,
            data: CrossSectionData { section_id: "x=0".into(), eta: 0.4, xi: 1.0 },
        }
    }

    /// Return times grow to `ceil(1 / (slope (hi - lo)))`-ish, so the covering time is left generous.
    pub fn clipped(lo: f64, hi: f64) -> Self {
        Self {
            clip: Some((lo, hi)),
            data: CrossSectionData {
                section_id: format!("x=0, {lo}<=y<={hi}"),
                eta: 0.4,
                xi: 64.0,
            },
        }
    }
}

impl Section<LinearTorusFlow> for TorusSection {
    fn data(&self) -> &CrossSectionData {
        &self.data
    }

    fn offset(&self, _flow: &LinearTorusFlow, p: &TorusPoint) -> f64 {
        if p.x >= 0.5 { p.x - 1.0 } else { p.x }
    }

    fn contains(&self, flow: &LinearTorusFlow, p: &TorusPoint, tol: f64) -> bool {
        let on_circle = self.offset(flow, p).abs() <= tol;
        match self.clip {
            None => on_circle,
            Some((lo, hi)) => on_circle && p.y >= lo - tol && p.y <= hi + tol,
        }
    }

    fn at(&self, _flow: &LinearTorusFlow, u: f64) -> TorusPoint {
        match self.clip {
            None => TorusPoint { x: 0.0, y: wrap(u) },
            Some((lo, hi)) => TorusPoint { x: 0.0, y: lo + (hi - lo) * u.clamp(0.0, 1.0) },
        }
    }

    fn sample(&self, flow: &LinearTorusFlow, i: usize, count: usize) -> TorusPoint {
        match self.clip {
            None => self.at(flow, i as f64 / count.max(1) as f64),
            Some(_) => self.at(flow, i as f64 / (count.max(2) - 1) as f64),
        }
    }

    fn closed_form_return(&self, flow: &LinearTorusFlow, p: &TorusPoint) -> Option<(f64, TorusPoint)> {
        match self.clip {
            None => Some((1.0, flow.flow(&TorusPoint { x: 0.0, y: p.y }, 1.0).ok()?)),
            Some(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::{first_return_search, flow_boundary_probe, return_time_jump};

    const SLOPE: f64 = 0.381_966_011_250_105;

    #[test]
    fn full_section_has_no_boundary() {
        let flow = LinearTorusFlow { slope: SLOPE };
        let sec = TorusSection::full();
        assert!(flow_boundary_probe(&flow, &sec, 0.2, 50).unwrap().pass);
        let p = sec.at(&flow, 0.3);
        let (t, q) = first_return_search(&flow, &sec, &p, 5.0).unwrap();
        assert!((t - 1.0).abs() < 1e-9);
        assert!((q.y - wrap(0.3 + SLOPE)).abs() < 1e-9);
    }

    #[test]
    fn clipped_section_fails_at_edges() {
        let flow = LinearTorusFlow { slope: SLOPE };
        let sec = TorusSection::clipped(0.0, 0.5);
        let report = flow_boundary_probe(&flow, &sec, 0.2, 11).unwrap();
        assert!(!report.pass);
        assert!(report.failures.contains(&0) && report.failures.contains(&10));
        assert!(!report.failures.contains(&5));
    }

    #[test]
    fn clipped_return_time_jumps_into_the_edge() {
        let flow = LinearTorusFlow { slope: SLOPE };
        let sec = TorusSection::clipped(0.0, 0.5);
        let jump = return_time_jump(&flow, &sec, 64, 1e-12).unwrap().unwrap();
        assert!((jump.time_after - jump.time_before).abs() >= 1.0 - 1e-9);
        let edge = jump.return_point.y.min((jump.return_point.y - 0.5).abs());
        assert!(edge < 1e-6, "{jump:?}");
    }
}
