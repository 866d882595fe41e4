//! Discrete systems, their suspensions under a roof, and the registered examples.

use std::collections::BTreeMap;
use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use super::{first_return, CrossSectionData, Flow, FlowError, Section};

/// An invertible map on a state set with a positive roof function.
pub trait DiscreteSystem {
    type State: Clone + PartialEq + Send + Sync + Debug;

    fn step(&self, s: &Self::State) -> Self::State;
    fn inverse(&self, s: &Self::State) -> Option<Self::State>;
    fn roof(&self, s: &Self::State) -> f64;
    fn distance(&self, a: &Self::State, b: &Self::State) -> f64;
}

/// `(x, t)` with `0 <= t < roof(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuspensionPoint<S> {
    pub base: S,
    pub height: f64,
}

/// Moves the height by `t` and applies `(x, roof(x)) ~ (Tx, 0)` until the
/// height lies in `[0, roof)`.
pub fn suspension_flow<D: DiscreteSystem>(
    system: &D,
    p: &SuspensionPoint<D::State>,
    t: f64,
) -> Result<SuspensionPoint<D::State>, FlowError> {
    let mut base = p.base.clone();
    let mut height = p.height + t;
    loop {
        let roof = system.roof(&base);
        if !(roof > 0.0) {
            return Err(FlowError::Parameter(format!("roof value {roof} is not positive")));
        }
        if height >= roof {
            height -= roof;
            base = system.step(&base);
        } else if height < 0.0 {
            base = system.inverse(&base).ok_or(FlowError::NotInvertible)?;
            height += system.roof(&base);
        } else {
            return Ok(SuspensionPoint { base, height });
        }
    }
}

/// The suspension flow of a discrete system.
#[derive(Debug, Clone)]
pub struct Suspension<D> {
    pub system: D,
}

impl<D: DiscreteSystem> Suspension<D> {
    pub fn new(system: D) -> Self {
        Self { system }
    }
}

impl<D: DiscreteSystem> Flow for Suspension<D> {
    type Point = SuspensionPoint<D::State>;

    fn flow(&self, p: &Self::Point, t: f64) -> Result<Self::Point, FlowError> {
        suspension_flow(&self.system, p, t)
    }

    fn distance(&self, p: &Self::Point, q: &Self::Point) -> f64 {
        let sys = &self.system;
        let direct = sys.distance(&p.base, &q.base) + (p.height - q.height).abs();
        let over = |a: &Self::Point, b: &Self::Point| {
            sys.distance(&sys.step(&a.base), &b.base) + (sys.roof(&a.base) - a.height) + b.height
        };
        direct.min(over(p, q)).min(over(q, p))
    }

    /// Base states are isolated at small radii, so neighbours lie along the flow.
    fn perturb(&self, p: &Self::Point, radius: f64, probe: usize) -> Self::Point {
        let u = ((probe as f64 + 1.0) * 0.618_033_988_749_895).fract();
        self.flow(p, radius * (2.0 * u - 1.0)).unwrap_or_else(|_| p.clone())
    }
}

/// The base `{(x, 0)}` of a suspension, indexed by a list of base states.
#[derive(Debug, Clone)]
pub struct BaseSection<S> {
    pub states: Vec<S>,
    data: CrossSectionData,
}

impl<S> BaseSection<S> {
    pub fn new<D: DiscreteSystem<State = S>>(system: &D, states: Vec<S>) -> Self {
        let min_roof = states.iter().map(|s| system.roof(s)).fold(f64::INFINITY, f64::min);
        let max_roof = states.iter().map(|s| system.roof(s)).fold(0.0, f64::max);
        Self {
            states,
            data: CrossSectionData {
                section_id: "base".into(),
                eta: 0.4 * min_roof,
                xi: max_roof,
            },
        }
    }
}

impl<D: DiscreteSystem> Section<Suspension<D>> for BaseSection<D::State> {
    fn data(&self) -> &CrossSectionData {
        &self.data
    }

    fn offset(&self, flow: &Suspension<D>, p: &SuspensionPoint<D::State>) -> f64 {
        let roof = flow.system.roof(&p.base);
        if p.height < 0.5 * roof {
            p.height
        } else {
            p.height - roof
        }
    }

    fn contains(&self, flow: &Suspension<D>, p: &SuspensionPoint<D::State>, tol: f64) -> bool {
        self.offset(flow, p).abs() <= tol
    }

    fn at(&self, _flow: &Suspension<D>, u: f64) -> SuspensionPoint<D::State> {
        let k = ((u * self.states.len() as f64).floor() as usize).min(self.states.len() - 1);
        SuspensionPoint { base: self.states[k].clone(), height: 0.0 }
    }

    fn closed_form_return(
        &self,
        flow: &Suspension<D>,
        p: &SuspensionPoint<D::State>,
    ) -> Option<(f64, SuspensionPoint<D::State>)> {
        let base = if p.height < 0.5 * flow.system.roof(&p.base) {
            p.base.clone()
        } else {
            flow.system.step(&p.base)
        };
        Some((flow.system.roof(&base), SuspensionPoint { base: flow.system.step(&base), height: 0.0 }))
    }
}

/// A permutation of `0..n` with a roof value per state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationSystem {
    perm: Vec<usize>,
    inverse: Vec<usize>,
    roof: Vec<f64>,
}

impl PermutationSystem {
    pub fn new(perm: Vec<usize>, roof: Vec<f64>) -> Result<Self, FlowError> {
        let n = perm.len();
        if roof.len() != n || n == 0 {
            return Err(FlowError::Parameter("roof and permutation lengths differ".into()));
        }
        let mut inverse = vec![usize::MAX; n];
        for (i, &j) in perm.iter().enumerate() {
            if j >= n || inverse[j] != usize::MAX {
                return Err(FlowError::Parameter("not a permutation".into()));
            }
            inverse[j] = i;
        }
        if roof.iter().any(|r| !(*r > 0.0)) {
            return Err(FlowError::Parameter("roof values must be positive".into()));
        }
        Ok(Self { perm, inverse, roof })
    }

    /// `period * fiber` states: state `j + period * k` steps to `(j + 1) mod period` in fiber `k`.
    pub fn cyclic_product(period: usize, fiber: usize) -> Result<Self, FlowError> {
        let perm = (0..period * fiber)
            .map(|s| (s % period + 1) % period + period * (s / period))
            .collect();
        Self::new(perm, vec![1.0; period * fiber])
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn states(&self) -> Vec<usize> {
        (0..self.len()).collect()
    }
}

impl DiscreteSystem for PermutationSystem {
    type State = usize;

    fn step(&self, s: &usize) -> usize {
        self.perm[*s]
    }

    fn inverse(&self, s: &usize) -> Option<usize> {
        self.inverse.get(*s).copied()
    }

    fn roof(&self, s: &usize) -> f64 {
        self.roof[*s]
    }

    fn distance(&self, a: &usize, b: &usize) -> f64 {
        if a == b { 0.0 } else { 1.0 }
    }
}

/// The first-return system of a flow on a section, enumerated along one orbit.
#[derive(Debug, Clone)]
pub struct ReturnSystem<P> {
    pub points: Vec<P>,
    pub times: Vec<f64>,
}

impl<P: Clone> ReturnSystem<P> {
    pub fn from_orbit<F, S>(flow: &F, section: &S, start: &P, max_states: usize) -> Result<Self, FlowError>
    where
        F: Flow<Point = P>,
        S: Section<F>,
    {
        let t_max = 2.0 * section.data().xi;
        let mut points = vec![start.clone()];
        let mut times = Vec::new();
        loop {
            let (t, q) = first_return(flow, section, points.last().expect("nonempty orbit"), t_max)?;
            times.push(t);
            if flow.distance(&q, start) < super::SECTION_TOLERANCE {
                return Ok(Self { points, times });
            }
            if points.len() == max_states {
                return Err(FlowError::Parameter(format!("orbit longer than {max_states} states")));
            }
            points.push(q);
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl<P> DiscreteSystem for ReturnSystem<P> {
    type State = usize;

    fn step(&self, s: &usize) -> usize {
        (s + 1) % self.times.len()
    }

    fn inverse(&self, s: &usize) -> Option<usize> {
        let n = self.times.len();
        (*s < n).then(|| (s + n - 1) % n)
    }

    fn roof(&self, s: &usize) -> f64 {
        self.times[*s]
    }

    fn distance(&self, a: &usize, b: &usize) -> f64 {
        if a == b { 0.0 } else { 1.0 }
    }
}

/// `(x, k) -> (Tx, k)` on a base system times a finite fiber.
#[derive(Debug, Clone)]
pub struct ProductSystem<D> {
    pub base: D,
    pub fiber: usize,
}

impl<D: DiscreteSystem> DiscreteSystem for ProductSystem<D> {
    type State = (D::State, usize);

    fn step(&self, s: &Self::State) -> Self::State {
        (self.base.step(&s.0), s.1)
    }

    fn inverse(&self, s: &Self::State) -> Option<Self::State> {
        Some((self.base.inverse(&s.0)?, s.1))
    }

    fn roof(&self, s: &Self::State) -> f64 {
        self.base.roof(&s.0)
    }

    fn distance(&self, a: &Self::State, b: &Self::State) -> f64 {
        self.base.distance(&a.0, &b.0) + if a.1 == b.1 { 0.0 } else { 1.0 }
    }
}

/// Orbit bookkeeping: the `m` in `[-max, max]` with `T^m x = y`.
pub fn orbit_offsets<D: DiscreteSystem>(system: &D, x: &D::State, y: &D::State, max: i64) -> Vec<i64> {
    let mut out = BTreeMap::new();
    let mut fwd = x.clone();
    for m in 0..=max {
        if &fwd == y {
            out.insert(m, ());
        }
        fwd = system.step(&fwd);
    }
    let mut back = x.clone();
    for m in 1..=max {
        match system.inverse(&back) {
            Some(b) => back = b,
            None => break,
        }
        if &back == y {
            out.insert(-m, ());
        }
    }
    out.into_keys().collect()
}
