//! Extension of a flow by a finite fiber with trivial action.

use super::{CrossSectionData, Flow, FlowError, Section};

#[derive(Debug, Clone)]
pub struct ProductFlow<F> {
    pub inner: F,
    pub fiber: usize,
}

impl<F: Flow> Flow for ProductFlow<F> {
    type Point = (F::Point, usize);

    fn flow(&self, p: &Self::Point, t: f64) -> Result<Self::Point, FlowError> {
        Ok((self.inner.flow(&p.0, t)?, p.1))
    }

    fn distance(&self, p: &Self::Point, q: &Self::Point) -> f64 {
        self.inner.distance(&p.0, &q.0) + if p.1 == q.1 { 0.0 } else { 1.0 }
    }

    fn perturb(&self, p: &Self::Point, radius: f64, probe: usize) -> Self::Point {
        (self.inner.perturb(&p.0, radius, probe), p.1)
    }
}

/// Preimage of a section under the projection to the first factor.
#[derive(Debug, Clone)]
pub struct ProductSection<S> {
    pub inner: S,
    data: CrossSectionData,
}

impl<S> ProductSection<S> {
    pub fn new<F: Flow>(inner: S) -> Self
    where
        S: Section<F>,
    {
        let d = inner.data();
        let data = CrossSectionData {
            section_id: format!("{} x K", d.section_id),
            eta: d.eta,
            xi: d.xi,
        };
        Self { inner, data }
    }
}

impl<F: Flow, S: Section<F>> Section<ProductFlow<F>> for ProductSection<S> {
    fn data(&self) -> &CrossSectionData {
        &self.data
    }

    fn offset(&self, flow: &ProductFlow<F>, p: &(F::Point, usize)) -> f64 {
        self.inner.offset(&flow.inner, &p.0)
    }

    fn contains(&self, flow: &ProductFlow<F>, p: &(F::Point, usize), tol: f64) -> bool {
        p.1 < flow.fiber && self.inner.contains(&flow.inner, &p.0, tol)
    }

    fn at(&self, flow: &ProductFlow<F>, u: f64) -> (F::Point, usize) {
        let k = ((u * flow.fiber as f64).floor() as usize).min(flow.fiber - 1);
        let v = (u * flow.fiber as f64).fract();
        (self.inner.at(&flow.inner, v), k)
    }

    fn sample(&self, flow: &ProductFlow<F>, i: usize, count: usize) -> (F::Point, usize) {
        (self.inner.sample(&flow.inner, i, count), i % flow.fiber)
    }

    fn closed_form_return(&self, flow: &ProductFlow<F>, p: &(F::Point, usize)) -> Option<(f64, (F::Point, usize))> {
        let (t, q) = self.inner.closed_form_return(&flow.inner, &p.0)?;
        Some((t, (q, p.1)))
    }
}
