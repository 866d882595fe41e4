//! Equivariant interval tilings from marker sequences.
//!
//! Sites `(n, 1/value_n)` live in the upper half-plane; the cell of `n` is the
//! set of points on the horizontal line `y = -H` closer to site `n` than to any
//! other site. On a fixed line every pairwise comparison is linear in the
//! abscissa, so each cell is an intersection of half-lines.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TilingError {
    #[error("invalid marker: {0}")]
    InvalidMarker(MarkerViolations),
    #[error("no sites")]
    NoSites,
    #[error("window of length {length} shorter than 6*M1 = {required}")]
    InsufficientWindow { length: i64, required: i64 },
    #[error("no common valid range for shift {0}")]
    NoOverlap(i64),
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

/// Indices that break the marker constraints.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MarkerViolations {
    /// Values outside `[0, 1]` or indices outside the window.
    pub out_of_range: Vec<i64>,
    /// Consecutive positive indices closer than `M`.
    pub separation: Vec<(i64, i64)>,
    /// Start of a window of `2 M1` indices without a value-1 index.
    pub coverage: Vec<i64>,
}

impl std::fmt::Display for MarkerViolations {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "out of range {:?}, separation {:?}, coverage {:?}",
            self.out_of_range, self.separation, self.coverage
        )
    }
}

impl MarkerViolations {
    pub fn is_empty(&self) -> bool {
        self.out_of_range.is_empty() && self.separation.is_empty() && self.coverage.is_empty()
    }
}

/// Marker values on the index window `[lo, hi]`; absent indices carry value 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkerSequence {
    pub lo: i64,
    pub hi: i64,
    pub values: BTreeMap<i64, f64>,
    #[serde(rename = "M")]
    pub m: i64,
    #[serde(rename = "M1")]
    pub m1: i64,
}

impl MarkerSequence {
    pub fn new(lo: i64, hi: i64, values: BTreeMap<i64, f64>, m: i64, m1: i64) -> Self {
        let values = values.into_iter().filter(|(_, v)| *v != 0.0).collect();
        Self { lo, hi, values, m, m1 }
    }

    /// Repeats `pattern` (offsets in `[0, period)`) over the window.
    pub fn periodic(pattern: &[(i64, f64)], period: i64, lo: i64, hi: i64, m: i64, m1: i64) -> Self {
        let mut values = BTreeMap::new();
        for n in lo..=hi {
            let r = n.rem_euclid(period);
            if let Some((_, v)) = pattern.iter().find(|(o, _)| o.rem_euclid(period) == r) {
                values.insert(n, *v);
            }
        }
        Self::new(lo, hi, values, m, m1)
    }

    pub fn value(&self, n: i64) -> f64 {
        self.values.get(&n).copied().unwrap_or(0.0)
    }

    /// `H = (M1 + 1)^2`.
    pub fn h(&self) -> f64 {
        ((self.m1 + 1) * (self.m1 + 1)) as f64
    }

    /// Marker of the shifted point: `values'[n] = values[n + k]`.
    pub fn shifted(&self, k: i64) -> Self {
        Self {
            lo: self.lo - k,
            hi: self.hi - k,
            values: self.values.iter().map(|(n, v)| (n - k, *v)).collect(),
            m: self.m,
            m1: self.m1,
        }
    }

    pub fn violations(&self) -> MarkerViolations {
        let mut out = MarkerViolations::default();
        for (n, v) in &self.values {
            if !(0.0..=1.0).contains(v) || *n < self.lo || *n > self.hi {
                out.out_of_range.push(*n);
            }
        }
        let positive: Vec<i64> = self.values.keys().copied().collect();
        for w in positive.windows(2) {
            if w[1] - w[0] < self.m {
                out.separation.push((w[0], w[1]));
            }
        }
        let span = 2 * self.m1;
        if self.hi - self.lo + 1 >= span {
            let ones: Vec<i64> = self
                .values
                .iter()
                .filter(|(_, v)| **v == 1.0)
                .map(|(n, _)| *n)
                .collect();
            let mut prev = self.lo - 1;
            for o in ones.iter().copied().chain(std::iter::once(self.hi + 1)) {
                if o - prev - 1 >= span {
                    out.coverage.push(prev + 1);
                }
                prev = o;
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), TilingError> {
        if self.m < 1 || self.m1 <= self.m || self.lo > self.hi {
            return Err(TilingError::Parameter(format!(
                "need 1 <= M < M1 and lo <= hi, got M = {}, M1 = {}, window [{}, {}]",
                self.m, self.m1, self.lo, self.hi
            )));
        }
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(TilingError::InvalidMarker(v))
        }
    }
}

/// Site `(n, height)` with `height = 1 / value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoronoiSite {
    pub n: i64,
    pub height: f64,
}

/// One site per positive value, ascending.
pub fn sites(marker: &MarkerSequence) -> Result<Vec<VoronoiSite>, TilingError> {
    marker.validate()?;
    Ok(marker
        .values
        .iter()
        .map(|(n, v)| VoronoiSite { n: *n, height: 1.0 / v })
        .collect())
}

/// Closed interval `[l, r]`, serialised as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub l: f64,
    pub r: f64,
}

impl From<[f64; 2]> for Interval {
    fn from(a: [f64; 2]) -> Self {
        Self { l: a[0], r: a[1] }
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.l, i.r]
    }
}

impl Interval {
    pub fn new(l: f64, r: f64) -> Self {
        Self { l, r }
    }

    pub fn length(&self) -> f64 {
        self.r - self.l
    }

    pub fn contains(&self, x: f64) -> bool {
        self.l <= x && x <= self.r
    }

    pub fn hausdorff(&self, other: &Interval) -> f64 {
        (self.l - other.l).abs().max((self.r - other.r).abs())
    }
}

/// Abscissa where sites `(n, h)` and `(m, hm)` are equidistant on `y = -H`.
fn bisector(n: i64, h: f64, m: i64, hm: f64, big_h: f64) -> f64 {
    0.5 * (n + m) as f64 + (hm - h) * (2.0 * big_h + h + hm) / (2 * (m - n)) as f64
}

/// Cell of site `n` on the line `y = -H`; `None` when empty or when `n` is not a site.
/// Unbounded sides are infinite.
pub fn voronoi_interval(
    sites: &[VoronoiSite],
    n: i64,
    big_h: f64,
) -> Result<Option<Interval>, TilingError> {
    if sites.is_empty() {
        return Err(TilingError::NoSites);
    }
    let Some(me) = sites.iter().find(|s| s.n == n) else {
        return Ok(None);
    };
    let mut l = f64::NEG_INFINITY;
    let mut r = f64::INFINITY;
    for s in sites {
        if s.n == n {
            continue;
        }
        let u = bisector(n, me.height, s.n, s.height, big_h);
        if s.n > n {
            r = r.min(u);
        } else {
            l = l.max(u);
        }
    }
    Ok((l <= r).then_some(Interval { l, r }))
}

/// Cells of all sites in a marker window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalTiling {
    #[serde(rename = "H")]
    pub h: f64,
    pub window: (i64, i64),
    /// Site indices whose cells do not depend on sites outside the window.
    pub valid_range: (i64, i64),
    /// Cells of the sites; indices without a site have empty cells.
    pub cells: BTreeMap<i64, Option<Interval>>,
}

impl IntervalTiling {
    pub fn cell(&self, n: i64) -> Option<Interval> {
        self.cells.get(&n).copied().flatten()
    }

    pub fn in_valid_range(&self, n: i64) -> bool {
        n >= self.valid_range.0 && n <= self.valid_range.1
    }

    /// Nonempty cells of sites in the valid range, ascending.
    pub fn valid_cells(&self) -> Vec<(i64, Interval)> {
        self.cells
            .range(self.valid_range.0..=self.valid_range.1)
            .filter_map(|(n, c)| c.map(|c| (*n, c)))
            .collect()
    }

    /// Real segment covered by the valid cells.
    pub fn valid_segment(&self) -> Option<(f64, f64)> {
        let cells = self.valid_cells();
        Some((cells.first()?.1.l, cells.last()?.1.r))
    }

    /// Site whose valid cell contains `x`.
    pub fn owner(&self, x: f64) -> Option<(i64, Interval)> {
        self.valid_cells().into_iter().find(|(_, c)| c.contains(x))
    }

    /// A tiling made of the given cells only, with every cell valid.
    pub fn from_cells(cells: &[(i64, Interval)], h: f64) -> Self {
        let lo = cells.iter().map(|c| c.0).min().unwrap_or(0);
        let hi = cells.iter().map(|c| c.0).max().unwrap_or(0);
        Self {
            h,
            window: (lo, hi),
            valid_range: (lo, hi),
            cells: cells.iter().map(|(n, c)| (*n, Some(*c))).collect(),
        }
    }
}

/// Boundary margin excluded from the valid range.
pub fn boundary_margin(m1: i64) -> i64 {
    2 * (m1 + 1)
}

pub fn build_tiling(marker: &MarkerSequence) -> Result<IntervalTiling, TilingError> {
    let length = marker.hi - marker.lo;
    if length < 6 * marker.m1 {
        return Err(TilingError::InsufficientWindow {
            length,
            required: 6 * marker.m1,
        });
    }
    let sites = sites(marker)?;
    if sites.is_empty() {
        return Err(TilingError::NoSites);
    }
    let big_h = marker.h();
    let clip = (marker.m1 + 1) as f64;
    let (lo_edge, hi_edge) = (marker.lo as f64 - clip, marker.hi as f64 + clip);
    let mut cells = BTreeMap::new();
    for s in &sites {
        let cell = voronoi_interval(&sites, s.n, big_h)?.map(|c| Interval {
            l: c.l.max(lo_edge),
            r: c.r.min(hi_edge),
        });
        cells.insert(s.n, cell);
    }
    let margin = boundary_margin(marker.m1);
    Ok(IntervalTiling {
        h: big_h,
        window: (marker.lo, marker.hi),
        valid_range: (marker.lo + margin, marker.hi - margin),
        cells,
    })
}

/// Exact rational cell endpoints; `None` marks an unbounded side.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactInterval {
    pub l: Option<BigRational>,
    pub r: Option<BigRational>,
}

fn rational(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite marker value")
}

/// Tiling in exact arithmetic; marker values are read as the dyadic rationals they are.
pub fn build_tiling_exact(
    marker: &MarkerSequence,
) -> Result<BTreeMap<i64, Option<ExactInterval>>, TilingError> {
    let length = marker.hi - marker.lo;
    if length < 6 * marker.m1 {
        return Err(TilingError::InsufficientWindow {
            length,
            required: 6 * marker.m1,
        });
    }
    marker.validate()?;
    let big_h = BigRational::from_integer(BigInt::from((marker.m1 + 1) * (marker.m1 + 1)));
    let two = BigRational::from_integer(BigInt::from(2));
    let heights: Vec<(i64, BigRational)> = marker
        .values
        .iter()
        .map(|(n, v)| (*n, rational(*v).recip()))
        .collect();
    let mut out = BTreeMap::new();
    for (n, h) in &heights {
        let mut l: Option<BigRational> = None;
        let mut r: Option<BigRational> = None;
        for (m, hm) in &heights {
            if m == n {
                continue;
            }
            let mid = BigRational::new(BigInt::from(n + m), BigInt::from(2));
            let shift = (hm - h) * (&two * &big_h + h + hm)
                / BigRational::from_integer(BigInt::from(2 * (m - n)));
            let u = mid + shift;
            if m > n {
                r = Some(match r {
                    Some(cur) if cur < u => cur,
                    _ => u,
                });
            } else {
                l = Some(match l {
                    Some(cur) if cur > u => cur,
                    _ => u,
                });
            }
        }
        let empty = matches!((&l, &r), (Some(a), Some(b)) if a > b);
        out.insert(*n, (!empty).then_some(ExactInterval { l, r }));
    }
    Ok(out)
}

/// Arithmetic used by [`shift_equivariance_defect`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    Float,
    Exact,
}

/// Largest Hausdorff distance between `W(T^k x, m)` and `-k + W(x, m + k)`
/// over the common valid range.
pub fn shift_equivariance_defect(
    marker: &MarkerSequence,
    k: i64,
    arithmetic: Arithmetic,
) -> Result<f64, TilingError> {
    let shifted = marker.shifted(k);
    let margin = boundary_margin(marker.m1);
    let lo = (marker.lo + margin - k).max(shifted.lo + margin);
    let hi = (marker.hi - margin - k).min(shifted.hi - margin);
    if lo > hi {
        return Err(TilingError::NoOverlap(k));
    }
    match arithmetic {
        Arithmetic::Float => {
            let a = build_tiling(marker)?;
            let b = build_tiling(&shifted)?;
            let mut worst = 0.0f64;
            for m in lo..=hi {
                let d = match (b.cell(m), a.cell(m + k)) {
                    (None, None) => 0.0,
                    (Some(x), Some(y)) => x.hausdorff(&Interval::new(y.l - k as f64, y.r - k as f64)),
                    _ => f64::INFINITY,
                };
                worst = worst.max(d);
            }
            Ok(worst)
        }
        Arithmetic::Exact => {
            let a = build_tiling_exact(marker)?;
            let b = build_tiling_exact(&shifted)?;
            let kk = BigRational::from_integer(BigInt::from(k));
            let mut worst = BigRational::zero();
            let side = |x: &Option<BigRational>, y: &Option<BigRational>| -> Option<BigRational> {
                match (x, y) {
                    (None, None) => Some(BigRational::zero()),
                    (Some(x), Some(y)) => Some((x - (y - &kk)).abs()),
                    _ => None,
                }
            };
            for m in lo..=hi {
                let d = match (b.get(&m).cloned().flatten(), a.get(&(m + k)).cloned().flatten()) {
                    (None, None) => Some(BigRational::zero()),
                    (Some(x), Some(y)) => match (side(&x.l, &y.l), side(&x.r, &y.r)) {
                        (Some(p), Some(q)) => Some(if p > q { p } else { q }),
                        _ => None,
                    },
                    _ => None,
                };
                match d {
                    Some(d) if d > worst => worst = d,
                    Some(_) => {}
                    None => return Ok(f64::INFINITY),
                }
            }
            Ok(worst.to_f64().unwrap_or(f64::INFINITY))
        }
    }
}

/// `M2 = (c - 1) H M / (H + 2)` with `H = (M1 + 1)^2`.
pub fn m2(m: i64, m1: i64, c: f64) -> f64 {
    let h = ((m1 + 1) * (m1 + 1)) as f64;
    (c - 1.0) * h * m as f64 / (h + 2.0)
}

/// Per-cell outcome of [`check_geometry`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellCheck {
    pub n: i64,
    pub value: f64,
    pub cell: Interval,
    pub value_above_half: bool,
    pub inside_ball: bool,
    pub long_enough: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub c: f64,
    pub m2: f64,
    pub cells: Vec<CellCheck>,
    pub min_length: f64,
    pub value_above_half: bool,
    pub inside_ball: bool,
    pub long_enough: bool,
    pub pass: bool,
}

const GEOMETRY_TOL: f64 = 1e-12;

/// Checks every nonempty valid cell for value above 1/2, containment in
/// `B_{M1+1}(n)` and length at least `2 M2`.
pub fn check_geometry(
    tiling: &IntervalTiling,
    marker: &MarkerSequence,
    c: f64,
) -> Result<GeometryReport, TilingError> {
    if !(c > 1.0) {
        return Err(TilingError::Parameter(format!("c must exceed 1, got {c}")));
    }
    let m2 = m2(marker.m, marker.m1, c);
    let radius = (marker.m1 + 1) as f64;
    let cells: Vec<CellCheck> = tiling
        .valid_cells()
        .into_iter()
        .map(|(n, cell)| {
            let value = marker.value(n);
            CellCheck {
                n,
                value,
                cell,
                value_above_half: value > 0.5,
                inside_ball: cell.l >= n as f64 - radius - GEOMETRY_TOL
                    && cell.r <= n as f64 + radius + GEOMETRY_TOL,
                long_enough: cell.length() >= 2.0 * m2 - GEOMETRY_TOL,
            }
        })
        .collect();
    let value_above_half = cells.iter().all(|c| c.value_above_half);
    let inside_ball = cells.iter().all(|c| c.inside_ball);
    let long_enough = cells.iter().all(|c| c.long_enough);
    let min_length = cells.iter().map(|c| c.cell.length()).fold(f64::INFINITY, f64::min);
    Ok(GeometryReport {
        c,
        m2,
        cells,
        min_length,
        value_above_half,
        inside_ball,
        long_enough,
        pass: value_above_half && inside_ball && long_enough,
    })
}

/// Endpoint matching of consecutive valid cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub segment: Option<(f64, f64)>,
    pub cells: usize,
    pub max_mismatch: f64,
}

pub fn coverage_report(tiling: &IntervalTiling) -> CoverageReport {
    let cells = tiling.valid_cells();
    let max_mismatch = cells
        .windows(2)
        .map(|w| (w[0].1.r - w[1].1.l).abs())
        .fold(0.0, f64::max);
    CoverageReport {
        segment: tiling.valid_segment(),
        cells: cells.len(),
        max_mismatch,
    }
}

/// `{y in cell : B_E(y) inside cell}`.
pub fn int_e(cell: Interval, e: f64) -> Option<Interval> {
    (cell.length() >= 2.0 * e).then(|| Interval::new(cell.l + e, cell.r - e))
}

/// Convenience for tests and fixtures: marker values as rationals are exact
/// only when they are dyadic, which every `f64` is.
pub fn is_dyadic(v: f64) -> bool {
    BigRational::from_f64(v).is_some()
}
