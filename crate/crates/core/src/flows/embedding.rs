//! Suspension embeddings `h_f(x, t) = tau_t h(x)` and the finite probes of
//! injectivity and orbit separation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{orbit_offsets, DiscreteSystem, FlowError, SuspensionPoint};
use crate::signals::{self, BandLimitedSignal};

/// Largest deviation of the roof from 1 accepted by [`suspend_embedding`].
const ROOF_TOLERANCE: f64 = 1e-12;

/// `translate(h(base), height)`; only the unit roof is supported.
pub fn suspend_embedding<D, H>(
    system: &D,
    h: H,
    sp: &SuspensionPoint<D::State>,
) -> Result<BandLimitedSignal, FlowError>
where
    D: DiscreteSystem,
    H: Fn(&D::State) -> BandLimitedSignal,
{
    let roof = system.roof(&sp.base);
    if (roof - 1.0).abs() > ROOF_TOLERANCE {
        return Err(FlowError::UnsupportedRoof(roof));
    }
    Ok(signals::translate(&h(&sp.base), sp.height)?)
}

/// A pair of distinct samples whose images are closer than the threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Collision {
    pub i: usize,
    pub j: usize,
    pub distance: f64,
    /// Nearest integer to `t - s`, when `t - s` is within tolerance of it.
    pub integer_time_gap: Option<i64>,
    /// `T^{t-s} x = y` for that integer.
    pub orbit_related: bool,
}

impl Collision {
    /// Both halves of the dichotomy hold, so the collision is the same point twice.
    pub fn explained(&self) -> bool {
        self.integer_time_gap.is_some() && self.orbit_related
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub samples: usize,
    pub pairs: usize,
    pub metric_depth: u32,
    pub threshold: f64,
    pub min_distance: f64,
    pub argmin: Option<(usize, usize)>,
    pub collisions: Vec<Collision>,
    pub pass: bool,
}

/// `metric_d` between the images of every pair of distinct suspension samples.
pub fn pairwise_separation<D, H>(
    system: &D,
    h: H,
    samples: &[SuspensionPoint<D::State>],
    metric_depth: u32,
    threshold: f64,
) -> Result<SeparationReport, FlowError>
where
    D: DiscreteSystem + Sync,
    H: Fn(&D::State) -> BandLimitedSignal + Sync,
{
    let images = samples
        .iter()
        .map(|sp| suspend_embedding(system, &h, sp))
        .collect::<Result<Vec<_>, _>>()?;
    let index: Vec<(usize, usize)> = (0..samples.len())
        .flat_map(|i| (i + 1..samples.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| samples[i] != samples[j])
        .collect();
    let distances = index
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = signals::common_window(&images[i], &images[j])?;
            Ok(signals::metric_d(&a, &b, metric_depth)?.value)
        })
        .collect::<Result<Vec<f64>, FlowError>>()?;

    let mut min_distance = f64::INFINITY;
    let mut argmin = None;
    let mut collisions = Vec::new();
    for (&(i, j), &d) in index.iter().zip(&distances) {
        if d < min_distance {
            min_distance = d;
            argmin = Some((i, j));
        }
        if d <= threshold {
            let gap = samples[i].height - samples[j].height;
            let m = gap.round();
            let integer_time_gap = ((gap - m).abs() <= 1e-9).then_some(m as i64);
            let orbit_related = integer_time_gap.is_some_and(|m| {
                orbit_offsets(system, &samples[i].base, &samples[j].base, m.abs()).contains(&m)
            });
            collisions.push(Collision { i, j, distance: d, integer_time_gap, orbit_related });
        }
    }
    Ok(SeparationReport {
        samples: samples.len(),
        pairs: index.len(),
        metric_depth,
        threshold,
        min_distance,
        argmin,
        pass: collisions.is_empty(),
        collisions,
    })
}

/// A grid shift at which `tau_r h(x)` comes within the threshold of `h(x')`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlaggedShift {
    pub r: f64,
    pub distance: f64,
    /// The orbit offset `m` with `|r - m|` within grid tolerance, if any.
    pub orbit_offset: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairProbe {
    pub x: String,
    pub y: String,
    /// `m` in `[-R, R]` with `T^m x = x'`.
    pub offsets: Vec<i64>,
    pub flags: Vec<FlaggedShift>,
    /// Orbit offsets with no flagged shift nearby.
    pub missing: Vec<i64>,
    pub min_distance: f64,
    pub argmin_r: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongEmbeddingReport {
    pub r_max: f64,
    pub r_step: f64,
    pub threshold: f64,
    pub pairs: Vec<PairProbe>,
    pub pass: bool,
}

/// Scans `r = k r_step` over `[-r_max, r_max]` for every pair and checks that
/// the shifts where the images coincide are exactly the orbit offsets.
pub fn strong_embedding_probe<D, H>(
    system: &D,
    h: H,
    pairs: &[(D::State, D::State)],
    r_max: f64,
    r_step: f64,
    threshold: f64,
) -> Result<StrongEmbeddingReport, FlowError>
where
    D: DiscreteSystem + Sync,
    H: Fn(&D::State) -> BandLimitedSignal + Sync,
{
    if !(r_step > 0.0) || !(r_max >= 0.0) {
        return Err(FlowError::Parameter(format!("shift grid {r_max} / {r_step}")));
    }
    let steps = (r_max / r_step + 1e-9).floor() as i64;
    let grid: Vec<f64> = (-steps..=steps).map(|k| k as f64 * r_step).collect();
    let tol = r_step / 2.0 + 1e-9;

    let mut probes = Vec::with_capacity(pairs.len());
    for (x, y) in pairs {
        let hx = h(x);
        let hy = h(y);
        let offsets = orbit_offsets(system, x, y, r_max.floor() as i64);
        let distances = grid
            .par_iter()
            .map(|&r| {
                let moved = signals::translate(&hx, r)?;
                let (a, b) = signals::common_window(&moved, &hy)?;
                Ok(a.max_abs_diff(&b)?)
            })
            .collect::<Result<Vec<f64>, FlowError>>()?;

        let mut min_distance = f64::INFINITY;
        let mut argmin_r = f64::NAN;
        let mut flags = Vec::new();
        for (&r, &d) in grid.iter().zip(&distances) {
            if d < min_distance {
                min_distance = d;
                argmin_r = r;
            }
            if d < threshold {
                let orbit_offset = offsets.iter().copied().find(|&m| (r - m as f64).abs() <= tol);
                flags.push(FlaggedShift { r, distance: d, orbit_offset });
            }
        }
        let missing: Vec<i64> = offsets
            .iter()
            .copied()
            .filter(|&m| !flags.iter().any(|f| f.orbit_offset == Some(m)))
            .collect();
        let pass = missing.is_empty() && flags.iter().all(|f| f.orbit_offset.is_some());
        probes.push(PairProbe {
            x: format!("{x:?}"),
            y: format!("{y:?}"),
            offsets,
            flags,
            missing,
            min_distance,
            argmin_r,
            pass,
        });
    }
    Ok(StrongEmbeddingReport {
        r_max,
        r_step,
        threshold,
        pass: probes.iter().all(|p| p.pass),
        pairs: probes,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use num_complex::Complex64;

    use super::*;
    use crate::flows::{Flow, PermutationSystem, Suspension};
    use crate::signals::{default_step, Band, ValueKind};

    const PERIOD: usize = 6;

    /// `h(j + 6k)(t) = f_k(t + j)` with `f_k` a trigonometric polynomial of period 6.
    fn table() -> Vec<BandLimitedSignal> {
        let band = Band::symmetric(0.5);
        let coeffs = [[0.7, 0.2, 1.0, 0.4, 0.1], [0.1, 0.9, 1.0, 0.3, 0.6]];
        let mut out = Vec::new();
        for c in coeffs {
            for j in 0..PERIOD {
                let s = BandLimitedSignal::from_fn(40.0, default_step(band), band, ValueKind::Complex, |t| {
                    c.iter()
                        .enumerate()
                        .map(|(i, a)| {
                            let k = i as f64 - 2.0;
                            Complex64::new(0.0, 2.0 * PI * k * (t + j as f64) / PERIOD as f64).exp() * *a
                        })
                        .sum()
                })
                .unwrap();
                out.push(s);
            }
        }
        out
    }

    #[test]
    fn height_zero_is_identity_and_flow_commutes() {
        let system = PermutationSystem::cyclic_product(PERIOD, 2).unwrap();
        let table = table();
        let h = |s: &usize| table[*s].clone();
        let p = SuspensionPoint { base: 3usize, height: 0.0 };
        assert_eq!(suspend_embedding(&system, h, &p).unwrap(), table[3]);

        let flow = Suspension::new(system.clone());
        let half = SuspensionPoint { base: 3usize, height: 0.5 };
        let moved = flow.flow(&half, 0.5).unwrap();
        assert_eq!(moved, SuspensionPoint { base: 4, height: 0.0 });
        let two_path = signals::translate(&suspend_embedding(&system, h, &half).unwrap(), 0.5).unwrap();
        let direct = suspend_embedding(&system, h, &moved).unwrap();
        let (a, b) = signals::common_window(&two_path, &direct).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-6);
    }

    #[test]
    fn rejects_non_unit_roof() {
        let system = PermutationSystem::new(vec![1, 0], vec![1.0, 2.0]).unwrap();
        let sig = table()[0].clone();
        let err = suspend_embedding(&system, |_| sig.clone(), &SuspensionPoint { base: 1, height: 0.0 });
        assert_eq!(err.unwrap_err(), FlowError::UnsupportedRoof(2.0));
    }

    #[test]
    fn separation_and_probe() {
        let system = PermutationSystem::cyclic_product(PERIOD, 2).unwrap();
        let table = table();
        let h = |s: &usize| table[*s].clone();
        let samples: Vec<_> = (0..12)
            .flat_map(|s| [0.0, 0.37].map(|t| SuspensionPoint { base: s, height: t }))
            .collect();
        let sep = pairwise_separation(&system, h, &samples, 10, 1e-9).unwrap();
        assert!(sep.pass, "{sep:?}");
        assert_eq!(sep.pairs, 24 * 23 / 2);

        let report = strong_embedding_probe(&system, h, &[(1, 3), (1, 1), (1, 8)], 4.0, 0.01, 1e-4).unwrap();
        assert!(report.pass, "{report:?}");
        let flagged: Vec<Vec<f64>> = report.pairs.iter().map(|p| p.flags.iter().map(|f| f.r).collect()).collect();
        assert_eq!(flagged, vec![vec![-4.0, 2.0], vec![0.0], vec![]]);
        assert_eq!(report.pairs[0].offsets, vec![-4, 2]);
    }

    #[test]
    fn collision_is_surfaced_with_its_explanation() {
        let system = PermutationSystem::cyclic_product(PERIOD, 1).unwrap();
        let sig = table()[0].clone();
        let samples = [SuspensionPoint { base: 0usize, height: 0.0 }, SuspensionPoint { base: 1, height: 0.0 }];
        let sep = pairwise_separation(&system, |_| sig.clone(), &samples, 10, 1e-9).unwrap();
        assert!(!sep.pass);
        assert_eq!(sep.collisions.len(), 1);
        assert!(!sep.collisions[0].explained());
    }
}
