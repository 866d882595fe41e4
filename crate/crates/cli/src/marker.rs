//! Seeded marker sequences for the suites and the `--seed` flags.

use std::collections::BTreeMap;

use flowembed_core::tiling::MarkerSequence;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;

/// Sub-marker values are multiples of this, so the exact tiling path applies.
const VALUE_QUANTUM: f64 = 1.0 / 1024.0;
const VALUE_DRAWS: usize = 64;

/// `2 D / (d1 d2)` for a sub-marker of value `v` between value-1 neighbours
/// at distances `d1`, `d2`. The cell is empty above 1 and shorter than
/// `(d1 + d2) / 4` above 1/2.
pub fn squeeze_ratio(v: f64, d1: i64, d2: i64, big_h: f64) -> f64 {
    let h = 1.0 / v;
    let d = ((big_h + h).powi(2) - (big_h + 1.0).powi(2)) / 2.0;
    2.0 * d / (d1 * d2) as f64
}

/// Value-1 indices with gaps uniform in `[M, 2 M1 - 1]`, then at most one
/// sub-marker per gap, at least `M` from both ends, with value in `(1/2, 1)`
/// redrawn while its cell would be a sliver.
pub fn random_marker(seed: u64, window: (i64, i64), m: i64, m1: i64) -> Result<MarkerSequence, CliError> {
    let (lo, hi) = window;
    if m < 1 || 2 * m1 - 1 < m {
        return Err(CliError::Config(format!("infeasible gap range [{m}, {}]", 2 * m1 - 1)));
    }
    if hi - lo + 1 < 6 * m1 {
        return Err(CliError::Config(format!(
            "window [{lo}, {hi}] shorter than 6 M1 = {}",
            6 * m1
        )));
    }
    let big_h = ((m1 + 1) * (m1 + 1)) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ones = Vec::new();
    let mut n = lo + rng.gen_range(0..m);
    while n <= hi {
        ones.push(n);
        n += rng.gen_range(m..=2 * m1 - 1);
    }
    let mut values: BTreeMap<i64, f64> = ones.iter().map(|n| (*n, 1.0)).collect();
    for w in ones.windows(2) {
        let gap = w[1] - w[0];
        if gap < 2 * m || !rng.gen_bool(0.5) {
            continue;
        }
        let at = w[0] + rng.gen_range(m..=gap - m);
        for _ in 0..VALUE_DRAWS {
            let k = rng.gen_range(513..1024);
            let v = k as f64 * VALUE_QUANTUM;
            let ratio = squeeze_ratio(v, at - w[0], w[1] - at, big_h);
            if !(ratio > 0.5 && ratio <= 1.0) {
                values.insert(at, v);
                break;
            }
        }
    }
    let marker = MarkerSequence::new(lo, hi, values, m, m1);
    marker.validate()?;
    Ok(marker)
}
