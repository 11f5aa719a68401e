use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};
use crate::lattice::LatticePoint;
use crate::tanpoint::lemma_horizon;

/// Number of evenly spaced start times examined per path.
pub const PROGRESS_SAMPLES: usize = 64;

/// Minimum over sampled `i` of `x(i + h) - max_{j <= i} x(j)`.
///
/// Only sampled `i` are checked, so `min_progress` is an upper bound on the
/// true minimum over the whole range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowedProgress {
    pub min_progress: i64,
    pub argmin: usize,
    pub horizon: usize,
    pub sampled: usize,
}

/// Progress over horizon `floor(m log^6 2n)` for `n <= i <= 2n - horizon`.
///
/// Requires `m >= n^(15/16)`. At laboratory sizes this horizon is usually
/// longer than the whole path, which is reported as a range error.
pub fn windowed_progress(path: &[LatticePoint], n: usize, m: usize) -> Result<WindowedProgress> {
    let min_m = (n as f64).powf(15.0 / 16.0).ceil() as usize;
    if m < min_m {
        return Err(WalkError::Range(format!("window m={m} below n^(15/16)={min_m}")));
    }
    windowed_progress_with_horizon(path, n, lemma_horizon(m, 2 * n), PROGRESS_SAMPLES)
}

/// Progress over an explicit horizon for `n <= i <= 2n - horizon`, sampling at
/// most `samples` evenly spaced start times.
pub fn windowed_progress_with_horizon(
    path: &[LatticePoint],
    n: usize,
    horizon: usize,
    samples: usize,
) -> Result<WindowedProgress> {
    if path.len() < 2 * n + 1 {
        return Err(WalkError::Range(format!(
            "path has {} points, need {} for n={n}",
            path.len(),
            2 * n + 1
        )));
    }
    if horizon > n {
        return Err(WalkError::Range(format!(
            "horizon {horizon} leaves no start time in [{n}, {}]",
            2 * n as i128 - horizon as i128
        )));
    }
    let lo = n;
    let hi = 2 * n - horizon;
    let samples = samples.max(1);
    let span = hi - lo;
    let starts: Vec<usize> = if span < samples {
        (lo..=hi).collect()
    } else if samples == 1 {
        vec![lo]
    } else {
        let mut v: Vec<usize> = (0..samples)
            .map(|k| lo + ((k as u128 * span as u128 + (samples as u128 - 1) / 2) / (samples as u128 - 1)) as usize)
            .collect();
        v.dedup();
        v
    };

    let mut prefix_max = i64::MIN;
    let mut next = 0usize;
    let mut best: Option<(i64, usize)> = None;
    for (t, p) in path.iter().enumerate().take(hi + 1) {
        prefix_max = prefix_max.max(p.x);
        if next < starts.len() && starts[next] == t {
            let progress = path[t + horizon].x - prefix_max;
            if best.is_none_or(|(b, _)| progress < b) {
                best = Some((progress, t));
            }
            next += 1;
        }
    }
    let (min_progress, argmin) = best.expect("at least one start time");
    Ok(WindowedProgress {
        min_progress,
        argmin,
        horizon,
        sampled: starts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn right(len: usize) -> Vec<LatticePoint> {
        (0..=len as i64).map(|k| LatticePoint::new(k, 0)).collect()
    }

    #[test]
    fn straight_path_progress_equals_horizon() {
        let n = 1000;
        let path = right(2 * n);
        let w = windowed_progress_with_horizon(&path, n, 300, PROGRESS_SAMPLES).unwrap();
        assert_eq!(w.min_progress, 300);
        assert_eq!(w.sampled, 64);
        assert_eq!(w.argmin, n);
    }

    #[test]
    fn constant_path_progress_is_zero() {
        let path = vec![LatticePoint::new(4, -1); 201];
        let w = windowed_progress_with_horizon(&path, 100, 10, PROGRESS_SAMPLES).unwrap();
        assert_eq!(w.min_progress, 0);
    }

    #[test]
    fn lemma_horizon_is_vacuous_at_small_n() {
        let n = 100_000;
        let m = (n as f64).powf(15.0 / 16.0).ceil() as usize;
        let path = right(2 * n);
        assert!(matches!(windowed_progress(&path, n, m), Err(WalkError::Range(_))));
        assert!(windowed_progress(&path, n, m - 1).is_err());
    }

    #[test]
    fn samples_cover_both_ends() {
        let n = 500;
        let horizon = 100;
        // straight right, then shifted back 50 after time 2n - horizon
        let mut path = right(2 * n);
        for p in path.iter_mut().skip(2 * n - horizon + 1) {
            p.x -= 50;
        }
        let w = windowed_progress_with_horizon(&path, n, horizon, 8).unwrap();
        // starts 500, 557, 614, 671, 729, 786, 843, 900; the first past 800 sees 50
        assert_eq!(w.sampled, 8);
        assert_eq!(w.min_progress, 50);
        assert_eq!(w.argmin, 843);
    }

    #[test]
    fn short_path_rejected() {
        let path = right(10);
        assert!(windowed_progress_with_horizon(&path, 6, 2, 4).is_err());
        assert!(windowed_progress_with_horizon(&path, 5, 6, 4).is_err());
    }

    #[test]
    fn all_starts_when_range_is_small() {
        let path = right(40);
        let w = windowed_progress_with_horizon(&path, 20, 15, 64).unwrap();
        assert_eq!(w.sampled, 6);
    }
}
