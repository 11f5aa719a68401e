use serde::{Deserialize, Serialize};

use crate::lattice::LatticePoint;
use crate::tanpoint::log1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub pairs_checked: u64,
    pub violations: u64,
    /// Largest `|x_j - x_i| / (log n * sqrt(j - i))` over checked pairs.
    pub max_ratio: f64,
    /// Smallest dyadic lag with a violation.
    pub first_violation_lag: Option<usize>,
}

/// Checks `|x_j - x_i| <= log n * sqrt(j - i)` on all pairs whose lag is a
/// power of two, `O(n log n)` pairs for a path of `n` steps.
pub fn envelope_violations(path: &[LatticePoint]) -> Envelope {
    let n = path.len().saturating_sub(1);
    let log_n = log1(n as f64);
    let mut out = Envelope {
        pairs_checked: 0,
        violations: 0,
        max_ratio: 0.0,
        first_violation_lag: None,
    };
    let mut lag = 1usize;
    while lag <= n {
        let scale = log_n * (lag as f64).sqrt();
        for i in 0..=n - lag {
            let dx = (path[i + lag].x - path[i].x).unsigned_abs() as f64;
            let ratio = dx / scale;
            out.pairs_checked += 1;
            if ratio > out.max_ratio {
                out.max_ratio = ratio;
            }
            if dx > scale {
                out.violations += 1;
                out.first_violation_lag.get_or_insert(lag);
            }
        }
        lag <<= 1;
    }
    out
}

/// First dyadic lag at which a straight horizontal path breaks the envelope:
/// the least power of two `d` with `d > log^2 n`.
pub fn first_violation_lag_linear(n: usize) -> Option<usize> {
    let threshold = log1(n as f64).powi(2);
    let mut d = 1usize;
    while d <= n {
        if d as f64 > threshold {
            return Some(d);
        }
        d <<= 1;
    }
    None
}
