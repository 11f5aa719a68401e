//! Tan points: times `j` at which no point of the reference stretch
//! `path[i..j]` (exclusive of `j`) lies on the half line `path[j] + {0, 1, 2, ..} x {0}`.
//!
//! The half line includes its endpoint, so a revisited vertex is never a tan
//! point. Detection is available by direct scan and through a per-row
//! maximum index that answers each query in O(1).

use std::cell::Cell;
use std::ops::Range;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};
use crate::lattice::LatticePoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub i: usize,
    pub j_lo: usize,
    pub j_hi: usize,
    pub m: usize,
}

impl WindowSpec {
    pub fn new(i: usize, j_lo: usize, j_hi: usize, m: usize) -> Result<Self> {
        if !(i <= j_lo && j_lo <= j_hi) || m == 0 {
            return Err(WalkError::Range(format!(
                "window needs i <= j_lo <= j_hi and m >= 1, got i={i} j_lo={j_lo} j_hi={j_hi} m={m}"
            )));
        }
        Ok(Self { i, j_lo, j_hi, m })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TanPointRecord {
    pub time: usize,
    pub point: LatticePoint,
    pub relative_to: usize,
}

/// `max{log x, 1}` with the natural logarithm.
pub fn log1(x: f64) -> f64 {
    x.ln().max(1.0)
}

/// `floor(m * log^6 n)` under the `max{log, 1}` convention.
pub fn lemma_horizon(m: usize, n: usize) -> usize {
    (m as f64 * log1(n as f64).powi(6)).floor() as usize
}

pub fn is_tan_point_brute(path: &[LatticePoint], i: usize, j: usize) -> Result<bool> {
    if !(i < j && j < path.len()) {
        return Err(WalkError::Index(format!(
            "need 0 <= i < j < {}, got i={i} j={j}",
            path.len()
        )));
    }
    let p = path[j];
    Ok(!path[i..j].iter().any(|q| q.y == p.y && q.x >= p.x))
}

/// Rightmost indexed x per row. Rows never inserted are absent.
#[derive(Debug, Clone, Default)]
pub struct RowMaxIndex {
    rows: FxHashMap<i64, i64>,
    updates: u64,
    queries: Cell<u64>,
}

impl RowMaxIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_points(points: &[LatticePoint]) -> Self {
        let mut index = Self::new();
        for &p in points {
            index.insert(p);
        }
        index
    }

    #[inline]
    pub fn insert(&mut self, p: LatticePoint) {
        self.updates += 1;
        self.rows
            .entry(p.y)
            .and_modify(|m| *m = (*m).max(p.x))
            .or_insert(p.x);
    }

    pub fn row_max(&self, y: i64) -> Option<i64> {
        self.rows.get(&y).copied()
    }

    #[inline]
    pub fn is_tan(&self, p: LatticePoint) -> bool {
        self.queries.set(self.queries.get() + 1);
        match self.rows.get(&p.y) {
            Some(&max) => max < p.x,
            None => true,
        }
    }

    pub fn clear(&mut self) {
        self.rows.clear();
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn queries(&self) -> u64 {
        self.queries.get()
    }
}

/// Tan test against an index holding exactly the reference stretch.
pub fn is_tan_point_indexed(index: &RowMaxIndex, p: LatticePoint) -> bool {
    index.is_tan(p)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TanCount {
    pub relative_to: usize,
    pub j_range: Range<usize>,
    /// `flags[k]` is the indicator for `j = j_range.start + k`.
    pub flags: Vec<bool>,
    pub total: usize,
    pub index_updates: u64,
    pub index_queries: u64,
}

impl TanCount {
    pub fn records<'a>(&'a self, path: &'a [LatticePoint]) -> impl Iterator<Item = TanPointRecord> + 'a {
        self.flags
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(move |(k, _)| {
                let time = self.j_range.start + k;
                TanPointRecord {
                    time,
                    point: path[time],
                    relative_to: self.relative_to,
                }
            })
    }
}

/// Tan indicators relative to `i` for every `j` in `j_range`, with one index
/// update per path point and one query per candidate.
pub fn count_tan_points(path: &[LatticePoint], i: usize, j_range: Range<usize>) -> Result<TanCount> {
    if j_range.is_empty() {
        return Ok(TanCount {
            relative_to: i,
            j_range,
            flags: Vec::new(),
            total: 0,
            index_updates: 0,
            index_queries: 0,
        });
    }
    if j_range.start <= i || j_range.end > path.len() {
        return Err(WalkError::Index(format!(
            "j range {j_range:?} must lie in ({i}, {})",
            path.len()
        )));
    }
    let mut index = RowMaxIndex::from_points(&path[i..j_range.start]);
    let mut flags = Vec::with_capacity(j_range.len());
    let mut total = 0;
    for j in j_range.clone() {
        let tan = index.is_tan(path[j]);
        total += tan as usize;
        flags.push(tan);
        if j + 1 < j_range.end {
            index.insert(path[j]);
        }
    }
    Ok(TanCount {
        relative_to: i,
        j_range,
        flags,
        total,
        index_updates: index.updates(),
        index_queries: index.queries(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BestWindow {
    pub j: usize,
    pub count: usize,
}

/// The window `[j, j + m]` with the most tan points relative to `i`, over
/// `i + m <= j <= i + horizon - m`. Ties go to the earliest `j`.
pub fn best_window_tan_count(path: &[LatticePoint], i: usize, m: usize, horizon: usize) -> Result<BestWindow> {
    let steps = path.len().saturating_sub(1);
    if m == 0 {
        return Err(WalkError::Range("window width m must be at least 1".into()));
    }
    if i + horizon > steps {
        return Err(WalkError::Range(format!(
            "horizon {horizon} from i={i} exceeds path of {steps} steps"
        )));
    }
    if horizon < 2 * m {
        return Err(WalkError::Range(format!(
            "horizon {horizon} admits no window of width {m}"
        )));
    }
    let counts = count_tan_points(path, i, i + 1..i + horizon + 1)?;
    // prefix[k] = tan points among j in (i, i + k]
    let mut prefix = Vec::with_capacity(horizon + 1);
    prefix.push(0usize);
    for &f in &counts.flags {
        prefix.push(prefix.last().unwrap() + f as usize);
    }
    let mut best = BestWindow { j: i + m, count: 0 };
    let mut first = true;
    for j in i + m..=i + horizon - m {
        let lo = j - i;
        let count = prefix[lo + m] - prefix[lo - 1];
        if first || count > best.count {
            best = BestWindow { j, count };
            first = false;
        }
    }
    Ok(best)
}
