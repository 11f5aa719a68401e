use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Sub};

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

/// A vertex of Z^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct LatticePoint {
    pub x: i64,
    pub y: i64,
}

impl LatticePoint {
    pub const ORIGIN: LatticePoint = LatticePoint { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    /// Packs both coordinates into one word when they fit in `i32`.
    #[inline]
    pub fn pack(self) -> Option<u64> {
        let x = i32::try_from(self.x).ok()?;
        let y = i32::try_from(self.y).ok()?;
        Some(((x as u32 as u64) << 32) | (y as u32 as u64))
    }

    pub fn unpack(key: u64) -> Self {
        Self {
            x: (key >> 32) as u32 as i32 as i64,
            y: key as u32 as i32 as i64,
        }
    }
}

impl Add for LatticePoint {
    type Output = LatticePoint;

    fn add(self, rhs: Self) -> Self {
        LatticePoint::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for LatticePoint {
    type Output = LatticePoint;

    fn sub(self, rhs: Self) -> Self {
        LatticePoint::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Sites treated as visited before the walk starts. They never hold cookies.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitialRegion {
    /// Every site with `x <= threshold` is pre-visited.
    pub half_plane_threshold: Option<i64>,
    pub extra_points: BTreeSet<LatticePoint>,
}

impl InitialRegion {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn half_plane(threshold: i64) -> Self {
        Self {
            half_plane_threshold: Some(threshold),
            extra_points: BTreeSet::new(),
        }
    }

    pub fn with_points<I: IntoIterator<Item = LatticePoint>>(mut self, points: I) -> Self {
        self.extra_points.extend(points);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.half_plane_threshold.is_none() && self.extra_points.is_empty()
    }

    #[inline]
    pub fn contains(&self, p: LatticePoint) -> bool {
        matches!(self.half_plane_threshold, Some(t) if p.x <= t)
            || (!self.extra_points.is_empty() && self.extra_points.contains(&p))
    }
}

/// Membership for `region ∪ points` plus the rightmost explicit point per row.
#[derive(Debug, Clone, Default)]
pub struct VisitedSet {
    region: InitialRegion,
    packed: FxHashSet<u64>,
    // points outside the i32 box
    wide: FxHashSet<LatticePoint>,
    row_max: FxHashMap<i64, i64>,
}

impl VisitedSet {
    pub fn new(region: InitialRegion) -> Self {
        Self {
            region,
            ..Self::default()
        }
    }

    pub fn with_capacity(region: InitialRegion, capacity: usize) -> Self {
        Self {
            region,
            packed: FxHashSet::with_capacity_and_hasher(capacity, Default::default()),
            wide: FxHashSet::default(),
            row_max: FxHashMap::default(),
        }
    }

    pub fn region(&self) -> &InitialRegion {
        &self.region
    }

    /// Records `p` as explicitly visited. Returns `true` if it was not
    /// explicitly visited before (the initial region is not consulted).
    #[inline]
    pub fn insert(&mut self, p: LatticePoint) -> bool {
        let fresh = match p.pack() {
            Some(key) => self.packed.insert(key),
            None => self.wide.insert(p),
        };
        if fresh {
            self.row_max
                .entry(p.y)
                .and_modify(|m| *m = (*m).max(p.x))
                .or_insert(p.x);
        }
        fresh
    }

    #[inline]
    pub fn contains_explicit(&self, p: LatticePoint) -> bool {
        match p.pack() {
            Some(key) => self.packed.contains(&key),
            None => self.wide.contains(&p),
        }
    }

    #[inline]
    pub fn contains(&self, p: LatticePoint) -> bool {
        self.region.contains(p) || self.contains_explicit(p)
    }

    pub fn row_max(&self, y: i64) -> Option<i64> {
        self.row_max.get(&y).copied()
    }

    /// Number of explicitly visited points.
    pub fn len(&self) -> usize {
        self.packed.len() + self.wide.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        self.packed
            .iter()
            .map(|&k| LatticePoint::unpack(k))
            .chain(self.wide.iter().copied())
    }
}
