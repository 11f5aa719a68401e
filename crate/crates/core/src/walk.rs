//! Simple and excited random walks driven by a seeded stream.
//!
//! Every step consumes exactly one 64-bit draw, which is mapped onto the
//! partition (right, left, up, down) of the current site's step law.

use rustc_hash::FxHashMap;

use crate::error::Result;
use crate::lattice::{InitialRegion, LatticePoint, VisitedSet};
use crate::params::{Direction, DriftVariant, StepDistribution, WalkParams, DEFAULT_MAX_STEPS};
use crate::rng::{RngCore, RngSpec, WalkRng};

pub fn step_distribution(params: &WalkParams, site_is_drift_site: bool) -> StepDistribution {
    if site_is_drift_site {
        StepDistribution::drifted(params.epsilon)
    } else {
        StepDistribution::uniform()
    }
}

/// Whether the walk standing at `position` takes a drifted step.
///
/// `visited` must hold the path strictly before the current time (plus the
/// initial region) and `cookie_count_at_site` the cookies left on arrival.
pub fn is_drift_site(
    params: &WalkParams,
    visited: &VisitedSet,
    cookie_count_at_site: u32,
    position: LatticePoint,
) -> bool {
    let in_region = params.initial_region.contains(position);
    let seen = match params.drift_variant {
        DriftVariant::FreshDrift => false,
        DriftVariant::PaperLiteral => in_region || visited.contains_explicit(position),
    };
    drift_rule(params.drift_variant, cookie_count_at_site, in_region, seen)
}

#[inline]
fn drift_rule(variant: DriftVariant, cookies_left: u32, in_region: bool, previously_visited: bool) -> bool {
    match variant {
        DriftVariant::FreshDrift => cookies_left > 0 && !in_region,
        DriftVariant::PaperLiteral => previously_visited,
    }
}

/// What happened on one step of an [`ExcitedWalk`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepRecord {
    pub from: LatticePoint,
    pub to: LatticePoint,
    pub direction: Direction,
    /// The step was drawn from the drifted law.
    pub drift: bool,
    /// `from` was a fresh site when the walk arrived there.
    pub from_fresh: bool,
}

/// Streaming excited random walk.
///
/// Keeps the visited set and the cookie ledger, so it can run long walks
/// without materializing the path.
#[derive(Debug, Clone)]
pub struct ExcitedWalk {
    params: WalkParams,
    visited: VisitedSet,
    // visit counts for sites visited fewer than cookies_per_site times (multi-cookie only)
    partial: FxHashMap<LatticePoint, u32>,
    pos: LatticePoint,
    time: u64,
    at_drift: bool,
    at_fresh: bool,
    drifted: StepDistribution,
    uniform: StepDistribution,
    rng: WalkRng,
    fresh_visits: u64,
    drift_steps: u64,
}

impl ExcitedWalk {
    pub fn new(params: &WalkParams, rng: RngSpec) -> Result<Self> {
        Self::with_rng(params, rng.stream())
    }

    pub fn with_rng(params: &WalkParams, rng: WalkRng) -> Result<Self> {
        params.validate()?;
        let mut walk = Self {
            params: params.clone(),
            visited: VisitedSet::new(params.initial_region.clone()),
            partial: FxHashMap::default(),
            pos: params.start,
            time: 0,
            at_drift: false,
            at_fresh: false,
            drifted: StepDistribution::drifted(params.epsilon),
            uniform: StepDistribution::uniform(),
            rng,
            fresh_visits: 0,
            drift_steps: 0,
        };
        walk.arrive(params.start);
        Ok(walk)
    }

    fn arrive(&mut self, p: LatticePoint) {
        let cookies = self.params.cookies_per_site;
        let in_region = self.params.initial_region.contains(p);
        let newly = self.visited.insert(p);
        let prior = if newly {
            if cookies > 1 {
                self.partial.insert(p, 1);
            }
            0
        } else if cookies == 1 {
            1
        } else {
            match self.partial.get_mut(&p) {
                Some(count) => {
                    let prior = *count;
                    *count += 1;
                    if *count >= cookies {
                        self.partial.remove(&p);
                    }
                    prior
                }
                None => cookies,
            }
        };
        self.at_fresh = newly && !in_region;
        self.at_drift = drift_rule(
            self.params.drift_variant,
            cookies.saturating_sub(prior),
            in_region,
            in_region || !newly,
        );
        if self.at_fresh {
            self.fresh_visits += 1;
        }
        self.pos = p;
    }

    pub fn step(&mut self) -> StepRecord {
        let law = if self.at_drift { &self.drifted } else { &self.uniform };
        let direction = law.sample(self.rng.next_u64());
        let from = self.pos;
        let record = StepRecord {
            from,
            to: from + direction.offset(),
            direction,
            drift: self.at_drift,
            from_fresh: self.at_fresh,
        };
        self.move_to(record.to);
        record
    }

    pub(crate) fn move_to(&mut self, next: LatticePoint) {
        if self.at_drift {
            self.drift_steps += 1;
        }
        self.time += 1;
        self.arrive(next);
    }

    pub(crate) fn next_draw(&mut self) -> u64 {
        self.rng.next_u64()
    }

    pub fn position(&self) -> LatticePoint {
        self.pos
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    /// The current site produces a drifted step.
    pub fn at_drift_site(&self) -> bool {
        self.at_drift
    }

    /// The current site was fresh on arrival.
    pub fn at_fresh_site(&self) -> bool {
        self.at_fresh
    }

    /// Fresh arrivals so far, including time 0 when the start is fresh.
    pub fn fresh_visits(&self) -> u64 {
        self.fresh_visits
    }

    /// Steps already taken from drift sites.
    pub fn drift_steps(&self) -> u64 {
        self.drift_steps
    }

    pub fn visited(&self) -> &VisitedSet {
        &self.visited
    }

    pub fn params(&self) -> &WalkParams {
        &self.params
    }
}

/// Path of an excited walk, `n + 1` points starting at `params.start`.
pub fn run_erw(params: &WalkParams, n: u64, rng: RngSpec) -> Result<Vec<LatticePoint>> {
    params.validate()?;
    params.check_budget(n)?;
    let mut walk = ExcitedWalk::new(params, rng)?;
    let mut path = Vec::with_capacity(n as usize + 1);
    path.push(walk.position());
    for _ in 0..n {
        path.push(walk.step().to);
    }
    Ok(path)
}

/// Path of a simple random walk. Uses the same draw-to-direction map as
/// [`run_erw`], so `eps = 0` runs agree step for step.
pub fn run_srw(start: LatticePoint, n: u64, rng: RngSpec) -> Result<Vec<LatticePoint>> {
    WalkParams::simple().with_max_steps(DEFAULT_MAX_STEPS).check_budget(n)?;
    let law = StepDistribution::uniform();
    let mut stream = rng.stream();
    let mut path = Vec::with_capacity(n as usize + 1);
    let mut pos = start;
    path.push(pos);
    for _ in 0..n {
        pos = pos + law.sample(stream.next_u64()).offset();
        path.push(pos);
    }
    Ok(path)
}

/// Times at which the path stands on a site outside its own past and `region`.
pub fn fresh_site_times(path: &[LatticePoint], region: &InitialRegion) -> Vec<usize> {
    let mut seen = VisitedSet::with_capacity(InitialRegion::empty(), path.len());
    path.iter()
        .enumerate()
        .filter_map(|(t, &p)| (seen.insert(p) && !region.contains(p)).then_some(t))
        .collect()
}
