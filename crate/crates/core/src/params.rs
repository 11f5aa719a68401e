use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};
use crate::lattice::{InitialRegion, LatticePoint};

/// Fractional bits kept for the drift strength.
pub const EPSILON_FRAC_BITS: u32 = 40;
const EPSILON_SCALE: u64 = 1 << EPSILON_FRAC_BITS;
// 1/4 in epsilon units
const QUARTER_UNITS: u64 = EPSILON_SCALE >> 2;

/// Default cap on the number of steps a single stored path may take.
pub const DEFAULT_MAX_STEPS: u64 = 1 << 28;

/// Drift strength as a dyadic rational `units / 2^40` in `[0, 1/4)`.
///
/// Decimal input is rounded once to the nearest representable value, so every
/// probability derived from it is exact in `f64` and in the 64-bit integer
/// partition used for sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Epsilon {
    units: u64,
}

impl Epsilon {
    pub const ZERO: Epsilon = Epsilon { units: 0 };

    pub fn from_units(units: u64) -> Result<Self> {
        if units >= QUARTER_UNITS {
            return Err(WalkError::InvalidEpsilon(format!("{units}/2^40")));
        }
        Ok(Self { units })
    }

    pub fn from_f64(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(WalkError::InvalidEpsilon(value.to_string()));
        }
        let scaled = (value * EPSILON_SCALE as f64).round();
        if scaled >= QUARTER_UNITS as f64 {
            return Err(WalkError::InvalidEpsilon(value.to_string()));
        }
        Self::from_units(scaled as u64)
    }

    pub fn units(self) -> u64 {
        self.units
    }

    pub fn value(self) -> f64 {
        self.units as f64 / EPSILON_SCALE as f64
    }

    pub fn is_zero(self) -> bool {
        self.units == 0
    }

    /// `eps` expressed as a fraction of 2^64.
    #[inline]
    pub(crate) fn as_u64_fraction(self) -> u64 {
        self.units << (64 - EPSILON_FRAC_BITS)
    }
}

impl FromStr for Epsilon {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || WalkError::InvalidEpsilon(s.to_string());
        let t = s.trim();
        let (int_part, frac_part) = match t.split_once('.') {
            Some((a, b)) => (a, b),
            None => (t, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        if int_part.bytes().any(|b| b != b'0') {
            return Err(bad());
        }
        // Only inputs within 1e-18 of a rounding midpoint see the truncation.
        let frac = &frac_part[..frac_part.len().min(18)];
        let digits: u128 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let denom = 10u128.pow(frac.len() as u32);
        let num = digits << EPSILON_FRAC_BITS;
        let mut units = num / denom;
        if (num % denom) * 2 >= denom {
            units += 1;
        }
        Self::from_units(units as u64).map_err(|_| bad())
    }
}

impl fmt::Display for Epsilon {
    /// Shortest decimal that parses back to the same value.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.value();
        for digits in 1..=14 {
            let s = format!("{v:.digits$}");
            if s.parse::<Epsilon>().map(|e| e == *self).unwrap_or(false) {
                let s = s.trim_end_matches('0');
                let s = s.strip_suffix('.').unwrap_or(s);
                return f.write_str(if s.is_empty() { "0" } else { s });
            }
        }
        write!(f, "{v:.17}")
    }
}

impl Serialize for Epsilon {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Epsilon {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which sites produce a drifted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriftVariant {
    /// Drift on sites that still hold a cookie (never-visited sites for one cookie).
    #[default]
    FreshDrift,
    /// Drift on sites already in the past path or the initial region, the
    /// condition as written in the formal definition of the process.
    PaperLiteral,
}

impl FromStr for DriftVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fresh" | "fresh-drift" => Ok(Self::FreshDrift),
            "literal" | "paper-literal" => Ok(Self::PaperLiteral),
            other => Err(format!("unknown drift variant {other:?} (expected fresh or literal)")),
        }
    }
}

impl fmt::Display for DriftVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::FreshDrift => "fresh",
            Self::PaperLiteral => "literal",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    pub epsilon: Epsilon,
    pub drift_variant: DriftVariant,
    pub cookies_per_site: u32,
    pub initial_region: InitialRegion,
    pub start: LatticePoint,
    /// Longest path the run functions will materialize.
    pub max_steps: u64,
}

impl WalkParams {
    pub fn new(epsilon: Epsilon) -> Self {
        Self {
            epsilon,
            drift_variant: DriftVariant::FreshDrift,
            cookies_per_site: 1,
            initial_region: InitialRegion::empty(),
            start: LatticePoint::ORIGIN,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }

    pub fn simple() -> Self {
        Self::new(Epsilon::ZERO)
    }

    pub fn with_variant(mut self, variant: DriftVariant) -> Self {
        self.drift_variant = variant;
        self
    }

    pub fn with_cookies(mut self, cookies: u32) -> Self {
        self.cookies_per_site = cookies;
        self
    }

    pub fn with_region(mut self, region: InitialRegion) -> Self {
        self.initial_region = region;
        self
    }

    pub fn with_start(mut self, start: LatticePoint) -> Self {
        self.start = start;
        self
    }

    pub fn with_max_steps(mut self, max_steps: u64) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.cookies_per_site == 0 {
            return Err(WalkError::NoCookies);
        }
        Epsilon::from_units(self.epsilon.units)?;
        Ok(())
    }

    pub(crate) fn check_budget(&self, n: u64) -> Result<()> {
        if n > self.max_steps {
            return Err(WalkError::Capacity {
                requested: n,
                budget: self.max_steps,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Right,
    Left,
    Up,
    Down,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Right, Direction::Left, Direction::Up, Direction::Down];

    #[inline]
    pub fn offset(self) -> LatticePoint {
        match self {
            Direction::Right => LatticePoint::new(1, 0),
            Direction::Left => LatticePoint::new(-1, 0),
            Direction::Up => LatticePoint::new(0, 1),
            Direction::Down => LatticePoint::new(0, -1),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn of_step(from: LatticePoint, to: LatticePoint) -> Option<Direction> {
        let d = to - from;
        Direction::ALL.into_iter().find(|dir| dir.offset() == d)
    }
}

/// One-step transition law, ordered (right, left, up, down).
///
/// A draw `u` uniform on `[0, 2^64)` selects the first direction whose
/// cumulative cut exceeds it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDistribution {
    pub p_right: f64,
    pub p_left: f64,
    pub p_up: f64,
    pub p_down: f64,
    cuts: [u64; 3],
}

const HALF: u64 = 1 << 63;
const QUARTER: u64 = 1 << 62;

impl StepDistribution {
    pub fn uniform() -> Self {
        Self::drifted(Epsilon::ZERO)
    }

    pub fn drifted(eps: Epsilon) -> Self {
        let e = eps.value();
        Self {
            p_right: 0.25 + e,
            p_left: 0.25 - e,
            p_up: 0.25,
            p_down: 0.25,
            cuts: [QUARTER + eps.as_u64_fraction(), HALF, HALF + QUARTER],
        }
    }

    pub fn probabilities(&self) -> [f64; 4] {
        [self.p_right, self.p_left, self.p_up, self.p_down]
    }

    #[inline]
    pub fn sample(&self, u: u64) -> Direction {
        if u < self.cuts[0] {
            Direction::Right
        } else if u < self.cuts[1] {
            Direction::Left
        } else if u < self.cuts[2] {
            Direction::Up
        } else {
            Direction::Down
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_decimals() {
        let e: Epsilon = "0.1".parse().unwrap();
        assert!((e.value() - 0.1).abs() <= 0.5 / EPSILON_SCALE as f64);
        assert_eq!("0.125".parse::<Epsilon>().unwrap().units(), EPSILON_SCALE / 8);
        assert_eq!("0".parse::<Epsilon>().unwrap(), Epsilon::ZERO);
        assert_eq!(".05".parse::<Epsilon>().unwrap(), "0.05".parse().unwrap());
    }

    #[test]
    fn rejects_out_of_range() {
        for s in ["0.25", "0.3", "1", "1.0", "-0.1", "abc", "", ".", "0.1.2", "1e-3"] {
            assert!(s.parse::<Epsilon>().is_err(), "{s} should be rejected");
        }
        assert!("0.2499999".parse::<Epsilon>().is_ok());
        assert!(Epsilon::from_f64(0.25).is_err());
        assert!(Epsilon::from_f64(f64::NAN).is_err());
    }

    #[test]
    fn display_is_shortest_roundtrip() {
        for s in ["0.1", "0.05", "0.2", "0", "0.125", "0.000001"] {
            let e: Epsilon = s.parse().unwrap();
            assert_eq!(e.to_string(), s);
        }
    }

    #[test]
    fn drift_distribution_values() {
        let d = StepDistribution::drifted("0.1".parse().unwrap());
        let [r, l, u, dn] = d.probabilities();
        assert!((r - 0.35).abs() < 1e-12 && (l - 0.15).abs() < 1e-12);
        assert_eq!((u, dn), (0.25, 0.25));
        assert_eq!(r + l + u + dn, 1.0);
    }

    #[test]
    fn sample_partition_edges() {
        let d = StepDistribution::uniform();
        assert_eq!(d.sample(0), Direction::Right);
        assert_eq!(d.sample(QUARTER - 1), Direction::Right);
        assert_eq!(d.sample(QUARTER), Direction::Left);
        assert_eq!(d.sample(HALF), Direction::Up);
        assert_eq!(d.sample(HALF + QUARTER), Direction::Down);
        assert_eq!(d.sample(u64::MAX), Direction::Down);
    }

    proptest! {
        #[test]
        fn probabilities_sum_to_one(units in 0u64..QUARTER_UNITS) {
            let d = StepDistribution::drifted(Epsilon::from_units(units).unwrap());
            prop_assert_eq!(d.probabilities().iter().sum::<f64>(), 1.0);
            prop_assert!(d.probabilities().iter().all(|&p| p >= 0.0));
            // cut width matches the stated probability exactly
            prop_assert_eq!(d.cuts[0] as f64 / 2f64.powi(64), d.p_right);
        }

        #[test]
        fn display_roundtrips(units in 0u64..QUARTER_UNITS) {
            let e = Epsilon::from_units(units).unwrap();
            prop_assert_eq!(e.to_string().parse::<Epsilon>().unwrap(), e);
        }
    }
}
