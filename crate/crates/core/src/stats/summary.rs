use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Result, WalkError};
use crate::params::Epsilon;

/// Per-replica measurements. Metrics not computed by an experiment are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub epsilon: Epsilon,
    pub n: u64,
    pub replica_index: u64,
    pub final_x: i64,
    pub final_y: i64,
    pub fresh_visit_count: Option<u64>,
    pub gap_final: Option<u64>,
    pub tan_count_total: Option<u64>,
    pub max_envelope_ratio: Option<f64>,
    pub windowed_progress_min: Option<i64>,
}

impl RunSummary {
    pub fn new(epsilon: Epsilon, n: u64, replica_index: u64, final_x: i64, final_y: i64) -> Self {
        Self {
            epsilon,
            n,
            replica_index,
            final_x,
            final_y,
            fresh_visit_count: None,
            gap_final: None,
            tan_count_total: None,
            max_envelope_ratio: None,
            windowed_progress_min: None,
        }
    }

    pub fn speed(&self) -> f64 {
        self.final_x as f64 / self.n.max(1) as f64
    }
}

const SKETCH_CAPACITY: usize = 2048;

/// Weighted sorted sample that halves itself by pairing neighbours once it
/// outgrows its capacity. Exact until then.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QuantileSketch {
    items: Vec<(f64, u64)>,
}

impl QuantileSketch {
    pub fn insert(&mut self, x: f64) {
        self.insert_weighted(x, 1);
    }

    pub fn insert_weighted(&mut self, x: f64, weight: u64) {
        if weight == 0 {
            return;
        }
        let at = self.items.partition_point(|&(v, _)| v.total_cmp(&x).is_lt());
        self.items.insert(at, (x, weight));
        self.compact();
    }

    pub fn merge(&mut self, other: &QuantileSketch) {
        let mut merged = Vec::with_capacity(self.items.len() + other.items.len());
        let (mut a, mut b) = (self.items.iter().peekable(), other.items.iter().peekable());
        while let (Some(x), Some(y)) = (a.peek(), b.peek()) {
            if x.0.total_cmp(&y.0).is_le() {
                merged.push(*a.next().unwrap());
            } else {
                merged.push(*b.next().unwrap());
            }
        }
        merged.extend(a);
        merged.extend(b);
        self.items = merged;
        self.compact();
    }

    fn compact(&mut self) {
        while self.items.len() > SKETCH_CAPACITY {
            self.items = self
                .items
                .chunks(2)
                .enumerate()
                .map(|(k, pair)| match pair {
                    [a, b] => (if k % 2 == 0 { a.0 } else { b.0 }, a.1 + b.1),
                    [a] => *a,
                    _ => unreachable!(),
                })
                .collect();
        }
    }

    pub fn weight(&self) -> u64 {
        self.items.iter().map(|i| i.1).sum()
    }

    /// Lower quantile: smallest stored value with cumulative weight >= q * total.
    pub fn quantile(&self, q: f64) -> Option<f64> {
        let total = self.weight();
        if total == 0 {
            return None;
        }
        let target = ((q.clamp(0.0, 1.0) * total as f64).ceil() as u64).max(1);
        let mut acc = 0;
        for &(v, w) in &self.items {
            acc += w;
            if acc >= target {
                return Some(v);
            }
        }
        self.items.last().map(|i| i.0)
    }
}

/// Count, mean, centred second moment and range, mergeable in any grouping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
    pub min: f64,
    pub max: f64,
    pub sketch: QuantileSketch,
}

impl Default for MetricSummary {
    fn default() -> Self {
        Self {
            count: 0,
            mean: 0.0,
            m2: 0.0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            sketch: QuantileSketch::default(),
        }
    }
}

impl MetricSummary {
    pub fn from_values<I: IntoIterator<Item = f64>>(values: I) -> Self {
        let mut s = Self::default();
        for v in values {
            s.push(v);
        }
        s
    }

    /// Summary of `trials` 0/1 outcomes of which `successes` are 1.
    pub fn from_bernoulli(successes: u64, trials: u64) -> Self {
        assert!(successes <= trials, "{successes} successes in {trials} trials");
        let mut m = Self::default();
        if trials == 0 {
            return m;
        }
        let failures = trials - successes;
        let p = successes as f64 / trials as f64;
        m.count = trials;
        m.mean = p;
        m.m2 = successes as f64 * (1.0 - p) * (1.0 - p) + failures as f64 * p * p;
        m.min = if failures > 0 { 0.0 } else { 1.0 };
        m.max = if successes > 0 { 1.0 } else { 0.0 };
        m.sketch.insert_weighted(0.0, failures);
        m.sketch.insert_weighted(1.0, successes);
        m
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
        self.min = self.min.min(x);
        self.max = self.max.max(x);
        self.sketch.insert(x);
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&mut self, other: &MetricSummary) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        self.mean += delta * nb / n;
        self.m2 += other.m2 + delta * delta * na * nb / n;
        self.count += other.count;
        self.min = self.min.min(other.min);
        self.max = self.max.max(other.max);
        self.sketch.merge(&other.sketch);
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }

    pub fn ci(&self, z: f64) -> (f64, f64) {
        let half = z * self.stderr();
        (self.mean - half, self.mean + half)
    }
}

/// Named metrics, iterated in name order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub metrics: BTreeMap<String, MetricSummary>,
}

impl EnsembleSummary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, metric: &str, x: f64) {
        self.metrics.entry(metric.to_string()).or_default().push(x);
    }

    pub fn merge(&mut self, other: &EnsembleSummary) {
        for (name, m) in &other.metrics {
            self.metrics.entry(name.clone()).or_default().merge(m);
        }
    }

    pub fn get(&self, metric: &str) -> Option<&MetricSummary> {
        self.metrics.get(metric)
    }
}

/// Two-sided normal critical value for confidence `level`.
pub fn z_for_level(level: f64) -> f64 {
    let normal = Normal::standard();
    normal.inverse_cdf(0.5 + level / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedEstimate {
    pub replicas: u64,
    pub mean: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Fraction of replicas ending at `x <= 0`.
    pub p_nonpositive: f64,
}

/// Mean of `final_x / n` with a normal-approximation interval of half-width
/// `z` standard errors.
pub fn speed_estimate(summaries: &[RunSummary], z: f64) -> Result<SpeedEstimate> {
    if summaries.len() < 2 {
        return Err(WalkError::InsufficientData {
            needed: 2,
            got: summaries.len(),
        });
    }
    let m = MetricSummary::from_values(summaries.iter().map(RunSummary::speed));
    let (ci_low, ci_high) = m.ci(z);
    let nonpos = summaries.iter().filter(|s| s.final_x <= 0).count();
    Ok(SpeedEstimate {
        replicas: m.count,
        mean: m.mean,
        stderr: m.stderr(),
        ci_low,
        ci_high,
        p_nonpositive: nonpos as f64 / summaries.len() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn degenerate_speed() {
        let runs: Vec<_> = (0..5).map(|r| RunSummary::new(Epsilon::ZERO, 100, r, 100, 0)).collect();
        let s = speed_estimate(&runs, 3.0).unwrap();
        assert_eq!((s.mean, s.stderr), (1.0, 0.0));
        assert_eq!(s.p_nonpositive, 0.0);
        assert!(speed_estimate(&runs[..1], 3.0).is_err());
    }

    #[test]
    fn z_values() {
        assert!((z_for_level(0.95) - 1.959963984540054).abs() < 1e-9);
        assert!((z_for_level(0.9973002039367398) - 3.0).abs() < 1e-6);
    }

    #[test]
    fn sketch_quantiles_exact_below_capacity() {
        let mut s = QuantileSketch::default();
        for x in (1..=100).rev() {
            s.insert(x as f64);
        }
        assert_eq!(s.quantile(0.5), Some(50.0));
        assert_eq!(s.quantile(0.0), Some(1.0));
        assert_eq!(s.quantile(1.0), Some(100.0));
        assert_eq!(s.quantile(0.01), Some(1.0));
    }

    #[test]
    fn sketch_compacts_and_keeps_weight() {
        let mut s = QuantileSketch::default();
        for x in 0..10_000 {
            s.insert(x as f64);
        }
        assert_eq!(s.weight(), 10_000);
        assert!(s.items.len() <= SKETCH_CAPACITY);
        let med = s.quantile(0.5).unwrap();
        assert!((med - 5000.0).abs() < 100.0, "{med}");
    }

    #[test]
    fn bernoulli_matches_pushes() {
        let built = MetricSummary::from_bernoulli(3, 10);
        let pushed = MetricSummary::from_values([1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(built.count, pushed.count);
        assert!(close(built.mean, pushed.mean));
        assert!(close(built.m2, pushed.m2));
        assert_eq!((built.min, built.max), (0.0, 1.0));
        assert_eq!(built.sketch.quantile(0.5), Some(0.0));
        assert_eq!(built.sketch.quantile(0.8), Some(1.0));
        assert_eq!(MetricSummary::from_bernoulli(0, 0).count, 0);
    }

    #[test]
    fn moments_match_two_pass() {
        let xs: Vec<f64> = (0..1000).map(|k| ((k * 7919) % 1013) as f64 * 0.37 - 50.0).collect();
        let m = MetricSummary::from_values(xs.iter().copied());
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!(close(m.mean, mean));
        assert!(close(m.variance(), var));
    }

    proptest! {
        #[test]
        fn merge_is_associative_and_commutative(
            a in prop::collection::vec(-1e6f64..1e6, 0..40),
            b in prop::collection::vec(-1e6f64..1e6, 0..40),
            c in prop::collection::vec(-1e6f64..1e6, 0..40),
        ) {
            let (sa, sb, sc) = (
                MetricSummary::from_values(a.iter().copied()),
                MetricSummary::from_values(b.iter().copied()),
                MetricSummary::from_values(c.iter().copied()),
            );
            let mut left = sa.clone();
            left.merge(&sb);
            left.merge(&sc);
            let mut bc = sb.clone();
            bc.merge(&sc);
            let mut right = sa.clone();
            right.merge(&bc);
            let mut swapped = sb.clone();
            swapped.merge(&sa);
            let mut ab = sa.clone();
            ab.merge(&sb);

            let all = MetricSummary::from_values(a.iter().chain(&b).chain(&c).copied());
            prop_assert_eq!(left.count, right.count);
            prop_assert_eq!(left.count, all.count);
            prop_assert!(close(left.mean, right.mean) && close(left.mean, all.mean));
            prop_assert!(close(left.m2, right.m2) && close(left.m2, all.m2));
            prop_assert!(close(ab.mean, swapped.mean) && close(ab.m2, swapped.m2));
            prop_assert_eq!(left.min, all.min);
            prop_assert_eq!(left.max, all.max);
            prop_assert_eq!(left.sketch.weight(), all.count);
        }
    }
}
