use serde::{Deserialize, Serialize};

use crate::coupling::CoupledTrajectory;
use crate::params::Epsilon;

/// Exact pathwise checks on a coupled trajectory plus a binomial z-score for
/// the activation count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapAudit {
    /// gap(j + 1) >= gap(j) for all j, and gap(0) = 0.
    pub monotone: bool,
    /// gap(j) >= 0, even, and equal to the x-difference of the paths.
    pub dominance: bool,
    pub vertical_lock: bool,
    /// Final gap equals twice the number of activated fresh visits.
    pub bookkeeping: bool,
    /// Fresh visits followed by a step.
    pub trials: u64,
    pub activations: u64,
    pub activation_probability: f64,
    pub z: f64,
}

impl GapAudit {
    pub fn passed(&self) -> bool {
        self.monotone && self.dominance && self.vertical_lock && self.bookkeeping
    }
}

fn binomial_z(successes: u64, trials: u64, p: f64) -> f64 {
    let mean = trials as f64 * p;
    let var = mean * (1.0 - p);
    if var == 0.0 {
        return if successes as f64 == mean { 0.0 } else { f64::INFINITY };
    }
    (successes as f64 - mean) / var.sqrt()
}

pub fn gap_audit(traj: &CoupledTrajectory, eps: Epsilon) -> GapAudit {
    let len = traj.erw_path.len();
    let mut dominance = traj.srw_path.len() == len && traj.gap.len() == len;
    let mut vertical_lock = dominance;
    if dominance {
        for ((e, r), &g) in traj.erw_path.iter().zip(&traj.srw_path).zip(&traj.gap) {
            vertical_lock &= e.y == r.y;
            dominance &= g % 2 == 0 && e.x - r.x == g as i64;
        }
    }
    let monotone = traj.gap.first() == Some(&0) && traj.gap.windows(2).all(|w| w[1] >= w[0]);

    let last = len.saturating_sub(1);
    let trials = traj.fresh_times.iter().filter(|&&t| t < last).count() as u64;
    let flips = traj.xi.iter().filter(|&&x| x == 2).count() as u64;
    let bookkeeping = traj.xi.len() == traj.fresh_times.len()
        && traj.xi.iter().all(|&x| x == 0 || x == 2)
        && traj.gap.last().copied() == Some(2 * traj.activations)
        // with one cookie per site every drift step leaves a fresh site
        && if traj.drift_steps == trials { flips == traj.activations } else { flips <= traj.activations };

    let p = traj.rule.activation_probability(eps);
    GapAudit {
        monotone,
        dominance,
        vertical_lock,
        bookkeeping,
        trials,
        activations: flips,
        activation_probability: p,
        z: binomial_z(flips, trials, p),
    }
}

/// z-score of the pooled activation count across audits sharing one probability.
pub fn pooled_activation_z(audits: &[GapAudit]) -> f64 {
    let trials: u64 = audits.iter().map(|a| a.trials).sum();
    let flips: u64 = audits.iter().map(|a| a.activations).sum();
    let p = audits.first().map_or(0.0, |a| a.activation_probability);
    binomial_z(flips, trials, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{run_coupled, CouplingRule};
    use crate::lattice::LatticePoint;
    use crate::params::WalkParams;
    use crate::rng::RngSpec;

    fn p(x: i64, y: i64) -> LatticePoint {
        LatticePoint::new(x, y)
    }

    fn hand_built() -> CoupledTrajectory {
        CoupledTrajectory {
            epsilon: "0.1".parse().unwrap(),
            rule: CouplingRule::TwiceEpsilon,
            erw_path: vec![p(0, 0), p(1, 0), p(1, 1), p(2, 1)],
            srw_path: vec![p(0, 0), p(-1, 0), p(-1, 1), p(0, 1)],
            gap: vec![0, 2, 2, 2],
            fresh_times: vec![0, 1, 2, 3],
            xi: vec![2, 0, 0, 0],
            drift_steps: 3,
            activations: 1,
        }
    }

    #[test]
    fn hand_built_trajectory_passes() {
        let t = hand_built();
        let a = gap_audit(&t, t.epsilon);
        assert!(a.passed(), "{a:?}");
        assert_eq!((a.trials, a.activations), (3, 1));
    }

    #[test]
    fn tampered_trajectories_fail() {
        let mut t = hand_built();
        t.gap = vec![0, 2, 0, 2];
        assert!(!gap_audit(&t, t.epsilon).monotone);

        let mut t = hand_built();
        t.srw_path[2] = p(-1, 2);
        assert!(!gap_audit(&t, t.epsilon).vertical_lock);

        let mut t = hand_built();
        t.srw_path[3] = p(3, 1);
        assert!(!gap_audit(&t, t.epsilon).dominance);

        let mut t = hand_built();
        t.activations = 2;
        assert!(!gap_audit(&t, t.epsilon).bookkeeping);
    }

    #[test]
    fn zero_epsilon_has_no_activations() {
        let t = run_coupled(&WalkParams::simple(), 5000, RngSpec::new(8, 8)).unwrap();
        let a = gap_audit(&t, Epsilon::ZERO);
        assert!(a.passed());
        assert_eq!(a.activations, 0);
        assert_eq!(a.z, 0.0);
    }

    #[test]
    fn z_is_unremarkable_for_simulated_runs() {
        let eps: Epsilon = "0.1".parse().unwrap();
        let params = WalkParams::new(eps);
        let audits: Vec<_> = (0..50)
            .map(|r| gap_audit(&run_coupled(&params, 2000, RngSpec::new(11, r)).unwrap(), eps))
            .collect();
        assert!(audits.iter().all(GapAudit::passed));
        assert!(pooled_activation_z(&audits).abs() < 4.0);
    }
}
