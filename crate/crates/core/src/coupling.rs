//! An excited walk and a simple walk driven by shared randomness.
//!
//! At a site holding a cookie the pair either *activates* (the excited walk
//! steps right and the simple walk steps left) or takes a common step. Off
//! cookie sites they always take the same step. The horizontal gap between
//! them is therefore even and never decreases, and their heights agree.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};
use crate::lattice::LatticePoint;
use crate::params::{Direction, DriftVariant, Epsilon, StepDistribution, WalkParams};
use crate::rng::RngSpec;
use crate::walk::ExcitedWalk;

/// How a cookie step is split between activation and a common step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CouplingRule {
    /// Activate with probability `2 eps` (one draw); otherwise both walks take
    /// the same uniform step drawn from a second draw. The excited marginal
    /// then steps right with `1/4 + 3 eps / 2` and left with `1/4 - eps / 2`,
    /// which has the same mean drift `2 eps` as the excited law.
    #[default]
    TwiceEpsilon,
    /// Activate with probability `eps`; otherwise take the common step
    /// `(1/4, 1/4 - eps, 1/4, 1/4) / (1 - eps)`. One draw per step. The
    /// excited marginal equals the drifted step law exactly.
    MarginalPreserving,
}

impl CouplingRule {
    pub fn activation_probability(self, eps: Epsilon) -> f64 {
        match self {
            CouplingRule::TwiceEpsilon => 2.0 * eps.value(),
            CouplingRule::MarginalPreserving => eps.value(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledTrajectory {
    pub epsilon: Epsilon,
    pub rule: CouplingRule,
    pub erw_path: Vec<LatticePoint>,
    pub srw_path: Vec<LatticePoint>,
    /// `erw_path[j].x - srw_path[j].x`.
    pub gap: Vec<u64>,
    /// Times the excited walk stood on a new site.
    pub fresh_times: Vec<usize>,
    /// 2 if the step leaving `fresh_times[k]` activated, else 0.
    pub xi: Vec<u8>,
    /// Steps taken from drift sites.
    pub drift_steps: u64,
    pub activations: u64,
}

impl CoupledTrajectory {
    pub fn len(&self) -> usize {
        self.erw_path.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn final_gap(&self) -> u64 {
        *self.gap.last().expect("trajectory holds at least the start")
    }

    pub fn activation_probability(&self) -> f64 {
        self.rule.activation_probability(self.epsilon)
    }
}

pub fn run_coupled(params: &WalkParams, n: u64, rng: RngSpec) -> Result<CoupledTrajectory> {
    run_coupled_with(params, n, rng, CouplingRule::default())
}

pub fn run_coupled_with(
    params: &WalkParams,
    n: u64,
    rng: RngSpec,
    rule: CouplingRule,
) -> Result<CoupledTrajectory> {
    params.validate()?;
    if params.drift_variant != DriftVariant::FreshDrift {
        return Err(WalkError::Variant);
    }
    params.check_budget(n)?;

    let uniform = StepDistribution::uniform();
    let drifted = StepDistribution::drifted(params.epsilon);
    let eps_cut = params.epsilon.as_u64_fraction();
    let activation_cut = match rule {
        CouplingRule::TwiceEpsilon => eps_cut << 1,
        CouplingRule::MarginalPreserving => eps_cut,
    };

    let cap = n as usize + 1;
    let mut erw = ExcitedWalk::new(params, rng)?;
    let mut srw = params.start;
    let mut traj = CoupledTrajectory {
        epsilon: params.epsilon,
        rule,
        erw_path: Vec::with_capacity(cap),
        srw_path: Vec::with_capacity(cap),
        gap: Vec::with_capacity(cap),
        fresh_times: Vec::new(),
        xi: Vec::new(),
        drift_steps: 0,
        activations: 0,
    };
    traj.erw_path.push(erw.position());
    traj.srw_path.push(srw);
    traj.gap.push(0);

    for t in 0..n as usize {
        let fresh = erw.at_fresh_site();
        let mut activated = false;
        let shared = if erw.at_drift_site() {
            traj.drift_steps += 1;
            let u = erw.next_draw();
            if u < activation_cut {
                activated = true;
                None
            } else {
                Some(match rule {
                    CouplingRule::TwiceEpsilon => uniform.sample(erw.next_draw()),
                    CouplingRule::MarginalPreserving => drifted.sample(u),
                })
            }
        } else {
            Some(uniform.sample(erw.next_draw()))
        };

        let (erw_dir, srw_dir) = match shared {
            Some(d) => (d, d),
            None => (Direction::Right, Direction::Left),
        };
        erw.move_to(erw.position() + erw_dir.offset());
        srw = srw + srw_dir.offset();
        if activated {
            traj.activations += 1;
        }
        if fresh {
            traj.fresh_times.push(t);
            traj.xi.push(if activated { 2 } else { 0 });
        }
        traj.erw_path.push(erw.position());
        traj.srw_path.push(srw);
        traj.gap.push(2 * traj.activations);
    }
    if erw.at_fresh_site() {
        traj.fresh_times.push(n as usize);
        traj.xi.push(0);
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::InitialRegion;
    use crate::walk::fresh_site_times;

    fn eps(s: &str) -> Epsilon {
        s.parse().unwrap()
    }

    fn check_invariants(t: &CoupledTrajectory) {
        assert_eq!(t.gap[0], 0);
        for j in 0..t.erw_path.len() {
            assert_eq!(t.erw_path[j].y, t.srw_path[j].y);
            assert_eq!(t.erw_path[j].x - t.srw_path[j].x, t.gap[j] as i64);
            assert_eq!(t.gap[j] % 2, 0);
        }
        assert!(t.gap.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(t.final_gap(), 2 * t.activations);
    }

    #[test]
    fn zero_epsilon_paths_coincide() {
        for seed in 0..20 {
            let t = run_coupled(&WalkParams::simple(), 1000, RngSpec::new(seed, 0)).unwrap();
            assert_eq!(t.erw_path, t.srw_path);
            assert!(t.gap.iter().all(|&g| g == 0));
            check_invariants(&t);
        }
    }

    #[test]
    fn invariants_hold_for_both_rules() {
        for rule in [CouplingRule::TwiceEpsilon, CouplingRule::MarginalPreserving] {
            for seed in 0..20 {
                let params = WalkParams::new(eps("0.2"));
                let t = run_coupled_with(&params, 2000, RngSpec::new(seed, 9), rule).unwrap();
                check_invariants(&t);
                let flips = t.xi.iter().filter(|&&x| x == 2).count() as u64;
                assert_eq!(t.final_gap(), 2 * flips);
                assert_eq!(t.fresh_times, fresh_site_times(&t.erw_path, &InitialRegion::empty()));
            }
        }
    }

    #[test]
    fn region_start_and_multi_cookie() {
        let params = WalkParams::new(eps("0.1"))
            .with_region(InitialRegion::half_plane(2))
            .with_cookies(3);
        let t = run_coupled(&params, 3000, RngSpec::new(5, 5)).unwrap();
        check_invariants(&t);
        assert_eq!(t.fresh_times, fresh_site_times(&t.erw_path, &params.initial_region));
        assert!(t.drift_steps >= t.fresh_times.len() as u64 - 1);
    }

    #[test]
    fn literal_variant_is_rejected() {
        let params = WalkParams::new(eps("0.1")).with_variant(DriftVariant::PaperLiteral);
        assert_eq!(run_coupled(&params, 10, RngSpec::new(0, 0)), Err(WalkError::Variant));
    }

    #[test]
    fn deterministic() {
        let params = WalkParams::new(eps("0.1"));
        let a = run_coupled(&params, 5000, RngSpec::new(77, 3)).unwrap();
        let b = run_coupled(&params, 5000, RngSpec::new(77, 3)).unwrap();
        assert_eq!(a, b);
    }
}
