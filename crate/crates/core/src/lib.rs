//! Monte Carlo laboratory for the two-dimensional excited random walk.
//!
//! The walk eats a cookie the first time it stands on a site and then steps
//! right with probability `1/4 + eps`, left with `1/4 - eps`, and up or down
//! with `1/4` each. Sites without a cookie get a simple random walk step.
//!
//! * [`walk`] runs the simple and excited walks from a seeded stream.
//! * [`coupling`] runs an excited walk and a simple walk on shared randomness
//!   so that the excited walk stays pathwise to the right.
//! * [`tanpoint`] detects tan points (times where the past path does not
//!   block the horizontal half line to the right).
//! * [`stats`] turns trajectories into estimates, fits and exact tail oracles.

pub mod coupling;
pub mod error;
pub mod lattice;
pub mod params;
pub mod rng;
pub mod stats;
pub mod tanpoint;
pub mod walk;

pub use coupling::{run_coupled, CoupledTrajectory, CouplingRule};
pub use error::{Result, WalkError};
pub use lattice::{InitialRegion, LatticePoint, VisitedSet};
pub use params::{Direction, DriftVariant, Epsilon, StepDistribution, WalkParams};
pub use rng::{seed_derivation, RngSpec};
pub use walk::{fresh_site_times, is_drift_site, run_erw, run_srw, step_distribution, ExcitedWalk};
