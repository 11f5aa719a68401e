//! Preset runners. Each replica is simulated independently on stream
//! `(seed, replica)`, summarized into its own [`EnsembleSummary`], and the
//! summaries are folded in replica order once every worker is done.

use rayon::prelude::*;
use serde::Serialize;
use walklab_core::coupling::run_coupled;
use walklab_core::stats::{
    bernoulli_tail_bound, envelope_violations, exact_binomial_tail, exponent_fit, gap_audit,
    windowed_progress_with_horizon, EnsembleSummary, ExponentFit, MetricSummary, RunSummary, PROGRESS_SAMPLES,
};
use walklab_core::tanpoint::count_tan_points;
use walklab_core::{run_erw, Epsilon, ExcitedWalk, InitialRegion, RngSpec, WalkParams};

use crate::config::{ExperimentConfig, Preset};
use crate::error::CliError;

/// `n * eps` values of the Bernoulli tail grid.
pub const LEMMA_B_SCALED: [f64; 3] = [0.01, 0.1, 0.5];
pub const LEMMA_B_MAX_K: u32 = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaBRow {
    pub n: u64,
    pub n_epsilon: f64,
    pub epsilon: f64,
    pub k: u32,
    pub exact_tail: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedFit {
    pub metric: String,
    pub fit: ExponentFit,
    /// The `(n, metric)` pairs the fit was computed from.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentOutput {
    pub replicas: Vec<RunSummary>,
    pub aggregate: EnsembleSummary,
    pub fits: Vec<NamedFit>,
    pub lemma_b: Vec<LemmaBRow>,
}

pub fn metric_key(base: &str, eps: Epsilon, n: u64) -> String {
    format!("{base}|eps={eps}|n={n}")
}

fn walk_params(config: &ExperimentConfig, eps: Epsilon) -> WalkParams {
    let region = match config.halfplane_x {
        Some(x) => InitialRegion::half_plane(x),
        None => InitialRegion::empty(),
    };
    WalkParams::new(eps)
        .with_variant(config.variant)
        .with_cookies(config.cookies)
        .with_region(region)
}

struct Replica {
    summary: RunSummary,
    metrics: EnsembleSummary,
}

fn run_replica(config: &ExperimentConfig, eps: Epsilon, n: u64, r: u64) -> Result<Replica, CliError> {
    let params = walk_params(config, eps);
    let rng = RngSpec::new(config.seed, r);
    let mut metrics = EnsembleSummary::new();
    let key = |base: &str| metric_key(base, eps, n);

    let summary = match config.preset {
        Preset::Speed => {
            let mut walk = ExcitedWalk::new(&params, rng)?;
            for _ in 0..n {
                walk.step();
            }
            let end = walk.position();
            let mut s = RunSummary::new(eps, n, r, end.x, end.y);
            s.fresh_visit_count = Some(walk.fresh_visits());
            metrics.push(&key("fresh_visits"), walk.fresh_visits() as f64);
            s
        }
        Preset::TanExponent => {
            let path = run_erw(&params, n, rng)?;
            let end = path[n as usize];
            let tan = count_tan_points(&path, 0, 1..path.len())?.total as u64;
            let mut s = RunSummary::new(eps, n, r, end.x, end.y);
            s.tan_count_total = Some(tan);
            metrics.push(&key("tan_count"), tan as f64);
            s
        }
        Preset::Envelope => {
            let path = run_erw(&params, n, rng)?;
            let end = path[n as usize];
            let env = envelope_violations(&path);
            let mut s = RunSummary::new(eps, n, r, end.x, end.y);
            s.max_envelope_ratio = Some(env.max_ratio);
            metrics.push(&key("envelope_max_ratio"), env.max_ratio);
            metrics.push(&key("envelope_violation"), (env.violations > 0) as u8 as f64);
            s
        }
        Preset::CouplingAudit => {
            let traj = run_coupled(&params, n, rng)?;
            let audit = gap_audit(&traj, eps);
            let end = traj.erw_path[n as usize];
            let mut s = RunSummary::new(eps, n, r, end.x, end.y);
            s.fresh_visit_count = Some(traj.fresh_times.len() as u64);
            s.gap_final = Some(traj.final_gap());
            metrics.push(&key("fresh_visits"), traj.fresh_times.len() as f64);
            metrics.push(&key("gap_final"), traj.final_gap() as f64);
            metrics.push(&key("coupling_violation"), (!audit.passed()) as u8 as f64);
            metrics
                .metrics
                .insert(key("activation"), MetricSummary::from_bernoulli(audit.activations, audit.trials));
            s
        }
        Preset::WindowedProgress => {
            let m = config.progress_window(n);
            let path = run_erw(&params, 2 * n, rng)?;
            let end = path[2 * n as usize];
            let w = windowed_progress_with_horizon(&path, n as usize, m as usize, PROGRESS_SAMPLES)?;
            // the row records the full walk length so that speed is final_x / 2n
            let mut s = RunSummary::new(eps, 2 * n, r, end.x, end.y);
            s.windowed_progress_min = Some(w.min_progress);
            metrics.push(&key("progress_min"), w.min_progress as f64);
            metrics.push(&key("progress_scaled"), w.min_progress as f64 / (m as f64).powf(0.75));
            s
        }
        Preset::LemmaB => unreachable!("lemma-b does not simulate"),
    };
    metrics.push(&key("final_x"), summary.final_x as f64);
    metrics.push(&key("speed"), summary.speed());
    Ok(Replica { summary, metrics })
}

fn lemma_b_grid(ns: &[u64]) -> Result<Vec<LemmaBRow>, CliError> {
    let mut rows = Vec::new();
    for &n in ns {
        for &scaled in &LEMMA_B_SCALED {
            let eps = scaled / n as f64;
            for k in 1..=LEMMA_B_MAX_K {
                let exact_tail = exact_binomial_tail(n, eps, k as u64)?;
                let bound = bernoulli_tail_bound(n, eps, k);
                rows.push(LemmaBRow {
                    n,
                    n_epsilon: scaled,
                    epsilon: eps,
                    k,
                    exact_tail,
                    bound,
                    holds: exact_tail <= bound,
                });
            }
        }
    }
    Ok(rows)
}

fn fit_means(out: &ExperimentOutput, config: &ExperimentConfig, base: &str) -> Vec<NamedFit> {
    let mut fits = Vec::new();
    if config.n.len() < 3 {
        return fits;
    }
    for &eps in &config.epsilon {
        let points: Vec<(f64, f64)> = config
            .n
            .iter()
            .filter_map(|&n| out.aggregate.get(&metric_key(base, eps, n)).map(|m| (n as f64, m.mean)))
            .collect();
        if let Ok(fit) = exponent_fit(&points) {
            fits.push(NamedFit {
                metric: format!("{base}|eps={eps}"),
                fit,
                points,
            });
        }
    }
    fits
}

fn build_pool(workers: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::usage(format!("cannot start {workers} workers: {e}")))
}

/// Runs every `(epsilon, n)` group of the preset. Results depend only on the
/// config, never on the worker count.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput, CliError> {
    let mut out = ExperimentOutput::default();
    if config.preset == Preset::LemmaB {
        out.lemma_b = lemma_b_grid(&config.n)?;
        return Ok(out);
    }
    let pool = build_pool(config.workers)?;
    for &eps in &config.epsilon {
        for &n in &config.n {
            let replicas: Vec<Replica> = pool.install(|| {
                (0..config.replicas)
                    .into_par_iter()
                    .map(|r| run_replica(config, eps, n, r))
                    .collect::<Result<_, _>>()
            })?;
            for rep in replicas {
                out.aggregate.merge(&rep.metrics);
                out.replicas.push(rep.summary);
            }
        }
    }
    match config.preset {
        Preset::TanExponent => out.fits = fit_means(&out, config, "tan_count"),
        Preset::Speed => out.fits = fit_means(&out, config, "final_x"),
        _ => {}
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_b_grid_holds() {
        let rows = lemma_b_grid(&[10, 100, 1000]).unwrap();
        assert_eq!(rows.len(), 3 * 3 * 5);
        assert!(rows.iter().all(|r| r.holds));
    }
}
