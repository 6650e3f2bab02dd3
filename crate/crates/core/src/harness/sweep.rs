//! Variability × seed sweeps with once-per-second sampling at the source.

use serde::Serialize;
use thiserror::Error;

use crate::collection::Algorithm;
use crate::sim::{ScenarioConfig, ScenarioError, World};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleRow {
    pub algorithm: Algorithm,
    pub variability: f64,
    pub seed: u64,
    #[serde(rename = "time_s")]
    pub time: u64,
    pub value: f64,
    pub true_count: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("no variabilities to sweep")]
    NoVariabilities,
    #[error("no seeds to sweep")]
    NoSeeds,
    #[error("run (variability {variability}, seed {seed}) failed: {source}")]
    Run {
        variability: f64,
        seed: u64,
        #[source]
        source: ScenarioError,
    },
}

/// How independent runs are dispatched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Rayon pool; `None` uses the global pool. Falls back to sequential when
    /// the crate is built without the `parallel` feature.
    #[default]
    Parallel,
    ParallelWith(usize),
}

/// One full simulation. Every algorithm shares the trajectory; rows are
/// ordered by algorithm then time.
pub fn run_single(config: &ScenarioConfig) -> Result<Vec<SampleRow>, ScenarioError> {
    let mut world = World::build(config)?;
    let seconds = config.duration.floor() as u64;
    let algorithms = config.algorithms.clone();
    let mut per_alg: Vec<Vec<SampleRow>> = algorithms
        .iter()
        .map(|_| Vec::with_capacity(seconds as usize + 1))
        .collect();
    for t in 0..=seconds {
        world.advance_to(t as f64);
        for (rows, &algorithm) in per_alg.iter_mut().zip(&algorithms) {
            rows.push(SampleRow {
                algorithm,
                variability: config.variability,
                seed: config.seed,
                time: t,
                value: world.sample_at_source(algorithm),
                true_count: config.device_count as u64,
            });
        }
    }
    Ok(per_alg.into_iter().flatten().collect())
}

/// Runs every (variability, seed) pair. Output order is variability, seed,
/// algorithm, time regardless of how runs were scheduled.
pub fn run_sweep(
    base: &ScenarioConfig,
    variabilities: &[f64],
    seeds: &[u64],
    execution: Execution,
) -> Result<Vec<SampleRow>, SweepError> {
    if variabilities.is_empty() {
        return Err(SweepError::NoVariabilities);
    }
    if seeds.is_empty() {
        return Err(SweepError::NoSeeds);
    }
    let jobs: Vec<ScenarioConfig> = variabilities
        .iter()
        .flat_map(|&variability| {
            seeds.iter().map(move |&seed| ScenarioConfig {
                variability,
                seed,
                ..base.clone()
            })
        })
        .collect();
    let one = |c: &ScenarioConfig| {
        run_single(c).map_err(|source| SweepError::Run {
            variability: c.variability,
            seed: c.seed,
            source,
        })
    };
    let results = dispatch(&jobs, execution, one)?;
    Ok(results.into_iter().flatten().collect())
}

fn sequential<F>(jobs: &[ScenarioConfig], run: F) -> Result<Vec<Vec<SampleRow>>, SweepError>
where
    F: Fn(&ScenarioConfig) -> Result<Vec<SampleRow>, SweepError>,
{
    jobs.iter().map(run).collect()
}

#[cfg(feature = "parallel")]
fn dispatch<F>(
    jobs: &[ScenarioConfig],
    execution: Execution,
    run: F,
) -> Result<Vec<Vec<SampleRow>>, SweepError>
where
    F: Fn(&ScenarioConfig) -> Result<Vec<SampleRow>, SweepError> + Sync + Send,
{
    use rayon::prelude::*;

    match execution {
        Execution::Sequential => sequential(jobs, run),
        Execution::Parallel => jobs.par_iter().map(run).collect(),
        Execution::ParallelWith(workers) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers.max(1))
                .build()
                .expect("rayon pool");
            pool.install(|| jobs.par_iter().map(run).collect())
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn dispatch<F>(
    jobs: &[ScenarioConfig],
    _execution: Execution,
    run: F,
) -> Result<Vec<Vec<SampleRow>>, SweepError>
where
    F: Fn(&ScenarioConfig) -> Result<Vec<SampleRow>, SweepError>,
{
    sequential(jobs, run)
}

/// `n` evenly spaced values from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|i| start + (end - start) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}
