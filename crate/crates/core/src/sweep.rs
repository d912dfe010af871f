//! Independent runs over many seeds. With the `parallel` feature the runs
//! are spread over a rayon pool; without it they run one after another.

use crate::campaign::{run, RunConfig, RunOutcome};
use crate::error::RunError;

#[cfg(feature = "parallel")]
pub fn sweep<T, F>(seeds: &[u64], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    seeds.par_iter().map(|&s| f(s)).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn sweep<T, F>(seeds: &[u64], f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    sweep_sequential(seeds, f)
}

pub fn sweep_sequential<T, F>(seeds: &[u64], f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    seeds.iter().map(|&s| f(s)).collect()
}

/// Runs `config` once per seed; results keep the order of `seeds`.
pub fn run_seeds(config: &RunConfig, seeds: &[u64]) -> Vec<Result<RunOutcome, RunError>> {
    sweep(seeds, |seed| {
        let mut c = config.clone();
        c.seed = seed;
        c.report_dir = c.report_dir.map(|d| d.join(format!("seed-{seed}")));
        run(&c)
    })
}
