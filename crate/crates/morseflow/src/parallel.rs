//! Parallel sweeps. Results always come back in input order.

use morseflow_core::connections::{
    assemble_digraph, assemble_distance_table, check_distance_sweep_domain, morse_distance_row,
    probe_tasks, run_probe, ConnectionDigraph, MorseDistanceTable, ProbeSettings,
};
use morseflow_core::equilibria::{
    check_sweep_domain, convergence_row, ConvergenceCriteria, ConvergenceSweep, EquilibriumProfile,
    ShootSettings,
};
use morseflow_core::nonlinearity::NonlinearityModel;
use morseflow_core::timemap::{TimeMap, TimeMapSample};
use morseflow_core::Sign;
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::error::{CliError, Result};

/// A pool with `jobs` workers, or rayon's default when `None`.
pub fn pool(jobs: Option<usize>) -> Result<ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(CliError::Input("--jobs must be at least 1".into()));
        }
        b = b.num_threads(n);
    }
    b.build()
        .map_err(|e| CliError::Input(format!("cannot start worker pool: {e}")))
}

/// `items.map(f)` on `pool`, in input order; the first error in input
/// order wins.
pub fn try_map<T, R, F>(pool: &ThreadPool, items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    pool.install(|| items.par_iter().map(&f).collect::<Vec<_>>())
        .into_iter()
        .collect()
}

pub fn timemap_samples(pool: &ThreadPool, tm: &TimeMap, energies: &[f64]) -> Result<Vec<TimeMapSample>> {
    try_map(pool, energies, |&e| Ok(tm.sample(e)?))
}

pub fn probe_connections(
    pool: &ThreadPool,
    model: &NonlinearityModel,
    equilibria: &[EquilibriumProfile],
    settings: &ProbeSettings,
) -> Result<ConnectionDigraph> {
    let tasks = probe_tasks(equilibria, settings);
    let outcomes = try_map(pool, &tasks, |t| Ok(run_probe(model, equilibria, t, &settings.capture)?))?;
    Ok(assemble_digraph(model, equilibria, &outcomes))
}

pub fn convergence_sweep(
    pool: &ThreadPool,
    eps_list: &[f64],
    n: u32,
    sign: Sign,
    interior: usize,
    shoot: &ShootSettings,
    criteria: &ConvergenceCriteria,
) -> Result<ConvergenceSweep> {
    check_sweep_domain(eps_list, n)?;
    let rows = try_map(pool, eps_list, |&eps| Ok(convergence_row(eps, n, sign, interior, shoot)?))?;
    Ok(ConvergenceSweep::assemble(rows, criteria))
}

pub fn morse_distance_sweep(
    pool: &ThreadPool,
    eps_list: &[f64],
    cut: u32,
    interior: usize,
    shoot: &ShootSettings,
    sweep_tol: f64,
) -> Result<MorseDistanceTable> {
    let max_index = check_distance_sweep_domain(eps_list, cut)?;
    let rows = try_map(pool, eps_list, |&eps| {
        Ok(morse_distance_row(eps, cut, max_index, interior, shoot)?)
    })?;
    Ok(assemble_distance_table(cut, rows, sweep_tol))
}
