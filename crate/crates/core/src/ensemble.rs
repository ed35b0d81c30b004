//! Monte Carlo averaging over independent noise configurations.
//!
//! Configurations run in parallel; their results are collected in index
//! order and reduced sequentially, so the output does not depend on the
//! thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::noise::{draw_schedule, NoiseSpec, PhaseSchedule};
use crate::observables::{
    average_pair, distribution, least_squares, mean_and_variance, Distribution, VarianceSeries,
};
use crate::walk::{evolve_from_port, WalkConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub walk: WalkConfig,
    pub noise: NoiseSpec,
    pub configurations: usize,
    pub seed: u64,
}

/// Two-injection averaged distributions of one noise configuration.
#[derive(Debug, Clone)]
pub struct ConfigurationRun {
    pub index: u64,
    pub schedule: PhaseSchedule,
    pub distributions: Vec<Distribution>,
    pub variances: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct EnsembleResult {
    /// Configuration-averaged distribution per step.
    pub averaged: Vec<Distribution>,
    /// Variance of the averaged distribution.
    pub central: VarianceSeries,
    /// Mean over configurations of the per-configuration variance.
    pub mean_of_variances: Vec<f64>,
    /// Population standard deviation of the per-configuration variance.
    pub band: Vec<f64>,
    /// `per_config[r][n]`, variance of configuration `r` at step `n`.
    pub per_config: Vec<Vec<f64>>,
}

/// Walks both injections through `schedule` and averages them per step.
pub fn pair_distributions(walk: &WalkConfig, schedule: impl AsRef<[f64]>) -> Result<Vec<Distribution>> {
    let phases = schedule.as_ref();
    let a = evolve_from_port(walk, walk.injection_a, phases)?;
    let b = evolve_from_port(walk, walk.injection_b, phases)?;
    a.states
        .iter()
        .zip(&b.states)
        .enumerate()
        .map(|(step, (sa, sb))| average_pair(&distribution(sa, step)?, &distribution(sb, step)?))
        .collect()
}

/// Configuration `index` (one-based) of the ensemble.
pub fn run_configuration(spec: &EnsembleSpec, index: u64) -> Result<ConfigurationRun> {
    let schedule = draw_schedule(&spec.noise, spec.walk.steps, spec.seed, index)?;
    let distributions = pair_distributions(&spec.walk, &schedule)?;
    let variances = distributions.iter().map(|d| mean_and_variance(d).1).collect();
    Ok(ConfigurationRun {
        index,
        schedule,
        distributions,
        variances,
    })
}

/// Folds configuration runs in slice order.
pub fn reduce(runs: &[ConfigurationRun]) -> Result<EnsembleResult> {
    let first = runs.first().ok_or(Error::NoConfigurations)?;
    let r = runs.len() as f64;
    let steps = first.distributions.len();
    let sites = first.distributions[0].len();

    let mut sums = vec![vec![0.0; sites]; steps];
    for run in runs {
        for (acc, d) in sums.iter_mut().zip(&run.distributions) {
            for (a, p) in acc.iter_mut().zip(d.probabilities()) {
                *a += p;
            }
        }
    }
    let averaged = sums
        .into_iter()
        .enumerate()
        .map(|(step, acc)| Distribution::new(acc.into_iter().map(|x| x / r).collect(), step))
        .collect::<Result<Vec<_>>>()?;

    let mut mean_of_variances = Vec::with_capacity(steps);
    let mut band = Vec::with_capacity(steps);
    for n in 0..steps {
        let mean = runs.iter().map(|run| run.variances[n]).sum::<f64>() / r;
        let var = runs
            .iter()
            .map(|run| (run.variances[n] - mean).powi(2))
            .sum::<f64>()
            / r;
        mean_of_variances.push(mean);
        band.push(var.sqrt());
    }

    Ok(EnsembleResult {
        central: VarianceSeries::from_distributions(&averaged),
        averaged,
        mean_of_variances,
        band,
        per_config: runs.iter().map(|run| run.variances.clone()).collect(),
    })
}

/// Runs configurations `1..=R` and averages them.
pub fn run_ensemble(spec: &EnsembleSpec) -> Result<EnsembleResult> {
    if spec.configurations == 0 {
        return Err(Error::NoConfigurations);
    }
    spec.walk.validate()?;
    spec.noise.validate()?;
    let runs = (1..=spec.configurations as u64)
        .into_par_iter()
        .map(|index| run_configuration(spec, index))
        .collect::<Result<Vec<_>>>()?;
    reduce(&runs)
}

/// Log-log slope of σ² against n over `lo..=hi`: about 2 for ballistic
/// spreading and 1 for diffusive spreading.
pub fn classify_scaling(series: &VarianceSeries, lo: usize, hi: usize) -> Result<f64> {
    if lo == 0 || hi <= lo {
        return Err(Error::InvalidWindow { lo, hi });
    }
    let mut xs = Vec::with_capacity(hi - lo + 1);
    let mut ys = Vec::with_capacity(hi - lo + 1);
    for step in lo..=hi {
        let value = series.at(step).ok_or(Error::InvalidWindow { lo, hi })?;
        if value <= 0.0 || !value.is_finite() {
            return Err(Error::NonPositiveVariance { step, value });
        }
        xs.push((step as f64).ln());
        ys.push(value.ln());
    }
    Ok(least_squares(&xs, &ys).0)
}
