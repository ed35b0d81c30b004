use nalgebra::DMatrix;
use num_complex::Complex64;

use super::config::WalkConfig;
use super::layer::{build_coupler_layer, build_phase_layer, step_unitary};
use super::state::{ModeState, NORM_TOLERANCE};
use crate::error::{Error, Result};

/// First step at which an edge mode held more than the leak threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeLeak {
    pub step: usize,
    pub probability: f64,
}

/// States of one walk for steps `0..=N`.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub states: Vec<ModeState>,
    pub edge_leak: Option<EdgeLeak>,
}

impl Evolution {
    pub fn last(&self) -> &ModeState {
        self.states.last().expect("evolution always holds the initial state")
    }
}

fn check_inputs(config: &WalkConfig, initial: &ModeState, phases: &[f64]) -> Result<()> {
    config.validate()?;
    if initial.len() != config.sites {
        return Err(Error::DimensionMismatch {
            expected: config.sites,
            got: initial.len(),
        });
    }
    let norm = initial.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized(norm));
    }
    if phases.len() < config.steps {
        return Err(Error::ScheduleTooShort {
            len: phases.len(),
            steps: config.steps,
        });
    }
    Ok(())
}

/// Runs the walk: the state at step `n` is `U(n)…U(1)·initial`.
///
/// Each step applies the phase screen and then the coupler row directly on
/// the amplitude vector, O(sites) per step.
pub fn evolve(
    config: &WalkConfig,
    initial: &ModeState,
    schedule: impl AsRef<[f64]>,
) -> Result<Evolution> {
    let phases = schedule.as_ref();
    check_inputs(config, initial, phases)?;

    let edge = |state: &ModeState| {
        let p = state.amplitudes();
        p[0].norm_sqr().max(p[p.len() - 1].norm_sqr())
    };

    let mut states = Vec::with_capacity(config.steps + 1);
    let mut edge_leak = None;
    let mut current = initial.clone();
    states.push(current.clone());

    for (index, &phi) in phases.iter().take(config.steps).enumerate() {
        let step = index + 1;
        let phase_layer = build_phase_layer(config, step, phi)?;
        let couplers = build_coupler_layer(config, step)?;
        phase_layer.apply(current.amplitudes_mut());
        couplers.apply(current.amplitudes_mut());

        let edge_p = edge(&current);
        if edge_leak.is_none() && edge_p > config.edge_leak_threshold {
            edge_leak = Some(EdgeLeak {
                step,
                probability: edge_p,
            });
            if config.unbounded {
                log::warn!(
                    "edge modes reached probability {edge_p:.3e} at step {step}; \
                     the {}-site lattice no longer behaves as unbounded",
                    config.sites
                );
            }
        }
        states.push(current.clone());
    }

    Ok(Evolution { states, edge_leak })
}

/// Evolves a unit excitation injected at the one-based port.
pub fn evolve_from_port(
    config: &WalkConfig,
    port: usize,
    schedule: impl AsRef<[f64]>,
) -> Result<Evolution> {
    if port == 0 || port > config.sites {
        return Err(Error::InjectionOutOfRange {
            port,
            sites: config.sites,
        });
    }
    let initial = ModeState::basis(config.sites, port - 1)?;
    evolve(config, &initial, schedule)
}

/// `U(N)…U(1)` embedded in the top-left corner of a `embed_dim`-square
/// identity, the matrix a programmable interferometer would be given.
pub fn compose_total_unitary(
    config: &WalkConfig,
    schedule: impl AsRef<[f64]>,
) -> Result<DMatrix<Complex64>> {
    config.validate()?;
    let phases = schedule.as_ref();
    if phases.len() < config.steps {
        return Err(Error::ScheduleTooShort {
            len: phases.len(),
            steps: config.steps,
        });
    }
    let mut walk = DMatrix::<Complex64>::identity(config.sites, config.sites);
    for (index, &phi) in phases.iter().take(config.steps).enumerate() {
        walk = step_unitary(config, index + 1, phi)? * walk;
    }
    let mut total = DMatrix::<Complex64>::identity(config.embed_dim, config.embed_dim);
    total
        .view_mut((0, 0), (config.sites, config.sites))
        .copy_from(&walk);
    Ok(total)
}

/// Largest entry of `|U†U − I|`.
pub fn unitarity_defect(u: &DMatrix<Complex64>) -> f64 {
    let n = u.nrows();
    let product = u.adjoint() * u;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..u.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((product[(i, j)] - target).norm());
        }
    }
    worst
}
