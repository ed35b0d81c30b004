use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::config::{PhaseArm, WalkConfig};
use crate::error::{Error, Result};

/// Balanced coupler, (1, 1; 1, -1) / sqrt(2).
pub const HADAMARD: [[f64; 2]; 2] = [[FRAC_1_SQRT_2, FRAC_1_SQRT_2], [FRAC_1_SQRT_2, -FRAC_1_SQRT_2]];

/// One row of 2×2 couplers. Indices are zero-based modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplerLayer {
    sites: usize,
    pairs: Vec<(usize, usize)>,
    pass_through: Vec<usize>,
}

impl CouplerLayer {
    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Coupled neighbours `(upper, upper + 1)`, in mode order.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Modes that see the identity at this step (the lattice edges on offset rows).
    pub fn pass_through(&self) -> &[usize] {
        &self.pass_through
    }

    /// Applies the couplers in place.
    pub fn apply(&self, amplitudes: &mut [Complex64]) {
        let [[h00, h01], [h10, h11]] = HADAMARD;
        for &(u, l) in &self.pairs {
            let (a, b) = (amplitudes[u], amplitudes[l]);
            amplitudes[u] = a * h00 + b * h01;
            amplitudes[l] = a * h10 + b * h11;
        }
    }

    /// Dense block matrix of the row.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::<Complex64>::identity(self.sites, self.sites);
        for &(u, l) in &self.pairs {
            m[(u, u)] = HADAMARD[0][0].into();
            m[(u, l)] = HADAMARD[0][1].into();
            m[(l, u)] = HADAMARD[1][0].into();
            m[(l, l)] = HADAMARD[1][1].into();
        }
        m
    }
}

/// Diagonal phase screen applied just before a coupler row.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseLayer {
    phases: Vec<f64>,
}

impl PhaseLayer {
    /// Per-mode phases in radians, each in [-pi, pi].
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn apply(&self, amplitudes: &mut [Complex64]) {
        for (a, &phi) in amplitudes.iter_mut().zip(&self.phases) {
            if phi != 0.0 {
                *a *= Complex64::from_polar(1.0, phi);
            }
        }
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        let diag: Vec<Complex64> = self
            .phases
            .iter()
            .map(|&phi| Complex64::from_polar(1.0, phi))
            .collect();
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag))
    }
}

fn check_step(config: &WalkConfig, step: usize) -> Result<()> {
    if step == 0 || step > config.steps {
        return Err(Error::StepOutOfRange {
            step,
            steps: config.steps,
        });
    }
    Ok(())
}

/// Coupler row used at step `step` (one-based).
///
/// Full rows pair every mode; offset rows leave the two edge modes alone so
/// that the walker is reflected back into the lattice.
pub fn build_coupler_layer(config: &WalkConfig, step: usize) -> Result<CouplerLayer> {
    check_step(config, step)?;
    let sites = config.sites;
    let (pairs, pass_through) = if config.is_full_row(step) {
        ((0..sites).step_by(2).map(|u| (u, u + 1)).collect(), Vec::new())
    } else {
        (
            (1..sites - 1).step_by(2).map(|u| (u, u + 1)).collect(),
            vec![0, sites - 1],
        )
    };
    Ok(CouplerLayer {
        sites,
        pairs,
        pass_through,
    })
}

/// Phase screen for step `step`: `phi` on one arm of every coupler of that
/// row, zero elsewhere.
///
/// A screen that is uniform over all modes would only add a global phase,
/// so the step phase always sits inside the interferometer arms.
pub fn build_phase_layer(config: &WalkConfig, step: usize, phi: f64) -> Result<PhaseLayer> {
    if !phi.is_finite() {
        return Err(Error::NonFinitePhase(phi));
    }
    let couplers = build_coupler_layer(config, step)?;
    let phi = wrap_phase(phi);
    let mut phases = vec![0.0; config.sites];
    for &(u, l) in couplers.pairs() {
        match config.phase_arm {
            PhaseArm::Upper => phases[u] = phi,
            PhaseArm::Lower => phases[l] = phi,
        }
    }
    Ok(PhaseLayer { phases })
}

/// Dense `U(n) = M_BS(n) · M_phi(n)` for step `step`.
pub fn step_unitary(config: &WalkConfig, step: usize, phi: f64) -> Result<DMatrix<Complex64>> {
    let couplers = build_coupler_layer(config, step)?;
    let phases = build_phase_layer(config, step, phi)?;
    Ok(couplers.matrix() * phases.matrix())
}

/// Maps a finite angle onto [-pi, pi]; values already there are untouched.
pub(crate) fn wrap_phase(phi: f64) -> f64 {
    if (-PI..=PI).contains(&phi) {
        return phi;
    }
    let wrapped = (phi + PI).rem_euclid(2.0 * PI) - PI;
    wrapped.clamp(-PI, PI)
}
