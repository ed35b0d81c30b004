use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on the squared norm of a state handed to [`evolve`](super::evolve).
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Walker amplitudes over the lattice modes.
///
/// Within each coupled pair the upper mode holds the left-moving amplitude
/// and the lower mode the right-moving one. Measurement reads each mode as
/// one position.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeState {
    amplitudes: Vec<Complex64>,
}

impl ModeState {
    /// Unit amplitude on the zero-based mode `index`.
    pub fn basis(sites: usize, index: usize) -> Result<Self> {
        if index >= sites {
            return Err(Error::InjectionOutOfRange {
                port: index + 1,
                sites,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); sites];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    /// Wraps amplitudes that must already be normalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let state = Self { amplitudes };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    #[cfg(test)]
    pub(crate) fn from_raw(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}
