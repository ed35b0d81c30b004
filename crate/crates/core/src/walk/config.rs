use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which coupler row the walk starts with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LayerParity {
    /// Step 1 couples (1,2),(3,4),…; even steps use the offset row.
    #[default]
    FullPairs,
    /// Step 1 couples (2,3),(4,5),…; even steps use the full row.
    OffsetPairs,
}

/// Arm of each coupled pair that carries the step phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PhaseArm {
    /// Lower-index mode of each pair.
    Upper,
    /// Higher-index mode of each pair.
    #[default]
    Lower,
}

pub const DEFAULT_EMBED_DIM: usize = 20;
pub const DEFAULT_EDGE_LEAK_THRESHOLD: f64 = 1e-10;

/// Geometry and conventions of a walk.
///
/// Injection ports are one-based, like the physical input ports of the
/// processor; everything else in the crate indexes modes from zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub sites: usize,
    pub steps: usize,
    pub injection_a: usize,
    pub injection_b: usize,
    pub first_layer_parity: LayerParity,
    pub phase_arm: PhaseArm,
    pub embed_dim: usize,
    pub edge_leak_threshold: f64,
    /// Set for large lattices meant to stand in for an infinite line. Edge
    /// occupancy above `edge_leak_threshold` is then logged as a warning.
    pub unbounded: bool,
}

impl WalkConfig {
    /// Confined lattice of `sites` modes with the default conventions.
    pub fn new(sites: usize, steps: usize) -> Result<Self> {
        if sites < 2 || !sites.is_multiple_of(2) {
            return Err(Error::OddSites(sites));
        }
        let config = Self {
            sites,
            steps,
            injection_a: sites / 2,
            injection_b: sites / 2 + 1,
            first_layer_parity: LayerParity::default(),
            phase_arm: PhaseArm::default(),
            embed_dim: DEFAULT_EMBED_DIM.max(sites),
            edge_leak_threshold: DEFAULT_EDGE_LEAK_THRESHOLD,
            unbounded: false,
        };
        config.validate()?;
        Ok(config)
    }

    /// Large lattice standing in for the unbounded line.
    pub fn unbounded(sites: usize, steps: usize) -> Result<Self> {
        let mut config = Self::new(sites, steps)?;
        config.unbounded = true;
        Ok(config)
    }

    pub fn with_parity(mut self, parity: LayerParity) -> Self {
        self.first_layer_parity = parity;
        self
    }

    pub fn with_phase_arm(mut self, arm: PhaseArm) -> Self {
        self.phase_arm = arm;
        self
    }

    pub fn with_injection(mut self, a: usize, b: usize) -> Result<Self> {
        self.injection_a = a;
        self.injection_b = b;
        self.validate()?;
        Ok(self)
    }

    pub fn with_embed_dim(mut self, embed_dim: usize) -> Result<Self> {
        self.embed_dim = embed_dim;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 || !self.sites.is_multiple_of(2) {
            return Err(Error::OddSites(self.sites));
        }
        for port in [self.injection_a, self.injection_b] {
            if port == 0 || port > self.sites {
                return Err(Error::InjectionOutOfRange {
                    port,
                    sites: self.sites,
                });
            }
        }
        if self.embed_dim < self.sites {
            return Err(Error::EmbedTooSmall {
                embed_dim: self.embed_dim,
                sites: self.sites,
            });
        }
        Ok(())
    }

    /// Half the number of sites.
    pub fn half(&self) -> usize {
        self.sites / 2
    }

    /// Zero-based mode indices of the two injection ports.
    pub fn injection_indices(&self) -> (usize, usize) {
        (self.injection_a - 1, self.injection_b - 1)
    }

    /// Whether step `n` uses the full row of `sites / 2` couplers.
    pub fn is_full_row(&self, step: usize) -> bool {
        let odd = step % 2 == 1;
        match self.first_layer_parity {
            LayerParity::FullPairs => odd,
            LayerParity::OffsetPairs => !odd,
        }
    }
}
