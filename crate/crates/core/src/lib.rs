//! Discrete-time quantum walks on brick-wall meshes of 2×2 couplers.
//!
//! A walk on `2M` modes alternates full and offset coupler rows, with a
//! per-step phase inside each interferometer. The crate covers the mesh
//! itself ([`walk`]), seeded phase disorder ([`noise`]), the statistics
//! read off output distributions ([`observables`]), Monte Carlo averaging
//! ([`ensemble`]) and the file formats used by the command line ([`io`]).
//!
//! ```
//! use qwalk::{evolve_from_port, PhaseSchedule, WalkConfig};
//!
//! let config = WalkConfig::new(8, 1).unwrap();
//! let run = evolve_from_port(&config, 4, PhaseSchedule::zeros(1)).unwrap();
//! let p = run.last().probabilities();
//! assert!((p[2] - 0.5).abs() < 1e-12 && (p[3] - 0.5).abs() < 1e-12);
//! ```

pub mod ensemble;
mod error;
pub mod io;
pub mod noise;
pub mod observables;
pub mod walk;

pub use num_complex::Complex64 as c64;

pub use ensemble::{classify_scaling, run_ensemble, EnsembleResult, EnsembleSpec};
pub use error::{Error, Result};
pub use noise::{
    draw_schedule, load_fixture_schedule, Fixture, NoiseKind, NoisePreset, NoiseSpec, PhaseSchedule,
};
pub use observables::{
    average_pair, distribution, find_peaks, fit_peaks_linear, mean_and_variance, tvd, Distribution,
    LinearFit, PeakFit, VarianceSeries,
};
pub use walk::{
    build_coupler_layer, build_phase_layer, compose_total_unitary, evolve, evolve_from_port,
    step_unitary, unitarity_defect, CouplerLayer, LayerParity, ModeState, PhaseArm, PhaseLayer,
    WalkConfig,
};
