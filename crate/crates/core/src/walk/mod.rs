//! Brick-wall coupler meshes and walk evolution.
//!
//! Each step is a diagonal phase screen followed by a row of balanced
//! Hadamard couplers. Odd and even rows alternate between pairing every
//! mode and pairing the interior offset by one, where the two edge modes
//! pass straight through. The untouched edges are what confine the walker.

mod config;
mod evolve;
mod layer;
mod state;

pub use config::{LayerParity, PhaseArm, WalkConfig, DEFAULT_EDGE_LEAK_THRESHOLD, DEFAULT_EMBED_DIM};
pub use evolve::{
    compose_total_unitary, evolve, evolve_from_port, unitarity_defect, EdgeLeak, Evolution,
};
pub use layer::{
    build_coupler_layer, build_phase_layer, step_unitary, CouplerLayer, PhaseLayer, HADAMARD,
};
pub use state::{ModeState, NORM_TOLERANCE};
