//! Truncated number-basis engine.
//!
//! States live on `|0⟩ … |dim−1⟩`. Every preparer records the population that
//! falls outside the retained basis as its *tail mass* and refuses to build a
//! state whose tail exceeds [`TAIL_MASS_LIMIT`](crate::conventions::TAIL_MASS_LIMIT).

mod beam_splitter;
mod density;
mod operators;
mod quadrature;
mod states;
mod vector;

pub use beam_splitter::{beam_splitter, BeamSplitter, TwoModeDensity};
pub use density::FockDensity;
pub use operators::{
    annihilation, apply_displace, apply_squeeze, displacement_operator, squeeze_operator,
};
pub use quadrature::{quadrature_wavefunction, quadrature_wavefunctions};
pub use states::{coherent_state, fock_state, scs_state, squeezed_vacuum};
pub use vector::{FockVector, Parity};
