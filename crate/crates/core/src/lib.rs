//! Conditional state engineering of optical modes by homodyne post-selection.
//!
//! An input state and a squeezed ancilla meet on a beam splitter; the
//! reflected amplitude quadrature is measured and the transmitted mode is
//! kept when the outcome falls inside `|x| < x0`.
//!
//! * [`fock`] and [`conditioner`] treat arbitrary inputs exactly in a
//!   truncated number basis.
//! * [`gaussian`] handles Gaussian inputs in closed form.
//! * [`wigner`] evaluates Wigner functions and overlaps.
//! * [`emulator`] synthesizes and analyses bench-style quadrature records.
//! * [`cli`] runs scenario files.
//!
//! Two unit systems appear; see [`conventions`].

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod conditioner;
pub mod conventions;
pub mod emulator;
mod error;
pub mod fock;
pub mod gaussian;
pub mod wigner;

pub use error::{Error, Result};
