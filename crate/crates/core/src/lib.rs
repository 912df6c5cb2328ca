//! Quantum feature maps on a truncated continuous-variable simulator.
//!
//! Inputs are encoded as products of single-mode squeezed vacua whose phase
//! carries the feature value. The crate evaluates the resulting kernels in
//! closed form and by explicit Fock-space simulation, trains kernel SVMs and
//! Fock-space perceptrons on them, trains variational gate circuits that
//! classify directly in Fock space, and checks linear independence and
//! separability of the embedded data numerically.

pub mod cli;
pub mod data;
pub mod error;
pub mod fock;
pub mod gates;
pub mod kernels;
pub mod perceptron;
pub mod rng;
pub mod separability;
pub mod svm;
pub mod variational;

pub use error::{Error, Result};
