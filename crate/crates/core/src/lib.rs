//! Simulation and numerical analysis of six-state quantum key distribution
//! under optimal single-qubit eavesdropping.
//!
//! The crate is organized around one physical story:
//!
//! * [`quantum`] — qubit states, the three conjugate bases, density
//!   matrices, and Bloch-sphere conversions;
//! * [`info`] — the closed-form information curves: Alice–Bob mutual
//!   information as a function of the disturbance, and the eavesdropper's
//!   information for her two- and one-bit optimal probes;
//! * [`attack`] — the optimal unitary probe attacks themselves, their
//!   defining constraints, and the induced isometry on the signal qubit;
//! * [`optimize`] — numerical maximization of the eavesdropper's
//!   information over all constrained probe interactions, optimization of
//!   her measurement, and intersection finding between information curves;
//! * [`protocol`] — a Monte-Carlo simulation of the prepare-and-measure
//!   protocol with and without the attack, including empirical mutual
//!   information estimates;
//! * [`bell`] — the entanglement picture: the joint Alice–Bob state under
//!   the attack, chained Bell correlation sums, and the disturbance
//!   thresholds where local realism stops constraining the statistics.

#![warn(missing_docs)]

pub mod attack;
pub mod bell;
pub mod error;
pub mod info;
mod numeric;
pub mod optimize;
pub mod protocol;
pub mod quantum;

pub use error::{Error, Result};
