//! Downlink cognitive-radio coexistence between a multi-beam primary base
//! station (PBS) and a multi-beam secondary base station (SBS).
//!
//! The SBS senses per-beam energy, detects which PBS beams are active by
//! maximum likelihood over all beam masks, and picks the largest set of its
//! own beams that keeps the fraction of interfered primary users in every
//! active PBS sector under a cap.
//!
//! - [`channel`]: multipath components, beam patterns, transfer functions,
//!   synthetic scenarios and the MPC text format.
//! - [`radio`]: beam activity, UE association, sensing samples, PBS power
//!   calibration.
//! - [`sensing`]: energy signatures and mask detection.
//! - [`coexistence`]: SINR, the interference constraint, beam selection and
//!   the binary-access baselines.
//! - [`evaluation`]: interval pipeline, Monte Carlo, PMO/PCI/throughput.
//! - [`experiment`]: config files, sweeps and CSV reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod coexistence;
pub mod error;
pub mod evaluation;
pub mod experiment;
pub mod mask;
pub mod radio;
pub mod sensing;

pub use error::{Error, Result};
pub use mask::{BeamMask, Owner};
