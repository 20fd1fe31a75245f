//! Experiment runner, file formats and CLI for the segi simulator.
//!
//! The algorithmic core lives in `segi-core`; this crate adds the pieces
//! that need an operating system: graymap image files, CSV traces, the
//! flat config format, the external-denoiser hook and the experiment
//! orchestration used by the `segi` binary.

pub mod config;
pub mod denoise;
pub mod pgm;
pub mod runner;
pub mod traces;
