//! Simulation of self-evolving ghost imaging.
//!
//! A single-pixel (bucket) detector reports one total intensity per
//! projected illumination pattern. Instead of reconstructing offline by
//! correlation, a genetic algorithm evolves the pattern population toward
//! the object's shape using only those bucket values, so the display
//! pattern itself becomes the image.
//!
//! The crate is `no_std`-compatible (with `alloc`); enable the `libm`
//! feature instead of `std` on bare-metal targets. File formats, CSV
//! traces and the CLI live in the companion `segi-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
mod image;
mod math;
mod measurement;

pub mod baseline;
pub mod filter;
pub mod ga;
pub mod metrics;
pub mod rng;
pub mod scene;

pub use error::{Error, Result};
pub use image::Image;
pub use measurement::{
    measure_bucket, pattern_weight, random_pattern, BucketSignal, NoiseModel, PatternMode,
    WeightOrder,
};
