//! Forward model of a bucket (single-pixel) detector under structured
//! illumination, plus random pattern generation.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::math;

/// Detector noise applied to the noiseless bucket value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseModel {
    /// Ideal detector.
    None,
    /// Gaussian noise with standard deviation `sigma`, in units of the
    /// noiseless signal. The noisy value is clamped at zero.
    AdditiveGaussian { sigma: f64 },
}

/// One scalar intensity reported by the bucket detector.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct BucketSignal(f64);

impl BucketSignal {
    pub fn value(self) -> f64 {
        self.0
    }

    /// `value^k` with a fixed multiplication order (see [`crate::math`]).
    pub fn pow(self, k: u32) -> f64 {
        math::pow_u32(self.0, k)
    }
}

/// How random patterns are drawn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PatternMode {
    /// Each pixel is 1 with probability `fill`, else 0.
    Binary { fill: f64 },
    /// Each pixel is uniform on `[0, 1)`.
    Grayscale,
}

/// Exponent applied to pixels when summing a pattern's weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightOrder {
    /// `sum(p)`
    Linear,
    /// `sum(p^2)`
    Squared,
}

/// Simulates one bucket measurement: the total intensity transmitted by
/// `object` under illumination `pattern`.
///
/// The noiseless value is the pixelwise dot product. Gaussian noise, when
/// enabled, is added and the result clamped at zero (photodetectors report
/// nonnegative counts). Deterministic given the rng state; `NoiseModel::None`
/// does not consume randomness.
pub fn measure_bucket(
    pattern: &Image,
    object: &Image,
    noise: NoiseModel,
    rng: &mut impl Rng,
) -> Result<BucketSignal> {
    pattern.check_same_dims(object)?;
    let clean: f64 = pattern
        .pixels()
        .iter()
        .zip(object.pixels())
        .map(|(p, o)| p * o)
        .sum();
    let value = match noise {
        NoiseModel::None => clean,
        NoiseModel::AdditiveGaussian { sigma } => {
            if !sigma.is_finite() || sigma < 0.0 {
                return Err(Error::InvalidSigma(sigma));
            }
            let normal = Normal::new(0.0, sigma).map_err(|_| Error::InvalidSigma(sigma))?;
            (clean + normal.sample(rng)).max(0.0)
        }
    };
    Ok(BucketSignal(value))
}

/// Draws a fresh random illumination pattern.
pub fn random_pattern(
    width: usize,
    height: usize,
    mode: PatternMode,
    rng: &mut impl Rng,
) -> Result<Image> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyImage);
    }
    if let PatternMode::Binary { fill } = mode {
        if !(fill > 0.0 && fill < 1.0) {
            return Err(Error::InvalidFill(fill));
        }
    }
    let count = width * height;
    let mut pixels = alloc::vec::Vec::with_capacity(count);
    match mode {
        PatternMode::Binary { fill } => {
            for _ in 0..count {
                pixels.push(if rng.gen_bool(fill) { 1.0 } else { 0.0 });
            }
        }
        PatternMode::Grayscale => {
            for _ in 0..count {
                pixels.push(rng.gen::<f64>());
            }
        }
    }
    Image::new(width, height, pixels)
}

/// Sum of pattern pixels raised to `order`.
///
/// For binary patterns the linear and squared weights coincide.
pub fn pattern_weight(pattern: &Image, order: WeightOrder) -> f64 {
    match order {
        WeightOrder::Linear => pattern.pixels().iter().sum(),
        WeightOrder::Squared => pattern.pixels().iter().map(|p| p * p).sum(),
    }
}
