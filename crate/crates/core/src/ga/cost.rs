//! Cost functions ranking patterns by their bucket response, normalized by
//! the initial generation.

use crate::error::{Error, Result};
use crate::math;
use crate::measurement::{BucketSignal, WeightOrder};

/// Normalization constants computed once from the initial population.
///
/// `mean_signal_pow_k` is the mean of the initial signals raised to the
/// weight coefficient; `mean_weight` is the mean initial pattern weight
/// (linear for binary imaging, squared for grayscale). Both must be
/// strictly positive: a population whose every pattern misses the object
/// carries no gradient to evolve on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CfBaseline {
    mean_signal_pow_k: f64,
    mean_weight: f64,
    order: WeightOrder,
}

impl CfBaseline {
    /// Computes the baseline from the initial signals and pattern weights.
    pub fn from_initial(
        signals: &[BucketSignal],
        weights: &[f64],
        k: u32,
        order: WeightOrder,
    ) -> Result<Self> {
        debug_assert_eq!(signals.len(), weights.len());
        if signals.is_empty() {
            return Err(Error::DegenerateBaseline);
        }
        let n = signals.len() as f64;
        let mean_signal_pow_k = signals.iter().map(|s| s.pow(k)).sum::<f64>() / n;
        let mean_weight = weights.iter().sum::<f64>() / n;
        if mean_signal_pow_k <= 0.0 || mean_weight <= 0.0 {
            return Err(Error::DegenerateBaseline);
        }
        Ok(Self {
            mean_signal_pow_k,
            mean_weight,
            order,
        })
    }

    pub fn mean_signal_pow_k(&self) -> f64 {
        self.mean_signal_pow_k
    }

    pub fn mean_weight(&self) -> f64 {
        self.mean_weight
    }

    pub fn order(&self) -> WeightOrder {
        self.order
    }
}

/// Cost of a pattern in binary imaging:
/// `signal^k * mean_weight / (mean_signal_pow_k * weight)`.
///
/// All-dark patterns (zero weight) carry no information and are assigned
/// cost 0 so they rank last instead of dividing by zero.
pub fn cost_binary(signal: BucketSignal, weight: f64, baseline: &CfBaseline, k: u32) -> f64 {
    if weight == 0.0 {
        return 0.0;
    }
    signal.pow(k) * baseline.mean_weight / (baseline.mean_signal_pow_k * weight)
}

/// Cost of a pattern in grayscale imaging: the squared signal over the
/// squared pattern weight, normalized by the initial-generation means.
///
/// Maximizing `signal^2 / sum(pixel^2)` drives the pattern toward a scaled
/// copy of the object (Cauchy-Schwarz: the ratio peaks exactly when the
/// pattern is proportional to the object).
pub fn cost_grayscale(signal: BucketSignal, sq_weight: f64, baseline: &CfBaseline) -> f64 {
    debug_assert_eq!(baseline.order, WeightOrder::Squared);
    if sq_weight == 0.0 {
        return 0.0;
    }
    math::pow_u32(signal.value(), 2) * baseline.mean_weight
        / (baseline.mean_signal_pow_k * sq_weight)
}
