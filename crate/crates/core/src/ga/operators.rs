//! Genetic operators: rank-biased parent selection, template crossover and
//! decaying pixel mutation.

use rand::Rng;

use crate::error::{Error, Result};
use crate::ga::{GaConfig, PopulationMember};
use crate::image::Image;
use crate::math;
use crate::measurement::PatternMode;

/// Picks two distinct parents from a ranked population.
///
/// Linear rank weighting: the member at rank `r` (1 = best) is drawn with
/// probability `(n - r + 1) / (1 + 2 + .. + n)`. The second draw repeats
/// until it differs from the first. Returns indices into the ranked slice.
pub fn select_parents(
    ranked: &[PopulationMember],
    rng: &mut impl Rng,
) -> Result<(usize, usize)> {
    let n = ranked.len();
    if n < 2 {
        return Err(Error::PopulationTooSmall(n));
    }
    let first = draw_rank_biased(n, rng);
    let mut second = draw_rank_biased(n, rng);
    while second == first {
        second = draw_rank_biased(n, rng);
    }
    Ok((first, second))
}

fn draw_rank_biased(n: usize, rng: &mut impl Rng) -> usize {
    let total = n * (n + 1) / 2;
    let mut ticket = rng.gen_range(0..total as u64);
    for index in 0..n {
        let weight = (n - index) as u64;
        if ticket < weight {
            return index;
        }
        ticket -= weight;
    }
    unreachable!("ticket always falls within the cumulative weights")
}

/// Crossover with an explicit binary template: the offspring takes `ma`'s
/// pixel where the template is 1 and `pa`'s where it is 0.
pub fn breed_with_template(ma: &Image, pa: &Image, template: &Image) -> Result<Image> {
    ma.check_same_dims(pa)?;
    ma.check_same_dims(template)?;
    Image::from_fn(ma.width(), ma.height(), |x, y| {
        if template.get(x, y) != 0.0 {
            ma.get(x, y)
        } else {
            pa.get(x, y)
        }
    })
}

/// Crossover with a fresh i.i.d. Bernoulli(0.5) template.
pub fn breed(ma: &Image, pa: &Image, rng: &mut impl Rng) -> Result<Image> {
    ma.check_same_dims(pa)?;
    Image::from_fn(ma.width(), ma.height(), |x, y| {
        if rng.gen_bool(0.5) {
            ma.get(x, y)
        } else {
            pa.get(x, y)
        }
    })
}

/// Mutation rate for the step producing generation `g` (`g >= 1`):
/// exponential decay from `mutation_initial` at g = 1 toward
/// `mutation_final`, with time constant `mutation_decay` generations.
pub fn mutation_rate(g: usize, config: &GaConfig) -> f64 {
    debug_assert!(g >= 1);
    let decay = math::exp(-((g - 1) as f64) / config.mutation_decay);
    // lerp form: exact endpoints at g = 1 and in the g -> inf limit
    config.mutation_final * (1.0 - decay) + config.mutation_initial * decay
}

/// Mutates each pixel independently with probability `rate`: binary
/// patterns flip the bit, grayscale patterns resample uniformly.
pub fn mutate(pattern: &Image, rate: f64, mode: PatternMode, rng: &mut impl Rng) -> Image {
    debug_assert!((0.0..=1.0).contains(&rate));
    Image::from_fn(pattern.width(), pattern.height(), |x, y| {
        let p = pattern.get(x, y);
        if rng.gen_bool(rate) {
            match mode {
                PatternMode::Binary { .. } => 1.0 - p,
                PatternMode::Grayscale => rng.gen::<f64>(),
            }
        } else {
            p
        }
    })
    .expect("mutation keeps pixels in range")
}
