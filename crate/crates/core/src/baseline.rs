//! Conventional correlation ghost imaging, used as the reference method.
//!
//! The image is recovered offline from an ensemble of random patterns and
//! their bucket signals as `R(x, y) = <S I(x, y)> - <S><I(x, y)>`.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::measurement::{measure_bucket, random_pattern, BucketSignal, NoiseModel, PatternMode};

/// Patterns paired with their measured bucket signals.
#[derive(Clone, Debug)]
pub struct MeasurementSet {
    patterns: Vec<Image>,
    signals: Vec<BucketSignal>,
}

impl MeasurementSet {
    pub fn new(patterns: Vec<Image>, signals: Vec<BucketSignal>) -> Result<Self> {
        if patterns.len() != signals.len() {
            return Err(Error::MeasurementLengthMismatch {
                patterns: patterns.len(),
                signals: signals.len(),
            });
        }
        if patterns.is_empty() {
            return Err(Error::TooFewMeasurements(0));
        }
        let dims = patterns[0].dims();
        for pattern in &patterns[1..] {
            if pattern.dims() != dims {
                return Err(Error::DimensionMismatch {
                    left: dims,
                    right: pattern.dims(),
                });
            }
        }
        Ok(Self { patterns, signals })
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn patterns(&self) -> &[Image] {
        &self.patterns
    }

    pub fn signals(&self) -> &[BucketSignal] {
        &self.signals
    }
}

/// Correlation reconstruction with both raw and display-normalized access.
///
/// Raw values are signed; [`Correlation::normalized`] rescales them to
/// `[0, 1]` by min-max for image export.
#[derive(Clone, Debug)]
pub struct Correlation {
    width: usize,
    height: usize,
    raw: Vec<f64>,
}

impl Correlation {
    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Min-max normalization to `[0, 1]`; a constant reconstruction maps
    /// to all zeros.
    pub fn normalized(&self) -> Image {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &v in &self.raw {
            min = min.min(v);
            max = max.max(v);
        }
        let span = max - min;
        let pixels = if span > 0.0 {
            self.raw.iter().map(|&v| (v - min) / span).collect()
        } else {
            vec![0.0; self.raw.len()]
        };
        Image::new(self.width, self.height, pixels).expect("normalized values lie in [0, 1]")
    }
}

/// Ensemble correlation of signals against patterns:
/// `R(x, y) = mean(S_i I_i(x, y)) - mean(S_i) mean(I_i(x, y))`.
pub fn correlate(set: &MeasurementSet) -> Result<Correlation> {
    let n = set.len();
    if n < 2 {
        return Err(Error::TooFewMeasurements(n));
    }
    let (width, height) = set.patterns()[0].dims();
    let pixel_count = width * height;
    let mut sum_signal = 0.0;
    let mut sum_pattern = vec![0.0f64; pixel_count];
    let mut sum_product = vec![0.0f64; pixel_count];
    for (pattern, signal) in set.patterns().iter().zip(set.signals()) {
        let s = signal.value();
        sum_signal += s;
        for (i, &p) in pattern.pixels().iter().enumerate() {
            sum_pattern[i] += p;
            sum_product[i] += s * p;
        }
    }
    let inv_n = 1.0 / n as f64;
    let mean_signal = sum_signal * inv_n;
    let raw = sum_product
        .iter()
        .zip(&sum_pattern)
        .map(|(&sp, &p)| sp * inv_n - mean_signal * (p * inv_n))
        .collect();
    Ok(Correlation { width, height, raw })
}

/// Runs the whole reference pipeline: random binary patterns (fill 0.5),
/// one bucket measurement each, then ensemble correlation.
pub fn run_traditional_gi(
    object: &Image,
    n_measurements: usize,
    noise: NoiseModel,
    rng: &mut impl Rng,
) -> Result<(Image, MeasurementSet)> {
    if n_measurements < 2 {
        return Err(Error::TooFewMeasurements(n_measurements));
    }
    let (width, height) = object.dims();
    let mode = PatternMode::Binary { fill: 0.5 };
    let mut patterns = Vec::with_capacity(n_measurements);
    let mut signals = Vec::with_capacity(n_measurements);
    for _ in 0..n_measurements {
        let pattern = random_pattern(width, height, mode, rng)?;
        signals.push(measure_bucket(&pattern, object, noise, rng)?);
        patterns.push(pattern);
    }
    let set = MeasurementSet::new(patterns, signals)?;
    let image = correlate(&set)?.normalized();
    Ok((image, set))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;
    use crate::scene::{make_primitive, Primitive};

    /// One-hot patterns covering every pixel once.
    fn raster_set(object: &Image) -> MeasurementSet {
        let (width, height) = object.dims();
        let mut patterns = Vec::new();
        let mut signals = Vec::new();
        let mut rng = seeded_rng(0);
        for y in 0..height {
            for x in 0..width {
                let pattern = Image::from_fn(width, height, |px, py| {
                    if (px, py) == (x, y) {
                        1.0
                    } else {
                        0.0
                    }
                })
                .unwrap();
                signals.push(
                    measure_bucket(&pattern, object, NoiseModel::None, &mut rng).unwrap(),
                );
                patterns.push(pattern);
            }
        }
        MeasurementSet::new(patterns, signals).unwrap()
    }

    #[test]
    fn raster_basis_matches_the_hand_evaluated_ensemble_average() {
        // brute-force oracle on 3x3: compute both ensemble means directly
        let object = Image::new(
            3,
            3,
            alloc::vec![1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0],
        )
        .unwrap();
        let set = raster_set(&object);
        let recon = correlate(&set).unwrap();

        let n = set.len() as f64;
        for y in 0..3usize {
            for x in 0..3usize {
                let mut mean_si = 0.0;
                let mut mean_i = 0.0;
                let mut mean_s = 0.0;
                for (pattern, signal) in set.patterns().iter().zip(set.signals()) {
                    mean_si += signal.value() * pattern.get(x, y) / n;
                    mean_i += pattern.get(x, y) / n;
                    mean_s += signal.value() / n;
                }
                let expected = mean_si - mean_s * mean_i;
                let got = recon.raw()[y * 3 + x];
                assert!((got - expected).abs() < 1e-12, "({x}, {y}): {got} vs {expected}");
            }
        }
    }

    #[test]
    fn raster_basis_recovers_a_binary_object_exactly() {
        let object = make_primitive(
            &Primitive::Disk {
                cx: 7.5,
                cy: 7.5,
                radius: 4.0,
            },
            16,
            16,
            1.0,
        )
        .unwrap();
        let set = raster_set(&object);
        let recovered = correlate(&set).unwrap().normalized();
        assert_eq!(recovered, object);
    }

    #[test]
    fn constant_signals_correlate_to_zero() {
        // same pattern repeated: every signal equals the first
        let pattern = Image::constant(4, 4, 1.0).unwrap();
        let object = Image::constant(4, 4, 0.5).unwrap();
        let mut rng = seeded_rng(1);
        let signal = measure_bucket(&pattern, &object, NoiseModel::None, &mut rng).unwrap();
        let set = MeasurementSet::new(vec![pattern.clone(); 5], vec![signal; 5]).unwrap();
        let recon = correlate(&set).unwrap();
        for &v in recon.raw() {
            assert!(v.abs() < 1e-12);
        }
        // and the normalized export collapses to zeros
        assert_eq!(recon.normalized(), Image::zeros(4, 4).unwrap());
    }

    #[test]
    fn correlation_needs_two_measurements() {
        let pattern = Image::constant(2, 2, 1.0).unwrap();
        let object = Image::constant(2, 2, 1.0).unwrap();
        let mut rng = seeded_rng(2);
        let signal = measure_bucket(&pattern, &object, NoiseModel::None, &mut rng).unwrap();
        let set = MeasurementSet::new(vec![pattern], vec![signal]).unwrap();
        assert!(matches!(
            correlate(&set),
            Err(Error::TooFewMeasurements(1))
        ));
        assert!(matches!(
            run_traditional_gi(&object, 1, NoiseModel::None, &mut rng),
            Err(Error::TooFewMeasurements(1))
        ));
    }

    #[test]
    fn set_construction_validates_shape() {
        let a = Image::zeros(2, 2).unwrap();
        let b = Image::zeros(3, 2).unwrap();
        let mut rng = seeded_rng(3);
        let s = measure_bucket(&a, &a, NoiseModel::None, &mut rng).unwrap();
        assert!(matches!(
            MeasurementSet::new(vec![a.clone(), b], vec![s, s]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            MeasurementSet::new(vec![a], vec![s, s]),
            Err(Error::MeasurementLengthMismatch { .. })
        ));
        assert!(matches!(
            MeasurementSet::new(vec![], vec![]),
            Err(Error::TooFewMeasurements(0))
        ));
    }

    fn pearson(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let mut cov = 0.0;
        let mut va = 0.0;
        let mut vb = 0.0;
        for (&x, &y) in a.iter().zip(b) {
            cov += (x - ma) * (y - mb);
            va += (x - ma) * (x - ma);
            vb += (y - mb) * (y - mb);
        }
        cov / (va.sqrt() * vb.sqrt())
    }

    #[test]
    fn oversampled_random_patterns_correlate_with_the_object() {
        // 16x16 object at 10x oversampling: correlation with the truth
        // should exceed 0.5 for nearly every seed
        let object = make_primitive(
            &Primitive::Ring {
                cx: 7.5,
                cy: 7.5,
                inner: 3.0,
                outer: 6.0,
            },
            16,
            16,
            1.0,
        )
        .unwrap();
        let mut successes = 0;
        for seed in 0..10 {
            let mut rng = seeded_rng(100 + seed);
            let (recon, _) =
                run_traditional_gi(&object, 2560, NoiseModel::None, &mut rng).unwrap();
            if pearson(recon.pixels(), object.pixels()) > 0.5 {
                successes += 1;
            }
        }
        assert!(successes >= 9, "only {successes}/10 seeds exceeded r = 0.5");
    }

    #[test]
    fn signal_sequence_has_no_trend() {
        // i.i.d. random patterns: the regression slope of S_i against i is
        // statistically indistinguishable from zero at the 5% level
        let object = make_primitive(
            &Primitive::Disk {
                cx: 7.5,
                cy: 7.5,
                radius: 4.0,
            },
            16,
            16,
            1.0,
        )
        .unwrap();
        let mut rng = seeded_rng(42);
        let (_, set) = run_traditional_gi(&object, 2560, NoiseModel::None, &mut rng).unwrap();
        let n = set.len() as f64;
        let ys: Vec<f64> = set.signals().iter().map(|s| s.value()).collect();
        let mean_x = (n - 1.0) / 2.0;
        let mean_y = ys.iter().sum::<f64>() / n;
        let mut sxx = 0.0;
        let mut sxy = 0.0;
        for (i, &y) in ys.iter().enumerate() {
            let dx = i as f64 - mean_x;
            sxx += dx * dx;
            sxy += dx * (y - mean_y);
        }
        let slope = sxy / sxx;
        let sse: f64 = ys
            .iter()
            .enumerate()
            .map(|(i, &y)| {
                let fit = mean_y + slope * (i as f64 - mean_x);
                (y - fit) * (y - fit)
            })
            .sum();
        let se = (sse / (n - 2.0) / sxx).sqrt();
        let t = slope / se;
        assert!(t.abs() < 1.96, "trend detected: t = {t}");
    }

    #[test]
    fn correlation_is_invariant_to_measurement_order() {
        let object = Image::from_fn(8, 8, |x, y| ((x + y) % 2) as f64).unwrap();
        let mut rng = seeded_rng(9);
        let (_, set) = run_traditional_gi(&object, 50, NoiseModel::None, &mut rng).unwrap();
        let forward = correlate(&set).unwrap();
        let mut patterns: Vec<Image> = set.patterns().to_vec();
        let mut signals: Vec<BucketSignal> = set.signals().to_vec();
        patterns.reverse();
        signals.reverse();
        let reversed = correlate(&MeasurementSet::new(patterns, signals).unwrap()).unwrap();
        for (a, b) in forward.raw().iter().zip(reversed.raw()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
