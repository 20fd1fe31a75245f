//! Image quality metrics: PSNR and SSIM.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::math;

/// Peak signal-to-noise ratio outcome.
///
/// Identical images have zero mean squared error; that case is reported as
/// [`Psnr::Infinite`] rather than a number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Psnr {
    Decibels(f64),
    Infinite,
}

impl Psnr {
    /// Finite value in dB, or `None` for identical images.
    pub fn decibels(self) -> Option<f64> {
        match self {
            Psnr::Decibels(db) => Some(db),
            Psnr::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Psnr::Infinite
    }
}

/// `10 log10(peak^2 / MSE)` between two images of equal dimensions.
pub fn psnr(reference: &Image, test: &Image, peak: f64) -> Result<Psnr> {
    assert!(peak > 0.0, "peak must be positive");
    reference.check_same_dims(test)?;
    let mse: f64 = reference
        .pixels()
        .iter()
        .zip(test.pixels())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / reference.pixel_count() as f64;
    if mse == 0.0 {
        Ok(Psnr::Infinite)
    } else {
        Ok(Psnr::Decibels(10.0 * math::log10(peak * peak / mse)))
    }
}

/// Local window used by SSIM.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SsimWindow {
    /// 8x8 window with uniform weights.
    Uniform8,
    /// 11x11 window with Gaussian weights, sigma 1.5 (the metric's
    /// canonical configuration).
    Gaussian11,
}

impl SsimWindow {
    pub fn size(self) -> usize {
        match self {
            SsimWindow::Uniform8 => 8,
            SsimWindow::Gaussian11 => 11,
        }
    }

    fn weights(self) -> Vec<f64> {
        match self {
            SsimWindow::Uniform8 => alloc::vec![1.0 / 8.0; 8],
            SsimWindow::Gaussian11 => {
                let sigma = 1.5;
                let mut w = Vec::with_capacity(11);
                for i in 0..11 {
                    let d = i as f64 - 5.0;
                    w.push(math::exp(-d * d / (2.0 * sigma * sigma)));
                }
                let total: f64 = w.iter().sum();
                for v in &mut w {
                    *v /= total;
                }
                w
            }
        }
    }
}

/// SSIM constants and window selection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SsimParams {
    pub window: SsimWindow,
    pub k1: f64,
    pub k2: f64,
    pub dynamic_range: f64,
}

impl Default for SsimParams {
    fn default() -> Self {
        Self {
            window: SsimWindow::Gaussian11,
            k1: 0.01,
            k2: 0.03,
            dynamic_range: 1.0,
        }
    }
}

/// Mean of local SSIM over all fully interior windows.
///
/// Windowed means, variances and the covariance use the window weights;
/// the usual stabilizing constants are `C1 = (k1 L)^2`, `C2 = (k2 L)^2`.
pub fn ssim(reference: &Image, test: &Image, params: &SsimParams) -> Result<f64> {
    reference.check_same_dims(test)?;
    let (width, height) = reference.dims();
    let size = params.window.size();
    if width < size || height < size {
        return Err(Error::ImageTooSmall {
            width,
            height,
            min: size,
        });
    }
    let weights = params.window.weights();
    let c1 = (params.k1 * params.dynamic_range) * (params.k1 * params.dynamic_range);
    let c2 = (params.k2 * params.dynamic_range) * (params.k2 * params.dynamic_range);

    // The window weights are separable, so each of the five field maps is
    // filtered with a horizontal then a vertical pass.
    let fields: [&dyn Fn(f64, f64) -> f64; 5] = [
        &|a, _| a,
        &|_, b| b,
        &|a, _| a * a,
        &|_, b| b * b,
        &|a, b| a * b,
    ];
    let out_w = width - size + 1;
    let out_h = height - size + 1;
    let mut filtered: Vec<Vec<f64>> = Vec::with_capacity(5);
    for field in fields {
        let mut horizontal = Vec::with_capacity(out_w * height);
        for y in 0..height {
            for x in 0..out_w {
                let mut acc = 0.0;
                for (k, w) in weights.iter().enumerate() {
                    let a = reference.get(x + k, y);
                    let b = test.get(x + k, y);
                    acc += w * field(a, b);
                }
                horizontal.push(acc);
            }
        }
        let mut full = Vec::with_capacity(out_w * out_h);
        for y in 0..out_h {
            for x in 0..out_w {
                let mut acc = 0.0;
                for (k, w) in weights.iter().enumerate() {
                    acc += w * horizontal[(y + k) * out_w + x];
                }
                full.push(acc);
            }
        }
        filtered.push(full);
    }

    let mut total = 0.0;
    for i in 0..out_w * out_h {
        let mu_x = filtered[0][i];
        let mu_y = filtered[1][i];
        let var_x = filtered[2][i] - mu_x * mu_x;
        let var_y = filtered[3][i] - mu_y * mu_y;
        let cov = filtered[4][i] - mu_x * mu_y;
        let local = ((2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2))
            / ((mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2));
        total += local;
    }
    Ok(total / (out_w * out_h) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{random_pattern, PatternMode};
    use crate::rng::seeded_rng;

    #[test]
    fn psnr_of_fully_differing_binary_images_is_zero() {
        let a = Image::zeros(8, 8).unwrap();
        let b = Image::constant(8, 8, 1.0).unwrap();
        let p = psnr(&a, &b, 1.0).unwrap();
        assert_eq!(p, Psnr::Decibels(0.0));
    }

    #[test]
    fn psnr_of_half_differing_binary_images() {
        let a = Image::zeros(8, 8).unwrap();
        let b = Image::from_fn(8, 8, |x, _| if x < 4 { 1.0 } else { 0.0 }).unwrap();
        let p = psnr(&a, &b, 1.0).unwrap().decibels().unwrap();
        assert!((p - 3.0103).abs() < 1e-6, "psnr {p}");
    }

    #[test]
    fn identical_images_have_infinite_psnr() {
        let a = Image::constant(4, 4, 0.25).unwrap();
        assert!(psnr(&a, &a, 1.0).unwrap().is_infinite());
    }

    #[test]
    fn psnr_is_symmetric() {
        let mut rng = seeded_rng(5);
        let a = random_pattern(8, 8, PatternMode::Grayscale, &mut rng).unwrap();
        let b = random_pattern(8, 8, PatternMode::Grayscale, &mut rng).unwrap();
        assert_eq!(psnr(&a, &b, 1.0).unwrap(), psnr(&b, &a, 1.0).unwrap());
    }

    #[test]
    fn ssim_of_identical_images_is_one() {
        let mut rng = seeded_rng(9);
        let a = random_pattern(16, 16, PatternMode::Grayscale, &mut rng).unwrap();
        let params = SsimParams::default();
        let s = ssim(&a, &a, &params).unwrap();
        assert!((s - 1.0).abs() < 1e-12, "ssim {s}");
    }

    #[test]
    fn ssim_of_constant_images_is_one() {
        let a = Image::constant(16, 16, 0.5).unwrap();
        let s = ssim(&a, &a, &SsimParams::default()).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ssim_rejects_undersized_images() {
        let a = Image::zeros(8, 8).unwrap();
        assert!(matches!(
            ssim(&a, &a, &SsimParams::default()),
            Err(Error::ImageTooSmall { .. })
        ));
        // the 8x8 uniform window fits exactly
        let params = SsimParams {
            window: SsimWindow::Uniform8,
            ..SsimParams::default()
        };
        assert!((ssim(&a, &a, &params).unwrap() - 1.0).abs() < 1e-12);
    }

    // independent oracle: direct per-window evaluation of the definition
    fn ssim_direct(reference: &Image, test: &Image, params: &SsimParams) -> f64 {
        let size = params.window.size();
        let w1 = params.window.weights();
        let c1 = (params.k1 * params.dynamic_range).powi(2);
        let c2 = (params.k2 * params.dynamic_range).powi(2);
        let (width, height) = reference.dims();
        let mut total = 0.0;
        let mut count = 0usize;
        for wy in 0..=height - size {
            for wx in 0..=width - size {
                let (mut mx, mut my, mut mxx, mut myy, mut mxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
                for dy in 0..size {
                    for dx in 0..size {
                        let w = w1[dx] * w1[dy];
                        let a = reference.get(wx + dx, wy + dy);
                        let b = test.get(wx + dx, wy + dy);
                        mx += w * a;
                        my += w * b;
                        mxx += w * a * a;
                        myy += w * b * b;
                        mxy += w * a * b;
                    }
                }
                let (vx, vy, cov) = (mxx - mx * mx, myy - my * my, mxy - mx * my);
                total += ((2.0 * mx * my + c1) * (2.0 * cov + c2))
                    / ((mx * mx + my * my + c1) * (vx + vy + c2));
                count += 1;
            }
        }
        total / count as f64
    }

    #[test]
    fn ssim_matches_direct_definition() {
        let mut rng = seeded_rng(17);
        for window in [SsimWindow::Gaussian11, SsimWindow::Uniform8] {
            let params = SsimParams {
                window,
                ..SsimParams::default()
            };
            let a = random_pattern(20, 14, PatternMode::Grayscale, &mut rng).unwrap();
            let b = random_pattern(20, 14, PatternMode::Grayscale, &mut rng).unwrap();
            let fast = ssim(&a, &b, &params).unwrap();
            let direct = ssim_direct(&a, &b, &params);
            assert!((fast - direct).abs() < 1e-12, "{fast} vs {direct}");
        }
    }

    #[test]
    fn ssim_against_binary_negative_is_small() {
        let mut rng = seeded_rng(23);
        let a = random_pattern(32, 32, PatternMode::Binary { fill: 0.5 }, &mut rng).unwrap();
        let b = Image::from_fn(32, 32, |x, y| 1.0 - a.get(x, y)).unwrap();
        let params = SsimParams::default();
        let s = ssim(&a, &b, &params).unwrap();
        let direct = ssim_direct(&a, &b, &params);
        assert!((s - direct).abs() < 1e-12);
        assert!(s < 0.05, "ssim of negative {s}");
    }

    #[test]
    fn ssim_is_symmetric() {
        let mut rng = seeded_rng(31);
        let a = random_pattern(16, 16, PatternMode::Grayscale, &mut rng).unwrap();
        let b = random_pattern(16, 16, PatternMode::Grayscale, &mut rng).unwrap();
        let params = SsimParams::default();
        assert_eq!(
            ssim(&a, &b, &params).unwrap(),
            ssim(&b, &a, &params).unwrap()
        );
    }
}
