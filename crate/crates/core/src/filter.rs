//! Post-processing filters: 3x3 median and separable Gaussian blur.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::math;

/// Filter applied to raw reconstructions before metric evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FilterKind {
    None,
    Median3,
    Gaussian { sigma: f64 },
}

/// Applies the selected filter, validating its parameters.
pub fn apply_filter(kind: FilterKind, image: &Image) -> Result<Image> {
    match kind {
        FilterKind::None => Ok(image.clone()),
        FilterKind::Median3 => median_filter_3x3(image),
        FilterKind::Gaussian { sigma } => {
            if !(sigma.is_finite() && sigma > 0.0) {
                return Err(Error::InvalidSigma(sigma));
            }
            Ok(gaussian_blur(image, sigma))
        }
    }
}

/// Replaces each pixel by the median of its 3x3 neighborhood.
///
/// Borders are handled by edge replication. Removes isolated wrong-valued
/// (salt-and-pepper) pixels while preserving edges.
pub fn median_filter_3x3(image: &Image) -> Result<Image> {
    let (width, height) = image.dims();
    if width < 3 || height < 3 {
        return Err(Error::ImageTooSmall {
            width,
            height,
            min: 3,
        });
    }
    Image::from_fn(width, height, |x, y| {
        let mut window = [0.0f64; 9];
        let mut i = 0;
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                let sx = clamp_index(x as i64 + dx, width);
                let sy = clamp_index(y as i64 + dy, height);
                window[i] = image.get(sx, sy);
                i += 1;
            }
        }
        window.sort_unstable_by(f64::total_cmp);
        window[4]
    })
}

/// Separable Gaussian blur with kernel radius `ceil(3 sigma)` and edge
/// replication; output clamped to `[0, 1]`.
///
/// Panics if `sigma` is not finite and positive (validated upstream by
/// [`apply_filter`]).
pub fn gaussian_blur(image: &Image, sigma: f64) -> Image {
    assert!(sigma.is_finite() && sigma > 0.0, "sigma must be > 0");
    let kernel = gaussian_kernel(sigma);
    let radius = (kernel.len() - 1) / 2;
    let (width, height) = image.dims();

    // horizontal pass
    let mut horizontal = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let mut acc = 0.0;
            for (k, weight) in kernel.iter().enumerate() {
                let sx = clamp_index(x as i64 + k as i64 - radius as i64, width);
                acc += weight * image.get(sx, y);
            }
            horizontal.push(acc);
        }
    }

    // vertical pass
    Image::from_fn(width, height, |x, y| {
        let mut acc = 0.0;
        for (k, weight) in kernel.iter().enumerate() {
            let sy = clamp_index(y as i64 + k as i64 - radius as i64, height);
            acc += weight * horizontal[sy * width + x];
        }
        acc.clamp(0.0, 1.0)
    })
    .expect("blur output stays in range")
}

/// Normalized 1-D Gaussian kernel, radius `ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = math::ceil(3.0 * sigma) as usize;
    let mut kernel = Vec::with_capacity(2 * radius + 1);
    for i in 0..=2 * radius {
        let d = i as f64 - radius as f64;
        kernel.push(math::exp(-d * d / (2.0 * sigma * sigma)));
    }
    let total: f64 = kernel.iter().sum();
    for k in &mut kernel {
        *k /= total;
    }
    kernel
}

#[inline]
fn clamp_index(i: i64, len: usize) -> usize {
    i.clamp(0, len as i64 - 1) as usize
}
