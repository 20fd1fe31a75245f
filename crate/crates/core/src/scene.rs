//! Procedural objects and dynamic frame series.
//!
//! A scene is a base image plus an ordered list of motion phases. Every
//! frame is rasterized from the base image and the accumulated pose, never
//! from the previous frame, so repeated resampling cannot erode thin
//! features and subpixel offsets accumulate without rounding drift.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::math;

/// Simple rasterized shapes used as stand-in objects.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Primitive {
    /// Axis-aligned filled rectangle; `x, y` is the top-left pixel.
    Rectangle {
        x: usize,
        y: usize,
        width: usize,
        height: usize,
    },
    /// Filled disk. `radius == 0` degenerates to the single nearest pixel.
    Disk { cx: f64, cy: f64, radius: f64 },
    /// Annulus with `inner <= distance <= outer`.
    Ring {
        cx: f64,
        cy: f64,
        inner: f64,
        outer: f64,
    },
    /// Checkerboard with square cells of `cell` pixels; the top-left cell
    /// is set.
    Checkerboard { cell: usize },
}

/// Rasterizes a primitive at intensity `value` on a dark frame.
pub fn make_primitive(shape: &Primitive, width: usize, height: usize, value: f64) -> Result<Image> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyImage);
    }
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::PixelOutOfRange { index: 0, value });
    }
    let max_x = (width - 1) as f64;
    let max_y = (height - 1) as f64;
    match *shape {
        Primitive::Rectangle {
            x,
            y,
            width: w,
            height: h,
        } => {
            if w == 0 || h == 0 || x + w > width || y + h > height {
                return Err(Error::GeometryOutOfBounds);
            }
            Image::from_fn(width, height, |px, py| {
                if px >= x && px < x + w && py >= y && py < y + h {
                    value
                } else {
                    0.0
                }
            })
        }
        Primitive::Disk { cx, cy, radius } => {
            if radius < 0.0
                || cx - radius < 0.0
                || cy - radius < 0.0
                || cx + radius > max_x
                || cy + radius > max_y
            {
                return Err(Error::GeometryOutOfBounds);
            }
            if radius == 0.0 {
                let px = math::round(cx) as usize;
                let py = math::round(cy) as usize;
                return Image::from_fn(width, height, |x, y| {
                    if x == px && y == py {
                        value
                    } else {
                        0.0
                    }
                });
            }
            Image::from_fn(width, height, |x, y| {
                let dx = x as f64 - cx;
                let dy = y as f64 - cy;
                if dx * dx + dy * dy <= radius * radius {
                    value
                } else {
                    0.0
                }
            })
        }
        Primitive::Ring {
            cx,
            cy,
            inner,
            outer,
        } => {
            if inner < 0.0
                || outer <= inner
                || cx - outer < 0.0
                || cy - outer < 0.0
                || cx + outer > max_x
                || cy + outer > max_y
            {
                return Err(Error::GeometryOutOfBounds);
            }
            Image::from_fn(width, height, |x, y| {
                let dx = x as f64 - cx;
                let dy = y as f64 - cy;
                let d2 = dx * dx + dy * dy;
                if d2 >= inner * inner && d2 <= outer * outer {
                    value
                } else {
                    0.0
                }
            })
        }
        Primitive::Checkerboard { cell } => {
            if cell == 0 {
                return Err(Error::GeometryOutOfBounds);
            }
            Image::from_fn(width, height, |x, y| {
                if (x / cell + y / cell) % 2 == 0 {
                    value
                } else {
                    0.0
                }
            })
        }
    }
}

/// Per-frame rigid motion increment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MotionTransform {
    /// Shift by `(dx, dy)` pixels per frame.
    Translate { dx: f64, dy: f64 },
    /// Rotate by `degrees` per frame about `(cx, cy)`.
    ///
    /// Positive angles rotate from the +x axis toward the +y axis, i.e.
    /// clockwise when row 0 is displayed at the top.
    Rotate { degrees: f64, cx: f64, cy: f64 },
}

/// A run of frames sharing one per-frame transform.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MotionPhase {
    pub frame_count: usize,
    pub transform: MotionTransform,
}

/// Base image plus motion phases.
#[derive(Clone, Debug)]
pub struct SceneSpec {
    pub base: Image,
    pub phases: Vec<MotionPhase>,
    /// Recorded at construction; nearest-neighbor resampling keeps every
    /// frame of a binary scene binary.
    pub binary: bool,
}

impl SceneSpec {
    pub fn new(base: Image, phases: Vec<MotionPhase>) -> Self {
        let binary = base.is_binary();
        Self {
            base,
            phases,
            binary,
        }
    }

    pub fn total_frames(&self) -> usize {
        self.phases.iter().map(|p| p.frame_count).sum()
    }
}

/// Ordered object frames produced from a scene.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameSeries {
    frames: Vec<Image>,
}

impl FrameSeries {
    pub fn frames(&self) -> &[Image] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn get(&self, index: usize) -> &Image {
        &self.frames[index]
    }
}

/// Rigid 2-D pose as an affine map `p -> M p + t` from base coordinates to
/// frame coordinates.
#[derive(Clone, Copy, Debug)]
struct Pose {
    m: [f64; 4],
    t: [f64; 2],
}

impl Pose {
    const IDENTITY: Pose = Pose {
        m: [1.0, 0.0, 0.0, 1.0],
        t: [0.0, 0.0],
    };

    /// `self` applied after `inner`.
    fn after(&self, inner: &Pose) -> Pose {
        let a = &self.m;
        let b = &inner.m;
        Pose {
            m: [
                a[0] * b[0] + a[1] * b[2],
                a[0] * b[1] + a[1] * b[3],
                a[2] * b[0] + a[3] * b[2],
                a[2] * b[1] + a[3] * b[3],
            ],
            t: [
                a[0] * inner.t[0] + a[1] * inner.t[1] + self.t[0],
                a[2] * inner.t[0] + a[3] * inner.t[1] + self.t[1],
            ],
        }
    }

    fn inverse(&self) -> Pose {
        let [a, b, c, d] = self.m;
        let det = a * d - b * c;
        let m = [d / det, -b / det, -c / det, a / det];
        Pose {
            m,
            t: [
                -(m[0] * self.t[0] + m[1] * self.t[1]),
                -(m[2] * self.t[0] + m[3] * self.t[1]),
            ],
        }
    }

    fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.m[0] * x + self.m[1] * y + self.t[0],
            self.m[2] * x + self.m[3] * y + self.t[1],
        )
    }
}

impl MotionTransform {
    fn pose(&self) -> Pose {
        match *self {
            MotionTransform::Translate { dx, dy } => Pose {
                m: [1.0, 0.0, 0.0, 1.0],
                t: [dx, dy],
            },
            MotionTransform::Rotate { degrees, cx, cy } => {
                let theta = degrees * core::f64::consts::PI / 180.0;
                let (sin, cos) = (math::sin(theta), math::cos(theta));
                // T(c) R T(-c)
                Pose {
                    m: [cos, -sin, sin, cos],
                    t: [cx - cos * cx + sin * cy, cy - sin * cx - cos * cy],
                }
            }
        }
    }
}

/// Nearest-neighbor resampling of `image` under `pose`; pixels that map
/// from outside the frame are 0.
fn rasterize(image: &Image, pose: &Pose) -> Image {
    let inverse = pose.inverse();
    let (width, height) = image.dims();
    Image::from_fn(width, height, |x, y| {
        let (sx, sy) = inverse.apply(x as f64, y as f64);
        let sx = math::round(sx);
        let sy = math::round(sy);
        if sx >= 0.0 && sy >= 0.0 && (sx as usize) < width && (sy as usize) < height {
            image.get(sx as usize, sy as usize)
        } else {
            0.0
        }
    })
    .expect("resampled pixels come from a valid image")
}

/// Applies one transform to an image (nearest neighbor, zero fill).
pub fn transform_frame(image: &Image, transform: &MotionTransform) -> Image {
    rasterize(image, &transform.pose())
}

/// Generates frames from per-frame increments: frame 1 is the base, frame
/// `t + 1` advances the accumulated pose by `increments[t - 1]`.
pub fn frames_from_transforms(base: &Image, increments: &[MotionTransform]) -> FrameSeries {
    let mut frames = Vec::with_capacity(increments.len() + 1);
    frames.push(base.clone());
    let mut pose = Pose::IDENTITY;
    for increment in increments {
        pose = increment.pose().after(&pose);
        frames.push(rasterize(base, &pose));
    }
    FrameSeries { frames }
}

/// Expands phases into one increment per frame after the first.
///
/// Frame 1 of the series is the base at rest and belongs to the first
/// phase; every later frame advances by the increment of the phase it
/// belongs to, so a scene of phases with counts `f1..fn` yields exactly
/// `f1 + .. + fn` frames.
pub fn expand_phases(phases: &[MotionPhase]) -> Vec<MotionTransform> {
    let mut increments = Vec::new();
    for (i, phase) in phases.iter().enumerate() {
        let count = if i == 0 {
            phase.frame_count.saturating_sub(1)
        } else {
            phase.frame_count
        };
        for _ in 0..count {
            increments.push(phase.transform);
        }
    }
    increments
}

/// Generates the full frame series for a scene.
pub fn generate_frames(spec: &SceneSpec) -> Result<FrameSeries> {
    if spec.phases.is_empty() || spec.phases.iter().any(|p| p.frame_count == 0) {
        return Err(Error::InvalidConfig(
            "scene needs at least one phase, each with at least one frame",
        ));
    }
    Ok(frames_from_transforms(&spec.base, &expand_phases(&spec.phases)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn small_disk() -> Image {
        make_primitive(
            &Primitive::Disk {
                cx: 8.0,
                cy: 8.0,
                radius: 3.0,
            },
            16,
            16,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn full_frame_rectangle_is_all_ones() {
        let img = make_primitive(
            &Primitive::Rectangle {
                x: 0,
                y: 0,
                width: 4,
                height: 4,
            },
            4,
            4,
            1.0,
        )
        .unwrap();
        assert_eq!(img, Image::constant(4, 4, 1.0).unwrap());
    }

    #[test]
    fn zero_radius_disk_sets_one_pixel() {
        let img = make_primitive(
            &Primitive::Disk {
                cx: 2.0,
                cy: 3.0,
                radius: 0.0,
            },
            6,
            6,
            1.0,
        )
        .unwrap();
        assert_eq!(img.sum(), 1.0);
        assert_eq!(img.get(2, 3), 1.0);
    }

    #[test]
    fn unit_checkerboard_on_2x2() {
        let img = make_primitive(&Primitive::Checkerboard { cell: 1 }, 2, 2, 0.8).unwrap();
        assert_eq!(img.pixels(), &[0.8, 0.0, 0.0, 0.8]);
    }

    #[test]
    fn out_of_bounds_geometry_is_rejected() {
        for shape in [
            Primitive::Rectangle {
                x: 3,
                y: 0,
                width: 2,
                height: 1,
            },
            Primitive::Disk {
                cx: 2.0,
                cy: 2.0,
                radius: 3.0,
            },
            Primitive::Ring {
                cx: 2.0,
                cy: 2.0,
                inner: 2.0,
                outer: 1.0,
            },
            Primitive::Checkerboard { cell: 0 },
        ] {
            assert_eq!(
                make_primitive(&shape, 4, 4, 1.0),
                Err(Error::GeometryOutOfBounds),
                "{shape:?}"
            );
        }
    }

    #[test]
    fn identity_translation_is_a_no_op() {
        let img = small_disk();
        let moved = transform_frame(&img, &MotionTransform::Translate { dx: 0.0, dy: 0.0 });
        assert_eq!(moved, img);
    }

    #[test]
    fn translation_by_full_width_clears_the_frame() {
        let img = small_disk();
        let moved = transform_frame(&img, &MotionTransform::Translate { dx: 16.0, dy: 0.0 });
        assert_eq!(moved.sum(), 0.0);
    }

    #[test]
    fn quarter_turn_about_center_is_an_index_permutation() {
        // oracle: rotating by 90 degrees about ((w-1)/2, (h-1)/2) maps
        // out(x, y) = in(y, w-1-x)
        for size in [5usize, 6] {
            let c = (size - 1) as f64 / 2.0;
            let img = Image::from_fn(size, size, |x, y| ((x * 7 + y * 13) % 10) as f64 / 10.0)
                .unwrap();
            let rotated = transform_frame(
                &img,
                &MotionTransform::Rotate {
                    degrees: 90.0,
                    cx: c,
                    cy: c,
                },
            );
            for y in 0..size {
                for x in 0..size {
                    assert_eq!(
                        rotated.get(x, y),
                        img.get(y, size - 1 - x),
                        "size {size} at ({x}, {y})"
                    );
                }
            }
        }
    }

    #[test]
    fn single_frame_scene_is_just_the_base() {
        let base = small_disk();
        let spec = SceneSpec::new(
            base.clone(),
            vec![MotionPhase {
                frame_count: 1,
                transform: MotionTransform::Translate { dx: 1.0, dy: 0.0 },
            }],
        );
        let series = generate_frames(&spec).unwrap();
        assert_eq!(series.frames(), &[base]);
    }

    #[test]
    fn opposed_translations_return_to_base() {
        let base = small_disk();
        let spec = SceneSpec::new(
            base.clone(),
            vec![
                MotionPhase {
                    frame_count: 3,
                    transform: MotionTransform::Translate { dx: 1.0, dy: 0.0 },
                },
                MotionPhase {
                    frame_count: 3,
                    transform: MotionTransform::Translate { dx: -1.0, dy: 0.0 },
                },
            ],
        );
        let series = generate_frames(&spec).unwrap();
        assert_eq!(series.len(), 6);
        // offsets by frame: 0, +1, +2, +1, 0, -1
        assert_eq!(series.get(4), &base);
        assert_ne!(series.get(3), &base);
    }

    #[test]
    fn phase_arithmetic_matches_frame_layout() {
        // three phases shaped like a translation/translation/rotation scene
        let base = small_disk();
        let spec = SceneSpec::new(
            base,
            vec![
                MotionPhase {
                    frame_count: 40,
                    transform: MotionTransform::Translate { dx: 0.1, dy: 0.0 },
                },
                MotionPhase {
                    frame_count: 28,
                    transform: MotionTransform::Translate { dx: -0.1, dy: 0.0 },
                },
                MotionPhase {
                    frame_count: 44,
                    transform: MotionTransform::Rotate {
                        degrees: 1.0,
                        cx: 7.5,
                        cy: 7.5,
                    },
                },
            ],
        );
        assert_eq!(spec.total_frames(), 112);
        let series = generate_frames(&spec).unwrap();
        assert_eq!(series.len(), 112);
        assert!(series.frames().iter().all(Image::is_binary));
    }

    #[test]
    fn phase_splits_do_not_change_frames() {
        let base = small_disk();
        let t = MotionTransform::Translate { dx: 0.4, dy: -0.3 };
        let joined = generate_frames(&SceneSpec::new(
            base.clone(),
            vec![MotionPhase {
                frame_count: 6,
                transform: t,
            }],
        ))
        .unwrap();
        let split = generate_frames(&SceneSpec::new(
            base,
            vec![
                MotionPhase {
                    frame_count: 2,
                    transform: t,
                },
                MotionPhase {
                    frame_count: 4,
                    transform: t,
                },
            ],
        ))
        .unwrap();
        assert_eq!(joined, split);
    }

    #[test]
    fn in_bounds_translation_conserves_mass() {
        let base = small_disk();
        let mass = base.sum();
        let series = generate_frames(&SceneSpec::new(
            base,
            vec![MotionPhase {
                frame_count: 8,
                transform: MotionTransform::Translate { dx: 0.5, dy: 0.25 },
            }],
        ))
        .unwrap();
        for frame in series.frames() {
            assert_eq!(frame.sum(), mass);
        }
    }

    #[test]
    fn subpixel_steps_accumulate_without_drift() {
        // 0.5 px per frame: every second frame shifts by exactly one pixel
        let base = small_disk();
        let series = generate_frames(&SceneSpec::new(
            base.clone(),
            vec![MotionPhase {
                frame_count: 5,
                transform: MotionTransform::Translate { dx: 0.5, dy: 0.0 },
            }],
        ))
        .unwrap();
        let shifted = transform_frame(&base, &MotionTransform::Translate { dx: 2.0, dy: 0.0 });
        assert_eq!(series.get(4), &shifted);
    }
}
