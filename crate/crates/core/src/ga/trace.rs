//! Per-generation records of an evolution run.

use alloc::vec::Vec;

use crate::error::Result;
use crate::filter::{apply_filter, FilterKind};
use crate::ga::{GaConfig, GaState};
use crate::image::Image;
use crate::metrics::{psnr, ssim, Psnr, SsimParams};

/// Scalar summary of one generation.
///
/// `generation` 0 is the freshly initialized population; metric fields are
/// `None` when no ground truth was supplied (or no filter selected). An
/// infinite PSNR (identical images) is stored as `f64::INFINITY`.
#[derive(Clone, Debug, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_cf: f64,
    pub mean_cf: f64,
    pub cumulative_measurements: u64,
    pub psnr_raw: Option<f64>,
    pub psnr_filtered: Option<f64>,
    pub ssim_raw: Option<f64>,
    pub ssim_filtered: Option<f64>,
}

/// Result image captured at a snapshot generation.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub generation: usize,
    pub image: Image,
}

/// Ground truth and filter against which trace metrics are computed.
#[derive(Clone, Copy, Debug)]
pub struct MetricsOptions<'a> {
    pub ground_truth: &'a Image,
    pub filter: FilterKind,
    pub ssim_params: SsimParams,
}

impl<'a> MetricsOptions<'a> {
    pub fn new(ground_truth: &'a Image, filter: FilterKind) -> Self {
        Self {
            ground_truth,
            filter,
            ssim_params: SsimParams::default(),
        }
    }
}

/// What an evolution run records along the way.
#[derive(Clone, Copy, Debug, Default)]
pub struct TraceOptions<'a> {
    /// Capture the result image every this many generations.
    pub snapshot_every: Option<usize>,
    /// Compute PSNR/SSIM per generation against a ground truth.
    pub metrics: Option<MetricsOptions<'a>>,
}

/// Trace of one frame's worth of generations (records labeled `1..=G`).
#[derive(Clone, Debug)]
pub struct FrameTrace {
    pub records: Vec<GenerationRecord>,
    pub snapshots: Vec<Snapshot>,
    pub result: Image,
}

/// Full trace of a static run, including the initial record and the final
/// population state (reusable as a warm start).
#[derive(Clone, Debug)]
pub struct EvolutionTrace {
    pub records: Vec<GenerationRecord>,
    pub snapshots: Vec<Snapshot>,
    pub result: Image,
    pub final_state: GaState,
}

fn psnr_to_f64(value: Psnr) -> f64 {
    value.decibels().unwrap_or(f64::INFINITY)
}

pub(crate) fn make_record(
    state: &GaState,
    generation: usize,
    config: &GaConfig,
    options: &TraceOptions<'_>,
) -> Result<GenerationRecord> {
    let population = state.population();
    let best_cf = population[0].cf;
    let mean_cf = population.iter().map(|m| m.cf).sum::<f64>() / population.len() as f64;
    let mut record = GenerationRecord {
        generation,
        best_cf,
        mean_cf,
        cumulative_measurements: state.measurements(),
        psnr_raw: None,
        psnr_filtered: None,
        ssim_raw: None,
        ssim_filtered: None,
    };
    if let Some(metrics) = &options.metrics {
        let window = metrics.ssim_params.window.size();
        let (width, height) = metrics.ground_truth.dims();
        let ssim_fits = width >= window && height >= window;
        let result = state.result_image(config.result_rule);
        record.psnr_raw = Some(psnr_to_f64(psnr(metrics.ground_truth, &result, 1.0)?));
        if ssim_fits {
            record.ssim_raw = Some(ssim(metrics.ground_truth, &result, &metrics.ssim_params)?);
        }
        if metrics.filter != FilterKind::None {
            let filtered = apply_filter(metrics.filter, &result)?;
            record.psnr_filtered = Some(psnr_to_f64(psnr(metrics.ground_truth, &filtered, 1.0)?));
            if ssim_fits {
                record.ssim_filtered =
                    Some(ssim(metrics.ground_truth, &filtered, &metrics.ssim_params)?);
            }
        }
    }
    Ok(record)
}
