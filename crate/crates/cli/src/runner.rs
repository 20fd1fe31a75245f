//! Experiment runners: static, dynamic, baseline and k-sweep modes, plus
//! sampling-ratio reporting.
//!
//! Every runner is deterministic for a given configuration: substream
//! seeds derive from the master seed, the replicate index and the frame
//! index, and files are written in a fixed order.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use rayon::prelude::*;
use segi_core::filter::{apply_filter, FilterKind};
use segi_core::ga::{
    evolve_frame, GaState, GenerationRecord, MetricsOptions, TraceOptions,
};
use segi_core::metrics::{psnr, ssim, SsimParams};
use segi_core::rng::{derive_seed, seeded_rng};
use segi_core::scene::{generate_frames, SceneSpec};
use segi_core::Image;

use crate::config::{ExperimentConfig, Mode};
use crate::denoise::run_external_denoiser;
use crate::pgm::{write_pgm, PgmFormat};
use crate::traces::{fmt_float, write_signals_csv, write_trace_csv};

/// Quality of the final (and final filtered) image against the object.
#[derive(Clone, Copy, Debug, Default)]
pub struct FinalMetrics {
    pub psnr_raw: Option<f64>,
    pub psnr_filtered: Option<f64>,
    pub ssim_raw: Option<f64>,
    pub ssim_filtered: Option<f64>,
}

/// What one run (or one dynamic frame) produced.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub sampling_ratio_percent: f64,
    pub total_measurements: u64,
    pub csv_path: PathBuf,
    pub snapshot_paths: Vec<PathBuf>,
    pub final_best_cf: Option<f64>,
    pub final_metrics: FinalMetrics,
}

/// Measurement budget of a run in this mode: `N + G * M` from a fresh
/// start, `G * M` for a dynamic continuation frame, the raw measurement
/// count for the correlation baseline.
pub fn mode_measurements(config: &ExperimentConfig) -> u64 {
    let ga = &config.ga;
    match config.mode {
        Mode::Static | Mode::SweepK => {
            ga.population_size as u64 + ga.generations as u64 * ga.offspring_count as u64
        }
        Mode::Dynamic => ga.generations as u64 * ga.offspring_count as u64,
        Mode::Baseline => config.baseline_measurements as u64,
    }
}

pub fn ratio_percent(measurements: u64, pixel_count: usize) -> f64 {
    measurements as f64 / pixel_count as f64 * 100.0
}

/// Sampling ratio implied by the configuration, in percent.
pub fn report_sampling_ratio(config: &ExperimentConfig) -> Result<f64> {
    let object = config.object.load()?;
    Ok(ratio_percent(mode_measurements(config), object.pixel_count()))
}

pub fn format_ratio(percent: f64) -> String {
    format!("{percent:.1}%")
}

fn psnr_db(reference: &Image, test: &Image) -> Result<f64> {
    Ok(psnr(reference, test, 1.0)?
        .decibels()
        .unwrap_or(f64::INFINITY))
}

fn ssim_value(reference: &Image, test: &Image) -> Result<Option<f64>> {
    let window = SsimParams::default().window.size();
    if reference.width() < window || reference.height() < window {
        return Ok(None);
    }
    Ok(Some(ssim(reference, test, &SsimParams::default())?))
}

/// Applies the configured processing chain (internal filter, then the
/// external denoiser) to a raw result. `None` when neither is configured.
fn process_result(
    raw: &Image,
    config: &ExperimentConfig,
    work_dir: &Path,
) -> Result<Option<Image>> {
    let mut current = match config.filter {
        FilterKind::None => None,
        kind => Some(apply_filter(kind, raw)?),
    };
    if let Some(template) = &config.denoise_cmd {
        let input = current.as_ref().unwrap_or(raw);
        current = Some(run_external_denoiser(template, input, work_dir)?);
    }
    Ok(current)
}

fn final_metrics(
    object: &Image,
    raw: &Image,
    processed: Option<&Image>,
) -> Result<FinalMetrics> {
    let mut metrics = FinalMetrics {
        psnr_raw: Some(psnr_db(object, raw)?),
        ssim_raw: ssim_value(object, raw)?,
        ..FinalMetrics::default()
    };
    if let Some(image) = processed {
        metrics.psnr_filtered = Some(psnr_db(object, image)?);
        metrics.ssim_filtered = ssim_value(object, image)?;
    }
    Ok(metrics)
}

fn metric_lines(out: &mut String, prefix: &str, best_cf: Option<f64>, metrics: &FinalMetrics) {
    if let Some(cf) = best_cf {
        let _ = writeln!(out, "{prefix}.best_cf = {}", fmt_float(cf));
    }
    for (name, value) in [
        ("psnr_raw", metrics.psnr_raw),
        ("psnr_filtered", metrics.psnr_filtered),
        ("ssim_raw", metrics.ssim_raw),
        ("ssim_filtered", metrics.ssim_filtered),
    ] {
        if let Some(v) = value {
            let _ = writeln!(out, "{prefix}.{name} = {}", fmt_float(v));
        }
    }
}

fn summary_head(config: &ExperimentConfig) -> String {
    let mut out = String::from("# segi run summary\n");
    for (key, value) in config.echo() {
        let _ = writeln!(out, "{key} = {value}");
    }
    out
}

fn write_summary(path: &Path, body: String) -> Result<()> {
    fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

/// Static run driven by an explicit replicate index (sweep cells reuse
/// this with their own index and output directory).
fn run_static_cell(
    config: &ExperimentConfig,
    out_dir: &Path,
    experiment_index: u64,
) -> Result<(RunReport, Vec<GenerationRecord>)> {
    let start = Instant::now();
    let object = config.object.load()?;
    fs::create_dir_all(out_dir)?;
    write_pgm(&out_dir.join("object.pgm"), &object, PgmFormat::Binary)?;

    let mut rng = seeded_rng(derive_seed(config.seed, experiment_index, 0));
    let options = TraceOptions {
        snapshot_every: config.snapshot_every,
        metrics: Some(MetricsOptions::new(&object, config.filter)),
    };
    let trace = segi_core::ga::evolve(&config.ga, &object, config.noise, &mut rng, &options)?;

    let csv_path = out_dir.join("trace.csv");
    write_trace_csv(&csv_path, &trace.records)?;

    let mut snapshot_paths = Vec::new();
    for snapshot in &trace.snapshots {
        let path = out_dir.join(format!("snapshot_g{:06}.pgm", snapshot.generation));
        write_pgm(&path, &snapshot.image, PgmFormat::Binary)?;
        snapshot_paths.push(path);
    }
    write_pgm(&out_dir.join("final_raw.pgm"), &trace.result, PgmFormat::Binary)?;
    let processed = process_result(&trace.result, config, out_dir)?;
    if let Some(image) = &processed {
        write_pgm(&out_dir.join("final_filtered.pgm"), image, PgmFormat::Binary)?;
    }

    let best_cf = trace.final_state.best().cf;
    let metrics = final_metrics(&object, &trace.result, processed.as_ref())?;
    let total_measurements = trace.final_state.measurements();
    let report = RunReport {
        sampling_ratio_percent: ratio_percent(total_measurements, object.pixel_count()),
        total_measurements,
        csv_path,
        snapshot_paths,
        final_best_cf: Some(best_cf),
        final_metrics: metrics,
    };

    let mut summary = summary_head(config);
    let _ = writeln!(summary, "pixels = {}", object.pixel_count());
    let _ = writeln!(summary, "total_measurements = {total_measurements}");
    let _ = writeln!(
        summary,
        "sampling_ratio = {}",
        format_ratio(report.sampling_ratio_percent)
    );
    metric_lines(&mut summary, "final", Some(best_cf), &metrics);
    let _ = writeln!(summary, "wall_seconds = {:.3}", start.elapsed().as_secs_f64());
    write_summary(&out_dir.join("summary.txt"), summary)?;

    Ok((report, trace.records))
}

pub fn run_static(config: &ExperimentConfig) -> Result<RunReport> {
    let out_dir = config.out_dir()?.to_path_buf();
    let (report, _) = run_static_cell(config, &out_dir, 0)?;
    Ok(report)
}

pub fn run_dynamic(config: &ExperimentConfig) -> Result<Vec<RunReport>> {
    let start = Instant::now();
    let out_dir = config.out_dir()?.to_path_buf();
    let frames_dir = out_dir.join("frames");
    fs::create_dir_all(&frames_dir)?;

    let base = config.object.load()?;
    let (width, height) = base.dims();
    let phases = config
        .phases
        .iter()
        .map(|p| p.resolve(width, height))
        .collect();
    let scene = SceneSpec::new(base, phases);
    let frames = generate_frames(&scene)?;
    write_pgm(&out_dir.join("object.pgm"), frames.get(0), PgmFormat::Binary)?;

    let pixel_count = width * height;
    let mut reports = Vec::with_capacity(frames.len());
    let mut aggregate = String::from(
        "frame,final_best_cf,psnr_raw,psnr_filtered,ssim_raw,ssim_filtered,frame_measurements,cum_measurements,sampling_ratio\n",
    );
    let mut ga_state: Option<GaState> = None;
    let mut measured_before = 0u64;

    for (index, frame) in frames.frames().iter().enumerate() {
        let frame_no = index + 1;
        let mut rng = seeded_rng(derive_seed(config.seed, 0, frame_no as u64));
        if let Some(existing) = ga_state.as_mut() {
            existing.warm_start(frame)?;
        } else {
            ga_state = Some(GaState::init(&config.ga, frame, config.noise, &mut rng)?);
        }
        let state = ga_state.as_mut().expect("initialized on the first frame");
        let options = TraceOptions {
            snapshot_every: config.snapshot_every,
            metrics: Some(MetricsOptions::new(frame, config.filter)),
        };
        let trace = evolve_frame(state, frame, config.noise, &config.ga, &mut rng, &options)?;

        let stem = format!("frame_{frame_no:04}");
        let csv_path = frames_dir.join(format!("{stem}.csv"));
        write_trace_csv(&csv_path, &trace.records)?;
        let mut snapshot_paths = Vec::new();
        for snapshot in &trace.snapshots {
            let path = frames_dir.join(format!("{stem}_g{:06}.pgm", snapshot.generation));
            write_pgm(&path, &snapshot.image, PgmFormat::Binary)?;
            snapshot_paths.push(path);
        }
        write_pgm(
            &frames_dir.join(format!("{stem}_raw.pgm")),
            &trace.result,
            PgmFormat::Binary,
        )?;
        let processed = process_result(&trace.result, config, &frames_dir)?;
        if let Some(image) = &processed {
            write_pgm(
                &frames_dir.join(format!("{stem}_filtered.pgm")),
                image,
                PgmFormat::Binary,
            )?;
        }

        let cumulative = state.measurements();
        let frame_measurements = cumulative - measured_before;
        measured_before = cumulative;
        let best_cf = state.best().cf;
        let metrics = final_metrics(frame, &trace.result, processed.as_ref())?;
        let ratio = ratio_percent(frame_measurements, pixel_count);

        let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
        let _ = writeln!(
            aggregate,
            "{frame_no},{},{},{},{},{},{frame_measurements},{cumulative},{}",
            fmt_float(best_cf),
            opt(metrics.psnr_raw),
            opt(metrics.psnr_filtered),
            opt(metrics.ssim_raw),
            opt(metrics.ssim_filtered),
            format_ratio(ratio),
        );
        reports.push(RunReport {
            sampling_ratio_percent: ratio,
            total_measurements: frame_measurements,
            csv_path,
            snapshot_paths,
            final_best_cf: Some(best_cf),
            final_metrics: metrics,
        });
    }

    fs::write(out_dir.join("frames.csv"), aggregate)?;

    let mut summary = summary_head(config);
    let _ = writeln!(summary, "pixels = {pixel_count}");
    let _ = writeln!(summary, "frames = {}", frames.len());
    let _ = writeln!(summary, "total_measurements = {measured_before}");
    let _ = writeln!(
        summary,
        "first_frame_sampling_ratio = {}",
        format_ratio(reports[0].sampling_ratio_percent)
    );
    if reports.len() > 1 {
        let _ = writeln!(
            summary,
            "continuation_frame_sampling_ratio = {}",
            format_ratio(reports[1].sampling_ratio_percent)
        );
    }
    let last = reports.last().unwrap();
    metric_lines(&mut summary, "final_frame", last.final_best_cf, &last.final_metrics);
    let _ = writeln!(summary, "wall_seconds = {:.3}", start.elapsed().as_secs_f64());
    write_summary(&out_dir.join("summary.txt"), summary)?;

    Ok(reports)
}

pub fn run_baseline(config: &ExperimentConfig) -> Result<RunReport> {
    let start = Instant::now();
    let out_dir = config.out_dir()?.to_path_buf();
    fs::create_dir_all(&out_dir)?;
    let object = config.object.load()?;
    write_pgm(&out_dir.join("object.pgm"), &object, PgmFormat::Binary)?;

    let mut rng = seeded_rng(derive_seed(config.seed, 0, 0));
    let (reconstruction, set) = segi_core::baseline::run_traditional_gi(
        &object,
        config.baseline_measurements,
        config.noise,
        &mut rng,
    )?;
    let csv_path = out_dir.join("signals.csv");
    write_signals_csv(&csv_path, set.signals())?;
    write_pgm(&out_dir.join("baseline.pgm"), &reconstruction, PgmFormat::Binary)?;
    let processed = process_result(&reconstruction, config, &out_dir)?;
    if let Some(image) = &processed {
        write_pgm(&out_dir.join("baseline_filtered.pgm"), image, PgmFormat::Binary)?;
    }

    let metrics = final_metrics(&object, &reconstruction, processed.as_ref())?;
    let total_measurements = set.len() as u64;
    let report = RunReport {
        sampling_ratio_percent: ratio_percent(total_measurements, object.pixel_count()),
        total_measurements,
        csv_path,
        snapshot_paths: Vec::new(),
        final_best_cf: None,
        final_metrics: metrics,
    };

    let mut summary = summary_head(config);
    let _ = writeln!(summary, "pixels = {}", object.pixel_count());
    let _ = writeln!(summary, "total_measurements = {total_measurements}");
    let _ = writeln!(
        summary,
        "sampling_ratio = {}",
        format_ratio(report.sampling_ratio_percent)
    );
    metric_lines(&mut summary, "final", None, &metrics);
    let _ = writeln!(summary, "wall_seconds = {:.3}", start.elapsed().as_secs_f64());
    write_summary(&out_dir.join("summary.txt"), summary)?;

    Ok(report)
}

/// One full static run per (k, seed replicate) cell, sharing the object.
///
/// Cells run in parallel; determinism holds because every cell derives its
/// own rng substream from `(master seed, replicate)` and owns its output
/// subdirectory, and the aggregate file is written afterwards in a fixed
/// order.
pub fn run_sweep_k(config: &ExperimentConfig) -> Result<Vec<RunReport>> {
    let start = Instant::now();
    let out_dir = config.out_dir()?.to_path_buf();
    fs::create_dir_all(&out_dir)?;

    let mut cells = Vec::new();
    for &k in &config.sweep_k {
        for replicate in 0..config.sweep_seeds {
            cells.push((k, replicate));
        }
    }

    let results: Result<Vec<_>> = cells
        .par_iter()
        .map(|&(k, replicate)| {
            let mut cell_config = config.clone();
            cell_config.ga.weight_coefficient = k;
            let cell_dir = out_dir.join(format!("k{k}_seed{replicate}"));
            let (report, records) = run_static_cell(&cell_config, &cell_dir, replicate)?;
            Ok((k, replicate, report, records))
        })
        .collect();
    let results = results?;

    let mut aggregate = String::from("k,seed,generation,best_cf,psnr_raw\n");
    let mut reports = Vec::with_capacity(results.len());
    let mut summary_metrics = String::new();
    for (k, replicate, report, records) in results {
        for record in records.iter().filter(|r| r.generation >= 1) {
            let _ = writeln!(
                aggregate,
                "{k},{replicate},{},{},{}",
                record.generation,
                fmt_float(record.best_cf),
                record.psnr_raw.map(fmt_float).unwrap_or_default(),
            );
        }
        let _ = writeln!(
            summary_metrics,
            "k{k}.seed{replicate}.psnr_raw = {}",
            report
                .final_metrics
                .psnr_raw
                .map(fmt_float)
                .unwrap_or_default()
        );
        reports.push(report);
    }
    fs::write(out_dir.join("sweep.csv"), aggregate)?;

    let mut summary = summary_head(config);
    summary.push_str(&summary_metrics);
    let _ = writeln!(summary, "wall_seconds = {:.3}", start.elapsed().as_secs_f64());
    write_summary(&out_dir.join("summary.txt"), summary)?;

    Ok(reports)
}
