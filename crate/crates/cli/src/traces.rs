//! CSV serialization of evolution traces.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use segi_core::ga::GenerationRecord;

/// Normative per-generation trace schema.
pub const TRACE_HEADER: &str =
    "generation,best_cf,mean_cf,cum_measurements,psnr_raw,psnr_filtered,ssim_raw,ssim_filtered";

/// Shortest round-trip float formatting; infinities print as `inf`.
pub fn fmt_float(value: f64) -> String {
    if value == f64::INFINITY {
        "inf".into()
    } else if value == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{value}")
    }
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map(fmt_float).unwrap_or_default()
}

fn record_row(record: &GenerationRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        record.generation,
        fmt_float(record.best_cf),
        fmt_float(record.mean_cf),
        record.cumulative_measurements,
        fmt_opt(record.psnr_raw),
        fmt_opt(record.psnr_filtered),
        fmt_opt(record.ssim_raw),
        fmt_opt(record.ssim_filtered),
    )
}

/// Writes the trace rows for generations `1..=G`; an initial
/// (generation 0) record, when present, is omitted so the generation
/// column runs strictly from 1 to G.
pub fn write_trace_csv(path: &Path, records: &[GenerationRecord]) -> Result<()> {
    let mut out = String::with_capacity(records.len() * 64);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for record in records.iter().filter(|r| r.generation >= 1) {
        out.push_str(&record_row(record));
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Writes the bucket-signal sequence of a correlation-imaging run.
pub fn write_signals_csv(path: &Path, signals: &[segi_core::BucketSignal]) -> Result<()> {
    let mut out = String::from("measurement,signal\n");
    for (i, signal) in signals.iter().enumerate() {
        let _ = writeln!(out, "{},{}", i + 1, fmt_float(signal.value()));
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}
