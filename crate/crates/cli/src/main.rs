use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use segi_cli::config::{parse_filter, ExperimentConfig, Mode, Overrides};
use segi_cli::runner::{self, format_ratio, RunReport};
use segi_cli::traces::fmt_float;

/// Ghost-imaging simulator: evolves illumination patterns toward an
/// object's image from single-pixel detector feedback.
#[derive(Parser)]
#[command(name = "segi", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment configuration file (flat `key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Master seed, overriding the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, overriding the config file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Capture a result snapshot every this many generations.
    #[arg(long)]
    snapshot_every: Option<usize>,
    /// Post-filter: none, median or gaussian:<sigma>.
    #[arg(long)]
    filter: Option<String>,
    /// External denoiser command with {in} and {out} placeholders.
    #[arg(long)]
    denoise_cmd: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a static object and report image quality.
    Static(CommonArgs),
    /// Track a moving scene frame by frame with warm-started populations.
    Dynamic(CommonArgs),
    /// Conventional correlation ghost imaging on the same object.
    Baseline(CommonArgs),
    /// One static run per weight coefficient per seed replicate.
    SweepK(CommonArgs),
    /// Print the sampling ratio implied by the configuration.
    Ratio(CommonArgs),
}

fn load(args: &CommonArgs, expected_mode: Option<Mode>) -> Result<ExperimentConfig> {
    let overrides = Overrides {
        seed: args.seed,
        out: args.out.clone(),
        snapshot_every: args.snapshot_every,
        filter: args.filter.as_deref().map(parse_filter).transpose()?,
        denoise_cmd: args.denoise_cmd.clone(),
    };
    let config = ExperimentConfig::from_file(&args.config, &overrides)?;
    if let Some(mode) = expected_mode {
        if config.mode != mode {
            bail!(
                "config mode is `{}` but the `{}` subcommand was invoked",
                config.mode.as_str(),
                mode.as_str()
            );
        }
    }
    Ok(config)
}

fn print_report(label: &str, report: &RunReport) {
    println!(
        "{label}: {} measurements, sampling ratio {}",
        report.total_measurements,
        format_ratio(report.sampling_ratio_percent)
    );
    if let Some(cf) = report.final_best_cf {
        println!("{label}: best cf {}", fmt_float(cf));
    }
    let metrics = &report.final_metrics;
    for (name, value) in [
        ("psnr_raw", metrics.psnr_raw),
        ("psnr_filtered", metrics.psnr_filtered),
        ("ssim_raw", metrics.ssim_raw),
        ("ssim_filtered", metrics.ssim_filtered),
    ] {
        if let Some(v) = value {
            println!("{label}: {name} {}", fmt_float(v));
        }
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Static(args) => {
            let config = load(&args, Some(Mode::Static))?;
            let report = runner::run_static(&config)?;
            print_report("static", &report);
            println!("outputs in {}", config.out_dir()?.display());
        }
        Command::Dynamic(args) => {
            let config = load(&args, Some(Mode::Dynamic))?;
            let reports = runner::run_dynamic(&config)?;
            println!("dynamic: {} frames", reports.len());
            print_report("first frame", &reports[0]);
            print_report("final frame", reports.last().unwrap());
            println!("outputs in {}", config.out_dir()?.display());
        }
        Command::Baseline(args) => {
            let config = load(&args, Some(Mode::Baseline))?;
            let report = runner::run_baseline(&config)?;
            print_report("baseline", &report);
            println!("outputs in {}", config.out_dir()?.display());
        }
        Command::SweepK(args) => {
            let config = load(&args, Some(Mode::SweepK))?;
            let reports = runner::run_sweep_k(&config)?;
            println!(
                "sweep-k: {} runs ({} k values x {} seeds)",
                reports.len(),
                config.sweep_k.len(),
                config.sweep_seeds
            );
            println!("outputs in {}", config.out_dir()?.display());
        }
        Command::Ratio(args) => {
            let config = load(&args, None)?;
            let percent = runner::report_sampling_ratio(&config)?;
            println!("sampling ratio: {}", format_ratio(percent));
        }
    }
    Ok(())
}
