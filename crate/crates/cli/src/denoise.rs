//! External denoiser hook.
//!
//! Heavy denoisers are not reimplemented here; instead the raw image is
//! written to a graymap file, a user-supplied command is invoked with
//! `{in}` and `{out}` placeholders substituted, and the denoised file is
//! read back.

use std::path::Path;
use std::process::Command;

use anyhow::{bail, Context, Result};
use segi_core::Image;

use crate::pgm::{read_pgm, write_pgm, PgmFormat};

/// Runs `template` on `image`, leaving `denoise_in.pgm` / `denoise_out.pgm`
/// in `work_dir` as artifacts of the round trip.
pub fn run_external_denoiser(template: &str, image: &Image, work_dir: &Path) -> Result<Image> {
    if !template.contains("{in}") || !template.contains("{out}") {
        bail!("denoise command must contain both {{in}} and {{out}} placeholders");
    }
    let in_path = work_dir.join("denoise_in.pgm");
    let out_path = work_dir.join("denoise_out.pgm");
    if out_path.exists() {
        std::fs::remove_file(&out_path)?;
    }
    write_pgm(&in_path, image, PgmFormat::Binary)?;
    let command = template
        .replace("{in}", &in_path.display().to_string())
        .replace("{out}", &out_path.display().to_string());
    let status = Command::new("sh")
        .arg("-c")
        .arg(&command)
        .status()
        .with_context(|| format!("spawning denoiser `{command}`"))?;
    if !status.success() {
        bail!("denoiser `{command}` exited with {status}");
    }
    let denoised = read_pgm(&out_path).context("reading denoiser output")?;
    if denoised.dims() != image.dims() {
        bail!(
            "denoiser changed dimensions: {:?} -> {:?}",
            image.dims(),
            denoised.dims()
        );
    }
    Ok(denoised)
}
