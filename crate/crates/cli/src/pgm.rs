//! Portable graymap (PGM) reading and writing, 8-bit, ASCII (P2) and
//! binary (P5) variants.
//!
//! Normalized pixel values are quantized to `round(v * 255)` on write and
//! mapped back as `v / maxval` on read, so binary images round-trip as
//! 0/255 exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use segi_core::Image;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PgmFormat {
    Ascii,
    Binary,
}

/// Snaps every pixel to the 8-bit grid the file format can represent.
///
/// `read_pgm(write_pgm(img))` equals `quantize(img)` exactly.
pub fn quantize(image: &Image) -> Image {
    Image::from_fn(image.width(), image.height(), |x, y| {
        (image.get(x, y) * 255.0).round() / 255.0
    })
    .expect("quantized pixels stay in range")
}

pub fn write_pgm(path: &Path, image: &Image, format: PgmFormat) -> Result<()> {
    let mut bytes = Vec::new();
    let magic = match format {
        PgmFormat::Ascii => "P2",
        PgmFormat::Binary => "P5",
    };
    write!(
        bytes,
        "{magic}\n{} {}\n255\n",
        image.width(),
        image.height()
    )?;
    match format {
        PgmFormat::Binary => {
            bytes.extend(
                image
                    .pixels()
                    .iter()
                    .map(|&v| (v * 255.0).round() as u8),
            );
        }
        PgmFormat::Ascii => {
            for y in 0..image.height() {
                let row: Vec<String> = (0..image.width())
                    .map(|x| ((image.get(x, y) * 255.0).round() as u8).to_string())
                    .collect();
                writeln!(bytes, "{}", row.join(" "))?;
            }
        }
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

pub fn read_pgm(path: &Path) -> Result<Image> {
    let data = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    parse_pgm(&data).with_context(|| format!("parsing {}", path.display()))
}

fn parse_pgm(data: &[u8]) -> Result<Image> {
    let mut scanner = Scanner { data, pos: 0 };
    let magic = scanner.token()?;
    if magic != b"P2" && magic != b"P5" {
        bail!("unsupported magic {:?}", String::from_utf8_lossy(&magic));
    }
    let width: usize = scanner.number()?;
    let height: usize = scanner.number()?;
    let maxval: usize = scanner.number()?;
    if width == 0 || height == 0 {
        bail!("zero-sized image");
    }
    if maxval == 0 || maxval > 255 {
        bail!("only 8-bit graymaps are supported (maxval {maxval})");
    }
    let count = width * height;
    // divide rather than multiply by a reciprocal so read-back values land
    // exactly on the quantization grid
    let to_unit = |v: usize| v as f64 / maxval as f64;
    let pixels: Vec<f64> = if magic == b"P5" {
        // pixel data starts after exactly one whitespace byte
        scanner.expect_single_whitespace()?;
        let raw = scanner.rest();
        if raw.len() < count {
            bail!("binary pixel data truncated: {} of {count}", raw.len());
        }
        raw[..count]
            .iter()
            .map(|&b| {
                if b as usize > maxval {
                    bail!("sample {b} exceeds maxval {maxval}");
                }
                Ok(to_unit(b as usize))
            })
            .collect::<Result<_>>()?
    } else {
        let mut pixels = Vec::with_capacity(count);
        for _ in 0..count {
            let v: usize = scanner.number()?;
            if v > maxval {
                bail!("sample {v} exceeds maxval {maxval}");
            }
            pixels.push(to_unit(v));
        }
        pixels
    };
    Ok(Image::new(width, height, pixels)?)
}

struct Scanner<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    /// Next whitespace-delimited token, skipping `#` comments.
    fn token(&mut self) -> Result<Vec<u8>> {
        loop {
            while self.pos < self.data.len() && self.data[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.data.len() && self.data[self.pos] == b'#' {
                while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        if self.pos >= self.data.len() {
            bail!("unexpected end of file in header");
        }
        let start = self.pos;
        while self.pos < self.data.len() && !self.data[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        Ok(self.data[start..self.pos].to_vec())
    }

    fn number(&mut self) -> Result<usize> {
        let token = self.token()?;
        std::str::from_utf8(&token)?
            .parse()
            .context("malformed number in header")
    }

    fn expect_single_whitespace(&mut self) -> Result<()> {
        if self.pos >= self.data.len() || !self.data[self.pos].is_ascii_whitespace() {
            bail!("missing separator before binary pixel data");
        }
        self.pos += 1;
        Ok(())
    }

    fn rest(&self) -> &'a [u8] {
        &self.data[self.pos..]
    }
}
