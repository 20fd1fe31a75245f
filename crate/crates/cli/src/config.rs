//! Experiment configuration: a flat key-value file with dotted sections.
//!
//! Syntax: one `key = value` per line; blank lines and lines starting with
//! `#` are ignored. Keys are dotted paths (`ga.population`,
//! `scene.phase.1.kind`). Unknown keys are errors so typos cannot silently
//! change an experiment.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use segi_core::filter::FilterKind;
use segi_core::ga::{GaConfig, ImagingMode, ResultRule};
use segi_core::scene::{MotionPhase, MotionTransform, Primitive};
use segi_core::{Image, NoiseModel};

use crate::pgm::read_pgm;

/// Experiment kind; must match the CLI subcommand when both are given.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Static,
    Dynamic,
    Baseline,
    SweepK,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Static => "static",
            Mode::Dynamic => "dynamic",
            Mode::Baseline => "baseline",
            Mode::SweepK => "sweep-k",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "static" => Mode::Static,
            "dynamic" => Mode::Dynamic,
            "baseline" => Mode::Baseline,
            "sweep-k" => Mode::SweepK,
            other => bail!("unknown mode `{other}`"),
        })
    }
}

/// Where the object image comes from.
#[derive(Clone, Debug)]
pub enum ObjectSpec {
    Primitive {
        shape: Primitive,
        width: usize,
        height: usize,
        value: f64,
    },
    File {
        path: PathBuf,
        /// Optional binarization threshold: pixels strictly above it
        /// become 1, the rest 0.
        threshold: Option<f64>,
    },
}

impl ObjectSpec {
    pub fn load(&self) -> Result<Image> {
        match self {
            ObjectSpec::Primitive {
                shape,
                width,
                height,
                value,
            } => Ok(segi_core::scene::make_primitive(shape, *width, *height, *value)?),
            ObjectSpec::File { path, threshold } => {
                let img = read_pgm(path)?;
                match threshold {
                    None => Ok(img),
                    Some(t) => Ok(Image::from_fn(img.width(), img.height(), |x, y| {
                        if img.get(x, y) > *t {
                            1.0
                        } else {
                            0.0
                        }
                    })?),
                }
            }
        }
    }
}

/// One scene phase before the rotation center default is resolved.
#[derive(Clone, Copy, Debug)]
pub enum PhaseSpec {
    Translate { frames: usize, dx: f64, dy: f64 },
    Rotate {
        frames: usize,
        degrees: f64,
        cx: Option<f64>,
        cy: Option<f64>,
    },
}

impl PhaseSpec {
    /// Resolves the default rotation center (the image center) once the
    /// object dimensions are known.
    pub fn resolve(&self, width: usize, height: usize) -> MotionPhase {
        match *self {
            PhaseSpec::Translate { frames, dx, dy } => MotionPhase {
                frame_count: frames,
                transform: MotionTransform::Translate { dx, dy },
            },
            PhaseSpec::Rotate {
                frames,
                degrees,
                cx,
                cy,
            } => MotionPhase {
                frame_count: frames,
                transform: MotionTransform::Rotate {
                    degrees,
                    cx: cx.unwrap_or((width - 1) as f64 / 2.0),
                    cy: cy.unwrap_or((height - 1) as f64 / 2.0),
                },
            },
        }
    }
}

/// A fully resolved experiment.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub object: ObjectSpec,
    pub ga: GaConfig,
    pub noise: NoiseModel,
    pub phases: Vec<PhaseSpec>,
    pub filter: FilterKind,
    pub denoise_cmd: Option<String>,
    pub snapshot_every: Option<usize>,
    pub sweep_k: Vec<u32>,
    pub sweep_seeds: u64,
    pub baseline_measurements: usize,
}

/// Optional command-line overrides applied on top of the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub snapshot_every: Option<usize>,
    pub filter: Option<FilterKind>,
    pub denoise_cmd: Option<String>,
}

pub fn parse_filter(s: &str) -> Result<FilterKind> {
    if s == "none" {
        return Ok(FilterKind::None);
    }
    if s == "median" {
        return Ok(FilterKind::Median3);
    }
    if let Some(sigma) = s.strip_prefix("gaussian:") {
        let sigma: f64 = sigma.parse().context("gaussian filter sigma")?;
        if !(sigma.is_finite() && sigma > 0.0) {
            bail!("gaussian filter sigma must be positive");
        }
        return Ok(FilterKind::Gaussian { sigma });
    }
    bail!("unknown filter `{s}` (expected none, median or gaussian:<sigma>)")
}

pub fn filter_to_string(filter: FilterKind) -> String {
    match filter {
        FilterKind::None => "none".into(),
        FilterKind::Median3 => "median".into(),
        FilterKind::Gaussian { sigma } => format!("gaussian:{sigma}"),
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path, overrides: &Overrides) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_str(&text, overrides)
            .with_context(|| format!("in config {}", path.display()))
    }

    pub fn from_str(text: &str, overrides: &Overrides) -> Result<Self> {
        let mut doc = Document::parse(text)?;

        let mode = Mode::parse(&doc.require("mode")?)?;
        let seed = match overrides.seed {
            Some(seed) => {
                doc.consume("seed");
                seed
            }
            None => doc
                .take("seed")?
                .ok_or_else(|| anyhow!("`seed` is required (set it in the config or pass --seed); there is no wall-clock seeding"))?,
        };
        let out = match &overrides.out {
            Some(path) => {
                doc.consume("out");
                Some(path.clone())
            }
            None => doc.take_string("out").map(PathBuf::from),
        };
        let snapshot_every = match overrides.snapshot_every {
            Some(v) => {
                doc.consume("snapshot.every");
                Some(v)
            }
            None => doc.take("snapshot.every")?,
        };
        let filter = match overrides.filter {
            Some(f) => {
                doc.consume("filter");
                f
            }
            None => match doc.take_string("filter") {
                Some(s) => parse_filter(&s)?,
                None => FilterKind::None,
            },
        };
        let denoise_cmd = match &overrides.denoise_cmd {
            Some(cmd) => {
                doc.consume("denoise.cmd");
                Some(cmd.clone())
            }
            None => doc.take_string("denoise.cmd"),
        };

        let object = parse_object(&mut doc)?;
        let ga = parse_ga(&mut doc, mode)?;
        let noise = parse_noise(&mut doc)?;
        let phases = parse_phases(&mut doc)?;
        if mode == Mode::Dynamic && phases.is_empty() {
            bail!("dynamic mode needs at least one scene.phase");
        }

        let sweep_k = match doc.take_string("sweep.k") {
            None => vec![1, 2, 3, 4],
            Some(list) => list
                .split(',')
                .map(|tok| tok.trim().parse::<u32>().context("sweep.k entry"))
                .collect::<Result<Vec<_>>>()?,
        };
        if sweep_k.is_empty() || sweep_k.contains(&0) {
            bail!("sweep.k must be a non-empty list of positive integers");
        }
        let sweep_seeds = doc.take("sweep.seeds")?.unwrap_or(1u64);
        if sweep_seeds == 0 {
            bail!("sweep.seeds must be at least 1");
        }
        let baseline_measurements = doc.take("baseline.measurements")?.unwrap_or(0usize);
        if mode == Mode::Baseline && baseline_measurements < 2 {
            bail!("baseline mode needs baseline.measurements >= 2");
        }

        doc.finish()?;
        ga.validate()?;

        Ok(Self {
            mode,
            seed,
            out,
            object,
            ga,
            noise,
            phases,
            filter,
            denoise_cmd,
            snapshot_every,
            sweep_k,
            sweep_seeds,
            baseline_measurements,
        })
    }

    /// Requires an output directory (run subcommands).
    pub fn out_dir(&self) -> Result<&Path> {
        self.out
            .as_deref()
            .ok_or_else(|| anyhow!("no output directory: set `out` in the config or pass --out"))
    }

    /// The resolved configuration as config-file lines (sorted by key),
    /// echoed into run summaries so every run is re-runnable.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut lines: Vec<(String, String)> = Vec::new();
        let mut push = |k: &str, v: String| lines.push((k.to_string(), v));
        push("mode", self.mode.as_str().into());
        push("seed", self.seed.to_string());
        if let Some(out) = &self.out {
            push("out", out.display().to_string());
        }
        if let Some(every) = self.snapshot_every {
            push("snapshot.every", every.to_string());
        }
        push("filter", filter_to_string(self.filter));
        if let Some(cmd) = &self.denoise_cmd {
            push("denoise.cmd", cmd.clone());
        }
        match &self.object {
            ObjectSpec::Primitive {
                shape,
                width,
                height,
                value,
            } => {
                push("object.width", width.to_string());
                push("object.height", height.to_string());
                push("object.value", value.to_string());
                match shape {
                    Primitive::Rectangle {
                        x,
                        y,
                        width: w,
                        height: h,
                    } => {
                        push("object.kind", "rectangle".into());
                        push("object.x", x.to_string());
                        push("object.y", y.to_string());
                        push("object.w", w.to_string());
                        push("object.h", h.to_string());
                    }
                    Primitive::Disk { cx, cy, radius } => {
                        push("object.kind", "disk".into());
                        push("object.cx", cx.to_string());
                        push("object.cy", cy.to_string());
                        push("object.radius", radius.to_string());
                    }
                    Primitive::Ring {
                        cx,
                        cy,
                        inner,
                        outer,
                    } => {
                        push("object.kind", "ring".into());
                        push("object.cx", cx.to_string());
                        push("object.cy", cy.to_string());
                        push("object.inner", inner.to_string());
                        push("object.outer", outer.to_string());
                    }
                    Primitive::Checkerboard { cell } => {
                        push("object.kind", "checkerboard".into());
                        push("object.cell", cell.to_string());
                    }
                }
            }
            ObjectSpec::File { path, threshold } => {
                push("object.kind", "file".into());
                push("object.path", path.display().to_string());
                if let Some(t) = threshold {
                    push("object.threshold", t.to_string());
                }
            }
        }
        push("ga.population", self.ga.population_size.to_string());
        push("ga.generations", self.ga.generations.to_string());
        push("ga.offspring", self.ga.offspring_count.to_string());
        push("ga.k", self.ga.weight_coefficient.to_string());
        push(
            "ga.mode",
            match self.ga.mode {
                ImagingMode::Binary => "binary".into(),
                ImagingMode::Grayscale => "grayscale".into(),
            },
        );
        push("ga.fill", self.ga.fill.to_string());
        push("ga.mutation.initial", self.ga.mutation_initial.to_string());
        push("ga.mutation.final", self.ga.mutation_final.to_string());
        push("ga.mutation.decay", self.ga.mutation_decay.to_string());
        push(
            "ga.result",
            match self.ga.result_rule {
                ResultRule::BestMember => "best-member".into(),
                ResultRule::MeanOfTop(q) => format!("mean-of-top:{q}"),
            },
        );
        match self.noise {
            NoiseModel::None => push("noise.kind", "none".into()),
            NoiseModel::AdditiveGaussian { sigma } => {
                push("noise.kind", "additive-gaussian".into());
                push("noise.sigma", sigma.to_string());
            }
        }
        for (i, phase) in self.phases.iter().enumerate() {
            let prefix = format!("scene.phase.{}", i + 1);
            match phase {
                PhaseSpec::Translate { frames, dx, dy } => {
                    push(&format!("{prefix}.kind"), "translate".into());
                    push(&format!("{prefix}.frames"), frames.to_string());
                    push(&format!("{prefix}.dx"), dx.to_string());
                    push(&format!("{prefix}.dy"), dy.to_string());
                }
                PhaseSpec::Rotate {
                    frames,
                    degrees,
                    cx,
                    cy,
                } => {
                    push(&format!("{prefix}.kind"), "rotate".into());
                    push(&format!("{prefix}.frames"), frames.to_string());
                    push(&format!("{prefix}.degrees"), degrees.to_string());
                    if let Some(cx) = cx {
                        push(&format!("{prefix}.cx"), cx.to_string());
                    }
                    if let Some(cy) = cy {
                        push(&format!("{prefix}.cy"), cy.to_string());
                    }
                }
            }
        }
        if self.mode == Mode::SweepK {
            let ks: Vec<String> = self.sweep_k.iter().map(u32::to_string).collect();
            push("sweep.k", ks.join(","));
            push("sweep.seeds", self.sweep_seeds.to_string());
        }
        if self.mode == Mode::Baseline {
            push("baseline.measurements", self.baseline_measurements.to_string());
        }
        lines.sort();
        lines
    }
}

fn parse_object(doc: &mut Document) -> Result<ObjectSpec> {
    let kind = doc.require("object.kind")?;
    if kind == "file" {
        let path = PathBuf::from(doc.require("object.path")?);
        let threshold = doc.take("object.threshold")?;
        return Ok(ObjectSpec::File { path, threshold });
    }
    let width: usize = doc.take("object.width")?.context("object.width is required")?;
    let height: usize = doc.take("object.height")?.context("object.height is required")?;
    let value: f64 = doc.take("object.value")?.unwrap_or(1.0);
    let shape = match kind.as_str() {
        "rectangle" => Primitive::Rectangle {
            x: doc.take("object.x")?.context("object.x")?,
            y: doc.take("object.y")?.context("object.y")?,
            width: doc.take("object.w")?.context("object.w")?,
            height: doc.take("object.h")?.context("object.h")?,
        },
        "disk" => Primitive::Disk {
            cx: doc.take("object.cx")?.context("object.cx")?,
            cy: doc.take("object.cy")?.context("object.cy")?,
            radius: doc.take("object.radius")?.context("object.radius")?,
        },
        "ring" => Primitive::Ring {
            cx: doc.take("object.cx")?.context("object.cx")?,
            cy: doc.take("object.cy")?.context("object.cy")?,
            inner: doc.take("object.inner")?.context("object.inner")?,
            outer: doc.take("object.outer")?.context("object.outer")?,
        },
        "checkerboard" => Primitive::Checkerboard {
            cell: doc.take("object.cell")?.context("object.cell")?,
        },
        other => bail!("unknown object.kind `{other}`"),
    };
    Ok(ObjectSpec::Primitive {
        shape,
        width,
        height,
        value,
    })
}

fn parse_ga(doc: &mut Document, mode: Mode) -> Result<GaConfig> {
    // the correlation baseline does not evolve anything, so GA keys are
    // optional there
    let population: usize = match doc.take("ga.population")? {
        Some(v) => v,
        None if mode == Mode::Baseline => 2,
        None => bail!("ga.population is required"),
    };
    let generations: usize = match doc.take("ga.generations")? {
        Some(v) => v,
        None if mode == Mode::Baseline => 0,
        None => bail!("ga.generations is required"),
    };
    let mode = match doc.take_string("ga.mode").as_deref() {
        None | Some("binary") => ImagingMode::Binary,
        Some("grayscale") => ImagingMode::Grayscale,
        Some(other) => bail!("unknown ga.mode `{other}`"),
    };
    let mut ga = match mode {
        ImagingMode::Binary => GaConfig::binary(population, generations),
        ImagingMode::Grayscale => GaConfig::grayscale(population, generations),
    };
    if let Some(m) = doc.take("ga.offspring")? {
        ga.offspring_count = m;
    }
    if let Some(k) = doc.take("ga.k")? {
        ga.weight_coefficient = k;
    }
    if let Some(fill) = doc.take("ga.fill")? {
        ga.fill = fill;
    }
    if let Some(r0) = doc.take("ga.mutation.initial")? {
        ga.mutation_initial = r0;
    }
    if let Some(rend) = doc.take("ga.mutation.final")? {
        ga.mutation_final = rend;
    }
    if let Some(decay) = doc.take("ga.mutation.decay")? {
        ga.mutation_decay = decay;
    }
    if let Some(rule) = doc.take_string("ga.result") {
        ga.result_rule = if rule == "best-member" {
            ResultRule::BestMember
        } else if let Some(q) = rule.strip_prefix("mean-of-top:") {
            ResultRule::MeanOfTop(q.parse().context("ga.result mean-of-top size")?)
        } else {
            bail!("unknown ga.result `{rule}`");
        };
    }
    Ok(ga)
}

fn parse_noise(doc: &mut Document) -> Result<NoiseModel> {
    match doc.take_string("noise.kind").as_deref() {
        None | Some("none") => {
            doc.consume("noise.sigma");
            Ok(NoiseModel::None)
        }
        Some("additive-gaussian") => {
            let sigma: f64 = doc.take("noise.sigma")?.context("noise.sigma is required")?;
            Ok(NoiseModel::AdditiveGaussian { sigma })
        }
        Some(other) => bail!("unknown noise.kind `{other}`"),
    }
}

fn parse_phases(doc: &mut Document) -> Result<Vec<PhaseSpec>> {
    let mut phases = Vec::new();
    for index in 1.. {
        let prefix = format!("scene.phase.{index}");
        let Some(kind) = doc.take_string(&format!("{prefix}.kind")) else {
            break;
        };
        let frames: usize = doc
            .take(&format!("{prefix}.frames"))?
            .with_context(|| format!("{prefix}.frames is required"))?;
        let phase = match kind.as_str() {
            "translate" => PhaseSpec::Translate {
                frames,
                dx: doc.take(&format!("{prefix}.dx"))?.unwrap_or(0.0),
                dy: doc.take(&format!("{prefix}.dy"))?.unwrap_or(0.0),
            },
            "rotate" => PhaseSpec::Rotate {
                frames,
                degrees: doc
                    .take(&format!("{prefix}.degrees"))?
                    .with_context(|| format!("{prefix}.degrees is required"))?,
                cx: doc.take(&format!("{prefix}.cx"))?,
                cy: doc.take(&format!("{prefix}.cy"))?,
            },
            other => bail!("unknown {prefix}.kind `{other}`"),
        };
        phases.push(phase);
    }
    Ok(phases)
}

/// The raw parsed document with consumption tracking.
struct Document {
    entries: BTreeMap<String, String>,
}

impl Document {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (number, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", number + 1))?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                bail!("line {}: empty key", number + 1);
            }
            if entries.insert(key.clone(), value).is_some() {
                bail!("line {}: duplicate key `{key}`", number + 1);
            }
        }
        Ok(Self { entries })
    }

    fn take_string(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    fn consume(&mut self, key: &str) {
        self.entries.remove(key);
    }

    fn take<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::error::Error + Send + Sync + 'static,
    {
        match self.entries.remove(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .with_context(|| format!("value of `{key}`: `{raw}`")),
        }
    }

    fn require(&mut self, key: &str) -> Result<String> {
        self.take_string(key)
            .ok_or_else(|| anyhow!("`{key}` is required"))
    }

    fn finish(self) -> Result<()> {
        if let Some(key) = self.entries.keys().next() {
            bail!("unknown key `{key}`");
        }
        Ok(())
    }
}
