//! The self-evolving imaging loop: a population of illumination patterns
//! is scored by bucket response, bred by rank, mutated with a decaying
//! rate, and the offspring replace the lowest-ranked members.
//!
//! Only the offspring are measured each generation, so a run of `G`
//! generations costs exactly `N + G * M` detector samples from a fresh
//! start and `G * M` when continuing on a new frame of a dynamic scene.

mod cost;
mod operators;
mod trace;

pub use cost::{cost_binary, cost_grayscale, CfBaseline};
pub use operators::{breed, breed_with_template, mutate, mutation_rate, select_parents};
pub use trace::{
    EvolutionTrace, FrameTrace, GenerationRecord, MetricsOptions, Snapshot, TraceOptions,
};

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::measurement::{
    measure_bucket, pattern_weight, random_pattern, BucketSignal, NoiseModel, PatternMode,
    WeightOrder,
};

/// Whether patterns (and the cost function) are binary or grayscale.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImagingMode {
    Binary,
    Grayscale,
}

/// How the reported image is derived from the ranked population.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResultRule {
    /// The rank-1 pattern itself.
    BestMember,
    /// Pixelwise mean of the top `q` patterns.
    MeanOfTop(usize),
}

/// All hyperparameters of an evolution run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaConfig {
    /// Population size N.
    pub population_size: usize,
    /// Generations G to evolve (per frame in dynamic mode).
    pub generations: usize,
    /// Offspring M bred and measured per generation.
    pub offspring_count: usize,
    /// Signal exponent k of the binary cost function. Grayscale imaging
    /// always uses 2.
    pub weight_coefficient: u32,
    pub mode: ImagingMode,
    /// Mutation rate at the first generation.
    pub mutation_initial: f64,
    /// Mutation rate in the long-generation limit.
    pub mutation_final: f64,
    /// Decay time constant, in generations.
    pub mutation_decay: f64,
    /// Fill fraction of random binary patterns.
    pub fill: f64,
    pub result_rule: ResultRule,
}

impl GaConfig {
    /// Binary-imaging defaults: `M = N/2`, `k = 1`, mutation decaying from
    /// 0.1 to 0.005 with a 300-generation time constant, fill 0.5.
    pub fn binary(population_size: usize, generations: usize) -> Self {
        Self {
            population_size,
            generations,
            offspring_count: population_size / 2,
            weight_coefficient: 1,
            mode: ImagingMode::Binary,
            mutation_initial: 0.1,
            mutation_final: 0.005,
            mutation_decay: 300.0,
            fill: 0.5,
            result_rule: ResultRule::BestMember,
        }
    }

    /// Grayscale-imaging defaults (same as binary except `k = 2`).
    pub fn grayscale(population_size: usize, generations: usize) -> Self {
        Self {
            weight_coefficient: 2,
            mode: ImagingMode::Grayscale,
            ..Self::binary(population_size, generations)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::InvalidConfig("population must have at least 2 members"));
        }
        if self.offspring_count == 0 {
            return Err(Error::InvalidConfig("offspring count must be at least 1"));
        }
        if self.offspring_count > self.population_size {
            return Err(Error::InvalidConfig("offspring count cannot exceed population size"));
        }
        if self.weight_coefficient == 0 {
            return Err(Error::InvalidConfig("weight coefficient must be at least 1"));
        }
        if self.mode == ImagingMode::Grayscale && self.weight_coefficient != 2 {
            return Err(Error::InvalidConfig("grayscale imaging fixes the weight coefficient at 2"));
        }
        for rate in [self.mutation_initial, self.mutation_final] {
            if !(rate > 0.0 && rate < 1.0) {
                return Err(Error::InvalidConfig("mutation rates must lie in (0, 1)"));
            }
        }
        if self.mutation_final > self.mutation_initial {
            return Err(Error::InvalidConfig("final mutation rate cannot exceed the initial rate"));
        }
        if !(self.mutation_decay > 0.0 && self.mutation_decay.is_finite()) {
            return Err(Error::InvalidConfig("mutation decay must be positive"));
        }
        if !(self.fill > 0.0 && self.fill < 1.0) {
            return Err(Error::InvalidConfig("fill must lie strictly in (0, 1)"));
        }
        if let ResultRule::MeanOfTop(q) = self.result_rule {
            if q == 0 || q > self.population_size {
                return Err(Error::InvalidConfig("mean-of-top size must lie in 1..=N"));
            }
        }
        Ok(())
    }

    pub fn pattern_mode(&self) -> PatternMode {
        match self.mode {
            ImagingMode::Binary => PatternMode::Binary { fill: self.fill },
            ImagingMode::Grayscale => PatternMode::Grayscale,
        }
    }

    pub fn weight_order(&self) -> WeightOrder {
        match self.mode {
            ImagingMode::Binary => WeightOrder::Linear,
            ImagingMode::Grayscale => WeightOrder::Squared,
        }
    }

    /// Exponent applied to signals in the cost function and its baseline.
    pub fn signal_exponent(&self) -> u32 {
        match self.mode {
            ImagingMode::Binary => self.weight_coefficient,
            ImagingMode::Grayscale => 2,
        }
    }
}

/// One candidate pattern with its cached measurement and cost.
///
/// In dynamic mode the cached signal may be stale (measured against an
/// earlier frame); inherited members are deliberately not re-measured.
#[derive(Clone, Debug)]
pub struct PopulationMember {
    pub pattern: Image,
    pub signal: BucketSignal,
    pub cf: f64,
    pub birth_generation: usize,
}

/// Orders members by descending cost; ties break toward the older member
/// (smaller birth generation), then original position. Fully deterministic.
pub fn rank(population: &mut [PopulationMember]) {
    population.sort_by(|a, b| {
        b.cf.total_cmp(&a.cf)
            .then_with(|| a.birth_generation.cmp(&b.birth_generation))
    });
}

fn score(signal: BucketSignal, weight: f64, baseline: &CfBaseline, config: &GaConfig) -> f64 {
    match config.mode {
        ImagingMode::Binary => cost_binary(signal, weight, baseline, config.weight_coefficient),
        ImagingMode::Grayscale => cost_grayscale(signal, weight, baseline),
    }
}

/// Measures and scores a given set of initial patterns, computing the
/// cost-function baseline from them.
pub fn population_from_patterns(
    config: &GaConfig,
    patterns: Vec<Image>,
    object: &Image,
    noise: NoiseModel,
    rng: &mut impl Rng,
) -> Result<(Vec<PopulationMember>, CfBaseline)> {
    let order = config.weight_order();
    let mut signals = Vec::with_capacity(patterns.len());
    let mut weights = Vec::with_capacity(patterns.len());
    for pattern in &patterns {
        signals.push(measure_bucket(pattern, object, noise, rng)?);
        weights.push(pattern_weight(pattern, order));
    }
    let baseline = CfBaseline::from_initial(&signals, &weights, config.signal_exponent(), order)?;
    let mut population: Vec<PopulationMember> = patterns
        .into_iter()
        .zip(signals.iter().zip(&weights))
        .map(|(pattern, (&signal, &weight))| PopulationMember {
            pattern,
            signal,
            cf: score(signal, weight, &baseline, config),
            birth_generation: 0,
        })
        .collect();
    rank(&mut population);
    Ok((population, baseline))
}

/// Draws N fresh random patterns, measures each against the object (N
/// detector samples) and computes the baseline and per-member costs.
pub fn init_population(
    config: &GaConfig,
    width: usize,
    height: usize,
    object: &Image,
    noise: NoiseModel,
    rng: &mut impl Rng,
) -> Result<(Vec<PopulationMember>, CfBaseline)> {
    config.validate()?;
    if object.dims() != (width, height) {
        return Err(Error::DimensionMismatch {
            left: (width, height),
            right: object.dims(),
        });
    }
    let mode = config.pattern_mode();
    let patterns = (0..config.population_size)
        .map(|_| random_pattern(width, height, mode, rng))
        .collect::<Result<Vec<_>>>()?;
    population_from_patterns(config, patterns, object, noise, rng)
}

/// Evolution state: the ranked population, the frozen baseline, and the
/// global generation / measurement counters.
#[derive(Clone, Debug)]
pub struct GaState {
    width: usize,
    height: usize,
    population: Vec<PopulationMember>,
    baseline: CfBaseline,
    generation: usize,
    measurements: u64,
}

impl GaState {
    /// Initializes a fresh population against `object`.
    pub fn init(
        config: &GaConfig,
        object: &Image,
        noise: NoiseModel,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        let (width, height) = object.dims();
        let (population, baseline) = init_population(config, width, height, object, noise, rng)?;
        let measurements = population.len() as u64;
        Ok(Self {
            width,
            height,
            population,
            baseline,
            generation: 0,
            measurements,
        })
    }

    /// Carries the whole population over to the next frame of a dynamic
    /// scene.
    ///
    /// Patterns, cached signals, costs and the baseline are all retained;
    /// nothing is re-measured, so a continuation frame costs exactly
    /// `G * M` detector samples. Cached values are stale with respect to
    /// the new frame until offspring measured against it displace them.
    pub fn warm_start(&mut self, next_object: &Image) -> Result<()> {
        if next_object.dims() != (self.width, self.height) {
            return Err(Error::DimensionMismatch {
                left: (self.width, self.height),
                right: next_object.dims(),
            });
        }
        Ok(())
    }

    /// Runs one generation: breeds M offspring (select, cross, mutate),
    /// measures only those offspring, replaces the M lowest-ranked members
    /// and re-ranks.
    ///
    /// All randomness is drawn sequentially, so results are independent of
    /// how callers schedule surrounding work.
    pub fn step(
        &mut self,
        object: &Image,
        noise: NoiseModel,
        config: &GaConfig,
        rng: &mut impl Rng,
    ) -> Result<()> {
        if object.dims() != (self.width, self.height) {
            return Err(Error::DimensionMismatch {
                left: (self.width, self.height),
                right: object.dims(),
            });
        }
        let n = self.population.len();
        let m = config.offspring_count;
        if m == 0 || m > n {
            return Err(Error::InvalidConfig("offspring count must lie in 1..=N"));
        }
        let rate = mutation_rate(self.generation + 1, config);
        let mode = config.pattern_mode();

        let mut bred = Vec::with_capacity(m);
        for _ in 0..m {
            let (ma, pa) = select_parents(&self.population, rng)?;
            let child = breed(
                &self.population[ma].pattern,
                &self.population[pa].pattern,
                rng,
            )?;
            bred.push(mutate(&child, rate, mode, rng));
        }

        let order = config.weight_order();
        let birth = self.generation + 1;
        let mut offspring = Vec::with_capacity(m);
        for pattern in bred {
            let signal = measure_bucket(&pattern, object, noise, rng)?;
            let weight = pattern_weight(&pattern, order);
            let cf = score(signal, weight, &self.baseline, config);
            offspring.push(PopulationMember {
                pattern,
                signal,
                cf,
                birth_generation: birth,
            });
        }

        self.population.truncate(n - m);
        self.population.extend(offspring);
        rank(&mut self.population);
        self.generation += 1;
        self.measurements += m as u64;
        Ok(())
    }

    /// Ranked population, best first.
    pub fn population(&self) -> &[PopulationMember] {
        &self.population
    }

    pub fn baseline(&self) -> &CfBaseline {
        &self.baseline
    }

    pub fn best(&self) -> &PopulationMember {
        &self.population[0]
    }

    /// Completed generation steps (global across dynamic frames).
    pub fn generation(&self) -> usize {
        self.generation
    }


    /// Total detector samples consumed so far.
    pub fn measurements(&self) -> u64 {
        self.measurements
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Renders the reported image for the current population.
    pub fn result_image(&self, rule: ResultRule) -> Image {
        match rule {
            ResultRule::BestMember => self.population[0].pattern.clone(),
            ResultRule::MeanOfTop(q) => {
                let q = q.clamp(1, self.population.len());
                let scale = 1.0 / q as f64;
                Image::from_fn(self.width, self.height, |x, y| {
                    self.population[..q]
                        .iter()
                        .map(|member| member.pattern.get(x, y))
                        .sum::<f64>()
                        * scale
                })
                .expect("mean of valid patterns stays in range")
            }
        }
    }
}

/// Evolves an existing state for `config.generations` more generations,
/// recording one entry per generation (labeled `1..=G` within this frame).
pub fn evolve_frame(
    state: &mut GaState,
    object: &Image,
    noise: NoiseModel,
    config: &GaConfig,
    rng: &mut impl Rng,
    options: &TraceOptions<'_>,
) -> Result<FrameTrace> {
    let mut records = Vec::with_capacity(config.generations);
    let mut snapshots = Vec::new();
    for step_index in 1..=config.generations {
        state.step(object, noise, config, rng)?;
        records.push(trace::make_record(state, step_index, config, options)?);
        if let Some(every) = options.snapshot_every {
            if every > 0 && step_index % every == 0 {
                snapshots.push(Snapshot {
                    generation: step_index,
                    image: state.result_image(config.result_rule),
                });
            }
        }
    }
    let result = state.result_image(config.result_rule);
    Ok(FrameTrace {
        records,
        snapshots,
        result,
    })
}

/// Full static run: fresh initialization followed by `config.generations`
/// evolution steps. The returned records are labeled `0..=G`, where record
/// 0 describes the initial population.
pub fn evolve(
    config: &GaConfig,
    object: &Image,
    noise: NoiseModel,
    rng: &mut impl Rng,
    options: &TraceOptions<'_>,
) -> Result<EvolutionTrace> {
    let mut state = GaState::init(config, object, noise, rng)?;
    let mut records = Vec::with_capacity(config.generations + 1);
    records.push(trace::make_record(&state, 0, config, options)?);
    let frame = evolve_frame(&mut state, object, noise, config, rng, options)?;
    records.extend(frame.records);
    Ok(EvolutionTrace {
        records,
        snapshots: frame.snapshots,
        result: frame.result,
        final_state: state,
    })
}
