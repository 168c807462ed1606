//! Measure learning: evolutionary search over binary measures, exhaustive
//! search for small source counts, and an evolutionary real-valued baseline
//! sharing the same skeleton.
//!
//! Each generation evaluates the members that have no cached fitness, ranks
//! the population by `(J, number of 1-bits, position)`, copies the elites,
//! and fills the rest with mutated children of linearly rank-selected
//! parents. Randomness for generation `t` comes from its own sub-stream, so
//! evaluation order and thread count never change a run.

use std::time::Instant;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::Dataset;
use crate::measure::{
    self, enumerate_all_with_cap, full_mask, BinaryFuzzyMeasure, FuzzyMeasure, Measure,
    MeasureError, RealFuzzyMeasure, DEFAULT_ENUMERATION_CAP,
};
use crate::objective::PreparedDataset;
use crate::{par, rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EaConfig {
    pub population_size: usize,
    pub elite_count: usize,
    /// Probability a child is one flipped (binary) or re-drawn (real)
    /// element of its parent.
    pub small_mutation_rate: f64,
    /// Probability a child is a freshly sampled measure.
    pub large_mutation_rate: f64,
    /// Probability a child is a repaired uniform crossover of two parents
    /// instead of a mutant. Off by default.
    pub crossover_rate: f64,
    pub max_generations: usize,
    pub stall_generations: usize,
    pub fitness_tolerance: f64,
    /// Bernoulli density for sampled binary measures.
    pub sample_density: f64,
    pub rng_seed: u64,
    pub time_cap_seconds: Option<f64>,
    /// Evaluate population members concurrently when rayon is compiled in.
    pub parallel: bool,
}

impl Default for EaConfig {
    fn default() -> Self {
        Self {
            population_size: 64,
            elite_count: 4,
            small_mutation_rate: 0.8,
            large_mutation_rate: 0.2,
            crossover_rate: 0.0,
            max_generations: 500,
            stall_generations: 30,
            fitness_tolerance: 1e-6,
            sample_density: 0.5,
            rng_seed: 0,
            time_cap_seconds: None,
            parallel: true,
        }
    }
}

impl EaConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        let fail = |msg: String| Err(TrainError::Config(msg));
        if self.population_size < 2 {
            return fail(format!("population_size must be at least 2, got {}", self.population_size));
        }
        if self.elite_count == 0 || self.elite_count >= self.population_size {
            return fail(format!(
                "elite_count must be in 1..{}, got {}",
                self.population_size, self.elite_count
            ));
        }
        for (name, p) in [
            ("small_mutation_rate", self.small_mutation_rate),
            ("large_mutation_rate", self.large_mutation_rate),
            ("crossover_rate", self.crossover_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return fail(format!("{name} must be a probability, got {p}"));
            }
        }
        if (self.small_mutation_rate + self.large_mutation_rate - 1.0).abs() > 1e-9 {
            return fail(format!(
                "mutation rates must sum to 1, got {} + {}",
                self.small_mutation_rate, self.large_mutation_rate
            ));
        }
        if self.max_generations == 0 || self.stall_generations == 0 {
            return fail("generation limits must be positive".into());
        }
        if !(self.fitness_tolerance.is_finite() && self.fitness_tolerance >= 0.0) {
            return fail(format!("fitness_tolerance must be non-negative, got {}", self.fitness_tolerance));
        }
        if !(self.sample_density > 0.0 && self.sample_density < 1.0) {
            return fail(format!("sample_density must lie in (0, 1), got {}", self.sample_density));
        }
        if let Some(cap) = self.time_cap_seconds {
            if !(cap.is_finite() && cap > 0.0) {
                return fail(format!("time_cap_seconds must be positive, got {cap}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Best objective fell to `fitness_tolerance` or below (or the search
    /// space was exhausted).
    Converged,
    /// No improvement larger than `fitness_tolerance` for
    /// `stall_generations` generations.
    Stalled,
    MaxGenerations,
    TimeCap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainResult {
    pub best_measure: Measure,
    pub best_objective: f64,
    pub generations_run: usize,
    /// Objective evaluations performed.
    pub evaluations: usize,
    pub wall_time_seconds: f64,
    /// Best objective after each generation (running best per scanned
    /// measure for exhaustive search); non-increasing.
    pub objective_trace: Vec<f64>,
    pub terminated_by: Termination,
}

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("training needs positive and negative bags (found {positive} positive, {negative} negative)")]
    MissingPolarity { positive: usize, negative: usize },
    #[error("invalid EA configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

fn check_polarity(data: &Dataset) -> Result<(), TrainError> {
    let (positive, negative) = (data.positive_bags(), data.negative_bags());
    if positive == 0 || negative == 0 {
        return Err(TrainError::MissingPolarity { positive, negative });
    }
    Ok(())
}

/// What the evolutionary skeleton needs from a measure representation.
pub(crate) trait Genome: FuzzyMeasure + Clone + Send + Sync + Sized {
    fn seeds(source_count: usize) -> Vec<Self>;
    fn sample<R: Rng>(source_count: usize, cfg: &EaConfig, rng: &mut R) -> Self;
    fn small_mutation<R: Rng>(&self, rng: &mut R) -> Self;
    fn crossover<R: Rng>(&self, other: &Self, rng: &mut R) -> Self;
    /// Secondary ranking key among equal objectives; lower wins.
    fn tie_key(&self) -> usize;
    fn into_measure(self) -> Measure;
}

/// Uniformly random non-pinned mask, if any exist.
fn random_free_mask<R: Rng>(source_count: usize, rng: &mut R) -> Option<usize> {
    let full = full_mask(source_count);
    (full > 1).then(|| rng.random_range(1..full))
}

impl Genome for BinaryFuzzyMeasure {
    fn seeds(source_count: usize) -> Vec<Self> {
        vec![
            BinaryFuzzyMeasure::minimum(source_count).expect("source count checked"),
            BinaryFuzzyMeasure::maximum(source_count).expect("source count checked"),
        ]
    }

    fn sample<R: Rng>(source_count: usize, cfg: &EaConfig, rng: &mut R) -> Self {
        measure::sample_random_with(source_count, cfg.sample_density, rng)
            .expect("source count and density checked")
    }

    fn small_mutation<R: Rng>(&self, rng: &mut R) -> Self {
        match random_free_mask(self.source_count(), rng) {
            Some(mask) => self.set_unpinned(mask, !self.get(mask)),
            None => self.clone(),
        }
    }

    // Per-element pick from either parent, then upward closure.
    fn crossover<R: Rng>(&self, other: &Self, rng: &mut R) -> Self {
        let s = self.source_count();
        let mut bits: Vec<bool> = (0..1usize << s)
            .map(|m| if rng.random_bool(0.5) { self.get(m) } else { other.get(m) })
            .collect();
        bits[0] = false;
        bits[full_mask(s)] = true;
        for mask in 1..=full_mask(s) {
            if !bits[mask] {
                bits[mask] = (0..s).any(|i| mask & (1 << i) != 0 && bits[mask ^ (1 << i)]);
            }
        }
        BinaryFuzzyMeasure::from_raw(s, &bits).expect("length matches")
    }

    fn tie_key(&self) -> usize {
        self.ones()
    }

    fn into_measure(self) -> Measure {
        Measure::Binary(self)
    }
}

impl Genome for RealFuzzyMeasure {
    fn seeds(source_count: usize) -> Vec<Self> {
        vec![
            RealFuzzyMeasure::minimum(source_count).expect("source count checked"),
            RealFuzzyMeasure::maximum(source_count).expect("source count checked"),
        ]
    }

    fn sample<R: Rng>(source_count: usize, _cfg: &EaConfig, rng: &mut R) -> Self {
        measure::sample_random_real_with(source_count, rng).expect("source count checked")
    }

    fn small_mutation<R: Rng>(&self, rng: &mut R) -> Self {
        match random_free_mask(self.source_count(), rng) {
            Some(mask) => {
                let (low, high) = self.bounds(mask);
                let value = if low < high { rng.random_range(low..=high) } else { low };
                self.with_value_unchecked(mask, value)
            }
            None => self.clone(),
        }
    }

    // Per-element pick from either parent, then raise each element to the
    // max of its immediate subsets.
    fn crossover<R: Rng>(&self, other: &Self, rng: &mut R) -> Self {
        let s = self.source_count();
        let mut values: Vec<f64> = (0..1usize << s)
            .map(|m| if rng.random_bool(0.5) { self.value(m) } else { other.value(m) })
            .collect();
        values[0] = 0.0;
        values[full_mask(s)] = 1.0;
        for mask in 1..full_mask(s) {
            let low = (0..s)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| values[mask ^ (1 << i)])
                .fold(0.0, f64::max);
            values[mask] = values[mask].max(low);
        }
        RealFuzzyMeasure::from_raw(s, values).expect("length matches")
    }

    fn tie_key(&self) -> usize {
        0
    }

    fn into_measure(self) -> Measure {
        Measure::Real(self)
    }
}

struct Member<G> {
    genome: G,
    fitness: Option<f64>,
}

fn run_ea<G: Genome>(data: &Dataset, cfg: &EaConfig) -> Result<TrainResult, TrainError> {
    check_polarity(data)?;
    cfg.validate()?;
    let s = data.source_count();
    measure::check_source_count(s)?;

    let start = Instant::now();
    let prepared = PreparedDataset::new(data);

    let mut init_rng = rng::stream(cfg.rng_seed, rng::INIT, 0);
    let mut population: Vec<Member<G>> = G::seeds(s)
        .into_iter()
        .take(cfg.population_size)
        .map(|genome| Member { genome, fitness: None })
        .collect();
    while population.len() < cfg.population_size {
        population.push(Member {
            genome: G::sample(s, cfg, &mut init_rng),
            fitness: None,
        });
    }

    let mut trace = Vec::new();
    let mut evaluations = 0usize;
    let mut reference = f64::INFINITY;
    let mut last_improvement = 0usize;
    let mut generation = 0usize;

    loop {
        let pending: Vec<usize> = (0..population.len())
            .filter(|&i| population[i].fitness.is_none())
            .collect();
        let scores = {
            let genomes: Vec<&G> = pending.iter().map(|&i| &population[i].genome).collect();
            par::map_collect(&genomes, cfg.parallel, |g| prepared.total_sequential(*g))
        };
        evaluations += pending.len();
        for (&i, score) in pending.iter().zip(scores) {
            population[i].fitness = Some(score);
        }

        let ranked = rank(&population);
        population = reorder(population, &ranked);
        let best = population[0].fitness.expect("evaluated");
        trace.push(best);

        if best < reference - cfg.fitness_tolerance {
            reference = best;
            last_improvement = generation;
        }
        generation += 1;

        let terminated_by = if best <= cfg.fitness_tolerance {
            Some(Termination::Converged)
        } else if generation - 1 - last_improvement >= cfg.stall_generations {
            Some(Termination::Stalled)
        } else if generation >= cfg.max_generations {
            Some(Termination::MaxGenerations)
        } else if cfg
            .time_cap_seconds
            .is_some_and(|cap| start.elapsed().as_secs_f64() >= cap)
        {
            Some(Termination::TimeCap)
        } else {
            None
        };

        if let Some(terminated_by) = terminated_by {
            let best_member = population.swap_remove(0);
            return Ok(TrainResult {
                best_measure: best_member.genome.into_measure(),
                best_objective: best,
                generations_run: generation,
                evaluations,
                wall_time_seconds: start.elapsed().as_secs_f64(),
                objective_trace: trace,
                terminated_by,
            });
        }

        population = next_generation(population, cfg, generation as u64);
    }
}

// Indices sorted by (fitness, tie key, current position).
fn rank<G: Genome>(population: &[Member<G>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = population[a].fitness.expect("evaluated");
        let fb = population[b].fitness.expect("evaluated");
        fa.total_cmp(&fb)
            .then_with(|| population[a].genome.tie_key().cmp(&population[b].genome.tie_key()))
            .then_with(|| a.cmp(&b))
    });
    order
}

fn reorder<G>(population: Vec<Member<G>>, order: &[usize]) -> Vec<Member<G>> {
    let mut slots: Vec<Option<Member<G>>> = population.into_iter().map(Some).collect();
    order.iter().map(|&i| slots[i].take().expect("permutation")).collect()
}

fn next_generation<G: Genome>(ranked: Vec<Member<G>>, cfg: &EaConfig, generation: u64) -> Vec<Member<G>> {
    let n = ranked.len();
    let s = ranked[0].genome.source_count();
    let mut rng = rng::stream(cfg.rng_seed, rng::MUTATION, generation);
    // Linear ranking: the best member weighs n, the worst 1.
    let selector = WeightedIndex::new((0..n).map(|r| (n - r) as f64)).expect("positive weights");

    let mut next: Vec<Member<G>> = Vec::with_capacity(n);
    for elite in ranked.iter().take(cfg.elite_count) {
        next.push(Member {
            genome: elite.genome.clone(),
            fitness: elite.fitness,
        });
    }
    while next.len() < n {
        let parent = &ranked[selector.sample(&mut rng)].genome;
        let child = if cfg.crossover_rate > 0.0 && rng.random_bool(cfg.crossover_rate) {
            let other = &ranked[selector.sample(&mut rng)].genome;
            parent.crossover(other, &mut rng)
        } else if rng.random_bool(cfg.small_mutation_rate) {
            parent.small_mutation(&mut rng)
        } else {
            G::sample(s, cfg, &mut rng)
        };
        debug_assert!(child.validate().is_valid(), "{}", child.validate());
        next.push(Member {
            genome: child,
            fitness: None,
        });
    }
    next
}

/// Evolutionary search over binary fuzzy measures.
pub fn train_bfm(data: &Dataset, cfg: &EaConfig) -> Result<TrainResult, TrainError> {
    run_ea::<BinaryFuzzyMeasure>(data, cfg)
}

/// Evolutionary search over real-valued measures with the same skeleton as
/// [`train_bfm`]; a timing baseline.
pub fn train_real_fm(data: &Dataset, cfg: &EaConfig) -> Result<TrainResult, TrainError> {
    run_ea::<RealFuzzyMeasure>(data, cfg)
}

/// Global minimum of the objective over every binary measure. Ties go to
/// the measure enumerated first.
pub fn train_exhaustive(data: &Dataset) -> Result<TrainResult, TrainError> {
    train_exhaustive_with(data, DEFAULT_ENUMERATION_CAP, crate::parallel_available())
}

pub fn train_exhaustive_with(data: &Dataset, cap: usize, parallel: bool) -> Result<TrainResult, TrainError> {
    check_polarity(data)?;
    let measures: Vec<BinaryFuzzyMeasure> = enumerate_all_with_cap(data.source_count(), cap)?.collect();
    let start = Instant::now();
    let prepared = PreparedDataset::new(data);
    let scores = par::map_collect(&measures, parallel, |g| prepared.total_sequential(g));

    let mut trace = Vec::with_capacity(scores.len());
    let mut best = 0usize;
    for (i, &score) in scores.iter().enumerate() {
        if score < scores[best] {
            best = i;
        }
        trace.push(scores[best]);
    }
    let best_objective = scores[best];
    Ok(TrainResult {
        best_measure: Measure::Binary(measures[best].clone()),
        best_objective,
        generations_run: 1,
        evaluations: measures.len(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        objective_trace: trace,
        terminated_by: Termination::Converged,
    })
}
