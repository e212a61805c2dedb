//! Real-coded genetic algorithm.
//!
//! Tournament selection, BLX-α blend crossover, Gaussian mutation and
//! elitism over box-bounded genes. The fitness is maximized. Evaluations
//! within a generation run in parallel and are merged in population order,
//! and the random stream is consumed on the calling thread only, so a run
//! is reproducible from its seed.

mod operators;
mod reduced;

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use operators::{crossover_blend, mutate_gaussian, select_tournament};
pub use reduced::{reduced_fitness, ReducedFitness};

use crate::error::{Error, Result};

/// Best-fitness gains at or below this size count as no improvement for
/// the stagnation stop.
pub const STAGNATION_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// Standard deviation of a mutation step as a fraction of the gene range.
    pub mutation_sigma: f64,
    pub elitism_count: usize,
    pub bounds: Vec<(f64, f64)>,
    pub tournament_size: usize,
    /// Extension `α` of the BLX crossover interval.
    pub blend_alpha: f64,
    pub rng_seed: u64,
    /// Stop after this many generations without improvement.
    pub stagnation: Option<usize>,
}

impl GaConfig {
    pub fn new(bounds: Vec<(f64, f64)>) -> Self {
        Self {
            population_size: 40,
            generations: 60,
            crossover_rate: 0.9,
            mutation_rate: 0.1,
            mutation_sigma: 0.1,
            elitism_count: 2,
            bounds,
            tournament_size: 3,
            blend_alpha: 0.5,
            rng_seed: 0,
            stagnation: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::GaConfig(m));
        if self.population_size == 0 {
            return fail("population_size must be positive".into());
        }
        if self.generations == 0 {
            return fail("generations must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return fail(format!("crossover_rate {} outside [0, 1]", self.crossover_rate));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return fail(format!("mutation_rate {} outside [0, 1]", self.mutation_rate));
        }
        if !(self.mutation_sigma > 0.0 && self.mutation_sigma.is_finite()) {
            return fail(format!("mutation_sigma {} must be positive", self.mutation_sigma));
        }
        if self.elitism_count >= self.population_size {
            return fail(format!(
                "elitism_count {} must be below population_size {}",
                self.elitism_count, self.population_size
            ));
        }
        if self.tournament_size < 2 {
            return fail(format!("tournament_size {} must be at least 2", self.tournament_size));
        }
        if !(self.blend_alpha >= 0.0 && self.blend_alpha.is_finite()) {
            return fail(format!("blend_alpha {} must be non-negative", self.blend_alpha));
        }
        if self.bounds.is_empty() {
            return fail("at least one gene is required".into());
        }
        for (k, &(lo, hi)) in self.bounds.iter().enumerate() {
            if !(lo < hi && lo.is_finite() && hi.is_finite()) {
                return fail(format!("bounds of gene {k} must satisfy low < high, got [{lo}, {hi}]"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub genes: Vec<f64>,
    /// `None` until evaluated.
    pub fitness: Option<f64>,
}

impl Individual {
    pub fn new(genes: Vec<f64>) -> Self {
        Self { genes, fitness: None }
    }

    fn score(&self) -> f64 {
        self.fitness.unwrap_or(f64::NEG_INFINITY)
    }
}

/// A fitness to maximize.
pub trait Fitness: Sync {
    fn evaluate(&self, genes: &[f64]) -> f64;

    /// Whether `genes` lie outside the region the fitness was built from.
    fn is_extrapolation(&self, _genes: &[f64]) -> bool {
        false
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Fitness for F {
    fn evaluate(&self, genes: &[f64]) -> f64 {
        self(genes)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub best_genes: Vec<f64>,
    /// Individuals of this generation evaluated by extrapolation.
    pub extrapolated: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GaTrace {
    pub records: Vec<GenerationRecord>,
    pub evaluations: usize,
    pub stopped_early: bool,
}

impl GaTrace {
    /// `generation,best_fitness,mean_fitness,best_gene_0,…,extrapolated`.
    pub fn to_csv(&self) -> String {
        let d = self.records.first().map_or(0, |r| r.best_genes.len());
        let mut s = String::from("generation,best_fitness,mean_fitness");
        for k in 0..d {
            let _ = write!(s, ",best_gene_{k}");
        }
        s.push_str(",extrapolated\n");
        for r in &self.records {
            let _ = write!(s, "{},{:e},{:e}", r.generation, r.best_fitness, r.mean_fitness);
            for g in &r.best_genes {
                let _ = write!(s, ",{g:e}");
            }
            let _ = writeln!(s, ",{}", r.extrapolated);
        }
        s
    }
}

/// Evaluates every individual without a fitness, in parallel, and checks
/// for NaN in population order.
fn evaluate(population: &mut [Individual], fitness: &impl Fitness) -> Result<usize> {
    let pending: Vec<usize> = (0..population.len()).filter(|&i| population[i].fitness.is_none()).collect();
    let values: Vec<f64> = pending.par_iter().map(|&i| fitness.evaluate(&population[i].genes)).collect();
    for (&i, &v) in pending.iter().zip(&values) {
        if v.is_nan() {
            return Err(Error::NanFitness { genes: population[i].genes.clone() });
        }
        population[i].fitness = Some(v);
    }
    Ok(pending.len())
}

/// Runs the GA and returns the best individual found with the trace.
pub fn run_ga(config: &GaConfig, fitness: &impl Fitness) -> Result<(Individual, GaTrace)> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut population: Vec<Individual> = (0..config.population_size)
        .map(|_| Individual::new(config.bounds.iter().map(|&(lo, hi)| rng.random_range(lo..=hi)).collect()))
        .collect();

    let mut trace = GaTrace::default();
    trace.evaluations += evaluate(&mut population, fitness)?;
    let mut best: Option<Individual> = None;
    let mut since_improvement = 0;

    for generation in 0..config.generations {
        let order = ranking(&population);
        let leader = &population[order[0]];
        let mean = population.iter().map(Individual::score).sum::<f64>() / population.len() as f64;
        trace.records.push(GenerationRecord {
            generation,
            best_fitness: leader.score(),
            mean_fitness: mean,
            best_genes: leader.genes.clone(),
            extrapolated: population.iter().filter(|i| fitness.is_extrapolation(&i.genes)).count(),
        });
        match &best {
            Some(b) if leader.score() <= b.score() + STAGNATION_TOL => {
                since_improvement += 1;
                if leader.score() > b.score() {
                    best = Some(leader.clone());
                }
            }
            _ => {
                best = Some(leader.clone());
                since_improvement = 0;
            }
        }
        if generation + 1 == config.generations {
            break;
        }
        if config.stagnation.is_some_and(|p| since_improvement >= p) {
            trace.stopped_early = true;
            break;
        }

        let mut next: Vec<Individual> = order[..config.elitism_count].iter().map(|&i| population[i].clone()).collect();
        while next.len() < config.population_size {
            let a = select_tournament(&population, config.tournament_size, &mut rng);
            let b = select_tournament(&population, config.tournament_size, &mut rng);
            let (c1, c2) = if rng.random::<f64>() < config.crossover_rate {
                crossover_blend(a, b, config.blend_alpha, &config.bounds, &mut rng)
            } else {
                (a.clone(), b.clone())
            };
            for child in [c1, c2] {
                if next.len() < config.population_size {
                    next.push(mutate_gaussian(
                        &child,
                        config.mutation_rate,
                        config.mutation_sigma,
                        &config.bounds,
                        &mut rng,
                    ));
                }
            }
        }
        trace.evaluations += evaluate(&mut next, fitness)?;
        population = next;
    }
    Ok((best.expect("at least one generation"), trace))
}

/// Indices sorted by decreasing fitness; ties keep population order.
fn ranking(population: &[Individual]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&a, &b| population[b].score().total_cmp(&population[a].score()));
    order
}
