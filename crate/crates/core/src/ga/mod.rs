//! Subarea-partitioned genetic algorithm.
//!
//! The field is split into a near-square grid of subareas (see
//! [`partition`]) and an independent GA improves the placement of each
//! subarea's nodes. A chromosome is one candidate placement of the subarea's
//! nodes; its fitness is the fraction of the subarea covered by the union of
//! their disks, clipped to the subarea.
//!
//! Each generation builds an offspring pool the size of the population from
//! tournament-of-three roulette selection, two-point crossover and coordinate
//! resampling mutation. Parents and offspring are merged, sorted by fitness
//! and truncated back to the population size, so the top chromosomes are
//! carried over unconditionally and the best fitness never decreases.

mod chromosome;
mod operators;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use chromosome::{Chromosome, Gene, SubareaEvaluator};
pub use operators::{crossover, crossover_at, mutate, select_parents};

use crate::coverage::{total_fitness, union_coverage, CoverageReport, SubareaCoverage};
use crate::deploy::Seed;
use crate::error::{Error, Result};
use crate::geometry::{partition, Deployment, Field, Rect, Sensor, SubareaGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaParams {
    pub population_size: usize,
    pub crossover_rate: f64,
    /// Per-gene probability of resampling its coordinates.
    pub mutation_rate: f64,
    pub elite_fraction: f64,
    /// Stop once the best fitness changes by less than this between generations.
    pub epsilon_stop: f64,
    /// Consecutive below-epsilon generations required before stopping.
    pub stall_generations: usize,
    pub max_generations: usize,
    pub target_per_subarea: usize,
    /// Fitness grid resolution as a fraction of the sensing radius.
    pub resolution_factor: f64,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            population_size: 100,
            crossover_rate: 0.85,
            mutation_rate: 0.05,
            elite_fraction: 0.01,
            epsilon_stop: 0.001,
            stall_generations: 10,
            max_generations: 50,
            target_per_subarea: 50,
            resolution_factor: crate::coverage::DEFAULT_RESOLUTION_FACTOR,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{name} must lie in [0, 1], got {v}")))
            }
        };
        prob("crossover_rate", self.crossover_rate)?;
        prob("mutation_rate", self.mutation_rate)?;
        prob("elite_fraction", self.elite_fraction)?;
        if self.population_size < 4 {
            return Err(Error::InvalidArgument(format!(
                "population_size must be at least 4, got {}",
                self.population_size
            )));
        }
        if self.stall_generations < 1 {
            return Err(Error::InvalidArgument("stall_generations must be at least 1".into()));
        }
        if self.max_generations < 1 {
            return Err(Error::InvalidArgument("max_generations must be at least 1".into()));
        }
        if self.target_per_subarea < 1 {
            return Err(Error::InvalidArgument("target_per_subarea must be at least 1".into()));
        }
        if !(self.epsilon_stop >= 0.0) {
            return Err(Error::InvalidArgument("epsilon_stop must be non-negative".into()));
        }
        if !(self.resolution_factor > 0.0 && self.resolution_factor <= crate::coverage::MAX_RESOLUTION_FACTOR) {
            return Err(Error::InvalidArgument(format!(
                "resolution_factor must lie in (0, {}], got {}",
                crate::coverage::MAX_RESOLUTION_FACTOR,
                self.resolution_factor
            )));
        }
        Ok(())
    }

    /// Number of chromosomes carried over unconditionally: `max(1, round(elite_fraction · population))`.
    pub fn elite_count(&self) -> usize {
        ((self.elite_fraction * self.population_size as f64).round() as usize)
            .max(1)
            .min(self.population_size)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    /// Best fitness changed by less than `epsilon_stop`.
    Converged,
    MaxGenerations,
}

/// Per-generation statistics; record 0 describes the initial population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaHistory {
    pub records: Vec<GenerationRecord>,
    pub termination: Termination,
}

impl GaHistory {
    /// Generations evolved after the initial population.
    pub fn generations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn initial_mean(&self) -> f64 {
        self.records[0].mean
    }

    pub fn final_best(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.best)
    }

    pub fn best_is_non_decreasing(&self) -> bool {
        self.records.windows(2).all(|w| w[1].best >= w[0].best)
    }
}

/// One subarea's optimisation problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubareaProblem {
    pub subarea: Rect,
    pub quota: usize,
    pub r_s: f64,
    /// Id of the first node; gene `k` carries `first_id + k`.
    pub first_id: u32,
}

impl SubareaProblem {
    pub fn new(subarea: Rect, quota: usize, r_s: f64) -> Self {
        SubareaProblem {
            subarea,
            quota,
            r_s,
            first_id: 1,
        }
    }
}

/// `population_size` independent uniform placements, all evaluated.
pub fn init_population<R: Rng + ?Sized>(
    problem: &SubareaProblem,
    params: &GaParams,
    evaluator: &mut SubareaEvaluator,
    rng: &mut R,
) -> Vec<Chromosome> {
    (0..params.population_size)
        .map(|_| {
            let mut c = Chromosome::random(&problem.subarea, problem.quota, problem.first_id, problem.r_s, rng);
            evaluator.evaluate(&mut c);
            c
        })
        .collect()
}

fn record(generation: usize, pop: &[Chromosome]) -> GenerationRecord {
    let best = pop.iter().map(Chromosome::score).fold(f64::NEG_INFINITY, f64::max);
    let mean = pop.iter().map(Chromosome::score).sum::<f64>() / pop.len() as f64;
    GenerationRecord { generation, best, mean }
}

/// Runs the GA on one subarea. Returns the best chromosome and the history.
pub fn evolve(problem: &SubareaProblem, params: &GaParams, seed: Seed) -> Result<(Chromosome, GaHistory)> {
    evolve_with_rng(problem, params, &mut seed.rng())
}

pub fn evolve_with_rng<R: Rng + ?Sized>(
    problem: &SubareaProblem,
    params: &GaParams,
    rng: &mut R,
) -> Result<(Chromosome, GaHistory)> {
    params.validate()?;
    if problem.quota < 1 {
        return Err(Error::InvalidArgument("subarea quota must be at least 1".into()));
    }
    let resolution = problem.r_s * params.resolution_factor;
    let mut evaluator = SubareaEvaluator::new(problem.subarea, problem.r_s, resolution)?;
    let mut pop = init_population(problem, params, &mut evaluator, rng);
    sort_by_fitness(&mut pop);

    let pop_size = params.population_size;
    let elites = params.elite_count();
    let mut records = vec![record(0, &pop)];
    let mut termination = Termination::MaxGenerations;
    let mut stalled = 0;

    for generation in 1..=params.max_generations {
        let mut offspring = Vec::with_capacity(pop_size);
        while offspring.len() < pop_size {
            let (ia, ib) = select_parents(&pop, rng);
            let (mut c1, mut c2) = if rng.gen::<f64>() < params.crossover_rate {
                crossover(&pop[ia], &pop[ib], rng)
            } else {
                (pop[ia].clone(), pop[ib].clone())
            };
            mutate(&mut c1, params.mutation_rate, &problem.subarea, problem.r_s, rng);
            mutate(&mut c2, params.mutation_rate, &problem.subarea, problem.r_s, rng);
            offspring.push(c1);
            if offspring.len() < pop_size {
                offspring.push(c2);
            }
        }
        for c in &mut offspring {
            evaluator.evaluate(c);
        }

        // Parents first so ties keep the incumbent; the stable sort then
        // leaves the elites at the head of the merged pool.
        let mut merged = std::mem::take(&mut pop);
        merged.extend(offspring);
        sort_by_fitness(&mut merged);
        let rest = merged.split_off(elites);
        pop = merged;
        pop.extend(rest.into_iter().take(pop_size - elites));

        let prev_best = records.last().map_or(0.0, |r| r.best);
        let rec = record(generation, &pop);
        records.push(rec);
        if (rec.best - prev_best).abs() < params.epsilon_stop {
            stalled += 1;
            if stalled >= params.stall_generations {
                termination = Termination::Converged;
                break;
            }
        } else {
            stalled = 0;
        }
    }

    let best = pop.swap_remove(0);
    Ok((best, GaHistory { records, termination }))
}

fn sort_by_fitness(pop: &mut [Chromosome]) {
    pop.sort_by(|a, b| b.score().total_cmp(&a.score()));
}

/// Result of optimising a whole field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldOptimization {
    pub deployment: Deployment,
    pub partition: SubareaGrid,
    /// Union coverage of the merged deployment, with the per-subarea GA fitness.
    pub report: CoverageReport,
    /// Area-weighted sum of the per-subarea fitness.
    pub total_fitness: f64,
    pub histories: Vec<GaHistory>,
}

impl FieldOptimization {
    /// Area-weighted mean fitness of the initial populations.
    pub fn initial_mean_fitness(&self) -> f64 {
        let area = self.deployment.field().area();
        self.partition
            .cells
            .iter()
            .zip(&self.histories)
            .map(|(c, h)| c.area() * h.initial_mean())
            .sum::<f64>()
            / area
    }

    pub fn coverage(&self) -> f64 {
        self.report.union_fraction
    }

    /// Largest generation count over the subareas.
    pub fn generations(&self) -> usize {
        self.histories.iter().map(GaHistory::generations).max().unwrap_or(0)
    }
}

/// Partitions the field, evolves every subarea independently and merges the
/// best chromosomes.
///
/// Subarea `k` draws from stream `k` of the master seed, so the outcome does
/// not depend on how the subareas are scheduled across threads.
pub fn optimize_field(field: &Field, n: usize, r_s: f64, params: &GaParams, seed: Seed) -> Result<FieldOptimization> {
    params.validate()?;
    if n < 1 {
        return Err(Error::InvalidArgument("optimize_field needs at least one node".into()));
    }
    if !(r_s > 0.0) {
        return Err(Error::InvalidArgument(format!("sensing radius must be positive, got {r_s}")));
    }
    let grid = partition(field, n, params.target_per_subarea)?;
    let mut problems = Vec::with_capacity(grid.len());
    let mut next_id = 1u32;
    for (cell, &quota) in grid.cells.iter().zip(&grid.node_quota) {
        problems.push(SubareaProblem {
            subarea: *cell,
            quota,
            r_s,
            first_id: next_id,
        });
        next_id += quota as u32;
    }

    let results: Vec<(Chromosome, GaHistory)> = problems
        .par_iter()
        .enumerate()
        .map(|(k, p)| evolve_with_rng(p, params, &mut seed.stream(k as u64)))
        .collect::<Result<_>>()?;

    let sensors: Vec<Sensor> = results
        .iter()
        .flat_map(|(c, _)| c.genes().iter().map(|g| Sensor::new(g.id, g.pos(), r_s)))
        .collect();
    let deployment = Deployment::new(*field, sensors)?;

    let per_subarea: Vec<SubareaCoverage> = grid
        .cells
        .iter()
        .zip(&results)
        .enumerate()
        .map(|(index, (cell, (c, _)))| SubareaCoverage {
            index,
            coverage: c.score(),
            area: cell.area(),
        })
        .collect();
    let pairs: Vec<(f64, f64)> = per_subarea.iter().map(|s| (s.coverage, s.area)).collect();
    let total = total_fitness(&pairs, field)?;

    let mut report = union_coverage(&deployment, r_s * params.resolution_factor)?;
    report.per_subarea = per_subarea;

    Ok(FieldOptimization {
        deployment,
        partition: grid,
        report,
        total_fitness: total,
        histories: results.into_iter().map(|(_, h)| h).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::expected_random_coverage;
    use std::f64::consts::PI;

    fn small_params() -> GaParams {
        GaParams {
            population_size: 20,
            max_generations: 15,
            ..GaParams::default()
        }
    }

    #[test]
    fn params_validation() {
        assert!(GaParams::default().validate().is_ok());
        assert_eq!(GaParams::default().elite_count(), 1);
        let bad = GaParams {
            population_size: 3,
            ..GaParams::default()
        };
        assert!(bad.validate().is_err());
        let bad = GaParams {
            crossover_rate: 1.5,
            ..GaParams::default()
        };
        assert!(bad.validate().is_err());
        let bad = GaParams {
            max_generations: 0,
            ..GaParams::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn init_population_single_gene() {
        let p = SubareaProblem::new(Rect::new(0.0, 0.0, 40.0, 30.0), 1, 5.0);
        let params = GaParams::default();
        let mut ev = SubareaEvaluator::new(p.subarea, 5.0, 0.5).unwrap();
        let pop = init_population(&p, &params, &mut ev, &mut Seed(1).rng());
        assert_eq!(pop.len(), 100);
        for c in &pop {
            assert_eq!(c.len(), 1);
            assert!(p.subarea.contains(c.genes()[0].pos()));
            assert!(c.fitness().is_some());
        }
        let again = init_population(&p, &params, &mut ev, &mut Seed(1).rng());
        assert_eq!(pop, again);
    }

    #[test]
    fn init_population_matches_random_coverage() {
        // One default-sized subarea: 113×113 split in 12 cells holds ~49 nodes.
        let cell = Rect::new(0.0, 0.0, 113.0 / 4.0, 113.0 / 3.0);
        let quota = 50;
        let p = SubareaProblem::new(cell, quota, 5.0);
        let mut ev = SubareaEvaluator::new(cell, 5.0, 0.5).unwrap();
        let pop = init_population(&p, &GaParams::default(), &mut ev, &mut Seed(3).rng());
        let mean = pop.iter().map(|c| c.fitness().unwrap()).sum::<f64>() / pop.len() as f64;
        let expected = expected_random_coverage(quota as f64 / cell.area(), 5.0).unwrap();
        // Disks hanging over the subarea edge lose area, so the clipped
        // coverage sits a little below the Poisson value.
        assert!((mean - expected).abs() < 0.03, "mean {mean} expected {expected}");
    }

    #[test]
    fn evolve_single_node_finds_interior_placement() {
        let cell = Rect::new(0.0, 0.0, 30.0, 30.0);
        let p = SubareaProblem::new(cell, 1, 5.0);
        let (best, hist) = evolve(&p, &GaParams::default(), Seed(11)).unwrap();
        let optimum = 25.0 * PI / cell.area();
        assert!((best.fitness().unwrap() - optimum).abs() < 0.005, "{}", best.fitness().unwrap());
        assert!(hist.best_is_non_decreasing());
    }

    #[test]
    fn evolve_saturated_subarea() {
        let cell = Rect::new(0.0, 0.0, 30.0, 20.0);
        // quota·πr² >= 4·area
        let quota = (4.0 * cell.area() / (25.0 * PI)).ceil() as usize;
        let p = SubareaProblem::new(cell, quota, 5.0);
        let (best, _) = evolve(&p, &small_params(), Seed(5)).unwrap();
        assert!(best.fitness().unwrap() >= 0.99);
    }

    #[test]
    fn evolve_is_deterministic_and_elitist() {
        let p = SubareaProblem::new(Rect::new(0.0, 0.0, 40.0, 40.0), 20, 5.0);
        let a = evolve(&p, &small_params(), Seed(9)).unwrap();
        let b = evolve(&p, &small_params(), Seed(9)).unwrap();
        assert_eq!(a, b);
        assert!(a.1.best_is_non_decreasing());
        assert_eq!(a.1.records[0].generation, 0);
        for g in a.0.genes() {
            assert!(p.subarea.contains(g.pos()));
        }
    }

    #[test]
    fn evolve_stops_on_small_change() {
        let p = SubareaProblem::new(Rect::new(0.0, 0.0, 40.0, 40.0), 20, 5.0);
        let params = GaParams {
            epsilon_stop: 1.0,
            stall_generations: 1,
            ..small_params()
        };
        let (_, h) = evolve(&p, &params, Seed(1)).unwrap();
        assert_eq!(h.generations(), 1);
        assert_eq!(h.termination, Termination::Converged);

        let params = GaParams {
            epsilon_stop: 1.0,
            stall_generations: 3,
            ..small_params()
        };
        let (_, h) = evolve(&p, &params, Seed(1)).unwrap();
        assert_eq!(h.generations(), 3);

        let params = GaParams {
            epsilon_stop: 0.0,
            max_generations: 4,
            ..small_params()
        };
        let (_, h) = evolve(&p, &params, Seed(1)).unwrap();
        assert_eq!(h.generations(), 4);
        assert_eq!(h.termination, Termination::MaxGenerations);
    }

    #[test]
    fn optimize_single_node() {
        let field = Field::centered(113.0, 113.0).unwrap();
        let out = optimize_field(&field, 1, 5.0, &GaParams::default(), Seed(2)).unwrap();
        assert_eq!(out.partition.len(), 1);
        assert_eq!(out.deployment.len(), 1);
        assert!((out.coverage() - 25.0 * PI / field.area()).abs() < 5e-4);
    }

    #[test]
    fn optimize_merges_ids_and_matches_total() {
        let field = Field::centered(113.0, 113.0).unwrap();
        let params = small_params();
        let out = optimize_field(&field, 130, 5.0, &params, Seed(4)).unwrap();
        assert_eq!(out.partition.len(), 3);
        assert_eq!(out.deployment.len(), 130);
        for (k, s) in out.deployment.sensors().iter().enumerate() {
            assert_eq!(s.id as usize, k + 1);
        }
        assert!((out.total_fitness - out.coverage()).abs() < 0.01);
    }

    #[test]
    fn optimize_is_independent_of_thread_count() {
        let field = Field::centered(113.0, 113.0).unwrap();
        let params = small_params();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| optimize_field(&field, 260, 5.0, &params, Seed(21)).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn optimize_rejects_zero_nodes() {
        let field = Field::centered(113.0, 113.0).unwrap();
        assert!(optimize_field(&field, 0, 5.0, &GaParams::default(), Seed(1)).is_err());
    }
}
