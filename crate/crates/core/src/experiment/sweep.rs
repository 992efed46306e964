//! Running every (strategy, n, seed) cell of a config.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::path::Path;
use std::sync::mpsc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Strategy};
use super::csv_io::RowWriter;
use crate::baselines::{dss_run, mobiles_after, run_bidding};
use crate::coverage::union_coverage;
use crate::deploy::{deploy_gaussian, deploy_uniform, uniform_positions, Seed};
use crate::error::{Error, Result};
use crate::ga::optimize_field;
use crate::geometry::Deployment;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub strategy: Strategy,
    pub n: usize,
    pub seed: u64,
    /// Union coverage fraction in `[0, 1]`.
    pub coverage: f64,
    /// GA generations, bidding rounds or DSS iterations; 0 for one-shot deployers.
    pub steps: usize,
    /// Only filled when timing is requested.
    pub wall_ms: Option<u64>,
}

/// Mean, sample standard deviation and count of one group of rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        let std = if count > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
        } else {
            0.0
        };
        Some(Summary { mean, std, count })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn new(mut rows: Vec<SweepRow>) -> Self {
        rows.sort_by_key(|r| (r.strategy, r.n, r.seed));
        SweepResult { rows }
    }

    pub fn strategies(&self) -> Vec<Strategy> {
        self.rows.iter().map(|r| r.strategy).collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// Per-n coverage summary for one strategy, in ascending n.
    pub fn summary(&self, strategy: Strategy) -> BTreeMap<usize, Summary> {
        let mut groups: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for r in self.rows.iter().filter(|r| r.strategy == strategy) {
            groups.entry(r.n).or_default().push(r.coverage);
        }
        groups
            .into_iter()
            .filter_map(|(n, v)| Summary::of(&v).map(|s| (n, s)))
            .collect()
    }
}

/// One cell of the sweep, in the order rows are written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Job {
    pub strategy: Strategy,
    pub n: usize,
    pub seed: u64,
}

pub fn jobs(config: &ExperimentConfig) -> Vec<Job> {
    let counts: BTreeSet<usize> = config.node_counts.iter().copied().collect();
    let seeds: BTreeSet<u64> = config.seeds.iter().copied().collect();
    let mut out = Vec::new();
    for strategy in config.strategies() {
        for &n in &counts {
            for &seed in &seeds {
                out.push(Job { strategy, n, seed });
            }
        }
    }
    out
}

/// Deployment produced by one strategy, plus its step count.
pub fn deploy_with(config: &ExperimentConfig, strategy: Strategy, n: usize, seed: Seed) -> Result<(Deployment, usize)> {
    let field = config.field()?;
    let r_s = config.sensing_radius;
    match strategy {
        Strategy::Uniform => Ok((deploy_uniform(&field, n, r_s, seed)?, 0)),
        Strategy::Gaussian => Ok((deploy_gaussian(&field, n, r_s, config.gaussian_params()?, seed)?, 0)),
        Strategy::Ga => {
            let opt = optimize_field(&field, n, r_s, &config.ga, seed)?;
            let steps = opt.generations();
            Ok((opt.deployment, steps))
        }
        Strategy::Bidding => {
            let (n_static, n_mobile) = config.bidding.split(n);
            let statics = deploy_uniform(&field, n_static, r_s, Seed(seed.0))?;
            let mut rng = seed.stream(1);
            let mobiles = mobiles_after(&statics, &uniform_positions(&field.rect(), n_mobile, &mut rng), r_s);
            let out = run_bidding(&statics, mobiles, config.bidding.max_rounds)?;
            Ok((out.deployment, out.rounds.len()))
        }
        Strategy::Dss => {
            let start = deploy_uniform(&field, n, r_s, seed)?;
            let out = dss_run(&start, &config.dss_params(), seed)?;
            Ok((out.deployment, out.iterations))
        }
    }
}

pub fn run_job(config: &ExperimentConfig, job: Job) -> Result<SweepRow> {
    let start = Instant::now();
    let (dep, steps) = deploy_with(config, job.strategy, job.n, Seed(job.seed))?;
    let coverage = union_coverage(&dep, config.resolution())?.union_fraction;
    let wall_ms = config.record_timing.then(|| start.elapsed().as_millis() as u64);
    Ok(SweepRow {
        strategy: job.strategy,
        n: job.n,
        seed: job.seed,
        coverage,
        steps,
        wall_ms,
    })
}

/// Runs the sweep on at most `jobs` threads, streaming rows to `csv_path` in
/// job order. The file is created before any work starts.
pub fn run_sweep_to(config: &ExperimentConfig, csv_path: &Path, threads: usize) -> Result<SweepResult> {
    config.validate()?;
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(csv_path).map_err(|e| Error::io(csv_path, e))?;
    let mut writer = RowWriter::new(file, csv_path)?;

    let all = jobs(config);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let (tx, rx) = mpsc::channel::<(usize, Result<SweepRow>)>();

    std::thread::scope(|s| {
        let consumer = s.spawn(move || -> Result<Vec<SweepRow>> {
            let mut pending = BTreeMap::new();
            let mut next = 0;
            let mut rows = Vec::new();
            let mut failure = None;
            for (k, row) in rx {
                pending.insert(k, row);
                while let Some(row) = pending.remove(&next) {
                    next += 1;
                    match row {
                        Ok(row) if failure.is_none() => {
                            writer.write(&row)?;
                            rows.push(row);
                        }
                        Ok(_) => {}
                        Err(e) => {
                            failure.get_or_insert(e);
                        }
                    }
                }
            }
            match failure {
                Some(e) => Err(e),
                None => Ok(rows),
            }
        });
        pool.install(|| {
            all.par_iter().enumerate().for_each_with(tx, |tx, (k, &job)| {
                let _ = tx.send((k, run_job(config, job)));
            });
        });
        let rows = consumer.join().expect("csv writer thread panicked")?;
        Ok(SweepResult { rows })
    })
}

/// Runs the sweep into the config's output CSV.
pub fn run_sweep(config: &ExperimentConfig, threads: usize) -> Result<SweepResult> {
    run_sweep_to(config, &config.output.csv_path(), threads)
}

/// Runs the sweep in memory without writing anything.
pub fn collect_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    config.validate()?;
    let rows = jobs(config)
        .par_iter()
        .map(|&job| run_job(config, job))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::expected_random_coverage;
    use crate::experiment::config::Strategies;

    #[test]
    fn jobs_are_sorted_and_deduplicated() {
        let mut c = ExperimentConfig::single(Strategy::Uniform, 20, 3);
        c.strategy = Strategies::Many(vec![Strategy::Uniform, Strategy::Gaussian]);
        c.node_counts = vec![30, 20, 30];
        c.seeds = vec![2, 1];
        let j = jobs(&c);
        assert_eq!(j.len(), 8);
        assert!(j.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(j[0], Job { strategy: Strategy::Gaussian, n: 20, seed: 1 });
    }

    #[test]
    fn uniform_row_matches_random_density_prediction() {
        let c = ExperimentConfig::single(Strategy::Uniform, 50, 1);
        let out = collect_sweep(&c).unwrap();
        assert_eq!(out.rows.len(), 1);
        let lambda = 50.0 / (113.0 * 113.0);
        let expected = expected_random_coverage(lambda, 5.0).unwrap();
        assert!((out.rows[0].coverage - expected).abs() < 0.05);
        assert_eq!(out.rows[0].steps, 0);
        assert_eq!(out.rows[0].wall_ms, None);
    }

    #[test]
    fn every_strategy_runs() {
        for s in Strategy::ALL {
            let mut c = ExperimentConfig::single(s, 20, 5);
            c.ga.population_size = 10;
            c.ga.max_generations = 3;
            let row = run_job(&c, jobs(&c)[0]).unwrap();
            assert!((0.0..=1.0).contains(&row.coverage), "{s}");
            assert_eq!(row.n, 20);
        }
    }

    #[test]
    fn summary_statistics() {
        let s = Summary::of(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.std, 1.0);
        assert_eq!(Summary::of(&[4.0]).unwrap().std, 0.0);
        assert!(Summary::of(&[]).is_none());
    }
}
