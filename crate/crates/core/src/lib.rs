//! Sensor coverage in a rectangular field: coverage measures, random
//! deployers, a subarea-partitioned genetic algorithm, movement baselines and
//! an experiment harness.
//!
//! ```
//! use coverage_lab::coverage::union_coverage;
//! use coverage_lab::deploy::Seed;
//! use coverage_lab::ga::{optimize_field, GaParams};
//! use coverage_lab::geometry::Field;
//!
//! let field = Field::centered(60.0, 60.0)?;
//! let params = GaParams { population_size: 20, max_generations: 5, ..GaParams::default() };
//! let opt = optimize_field(&field, 40, 5.0, &params, Seed(1))?;
//! let report = union_coverage(&opt.deployment, 0.5)?;
//! assert_eq!(report.union_fraction, opt.coverage());
//! # Ok::<(), coverage_lab::error::Error>(())
//! ```
//!
//! The guide in `book/` walks through each module; its snippets run as doctests.

pub mod baselines;
pub mod coverage;
pub mod deploy;
pub mod error;
pub mod experiment;
pub mod ga;
pub mod geometry;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/coverage.md")]
    mod coverage {}
    #[doc = include_str!("../../../book/src/deployers.md")]
    mod deployers {}
    #[doc = include_str!("../../../book/src/genetic-algorithm.md")]
    mod genetic_algorithm {}
    #[doc = include_str!("../../../book/src/baselines.md")]
    mod baselines {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/config-schema.md")]
    mod config_schema {}
}
