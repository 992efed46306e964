//! Sweeps over node counts and seeds, comparison with the published tables,
//! and CSV / SVG output.

pub mod config;
pub mod csv_io;
pub mod reference;
pub mod svg;
pub mod sweep;

pub use config::{ExperimentConfig, Strategies, Strategy, SCHEMA_VERSION};
pub use csv_io::{emit_csv, read_csv, HEADER};
pub use reference::{compare_to_reference, ComparisonReport, ReferenceTable, GAUSSIAN_TABLE, GA_TABLE};
pub use svg::{deployment_snapshot, emit_plot, plot_series, plot_svg, snapshot_svg};
pub use sweep::{collect_sweep, deploy_with, run_sweep, run_sweep_to, Summary, SweepResult, SweepRow};
