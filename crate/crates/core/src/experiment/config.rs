//! JSON experiment description.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::DssParams;
use crate::coverage::{check_resolution, default_resolution};
use crate::deploy::GaussianParams;
use crate::error::{Error, Result};
use crate::ga::GaParams;
use crate::geometry::{Field, Point};

pub const SCHEMA_VERSION: u32 = 1;

/// Default field side, chosen so that 50 disjoint disks of radius 5 cover about 31%.
pub const DEFAULT_FIELD_SIDE: f64 = 113.0;
pub const DEFAULT_SENSING_RADIUS: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Bidding,
    Dss,
    Ga,
    Gaussian,
    Uniform,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Bidding,
        Strategy::Dss,
        Strategy::Ga,
        Strategy::Gaussian,
        Strategy::Uniform,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Bidding => "bidding",
            Strategy::Dss => "dss",
            Strategy::Ga => "ga",
            Strategy::Gaussian => "gaussian",
            Strategy::Uniform => "uniform",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown strategy {s:?}")))
    }
}

/// `"strategy": "ga"` or `"strategy": ["ga", "gaussian"]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Strategies {
    One(Strategy),
    Many(Vec<Strategy>),
}

impl Strategies {
    /// Sorted and deduplicated.
    pub fn to_vec(&self) -> Vec<Strategy> {
        let mut v = match self {
            Strategies::One(s) => vec![*s],
            Strategies::Many(v) => v.clone(),
        };
        v.sort();
        v.dedup();
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub width: f64,
    pub height: f64,
    /// Defaults to the field centre.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_station: Option<[f64; 2]>,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig {
            width: DEFAULT_FIELD_SIDE,
            height: DEFAULT_FIELD_SIDE,
            base_station: None,
        }
    }
}

impl FieldConfig {
    pub fn to_field(&self) -> Result<Field> {
        match self.base_station {
            None => Field::centered(self.width, self.height),
            Some([x, y]) => Field::new(self.width, self.height, Point::new(x, y)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianConfig {
    pub sigma_x: f64,
    pub sigma_y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BiddingConfig {
    /// Share of the `n` nodes that are mobile; the rest stay where they were dropped.
    pub mobile_fraction: f64,
    pub max_rounds: usize,
}

impl Default for BiddingConfig {
    fn default() -> Self {
        BiddingConfig {
            mobile_fraction: 0.2,
            max_rounds: 50,
        }
    }
}

impl BiddingConfig {
    /// `(static, mobile)` split of `n` nodes. At least one static node is kept.
    pub fn split(&self, n: usize) -> (usize, usize) {
        let mobile = ((n as f64 * self.mobile_fraction).round() as usize).min(n.saturating_sub(1));
        (n - mobile, mobile)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "OutputConfig::default_dir")]
    pub dir: PathBuf,
    #[serde(default = "OutputConfig::default_csv")]
    pub csv: PathBuf,
    #[serde(default = "OutputConfig::default_plot")]
    pub plot: PathBuf,
}

impl OutputConfig {
    fn default_dir() -> PathBuf {
        PathBuf::from("out")
    }

    fn default_csv() -> PathBuf {
        PathBuf::from("sweep.csv")
    }

    fn default_plot() -> PathBuf {
        PathBuf::from("sweep.svg")
    }

    pub fn csv_path(&self) -> PathBuf {
        self.dir.join(&self.csv)
    }

    pub fn plot_path(&self) -> PathBuf {
        self.dir.join(&self.plot)
    }
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: Self::default_dir(),
            csv: Self::default_csv(),
            plot: Self::default_plot(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub field: FieldConfig,
    #[serde(default = "default_radius")]
    pub sensing_radius: f64,
    pub strategy: Strategies,
    pub node_counts: Vec<usize>,
    pub seeds: Vec<u64>,
    /// Coverage grid spacing; `r_s / 10` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<f64>,
    #[serde(default)]
    pub ga: GaParams,
    /// Spread of the Gaussian deployer; a quarter of the field when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gaussian: Option<GaussianConfig>,
    #[serde(default)]
    pub bidding: BiddingConfig,
    /// Self-spreading parameters; scaled from the sensing radius when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dss: Option<DssParams>,
    #[serde(default)]
    pub output: OutputConfig,
    /// Fill the `wall_ms` column. Off by default so that CSV bytes depend only on the config.
    #[serde(default)]
    pub record_timing: bool,
}

fn default_radius() -> f64 {
    DEFAULT_SENSING_RADIUS
}

impl ExperimentConfig {
    /// Default field and radius for one strategy, one node count and one seed.
    pub fn single(strategy: Strategy, n: usize, seed: u64) -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            field: FieldConfig::default(),
            sensing_radius: DEFAULT_SENSING_RADIUS,
            strategy: Strategies::One(strategy),
            node_counts: vec![n],
            seeds: vec![seed],
            resolution: None,
            ga: GaParams::default(),
            gaussian: None,
            bidding: BiddingConfig::default(),
            dss: None,
            output: OutputConfig::default(),
            record_timing: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        // An unreadable config is reported as a config problem, not a runtime one.
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn strategies(&self) -> Vec<Strategy> {
        self.strategy.to_vec()
    }

    pub fn field(&self) -> Result<Field> {
        self.field.to_field().map_err(|e| Error::Config(e.to_string()))
    }

    pub fn resolution(&self) -> f64 {
        self.resolution.unwrap_or_else(|| default_resolution(self.sensing_radius))
    }

    pub fn gaussian_params(&self) -> Result<GaussianParams> {
        match self.gaussian {
            Some(g) => GaussianParams::new(g.sigma_x, g.sigma_y),
            None => Ok(GaussianParams::for_field(&self.field()?)),
        }
    }

    pub fn dss_params(&self) -> DssParams {
        self.dss.unwrap_or_else(|| DssParams::for_radius(self.sensing_radius))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        self.field()?;
        if !(self.sensing_radius > 0.0 && self.sensing_radius.is_finite()) {
            return bad(format!("sensing_radius must be positive, got {}", self.sensing_radius));
        }
        if self.strategies().is_empty() {
            return bad("strategy list is empty".into());
        }
        if self.node_counts.is_empty() {
            return bad("node_counts is empty".into());
        }
        if self.node_counts.contains(&0) {
            return bad("node_counts must be positive".into());
        }
        if self.seeds.is_empty() {
            return bad("seeds is empty".into());
        }
        check_resolution(self.resolution(), self.sensing_radius).map_err(|e| Error::Config(e.to_string()))?;
        self.ga.validate().map_err(|e| Error::Config(format!("ga: {e}")))?;
        self.gaussian_params().map_err(|e| Error::Config(format!("gaussian: {e}")))?;
        self.dss_params().validate().map_err(|e| Error::Config(format!("dss: {e}")))?;
        let b = self.bidding;
        if !(b.mobile_fraction > 0.0 && b.mobile_fraction < 1.0) || b.max_rounds == 0 {
            return bad(format!(
                "bidding: mobile_fraction must lie in (0, 1) and max_rounds be positive, got {b:?}"
            ));
        }
        if self.strategies().contains(&Strategy::Bidding) && self.node_counts.iter().any(|&n| n < 2) {
            return bad("bidding needs at least two nodes per run".into());
        }
        if self.strategies().contains(&Strategy::Dss) && self.node_counts.iter().any(|&n| n < 2) {
            return bad("dss needs at least two nodes per run".into());
        }
        Ok(())
    }
}
