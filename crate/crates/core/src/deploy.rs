//! Seeded baseline deployments: uniform-random and 2D Gaussian around the base station.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Deployment, Field, Point, Rect};

/// Master seed for a reproducible run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Independent stream `index` derived from this seed.
    pub fn stream(self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(index);
        rng
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    pub sigma_x: f64,
    pub sigma_y: f64,
}

impl GaussianParams {
    pub fn new(sigma_x: f64, sigma_y: f64) -> Result<Self> {
        if !(sigma_x > 0.0 && sigma_y > 0.0 && sigma_x.is_finite() && sigma_y.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "gaussian sigmas must be positive, got ({sigma_x}, {sigma_y})"
            )));
        }
        Ok(GaussianParams { sigma_x, sigma_y })
    }

    /// A quarter of the field's extent along each axis.
    pub fn for_field(field: &Field) -> Self {
        GaussianParams {
            sigma_x: field.width() / 4.0,
            sigma_y: field.height() / 4.0,
        }
    }
}

/// Uniform point in a rectangle.
pub(crate) fn uniform_point<R: Rng + ?Sized>(rect: &Rect, rng: &mut R) -> Point {
    Point::new(
        rect.x0 + rng.gen::<f64>() * rect.width(),
        rect.y0 + rng.gen::<f64>() * rect.height(),
    )
}

pub fn uniform_positions<R: Rng + ?Sized>(rect: &Rect, n: usize, rng: &mut R) -> Vec<Point> {
    (0..n).map(|_| uniform_point(rect, rng)).collect()
}

/// `n` sensors placed i.i.d. uniformly over the field, ids `1..=n`.
pub fn deploy_uniform(field: &Field, n: usize, r_s: f64, seed: Seed) -> Result<Deployment> {
    let mut rng = seed.rng();
    let pts = uniform_positions(&field.rect(), n, &mut rng);
    Deployment::from_positions(*field, &pts, r_s)
}

/// Attempts before the acceptance rate is judged.
const MIN_ATTEMPTS_BEFORE_GIVING_UP: u64 = 1000;
const MIN_ACCEPTANCE_RATE: f64 = 0.01;

/// `n` sensors drawn from an axis-aligned bivariate normal centred on the base
/// station. Samples falling outside the field are rejected and redrawn.
pub fn deploy_gaussian(field: &Field, n: usize, r_s: f64, params: GaussianParams, seed: Seed) -> Result<Deployment> {
    let params = GaussianParams::new(params.sigma_x, params.sigma_y)?;
    let bs = field.base_station();
    let nx = Normal::new(bs.x, params.sigma_x).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let ny = Normal::new(bs.y, params.sigma_y).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = seed.rng();
    let mut pts = Vec::with_capacity(n);
    let mut attempts = 0u64;
    while pts.len() < n {
        attempts += 1;
        let p = Point::new(nx.sample(&mut rng), ny.sample(&mut rng));
        if field.contains(p) {
            pts.push(p);
        } else if attempts >= MIN_ATTEMPTS_BEFORE_GIVING_UP {
            let rate = pts.len() as f64 / attempts as f64;
            if rate < MIN_ACCEPTANCE_RATE {
                return Err(Error::DegenerateGaussian { rate });
            }
        }
    }
    Deployment::from_positions(*field, &pts, r_s)
}
