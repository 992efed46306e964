//! Distributed self-spreading: nodes push each other apart with a
//! density-weighted repulsion until the layout stops changing.

use serde::{Deserialize, Serialize};

use crate::deploy::Seed;
use crate::error::{Error, Result};
use crate::geometry::{Deployment, Point, Sensor};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DssParams {
    /// Neighbourhood radius `R_c`.
    pub comm_range: f64,
    /// Displacement length per unit of weighted repulsion.
    pub step_scale: f64,
    pub max_iters: usize,
    /// Number of past layouts checked for a repeat.
    pub oscillation_window: usize,
    /// Stop once no node moves farther than this in one iteration.
    pub min_displacement: f64,
}

impl DssParams {
    /// Defaults scaled to a sensing radius: `R_c = 2 r_s`.
    pub fn for_radius(r_s: f64) -> Self {
        DssParams {
            comm_range: 2.0 * r_s,
            step_scale: 0.02 * r_s,
            max_iters: 500,
            oscillation_window: 10,
            min_displacement: 1e-3 * r_s,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.comm_range > 0.0
            && self.step_scale > 0.0
            && self.max_iters > 0
            && self.oscillation_window > 0
            && self.min_displacement > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("DSS parameters must all be positive: {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DssTermination {
    Settled,
    Oscillating,
    MaxIters,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DssOutcome {
    pub deployment: Deployment,
    pub iterations: usize,
    pub termination: DssTermination,
}

/// Magnitude of the push node `i` receives from a neighbour at distance `d`,
/// given `i`'s local density. Zero outside the communication range.
pub fn repulsion(d: f64, density: usize, params: &DssParams) -> f64 {
    if d >= params.comm_range {
        return 0.0;
    }
    params.step_scale * density as f64 * (params.comm_range - d) / params.comm_range
}

/// Deterministic unit direction for a coincident pair `(i, j)`, `i < j`.
fn pair_direction(seed: Seed, i: usize, j: usize) -> Point {
    let mut z = seed.0 ^ ((i as u64) << 32 | j as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    let theta = (z >> 11) as f64 / (1u64 << 53) as f64 * std::f64::consts::TAU;
    Point::new(theta.cos(), theta.sin())
}

/// Runs the self-spreading iteration. Moves are synchronous and clamped to the field.
pub fn dss_run(dep: &Deployment, params: &DssParams, seed: Seed) -> Result<DssOutcome> {
    params.validate()?;
    if dep.len() < 2 {
        return Err(Error::InvalidArgument("self-spreading needs at least two nodes".into()));
    }
    let rect = dep.field().rect();
    let mut pos = dep.positions();
    let n = pos.len();
    let mut recent: Vec<Vec<Point>> = Vec::with_capacity(params.oscillation_window);
    let mut termination = DssTermination::MaxIters;
    let mut iterations = 0;

    while iterations < params.max_iters {
        iterations += 1;
        let density: Vec<usize> = (0..n)
            .map(|i| (0..n).filter(|&j| j != i && pos[i].dist(&pos[j]) < params.comm_range).count())
            .collect();
        let mut next = pos.clone();
        let mut max_move = 0.0f64;
        for i in 0..n {
            let (mut fx, mut fy) = (0.0, 0.0);
            for j in 0..n {
                if j == i {
                    continue;
                }
                let d = pos[i].dist(&pos[j]);
                let mag = repulsion(d, density[i], params);
                if mag == 0.0 {
                    continue;
                }
                let u = if d > 0.0 {
                    Point::new((pos[i].x - pos[j].x) / d, (pos[i].y - pos[j].y) / d)
                } else {
                    let dir = pair_direction(seed, i.min(j), i.max(j));
                    let s = if i < j { 1.0 } else { -1.0 };
                    Point::new(s * dir.x, s * dir.y)
                };
                fx += mag * u.x;
                fy += mag * u.y;
            }
            next[i] = rect.clamp(Point::new(pos[i].x + fx, pos[i].y + fy));
            max_move = max_move.max(next[i].dist(&pos[i]));
        }

        if max_move < params.min_displacement {
            termination = DssTermination::Settled;
            break;
        }
        if recent.contains(&next) {
            pos = next;
            termination = DssTermination::Oscillating;
            break;
        }
        if recent.len() == params.oscillation_window {
            recent.remove(0);
        }
        recent.push(pos);
        pos = next;
    }

    let sensors: Vec<Sensor> = dep
        .sensors()
        .iter()
        .zip(&pos)
        .map(|(s, &p)| Sensor::new(s.id, p, s.r_s))
        .collect();
    Ok(DssOutcome {
        deployment: Deployment::new(*dep.field(), sensors)?,
        iterations,
        termination,
    })
}

/// Standard deviation of each node's nearest-neighbour distance.
pub fn nearest_neighbour_spread(dep: &Deployment) -> f64 {
    let pos = dep.positions();
    let nn: Vec<f64> = (0..pos.len())
        .map(|i| {
            (0..pos.len())
                .filter(|&j| j != i)
                .map(|j| pos[i].dist(&pos[j]))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let mean = nn.iter().sum::<f64>() / nn.len() as f64;
    (nn.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / nn.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deploy::{deploy_gaussian, GaussianParams};
    use crate::geometry::Field;

    fn field100() -> Field {
        Field::centered(100.0, 100.0).unwrap()
    }

    #[test]
    fn coincident_pair_separates() {
        let f = field100();
        let c = Point::new(50.0, 50.0);
        let dep = Deployment::from_positions(f, &[c, c], 5.0).unwrap();
        let params = DssParams {
            max_iters: 1,
            ..DssParams::for_radius(5.0)
        };
        let mut prev = 0.0;
        let mut current = dep.clone();
        for _ in 0..40 {
            current = dss_run(&current, &params, Seed(1)).unwrap().deployment;
            let d = current.sensors()[0].pos.dist(&current.sensors()[1].pos);
            assert!(d > prev, "{d} <= {prev}");
            prev = d;
        }
        // The push fades as the gap approaches R_c, so the pair settles just short of it.
        let done = dss_run(&dep, &DssParams::for_radius(5.0), Seed(1)).unwrap();
        let d = done.deployment.sensors()[0].pos.dist(&done.deployment.sensors()[1].pos);
        assert!(d > 9.5 && d < 10.0, "{d}");
        assert_eq!(done.termination, DssTermination::Settled);

        // A step of R_c / 2 per unit closes the gap exactly.
        let params = DssParams {
            step_scale: 5.0,
            ..DssParams::for_radius(5.0)
        };
        let done = dss_run(&dep, &params, Seed(1)).unwrap();
        let d = done.deployment.sensors()[0].pos.dist(&done.deployment.sensors()[1].pos);
        assert!(d >= 10.0 - 1e-9, "{d}");
    }

    #[test]
    fn sparse_layout_does_not_move() {
        let f = field100();
        let pts = [Point::new(10.0, 10.0), Point::new(30.0, 10.0), Point::new(10.0, 30.0)];
        let dep = Deployment::from_positions(f, &pts, 5.0).unwrap();
        let out = dss_run(&dep, &DssParams::for_radius(5.0), Seed(1)).unwrap();
        assert_eq!(out.iterations, 1);
        assert_eq!(out.deployment, dep);
    }

    #[test]
    fn clustered_nodes_spread_more_evenly() {
        let f = field100();
        let dep = deploy_gaussian(&f, 50, 5.0, GaussianParams::new(8.0, 8.0).unwrap(), Seed(9)).unwrap();
        let out = dss_run(&dep, &DssParams::for_radius(5.0), Seed(9)).unwrap();
        assert!(out.deployment.sensors().iter().all(|s| f.contains(s.pos)));
        assert!(nearest_neighbour_spread(&out.deployment) < nearest_neighbour_spread(&dep));
        let again = dss_run(&dep, &DssParams::for_radius(5.0), Seed(9)).unwrap();
        assert_eq!(out, again);
    }

    #[test]
    fn symmetric_layout_stays_symmetric() {
        let f = field100();
        let pts = [
            Point::new(48.0, 48.0),
            Point::new(52.0, 48.0),
            Point::new(52.0, 52.0),
            Point::new(48.0, 52.0),
        ];
        let dep = Deployment::from_positions(f, &pts, 5.0).unwrap();
        let out = dss_run(&dep, &DssParams::for_radius(5.0), Seed(4)).unwrap();
        let p = out.deployment.positions();
        for k in 0..4 {
            let q = p[(k + 2) % 4];
            // Point symmetry through the centre.
            assert!((p[k].x + q.x - 100.0).abs() < 1e-9 && (p[k].y + q.y - 100.0).abs() < 1e-9);
        }
        assert!((p[0].dist(&p[1]) - p[1].dist(&p[2])).abs() < 1e-9);
    }

    #[test]
    fn oscillation_is_detected() {
        // Two nodes pinned against opposite walls of a narrow strip bounce
        // between the same two layouts when the step overshoots.
        let f = Field::centered(4.0, 1.0).unwrap();
        let dep = Deployment::from_positions(f, &[Point::new(1.5, 0.5), Point::new(2.5, 0.5)], 1.0).unwrap();
        let params = DssParams {
            comm_range: 3.0,
            step_scale: 10.0,
            max_iters: 100,
            oscillation_window: 4,
            min_displacement: 1e-6,
        };
        let out = dss_run(&dep, &params, Seed(1)).unwrap();
        assert!(out.iterations < 100);
        assert!(out.deployment.sensors().iter().all(|s| f.contains(s.pos)));
    }

    #[test]
    fn force_law() {
        let p = DssParams::for_radius(5.0);
        assert_eq!(repulsion(10.0, 3, &p), 0.0);
        assert!(repulsion(2.0, 2, &p) > repulsion(4.0, 2, &p));
        assert!((repulsion(5.0, 2, &p) - 2.0 * repulsion(5.0, 1, &p)).abs() < 1e-15);
    }

    #[test]
    fn rejects_single_node() {
        let dep = Deployment::from_positions(field100(), &[Point::new(1.0, 1.0)], 5.0).unwrap();
        assert!(dss_run(&dep, &DssParams::for_radius(5.0), Seed(1)).is_err());
    }
}
