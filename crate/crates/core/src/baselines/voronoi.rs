//! Bounded Voronoi cells by iterative half-plane clipping.
//!
//! Each cell starts as the field rectangle and is clipped against the
//! perpendicular bisector with every other site. O(n²) clips, which is fine
//! for the few hundred sensors these baselines handle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Deployment, Point, Rect};

/// Convex cell, vertices counter-clockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoronoiCell {
    pub owner: u32,
    pub site: Point,
    pub vertices: Vec<Point>,
}

impl VoronoiCell {
    pub fn area(&self) -> f64 {
        polygon_area(&self.vertices)
    }

    /// Point-in-convex-polygon test with `eps` slack on the edges.
    pub fn contains(&self, p: Point, eps: f64) -> bool {
        let v = &self.vertices;
        if v.len() < 3 {
            return false;
        }
        (0..v.len()).all(|k| {
            let a = v[k];
            let b = v[(k + 1) % v.len()];
            let cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
            cross >= -eps * ((b.x - a.x).hypot(b.y - a.y)).max(1.0)
        })
    }
}

pub(crate) fn polygon_area(v: &[Point]) -> f64 {
    if v.len() < 3 {
        return 0.0;
    }
    let twice: f64 = (0..v.len())
        .map(|k| {
            let a = v[k];
            let b = v[(k + 1) % v.len()];
            a.x * b.y - b.x * a.y
        })
        .sum();
    0.5 * twice
}

/// Keeps the part of `poly` where `n · p <= c`.
fn clip(poly: &[Point], n: Point, c: f64) -> Vec<Point> {
    let side = |p: &Point| n.x * p.x + n.y * p.y - c;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        let (sa, sb) = (side(&a), side(&b));
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0) {
            let t = sa / (sa - sb);
            out.push(Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
        }
    }
    dedup_ring(out)
}

fn dedup_ring(mut v: Vec<Point>) -> Vec<Point> {
    const EPS2: f64 = 1e-24;
    v.dedup_by(|b, a| a.dist2(b) <= EPS2);
    while v.len() > 1 && v[0].dist2(v.last().unwrap()) <= EPS2 {
        v.pop();
    }
    v
}

/// Cell of `sites[i]` inside `rect`.
pub fn cell_of(sites: &[Point], i: usize, rect: &Rect) -> Vec<Point> {
    let s = sites[i];
    let mut poly: Vec<Point> = rect.corners().to_vec();
    for (j, &o) in sites.iter().enumerate() {
        if j == i {
            continue;
        }
        // |p - s|² <= |p - o|²  ⇔  (o - s) · p <= (|o|² - |s|²) / 2
        let n = Point::new(o.x - s.x, o.y - s.y);
        let c = 0.5 * (o.x * o.x + o.y * o.y - s.x * s.x - s.y * s.y);
        poly = clip(&poly, n, c);
        if poly.is_empty() {
            break;
        }
    }
    poly
}

const JITTER: f64 = 1e-9;
const JITTER_ATTEMPTS: u32 = 8;

/// Separates coincident sites with a deterministic, id-dependent 1e-9 nudge
/// (doubling on each retry), clamped to `rect`.
pub(crate) fn separate_duplicates(ids: &[u32], sites: &mut [Point], rect: &Rect) -> Result<()> {
    for attempt in 0..JITTER_ATTEMPTS {
        let dup = duplicate_flags(sites);
        if !dup.iter().any(|&d| d) {
            return Ok(());
        }
        let scale = JITTER * f64::from(1u32 << attempt);
        for (k, p) in sites.iter_mut().enumerate() {
            if dup[k] {
                // Golden-angle directions never repeat for distinct ids.
                let theta = f64::from(ids[k]) * 2.399_963_229_728_653;
                let moved = rect.clamp(Point::new(p.x + scale * theta.cos(), p.y + scale * theta.sin()));
                log::debug!("jittering duplicate site {} at ({}, {})", ids[k], p.x, p.y);
                *p = moved;
            }
        }
    }
    if duplicate_flags(sites).iter().any(|&d| d) {
        return Err(Error::Degenerate("coincident sensors could not be separated".into()));
    }
    Ok(())
}

fn duplicate_flags(sites: &[Point]) -> Vec<bool> {
    let mut order: Vec<usize> = (0..sites.len()).collect();
    order.sort_by(|&a, &b| sites[a].x.total_cmp(&sites[b].x).then(sites[a].y.total_cmp(&sites[b].y)));
    let mut flags = vec![false; sites.len()];
    for w in order.windows(2) {
        if sites[w[0]] == sites[w[1]] {
            // Keep the first occurrence fixed; only later ones move.
            flags[w[0].max(w[1])] = true;
        }
    }
    flags
}

/// Voronoi cells of arbitrary sites clipped to `rect`, in input order.
pub fn voronoi_cells_of(ids: &[u32], sites: &[Point], rect: &Rect) -> Result<Vec<VoronoiCell>> {
    if sites.is_empty() {
        return Err(Error::InvalidArgument("voronoi needs at least one site".into()));
    }
    let mut sites = sites.to_vec();
    separate_duplicates(ids, &mut sites, rect)?;
    Ok((0..sites.len())
        .map(|i| VoronoiCell {
            owner: ids[i],
            site: sites[i],
            vertices: cell_of(&sites, i, rect),
        })
        .collect())
}

/// One bounded cell per sensor; together they tile the field.
pub fn voronoi_cells(dep: &Deployment) -> Result<Vec<VoronoiCell>> {
    let ids: Vec<u32> = dep.sensors().iter().map(|s| s.id).collect();
    voronoi_cells_of(&ids, &dep.positions(), &dep.field().rect())
}

/// The cell vertex farthest from `owner`; ties go to the smallest `(x, y)`.
pub fn farthest_vertex(cell: &VoronoiCell, owner: Point) -> Option<(Point, f64)> {
    let mut best: Option<(Point, f64)> = None;
    for &v in &cell.vertices {
        let d = v.dist(&owner);
        best = match best {
            None => Some((v, d)),
            Some((bv, bd)) => {
                let tol = 1e-12 * bd.max(1.0);
                if d > bd + tol || ((d - bd).abs() <= tol && (v.x, v.y) < (bv.x, bv.y)) {
                    Some((v, d))
                } else {
                    Some((bv, bd))
                }
            }
        };
    }
    best
}
