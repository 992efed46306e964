//! Coverage estimation.
//!
//! The union of sensing disks is measured on a regular grid of cell centres:
//! a cell counts as covered when its centre lies within `r_s` of some sensor.
//! The grid is stored as one bitset row per `y` index, so rasterising a disk
//! is a handful of word-masking operations per row it touches.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{disk_field_area, Deployment, Field, Point, Rect};

/// Default grid resolution as a fraction of the sensing radius.
pub const DEFAULT_RESOLUTION_FACTOR: f64 = 0.1;

/// Coarsest resolution accepted, as a fraction of the sensing radius.
pub const MAX_RESOLUTION_FACTOR: f64 = 0.2;

pub fn default_resolution(r_s: f64) -> f64 {
    r_s * DEFAULT_RESOLUTION_FACTOR
}

pub(crate) fn check_resolution(resolution: f64, r_s: f64) -> Result<()> {
    // Small relative slack so that `r_s / 5` itself is accepted.
    if !(resolution > 0.0) || resolution > r_s * MAX_RESOLUTION_FACTOR * (1.0 + 1e-12) {
        return Err(Error::ResolutionTooCoarse {
            resolution,
            radius: r_s,
        });
    }
    Ok(())
}

/// Boolean occupancy over the centres of a regular grid covering a rectangle.
///
/// `nx = ceil(width / cell_size)` and likewise for `ny`; the actual spacing is
/// shrunk to `width / nx` so the cells tile the rectangle exactly.
#[derive(Debug, Clone)]
pub struct CoverageGrid {
    rect: Rect,
    cell_size: f64,
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
    words_per_row: usize,
    mask: Vec<u64>,
}

impl CoverageGrid {
    pub fn new(rect: Rect, cell_size: f64) -> Result<Self> {
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(Error::InvalidArgument(format!("cell size must be positive, got {cell_size}")));
        }
        if !(rect.width() > 0.0 && rect.height() > 0.0) {
            return Err(Error::InvalidField("grid over an empty rectangle".into()));
        }
        let nx = ((rect.width() / cell_size).ceil() as usize).max(1);
        let ny = ((rect.height() / cell_size).ceil() as usize).max(1);
        let words_per_row = nx.div_ceil(64);
        Ok(CoverageGrid {
            rect,
            cell_size,
            nx,
            ny,
            dx: rect.width() / nx as f64,
            dy: rect.height() / ny as f64,
            words_per_row,
            mask: vec![0; words_per_row * ny],
        })
    }

    pub fn rect(&self) -> &Rect {
        &self.rect
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn total_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn center(&self, i: usize, j: usize) -> Point {
        Point::new(
            self.rect.x0 + (i as f64 + 0.5) * self.dx,
            self.rect.y0 + (j as f64 + 0.5) * self.dy,
        )
    }

    pub fn clear(&mut self) {
        self.mask.fill(0);
    }

    pub fn is_covered(&self, i: usize, j: usize) -> bool {
        let w = self.mask[j * self.words_per_row + i / 64];
        (w >> (i % 64)) & 1 == 1
    }

    /// Marks every cell centre within distance `r` of `center`.
    pub fn add_disk(&mut self, center: Point, r: f64) {
        let rel_y = (center.y - self.rect.y0) / self.dy - 0.5;
        let ry = r / self.dy;
        let j0 = (rel_y - ry).ceil().max(0.0);
        let j1 = (rel_y + ry).floor().min(self.ny as f64 - 1.0);
        if j0 > j1 {
            return;
        }
        let rel_x = (center.x - self.rect.x0) / self.dx - 0.5;
        let r2 = r * r;
        for j in j0 as usize..=j1 as usize {
            let yc = self.rect.y0 + (j as f64 + 0.5) * self.dy;
            let h2 = r2 - (yc - center.y) * (yc - center.y);
            if h2 < 0.0 {
                continue;
            }
            let hx = h2.sqrt() / self.dx;
            let i0 = (rel_x - hx).ceil().max(0.0);
            let i1 = (rel_x + hx).floor().min(self.nx as f64 - 1.0);
            if i0 > i1 {
                continue;
            }
            self.set_span(j, i0 as usize, i1 as usize);
        }
    }

    fn set_span(&mut self, j: usize, i0: usize, i1: usize) {
        let row = &mut self.mask[j * self.words_per_row..(j + 1) * self.words_per_row];
        let (w0, w1) = (i0 / 64, i1 / 64);
        let lo = u64::MAX << (i0 % 64);
        let hi = u64::MAX >> (63 - i1 % 64);
        if w0 == w1 {
            row[w0] |= lo & hi;
        } else {
            row[w0] |= lo;
            for w in &mut row[w0 + 1..w1] {
                *w = u64::MAX;
            }
            row[w1] |= hi;
        }
    }

    pub fn covered_count(&self) -> usize {
        self.mask.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn covered_fraction(&self) -> f64 {
        self.covered_count() as f64 / self.total_cells() as f64
    }
}

/// Coverage of one subarea: its index in the partition and the covered
/// fraction of that subarea.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubareaCoverage {
    pub index: usize,
    pub coverage: f64,
    pub area: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    /// Fraction of the field within sensing range of at least one sensor.
    pub union_fraction: f64,
    /// Sum of per-sensor in-field disk areas over the field area; overlap counted twice.
    pub naive_sum_fraction: f64,
    /// `naive_sum_fraction - union_fraction`.
    pub overlap_excess: f64,
    pub per_subarea: Vec<SubareaCoverage>,
}

/// Union coverage of a deployment measured on a grid of the given resolution.
pub fn union_coverage(dep: &Deployment, resolution: f64) -> Result<CoverageReport> {
    let field = dep.field();
    if dep.is_empty() {
        return Ok(CoverageReport {
            union_fraction: 0.0,
            naive_sum_fraction: 0.0,
            overlap_excess: 0.0,
            per_subarea: Vec::new(),
        });
    }
    let r_min = dep.sensors().iter().map(|s| s.r_s).fold(f64::INFINITY, f64::min);
    check_resolution(resolution, r_min)?;

    let mut grid = CoverageGrid::new(field.rect(), resolution)?;
    for s in dep.sensors() {
        grid.add_disk(s.pos, s.r_s);
    }
    let union_fraction = grid.covered_fraction();
    let rect = field.rect();
    let naive: f64 = dep.sensors().iter().map(|s| disk_field_area(s, &rect)).sum();
    let naive_sum_fraction = naive / field.area();
    Ok(CoverageReport {
        union_fraction,
        naive_sum_fraction,
        overlap_excess: naive_sum_fraction - union_fraction,
        per_subarea: Vec::new(),
    })
}

/// Union coverage of the field by a set of disks, without building a [`Deployment`].
pub fn union_fraction_of(field: &Field, positions: &[Point], r_s: f64, resolution: f64) -> Result<f64> {
    check_resolution(resolution, r_s)?;
    let mut grid = CoverageGrid::new(field.rect(), resolution)?;
    for &p in positions {
        grid.add_disk(p, r_s);
    }
    Ok(grid.covered_fraction())
}

/// Expected coverage of a Poisson deployment: `1 - exp(-λ π r_s²)`.
pub fn expected_random_coverage(lambda_density: f64, r_s: f64) -> Result<f64> {
    if !(lambda_density >= 0.0) || !(r_s >= 0.0) {
        return Err(Error::Domain(format!(
            "density and radius must be non-negative, got λ={lambda_density}, r_s={r_s}"
        )));
    }
    Ok(1.0 - (-lambda_density * std::f64::consts::PI * r_s * r_s).exp())
}

/// Whole-field coverage from per-subarea coverages: the area-weighted mean
/// `Σ GC_i · area_i / field_area`.
///
/// `per_subarea` holds `(GC_i, area_i)` pairs whose areas must tile the field.
pub fn total_fitness(per_subarea: &[(f64, f64)], field: &Field) -> Result<f64> {
    let sum: f64 = per_subarea.iter().map(|&(_, a)| a).sum();
    if (sum - field.area()).abs() > 1e-6 * field.area() {
        return Err(Error::InconsistentPartition {
            sum,
            field: field.area(),
        });
    }
    Ok(per_subarea.iter().map(|&(gc, a)| gc * a).sum::<f64>() / field.area())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionEnergy {
    pub energy: f64,
    /// False when `alpha <= 2`, outside the path-loss regime the model assumes.
    pub conformant: bool,
}

/// Energy to transmit over distance `d`: `d^alpha + c`.
pub fn transmission_energy(d: f64, alpha: f64, c: f64) -> Result<TransmissionEnergy> {
    if !(d >= 0.0) {
        return Err(Error::Domain(format!("transmission distance must be non-negative, got {d}")));
    }
    let conformant = alpha > 2.0;
    if !conformant {
        log::warn!("path-loss exponent {alpha} <= 2; energy model expects alpha > 2");
    }
    Ok(TransmissionEnergy {
        energy: d.powf(alpha) + c,
        conformant,
    })
}
