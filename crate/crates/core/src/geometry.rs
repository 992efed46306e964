//! Field geometry: points, rectangles, sensors, deployments and the subarea
//! partition used by the genetic optimizer.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist2(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.dist2(other).sqrt()
    }
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub const fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    /// Closed-bounds membership. Neighbouring cells both claim their shared edge.
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    pub fn clamp(&self, p: Point) -> Point {
        Point::new(p.x.clamp(self.x0, self.x1), p.y.clamp(self.y0, self.y1))
    }

    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.x0, self.y0),
            Point::new(self.x1, self.y0),
            Point::new(self.x1, self.y1),
            Point::new(self.x0, self.y1),
        ]
    }
}

/// Rectangular sensing region anchored at the origin, with a base station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Field {
    width: f64,
    height: f64,
    base_station: Point,
}

impl Field {
    pub fn new(width: f64, height: f64, base_station: Point) -> Result<Self> {
        if !(width.is_finite() && width > 0.0 && height.is_finite() && height > 0.0) {
            return Err(Error::InvalidField(format!(
                "dimensions must be positive and finite, got {width}×{height}"
            )));
        }
        let field = Field {
            width,
            height,
            base_station,
        };
        if !base_station.is_finite() || !field.rect().contains(base_station) {
            return Err(Error::InvalidField(format!(
                "base station ({}, {}) lies outside the field",
                base_station.x, base_station.y
            )));
        }
        Ok(field)
    }

    /// Field with the base station in the middle.
    pub fn centered(width: f64, height: f64) -> Result<Self> {
        Field::new(width, height, Point::new(0.5 * width, 0.5 * height))
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn base_station(&self) -> Point {
        self.base_station
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn rect(&self) -> Rect {
        Rect::new(0.0, 0.0, self.width, self.height)
    }

    pub fn contains(&self, p: Point) -> bool {
        self.rect().contains(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sensor {
    pub id: u32,
    pub pos: Point,
    pub r_s: f64,
}

impl Sensor {
    pub fn new(id: u32, pos: Point, r_s: f64) -> Self {
        Sensor { id, pos, r_s }
    }
}

/// An ordered set of sensors placed inside a field.
///
/// Ids are `1..=n` without duplicates and every position lies in the field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deployment {
    sensors: Vec<Sensor>,
    field: Field,
}

impl Deployment {
    pub fn new(field: Field, sensors: Vec<Sensor>) -> Result<Self> {
        let n = sensors.len();
        let mut seen = vec![false; n];
        for s in &sensors {
            if !(s.r_s.is_finite() && s.r_s > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "sensor {} has non-positive radius {}",
                    s.id, s.r_s
                )));
            }
            if !s.pos.is_finite() || !field.contains(s.pos) {
                return Err(Error::InvalidArgument(format!(
                    "sensor {} at ({}, {}) lies outside the field",
                    s.id, s.pos.x, s.pos.y
                )));
            }
            let idx = s.id as usize;
            if idx == 0 || idx > n || seen[idx - 1] {
                return Err(Error::InvalidArgument(format!(
                    "sensor ids must be a permutation of 1..={n}, found {}",
                    s.id
                )));
            }
            seen[idx - 1] = true;
        }
        Ok(Deployment { sensors, field })
    }

    /// Builds a deployment from positions, numbering sensors `1..=n` in order.
    pub fn from_positions(field: Field, positions: &[Point], r_s: f64) -> Result<Self> {
        let sensors = positions
            .iter()
            .enumerate()
            .map(|(i, &p)| Sensor::new(i as u32 + 1, p, r_s))
            .collect();
        Deployment::new(field, sensors)
    }

    pub fn empty(field: Field) -> Self {
        Deployment {
            sensors: Vec::new(),
            field,
        }
    }

    pub fn sensors(&self) -> &[Sensor] {
        &self.sensors
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.sensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sensors.is_empty()
    }

    pub fn positions(&self) -> Vec<Point> {
        self.sensors.iter().map(|s| s.pos).collect()
    }

    pub fn into_sensors(self) -> Vec<Sensor> {
        self.sensors
    }
}

/// Near-square grid of equal rectangles with a node quota per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubareaGrid {
    pub rows: usize,
    pub cols: usize,
    /// Row-major from the bottom-left cell.
    pub cells: Vec<Rect>,
    pub node_quota: Vec<usize>,
}

impl SubareaGrid {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Index of the first cell containing `p`, if any.
    pub fn cell_of(&self, p: Point) -> Option<usize> {
        self.cells.iter().position(|c| c.contains(p))
    }
}

/// Splits `field` into `ceil(n_nodes / target_per_subarea)` equal cells laid out
/// as the `rows × cols` factorisation closest to square (`rows <= cols`), with
/// node quotas that differ by at most one.
pub fn partition(field: &Field, n_nodes: usize, target_per_subarea: usize) -> Result<SubareaGrid> {
    if !(field.area() > 0.0) {
        return Err(Error::InvalidField("zero-area field".into()));
    }
    if n_nodes == 0 {
        return Err(Error::InvalidArgument("partition needs at least one node".into()));
    }
    if target_per_subarea == 0 {
        return Err(Error::InvalidArgument("target_per_subarea must be at least 1".into()));
    }
    let p = n_nodes.div_ceil(target_per_subarea);
    let rows = (1..=p)
        .take_while(|r| r * r <= p)
        .filter(|r| p % r == 0)
        .last()
        .unwrap_or(1);
    let cols = p / rows;

    let cw = field.width() / cols as f64;
    let ch = field.height() / rows as f64;
    let mut cells = Vec::with_capacity(p);
    for r in 0..rows {
        for c in 0..cols {
            // Outer edges snap to the exact field bounds.
            let x1 = if c + 1 == cols { field.width() } else { (c + 1) as f64 * cw };
            let y1 = if r + 1 == rows { field.height() } else { (r + 1) as f64 * ch };
            cells.push(Rect::new(c as f64 * cw, r as f64 * ch, x1, y1));
        }
    }

    let base = n_nodes / p;
    let extra = n_nodes % p;
    let node_quota = (0..p).map(|i| base + usize::from(i < extra)).collect();

    Ok(SubareaGrid {
        rows,
        cols,
        cells,
        node_quota,
    })
}

/// Exact area of the intersection of a disk with a rectangle.
///
/// Uses inclusion–exclusion over signed quadrant integrals of the circle, so
/// the result is analytic up to floating-point rounding.
pub fn disk_rect_area(center: Point, r: f64, rect: &Rect) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let x0 = rect.x0 - center.x;
    let x1 = rect.x1 - center.x;
    let y0 = rect.y0 - center.y;
    let y1 = rect.y1 - center.y;
    let area = signed_quadrant(x1, y1, r) - signed_quadrant(x0, y1, r) - signed_quadrant(x1, y0, r)
        + signed_quadrant(x0, y0, r);
    area.clamp(0.0, PI * r * r)
}

/// Area of a sensor's disk inside `rect`.
pub fn disk_field_area(sensor: &Sensor, rect: &Rect) -> f64 {
    disk_rect_area(sensor.pos, sensor.r_s, rect)
}

/// Signed area of the disk (radius `r`, at the origin) over `[0, x] × [0, y]`.
fn signed_quadrant(x: f64, y: f64, r: f64) -> f64 {
    let s = x.signum() * y.signum();
    if s == 0.0 {
        return 0.0;
    }
    s * quadrant(x.abs().min(r), y.abs().min(r), r)
}

/// Area of the disk over `[0, x] × [0, y]` for `0 <= x, y <= r`.
fn quadrant(x: f64, y: f64, r: f64) -> f64 {
    if x * x + y * y <= r * r {
        return x * y;
    }
    // The arc crosses height `y` at abscissa `t`; left of it the rectangle is
    // fully inside, right of it the circle bounds the column.
    let t = (r * r - y * y).max(0.0).sqrt();
    y * t + arc_integral(x, r) - arc_integral(t, r)
}

/// Antiderivative of `sqrt(r² - u²)`.
fn arc_integral(u: f64, r: f64) -> f64 {
    let ratio = (u / r).clamp(-1.0, 1.0);
    0.5 * (u * (r * r - u * u).max(0.0).sqrt() + r * r * ratio.asin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn field100() -> Field {
        Field::centered(100.0, 100.0).unwrap()
    }

    #[test]
    fn partition_two_cells() {
        let g = partition(&field100(), 100, 50).unwrap();
        assert_eq!((g.rows, g.cols), (1, 2));
        assert_eq!(g.node_quota, vec![50, 50]);
        assert_eq!(g.cells[0], Rect::new(0.0, 0.0, 50.0, 100.0));
    }

    #[test]
    fn partition_single_cell() {
        let g = partition(&field100(), 30, 50).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.cells[0], field100().rect());
        assert_eq!(g.node_quota, vec![30]);
    }

    #[test]
    fn partition_586_nodes() {
        let g = partition(&field100(), 586, 50).unwrap();
        assert_eq!((g.rows, g.cols), (3, 4));
        let mut q = g.node_quota.clone();
        q.sort_unstable();
        assert_eq!(q, [vec![48; 2], vec![49; 10]].concat());
        assert_eq!(q.iter().sum::<usize>(), 586);
    }

    #[test]
    fn partition_rejects_bad_inputs() {
        assert!(partition(&field100(), 0, 50).is_err());
        assert!(partition(&field100(), 10, 0).is_err());
    }

    #[test]
    fn field_validation() {
        assert!(matches!(Field::centered(0.0, 10.0), Err(Error::InvalidField(_))));
        assert!(Field::new(10.0, 10.0, Point::new(11.0, 5.0)).is_err());
        assert!(Field::new(10.0, 10.0, Point::new(10.0, 0.0)).is_ok());
    }

    #[test]
    fn deployment_validation() {
        let f = field100();
        let ok = vec![Sensor::new(2, Point::new(1.0, 1.0), 5.0), Sensor::new(1, Point::new(2.0, 2.0), 5.0)];
        assert!(Deployment::new(f, ok).is_ok());
        let dup = vec![Sensor::new(1, Point::new(1.0, 1.0), 5.0), Sensor::new(1, Point::new(2.0, 2.0), 5.0)];
        assert!(Deployment::new(f, dup).is_err());
        let outside = vec![Sensor::new(1, Point::new(-1.0, 1.0), 5.0)];
        assert!(Deployment::new(f, outside).is_err());
        let nan = vec![Sensor::new(1, Point::new(f64::NAN, 1.0), 5.0)];
        assert!(Deployment::new(f, nan).is_err());
    }

    #[test]
    fn contains_closed_bounds() {
        let r = field100().rect();
        assert!(r.contains(Point::new(0.0, 0.0)));
        assert!(!r.contains(Point::new(100.1, 50.0)));
        let cell = Rect::new(0.0, 0.0, 50.0, 100.0);
        assert!(cell.contains(Point::new(50.0, 100.0)));
    }

    #[test]
    fn disk_area_interior_and_corner() {
        let r = field100().rect();
        assert_relative_eq!(disk_rect_area(Point::new(50.0, 50.0), 5.0, &r), 25.0 * PI, max_relative = 1e-12);
        assert_relative_eq!(disk_rect_area(Point::new(0.0, 0.0), 5.0, &r), 25.0 * PI / 4.0, max_relative = 1e-12);
        assert_relative_eq!(disk_rect_area(Point::new(50.0, 0.0), 5.0, &r), 25.0 * PI / 2.0, max_relative = 1e-12);
        assert_eq!(disk_rect_area(Point::new(200.0, 50.0), 5.0, &r), 0.0);
    }

    #[test]
    fn disk_area_matches_segment_formula() {
        // Chord at distance 2 from the centre: the missing cap has area
        // r² acos(d/r) - d sqrt(r² - d²).
        let r = 5.0f64;
        let d = 2.0f64;
        let cap = r * r * (d / r).acos() - d * (r * r - d * d).sqrt();
        let got = disk_rect_area(Point::new(d, 50.0), r, &field100().rect());
        assert_relative_eq!(got, PI * r * r - cap, max_relative = 1e-12);
    }

    /// Monte-Carlo estimate over the disk's bounding box, returning (estimate, sigma).
    fn mc_disk_rect(center: Point, r: f64, rect: &Rect, samples: usize, seed: u64) -> (f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hits = 0usize;
        for _ in 0..samples {
            let p = Point::new(
                center.x + rng.gen_range(-r..r),
                center.y + rng.gen_range(-r..r),
            );
            if p.dist2(&center) <= r * r && rect.contains(p) {
                hits += 1;
            }
        }
        let box_area = 4.0 * r * r;
        let frac = hits as f64 / samples as f64;
        (box_area * frac, box_area * (frac * (1.0 - frac) / samples as f64).sqrt())
    }

    #[test]
    fn disk_area_near_edge_matches_monte_carlo() {
        let rect = field100().rect();
        let center = Point::new(2.0, 50.0);
        let (est, sigma) = mc_disk_rect(center, 5.0, &rect, 10_000_000, 11);
        let exact = disk_rect_area(center, 5.0, &rect);
        assert!((exact - est).abs() < 3.0 * sigma, "exact {exact} mc {est} ± {sigma}");
    }

    #[test]
    fn disk_area_random_cases_match_monte_carlo() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut failures = 0;
        for case in 0..100 {
            let rect = Rect::new(0.0, 0.0, rng.gen_range(5.0..40.0), rng.gen_range(5.0..40.0));
            let r = rng.gen_range(1.0..12.0);
            let center = Point::new(rng.gen_range(-5.0..rect.x1 + 5.0), rng.gen_range(-5.0..rect.y1 + 5.0));
            let (est, sigma) = mc_disk_rect(center, r, &rect, 200_000, case);
            let exact = disk_rect_area(center, r, &rect);
            if (exact - est).abs() > 4.0 * sigma.max(1e-9) {
                failures += 1;
            }
        }
        // 4σ per case: a single spurious miss across 100 cases is already unlikely.
        assert!(failures <= 1, "{failures} cases disagree with MC");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn partition_tiles_field(w in 1.0f64..500.0, h in 1.0f64..500.0, n in 1usize..2000, t in 1usize..120) {
                let f = Field::centered(w, h).unwrap();
                let g = partition(&f, n, t).unwrap();
                let total: f64 = g.cells.iter().map(Rect::area).sum();
                prop_assert!((total - f.area()).abs() <= 1e-9 * f.area());
                prop_assert_eq!(g.node_quota.iter().sum::<usize>(), n);
                let qmax = *g.node_quota.iter().max().unwrap();
                let qmin = *g.node_quota.iter().min().unwrap();
                prop_assert!(qmax - qmin <= 1);
                prop_assert_eq!(g.rows * g.cols, n.div_ceil(t));
                prop_assert!(g.rows <= g.cols);
            }

            #[test]
            fn partition_covers_sampled_points(n in 1usize..700, fx in 0.0f64..=1.0, fy in 0.0f64..=1.0) {
                let f = Field::centered(113.0, 71.0).unwrap();
                let g = partition(&f, n, 50).unwrap();
                prop_assert!(g.cell_of(Point::new(fx * 113.0, fy * 71.0)).is_some());
            }

            #[test]
            fn disk_area_bounded_and_monotone(cx in -20.0f64..120.0, cy in -20.0f64..120.0, r in 0.1f64..30.0, dr in 0.0f64..5.0) {
                let rect = Rect::new(0.0, 0.0, 100.0, 60.0);
                let a = disk_rect_area(Point::new(cx, cy), r, &rect);
                let b = disk_rect_area(Point::new(cx, cy), r + dr, &rect);
                prop_assert!(a >= 0.0);
                prop_assert!(a <= (PI * r * r).min(rect.area()) + 1e-9);
                prop_assert!(b + 1e-9 >= a);
            }
        }
    }
}
