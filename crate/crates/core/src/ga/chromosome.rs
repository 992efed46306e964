use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coverage::CoverageGrid;
use crate::deploy::uniform_point;
use crate::error::Result;
use crate::geometry::{disk_rect_area, Point, Rect};

/// One sensor node: `(ID, X, Y, C)` where `C` is the node's disk area clipped
/// to its subarea.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gene {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    pub c: f64,
}

impl Gene {
    pub fn new(id: u32, pos: Point, r_s: f64, subarea: &Rect) -> Self {
        Gene {
            id,
            x: pos.x,
            y: pos.y,
            c: disk_rect_area(pos, r_s, subarea),
        }
    }

    pub fn pos(&self) -> Point {
        Point::new(self.x, self.y)
    }

    pub(crate) fn relocate(&mut self, pos: Point, r_s: f64, subarea: &Rect) {
        self.x = pos.x;
        self.y = pos.y;
        self.c = disk_rect_area(pos, r_s, subarea);
    }
}

/// A candidate placement of one subarea's nodes.
///
/// Gene `k` always carries id `first_id + k`, so crossover swaps positions of
/// the same logical node between parents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chromosome {
    genes: Vec<Gene>,
    fitness: Option<f64>,
}

impl Chromosome {
    pub fn new(genes: Vec<Gene>) -> Self {
        Chromosome { genes, fitness: None }
    }

    pub fn random<R: Rng + ?Sized>(subarea: &Rect, quota: usize, first_id: u32, r_s: f64, rng: &mut R) -> Self {
        let genes = (0..quota)
            .map(|k| Gene::new(first_id + k as u32, uniform_point(subarea, rng), r_s, subarea))
            .collect();
        Chromosome::new(genes)
    }

    pub fn genes(&self) -> &[Gene] {
        &self.genes
    }

    pub(crate) fn genes_mut(&mut self) -> &mut [Gene] {
        self.fitness = None;
        &mut self.genes
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    /// Cached fitness; `None` after the genes changed.
    pub fn fitness(&self) -> Option<f64> {
        self.fitness
    }

    pub(crate) fn set_fitness(&mut self, f: f64) {
        self.fitness = Some(f);
    }

    /// Fitness of an evaluated chromosome; zero if stale.
    pub(crate) fn score(&self) -> f64 {
        self.fitness.unwrap_or(0.0)
    }

    pub fn positions(&self) -> Vec<Point> {
        self.genes.iter().map(Gene::pos).collect()
    }

    /// Sum of the genes' clipped areas over the subarea area (overlap counted twice).
    pub fn naive_coverage(&self, subarea: &Rect) -> f64 {
        self.genes.iter().map(|g| g.c).sum::<f64>() / subarea.area()
    }
}

/// Union coverage of a subarea by a chromosome's disks, clipped to the subarea.
#[derive(Debug, Clone)]
pub struct SubareaEvaluator {
    grid: CoverageGrid,
    r_s: f64,
}

impl SubareaEvaluator {
    pub fn new(subarea: Rect, r_s: f64, resolution: f64) -> Result<Self> {
        crate::coverage::check_resolution(resolution, r_s)?;
        Ok(SubareaEvaluator {
            grid: CoverageGrid::new(subarea, resolution)?,
            r_s,
        })
    }

    pub fn subarea(&self) -> &Rect {
        self.grid.rect()
    }

    pub fn coverage(&mut self, genes: &[Gene]) -> f64 {
        self.grid.clear();
        for g in genes {
            self.grid.add_disk(g.pos(), self.r_s);
        }
        self.grid.covered_fraction()
    }

    /// Evaluates `c` if its cached fitness is stale and returns the fitness.
    pub fn evaluate(&mut self, c: &mut Chromosome) -> f64 {
        if let Some(f) = c.fitness {
            return f;
        }
        let f = self.coverage(&c.genes);
        c.set_fitness(f);
        f
    }
}
