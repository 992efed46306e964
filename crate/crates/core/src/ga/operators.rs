//! Selection, crossover and mutation.

use rand::seq::index;
use rand::Rng;

use super::chromosome::Chromosome;
use crate::deploy::uniform_point;
use crate::geometry::Rect;

/// Picks three distinct chromosomes uniformly, then draws two of them without
/// replacement by roulette wheel on fitness. Returns population indices.
///
/// When every remaining candidate has zero fitness the draw among them is uniform.
pub fn select_parents<R: Rng + ?Sized>(pop: &[Chromosome], rng: &mut R) -> (usize, usize) {
    assert!(pop.len() >= 3, "selection needs at least three chromosomes");
    let triple = index::sample(rng, pop.len(), 3).into_vec();
    let weights: Vec<f64> = triple.iter().map(|&i| pop[i].score().max(0.0)).collect();
    roulette_pair(&triple, &weights, rng)
}

/// Two draws without replacement from `candidates`, proportional to `weights`.
pub(crate) fn roulette_pair<R: Rng + ?Sized>(candidates: &[usize], weights: &[f64], rng: &mut R) -> (usize, usize) {
    let mut remaining: Vec<(usize, f64)> = candidates.iter().copied().zip(weights.iter().copied()).collect();
    let first = remaining.remove(spin(&remaining, rng));
    let second = remaining.remove(spin(&remaining, rng));
    (first.0, second.0)
}

fn spin<R: Rng + ?Sized>(slots: &[(usize, f64)], rng: &mut R) -> usize {
    let total: f64 = slots.iter().map(|s| s.1).sum();
    if !(total > 0.0) {
        return rng.gen_range(0..slots.len());
    }
    let mut ball = rng.gen::<f64>() * total;
    for (k, s) in slots.iter().enumerate() {
        if s.1 > 0.0 && ball < s.1 {
            return k;
        }
        ball -= s.1;
    }
    // Rounding left the ball past the end: take the last non-empty slot.
    slots.iter().rposition(|s| s.1 > 0.0).unwrap_or(slots.len() - 1)
}

/// Two-point crossover with random cut points `0 <= i <= j <= n`.
pub fn crossover<R: Rng + ?Sized>(a: &Chromosome, b: &Chromosome, rng: &mut R) -> (Chromosome, Chromosome) {
    let n = a.len();
    let p = rng.gen_range(0..=n);
    let q = rng.gen_range(0..=n);
    crossover_at(a, b, p.min(q), p.max(q))
}

/// Children swap the gene slice `[i, j)`; every other gene stays with its parent.
pub fn crossover_at(a: &Chromosome, b: &Chromosome, i: usize, j: usize) -> (Chromosome, Chromosome) {
    assert_eq!(a.len(), b.len(), "crossover needs equal-length chromosomes");
    assert!(i <= j && j <= a.len(), "cut points out of range");
    let mut c1 = a.clone();
    let mut c2 = b.clone();
    if i < j {
        c1.genes_mut()[i..j].copy_from_slice(&b.genes()[i..j]);
        c2.genes_mut()[i..j].copy_from_slice(&a.genes()[i..j]);
    }
    (c1, c2)
}

/// Resamples each gene's coordinates uniformly inside `subarea` with
/// probability `rate`. Returns the number of mutated genes.
pub fn mutate<R: Rng + ?Sized>(c: &mut Chromosome, rate: f64, subarea: &Rect, r_s: f64, rng: &mut R) -> usize {
    let mut count = 0;
    // Draw per gene first so that rate 0 never touches the fitness cache.
    let hits: Vec<usize> = (0..c.len()).filter(|_| rng.gen::<f64>() < rate).collect();
    if hits.is_empty() {
        return 0;
    }
    let genes = c.genes_mut();
    for k in hits {
        genes[k].relocate(uniform_point(subarea, rng), r_s, subarea);
        count += 1;
    }
    count
}
