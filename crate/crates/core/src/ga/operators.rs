use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::Individual;

/// Fittest of `size` individuals drawn uniformly with replacement; the
/// earliest draw wins ties.
pub fn select_tournament<'a, R: Rng + ?Sized>(
    population: &'a [Individual],
    size: usize,
    rng: &mut R,
) -> &'a Individual {
    assert!(!population.is_empty(), "tournament on an empty population");
    let mut best = &population[rng.random_range(0..population.len())];
    for _ in 1..size {
        let c = &population[rng.random_range(0..population.len())];
        if c.score() > best.score() {
            best = c;
        }
    }
    best
}

/// BLX-α: every child gene is uniform on `[lo − α·r, hi + α·r]`, where
/// `lo`, `hi` are the parents' genes and `r = hi − lo`, then clipped.
pub fn crossover_blend<R: Rng + ?Sized>(
    a: &Individual,
    b: &Individual,
    alpha: f64,
    bounds: &[(f64, f64)],
    rng: &mut R,
) -> (Individual, Individual) {
    assert_eq!(a.genes.len(), b.genes.len());
    let mut child = || {
        let genes = a
            .genes
            .iter()
            .zip(&b.genes)
            .zip(bounds)
            .map(|((&x, &y), &(low, high))| {
                let (lo, hi) = (x.min(y), x.max(y));
                let ext = alpha * (hi - lo);
                let v = if hi > lo { rng.random_range((lo - ext)..=(hi + ext)) } else { lo };
                v.clamp(low, high)
            })
            .collect();
        Individual::new(genes)
    };
    let c1 = child();
    let c2 = child();
    (c1, c2)
}

/// Each gene moves with probability `rate` by `N(0, (sigma·(high−low))²)`,
/// then is clipped. An unchanged individual keeps its fitness.
pub fn mutate_gaussian<R: Rng + ?Sized>(
    x: &Individual,
    rate: f64,
    sigma: f64,
    bounds: &[(f64, f64)],
    rng: &mut R,
) -> Individual {
    let mut out = x.clone();
    let mut changed = false;
    for (g, &(lo, hi)) in out.genes.iter_mut().zip(bounds) {
        if rng.random::<f64>() < rate {
            let step = Normal::new(0.0, sigma * (hi - lo)).expect("positive standard deviation").sample(rng);
            let v = (*g + step).clamp(lo, hi);
            changed |= v != *g;
            *g = v;
        }
    }
    if changed {
        out.fitness = None;
    }
    out
}
