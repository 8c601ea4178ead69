use super::{fastest_priorities, Evaluator, Incumbent, Scored, TampConfig};
use crate::graph::PRIORITY_SCALE;
use crate::swarm::roulette;
use crate::{par, rng};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaParams {
    /// Probability that a child gene comes from the first parent.
    pub mix_ratio: f64,
    /// Probability that a child is mutated.
    pub mutation_rate: f64,
    /// Generations without improvement before stopping.
    pub stall_generations: usize,
}

impl Default for GaParams {
    fn default() -> Self {
        Self { mix_ratio: 0.5, mutation_rate: 0.3, stall_generations: 50 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutationOp {
    /// Move the gene at `j` to `i`, shifting the genes in between.
    Insertion,
    /// Reverse the genes between `i` and `j`.
    Inversion,
    Swap,
}

/// Applies `op` to positions `i <= j` of `genes`.
pub fn apply_mutation(genes: &mut [f64], op: MutationOp, i: usize, j: usize) {
    let (i, j) = (i.min(j), i.max(j));
    match op {
        MutationOp::Swap => genes.swap(i, j),
        MutationOp::Inversion => genes[i..=j].reverse(),
        MutationOp::Insertion => genes[i..=j].rotate_right(1),
    }
}

/// Child pair from a uniform mask: gene `k` of the first child comes from
/// `a` when `mask[k]`, else from `b`; the second child takes the complement.
pub fn uniform_crossover(a: &[f64], b: &[f64], mask: &[bool]) -> (Vec<f64>, Vec<f64>) {
    a.iter()
        .zip(b)
        .zip(mask)
        .map(|((&x, &y), &m)| if m { (x, y) } else { (y, x) })
        .unzip()
}

fn mutate<R: Rng>(genes: &mut [f64], fixed: usize, rng: &mut R) {
    let movable: Vec<usize> = (0..genes.len()).filter(|&k| k != fixed).collect();
    if movable.len() < 2 {
        return;
    }
    let op = [MutationOp::Insertion, MutationOp::Inversion, MutationOp::Swap][rng.random_range(0..3)];
    let i = rng.random_range(0..movable.len());
    let mut j = rng.random_range(0..movable.len() - 1);
    if j >= i {
        j += 1;
    }
    let mut vals: Vec<f64> = movable.iter().map(|&k| genes[k]).collect();
    apply_mutation(&mut vals, op, i, j);
    for (&k, v) in movable.iter().zip(vals) {
        genes[k] = v;
    }
}

/// Keeps the best `n` of a cost-sorted pool, taking one individual per
/// distinct decoded route before admitting duplicates.
fn survivors(pool: Vec<(Vec<f64>, Scored)>, n: usize) -> Vec<(Vec<f64>, Scored)> {
    let mut seen = HashSet::new();
    let (mut unique, dup): (Vec<_>, Vec<_>) = pool.into_iter().partition(|(_, s)| match &s.route {
        Some(r) => seen.insert(r.vertices().to_vec()),
        None => false,
    });
    unique.extend(dup);
    unique.truncate(n);
    unique.sort_by(|x, y| x.1.score.total_cmp(&y.1.score));
    unique
}

pub(super) fn run(ev: &Evaluator, cfg: &TampConfig) -> Incumbent {
    let n = ev.graph.len();
    let p = cfg.ga;
    let mut rng = rng::seeded(cfg.seed);
    let mut pop: Vec<Vec<f64>> = (0..cfg.population)
        .map(|_| (0..n).map(|_| rng.random_range(0.0..PRIORITY_SCALE)).collect())
        .collect();
    if let Some(seed) = fastest_priorities(ev.graph, cfg) {
        pop[0] = seed;
    }
    let mut scores: Vec<Scored> = par::map(cfg.policy, &pop, |x| ev.priorities(x));
    let mut inc = Incumbent::default();
    scores.iter().for_each(|s| inc.offer(s));
    let mut stall = 0;
    for it in 0..cfg.iterations {
        let before = inc.score();
        let fitness: Vec<f64> = scores.iter().map(|s| 1.0 / s.score).collect();
        let mut children = Vec::with_capacity(cfg.population + 1);
        while children.len() < cfg.population {
            let a = &pop[roulette(&fitness, &mut rng)];
            let b = &pop[roulette(&fitness, &mut rng)];
            let mask: Vec<bool> = (0..n).map(|_| rng.random::<f64>() < p.mix_ratio).collect();
            let (mut c1, mut c2) = uniform_crossover(a, b, &mask);
            for c in [&mut c1, &mut c2] {
                if rng.random::<f64>() < p.mutation_rate {
                    mutate(c, ev.graph.start(), &mut rng);
                }
            }
            children.push(c1);
            children.push(c2);
        }
        children.truncate(cfg.population);
        let child_scores = par::map(cfg.policy, &children, |x| ev.priorities(x));
        child_scores.iter().for_each(|s| inc.offer(s));

        let mut merged: Vec<(Vec<f64>, Scored)> = pop.into_iter().zip(scores).chain(children.into_iter().zip(child_scores)).collect();
        merged.sort_by(|x, y| x.1.score.total_cmp(&y.1.score));
        (pop, scores) = survivors(merged, cfg.population).into_iter().unzip();

        inc.record(it);
        stall = if inc.score() < before { 0 } else { stall + 1 };
        if stall >= p.stall_generations {
            break;
        }
    }
    inc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_parents_reproduce() {
        let a = [1.0, 2.0, 3.0];
        for mask in [[true, false, true], [false, false, false]] {
            let (c1, c2) = uniform_crossover(&a, &a, &mask);
            assert_eq!((c1.as_slice(), c2.as_slice()), (&a[..], &a[..]));
        }
    }

    #[test]
    fn crossover_mask_and_complement() {
        let (c1, c2) = uniform_crossover(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], &[true, false, true]);
        assert_eq!(c1, vec![1.0, 5.0, 3.0]);
        assert_eq!(c2, vec![4.0, 2.0, 6.0]);
    }

    #[test]
    fn swap_of_interior_pair() {
        let mut g = [3.0, 1.0, 2.0];
        apply_mutation(&mut g, MutationOp::Swap, 1, 2);
        assert_eq!(g, [3.0, 2.0, 1.0]);
    }

    #[test]
    fn inversion_and_insertion() {
        let mut g = [0.0, 1.0, 2.0, 3.0, 4.0];
        apply_mutation(&mut g, MutationOp::Inversion, 1, 3);
        assert_eq!(g, [0.0, 3.0, 2.0, 1.0, 4.0]);
        let mut g = [0.0, 1.0, 2.0, 3.0, 4.0];
        apply_mutation(&mut g, MutationOp::Insertion, 3, 1);
        assert_eq!(g, [0.0, 3.0, 1.0, 2.0, 4.0]);
    }

    #[test]
    fn mutation_never_touches_fixed_gene() {
        let mut r = rng::seeded(5);
        for _ in 0..500 {
            let mut g = [9.0, 1.0, 2.0, 3.0];
            mutate(&mut g, 0, &mut r);
            assert_eq!(g[0], 9.0);
            let mut sorted = g[1..].to_vec();
            sorted.sort_by(f64::total_cmp);
            assert_eq!(sorted, vec![1.0, 2.0, 3.0]);
        }
    }
}
