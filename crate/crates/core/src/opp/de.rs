use super::{OppError, Problem, Score, Tracker};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeParams {
    /// Difference-vector scale F.
    pub scale: f64,
    /// Crossover rate.
    pub crossover: f64,
    /// Replace the base vector by a random convex mix of the three picks.
    pub donor_mixing: bool,
}

impl Default for DeParams {
    fn default() -> Self {
        Self { scale: 0.5, crossover: 0.9, donor_mixing: false }
    }
}

/// `base + scale * (a - b)`.
pub fn de_mutant(base: &[f64], a: &[f64], b: &[f64], scale: f64) -> Vec<f64> {
    base.iter().zip(a).zip(b).map(|((&c, &x), &y)| c + scale * (x - y)).collect()
}

/// Mutant for individual `i` from three distinct others `r1, r2, r3`:
/// `x_r3 + F (x_r1 - x_r2)`. With donor mixing the base is
/// `sum(lambda_j x_rj) / sum(lambda_j)` for `lambda_j ~ U(0, 1)`.
pub fn de_mutate<R: Rng>(
    pop: &[Vec<f64>],
    i: usize,
    params: &DeParams,
    rng: &mut R,
) -> Result<Vec<f64>, OppError> {
    if pop.len() < 4 {
        return Err(OppError::PopulationTooSmall(pop.len()));
    }
    let mut picks = [i; 3];
    for k in 0..3 {
        loop {
            let r = rng.random_range(0..pop.len());
            if r != i && !picks[..k].contains(&r) {
                picks[k] = r;
                break;
            }
        }
    }
    let [r1, r2, r3] = picks;
    if !params.donor_mixing {
        return Ok(de_mutant(&pop[r3], &pop[r1], &pop[r2], params.scale));
    }
    let lambda: [f64; 3] = [rng.random(), rng.random(), rng.random()];
    let total: f64 = lambda.iter().sum::<f64>().max(f64::MIN_POSITIVE);
    let base: Vec<f64> = (0..pop[i].len())
        .map(|j| (lambda[0] * pop[r1][j] + lambda[1] * pop[r2][j] + lambda[2] * pop[r3][j]) / total)
        .collect();
    Ok(de_mutant(&base, &pop[r1], &pop[r2], params.scale))
}

/// Trial vector taking mutant genes where `mask` is set.
pub fn de_crossover_with_mask(parent: &[f64], mutant: &[f64], mask: &[bool]) -> Vec<f64> {
    parent.iter().zip(mutant).zip(mask).map(|((&p, &m), &take)| if take { m } else { p }).collect()
}

/// Binomial crossover: gene `j` comes from the mutant when `U(0,1) <= rate`
/// or `j` is the forced index, so at least one mutant gene survives.
pub fn de_crossover<R: Rng>(parent: &[f64], mutant: &[f64], rate: f64, rng: &mut R) -> Vec<f64> {
    let forced = rng.random_range(0..parent.len());
    let mask: Vec<bool> = (0..parent.len()).map(|j| j == forced || rng.random::<f64>() <= rate).collect();
    de_crossover_with_mask(parent, mutant, &mask)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Survivor {
    Parent,
    Trial,
}

/// Greedy selection; the parent keeps its place on ties.
pub fn de_select(parent_cost: f64, trial_cost: f64) -> Survivor {
    if trial_cost < parent_cost {
        Survivor::Trial
    } else {
        Survivor::Parent
    }
}

pub(super) fn run<R: Rng>(p: &Problem, mut pop: Vec<Vec<f64>>, rng: &mut R) -> Tracker {
    let params = p.cfg.de;
    let mut scores = p.score_all(&pop);
    let mut tracker = Tracker::new();
    tracker.offer_all(&pop, &scores);
    for it in 0..p.cfg.iterations {
        let trials: Vec<Vec<f64>> = (0..pop.len())
            .map(|i| {
                let mutant = de_mutate(&pop, i, &params, rng).expect("population size validated");
                let mut trial = de_crossover(&pop[i], &mutant, params.crossover, rng);
                p.clamp(&mut trial);
                trial
            })
            .collect();
        let trial_scores: Vec<Score> = p.score_all(&trials);
        tracker.offer_all(&trials, &trial_scores);
        for (i, (t, s)) in trials.into_iter().zip(trial_scores).enumerate() {
            if de_select(scores[i].cost, s.cost) == Survivor::Trial {
                pop[i] = t;
                scores[i] = s;
            }
        }
        tracker.record(it);
    }
    tracker
}
