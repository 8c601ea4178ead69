//! Population-method primitives shared by the route and path optimizers.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SwarmError {
    #[error("species count {s} outside [0, {s_max}]")]
    SpeciesOutOfRange { s: f64, s_max: f64 },
}

/// Immigration and emigration rates for a habitat holding `s` species.
pub fn bbo_rates(s: f64, s_max: f64, immigration: f64, emigration: f64) -> Result<(f64, f64), SwarmError> {
    if !(0.0..=s_max).contains(&s) || s_max <= 0.0 {
        return Err(SwarmError::SpeciesOutOfRange { s, s_max });
    }
    let frac = s / s_max;
    Ok((immigration * (1.0 - frac), emigration * frac))
}

/// Stationary probability of each species count `0..=s_max` under the
/// linear birth/death rates of [`bbo_rates`]. Detailed balance makes this a
/// binomial with success probability `I / (I + E)`.
pub fn species_probabilities(s_max: usize, immigration: f64, emigration: f64) -> Vec<f64> {
    let mut p = vec![0.0; s_max + 1];
    if emigration <= 0.0 {
        p[s_max] = 1.0;
        return p;
    }
    if immigration <= 0.0 {
        p[0] = 1.0;
        return p;
    }
    p[0] = 1.0;
    for k in 0..s_max {
        p[k + 1] = p[k] * immigration * (s_max - k) as f64 / (emigration * (k + 1) as f64);
    }
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    p
}

/// Mutation probability, high for improbable species counts.
pub fn bbo_mutation_rate(p_s: f64, p_max: f64, m_max: f64) -> f64 {
    if p_max <= 0.0 {
        return m_max;
    }
    (m_max * (1.0 - p_s / p_max)).clamp(0.0, m_max)
}

/// Inertia-weighted particle swarm coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoParams {
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self { inertia: 0.7, cognitive: 1.5, social: 1.5 }
    }
}

/// One velocity and position update. `draw` supplies `(r1, r2)` per
/// component; velocities are clamped to `±v_max[i]`.
pub fn pso_update_with(
    params: &PsoParams,
    position: &mut [f64],
    velocity: &mut [f64],
    p_best: &[f64],
    g_best: &[f64],
    v_max: &[f64],
    mut draw: impl FnMut() -> (f64, f64),
) {
    debug_assert!(
        [velocity.len(), p_best.len(), g_best.len(), v_max.len()].iter().all(|&n| n == position.len())
    );
    for i in 0..position.len() {
        let (r1, r2) = draw();
        let v = params.inertia * velocity[i]
            + params.cognitive * r1 * (p_best[i] - position[i])
            + params.social * r2 * (g_best[i] - position[i]);
        velocity[i] = v.clamp(-v_max[i], v_max[i]);
        position[i] += velocity[i];
    }
}

/// [`pso_update_with`] drawing `r1, r2 ~ U(0, 1)` from `rng`.
pub fn pso_update<R: Rng>(
    params: &PsoParams,
    position: &mut [f64],
    velocity: &mut [f64],
    p_best: &[f64],
    g_best: &[f64],
    v_max: &[f64],
    rng: &mut R,
) {
    pso_update_with(params, position, velocity, p_best, g_best, v_max, || {
        (rng.random::<f64>(), rng.random::<f64>())
    });
}

/// Fitness-proportional pick. Non-finite or negative weights count as zero;
/// if nothing has positive weight the pick is uniform.
pub fn roulette<R: Rng>(weights: &[f64], rng: &mut R) -> usize {
    let clean = weights.iter().map(|&w| if w.is_finite() && w > 0.0 { w } else { 0.0 });
    match WeightedIndex::new(clean) {
        Ok(dist) => dist.sample(rng),
        Err(_) => rng.random_range(0..weights.len()),
    }
}

/// Species count for each rank (0 = best) in a population of `n`; the best
/// habitat holds `n - 1` species, the worst none.
pub fn species_by_rank(n: usize) -> Vec<usize> {
    (0..n).map(|rank| n - 1 - rank).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BboParams {
    /// Maximum immigration rate.
    pub immigration: f64,
    /// Maximum emigration rate.
    pub emigration: f64,
    /// Maximum per-variable mutation probability.
    pub mutation_max: f64,
    /// Best habitats carried over unchanged.
    pub elites: usize,
}

impl Default for BboParams {
    fn default() -> Self {
        Self { immigration: 1.0, emigration: 1.0, mutation_max: 0.3, elites: 2 }
    }
}

/// Migration and mutation rates per rank (0 = best) for a population of `n`.
pub struct BboSchedule {
    pub immigration: Vec<f64>,
    pub emigration: Vec<f64>,
    pub mutation: Vec<f64>,
}

impl BboSchedule {
    pub fn new(n: usize, immigration: f64, emigration: f64, mutation_max: f64) -> Self {
        let s_max = (n - 1).max(1);
        let prob = species_probabilities(s_max, immigration, emigration);
        let p_max = prob.iter().cloned().fold(0.0, f64::max);
        let mut out = Self { immigration: vec![], emigration: vec![], mutation: vec![] };
        for s in species_by_rank(n) {
            let (lam, mu) = bbo_rates(s as f64, s_max as f64, immigration, emigration).expect("species within range");
            out.immigration.push(lam);
            out.emigration.push(mu);
            out.mutation.push(bbo_mutation_rate(prob[s.min(s_max)], p_max, mutation_max));
        }
        out
    }
}

/// Migration then mutation over a population sorted best first. Each
/// variable of habitat `k` is replaced, with probability `immigration[k]`,
/// by the same variable of a habitat picked in proportion to emigration.
pub fn migrate_and_mutate<R: Rng>(
    pop: &[Vec<f64>],
    sched: &BboSchedule,
    mut resample: impl FnMut(usize, &mut R) -> f64,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    let n = pop.len();
    let mut next = pop.to_vec();
    for k in 0..n {
        let mut mu = sched.emigration.clone();
        mu[k] = 0.0;
        for j in 0..pop[k].len() {
            if rng.random::<f64>() < sched.immigration[k] {
                let src = roulette(&mu, rng);
                next[k][j] = pop[src][j];
            }
        }
        for j in 0..pop[k].len() {
            if rng.random::<f64>() < sched.mutation[k] {
                next[k][j] = resample(j, rng);
            }
        }
    }
    next
}
