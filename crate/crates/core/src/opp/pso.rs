use super::{Problem, Tracker};
use crate::swarm::{pso_update, PsoParams};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoPathParams {
    pub swarm: PsoParams,
    /// Velocity bound per coordinate as a fraction of corridor width.
    pub velocity_fraction: f64,
}

impl Default for PsoPathParams {
    fn default() -> Self {
        Self { swarm: PsoParams::default(), velocity_fraction: 0.2 }
    }
}

pub(super) fn run<R: Rng>(p: &Problem, mut pop: Vec<Vec<f64>>, rng: &mut R) -> Tracker {
    let params = p.cfg.pso;
    let dims = p.lo.len();
    let vmax: Vec<f64> = (0..dims).map(|j| params.velocity_fraction * p.width(j)).collect();
    let mut vel: Vec<Vec<f64>> = pop
        .iter()
        .map(|_| (0..dims).map(|j| if vmax[j] > 0.0 { rng.random_range(-vmax[j]..=vmax[j]) } else { 0.0 }).collect())
        .collect();
    let scores = p.score_all(&pop);
    let mut tracker = Tracker::new();
    tracker.offer_all(&pop, &scores);
    let mut p_best = pop.clone();
    let mut p_cost: Vec<f64> = scores.iter().map(|s| s.cost).collect();
    for it in 0..p.cfg.iterations {
        let g = (0..pop.len()).min_by(|&a, &b| p_cost[a].total_cmp(&p_cost[b])).unwrap_or(0);
        let g_best = p_best[g].clone();
        for k in 0..pop.len() {
            pso_update(&params.swarm, &mut pop[k], &mut vel[k], &p_best[k], &g_best, &vmax, rng);
            p.clamp(&mut pop[k]);
        }
        let scores = p.score_all(&pop);
        tracker.offer_all(&pop, &scores);
        for (k, s) in scores.iter().enumerate() {
            if s.cost < p_cost[k] {
                p_cost[k] = s.cost;
                p_best[k].clone_from(&pop[k]);
            }
        }
        tracker.record(it);
    }
    tracker
}
