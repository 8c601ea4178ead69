use super::{fastest_priorities, Evaluator, Incumbent, Scored, TampConfig};
use crate::graph::PRIORITY_SCALE;
use crate::swarm::{pso_update, PsoParams};
use crate::{par, rng};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoRouteParams {
    pub swarm: PsoParams,
    /// Symmetric velocity bound on each priority.
    pub velocity_limit: f64,
}

impl Default for PsoRouteParams {
    fn default() -> Self {
        Self { swarm: PsoParams { inertia: 0.8, cognitive: 2.5, social: 0.5 }, velocity_limit: 100.0 }
    }
}

pub(super) fn run(ev: &Evaluator, cfg: &TampConfig) -> Incumbent {
    let n = ev.graph.len();
    let p = cfg.pso;
    let mut rng = rng::seeded(cfg.seed);
    let mut x: Vec<Vec<f64>> = (0..cfg.population)
        .map(|_| (0..n).map(|_| rng.random_range(0.0..PRIORITY_SCALE)).collect())
        .collect();
    if let Some(seed) = fastest_priorities(ev.graph, cfg) {
        x[0] = seed;
    }
    let vmax = vec![p.velocity_limit; n];
    let mut v: Vec<Vec<f64>> = (0..cfg.population)
        .map(|_| (0..n).map(|_| rng.random_range(-p.velocity_limit..=p.velocity_limit)).collect())
        .collect();
    let scores: Vec<Scored> = par::map(cfg.policy, &x, |xi| ev.priorities(xi));
    let mut inc = Incumbent::default();
    scores.iter().for_each(|s| inc.offer(s));
    let mut p_best = x.clone();
    let mut p_score: Vec<f64> = scores.iter().map(|s| s.score).collect();
    let mut g = best_index(&p_score);
    for it in 0..cfg.iterations {
        let g_best = p_best[g].clone();
        for k in 0..cfg.population {
            pso_update(&p.swarm, &mut x[k], &mut v[k], &p_best[k], &g_best, &vmax, &mut rng);
        }
        let scores: Vec<Scored> = par::map(cfg.policy, &x, |xi| ev.priorities(xi));
        for (k, s) in scores.iter().enumerate() {
            inc.offer(s);
            if s.score < p_score[k] {
                p_score[k] = s.score;
                p_best[k].clone_from(&x[k]);
            }
        }
        g = best_index(&p_score);
        inc.record(it);
    }
    inc
}

fn best_index(scores: &[f64]) -> usize {
    (0..scores.len()).min_by(|&a, &b| scores[a].total_cmp(&scores[b])).unwrap_or(0)
}
