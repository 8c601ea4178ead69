use super::{Evaluator, Incumbent, Scored, TampConfig, TampError};
use crate::graph::{fastest_route, Route};
use crate::{par, rng};
use rand::Rng;
use serde::{Deserialize, Serialize};

pub const PHEROMONE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AcoParams {
    /// Pheromone exponent.
    pub alpha: f64,
    /// Heuristic exponent.
    pub beta: f64,
    pub evaporation: f64,
    pub deposit: f64,
    /// Per-iteration multiplier on both exponents; 1 disables the decay.
    pub exponent_decay: f64,
    pub initial_pheromone: f64,
}

impl Default for AcoParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 0.5,
            evaporation: 0.05,
            deposit: 0.01,
            exponent_decay: 0.99,
            initial_pheromone: 1.0,
        }
    }
}

/// Move probabilities over a neighborhood given its pheromone and heuristic
/// rows.
pub fn aco_transition_prob(alpha: f64, beta: f64, tau: &[f64], eta: &[f64]) -> Result<Vec<f64>, TampError> {
    if tau.is_empty() {
        return Err(TampError::DeadEnd);
    }
    let raw: Vec<f64> = tau.iter().zip(eta).map(|(t, e)| t.powf(alpha) * e.powf(beta)).collect();
    let total: f64 = raw.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        let n = raw.len() as f64;
        return Ok(vec![1.0 / n; raw.len()]);
    }
    Ok(raw.into_iter().map(|x| x / total).collect())
}

/// Evaporates every trail and deposits `deposit / cost` on the edges of the
/// best route, if any.
pub fn aco_update_pheromone(trails: &mut [f64], evaporation: f64, deposit: f64, best: Option<(&[usize], f64)>) {
    for t in trails.iter_mut() {
        *t *= 1.0 - evaporation;
    }
    if let Some((edges, cost)) = best {
        if cost > 0.0 && cost.is_finite() {
            for &e in edges {
                trails[e] += deposit / cost;
            }
        }
    }
    for t in trails.iter_mut() {
        *t = t.max(PHEROMONE_FLOOR);
    }
}

/// One ant walk. Returns `None` when the ant dead-ends or runs out of budget.
fn construct(ev: &Evaluator, trails: &[f64], eta: &[f64], alpha: f64, beta: f64, seed: u64) -> Option<Route> {
    let g = ev.graph;
    let mut rng = rng::seeded(seed);
    let mut visited = vec![false; g.len()];
    let mut at = g.start();
    visited[at] = true;
    let mut path = vec![at];
    let mut time = 0.0;
    while at != g.destination() {
        let options: Vec<(usize, usize)> = g.neighbors(at).iter().copied().filter(|&(u, _)| !visited[u]).collect();
        let tau: Vec<f64> = options.iter().map(|&(_, e)| trails[e]).collect();
        let heur: Vec<f64> = options.iter().map(|&(_, e)| eta[e]).collect();
        let probs = aco_transition_prob(alpha, beta, &tau, &heur).ok()?;
        let mut r: f64 = rng.random();
        let mut pick = options.len() - 1;
        for (i, p) in probs.iter().enumerate() {
            if r < *p {
                pick = i;
                break;
            }
            r -= p;
        }
        let (next, e) = options[pick];
        time += g.edges()[e].time;
        if time >= ev.budget {
            return None;
        }
        visited[next] = true;
        path.push(next);
        at = next;
    }
    Route::new(g, path).ok()
}

pub(super) fn run(ev: &Evaluator, cfg: &TampConfig) -> Incumbent {
    let g = ev.graph;
    let p = cfg.aco;
    let mut rng = rng::seeded(cfg.seed);
    let mut trails = vec![p.initial_pheromone; g.edges().len()];
    let eta: Vec<f64> = g.edges().iter().map(|e| e.weight / e.time.max(1e-9)).collect();
    let mut inc = Incumbent::default();
    if cfg.seed_fastest_route {
        if let Some(r) = fastest_route(g) {
            inc.offer(&ev.route(r));
        }
    }
    let (mut alpha, mut beta) = (p.alpha, p.beta);
    for it in 0..cfg.iterations {
        let seeds: Vec<u64> = (0..cfg.population).map(|_| rng.random()).collect();
        let ants: Vec<Scored> = par::map(cfg.policy, &seeds, |&s| match construct(ev, &trails, &eta, alpha, beta, s) {
            Some(r) => ev.route(r),
            None => Scored { route: None, eval: None, score: f64::INFINITY },
        });
        let best = ants
            .iter()
            .filter(|a| a.score.is_finite())
            .min_by(|a, b| a.score.total_cmp(&b.score));
        let edges: Option<Vec<usize>> = best
            .and_then(|b| b.route.as_ref())
            .map(|r| r.legs().filter_map(|(a, b)| g.edge_index(a, b)).collect());
        match (best, &edges) {
            (Some(b), Some(e)) => aco_update_pheromone(&mut trails, p.evaporation, p.deposit, Some((e, b.score))),
            _ => aco_update_pheromone(&mut trails, p.evaporation, p.deposit, None),
        }
        for a in &ants {
            inc.offer(a);
        }
        inc.record(it);
        alpha *= p.exponent_decay;
        beta *= p.exponent_decay;
    }
    inc
}
