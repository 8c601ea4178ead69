use super::{Problem, Tracker};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FaParams {
    /// Attraction at zero distance.
    pub attraction: f64,
    /// Light absorption coefficient.
    pub absorption: f64,
    /// Initial random-step scale, as a fraction of corridor width.
    pub randomness: f64,
    /// Per-iteration multiplier on the random-step scale.
    pub damping: f64,
}

impl Default for FaParams {
    fn default() -> Self {
        Self { attraction: 1.0, absorption: 1.0, randomness: 0.3, damping: 0.97 }
    }
}

/// Moves `xi` toward the brighter `xj`. Distance is measured with each
/// coordinate divided by its corridor width; `zeta` is the random step in
/// `[-0.5, 0.5]` units of width, scaled by `randomness * damping^t`.
pub fn fa_move_with(xi: &[f64], xj: &[f64], widths: &[f64], params: &FaParams, t: usize, zeta: &[f64]) -> Vec<f64> {
    let l2: f64 = xi
        .iter()
        .zip(xj)
        .zip(widths)
        .map(|((a, b), w)| if *w > 0.0 { ((b - a) / w).powi(2) } else { 0.0 })
        .sum();
    let beta = params.attraction * (-params.absorption * l2).exp();
    let beta = if beta.is_nan() { 0.0 } else { beta };
    let alpha = params.randomness * params.damping.powi(t as i32);
    (0..xi.len())
        .map(|k| xi[k] + beta * (xj[k] - xi[k]) + alpha * zeta[k] * widths[k])
        .collect()
}

/// [`fa_move_with`] drawing `zeta ~ U(-0.5, 0.5)` per coordinate.
pub fn fa_move<R: Rng>(xi: &[f64], xj: &[f64], widths: &[f64], params: &FaParams, t: usize, rng: &mut R) -> Vec<f64> {
    let zeta: Vec<f64> = (0..xi.len()).map(|_| rng.random::<f64>() - 0.5).collect();
    fa_move_with(xi, xj, widths, params, t, &zeta)
}

pub(super) fn run<R: Rng>(p: &Problem, mut pop: Vec<Vec<f64>>, rng: &mut R) -> Tracker {
    let params = p.cfg.fa;
    let widths: Vec<f64> = (0..p.lo.len()).map(|j| p.width(j)).collect();
    let mut scores = p.score_all(&pop);
    let mut tracker = Tracker::new();
    tracker.offer_all(&pop, &scores);
    for it in 0..p.cfg.iterations {
        let n = pop.len();
        for i in 0..n {
            let mut moved = false;
            for j in 0..n {
                if scores[j].cost < scores[i].cost {
                    pop[i] = fa_move(&pop[i], &pop[j], &widths, &params, it, rng);
                    moved = true;
                }
            }
            if !moved {
                let here = pop[i].clone();
                let still = FaParams { attraction: 0.0, ..params };
                pop[i] = fa_move(&here, &here, &widths, &still, it, rng);
            }
            p.clamp(&mut pop[i]);
        }
        scores = p.score_all(&pop);
        tracker.offer_all(&pop, &scores);
        tracker.record(it);
    }
    tracker
}
