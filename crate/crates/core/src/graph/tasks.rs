use crate::rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: usize,
    pub weight: f64,
}

/// Task weights drawn from `Normal(mean, std)`, redrawing non-positive
/// values. `std == 0` yields exactly `mean`.
pub fn sample_tasks(seed: u64, count: usize, mean: f64, std: f64) -> Vec<Task> {
    assert!(mean > 0.0 || std > 0.0, "task weight distribution has no positive mass");
    let mut rng = rng::seeded(seed);
    let dist = Normal::new(mean, std.max(0.0)).expect("finite normal parameters");
    (0..count)
        .map(|id| {
            let weight = loop {
                let w = dist.sample(&mut rng);
                if w > 0.0 {
                    break w;
                }
            };
            Task { id, weight }
        })
        .collect()
}
