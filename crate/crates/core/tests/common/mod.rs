#![allow(dead_code)]

use auvplan_core::graph::{EdgeSpec, MissionGraph, Route, Task};
use auvplan_core::rng;
use auvplan_core::tamp::{route_cost, CostWeights, RouteEvaluation};
use auvplan_core::Vec3;
use rand::seq::SliceRandom;
use rand::Rng;

/// Every simple start-to-destination path, by exhaustive DFS.
pub fn simple_paths(g: &MissionGraph) -> Vec<Vec<usize>> {
    fn dfs(g: &MissionGraph, path: &mut Vec<usize>, seen: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let v = *path.last().unwrap();
        if v == g.destination() {
            out.push(path.clone());
            return;
        }
        for &(u, _) in g.neighbors(v) {
            if !seen[u] {
                seen[u] = true;
                path.push(u);
                dfs(g, path, seen, out);
                path.pop();
                seen[u] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut seen = vec![false; g.len()];
    seen[g.start()] = true;
    dfs(g, &mut vec![g.start()], &mut seen, &mut out);
    out
}

/// Path times computed straight from vertex coordinates.
pub fn path_time(g: &MissionGraph, path: &[usize]) -> f64 {
    path.windows(2).map(|w| g.position(w[0]).distance(g.position(w[1])) / g.speed()).sum()
}

/// Lowest cost among within-budget simple paths.
pub fn optimum(g: &MissionGraph, budget: f64) -> Option<(Vec<usize>, RouteEvaluation)> {
    simple_paths(g)
        .into_iter()
        .map(|p| {
            let e = route_cost(g, &Route::new(g, p.clone()).unwrap(), budget, &CostWeights::default());
            (p, e)
        })
        .filter(|(_, e)| !e.over_budget)
        .min_by(|a, b| a.1.cost.total_cmp(&b.1.cost))
}

/// Random connected graph on `n` vertices in a 2 km square: a random tree plus
/// about half the remaining pairs, tasks on roughly a third of the edges.
pub fn random_graph(seed: u64, n: usize) -> MissionGraph {
    let mut r = rng::seeded(seed);
    let pos: Vec<Vec3> = (0..n)
        .map(|_| Vec3::new(r.random_range(0.0..2000.0), r.random_range(0.0..2000.0), r.random_range(0.0..100.0)))
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut r);
    let mut pairs = Vec::new();
    for i in 1..n {
        let j = order[r.random_range(0..i)];
        pairs.push((order[i].min(j), order[i].max(j)));
    }
    for a in 0..n {
        for b in a + 1..n {
            if !pairs.contains(&(a, b)) && r.random::<f64>() < 0.5 {
                pairs.push((a, b));
            }
        }
    }
    let mut next_task = 0;
    let specs: Vec<EdgeSpec> = pairs
        .into_iter()
        .map(|(a, b)| {
            let task = (r.random::<f64>() < 0.35).then(|| {
                next_task += 1;
                Task { id: next_task - 1, weight: r.random_range(1.0..40.0) }
            });
            EdgeSpec { a, b, task }
        })
        .collect();
    MissionGraph::new(&pos, &specs, 0, n - 1, 2.0).unwrap()
}

/// Complete graph with every pair joined.
pub fn complete_graph(pos: &[Vec3], weights: impl Fn(usize, usize) -> Option<f64>) -> MissionGraph {
    let n = pos.len();
    let mut specs = Vec::new();
    let mut id = 0;
    for a in 0..n {
        for b in a + 1..n {
            let task = weights(a, b).map(|w| {
                id += 1;
                Task { id: id - 1, weight: w }
            });
            specs.push(EdgeSpec { a, b, task });
        }
    }
    MissionGraph::new(pos, &specs, 0, n - 1, 2.0).unwrap()
}

/// A budget strictly between the fastest and slowest simple path, so the
/// optimum is neither trivially the fastest nor unconstrained.
pub fn middle_budget(g: &MissionGraph) -> f64 {
    let times: Vec<f64> = simple_paths(g).iter().map(|p| path_time(g, p)).collect();
    let lo = times.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = times.iter().cloned().fold(0.0, f64::max);
    lo + 0.6 * (hi - lo) + 1e-6
}

/// Scenario with small planner budgets, for campaign-level tests.
pub fn light_scenario(seed: u64, preset: auvplan_core::harness::Preset) -> auvplan_core::harness::Scenario {
    let mut s = auvplan_core::harness::Scenario::generate(seed, preset).unwrap();
    s.mission.charge = auvplan_core::executive::ComputeCharge::deterministic();
    s.mission.tamp.population = 20;
    s.mission.tamp.iterations = 50;
    s.mission.opp.population = 10;
    s.mission.opp.iterations = 15;
    s
}
