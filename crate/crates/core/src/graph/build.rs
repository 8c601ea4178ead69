use super::{EdgeSpec, GraphError, MissionGraph, Task};
use crate::geometry::Vec3;
use crate::rng;
use crate::terrain::{ObstacleRegion, TerrainGrid};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GraphParams {
    pub node_count: usize,
    /// Fraction of the remaining nearest-neighbor candidate edges added on
    /// top of the spanning tree (0 gives a tree).
    pub edge_density: f64,
    /// Candidate edges per waypoint, by distance.
    pub neighbor_count: usize,
    /// Cruise speed in m/s.
    pub speed: f64,
    pub min_separation_m: f64,
    pub attempts_per_node: usize,
    /// Full re-samples tried before giving up.
    pub retries: usize,
}

impl Default for GraphParams {
    fn default() -> Self {
        Self {
            node_count: 40,
            edge_density: 0.3,
            neighbor_count: 6,
            speed: 2.0,
            min_separation_m: 100.0,
            attempts_per_node: 2_000,
            retries: 10,
        }
    }
}

impl GraphParams {
    pub fn validate(&self) -> Result<(), GraphError> {
        let bad = |m: String| Err(GraphError::InvalidParams(m));
        if self.node_count < 2 {
            return bad(format!("node_count {} < 2", self.node_count));
        }
        if !(0.0..=1.0).contains(&self.edge_density) {
            return bad(format!("edge_density {} outside [0, 1]", self.edge_density));
        }
        if !(self.speed > 0.0 && self.speed.is_finite()) {
            return bad(format!("speed {}", self.speed));
        }
        if self.neighbor_count == 0 {
            return bad("neighbor_count must be positive".into());
        }
        if !(self.min_separation_m >= 0.0) {
            return bad(format!("min_separation_m {}", self.min_separation_m));
        }
        Ok(())
    }
}

fn clear_of(p: Vec3, exclusions: &[ObstacleRegion]) -> bool {
    exclusions.iter().all(|r| (p.xy() - r.center.xy()).norm() > r.radius)
}

fn draw_point<R: Rng>(grid: &TerrainGrid, rng: &mut R) -> Vec3 {
    Vec3::new(
        rng.random_range(0.0..=grid.width_m()),
        rng.random_range(0.0..=grid.height_m()),
        rng.random_range(0.0..=grid.depth_m()),
    )
}

/// Rejection-samples `count` legal waypoints, uniformly in plan and depth,
/// at least `min_separation_m` apart in plan and outside every exclusion disc.
pub fn sample_waypoints<R: Rng>(
    grid: &TerrainGrid,
    count: usize,
    min_separation_m: f64,
    attempts_per_node: usize,
    exclusions: &[ObstacleRegion],
    rng: &mut R,
) -> Result<Vec<Vec3>, GraphError> {
    let mut out: Vec<Vec3> = Vec::with_capacity(count);
    while out.len() < count {
        let placed = (0..attempts_per_node).find_map(|_| {
            let p = draw_point(grid, rng);
            let ok = grid.is_legal(p)
                && clear_of(p, exclusions)
                && out.iter().all(|q| (p.xy() - q.xy()).norm() >= min_separation_m);
            ok.then_some(p)
        });
        match placed {
            Some(p) => out.push(p),
            None => return Err(GraphError::Placement { placed: out.len(), requested: count }),
        }
    }
    Ok(out)
}

/// Gaussian jitter of each waypoint in plan (`sigma_m`) and depth, redrawn
/// until legal; a waypoint that cannot be moved keeps its position.
pub fn jitter_positions<R: Rng>(
    grid: &TerrainGrid,
    positions: &[Vec3],
    sigma_m: f64,
    exclusions: &[ObstacleRegion],
    rng: &mut R,
) -> Vec<Vec3> {
    let Ok(noise) = Normal::new(0.0, sigma_m.max(0.0)) else {
        return positions.to_vec();
    };
    let depth_noise = Normal::new(0.0, 0.05 * grid.depth_m()).expect("finite depth");
    let mut out: Vec<Vec3> = Vec::with_capacity(positions.len());
    for &p in positions {
        let moved = (0..100).find_map(|_| {
            let q = Vec3::new(
                p.x + noise.sample(rng),
                p.y + noise.sample(rng),
                (p.z + depth_noise.sample(rng)).clamp(0.0, grid.depth_m()),
            );
            let distinct = out.iter().all(|o| o.xy() != q.xy());
            (grid.is_legal(q) && clear_of(q, exclusions) && distinct).then_some(q)
        });
        out.push(moved.unwrap_or(p));
    }
    out
}

struct DisjointSet(Vec<usize>);

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.0[v] != v {
            self.0[v] = self.0[self.0[v]];
            v = self.0[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Connects waypoints into a graph with start `0` and destination `n - 1`.
/// A randomized spanning tree over the nearest-neighbor candidates (widened
/// to all legal pairs if needed) guarantees connectivity, then a share of the
/// remaining candidates is added. Tasks go to distinct random edges; tasks
/// beyond the edge count are left unassigned.
pub fn connect_waypoints<R: Rng>(
    grid: &TerrainGrid,
    positions: &[Vec3],
    tasks: &[Task],
    params: &GraphParams,
    rng: &mut R,
) -> Result<MissionGraph, GraphError> {
    let n = positions.len();
    if n < 2 {
        return Err(GraphError::InvalidParams(format!("{n} waypoints")));
    }
    let step = 0.5 * grid.cell_size_m();
    let legal = |a: usize, b: usize| grid.segment_is_legal(positions[a], positions[b], step);
    let plan_dist = |a: usize, b: usize| (positions[a].xy() - positions[b].xy()).norm();

    let mut candidates: Vec<(usize, usize)> = Vec::new();
    for a in 0..n {
        let mut others: Vec<usize> = (0..n).filter(|&b| b != a).collect();
        others.sort_by(|&x, &y| plan_dist(a, x).total_cmp(&plan_dist(a, y)).then(x.cmp(&y)));
        for &b in others.iter().take(params.neighbor_count) {
            let pair = (a.min(b), a.max(b));
            if !candidates.contains(&pair) && legal(a, b) {
                candidates.push(pair);
            }
        }
    }
    candidates.shuffle(rng);

    let mut sets = DisjointSet::new(n);
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    let mut spare: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in &candidates {
        if sets.union(a, b) {
            chosen.push((a, b));
        } else {
            spare.push((a, b));
        }
    }
    if chosen.len() + 1 < n {
        let mut pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        pairs.sort_by(|&(a, b), &(c, d)| plan_dist(a, b).total_cmp(&plan_dist(c, d)));
        for (a, b) in pairs {
            if sets.find(a) != sets.find(b) && legal(a, b) {
                sets.union(a, b);
                chosen.push((a, b));
            }
        }
        if chosen.len() + 1 < n {
            return Err(GraphError::Disconnected);
        }
    }
    let extra = (params.edge_density * spare.len() as f64).round() as usize;
    chosen.extend(spare.into_iter().take(extra));

    let mut slots: Vec<usize> = (0..chosen.len()).collect();
    slots.shuffle(rng);
    let mut assigned: Vec<Option<Task>> = vec![None; chosen.len()];
    for (&slot, &task) in slots.iter().zip(tasks) {
        assigned[slot] = Some(task);
    }
    let specs: Vec<EdgeSpec> = chosen
        .iter()
        .zip(assigned)
        .map(|(&(a, b), task)| EdgeSpec { a, b, task })
        .collect();
    MissionGraph::new(positions, &specs, 0, n - 1, params.speed)
}

/// Samples waypoints and connects them, re-sampling the layout a bounded
/// number of times when placement or connection fails.
pub fn build_graph(
    grid: &TerrainGrid,
    params: &GraphParams,
    tasks: &[Task],
    exclusions: &[ObstacleRegion],
    seed: u64,
) -> Result<MissionGraph, GraphError> {
    params.validate()?;
    let mut last = GraphError::Disconnected;
    for attempt in 0..params.retries.max(1) {
        let mut rng = rng::seeded(rng::derive(seed, &[attempt as u64]));
        let positions = match sample_waypoints(
            grid,
            params.node_count,
            params.min_separation_m,
            params.attempts_per_node,
            exclusions,
            &mut rng,
        ) {
            Ok(p) => p,
            Err(e) => {
                last = e;
                continue;
            }
        };
        match connect_waypoints(grid, &positions, tasks, params, &mut rng) {
            Ok(g) => return Ok(g),
            Err(e) => last = e,
        }
    }
    Err(last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::sample_tasks;
    use crate::terrain::{generate_synthetic_terrain, CellClass, TerrainParams};

    fn open_water() -> TerrainGrid {
        TerrainGrid::filled(2000.0, 2000.0, 100.0, 50.0, CellClass::Water).unwrap()
    }

    #[test]
    fn two_nodes_minimal_density_is_single_edge() {
        let params = GraphParams { node_count: 2, edge_density: 0.0, ..Default::default() };
        let g = build_graph(&open_water(), &params, &[], &[], 3).unwrap();
        assert_eq!(g.edges().len(), 1);
        let e = g.edges()[0];
        assert_eq!((e.a.min(e.b), e.a.max(e.b)), (0, 1));
        assert!(g.is_connected());
    }

    #[test]
    fn forty_nodes_thirty_tasks() {
        let grid = generate_synthetic_terrain(11, &TerrainParams::default()).unwrap();
        let tasks = sample_tasks(1, 30, 20.0, 10.0);
        let params = GraphParams { node_count: 40, ..Default::default() };
        let g = build_graph(&grid, &params, &tasks, &[], 5).unwrap();
        assert_eq!(g.len(), 40);
        assert_eq!(g.task_edge_count(), 30);
        assert_eq!(g.edges().iter().filter(|e| e.weight > 1.0).count(), 30);
        assert!(g.is_connected());
        for w in g.waypoints() {
            assert!(grid.is_legal(w.position));
        }
        for e in g.edges() {
            let d = g.position(e.a).distance(g.position(e.b));
            assert_eq!(e.distance, d);
            assert!((e.time - d / g.speed()).abs() <= 4.0 * f64::EPSILON * e.time);
        }
    }

    #[test]
    fn exclusion_discs_are_respected() {
        let hole = ObstacleRegion { center: Vec3::new(1000.0, 1000.0, 50.0), radius: 500.0 };
        let params = GraphParams { node_count: 30, ..Default::default() };
        let g = build_graph(&open_water(), &params, &[], &[hole], 2).unwrap();
        for w in g.waypoints() {
            assert!((w.position.xy() - hole.center.xy()).norm() > 500.0);
        }
    }

    #[test]
    fn placement_fails_on_dry_terrain() {
        let grid = TerrainGrid::filled(1000.0, 1000.0, 100.0, 50.0, CellClass::Coast).unwrap();
        let params = GraphParams { node_count: 5, attempts_per_node: 50, retries: 2, ..Default::default() };
        assert!(matches!(build_graph(&grid, &params, &[], &[], 1), Err(GraphError::Placement { placed: 0, .. })));
    }

    #[test]
    fn deterministic_per_seed() {
        let params = GraphParams { node_count: 20, ..Default::default() };
        let a = build_graph(&open_water(), &params, &[], &[], 9).unwrap();
        let b = build_graph(&open_water(), &params, &[], &[], 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn jitter_stays_legal() {
        let grid = generate_synthetic_terrain(4, &TerrainParams::default()).unwrap();
        let mut rng = rng::seeded(1);
        let base = sample_waypoints(&grid, 30, 100.0, 2000, &[], &mut rng).unwrap();
        let moved = jitter_positions(&grid, &base, 500.0, &[], &mut rng);
        assert_eq!(moved.len(), base.len());
        assert!(moved.iter().all(|&p| grid.is_legal(p)));
        assert_ne!(moved, base);
    }
}
