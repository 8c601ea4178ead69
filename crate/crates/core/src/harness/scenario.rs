//! Self-describing scenario files: terrain, graph, currents, obstacles and
//! mission settings. A scenario plus its seed rebuilds the same world.

use super::HarnessError;
use crate::executive::{MissionConfig, SnapshotSwitch, World};
use crate::geometry::{Vec2, Vec3};
use crate::graph::{
    build_graph, connect_waypoints, jitter_positions, sample_tasks, sample_waypoints, GraphError, GraphFile,
    GraphParams, MissionGraph,
};
use crate::rng;
use crate::terrain::{
    generate_synthetic_terrain, read_class_pgm, CellClass, CurrentField, Obstacle, TerrainGrid, TerrainParams,
    VortexFieldParams,
};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

pub const SCENARIO_VERSION: u32 = 1;
pub const NODE_COUNT_RANGE: (usize, usize) = (2, 50);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TaskParams {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
}

impl Default for TaskParams {
    fn default() -> Self {
        Self { count: 30, mean: 20.0, std: 10.0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CurrentSnapshot {
    #[serde(default)]
    pub vortices: Vec<crate::terrain::Vortex>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Scenario {
    pub version: u32,
    pub seed: u64,
    /// Class raster (PGM) used instead of synthetic terrain. Cell size and
    /// depth come from `terrain`.
    pub terrain_raster: Option<PathBuf>,
    /// Std of the waypoint jitter as a fraction of terrain width.
    pub jitter_fraction: f64,
    pub terrain: TerrainParams,
    pub graph: GraphParams,
    pub tasks: TaskParams,
    /// Fixed waypoint graph used instead of a generated one.
    pub layout: Option<GraphFile>,
    pub currents: Vec<CurrentSnapshot>,
    pub switches: Vec<SnapshotSwitch>,
    pub obstacles: Vec<Obstacle>,
    pub mission: MissionConfig,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            version: SCENARIO_VERSION,
            seed: 0,
            terrain_raster: None,
            jitter_fraction: 0.0,
            terrain: TerrainParams::default(),
            graph: GraphParams::default(),
            tasks: TaskParams::default(),
            layout: None,
            currents: vec![CurrentSnapshot::default()],
            switches: Vec::new(),
            obstacles: Vec::new(),
            mission: MissionConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Three-hour mission with a single current map.
    #[default]
    Residual,
    /// Long route threshold of 34 200 s.
    Budget,
    /// A stronger current map replaces the first one an hour in.
    Replan,
}

fn field(path: impl Into<String>, message: impl Into<String>) -> HarnessError {
    HarnessError::Field { path: path.into(), message: message.into() }
}

fn random_obstacles<R: Rng>(grid: &TerrainGrid, rng: &mut R) -> Vec<Obstacle> {
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < 6 && tries < 10_000 {
        tries += 1;
        let p = Vec3::new(
            rng.random_range(0.0..grid.width_m()),
            rng.random_range(0.0..grid.height_m()),
            rng.random_range(0.2..0.8) * grid.depth_m(),
        );
        if !grid.is_legal(p) {
            continue;
        }
        let radius = rng.random_range(50.0..150.0);
        let o = if out.len() < 4 {
            Obstacle::fixed(p, radius, 0.0)
        } else {
            let heading = rng.random_range(0.0..std::f64::consts::TAU);
            let v = Vec3::new(0.2 * heading.cos(), 0.2 * heading.sin(), 0.0);
            Obstacle::moving(p, radius, v, 0.002)
        };
        out.push(o.expect("finite positive obstacle parameters"));
    }
    out
}

fn random_snapshot<R: Rng>(grid: &TerrainGrid, params: &VortexFieldParams, rng: &mut R) -> CurrentSnapshot {
    let hi = Vec2::new(grid.width_m(), grid.height_m());
    CurrentSnapshot { vortices: CurrentField::random(rng, Vec2::ZERO, hi, params).vortices }
}

impl Scenario {
    /// Random scenario on synthetic terrain.
    pub fn generate(seed: u64, preset: Preset) -> Result<Self, HarnessError> {
        let mut s = Scenario { seed, ..Default::default() };
        let grid = generate_synthetic_terrain(rng::derive(seed, &[10]), &s.terrain)?;
        let mut r = rng::seeded(rng::derive(seed, &[20]));
        s.currents = vec![random_snapshot(&grid, &VortexFieldParams::default(), &mut r)];
        s.obstacles = random_obstacles(&grid, &mut r);
        match preset {
            Preset::Residual => {}
            Preset::Budget => {
                s.mission.total_time = 3.42e4;
                s.mission.route_threshold = Some(3.42e4);
            }
            Preset::Replan => {
                let strong = VortexFieldParams { peak_speed_min: 0.4, peak_speed_max: 0.6, ..Default::default() };
                s.currents.push(random_snapshot(&grid, &strong, &mut r));
                s.switches.push(SnapshotSwitch { time: 3600.0, snapshot: 1 });
            }
        }
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.version != SCENARIO_VERSION {
            return Err(field("version", format!("unsupported version {}", self.version)));
        }
        let t = &self.terrain;
        for (name, v) in [("width_m", t.width_m), ("height_m", t.height_m), ("depth_m", t.depth_m), ("cell_size_m", t.cell_size_m)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(field(format!("terrain.{name}"), format!("must be positive, got {v}")));
            }
        }
        if self.terrain_raster.is_none() && t.width_m * t.height_m / (t.cell_size_m * t.cell_size_m) > 1e8 {
            return Err(field("terrain.cell_size_m", "grid would exceed 1e8 cells"));
        }
        let (lo, hi) = NODE_COUNT_RANGE;
        if !(lo..=hi).contains(&self.graph.node_count) {
            return Err(field("graph.node_count", format!("{} outside [{lo}, {hi}]", self.graph.node_count)));
        }
        self.graph.validate().map_err(|e| field("graph", e.to_string()))?;
        let k = &self.tasks;
        if !(k.mean.is_finite() && k.std.is_finite() && k.std >= 0.0 && (k.mean > 0.0 || k.std > 0.0)) {
            return Err(field("tasks", format!("weight distribution N({}, {}) has no positive mass", k.mean, k.std)));
        }
        if k.count > 10_000 {
            return Err(field("tasks.count", format!("{} exceeds 10000", k.count)));
        }
        if !(0.0..=0.5).contains(&self.jitter_fraction) {
            return Err(field("jitter_fraction", format!("{} outside [0, 0.5]", self.jitter_fraction)));
        }
        if self.currents.is_empty() {
            return Err(field("currents", "at least one snapshot is required"));
        }
        for (i, c) in self.currents.iter().enumerate() {
            for (j, v) in c.vortices.iter().enumerate() {
                v.validate().map_err(|e| field(format!("currents[{i}].vortices[{j}]"), e.to_string()))?;
            }
        }
        for (i, s) in self.switches.iter().enumerate() {
            if !(s.time >= 0.0 && s.time.is_finite()) {
                return Err(field(format!("switches[{i}].time"), format!("{}", s.time)));
            }
            if s.snapshot >= self.currents.len() {
                return Err(field(format!("switches[{i}].snapshot"), format!("no snapshot {}", s.snapshot)));
            }
        }
        for (i, o) in self.obstacles.iter().enumerate() {
            o.validate().map_err(|e| field(format!("obstacles[{i}]"), e.to_string()))?;
        }
        if let Some(layout) = &self.layout {
            layout.to_graph().map_err(|e| field("layout", e.to_string()))?;
        }
        self.mission.validate().map_err(|e| field("mission", e.to_string()))?;
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String, HarnessError> {
        toml::to_string(self).map_err(|e| HarnessError::Format(e.to_string()))
    }

    /// Parses and validates.
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let s: Scenario = toml::from_str(text).map_err(|e| HarnessError::Format(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load_grid(&self) -> Result<TerrainGrid, HarnessError> {
        match &self.terrain_raster {
            Some(path) => {
                let file = std::fs::File::open(path).map_err(|e| field("terrain_raster", format!("{}: {e}", path.display())))?;
                Ok(read_class_pgm(std::io::BufReader::new(file), self.terrain.cell_size_m, self.terrain.depth_m)?)
            }
            None => Ok(generate_synthetic_terrain(rng::derive(self.seed, &[10]), &self.terrain)?),
        }
    }

    fn build_mission_graph(&self, grid: &TerrainGrid) -> Result<MissionGraph, HarnessError> {
        if let Some(layout) = &self.layout {
            return layout.to_graph().map_err(|e| field("layout", e.to_string()));
        }
        let tasks = sample_tasks(rng::derive(self.seed, &[11]), self.tasks.count, self.tasks.mean, self.tasks.std);
        let exclusions: Vec<_> = self.obstacles.iter().filter_map(|o| o.region_at(0.0).ok()).collect();
        let seed = rng::derive(self.seed, &[12]);
        if self.jitter_fraction == 0.0 {
            return Ok(build_graph(grid, &self.graph, &tasks, &exclusions, seed)?);
        }
        let p = &self.graph;
        let sigma = self.jitter_fraction * grid.width_m();
        let mut last = GraphError::Disconnected;
        for attempt in 0..p.retries.max(1) {
            let mut r = rng::seeded(rng::derive(seed, &[attempt as u64]));
            let placed = sample_waypoints(grid, p.node_count, p.min_separation_m, p.attempts_per_node, &exclusions, &mut r);
            let positions = match placed {
                Ok(x) => jitter_positions(grid, &x, sigma, &exclusions, &mut r),
                Err(e) => {
                    last = e;
                    continue;
                }
            };
            match connect_waypoints(grid, &positions, &tasks, p, &mut r) {
                Ok(g) => return Ok(g),
                Err(e) => last = e,
            }
        }
        Err(last.into())
    }

    pub fn build_world(&self) -> Result<World, HarnessError> {
        self.validate()?;
        let grid = self.load_grid()?;
        let graph = self.build_mission_graph(&grid)?;
        let snapshots: Vec<CurrentField> = self.currents.iter().map(|c| CurrentField::new(c.vortices.clone())).collect();
        let world = World { grid, graph, snapshots, switches: self.switches.clone(), obstacles: self.obstacles.clone() };
        world.validate().map_err(|e| field("scenario", e.to_string()))?;
        Ok(world)
    }
}

/// All-water terrain of the given extent.
pub fn open_water_terrain(width_m: f64, height_m: f64, depth_m: f64, cell_size_m: f64) -> TerrainParams {
    TerrainParams { width_m, height_m, depth_m, cell_size_m, island_count: 0, ..TerrainParams::default() }
}

/// True if every cell is water; used to sanity-check hand-built layouts.
pub fn is_open_water(grid: &TerrainGrid) -> bool {
    grid.cells().iter().all(|c| *c == CellClass::Water)
}
