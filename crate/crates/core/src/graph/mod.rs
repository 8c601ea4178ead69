//! Waypoint/task graph, route feasibility and priority-vector decoding.

mod build;
mod decode;
mod feasibility;
mod io;
mod tasks;

pub use build::{build_graph, connect_waypoints, jitter_positions, sample_waypoints, GraphParams};
pub use decode::{decode_priority_vector, fastest_route, route_priorities, DecodeError, PRIORITY_SCALE};
pub use feasibility::{check_feasibility, Criterion, Feasibility};
pub use io::GraphFile;
pub use tasks::{sample_tasks, Task};

use crate::geometry::Vec3;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("placed {placed} of {requested} waypoints on legal water")]
    Placement { placed: usize, requested: usize },
    #[error("waypoints cannot be connected over legal water")]
    Disconnected,
    #[error("invalid edge {a}-{b}: {reason}")]
    InvalidEdge { a: usize, b: usize, reason: String },
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error("invalid graph parameters: {0}")]
    InvalidParams(String),
    #[error("graph file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub id: usize,
    pub position: Vec3,
}

/// Undirected edge with its task annotation. `weight` is 1 for plain edges
/// and `1 + task weight` for task edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub task: Option<usize>,
    pub weight: f64,
    pub distance: f64,
    pub time: f64,
}

impl Edge {
    pub fn other(&self, v: usize) -> usize {
        if v == self.a {
            self.b
        } else {
            self.a
        }
    }
}

/// Edge request passed to [`MissionGraph::new`]; attributes are derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeSpec {
    pub a: usize,
    pub b: usize,
    pub task: Option<Task>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionGraph {
    waypoints: Vec<Waypoint>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, usize)>>,
    index: HashMap<(usize, usize), usize>,
    start: usize,
    destination: usize,
    speed: f64,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl MissionGraph {
    /// Builds and validates a connected graph. Distances are Euclidean and
    /// times are `distance / speed`.
    pub fn new(
        positions: &[Vec3],
        specs: &[EdgeSpec],
        start: usize,
        destination: usize,
        speed: f64,
    ) -> Result<Self, GraphError> {
        let g = Self::assemble(positions, specs, start, destination, speed)?;
        if !g.is_connected() {
            return Err(GraphError::Invalid("graph is not connected".into()));
        }
        Ok(g)
    }

    fn assemble(
        positions: &[Vec3],
        specs: &[EdgeSpec],
        start: usize,
        destination: usize,
        speed: f64,
    ) -> Result<Self, GraphError> {
        let n = positions.len();
        if n == 0 {
            return Err(GraphError::Invalid("no waypoints".into()));
        }
        if start >= n || destination >= n {
            return Err(GraphError::Invalid("start or destination out of range".into()));
        }
        if !(speed > 0.0 && speed.is_finite()) {
            return Err(GraphError::Invalid(format!("cruise speed {speed}")));
        }
        let waypoints: Vec<Waypoint> = positions
            .iter()
            .enumerate()
            .map(|(id, &position)| Waypoint { id, position })
            .collect();
        let mut edges = Vec::with_capacity(specs.len());
        let mut index = HashMap::with_capacity(specs.len());
        let mut task_ids = HashSet::new();
        for s in specs {
            let bad = |reason: &str| GraphError::InvalidEdge { a: s.a, b: s.b, reason: reason.into() };
            if s.a >= n || s.b >= n {
                return Err(bad("endpoint out of range"));
            }
            if s.a == s.b {
                return Err(bad("self-loop"));
            }
            if index.insert(key(s.a, s.b), edges.len()).is_some() {
                return Err(bad("duplicate edge"));
            }
            let weight = match s.task {
                Some(t) => {
                    if !(t.weight > 0.0 && t.weight.is_finite()) {
                        return Err(bad("task weight must be positive"));
                    }
                    if !task_ids.insert(t.id) {
                        return Err(bad("task assigned twice"));
                    }
                    1.0 + t.weight
                }
                None => 1.0,
            };
            let distance = positions[s.a].distance(positions[s.b]);
            edges.push(Edge {
                a: s.a,
                b: s.b,
                task: s.task.map(|t| t.id),
                weight,
                distance,
                time: distance / speed,
            });
        }
        Ok(Self::from_parts(waypoints, edges, start, destination, speed))
    }

    fn from_parts(
        waypoints: Vec<Waypoint>,
        edges: Vec<Edge>,
        start: usize,
        destination: usize,
        speed: f64,
    ) -> Self {
        let mut adjacency = vec![Vec::new(); waypoints.len()];
        let mut index = HashMap::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            adjacency[e.a].push((e.b, i));
            adjacency[e.b].push((e.a, i));
            index.insert(key(e.a, e.b), i);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Self { waypoints, edges, adjacency, index, start, destination, speed }
    }

    pub fn len(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }

    pub fn waypoints(&self) -> &[Waypoint] {
        &self.waypoints
    }

    pub fn position(&self, v: usize) -> Vec3 {
        self.waypoints[v].position
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `v` with the connecting edge index, sorted by neighbor id.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<&Edge> {
        self.index.get(&key(a, b)).map(|&i| &self.edges[i])
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.index.get(&key(a, b)).copied()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn destination(&self) -> usize {
        self.destination
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn task_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.task.is_some()).count()
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(u, _) in &self.adjacency[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == self.len()
    }

    /// Re-planning view rooted at `from`: edges touching `blocked` vertices are
    /// dropped and tasks in `completed` no longer carry weight. The view keeps
    /// vertex ids and may be disconnected.
    pub fn replanning_view(
        &self,
        from: usize,
        blocked: &HashSet<usize>,
        completed: &HashSet<usize>,
    ) -> MissionGraph {
        let edges = self
            .edges
            .iter()
            .filter(|e| {
                let touches = |v: usize| v != from && blocked.contains(&v);
                !touches(e.a) && !touches(e.b)
            })
            .map(|e| match e.task {
                Some(t) if completed.contains(&t) => Edge { task: None, weight: 1.0, ..*e },
                _ => *e,
            })
            .collect();
        Self::from_parts(self.waypoints.clone(), edges, from, self.destination, self.speed)
    }
}

/// A waypoint sequence that has passed [`check_feasibility`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Route {
    vertices: Vec<usize>,
}

impl Route {
    pub fn new(graph: &MissionGraph, vertices: Vec<usize>) -> Result<Self, Criterion> {
        match check_feasibility(graph, &vertices) {
            Feasibility::Feasible => Ok(Self { vertices }),
            Feasibility::Violated(c) => Err(c),
        }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn legs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn edges<'g>(&'g self, graph: &'g MissionGraph) -> impl Iterator<Item = &'g Edge> + 'g {
        self.legs().filter_map(move |(a, b)| graph.edge_between(a, b))
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}
