use super::{EdgeSpec, GraphError, MissionGraph, Task};
use crate::geometry::Vec3;
use serde::{Deserialize, Serialize};

const FORMAT_VERSION: u32 = 1;

/// Text form of a [`MissionGraph`]. Derived edge attributes are written for
/// readability and checked against the geometry on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub version: u32,
    pub start: usize,
    pub destination: usize,
    pub speed: f64,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub a: usize,
    pub b: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<usize>,
    pub w: f64,
    pub d: f64,
    pub t: f64,
}

impl From<&MissionGraph> for GraphFile {
    fn from(g: &MissionGraph) -> Self {
        Self {
            version: FORMAT_VERSION,
            start: g.start(),
            destination: g.destination(),
            speed: g.speed(),
            vertices: g
                .waypoints()
                .iter()
                .map(|w| VertexRecord { id: w.id, x: w.position.x, y: w.position.y, z: w.position.z })
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeRecord { a: e.a, b: e.b, task: e.task, w: e.weight, d: e.distance, t: e.time })
                .collect(),
        }
    }
}

impl GraphFile {
    pub fn to_graph(&self) -> Result<MissionGraph, GraphError> {
        if self.version != FORMAT_VERSION {
            return Err(GraphError::Format(format!("unsupported version {}", self.version)));
        }
        let mut positions = vec![None; self.vertices.len()];
        for v in &self.vertices {
            match positions.get_mut(v.id) {
                Some(slot @ None) => *slot = Some(Vec3::new(v.x, v.y, v.z)),
                _ => return Err(GraphError::Format(format!("vertex id {} out of order or repeated", v.id))),
            }
        }
        let positions: Vec<Vec3> = positions.into_iter().map(|p| p.expect("filled above")).collect();
        let mut specs = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let task = match (e.task, e.w > 1.0) {
                (Some(id), true) => Some(Task { id, weight: e.w - 1.0 }),
                (None, false) if e.w == 1.0 => None,
                _ => {
                    return Err(GraphError::Format(format!(
                        "edge {}-{}: weight {} does not match task {:?}",
                        e.a, e.b, e.w, e.task
                    )))
                }
            };
            specs.push(EdgeSpec { a: e.a, b: e.b, task });
        }
        let g = MissionGraph::new(&positions, &specs, self.start, self.destination, self.speed)?;
        for (rec, e) in self.edges.iter().zip(g.edges()) {
            let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * y.abs().max(1.0);
            if !close(rec.d, e.distance) || !close(rec.t, e.time) {
                return Err(GraphError::Format(format!(
                    "edge {}-{}: stored d/t disagree with vertex positions",
                    rec.a, rec.b
                )));
            }
        }
        Ok(g)
    }

    pub fn to_toml(&self) -> Result<String, GraphError> {
        toml::to_string(self).map_err(|e| GraphError::Format(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self, GraphError> {
        toml::from_str(text).map_err(|e| GraphError::Format(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, sample_tasks, GraphParams};
    use crate::terrain::{CellClass, TerrainGrid};

    #[test]
    fn toml_round_trip() {
        let grid = TerrainGrid::filled(3000.0, 3000.0, 100.0, 50.0, CellClass::Water).unwrap();
        let tasks = sample_tasks(2, 10, 20.0, 10.0);
        let params = GraphParams { node_count: 15, ..Default::default() };
        let g = build_graph(&grid, &params, &tasks, &[], 8).unwrap();
        let text = GraphFile::from(&g).to_toml().unwrap();
        let back = GraphFile::from_toml(&text).unwrap().to_graph().unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn tampered_distance_is_rejected() {
        let pos = [Vec3::ZERO, Vec3::new(3.0, 4.0, 0.0)];
        let g = MissionGraph::new(&pos, &[EdgeSpec { a: 0, b: 1, task: None }], 0, 1, 1.0).unwrap();
        let mut f = GraphFile::from(&g);
        f.edges[0].d = 6.0;
        assert!(matches!(f.to_graph(), Err(GraphError::Format(_))));
    }

    #[test]
    fn weight_without_task_is_rejected() {
        let pos = [Vec3::ZERO, Vec3::new(3.0, 4.0, 0.0)];
        let g = MissionGraph::new(&pos, &[EdgeSpec { a: 0, b: 1, task: None }], 0, 1, 1.0).unwrap();
        let mut f = GraphFile::from(&g);
        f.edges[0].w = 3.0;
        assert!(f.to_graph().is_err());
    }
}
