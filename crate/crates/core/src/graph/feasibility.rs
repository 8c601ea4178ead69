use super::MissionGraph;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Route validity rules, checked in this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Criterion {
    /// Route must start at the start vertex and end at the destination.
    Endpoints = 1,
    /// Every consecutive pair of distinct vertices must be joined by an edge.
    MissingEdge = 2,
    /// No vertex appears twice.
    RepeatedVertex = 3,
    /// No edge is traversed twice.
    RepeatedEdge = 4,
}

impl Criterion {
    pub fn id(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    Violated(Criterion),
}

impl Feasibility {
    pub fn is_feasible(self) -> bool {
        self == Feasibility::Feasible
    }
}

/// Returns the first violated criterion. A pair `(v, v)` is a stay, not an
/// edge, so it is reported as a repeated vertex rather than a missing edge.
pub fn check_feasibility(graph: &MissionGraph, route: &[usize]) -> Feasibility {
    let (Some(&first), Some(&last)) = (route.first(), route.last()) else {
        return Feasibility::Violated(Criterion::Endpoints);
    };
    if first != graph.start() || last != graph.destination() || route.len() < 2 && first != last {
        return Feasibility::Violated(Criterion::Endpoints);
    }
    if route.iter().any(|&v| v >= graph.len()) {
        return Feasibility::Violated(Criterion::MissingEdge);
    }
    for w in route.windows(2) {
        if w[0] != w[1] && graph.edge_between(w[0], w[1]).is_none() {
            return Feasibility::Violated(Criterion::MissingEdge);
        }
    }
    let mut seen = HashSet::with_capacity(route.len());
    if !route.iter().all(|v| seen.insert(*v)) {
        return Feasibility::Violated(Criterion::RepeatedVertex);
    }
    let mut used = HashSet::with_capacity(route.len());
    for w in route.windows(2) {
        if !used.insert(graph.edge_index(w[0], w[1])) {
            return Feasibility::Violated(Criterion::RepeatedEdge);
        }
    }
    Feasibility::Feasible
}
