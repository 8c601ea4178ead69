use super::{MissionGraph, Route};
use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use thiserror::Error;

/// Upper end of the range priorities are initialized in.
pub const PRIORITY_SCALE: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("priority vector has length {got}, graph has {expected} vertices")]
    Length { expected: usize, got: usize },
    #[error("destination unreachable from the start vertex")]
    Trapped,
}

fn by_priority(priorities: &[f64]) -> impl Fn(&usize, &usize) -> Ordering + '_ {
    move |&a, &b| priorities[b].total_cmp(&priorities[a]).then(a.cmp(&b))
}

/// Priority-guided depth-first walk from the start vertex. At each step the
/// walk moves to the unvisited neighbor with the highest priority (lower id
/// on ties). When a vertex has no unvisited neighbor the walk steps back and
/// tries the next candidate at the previous vertex; vertices stay marked, so
/// the result is always a simple path. Fails only when the destination is
/// unreachable.
pub fn decode_priority_vector(graph: &MissionGraph, priorities: &[f64]) -> Result<Route, DecodeError> {
    if priorities.len() != graph.len() {
        return Err(DecodeError::Length { expected: graph.len(), got: priorities.len() });
    }
    let order = by_priority(priorities);
    let mut visited = vec![false; graph.len()];
    let start = graph.start();
    visited[start] = true;
    // Each frame: vertex and its remaining candidates, best last.
    let candidates = |v: usize| {
        let mut c: Vec<usize> = graph.neighbors(v).iter().map(|&(u, _)| u).collect();
        c.sort_by(|a, b| order(b, a));
        c
    };
    let mut stack = vec![(start, candidates(start))];
    while let Some((v, remaining)) = stack.last_mut() {
        if *v == graph.destination() {
            let path = stack.iter().map(|(u, _)| *u).collect();
            return Ok(Route { vertices: path });
        }
        match remaining.pop() {
            Some(u) if !visited[u] => {
                visited[u] = true;
                let next = candidates(u);
                stack.push((u, next));
            }
            Some(_) => {}
            None => {
                stack.pop();
            }
        }
    }
    Err(DecodeError::Trapped)
}

/// A priority vector that decodes to `route` on any graph where `route` is
/// feasible: route vertices get strictly decreasing priorities in
/// `(PRIORITY_SCALE / 2, PRIORITY_SCALE]`, every other vertex gets zero.
pub fn route_priorities(vertex_count: usize, route: &Route) -> Vec<f64> {
    let mut p = vec![0.0; vertex_count];
    let n = route.len() as f64;
    for (i, &v) in route.vertices().iter().enumerate() {
        p[v] = PRIORITY_SCALE * (1.0 - 0.5 * i as f64 / n);
    }
    p
}

#[derive(PartialEq)]
struct Dist(f64);
impl Eq for Dist {}
impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Dist {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Minimum traversal-time route from start to destination (Dijkstra, ties
/// resolved toward lower vertex ids).
pub fn fastest_route(graph: &MissionGraph) -> Option<Route> {
    let n = graph.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[graph.start()] = 0.0;
    heap.push(Reverse((Dist(0.0), graph.start())));
    while let Some(Reverse((Dist(d), v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        if v == graph.destination() {
            break;
        }
        for &(u, e) in graph.neighbors(v) {
            let nd = d + graph.edges()[e].time;
            if nd < dist[u] || (nd == dist[u] && v < prev[u]) {
                dist[u] = nd;
                prev[u] = v;
                heap.push(Reverse((Dist(nd), u)));
            }
        }
    }
    if !dist[graph.destination()].is_finite() {
        return None;
    }
    let mut path = vec![graph.destination()];
    while *path.last().unwrap() != graph.start() {
        path.push(prev[*path.last().unwrap()]);
    }
    path.reverse();
    Some(Route { vertices: path })
}
