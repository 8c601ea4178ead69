use crate::graph::{MissionGraph, Route};
use serde::{Deserialize, Serialize};

/// Coefficients of the two cost terms: relative time deviation and inverse
/// collected weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostWeights {
    pub time: f64,
    pub weight: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self { time: 1.0, weight: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RouteEvaluation {
    /// Sum of edge traversal times, seconds.
    pub time: f64,
    pub total_weight: f64,
    pub cost: f64,
    /// `max(0, time - budget)`, seconds.
    pub time_violation: f64,
    /// True when `time >= budget`; such routes are never accepted.
    pub over_budget: bool,
}

impl RouteEvaluation {
    /// Cost with the death penalty applied.
    pub fn penalized(&self) -> f64 {
        if self.over_budget {
            f64::INFINITY
        } else {
            self.cost
        }
    }
}

pub fn route_time(graph: &MissionGraph, route: &Route) -> f64 {
    route.edges(graph).map(|e| e.time).sum()
}

pub fn route_weight(graph: &MissionGraph, route: &Route) -> f64 {
    route.edges(graph).map(|e| e.weight).sum()
}

/// Cost of `route` against time budget `budget` (seconds).
pub fn route_cost(graph: &MissionGraph, route: &Route, budget: f64, weights: &CostWeights) -> RouteEvaluation {
    let time = route_time(graph, route);
    let total_weight = route_weight(graph, route);
    let cost = weights.time * (time - budget).abs() / budget + weights.weight / total_weight;
    RouteEvaluation {
        time,
        total_weight,
        cost,
        time_violation: (time - budget).max(0.0),
        over_budget: time >= budget,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;
    use crate::graph::{EdgeSpec, Task};

    fn chain(lengths: &[f64], speed: f64, task_weights: &[Option<f64>]) -> MissionGraph {
        let mut x = 0.0;
        let mut pos = vec![Vec3::ZERO];
        for l in lengths {
            x += l;
            pos.push(Vec3::new(x, 0.0, 0.0));
        }
        let specs: Vec<EdgeSpec> = (0..lengths.len())
            .map(|i| EdgeSpec {
                a: i,
                b: i + 1,
                task: task_weights.get(i).copied().flatten().map(|w| Task { id: i, weight: w }),
            })
            .collect();
        MissionGraph::new(&pos, &specs, 0, lengths.len(), speed).unwrap()
    }

    #[test]
    fn single_edge_time() {
        let g = chain(&[100.0], 2.0, &[]);
        let r = Route::new(&g, vec![0, 1]).unwrap();
        assert_eq!(route_time(&g, &r), 50.0);
    }

    #[test]
    fn degenerate_route_takes_no_time() {
        let pos = [Vec3::ZERO];
        let g = MissionGraph::new(&pos, &[], 0, 0, 2.0).unwrap();
        let r = Route::new(&g, vec![0]).unwrap();
        assert_eq!(route_time(&g, &r), 0.0);
    }

    #[test]
    fn three_edge_time() {
        let g = chain(&[100.0, 200.0, 300.0], 2.5, &[]);
        let r = Route::new(&g, vec![0, 1, 2, 3]).unwrap();
        assert!((route_time(&g, &r) - (40.0 + 80.0 + 120.0)).abs() < 1e-12);
    }

    #[test]
    fn on_budget_cost_is_inverse_weight() {
        let g = chain(&[100.0, 100.0], 2.0, &[Some(4.0), None]);
        let r = Route::new(&g, vec![0, 1, 2]).unwrap();
        let e = route_cost(&g, &r, 100.0, &CostWeights::default());
        assert_eq!(e.total_weight, 6.0);
        assert_eq!(e.cost, 1.0 / 6.0);
        assert!(e.over_budget);
        assert_eq!(e.penalized(), f64::INFINITY);
        assert_eq!(e.time_violation, 0.0);
    }

    #[test]
    fn heavier_route_costs_less_at_equal_deviation() {
        let light = chain(&[100.0], 2.0, &[Some(9.0)]);
        let heavy = chain(&[100.0], 2.0, &[Some(99.0)]);
        let w = CostWeights::default();
        let cl = route_cost(&light, &Route::new(&light, vec![0, 1]).unwrap(), 80.0, &w);
        let ch = route_cost(&heavy, &Route::new(&heavy, vec![0, 1]).unwrap(), 80.0, &w);
        assert!(ch.cost < cl.cost);
        assert!(!ch.over_budget);
    }

    #[test]
    fn over_budget_violation_amount() {
        let g = chain(&[100.0], 1.0, &[]);
        let e = route_cost(&g, &Route::new(&g, vec![0, 1]).unwrap(), 60.0, &CostWeights::default());
        assert_eq!(e.time_violation, 40.0);
        assert!(e.over_budget);
    }
}
