//! Task-assignment route planning: route evaluation and four population
//! optimizers (ant colony, biogeography, genetic, particle swarm).

mod aco;
mod bbo;
mod eval;
mod ga;
mod pso;

pub use aco::{aco_transition_prob, aco_update_pheromone, AcoParams};
pub use bbo::BboRouteParams;
pub use eval::{route_cost, route_time, route_weight, CostWeights, RouteEvaluation};
pub use ga::{apply_mutation, uniform_crossover, GaParams, MutationOp};
pub use pso::PsoRouteParams;

use crate::graph::{decode_priority_vector, fastest_route, route_priorities, MissionGraph, Route};
use crate::par::ExecPolicy;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TampError {
    #[error("invalid planner configuration: {0}")]
    InvalidConfig(String),
    #[error("no route reaches the destination within the {budget} s budget")]
    NoSolution { budget: f64 },
    #[error("dead end: no admissible neighbor")]
    DeadEnd,
    #[error("iteration log: {0}")]
    Log(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TampAlgorithm {
    Aco,
    Bbo,
    Ga,
    Pso,
}

impl TampAlgorithm {
    pub const ALL: [TampAlgorithm; 4] = [Self::Aco, Self::Bbo, Self::Ga, Self::Pso];

    pub fn name(self) -> &'static str {
        match self {
            Self::Aco => "ACO",
            Self::Bbo => "BBO",
            Self::Ga => "GA",
            Self::Pso => "PSO",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TampConfig {
    pub algorithm: TampAlgorithm,
    pub population: usize,
    pub iterations: usize,
    /// Route time budget in seconds; routes must finish strictly earlier.
    pub time_budget: f64,
    pub cost: CostWeights,
    pub aco: AcoParams,
    pub bbo: BboRouteParams,
    pub ga: GaParams,
    pub pso: PsoRouteParams,
    /// Put the minimum-time route into the initial population (or the
    /// incumbent, for ACO) so a feasible answer is found whenever one exists.
    pub seed_fastest_route: bool,
    pub policy: ExecPolicy,
    pub seed: u64,
}

impl Default for TampConfig {
    fn default() -> Self {
        Self {
            algorithm: TampAlgorithm::Ga,
            population: 50,
            iterations: 200,
            time_budget: 3.42e4,
            cost: CostWeights::default(),
            aco: AcoParams::default(),
            bbo: BboRouteParams::default(),
            ga: GaParams::default(),
            pso: PsoRouteParams::default(),
            seed_fastest_route: true,
            policy: ExecPolicy::Sequential,
            seed: 0,
        }
    }
}

impl TampConfig {
    pub fn validate(&self) -> Result<(), TampError> {
        let bad = |m: String| Err(TampError::InvalidConfig(m));
        if self.population < 2 {
            return bad(format!("population {} < 2", self.population));
        }
        if self.iterations < 1 {
            return bad("iterations must be at least 1".into());
        }
        if !(self.time_budget > 0.0 && self.time_budget.is_finite()) {
            return bad(format!("time budget {}", self.time_budget));
        }
        if !(self.aco.evaporation > 0.0 && self.aco.evaporation <= 1.0) {
            return bad(format!("evaporation {} outside (0, 1]", self.aco.evaporation));
        }
        if !(0.0..=1.0).contains(&self.ga.mix_ratio) || !(0.0..=1.0).contains(&self.ga.mutation_rate) {
            return bad("GA rates must lie in [0, 1]".into());
        }
        if self.bbo.elites >= self.population {
            return bad("BBO elites must be fewer than the population".into());
        }
        Ok(())
    }
}

/// Best-so-far snapshot after one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub best_cost: f64,
    pub best_time: f64,
    pub best_weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TampSolution {
    pub route: Route,
    pub evaluation: RouteEvaluation,
    /// Wall-clock seconds spent in the solver.
    pub compute_time: f64,
    pub log: Vec<IterationRecord>,
}

/// Writes the iteration log as CSV.
pub fn write_iteration_log<W: Write>(log: &[IterationRecord], out: W) -> Result<(), TampError> {
    let mut w = csv::Writer::from_writer(out);
    for r in log {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Scored candidate; `score` is the penalized cost (infinite if undecodable
/// or over budget).
#[derive(Debug, Clone)]
pub(crate) struct Scored {
    pub route: Option<Route>,
    pub eval: Option<RouteEvaluation>,
    pub score: f64,
}

pub(crate) struct Evaluator<'g> {
    pub graph: &'g MissionGraph,
    pub budget: f64,
    pub weights: CostWeights,
}

impl Evaluator<'_> {
    pub fn route(&self, route: Route) -> Scored {
        let eval = route_cost(self.graph, &route, self.budget, &self.weights);
        Scored { score: eval.penalized(), route: Some(route), eval: Some(eval) }
    }

    pub fn priorities(&self, p: &[f64]) -> Scored {
        match decode_priority_vector(self.graph, p) {
            Ok(route) => self.route(route),
            Err(_) => Scored { route: None, eval: None, score: f64::INFINITY },
        }
    }
}

/// Best-so-far tracker; replaces only on strict improvement.
#[derive(Default)]
pub(crate) struct Incumbent {
    best: Option<(Route, RouteEvaluation)>,
    pub log: Vec<IterationRecord>,
}

impl Incumbent {
    pub fn score(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |(_, e)| e.penalized())
    }

    pub fn offer(&mut self, s: &Scored) {
        if s.score < self.score() {
            if let (Some(r), Some(e)) = (&s.route, s.eval) {
                self.best = Some((r.clone(), e));
            }
        }
    }

    pub fn record(&mut self, iteration: usize) {
        let (cost, time, weight) = match &self.best {
            Some((_, e)) => (e.cost, e.time, e.total_weight),
            None => (f64::INFINITY, f64::NAN, f64::NAN),
        };
        self.log.push(IterationRecord { iteration, best_cost: cost, best_time: time, best_weight: weight });
    }
}

/// Priority vector of the minimum-time route, if seeding is enabled and the
/// destination is reachable.
pub(crate) fn fastest_priorities(graph: &MissionGraph, config: &TampConfig) -> Option<Vec<f64>> {
    if !config.seed_fastest_route {
        return None;
    }
    fastest_route(graph).map(|r| route_priorities(graph.len(), &r))
}

/// Runs the configured optimizer and returns the best within-budget route.
pub fn solve_tamp(graph: &MissionGraph, config: &TampConfig) -> Result<TampSolution, TampError> {
    config.validate()?;
    let clock = Instant::now();
    let eval = Evaluator { graph, budget: config.time_budget, weights: config.cost };
    let incumbent = match config.algorithm {
        TampAlgorithm::Aco => aco::run(&eval, config),
        TampAlgorithm::Bbo => bbo::run(&eval, config),
        TampAlgorithm::Ga => ga::run(&eval, config),
        TampAlgorithm::Pso => pso::run(&eval, config),
    };
    let compute_time = clock.elapsed().as_secs_f64();
    match incumbent.best {
        Some((route, evaluation)) if !evaluation.over_budget => {
            Ok(TampSolution { route, evaluation, compute_time, log: incumbent.log })
        }
        _ => Err(TampError::NoSolution { budget: config.time_budget }),
    }
}
