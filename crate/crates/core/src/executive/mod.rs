//! The closed mission loop: route with TAMP, plan and fly each leg with OPP,
//! re-route when a leg overruns, and account the mission cost.

mod cost;
mod transcript;

pub use cost::{mission_cost, replan_trigger};
pub use transcript::{write_transcript, Event, Planner, ReplanReason};

use crate::graph::{fastest_route, MissionGraph, Route};
use crate::opp::{
    solve_opp, ControlPolygon, ConvergenceRecord, Environment, OppConfig, OppError, OppSolution, PathSample,
    ViolationBreakdown,
};
use crate::par::{self, ExecPolicy};
use crate::rng;
use crate::tamp::{solve_tamp, IterationRecord, TampConfig, TampError};
use crate::terrain::{CurrentField, Obstacle, TerrainGrid};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExecutiveError {
    #[error("invalid world: {0}")]
    InvalidWorld(String),
    #[error("invalid mission configuration: {0}")]
    InvalidConfig(String),
    #[error("total obtained weight must be positive")]
    ZeroWeight,
    #[error("no route from waypoint {from} to {to}")]
    Unreachable { from: usize, to: usize },
    #[error(transparent)]
    Tamp(#[from] TampError),
    #[error(transparent)]
    Opp(#[from] OppError),
}

/// Current map in force from `time` onward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnapshotSwitch {
    pub time: f64,
    pub snapshot: usize,
}

/// Everything a mission is flown through. Snapshot 0 is active at the start.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub grid: TerrainGrid,
    pub graph: MissionGraph,
    pub snapshots: Vec<CurrentField>,
    pub switches: Vec<SnapshotSwitch>,
    pub obstacles: Vec<Obstacle>,
}

impl World {
    pub fn validate(&self) -> Result<(), ExecutiveError> {
        let bad = |m: String| Err(ExecutiveError::InvalidWorld(m));
        if self.snapshots.is_empty() {
            return bad("at least one current snapshot is required".into());
        }
        for s in &self.switches {
            if !(s.time >= 0.0 && s.time.is_finite()) {
                return bad(format!("snapshot switch at time {}", s.time));
            }
            if s.snapshot >= self.snapshots.len() {
                return bad(format!("switch to snapshot {} of {}", s.snapshot, self.snapshots.len()));
            }
        }
        if self.graph.start() == self.graph.destination() {
            return bad("start and destination coincide".into());
        }
        Ok(())
    }

    /// Snapshot in force at mission time `t`: the latest switch at or before
    /// `t`, ties going to the later entry.
    pub fn snapshot_at(&self, t: f64) -> usize {
        let mut best: Option<(f64, usize)> = None;
        for s in &self.switches {
            if s.time <= t && best.is_none_or(|(bt, _)| s.time >= bt) {
                best = Some((s.time, s.snapshot));
            }
        }
        best.map_or(0, |(_, k)| k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExecMode {
    #[default]
    Sequential,
    /// Plans the next leg's path while the re-plan check (and TAMP, if
    /// triggered) runs. Reports are identical to sequential mode.
    Concurrent,
}

/// How planner compute time is charged against the mission clock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComputeCharge {
    WallClock,
    /// Fixed seconds per invocation, for reproducible reports.
    Fixed { tamp: f64, opp: f64 },
}

impl Default for ComputeCharge {
    fn default() -> Self {
        Self::WallClock
    }
}

impl ComputeCharge {
    pub fn deterministic() -> Self {
        Self::Fixed { tamp: 1.0, opp: 0.5 }
    }
}

/// What the per-leg term of the mission cost sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostForm {
    /// Realized leg seconds plus the penalized violation, so the sum is
    /// commensurable with the time threshold.
    #[default]
    Seconds,
    /// The dimensionless path cost as optimized.
    Normalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MissionConfig {
    pub tamp: TampConfig,
    pub opp: OppConfig,
    pub phi1: f64,
    pub phi2: f64,
    pub mode: ExecMode,
    pub charge: ComputeCharge,
    /// Relative overrun that triggers re-routing.
    pub tolerance: f64,
    /// Total mission time, seconds.
    pub total_time: f64,
    /// Route time threshold; the total time when unset.
    pub route_threshold: Option<f64>,
    /// Headroom kept between the route budget and the time left, as a
    /// fraction of the route budget.
    pub time_margin: f64,
    /// Seconds held back from the route budget for planning.
    pub planning_reserve: f64,
    /// Extra warm-started path searches for a leg whose path still has
    /// violations.
    pub opp_retries: usize,
    pub cost_form: CostForm,
    pub seed: u64,
}

impl Default for MissionConfig {
    fn default() -> Self {
        Self {
            tamp: TampConfig::default(),
            opp: OppConfig::default(),
            phi1: 1.0,
            phi2: 1.0,
            mode: ExecMode::Sequential,
            charge: ComputeCharge::WallClock,
            tolerance: 0.1,
            total_time: 10_800.0,
            route_threshold: None,
            time_margin: 0.1,
            planning_reserve: 60.0,
            opp_retries: 1,
            cost_form: CostForm::Seconds,
            seed: 0,
        }
    }
}

impl MissionConfig {
    pub fn validate(&self) -> Result<(), ExecutiveError> {
        let bad = |m: String| Err(ExecutiveError::InvalidConfig(m));
        if !(self.total_time > 0.0 && self.total_time.is_finite()) {
            return bad(format!("total_time {}", self.total_time));
        }
        if let Some(t) = self.route_threshold {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("route_threshold {t}"));
            }
        }
        if !(self.tolerance >= 0.0 && self.time_margin >= 0.0 && self.planning_reserve >= 0.0) {
            return bad("tolerance, time_margin and planning_reserve must be non-negative".into());
        }
        if !(self.phi1 >= 0.0 && self.phi2 >= 0.0) {
            return bad("cost coefficients must be non-negative".into());
        }
        if let ComputeCharge::Fixed { tamp, opp } = self.charge {
            if !(tamp >= 0.0 && opp >= 0.0) {
                return bad("fixed compute charges must be non-negative".into());
            }
        }
        self.opp.validate()?;
        let probe = TampConfig { time_budget: 1.0, ..self.tamp.clone() };
        probe.validate()?;
        Ok(())
    }

    /// Time threshold the mission is measured against.
    pub fn threshold(&self) -> f64 {
        self.route_threshold.unwrap_or(self.total_time).min(self.total_time)
    }

    /// Route budget handed to TAMP at mission time `clock`.
    pub fn route_budget(&self, clock: f64) -> f64 {
        (self.threshold() - clock - self.planning_reserve) / (1.0 + self.time_margin)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    /// Reached the destination with time to spare.
    Completed,
    /// Reached the destination after the total time ran out.
    Late,
    /// Time ran out before the destination.
    Failed,
}

impl Outcome {
    pub fn reached_destination(self) -> bool {
        self != Outcome::Failed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegRecord {
    pub from: usize,
    pub to: usize,
    /// Mission time at which the leg was planned.
    pub planned_at: f64,
    pub snapshot: usize,
    pub expected_time: f64,
    pub realized_time: f64,
    pub arc_length: f64,
    pub path_cost: f64,
    pub violation: f64,
    pub violations: ViolationBreakdown,
    pub edge_weight: f64,
    pub task: Option<usize>,
}

/// A route handed to the vehicle, initial or re-planned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteRecord {
    pub planned_at: f64,
    pub from: usize,
    pub budget: f64,
    pub vertices: Vec<usize>,
    pub expected_time: f64,
    /// Fastest route used because no route fit the budget.
    pub fallback: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComputeEntry {
    pub planner: Planner,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionReport {
    pub outcome: Outcome,
    pub mission_cost: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub threshold: f64,
    pub total_time: f64,
    /// Sum of realized leg times.
    pub travel_time: f64,
    /// Sum of charged planner time.
    pub compute_time: f64,
    pub residual_time: f64,
    /// Sum of edge weights over flown legs.
    pub total_weight: f64,
    pub completed_tasks: usize,
    pub replans: usize,
    pub tamp_calls: usize,
    pub opp_calls: usize,
    /// Route plans that fell back to the fastest route.
    pub fallback_routes: usize,
    pub initial_route: Vec<usize>,
    pub initial_route_time: f64,
    /// Route cost of the first plan; absent when it fell back to the
    /// fastest route.
    pub initial_route_cost: Option<f64>,
    /// Seconds by which the first route exceeds the threshold.
    pub initial_route_violation: f64,
    pub visited: Vec<usize>,
    pub routes: Vec<RouteRecord>,
    pub legs: Vec<LegRecord>,
    pub compute_log: Vec<ComputeEntry>,
    pub violation_summary: ViolationBreakdown,
    pub colliding_legs: usize,
}

impl MissionReport {
    /// `|total - (travel + compute + residual)|`.
    pub fn conservation_error(&self) -> f64 {
        (self.total_time - (self.travel_time + self.compute_time + self.residual_time)).abs()
    }
}

/// Per-leg planner output kept for export.
#[derive(Debug, Clone, PartialEq)]
pub struct LegArtifact {
    pub from: usize,
    pub to: usize,
    pub convergence: Vec<ConvergenceRecord>,
    pub samples: Vec<PathSample>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionRun {
    pub report: MissionReport,
    pub transcript: Vec<Event>,
    pub legs: Vec<LegArtifact>,
    pub tamp_logs: Vec<Vec<IterationRecord>>,
}

/// Expected-versus-realized table, one row per flown leg.
pub fn write_leg_table<W: std::io::Write>(legs: &[LegRecord], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "leg", "from", "to", "planned_at", "snapshot", "expected_time", "realized_time", "arc_length", "path_cost",
        "violation", "collision", "edge_weight",
    ])?;
    for (i, l) in legs.iter().enumerate() {
        w.write_record([
            i.to_string(),
            l.from.to_string(),
            l.to.to_string(),
            l.planned_at.to_string(),
            l.snapshot.to_string(),
            l.expected_time.to_string(),
            l.realized_time.to_string(),
            l.arc_length.to_string(),
            l.path_cost.to_string(),
            l.violation.to_string(),
            l.violations.collision.to_string(),
            l.edge_weight.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

struct RoutePlan {
    route: Option<Route>,
    cost: Option<f64>,
    compute: f64,
    fallback: bool,
    log: Vec<IterationRecord>,
}

struct LegPlan {
    solution: OppSolution,
    /// Charge per path search, retries included.
    charges: Vec<f64>,
    snapshot: usize,
    planned_at: f64,
}

struct Runner<'a> {
    world: &'a World,
    cfg: &'a MissionConfig,
}

impl Runner<'_> {
    fn charge(&self, planner: Planner, measured: f64) -> f64 {
        match (self.cfg.charge, planner) {
            (ComputeCharge::WallClock, _) => measured,
            (ComputeCharge::Fixed { tamp, .. }, Planner::Tamp) => tamp,
            (ComputeCharge::Fixed { opp, .. }, Planner::Opp) => opp,
        }
    }

    fn plan_route(
        &self,
        at: usize,
        visited: &HashSet<usize>,
        completed: &HashSet<usize>,
        budget: f64,
        call: usize,
    ) -> Result<RoutePlan, ExecutiveError> {
        let clock = Instant::now();
        let view = self.world.graph.replanning_view(at, visited, completed);
        let mut solved = None;
        let mut log = Vec::new();
        if budget > 0.0 {
            let tcfg = TampConfig {
                time_budget: budget,
                seed: rng::derive(self.cfg.seed, &[0, call as u64]),
                ..self.cfg.tamp.clone()
            };
            match solve_tamp(&view, &tcfg) {
                Ok(s) => {
                    log = s.log;
                    solved = Some((s.route, s.evaluation.cost));
                }
                Err(TampError::NoSolution { .. }) | Err(TampError::DeadEnd) => {}
                Err(e) => return Err(e.into()),
            }
        }
        let fallback = solved.is_none();
        let (route, cost) = match solved {
            Some((r, c)) => (Some(r), Some(c)),
            None => {
                let r = fastest_route(&view)
                    .or_else(|| fastest_route(&self.world.graph.replanning_view(at, &HashSet::new(), completed)));
                (r, None)
            }
        };
        let compute = self.charge(Planner::Tamp, clock.elapsed().as_secs_f64());
        Ok(RoutePlan { route, cost, compute, fallback, log })
    }

    fn plan_leg(
        &self,
        from: usize,
        to: usize,
        planned_at: f64,
        warm: Option<&ControlPolygon>,
        leg_index: usize,
    ) -> Result<LegPlan, ExecutiveError> {
        let snapshot = self.world.snapshot_at(planned_at);
        let env = Environment {
            grid: &self.world.grid,
            field: &self.world.snapshots[snapshot],
            obstacles: &self.world.obstacles,
            clock: planned_at,
        };
        let g = &self.world.graph;
        let mut warm = warm.cloned();
        let mut charges = Vec::new();
        let mut attempt = 0;
        loop {
            let ocfg = OppConfig {
                seed: rng::derive(self.cfg.seed, &[1, leg_index as u64, from as u64, to as u64, attempt]),
                ..self.cfg.opp.clone()
            };
            let solution = solve_opp(g.position(from), g.position(to), &env, &ocfg, warm.as_ref())?;
            charges.push(self.charge(Planner::Opp, solution.compute_time));
            if solution.is_feasible() || attempt as usize >= self.cfg.opp_retries {
                return Ok(LegPlan { solution, charges, snapshot, planned_at });
            }
            warm = Some(solution.best.polygon.clone());
            attempt += 1;
        }
    }
}

fn route_time(graph: &MissionGraph, vertices: &[usize]) -> f64 {
    vertices
        .windows(2)
        .map(|w| graph.edge_between(w[0], w[1]).map_or(0.0, |e| e.time))
        .sum()
}

/// Flies a mission to completion or until time runs out.
pub fn run_mission(world: &World, cfg: &MissionConfig) -> Result<MissionRun, ExecutiveError> {
    world.validate()?;
    cfg.validate()?;
    let runner = Runner { world, cfg };
    let graph = &world.graph;
    let dest = graph.destination();
    let policy = match cfg.mode {
        ExecMode::Sequential => ExecPolicy::Sequential,
        ExecMode::Concurrent => ExecPolicy::Parallel,
    };

    let mut events = Vec::new();
    let mut artifacts = Vec::new();
    let mut tamp_logs = Vec::new();
    let mut compute_log: Vec<ComputeEntry> = Vec::new();
    let mut legs: Vec<LegRecord> = Vec::new();
    let mut travel = 0.0;
    let mut compute = 0.0;
    let mut at = graph.start();
    let mut visited: HashSet<usize> = HashSet::from([at]);
    let mut visit_order = vec![at];
    let mut completed: HashSet<usize> = HashSet::new();
    let mut cache: HashMap<(usize, usize), ControlPolygon> = HashMap::new();
    let mut tamp_calls = 0;
    let mut opp_calls = 0;
    let mut fallbacks = 0;
    let mut snapshot = 0;

    let budget = cfg.route_budget(0.0);
    events.push(Event::PlanStart { clock: 0.0, planner: Planner::Tamp, from: at, to: dest, budget: Some(budget) });
    let first = runner.plan_route(at, &visited, &completed, budget, 0)?;
    tamp_calls += 1;
    compute += first.compute;
    compute_log.push(ComputeEntry { planner: Planner::Tamp, seconds: first.compute });
    events.push(Event::PlanEnd { clock: travel + compute, planner: Planner::Tamp, compute: first.compute, ok: !first.fallback });
    fallbacks += first.fallback as usize;
    tamp_logs.push(first.log);
    let route = first.route.ok_or(ExecutiveError::Unreachable { from: at, to: dest })?;
    let initial_route = route.vertices().to_vec();
    let initial_route_time = route_time(graph, &initial_route);
    let mut routes = vec![RouteRecord {
        planned_at: 0.0,
        from: at,
        budget,
        vertices: initial_route.clone(),
        expected_time: initial_route_time,
        fallback: first.fallback,
    }];
    let initial_route_cost = first.cost;
    let mut plan: Vec<usize> = initial_route.clone();
    let mut pos = 0;
    let mut arrival = 0.0;
    let mut speculative: Option<((usize, usize), Result<LegPlan, ExecutiveError>)> = None;

    let outcome = loop {
        let clock = travel + compute;
        if at == dest {
            break if cfg.total_time - travel - compute >= 0.0 { Outcome::Completed } else { Outcome::Late };
        }
        if cfg.total_time - clock <= 0.0 {
            break Outcome::Failed;
        }
        let next = plan[pos + 1];
        let leg_index = legs.len();
        let leg = match speculative.take() {
            Some((key, p)) if key == (at, next) => p?,
            _ => runner.plan_leg(at, next, arrival, cache.get(&(at, next)), leg_index)?,
        };
        events.push(Event::PlanStart { clock, planner: Planner::Opp, from: at, to: next, budget: None });
        let mut leg_compute = 0.0;
        for &c in &leg.charges {
            compute += c;
            leg_compute += c;
            compute_log.push(ComputeEntry { planner: Planner::Opp, seconds: c });
        }
        opp_calls += leg.charges.len();
        events.push(Event::PlanEnd { clock: travel + compute, planner: Planner::Opp, compute: leg_compute, ok: leg.solution.is_feasible() });

        let edge = *graph.edge_between(at, next).expect("routes follow graph edges");
        let best = &leg.solution.best;
        events.push(Event::LegStart { clock: travel + compute, from: at, to: next, expected: edge.time, snapshot: leg.snapshot });
        travel += best.flight_time;
        events.push(Event::LegEnd { clock: travel + compute, from: at, to: next, realized: best.flight_time, violation: best.violation });
        legs.push(LegRecord {
            from: at,
            to: next,
            planned_at: leg.planned_at,
            snapshot: leg.snapshot,
            expected_time: edge.time,
            realized_time: best.flight_time,
            arc_length: best.arc_length,
            path_cost: best.cost,
            violation: best.violation,
            violations: best.violations,
            edge_weight: edge.weight,
            task: edge.task,
        });
        artifacts.push(LegArtifact { from: at, to: next, convergence: leg.solution.log.clone(), samples: best.samples.clone() });
        cache.insert((at, next), best.polygon.clone());
        if let Some(t) = edge.task {
            completed.insert(t);
        }
        at = next;
        pos += 1;
        visited.insert(at);
        visit_order.push(at);
        if at == dest {
            continue;
        }

        arrival = travel + compute;
        let now = world.snapshot_at(arrival);
        if now != snapshot {
            snapshot = now;
            events.push(Event::SnapshotSwitch { clock: arrival, snapshot });
        }
        let remaining = cfg.total_time - arrival;
        let ahead = route_time(graph, &plan[pos..]);
        let reason = if replan_trigger(edge.time, best.flight_time, cfg.tolerance) {
            Some(ReplanReason::Overrun)
        } else if ahead > remaining {
            Some(ReplanReason::Deficit)
        } else {
            None
        };
        let budget = cfg.route_budget(arrival);
        let call = tamp_calls;
        let lookahead = (at, plan[pos + 1]);
        let do_route = || reason.map(|_| runner.plan_route(at, &visited, &completed, budget, call));
        let (routed, spec) = match cfg.mode {
            ExecMode::Sequential => (do_route(), None),
            ExecMode::Concurrent => {
                let warm = cache.get(&lookahead);
                let leg_index = legs.len();
                let (r, s) = par::join(policy, do_route, || {
                    runner.plan_leg(lookahead.0, lookahead.1, arrival, warm, leg_index)
                });
                (r, Some((lookahead, s)))
            }
        };
        speculative = spec;
        if let (Some(reason), Some(routed)) = (reason, routed) {
            let routed = routed?;
            events.push(Event::ReplanTrigger { clock: arrival, at, reason });
            events.push(Event::PlanStart { clock: arrival, planner: Planner::Tamp, from: at, to: dest, budget: Some(budget) });
            tamp_calls += 1;
            compute += routed.compute;
            compute_log.push(ComputeEntry { planner: Planner::Tamp, seconds: routed.compute });
            events.push(Event::PlanEnd { clock: travel + compute, planner: Planner::Tamp, compute: routed.compute, ok: !routed.fallback });
            fallbacks += routed.fallback as usize;
            tamp_logs.push(routed.log);
            let route = routed.route.ok_or(ExecutiveError::Unreachable { from: at, to: dest })?;
            plan = route.vertices().to_vec();
            pos = 0;
            routes.push(RouteRecord {
                planned_at: arrival,
                from: at,
                budget,
                vertices: plan.clone(),
                expected_time: route_time(graph, &plan),
                fallback: routed.fallback,
            });
        }
    };

    let residual = cfg.total_time - travel - compute;
    events.push(Event::MissionEnd { clock: travel + compute, outcome, residual });
    let penalty = cfg.opp.penalty;
    let leg_total: f64 = legs
        .iter()
        .map(|l| match cfg.cost_form {
            CostForm::Seconds => l.realized_time + penalty * l.violation,
            CostForm::Normalized => l.path_cost,
        })
        .sum();
    let total_weight: f64 = legs.iter().map(|l| l.edge_weight).sum();
    let mission_cost = mission_cost(leg_total, cfg.threshold(), total_weight, compute, cfg.phi1, cfg.phi2)?;
    let mut summary = ViolationBreakdown::default();
    for l in &legs {
        let v = &l.violations;
        summary.depth_min += v.depth_min;
        summary.depth_max += v.depth_max;
        summary.surge += v.surge;
        summary.sway += v.sway;
        summary.yaw_rate += v.yaw_rate;
        summary.collision += v.collision;
    }
    let report = MissionReport {
        outcome,
        mission_cost,
        phi1: cfg.phi1,
        phi2: cfg.phi2,
        threshold: cfg.threshold(),
        total_time: cfg.total_time,
        travel_time: travel,
        compute_time: compute,
        residual_time: residual,
        total_weight,
        completed_tasks: completed.len(),
        replans: tamp_calls - 1,
        tamp_calls,
        opp_calls,
        fallback_routes: fallbacks,
        initial_route_violation: (initial_route_time - cfg.threshold()).max(0.0),
        initial_route,
        initial_route_time,
        initial_route_cost,
        visited: visit_order,
        routes,
        colliding_legs: legs.iter().filter(|l| l.violations.collision > 0.0).count(),
        legs,
        compute_log,
        violation_summary: summary,
    };
    Ok(MissionRun { report, transcript: events, legs: artifacts, tamp_logs })
}
