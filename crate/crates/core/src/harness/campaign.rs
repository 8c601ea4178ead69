//! Monte Carlo campaigns over (route planner, path planner) pairs.

use super::{HarnessError, Scenario};
use crate::executive::{run_mission, MissionConfig, MissionReport};
use crate::opp::OppAlgorithm;
use crate::par::{self, ExecPolicy};
use crate::rng;
use crate::tamp::TampAlgorithm;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSpec {
    pub runs: usize,
    pub pairs: Vec<(TampAlgorithm, OppAlgorithm)>,
    pub seed: u64,
    /// Worker threads; 1 runs everything on the calling thread.
    pub threads: usize,
    /// Inclusive node-count range drawn per run.
    pub node_range: (usize, usize),
    /// Waypoint jitter std as a fraction of terrain width.
    pub jitter_fraction: f64,
}

impl Default for CampaignSpec {
    fn default() -> Self {
        Self { runs: 30, pairs: campaign_pairs(), seed: 0, threads: 1, node_range: (30, 50), jitter_fraction: 0.05 }
    }
}

/// Every route planner crossed with every path planner.
pub fn campaign_pairs() -> Vec<(TampAlgorithm, OppAlgorithm)> {
    TampAlgorithm::ALL.iter().flat_map(|&t| OppAlgorithm::ALL.iter().map(move |&o| (t, o))).collect()
}

/// One mission of a campaign. Times are seconds; `compute_time` is the
/// charged planner time, so it is reproducible under fixed charging.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignRecord {
    pub run: usize,
    pub seed: u64,
    pub tamp: String,
    pub opp: String,
    pub nodes: usize,
    /// `completed`, `late`, `failed`, or `error` when the run could not be set up.
    pub outcome: String,
    pub compute_time: f64,
    pub planner_calls: usize,
    pub route_time: f64,
    pub total_weight: f64,
    pub completed_tasks: usize,
    pub route_cost: Option<f64>,
    pub route_violation: f64,
    pub total_cost: f64,
    pub residual_time: f64,
    pub travel_time: f64,
    pub total_time: f64,
    pub replans: usize,
    pub colliding_legs: usize,
    pub error: String,
}

impl CampaignRecord {
    pub fn is_error(&self) -> bool {
        self.outcome == "error"
    }

    pub fn conservation_error(&self) -> f64 {
        (self.total_time - (self.travel_time + self.compute_time + self.residual_time)).abs()
    }

    fn from_report(run: usize, seed: u64, nodes: usize, pair: (TampAlgorithm, OppAlgorithm), r: &MissionReport) -> Self {
        Self {
            run,
            seed,
            tamp: pair.0.name().into(),
            opp: pair.1.name().into(),
            nodes,
            outcome: serde_json::to_value(r.outcome).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            compute_time: r.compute_time,
            planner_calls: r.tamp_calls + r.opp_calls,
            route_time: r.initial_route_time,
            total_weight: r.total_weight,
            completed_tasks: r.completed_tasks,
            route_cost: r.initial_route_cost,
            route_violation: r.initial_route_violation,
            total_cost: r.mission_cost,
            residual_time: r.residual_time,
            travel_time: r.travel_time,
            total_time: r.total_time,
            replans: r.replans,
            colliding_legs: r.colliding_legs,
            error: String::new(),
        }
    }

    fn failed_setup(run: usize, seed: u64, nodes: usize, pair: (TampAlgorithm, OppAlgorithm), e: &dyn std::fmt::Display) -> Self {
        Self {
            run,
            seed,
            tamp: pair.0.name().into(),
            opp: pair.1.name().into(),
            nodes,
            outcome: "error".into(),
            compute_time: 0.0,
            planner_calls: 0,
            route_time: 0.0,
            total_weight: 0.0,
            completed_tasks: 0,
            route_cost: None,
            route_violation: 0.0,
            total_cost: 0.0,
            residual_time: 0.0,
            travel_time: 0.0,
            total_time: 0.0,
            replans: 0,
            colliding_legs: 0,
            error: e.to_string(),
        }
    }
}

/// Machine-dependent wall-clock per mission, kept apart from the records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRecord {
    pub run: usize,
    pub tamp: String,
    pub opp: String,
    pub wall_clock_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Campaign {
    pub records: Vec<CampaignRecord>,
    pub timings: Vec<TimingRecord>,
}

/// Runs every pair on the world of run `run`. Failures become records.
pub fn run_single(template: &Scenario, spec: &CampaignSpec, run: usize) -> (Vec<CampaignRecord>, Vec<TimingRecord>) {
    let mut r = rng::seeded(rng::derive(spec.seed, &[run as u64]));
    let (lo, hi) = spec.node_range;
    let drawn = r.random_range(lo.min(hi)..=hi.max(lo));
    let seed = rng::derive(spec.seed, &[run as u64, 1]);
    let mut sc = template.clone();
    sc.seed = seed;
    sc.jitter_fraction = spec.jitter_fraction;
    if sc.layout.is_none() {
        sc.graph.node_count = drawn;
    }
    let world = sc.build_world();
    let nodes = world.as_ref().map_or(sc.graph.node_count, |w| w.graph.len());
    let mut records = Vec::with_capacity(spec.pairs.len());
    let mut timings = Vec::with_capacity(spec.pairs.len());
    for &pair in &spec.pairs {
        let clock = Instant::now();
        let record = match &world {
            Err(e) => CampaignRecord::failed_setup(run, seed, nodes, pair, e),
            Ok(w) => {
                let mut cfg: MissionConfig = sc.mission.clone();
                cfg.tamp.algorithm = pair.0;
                cfg.opp.algorithm = pair.1;
                cfg.seed = seed;
                match run_mission(w, &cfg) {
                    Ok(m) => CampaignRecord::from_report(run, seed, nodes, pair, &m.report),
                    Err(e) => CampaignRecord::failed_setup(run, seed, nodes, pair, &e),
                }
            }
        };
        records.push(record);
        timings.push(TimingRecord {
            run,
            tamp: pair.0.name().into(),
            opp: pair.1.name().into(),
            wall_clock_s: clock.elapsed().as_secs_f64(),
        });
    }
    (records, timings)
}

/// Runs `spec.runs` worlds drawn from `template`. Records come back ordered
/// by run, then pair, whatever the thread count.
pub fn run_campaign(template: &Scenario, spec: &CampaignSpec) -> Result<Campaign, HarnessError> {
    template.validate()?;
    if spec.runs == 0 {
        return Err(HarnessError::Field { path: "runs".into(), message: "must be at least 1".into() });
    }
    if spec.pairs.is_empty() {
        return Err(HarnessError::Field { path: "pairs".into(), message: "no algorithm pairs".into() });
    }
    let policy = if spec.threads > 1 { ExecPolicy::Parallel } else { ExecPolicy::Sequential };
    let runs: Vec<usize> = (0..spec.runs).collect();
    let per_run = par::with_threads(spec.threads, || par::map(policy, &runs, |&i| run_single(template, spec, i)));
    let mut records = Vec::new();
    let mut timings = Vec::new();
    for (r, t) in per_run {
        records.extend(r);
        timings.extend(t);
    }
    Ok(Campaign { records, timings })
}

pub fn write_records<W: Write>(records: &[CampaignRecord], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_timings<W: Write>(timings: &[TimingRecord], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for t in timings {
        w.serialize(t)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<CampaignRecord>, HarnessError> {
    let mut rd = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in rd.deserialize() {
        out.push(row?);
    }
    Ok(out)
}
