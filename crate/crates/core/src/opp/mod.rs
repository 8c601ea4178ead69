//! Online path planning: B-spline legs between waypoints, scored on time and
//! kinodynamic/collision violations, optimized by DE, FA, BBO or PSO.

mod bbo;
mod de;
mod fa;
mod path;
mod pso;
mod spline;

pub use de::{de_crossover, de_crossover_with_mask, de_mutant, de_mutate, de_select, DeParams, Survivor};
pub use fa::{fa_move, fa_move_with, FaParams};
pub use path::{
    path_cost, path_violations, spline_path, write_trajectory_csv, Environment, PathCandidate, PathSample, TimeMode,
    VehicleLimits, ViolationBreakdown, ViolationWeights, MIN_GROUND_SPEED,
};
pub use pso::PsoPathParams;
pub use spline::{ControlPolygon, Corridor};

use crate::geometry::Vec3;
use crate::par::ExecPolicy;
use crate::rng;
use crate::swarm::BboParams;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OppError {
    #[error("control polygon needs distinct start and goal")]
    DegeneratePolygon,
    #[error("invalid path planner configuration: {0}")]
    InvalidConfig(String),
    #[error("differential evolution needs at least 4 individuals, got {0}")]
    PopulationTooSmall(usize),
    #[error("convergence log: {0}")]
    Log(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OppAlgorithm {
    De,
    Fa,
    Bbo,
    Pso,
}

impl OppAlgorithm {
    pub const ALL: [OppAlgorithm; 4] = [Self::De, Self::Fa, Self::Bbo, Self::Pso];

    pub fn name(self) -> &'static str {
        match self {
            Self::De => "DE",
            Self::Fa => "FA",
            Self::Bbo => "BBO",
            Self::Pso => "PSO",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OppConfig {
    pub algorithm: OppAlgorithm,
    pub interior_points: usize,
    pub population: usize,
    pub iterations: usize,
    /// Spline sample intervals; chosen from leg length and obstacle size
    /// when unset.
    pub samples: Option<usize>,
    pub weights: ViolationWeights,
    /// Scale on the weighted violation total.
    pub penalty: f64,
    pub limits: VehicleLimits,
    pub time_mode: TimeMode,
    /// Corridor growth per axis, as a fraction of the leg length.
    pub corridor_inflation: f64,
    pub de: DeParams,
    pub fa: FaParams,
    pub bbo: BboParams,
    pub pso: PsoPathParams,
    /// Share of the initial population seeded from a previous polygon.
    pub warm_start_fraction: f64,
    /// Include the straight start-goal polygon in a cold start.
    pub seed_straight_line: bool,
    pub policy: ExecPolicy,
    pub seed: u64,
}

impl Default for OppConfig {
    fn default() -> Self {
        Self {
            algorithm: OppAlgorithm::De,
            interior_points: 5,
            population: 30,
            iterations: 100,
            samples: None,
            weights: ViolationWeights::default(),
            penalty: 10.0,
            limits: VehicleLimits::default(),
            time_mode: TimeMode::CurrentAware,
            corridor_inflation: 0.25,
            de: DeParams::default(),
            fa: FaParams::default(),
            bbo: BboParams { mutation_max: 0.05, ..BboParams::default() },
            pso: PsoPathParams::default(),
            warm_start_fraction: 0.5,
            seed_straight_line: true,
            policy: ExecPolicy::Parallel,
            seed: 0,
        }
    }
}

/// Lower bound on spline sample intervals.
pub const MIN_SAMPLES: usize = 200;
/// Upper bound on automatically chosen sample intervals.
pub const MAX_AUTO_SAMPLES: usize = 2000;

impl OppConfig {
    pub fn validate(&self) -> Result<(), OppError> {
        let bad = |m: String| Err(OppError::InvalidConfig(m));
        let w = &self.weights;
        if [w.depth_min, w.depth_max, w.surge, w.sway, w.yaw_rate, w.collision, self.penalty]
            .iter()
            .any(|x| !(*x >= 0.0))
        {
            return bad("violation weights and penalty must be non-negative".into());
        }
        let l = &self.limits;
        if [l.cruise_speed, l.surge_max, l.sway_max, l.yaw_rate_max].iter().any(|x| !(*x > 0.0)) {
            return bad("vehicle limits must be positive".into());
        }
        if !(l.depth_min < l.depth_max) {
            return bad(format!("depth limits [{}, {}]", l.depth_min, l.depth_max));
        }
        if self.population < 2 || self.iterations < 1 {
            return bad("population must be at least 2 and iterations at least 1".into());
        }
        if self.algorithm == OppAlgorithm::De && self.population < 4 {
            return Err(OppError::PopulationTooSmall(self.population));
        }
        if let Some(m) = self.samples {
            if m < 2 * self.interior_points.max(1) {
                return bad(format!("{m} samples for {} control points", self.interior_points));
            }
        }
        if !(0.0..=1.0).contains(&self.warm_start_fraction) {
            return bad("warm start fraction outside [0, 1]".into());
        }
        if self.bbo.elites >= self.population {
            return bad("BBO elites must be fewer than the population".into());
        }
        Ok(())
    }

    /// Sample intervals for a leg: at least `max(200, 20n)`, dense enough
    /// that consecutive samples sit closer than half the smallest obstacle
    /// radius along a path up to 1.5x the straight distance.
    pub fn sample_intervals(&self, start: Vec3, goal: Vec3, obstacles: &[crate::terrain::Obstacle]) -> usize {
        if let Some(m) = self.samples {
            return m;
        }
        let base = MIN_SAMPLES.max(20 * self.interior_points);
        let r_min = obstacles.iter().map(|o| o.radius).fold(f64::INFINITY, f64::min);
        if !r_min.is_finite() {
            return base;
        }
        let need = (1.5 * start.distance(goal) / (0.5 * r_min)).ceil() as usize;
        need.clamp(base, MAX_AUTO_SAMPLES.max(base))
    }
}

/// Best-so-far entry per iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub iteration: usize,
    pub cost: f64,
    pub violation: f64,
}

pub fn write_convergence_csv<W: Write>(log: &[ConvergenceRecord], out: W) -> Result<(), OppError> {
    let mut w = csv::Writer::from_writer(out);
    for r in log {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct OppSolution {
    pub best: PathCandidate,
    /// Wall-clock seconds spent in the solver.
    pub compute_time: f64,
    pub log: Vec<ConvergenceRecord>,
}

impl OppSolution {
    /// False when no violation-free candidate was found; the path is then a
    /// best effort.
    pub fn is_feasible(&self) -> bool {
        self.best.is_violation_free()
    }
}

/// Straight-line duration used to make flight time dimensionless.
pub fn reference_time(start: Vec3, goal: Vec3, limits: &VehicleLimits) -> f64 {
    let t = start.distance(goal) / limits.cruise_speed;
    if t > 0.0 {
        t
    } else {
        1.0
    }
}

/// Evaluates a polygon in an environment: samples, violations, cost.
pub fn fly(polygon: &ControlPolygon, env: &Environment, cfg: &OppConfig, intervals: usize) -> PathCandidate {
    let (samples, arc_length) = spline_path(polygon, intervals, &cfg.limits, env.field, cfg.time_mode);
    let violations = path_violations(&samples, env, &cfg.limits);
    let flight_time = samples.last().map_or(0.0, |s| s.t);
    let t_ref = reference_time(polygon.start(), polygon.goal(), &cfg.limits);
    let cost = path_cost(flight_time, t_ref, &violations, &cfg.weights, cfg.penalty);
    PathCandidate {
        polygon: polygon.clone(),
        samples,
        arc_length,
        flight_time,
        violation: violations.weighted_total(&cfg.weights),
        violations,
        cost,
    }
}

/// Search problem over the flattened interior control points.
pub(crate) struct Problem<'a> {
    pub start: Vec3,
    pub goal: Vec3,
    pub corridor: Corridor,
    pub env: Environment<'a>,
    pub cfg: &'a OppConfig,
    pub intervals: usize,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Score {
    pub cost: f64,
    pub violation: f64,
}

impl Problem<'_> {
    pub fn polygon(&self, x: &[f64]) -> ControlPolygon {
        ControlPolygon::from_vector(self.start, self.goal, x, self.corridor).expect("endpoints checked up front")
    }

    pub fn score(&self, x: &[f64]) -> Score {
        let c = fly(&self.polygon(x), &self.env, self.cfg, self.intervals);
        Score { cost: c.cost, violation: c.violation }
    }

    pub fn score_all(&self, pop: &[Vec<f64>]) -> Vec<Score> {
        crate::par::map(self.cfg.policy, pop, |x| self.score(x))
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (j, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lo[j], self.hi[j]);
        }
    }

    pub fn width(&self, j: usize) -> f64 {
        self.hi[j] - self.lo[j]
    }

    pub fn random_point<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.lo.len()).map(|j| self.uniform(j, rng)).collect()
    }

    pub fn uniform<R: Rng>(&self, j: usize, rng: &mut R) -> f64 {
        if self.hi[j] > self.lo[j] {
            rng.random_range(self.lo[j]..=self.hi[j])
        } else {
            self.lo[j]
        }
    }
}

/// Best-so-far tracker. A candidate replaces the incumbent only when it is no
/// worse in both cost and violation and better in one, so both logged series
/// are non-increasing.
pub(crate) struct Tracker {
    pub best: Option<(Vec<f64>, Score)>,
    pub log: Vec<ConvergenceRecord>,
}

impl Tracker {
    pub fn new() -> Self {
        Self { best: None, log: Vec::new() }
    }

    pub fn offer(&mut self, x: &[f64], s: Score) {
        let take = match &self.best {
            None => true,
            Some((_, b)) => {
                s.cost <= b.cost && s.violation <= b.violation && (s.cost < b.cost || s.violation < b.violation)
            }
        };
        if take {
            self.best = Some((x.to_vec(), s));
        }
    }

    pub fn offer_all(&mut self, pop: &[Vec<f64>], scores: &[Score]) {
        for (x, s) in pop.iter().zip(scores) {
            self.offer(x, *s);
        }
    }

    pub fn record(&mut self, iteration: usize) {
        let (_, s) = self.best.as_ref().expect("population evaluated before recording");
        self.log.push(ConvergenceRecord { iteration, cost: s.cost, violation: s.violation });
    }
}

fn initial_population<R: Rng>(p: &Problem, warm: Option<&ControlPolygon>, rng: &mut R) -> Vec<Vec<f64>> {
    let cfg = p.cfg;
    let mut pop: Vec<Vec<f64>> = Vec::with_capacity(cfg.population);
    let warm_vec = warm.map(|w| w.to_vector()).filter(|v| v.len() == p.lo.len());
    if let Some(mut base) = warm_vec {
        p.clamp(&mut base);
        let count = ((cfg.warm_start_fraction * cfg.population as f64).round() as usize).clamp(1, cfg.population);
        pop.push(base.clone());
        while pop.len() < count {
            let mut x = base.clone();
            for (j, v) in x.iter_mut().enumerate() {
                let sd = 0.05 * p.width(j);
                if sd > 0.0 {
                    *v += Normal::new(0.0, sd).expect("positive spread").sample(rng);
                }
            }
            p.clamp(&mut x);
            pop.push(x);
        }
    } else if cfg.seed_straight_line {
        let straight = ControlPolygon::straight(p.start, p.goal, cfg.interior_points, p.corridor)
            .expect("endpoints checked up front");
        pop.push(straight.to_vector());
    }
    while pop.len() < cfg.population {
        pop.push(p.random_point(rng));
    }
    pop
}

/// Optimizes the leg from `start` to `goal`. A `warm` polygon with the same
/// interior point count seeds part of the initial population. The result may
/// carry violations if no clean path was found.
pub fn solve_opp(
    start: Vec3,
    goal: Vec3,
    env: &Environment,
    cfg: &OppConfig,
    warm: Option<&ControlPolygon>,
) -> Result<OppSolution, OppError> {
    cfg.validate()?;
    if start == goal {
        return Err(OppError::DegeneratePolygon);
    }
    let clock = Instant::now();
    let l = &cfg.limits;
    let corridor = Corridor::around(start, goal, cfg.corridor_inflation, env.grid, l.depth_min, l.depth_max);
    let (lo, hi) = corridor.bounds(cfg.interior_points);
    let problem = Problem {
        start,
        goal,
        corridor,
        env: *env,
        cfg,
        intervals: cfg.sample_intervals(start, goal, env.obstacles),
        lo,
        hi,
    };
    let mut rng = rng::seeded(cfg.seed);
    let pop = initial_population(&problem, warm, &mut rng);
    let tracker = match cfg.algorithm {
        OppAlgorithm::De => de::run(&problem, pop, &mut rng),
        OppAlgorithm::Fa => fa::run(&problem, pop, &mut rng),
        OppAlgorithm::Bbo => bbo::run(&problem, pop, &mut rng),
        OppAlgorithm::Pso => pso::run(&problem, pop, &mut rng),
    };
    let (x, _) = tracker.best.expect("population is never empty");
    let best = fly(&problem.polygon(&x), env, cfg, problem.intervals);
    Ok(OppSolution { best, compute_time: clock.elapsed().as_secs_f64(), log: tracker.log })
}
