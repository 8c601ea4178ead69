//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails. Campaign-level criteria take a few minutes.

mod common;

use auvplan_core::executive::{mission_cost, replan_trigger, run_mission, ComputeCharge, Outcome};
use auvplan_core::geometry::{Vec2, Vec3};
use auvplan_core::harness::{run_campaign, write_records, CampaignRecord, CampaignSpec, Preset, Scenario};
use auvplan_core::opp::{
    de_crossover_with_mask, de_mutant, de_select, fa_move_with, path_cost, path_violations, solve_opp, Environment,
    FaParams, OppAlgorithm, OppConfig, PathSample, Survivor, VehicleLimits, ViolationBreakdown, ViolationWeights,
};
use auvplan_core::rng;
use auvplan_core::swarm::{bbo_mutation_rate, bbo_rates, pso_update_with, PsoParams};
use auvplan_core::tamp::{
    aco_transition_prob, aco_update_pheromone, apply_mutation, solve_tamp, MutationOp, TampAlgorithm, TampConfig,
};
use auvplan_core::terrain::{CellClass, CurrentField, Obstacle, TerrainGrid, VortexFieldParams, Vortex};
use std::process::ExitCode;
use std::time::Instant;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

/// Records from every campaign run here, for the conservation check.
#[derive(Default)]
struct Pool {
    records: Vec<CampaignRecord>,
    missions: usize,
    worst_conservation: f64,
}

impl Pool {
    fn mission(&mut self, err: f64) {
        self.missions += 1;
        self.worst_conservation = self.worst_conservation.max(err);
    }

    fn campaign(&mut self, records: &[CampaignRecord]) {
        for r in records.iter().filter(|r| !r.is_error()) {
            self.mission(r.conservation_error());
        }
        self.records.extend_from_slice(records);
    }
}

const THRESHOLD: f64 = 3.42e4;

fn time_budget_compliance(pool: &mut Pool) -> Verdict {
    let template = common::light_scenario(2024, Preset::Budget);
    let spec = CampaignSpec { runs: 30, seed: 2024, ..Default::default() };
    let t = Instant::now();
    let c = run_campaign(&template, &spec).unwrap();
    let elapsed = t.elapsed().as_secs_f64();
    pool.campaign(&c.records);
    let ok: Vec<_> = c.records.iter().filter(|r| !r.is_error()).collect();
    let within = ok.iter().filter(|r| r.route_time < THRESHOLD).count();
    let clean = ok.iter().filter(|r| r.route_violation == 0.0).count();
    let nodes_ok = c.records.iter().all(|r| (30..=50).contains(&r.nodes));
    let clean_rate = clean as f64 / ok.len().max(1) as f64;
    Verdict::new(
        !ok.is_empty() && within == ok.len() && clean_rate >= 0.95 && nodes_ok && elapsed < 600.0,
        format!(
            "{} records ({} setup errors), T_route < {THRESHOLD} in {within}/{}, zero route violation {:.1}%, {elapsed:.0} s",
            c.records.len(),
            c.records.len() - ok.len(),
            ok.len(),
            100.0 * clean_rate
        ),
    )
}

fn residual_time(pool: &mut Pool) -> Verdict {
    let mut residuals = Vec::new();
    let mut failed = 0;
    for seed in 0..30 {
        let mut s = Scenario::generate(seed, Preset::Residual).unwrap();
        s.mission.charge = ComputeCharge::deterministic();
        assert_eq!(s.mission.total_time, 10_800.0);
        let world = s.build_world().unwrap();
        let r = run_mission(&world, &s.mission).unwrap().report;
        pool.mission(r.conservation_error());
        if r.outcome.reached_destination() {
            residuals.push(r.residual_time);
        } else {
            failed += 1;
        }
    }
    let non_negative = residuals.iter().filter(|&&x| x >= 0.0).count();
    let rate = non_negative as f64 / residuals.len().max(1) as f64;
    let median = auvplan_core::harness::quartiles(&residuals).map_or(f64::NAN, |q| q.median);
    Verdict::new(
        rate >= 0.9 && median < 0.15 * 10_800.0,
        format!(
            "{} reached destination ({failed} failed), residual >= 0 in {:.0}%, median residual {median:.0} s ({:.1}% of total)",
            residuals.len(),
            100.0 * rate,
            100.0 * median / 10_800.0
        ),
    )
}

fn replanning(pool: &mut Pool) -> Verdict {
    let s = Scenario::generate(0, Preset::Replan).unwrap();
    let mut cfg = s.mission.clone();
    cfg.charge = ComputeCharge::deterministic();
    let world = s.build_world().unwrap();
    let a = run_mission(&world, &cfg).unwrap();
    let b = run_mission(&Scenario::generate(0, Preset::Replan).unwrap().build_world().unwrap(), &cfg).unwrap();
    pool.mission(a.report.conservation_error());
    let r = &a.report;
    let same = a.report == b.report && a.transcript == b.transcript;
    Verdict::new(
        r.replans >= 1 && r.outcome == Outcome::Completed && r.residual_time >= 0.0 && same,
        format!(
            "{} re-plans, outcome {:?}, residual {:.0} s, repeat run identical: {same}",
            r.replans, r.outcome, r.residual_time
        ),
    )
}

fn obstacle_env() -> (TerrainGrid, CurrentField, Vec<Obstacle>) {
    (
        TerrainGrid::filled(2000.0, 2000.0, 100.0, 10.0, CellClass::Water).unwrap(),
        CurrentField::still(),
        vec![Obstacle::fixed(Vec3::new(1000.0, 1000.0, 50.0), 100.0, 0.0).unwrap()],
    )
}

const START: Vec3 = Vec3 { x: 200.0, y: 1000.0, z: 50.0 };
const GOAL: Vec3 = Vec3 { x: 1800.0, y: 1000.0, z: 50.0 };

/// Convergence and kinodynamic criteria share the same solves.
fn convergence_and_bounds() -> (Verdict, Verdict) {
    let (grid, field, obstacles) = obstacle_env();
    let env = Environment { grid: &grid, field: &field, obstacles: &obstacles, clock: 0.0 };
    let (mut monotone, mut clean, mut bounded, mut total) = (0, 0, 0, 0);
    for alg in OppAlgorithm::ALL {
        for seed in 0..10 {
            let cfg = OppConfig { algorithm: alg, iterations: 100, seed, ..Default::default() };
            let s = solve_opp(START, GOAL, &env, &cfg, None).unwrap();
            total += 1;
            let ok = s.log.len() == 100
                && s.log.windows(2).all(|w| w[1].cost <= w[0].cost && w[1].violation <= w[0].violation);
            monotone += ok as usize;
            clean += (s.best.violation == 0.0 && s.log.last().is_some_and(|l| l.violation == 0.0)) as usize;
            let l = &cfg.limits;
            bounded += s.best.samples.iter().all(|x| {
                x.surge.abs() <= l.surge_max && x.sway.abs() <= l.sway_max && x.yaw_rate.abs() <= l.yaw_rate_max
            }) as usize;
        }
    }
    (
        Verdict::new(
            monotone == total && clean == total,
            format!("monotone logs {monotone}/{total}, zero final violation {clean}/{total}"),
        ),
        Verdict::new(bounded == total, format!("all samples within surge/sway/yaw-rate limits in {bounded}/{total}")),
    )
}

fn routing_oracle() -> Verdict {
    let graphs: Vec<_> = (0..25u64)
        .map(|k| {
            let g = common::random_graph(500 + k, 5 + (k % 5) as usize);
            let budget = common::middle_budget(&g);
            let best = common::optimum(&g, budget).unwrap().1.cost;
            (g, budget, best)
        })
        .collect();
    let mut ok = true;
    let mut lines = Vec::new();
    for alg in TampAlgorithm::ALL {
        let (mut near, mut exact, mut worst_graph) = (0, 0, 1.0f64);
        for (g, budget, best) in &graphs {
            let mut graph_exact = 0;
            for seed in 0..20 {
                let cfg = TampConfig { algorithm: alg, population: 50, iterations: 200, time_budget: *budget, seed, ..Default::default() };
                let c = solve_tamp(g, &cfg).unwrap().evaluation.cost;
                near += (c <= best * 1.02) as usize;
                let hit = c <= best * (1.0 + 1e-12);
                exact += hit as usize;
                graph_exact += hit as usize;
            }
            worst_graph = worst_graph.min(graph_exact as f64 / 20.0);
        }
        let (pn, pe) = (near as f64 / 500.0, exact as f64 / 500.0);
        ok &= pn >= 0.8 && pe >= 0.5;
        lines.push(format!("{} within 2% {:.2} exact {:.2} (worst graph exact {:.2})", alg.name(), pn, pe, worst_graph));
    }
    Verdict::new(ok, lines.join("; "))
}

fn straight_corridor() -> Verdict {
    let grid = TerrainGrid::filled(2000.0, 2000.0, 100.0, 10.0, CellClass::Water).unwrap();
    let field = CurrentField::still();
    let env = Environment { grid: &grid, field: &field, obstacles: &[], clock: 0.0 };
    let d = START.distance(GOAL);
    let mut ok = true;
    let mut lines = Vec::new();
    for alg in OppAlgorithm::ALL {
        let hits = (0..20)
            .filter(|&seed| {
                let cfg = OppConfig { algorithm: alg, seed, seed_straight_line: false, ..Default::default() };
                solve_opp(START, GOAL, &env, &cfg, None).unwrap().best.arc_length <= 1.01 * d
            })
            .count();
        ok &= hits >= 18;
        lines.push(format!("{} {hits}/20", alg.name()));
    }
    Verdict::new(ok, format!("arc length within 1% of straight line: {}", lines.join(", ")))
}

/// Net outward flux through a small circle divided by its area. For a
/// divergence-free field this is zero whatever the radius, so it needs no
/// derivative of the field under test.
fn flux_divergence(field: &CurrentField, c: Vec2, radius: f64) -> f64 {
    const N: usize = 64;
    let mut flux = 0.0;
    for k in 0..N {
        let th = std::f64::consts::TAU * k as f64 / N as f64;
        let n = Vec2::new(th.cos(), th.sin());
        let v = field.current_at(Vec2::new(c.x + radius * n.x, c.y + radius * n.y));
        flux += (v.x * n.x + v.y * n.y) * std::f64::consts::TAU * radius / N as f64;
    }
    flux / (std::f64::consts::PI * radius * radius)
}

fn current_physics() -> Verdict {
    use rand::Rng;
    // 3.5 km^2 square
    let side = 3.5e6f64.sqrt();
    let (lo, hi) = (Vec2::new(0.0, 0.0), Vec2::new(side, side));
    let mut r = rng::seeded(8);
    let mut worst = 0.0f64;
    let mut points = 0;
    for _ in 0..20 {
        let field = CurrentField::random(&mut r, lo, hi, &VortexFieldParams::default());
        let l_min = field.vortices.iter().map(|v| v.radius).fold(f64::INFINITY, f64::min);
        let u_max: f64 = field.vortices.iter().map(|v| v.strength.abs() / (std::f64::consts::TAU * v.radius)).sum();
        for _ in 0..500 {
            let p = Vec2::new(r.random_range(0.0..side), r.random_range(0.0..side));
            let div = flux_divergence(&field, p, 0.05 * l_min);
            worst = worst.max(div.abs() * l_min / u_max);
            points += 1;
        }
    }
    let v = Vortex::new(Vec2::new(123.0, -45.0), 300.0, 5000.0).unwrap();
    let center = v.velocity_at(v.center);
    let exact_zero = center.x == 0.0 && center.y == 0.0;
    Verdict::new(
        worst < 1e-6 && exact_zero && points == 10_000,
        format!("{points} points, worst scaled divergence {worst:.1e}, center velocity ({}, {})", center.x, center.y),
    )
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 4.0 * f64::EPSILON * b.abs().max(1.0)
}

fn formulas() -> Verdict {
    let mut failed = Vec::new();
    let mut n = 0;
    let mut check = |name: &str, ok: bool| {
        n += 1;
        if !ok {
            failed.push(name.to_string());
        }
    };

    let p = aco_transition_prob(1.0, 1.0, &[2.0, 1.0], &[1.0, 1.0]).unwrap();
    check("ant transition", close(p[0], 2.0 / 3.0) && close(p[1], 1.0 / 3.0));

    let mut trail = [1.0];
    aco_update_pheromone(&mut trail, 0.1, 1.0, Some((&[0], 2.0)));
    check("pheromone update", close(trail[0], 1.4));

    let (lambda, mu) = bbo_rates(5.0, 10.0, 1.0, 1.0).unwrap();
    check("migration rates", lambda == 0.5 && mu == 0.5);
    check(
        "migration rates sum",
        (0..=10).all(|s| {
            let (l, m) = bbo_rates(s as f64, 10.0, 0.7, 0.7).unwrap();
            close(l + m, 0.7)
        }),
    );
    check("mutation rate", close(bbo_mutation_rate(0.25, 1.0, 0.2), 0.15));

    let (mut x, mut v) = ([3.0], [2.0]);
    let swarm = PsoParams { inertia: 0.5, cognitive: 0.0, social: 0.0 };
    pso_update_with(&swarm, &mut x, &mut v, &[0.0], &[0.0], &[100.0], || (0.5, 0.5));
    check("swarm velocity", v[0] == 1.0 && x[0] == 4.0);

    let mut genes = [3.0, 1.0, 2.0];
    apply_mutation(&mut genes, MutationOp::Swap, 1, 2);
    check("swap mutation", genes == [3.0, 2.0, 1.0]);

    check("DE mutant", de_mutant(&[1.0, 1.0], &[3.0, 0.0], &[1.0, 0.0], 0.5) == [2.0, 1.0]);
    check(
        "DE crossover",
        de_crossover_with_mask(&[0.0; 3], &[9.0; 3], &[false, true, false]) == [0.0, 9.0, 0.0],
    );
    check("DE selection", de_select(20.0, 21.0) == Survivor::Parent);

    let fa = FaParams { attraction: 1.0, absorption: 1.0, randomness: 0.0, damping: 0.5 };
    let moved = fa_move_with(&[0.0, 0.0], &[2.0, 0.0], &[2.0, 2.0], &fa, 0, &[0.3, -0.2]);
    check("firefly move", close(moved[0], 2.0 * (-1.0f64).exp()) && moved[1] == 0.0);

    let w = ViolationWeights { depth_max: 2.0, ..Default::default() };
    let v = ViolationBreakdown { depth_max: 10.0, ..Default::default() };
    check("path cost", path_cost(100.0, 100.0, &v, &w, 1.0) == 21.0);

    let grid = TerrainGrid::filled(2000.0, 2000.0, 100.0, 50.0, CellClass::Water).unwrap();
    let still = CurrentField::still();
    let env = Environment { grid: &grid, field: &still, obstacles: &[], clock: 0.0 };
    let limits = VehicleLimits { depth_max: 50.0, ..Default::default() };
    let base = PathSample {
        t: 0.0,
        position: Vec3::new(10.0, 10.0, 30.0),
        yaw: 0.0,
        pitch: 0.0,
        velocity: Vec3::ZERO,
        surge: 0.0,
        sway: 0.0,
        yaw_rate: 0.0,
    };
    let mut samples = vec![base; 5];
    samples[3].position.z = 55.0;
    check("depth hinge", path_violations(&samples, &env, &limits).weighted(&w).depth_max == 10.0);

    check("re-plan trigger", replan_trigger(100.0, 120.0, 0.1) && !replan_trigger(100.0, 110.0, 0.1));
    let cm = mission_cost(0.9 * THRESHOLD, THRESHOLD, 50.0, 2.0, 1.0, 1.0).unwrap();
    check("mission cost", close(cm, 0.1 * THRESHOLD + 0.02 + 2.0));

    Verdict::new(
        failed.is_empty(),
        if failed.is_empty() { format!("{n} hand-computed examples") } else { format!("failed: {}", failed.join(", ")) },
    )
}

fn determinism(pool: &mut Pool) -> Verdict {
    let s = common::light_scenario(77, Preset::Residual);
    let world = s.build_world().unwrap();
    let a = run_mission(&world, &s.mission).unwrap();
    let b = run_mission(&s.build_world().unwrap(), &s.mission).unwrap();
    pool.mission(a.report.conservation_error());
    let bytes = |r: &auvplan_core::executive::MissionRun| {
        let mut out = serde_json::to_vec(&r.report).unwrap();
        auvplan_core::executive::write_transcript(&r.transcript, &mut out).unwrap();
        out
    };
    let identical = bytes(&a) == bytes(&b);

    // every pair on one scenario
    let spec = CampaignSpec { runs: 1, seed: 78, node_range: (12, 16), ..Default::default() };
    let c = run_campaign(&s, &spec).unwrap();
    pool.campaign(&c.records);

    let worst = pool.worst_conservation;
    let errors = pool.records.iter().filter(|r| r.is_error()).count();
    Verdict::new(
        identical && worst <= 1e-9 && errors == 0,
        format!(
            "repeat report byte-identical: {identical}; time conservation worst {worst:.1e} s over {} missions ({errors} setup errors)",
            pool.missions
        ),
    )
}

fn parallel_independence(pool: &mut Pool) -> Verdict {
    let s = common::light_scenario(91, Preset::Residual);
    let csv = |threads| {
        let spec = CampaignSpec { runs: 3, seed: 91, threads, node_range: (10, 14), ..Default::default() };
        let c = run_campaign(&s, &spec).unwrap();
        let mut out = Vec::new();
        write_records(&c.records, &mut out).unwrap();
        (c.records, out)
    };
    let (r1, one) = csv(1);
    let (_, eight) = csv(8);
    pool.campaign(&r1);
    Verdict::new(
        one == eight && !r1.is_empty(),
        format!("{} records, 1 vs 8 threads byte-identical: {}", r1.len(), one == eight),
    )
}

fn main() -> ExitCode {
    let mut pool = Pool::default();
    let mut results: Vec<(usize, &str, Verdict)> = Vec::new();
    let mut run = |id: usize, name: &'static str, f: &mut dyn FnMut(&mut Pool) -> Verdict| {
        let t = Instant::now();
        let v = f(&mut pool);
        let line = format!(
            "[{id:>2}] {} {name}: {} ({:.1} s)",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            t.elapsed().as_secs_f64()
        );
        println!("{line}");
        results.push((id, name, v));
    };

    run(1, "time-budget compliance", &mut time_budget_compliance);
    run(2, "residual time", &mut residual_time);
    run(3, "re-planning after a current switch", &mut replanning);
    let mut bounds = None;
    run(4, "path convergence", &mut |_| {
        let (conv, b) = convergence_and_bounds();
        bounds = Some(b);
        conv
    });
    run(5, "kinodynamic bounds (same solves)", &mut |_| bounds.take().unwrap());
    run(6, "routing against exhaustive search", &mut |_| routing_oracle());
    run(7, "straight corridor optimum", &mut |_| straight_corridor());
    run(8, "current field physics", &mut |_| current_physics());
    run(9, "formula examples", &mut |_| formulas());
    // before 10 so its campaign joins the conservation pool
    run(11, "parallelism independence", &mut parallel_independence);
    run(10, "determinism and time accounting", &mut determinism);

    let failed: Vec<_> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!("acceptance: {}/{} criteria pass", results.len() - failed.len(), results.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failing: {failed:?}");
        ExitCode::FAILURE
    }
}
