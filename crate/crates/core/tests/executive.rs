use auvplan_core::executive::*;
use auvplan_core::geometry::{Vec2, Vec3};
use auvplan_core::graph::{EdgeSpec, MissionGraph, Task};
use auvplan_core::harness::{Preset, Scenario};
use auvplan_core::terrain::{CellClass, CurrentField, TerrainGrid, Vortex};

fn fixed() -> ComputeCharge {
    ComputeCharge::Fixed { tamp: 1.0, opp: 0.5 }
}

fn world(width: f64, height: f64, pts: &[(f64, f64)], edges: &[(usize, usize, f64)], dest: usize) -> World {
    let grid = TerrainGrid::filled(width, height, 100.0, 50.0, CellClass::Water).unwrap();
    let positions: Vec<Vec3> = pts.iter().map(|&(x, y)| Vec3::new(x, y, 50.0)).collect();
    let specs: Vec<EdgeSpec> = edges
        .iter()
        .enumerate()
        .map(|(i, &(a, b, w))| EdgeSpec { a, b, task: (w > 0.0).then_some(Task { id: i, weight: w }) })
        .collect();
    let graph = MissionGraph::new(&positions, &specs, 0, dest, 2.0).unwrap();
    World { grid, graph, snapshots: vec![CurrentField::still()], switches: vec![], obstacles: vec![] }
}

fn config(total_time: f64) -> MissionConfig {
    MissionConfig { total_time, charge: fixed(), ..Default::default() }
}

#[test]
fn single_leg_bookkeeping() {
    let w = world(2000.0, 1000.0, &[(500.0, 500.0), (1500.0, 500.0)], &[(0, 1, 5.0)], 1);
    let cfg = config(2000.0);
    let run = run_mission(&w, &cfg).unwrap();
    let r = &run.report;
    assert_eq!(r.outcome, Outcome::Completed);
    assert_eq!(r.replans, 0);
    assert_eq!(r.legs.len(), 1);
    let t = r.legs[0].realized_time;
    assert!((t - 500.0).abs() < 1e-6, "{t}");
    assert_eq!(r.compute_time, 1.5);
    assert_eq!(r.residual_time, 2000.0 - t - 1.5);
    let expected = (t - 2000.0).abs() + 1.0 / 6.0 + 1.5;
    assert!((r.mission_cost - expected).abs() < 1e-9);
    assert_eq!(r.completed_tasks, 1);
}

#[test]
fn on_time_legs_never_replan() {
    let pts: Vec<(f64, f64)> = (0..5).map(|i| (500.0 + 800.0 * i as f64, 500.0)).collect();
    let w = world(4000.0, 1000.0, &pts, &[(0, 1, 1.0), (1, 2, 0.0), (2, 3, 3.0), (3, 4, 0.0)], 4);
    let r = run_mission(&w, &config(5000.0)).unwrap().report;
    assert_eq!(r.outcome, Outcome::Completed);
    assert_eq!(r.replans, 0);
    for l in &r.legs {
        assert!((l.realized_time / l.expected_time - 1.0).abs() < 1e-9);
    }
    assert!(r.conservation_error() <= 1e-9);
}

/// Spine along y = 1000 with a parallel detour row; a distant vortex turns on
/// a westward 0.45 m/s drift after 300 s.
fn switch_world() -> World {
    let pts = [
        (500.0, 1000.0),
        (1500.0, 1000.0),
        (2500.0, 1000.0),
        (3500.0, 1000.0),
        (4500.0, 1000.0),
        (1500.0, 1400.0),
        (2500.0, 1400.0),
        (3500.0, 1400.0),
    ];
    let edges = [
        (0, 1, 0.0),
        (1, 2, 0.0),
        (2, 3, 0.0),
        (3, 4, 0.0),
        (0, 5, 4.0),
        (5, 6, 10.0),
        (6, 7, 10.0),
        (7, 4, 4.0),
        (1, 5, 2.0),
        (2, 6, 2.0),
        (3, 7, 2.0),
    ];
    let mut w = world(5000.0, 10_000.0, &pts, &edges, 4);
    let center = Vec2::new(2500.0, 9000.0);
    let (r, l): (f64, f64) = (8000.0, 3000.0);
    let shape = 1.0 - (-(r / l) * (r / l)).exp();
    let strength = -0.45 * std::f64::consts::TAU * r / shape;
    w.snapshots.push(CurrentField::new(vec![Vortex::new(center, l, strength).unwrap()]));
    w.switches.push(SnapshotSwitch { time: 300.0, snapshot: 1 });
    w
}

#[test]
fn drift_after_a_current_switch_forces_a_replan() {
    let w = switch_world();
    // oracle: the eastward drift component at the spine slows eastward legs past tolerance
    let drift = w.snapshots[1].current_at(Vec2::new(2500.0, 1000.0));
    assert!((drift.x + 0.45).abs() < 1e-9);
    assert!(2.0 / (2.0 + drift.x) > 1.1);

    let cfg = config(3600.0);
    let run = run_mission(&w, &cfg).unwrap();
    let r = &run.report;
    assert!(r.replans >= 1, "{:?}", r.routes);
    assert_eq!(r.outcome, Outcome::Completed);
    assert!(r.residual_time >= 0.0);
    for route in &r.routes[1..] {
        assert!(!route.fallback);
        assert!(route.expected_time < route.budget);
    }
    assert!(run.transcript.iter().any(|e| matches!(e, Event::SnapshotSwitch { snapshot: 1, .. })));
    assert!(run.transcript.iter().any(|e| matches!(e, Event::ReplanTrigger { .. })));

    let again = run_mission(&w, &cfg).unwrap();
    assert_eq!(again.report, run.report);
    assert_eq!(again.transcript, run.transcript);
}

#[test]
fn replan_budgets_strictly_shrink() {
    for seed in 0..3 {
        let sc = Scenario::generate(seed, Preset::Replan).unwrap();
        let w = sc.build_world().unwrap();
        let cfg = MissionConfig { charge: fixed(), seed, ..sc.mission.clone() };
        let r = run_mission(&w, &cfg).unwrap().report;
        for pair in r.routes.windows(2) {
            assert!(pair[1].budget < pair[0].budget);
        }
        assert_eq!(r.routes.len(), r.replans + 1);
        assert!(r.conservation_error() <= 1e-9);
    }
}

#[test]
fn concurrent_mode_matches_sequential() {
    let w = switch_world();
    let seq = run_mission(&w, &config(3600.0)).unwrap();
    let conc = run_mission(&w, &MissionConfig { mode: ExecMode::Concurrent, ..config(3600.0) }).unwrap();
    assert_eq!(seq.report, conc.report);
    assert_eq!(seq.transcript, conc.transcript);

    let sc = Scenario::generate(1, Preset::Replan).unwrap();
    let gw = sc.build_world().unwrap();
    let base = MissionConfig { charge: fixed(), seed: 9, ..sc.mission.clone() };
    let a = run_mission(&gw, &base).unwrap();
    let b = run_mission(&gw, &MissionConfig { mode: ExecMode::Concurrent, ..base.clone() }).unwrap();
    assert_eq!(a.report, b.report);
    assert_eq!(a.transcript, b.transcript);
}

#[test]
fn short_budget_is_late_or_failed_but_accounted() {
    let w = world(2000.0, 1000.0, &[(500.0, 500.0), (1500.0, 500.0)], &[(0, 1, 5.0)], 1);
    let r = run_mission(&w, &config(100.0)).unwrap().report;
    assert_eq!(r.outcome, Outcome::Late);
    assert_eq!(r.fallback_routes, 1);
    assert!(r.residual_time < 0.0);
    assert!(r.conservation_error() <= 1e-9);

    let pts = [(500.0, 500.0), (1500.0, 500.0), (2500.0, 500.0)];
    let w = world(3000.0, 1000.0, &pts, &[(0, 1, 1.0), (1, 2, 1.0)], 2);
    let run = run_mission(&w, &config(300.0)).unwrap();
    assert_eq!(run.report.outcome, Outcome::Failed);
    assert_eq!(run.report.legs.len(), 1);
    assert!(run.report.conservation_error() <= 1e-9);
    assert!(matches!(run.transcript.last(), Some(Event::MissionEnd { outcome: Outcome::Failed, .. })));
}

#[test]
fn transcript_lines_are_json() {
    let w = world(2000.0, 1000.0, &[(500.0, 500.0), (1500.0, 500.0)], &[(0, 1, 5.0)], 1);
    let run = run_mission(&w, &config(2000.0)).unwrap();
    let mut buf = Vec::new();
    write_transcript(&run.transcript, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let events: Vec<Event> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(events, run.transcript);
    assert!(text.starts_with("{\"event\":\"plan_start\""));
}

#[test]
fn invalid_world_rejected() {
    let mut w = world(2000.0, 1000.0, &[(500.0, 500.0), (1500.0, 500.0)], &[(0, 1, 5.0)], 1);
    w.switches.push(SnapshotSwitch { time: 10.0, snapshot: 4 });
    assert!(matches!(run_mission(&w, &config(2000.0)), Err(ExecutiveError::InvalidWorld(_))));
}
