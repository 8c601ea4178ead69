mod common;

use auvplan_core::harness::*;
use auvplan_core::opp::OppAlgorithm;
use auvplan_core::tamp::TampAlgorithm;
use proptest::prelude::*;

#[test]
fn generated_scenarios_round_trip() {
    for preset in [Preset::Residual, Preset::Budget, Preset::Replan] {
        let s = Scenario::generate(3, preset).unwrap();
        let text = s.to_toml().unwrap();
        assert!(text.starts_with("version = 1"));
        let back = Scenario::from_toml(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_toml().unwrap(), text);
    }
}

#[test]
fn generation_is_byte_stable() {
    let a = Scenario::generate(42, Preset::Residual).unwrap().to_toml().unwrap();
    let b = Scenario::generate(42, Preset::Residual).unwrap().to_toml().unwrap();
    assert_eq!(a.as_bytes(), b.as_bytes());
    let c = Scenario::generate(43, Preset::Residual).unwrap().to_toml().unwrap();
    assert_ne!(a, c);
}

#[test]
fn oversized_graph_is_a_field_error() {
    let mut s = Scenario::default();
    s.graph.node_count = 60;
    let text = s.to_toml().unwrap();
    match Scenario::from_toml(&text) {
        Err(HarnessError::Field { path, .. }) => assert_eq!(path, "graph.node_count"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_version_rejected() {
    let text = Scenario::default().to_toml().unwrap().replacen("version = 1", "version = 7", 1);
    assert!(matches!(Scenario::from_toml(&text), Err(HarnessError::Field { .. })));
}

#[test]
fn world_is_reproducible() {
    let s = Scenario::generate(5, Preset::Replan).unwrap();
    let a = s.build_world().unwrap();
    let b = s.build_world().unwrap();
    assert_eq!(a, b);
    assert_eq!(a.snapshots.len(), 2);
    assert!((5..=10).contains(&a.snapshots[0].vortices.len()));
}

#[test]
fn single_run_single_pair() {
    let s = common::light_scenario(1, Preset::Residual);
    let spec = CampaignSpec { runs: 1, pairs: vec![(TampAlgorithm::Ga, OppAlgorithm::De)], ..Default::default() };
    let c = run_campaign(&s, &spec).unwrap();
    assert_eq!(c.records.len(), 1);
    assert_eq!(c.timings.len(), 1);
    let r = &c.records[0];
    assert!((30..=50).contains(&r.nodes));
    assert!(r.conservation_error() <= 1e-9);
}

#[test]
fn thread_count_does_not_change_records() {
    let s = common::light_scenario(2, Preset::Residual);
    let pairs = vec![(TampAlgorithm::Pso, OppAlgorithm::Fa), (TampAlgorithm::Aco, OppAlgorithm::Bbo)];
    let one = run_campaign(&s, &CampaignSpec { runs: 3, pairs: pairs.clone(), threads: 1, ..Default::default() }).unwrap();
    let eight = run_campaign(&s, &CampaignSpec { runs: 3, pairs, threads: 8, ..Default::default() }).unwrap();
    assert_eq!(one.records.len(), 6);
    assert_eq!(one.records, eight.records);
    let mut a = Vec::new();
    let mut b = Vec::new();
    write_records(&one.records, &mut a).unwrap();
    write_records(&eight.records, &mut b).unwrap();
    assert_eq!(a, b);
    assert_eq!(read_records(&a[..]).unwrap(), one.records);
}

#[test]
fn setup_failures_become_records() {
    let mut s = common::light_scenario(3, Preset::Residual);
    s.terrain_raster = Some("/nonexistent/terrain.pgm".into());
    let spec = CampaignSpec { runs: 2, pairs: vec![(TampAlgorithm::Ga, OppAlgorithm::De)], ..Default::default() };
    let c = run_campaign(&s, &spec).unwrap();
    assert_eq!(c.records.len(), 2);
    assert!(c.records.iter().all(|r| r.is_error() && r.error.contains("terrain_raster")));
    assert!(matches!(summarize(&c.records), Err(HarnessError::EmptyCampaign)));
}

fn record(tamp: &str, opp: &str, cost: f64, weight: f64) -> CampaignRecord {
    CampaignRecord {
        run: 0,
        seed: 0,
        tamp: tamp.into(),
        opp: opp.into(),
        nodes: 10,
        outcome: "completed".into(),
        compute_time: 1.0,
        planner_calls: 3,
        route_time: 100.0,
        total_weight: weight,
        completed_tasks: 2,
        route_cost: Some(cost),
        route_violation: 0.0,
        total_cost: cost,
        residual_time: 10.0,
        travel_time: 89.0,
        total_time: 100.0,
        replans: 0,
        colliding_legs: 0,
        error: String::new(),
    }
}

#[test]
fn single_record_quartiles_equal_the_record() {
    let rep = summarize(&[record("GA", "DE", 3.25, 7.0)]).unwrap();
    for row in rep.summary.iter().filter(|r| r.metric == "total_cost") {
        let q = row.stats;
        assert_eq!([q.min, q.q1, q.median, q.q3, q.max], [3.25; 5]);
    }
}

#[test]
fn rankings_match_hand_ordering() {
    // medians by TAMP: ACO 2, BBO 5, GA 1, PSO 5 (tie with BBO)
    let recs = vec![
        record("ACO", "DE", 1.0, 10.0),
        record("ACO", "DE", 3.0, 10.0),
        record("BBO", "DE", 5.0, 30.0),
        record("GA", "DE", 1.0, 20.0),
        record("PSO", "DE", 4.0, 40.0),
        record("PSO", "DE", 6.0, 40.0),
    ];
    let rep = summarize(&recs).unwrap();
    let order = |metric: &str| -> Vec<(String, bool)> {
        rep.rankings
            .iter()
            .filter(|r| r.group_kind == "tamp" && r.metric == metric)
            .map(|r| (r.group.clone(), r.tied))
            .collect()
    };
    let s = |x: &str, t: bool| (x.to_string(), t);
    assert_eq!(order("total_cost"), [s("GA", false), s("ACO", false), s("BBO", true), s("PSO", true)]);
    assert_eq!(order("total_weight"), [s("PSO", false), s("BBO", false), s("GA", false), s("ACO", false)]);
    let aco = rep.summary.iter().find(|r| r.group == "ACO" && r.metric == "total_cost").unwrap();
    assert_eq!((aco.stats.q1, aco.stats.median, aco.stats.q3), (1.5, 2.0, 2.5));
}

#[test]
fn summary_and_rankings_serialize() {
    let rep = summarize(&[record("GA", "DE", 3.25, 7.0), record("ACO", "FA", 1.0, 2.0)]).unwrap();
    let mut buf = Vec::new();
    write_summary(&rep.summary, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("group_kind,group,metric,count,min,q1,median,q3,max,"));
    assert_eq!(text.lines().count(), rep.summary.len() + 1);
    let mut buf = Vec::new();
    write_rankings(&rep.rankings, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap().lines().count(), rep.rankings.len() + 1);
}

#[test]
fn empty_campaign_is_an_error() {
    assert!(matches!(summarize(&[]), Err(HarnessError::EmptyCampaign)));
}

proptest! {
    #[test]
    fn arbitrary_text_never_panics(text in "\\PC{0,400}") {
        let _ = Scenario::from_toml(&text);
        let _ = read_records(text.as_bytes());
    }

    #[test]
    fn corrupted_scenarios_never_panic(cut in 0usize..4000, junk in "[ -~\\n]{0,20}") {
        let base = Scenario::generate(1, Preset::Replan).unwrap().to_toml().unwrap();
        let at = base.char_indices().map(|(i, _)| i).nth(cut % base.len()).unwrap_or(0);
        let mut text = base[..at].to_string();
        text.push_str(&junk);
        text.push_str(&base[at..]);
        if let Ok(s) = Scenario::from_toml(&text) {
            prop_assert!(s.validate().is_ok());
        }
    }
}
