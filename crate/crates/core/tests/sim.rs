use proptest::prelude::*;
use vanet_core::edge::Verdict;
use vanet_core::metrics::{displayed, energy_mw, total_transmissions, vehicle_broadcasts, CostModel, ModelPath};
use vanet_core::sim::{presets, run, ModelKind, Scenario, ScenarioError, VehicleSpec};
use vanet_core::vehicle::{BehaviorKind, BehaviorProfile};
use vanet_core::VehicleId;

fn cell(behaviors: &[BehaviorProfile]) -> Scenario {
    let mut s = presets::census(ModelKind::Proposed, 2, 3, false);
    s.population = None;
    s.vehicles = behaviors
        .iter()
        .enumerate()
        .map(|(i, b)| VehicleSpec {
            id: None,
            position_m: 150.0 + 20.0 * i as f64,
            velocity_mph: 60.0,
            behavior: b.clone(),
        })
        .collect();
    s
}

fn honest(n: usize) -> Vec<BehaviorProfile> {
    vec![BehaviorProfile::honest(); n]
}

fn car(i: usize) -> VehicleId {
    VehicleId::numbered(i)
}

#[test]
fn all_honest_is_unanimous() {
    let r = run(&cell(&honest(5))).unwrap();
    assert_eq!(r.verdict, Verdict::NonCongested);
    assert_eq!(r.basis, "unanimous");
    assert_eq!(r.accuracy, 1.0);
}

#[test]
fn velocity_spoof_fails_scrutiny() {
    let mut b = honest(5);
    b.push(BehaviorProfile::of(BehaviorKind::EventSpoof));
    let r = run(&cell(&b)).unwrap();
    let d = r.decision.unwrap();
    assert_eq!(d.verdict, Verdict::NonCongested);
    assert!(d.mal_list.contains(&car(5)));
    assert_eq!(r.basis, "initial_scrutiny");
}

#[test]
fn gps_outside_coverage_is_flagged() {
    let mut b = honest(5);
    b.push(BehaviorProfile::of(BehaviorKind::GpsSpoof { delta_m: 5000.0 }));
    let r = run(&cell(&b)).unwrap();
    let d = r.decision.unwrap();
    assert!(d.mal_list.contains(&car(5)));
    assert_eq!(d.verdict, Verdict::NonCongested);
}

#[test]
fn impersonation_does_not_smear_the_victim() {
    let mut b = honest(5);
    b.push(BehaviorProfile::of(BehaviorKind::Impersonate { target: car(0) }));
    let r = run(&cell(&b)).unwrap();
    let d = r.decision.unwrap();
    assert!(!d.mal_list.contains(&car(0)));
    assert_eq!(d.verdict, Verdict::NonCongested);
    assert_eq!(r.accuracy, 1.0);
}

#[test]
fn tampered_frame_is_dropped() {
    let mut s = cell(&honest(5));
    s.tamper = vec![car(2)];
    let r = run(&s).unwrap();
    let d = r.decision.unwrap();
    assert!(!d.mal_list.contains(&car(2)));
    assert!(!d.nonmal_list.contains(&car(2)));
    assert_eq!(d.verdict, Verdict::NonCongested);
}

#[test]
fn slowing_down_to_prove_a_jam_still_loses() {
    let mut b = honest(5);
    for _ in 0..4 {
        b.push(BehaviorProfile {
            kind: BehaviorKind::ConsistentSpoof { reported_mph: presets::CONSISTENT_SPOOF_MPH },
            slow_to_prove: true,
        });
    }
    let r = run(&cell(&b)).unwrap();
    assert_eq!(r.path, ModelPath::ProposedUpper);
    assert_eq!(r.verdict, Verdict::NonCongested);
    assert_eq!(r.accuracy, 1.0);
}

#[test]
fn lossy_queued_channel_still_terminates() {
    let mut s = presets::accuracy(9, ModelKind::Proposed, 20.0);
    s.channel.loss_prob = 0.3;
    s.channel.queuing = true;
    let a = run(&s).unwrap();
    let b = run(&s).unwrap();
    assert_eq!(a.csv_record(), b.csv_record());
    assert!(a.end_time_ms <= 900_000);
}

#[test]
fn scenario_errors_are_reported() {
    assert!(matches!(Scenario::from_toml("seed = "), Err(ScenarioError::Parse(_))));
    let mut s = presets::accuracy(0, ModelKind::Majority, 10.0);
    s.rsu_spacing_m = 400.0;
    assert!(matches!(run(&s), Err(ScenarioError::Invalid(_))));
    s.free_spacing = true;
    assert!(run(&s).is_ok());
}

#[test]
fn energy_tracks_reference_points() {
    let c = |n| CostModel { n, threshold: 3, n_rsu: 5 };
    let points = [
        (ModelPath::PeerAuth, 100, 400),
        (ModelPath::ProposedLower, 100, 234),
        (ModelPath::ProposedUpper, 100, 345),
        (ModelPath::ProposedUpper, 30, 111),
        (ModelPath::ProposedUpper, 60, 211),
        (ModelPath::ProposedUpper, 90, 311),
    ];
    for (path, n, units) in points {
        let mw = displayed(energy_mw(path, c(n)));
        assert!((mw as i64 / 20 - units).abs() <= 3, "{path}({n})");
        assert_eq!(displayed(total_transmissions(path, c(n))) as i64, units);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn simulated_broadcasts_match_formula(n in 30usize..=100, t in 2usize..=10, which in 0usize..4) {
        let (model, upper, path) = [
            (ModelKind::Majority, false, ModelPath::Majority),
            (ModelKind::PeerAuth, false, ModelPath::PeerAuth),
            (ModelKind::Proposed, false, ModelPath::ProposedLower),
            (ModelKind::Proposed, true, ModelPath::ProposedUpper),
        ][which];
        let r = run(&presets::census(model, n, t, upper)).unwrap();
        prop_assert_eq!(r.path, path);
        prop_assert_eq!(r.vehicle_broadcasts(), vehicle_broadcasts(path, n as u64, t as u64));
    }
}
