//! Canonical scenarios used by the sweeps, the acceptance suite and the examples.

use super::scenario::{ChannelParams, ModelKind, Population, Scenario};
use crate::edge::{ScrutinyParams, DEFAULT_T_MAX_S};
use crate::ids::Event;
use crate::vehicle::{BehaviorKind, BehaviorProfile};

/// Reported speed used by liars that try to pass scrutiny on a free-flowing road.
pub const CONSISTENT_SPOOF_MPH: f64 = 20.0;

fn base(seed: u64, model: ModelKind, truth: Event) -> Scenario {
    Scenario {
        seed,
        model,
        ground_truth: truth,
        corridor_length_m: 5000.0,
        first_rsu_m: 500.0,
        rsu_spacing_m: 1000.0,
        n_rsu: None,
        free_spacing: false,
        threshold: 3,
        sigma_s: 10.0,
        scrutiny: ScrutinyParams::default(),
        channel: ChannelParams::default(),
        prime_bits: 128,
        t_max_s: DEFAULT_T_MAX_S,
        horizon_s: 900.0,
        vehicles: Vec::new(),
        population: None,
        tamper: Vec::new(),
    }
}

fn colluders() -> BehaviorProfile {
    BehaviorProfile::of(BehaviorKind::Colluding { group: "M".into() })
}

fn consistent_liars() -> BehaviorProfile {
    BehaviorProfile::of(BehaviorKind::ConsistentSpoof { reported_mph: CONSISTENT_SPOOF_MPH })
}

/// Accuracy sweep point: 100 vehicles spread over five RSU cells, the
/// malicious share colluding on the opposite event.
pub fn accuracy(seed: u64, model: ModelKind, malicious_pct: f64) -> Scenario {
    let truth = if seed.is_multiple_of(2) { Event::Congested } else { Event::NonCongested };
    let mut s = base(seed, model, truth);
    s.population =
        Some(Population::Uniform { n: 100, malicious_pct, malicious: colluders(), start_m: 0.0, end_m: 5000.0 });
    s
}

/// Message census: a single RSU with the whole platoon inside its range on a
/// free-flowing road. `upper` selects liars that survive scrutiny and force a
/// challenge round.
pub fn census(model: ModelKind, n: usize, threshold: usize, upper: bool) -> Scenario {
    let mut s = base(7, model, Event::NonCongested);
    s.corridor_length_m = 2000.0;
    s.first_rsu_m = 600.0;
    s.n_rsu = Some(1);
    s.threshold = threshold;
    let malicious = if upper { consistent_liars() } else { BehaviorProfile::of(BehaviorKind::EventSpoof) };
    s.population =
        Some(Population::Platoon { n, malicious_pct: 30.0, malicious, start_m: 100.0, end_m: 300.0, speed_mph: 60.0 });
    s
}

/// Decision-time scenario: liars report at the first RSU while an honest
/// group approaches from `poc_distance` units upstream.
pub fn decision_time(seed: u64, poc_distance: f64, rsu_spacing_m: f64, upper: bool) -> Scenario {
    let mut s = base(seed, ModelKind::Proposed, Event::NonCongested);
    s.first_rsu_m = 3000.0;
    s.rsu_spacing_m = rsu_spacing_m;
    s.n_rsu = Some(5);
    s.corridor_length_m = s.first_rsu_m + 4.0 * rsu_spacing_m + 1000.0;
    let malicious = if upper { consistent_liars() } else { colluders() };
    s.population = Some(Population::Approach {
        honest_n: 5,
        malicious_n: 5,
        malicious,
        speed_mph: 60.0,
        poc_distance,
        poc_unit_m: 50.0,
        gap_m: 10.0,
    });
    s
}

/// Everyone but one vehicle withholds its report.
pub fn lone_honest(seed: u64, truth: Event) -> Scenario {
    dropping(seed, truth, 90.0)
}

/// No honest vehicle at all: every vehicle withholds its report.
pub fn no_honest(seed: u64, truth: Event) -> Scenario {
    dropping(seed, truth, 100.0)
}

fn dropping(seed: u64, truth: Event, pct: f64) -> Scenario {
    let mut s = base(seed, ModelKind::Proposed, truth);
    s.corridor_length_m = 2000.0;
    s.first_rsu_m = 600.0;
    s.n_rsu = Some(1);
    s.horizon_s = 120.0;
    let speed = match truth {
        Event::Congested => 20.0,
        Event::NonCongested => 60.0,
    };
    s.population = Some(Population::Platoon {
        n: 10,
        malicious_pct: pct,
        malicious: BehaviorProfile::of(BehaviorKind::DropPackets),
        start_m: 100.0,
        end_m: 300.0,
        speed_mph: speed,
    });
    s
}
