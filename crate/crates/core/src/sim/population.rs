use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::scenario::{Population, Scenario, ScenarioError, VehicleSpec};
use crate::ids::{Event, VehicleId};
use crate::vehicle::BehaviorProfile;

/// Speed band, in mph, that an honest driver on a road in state `e` falls in.
pub fn speed_band(e: Event) -> (f64, f64) {
    match e {
        Event::Congested => (10.0, 30.0),
        Event::NonCongested => (45.0, 65.0),
    }
}

pub fn malicious_count(n: usize, pct: f64) -> usize {
    ((n as f64) * pct / 100.0).round().min(n as f64) as usize
}

fn marks(n: usize, pct: f64, rng: &mut ChaCha8Rng) -> Vec<bool> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut out = vec![false; n];
    for &i in &order[..malicious_count(n, pct)] {
        out[i] = true;
    }
    out
}

fn pick(malicious: bool, profile: &BehaviorProfile) -> BehaviorProfile {
    if malicious {
        profile.clone()
    } else {
        BehaviorProfile::honest()
    }
}

/// Explicit vehicles followed by the generated population, each with its final id.
pub fn expand(s: &Scenario, rng: &mut ChaCha8Rng) -> Result<Vec<(VehicleId, VehicleSpec)>, ScenarioError> {
    let mut specs: Vec<VehicleSpec> = s.vehicles.clone();
    match &s.population {
        None => {}
        Some(Population::Uniform { n, malicious_pct, malicious, start_m, end_m }) => {
            let bad = marks(*n, *malicious_pct, rng);
            let (lo, hi) = speed_band(s.ground_truth);
            for m in bad {
                let position_m = rng.gen_range(*start_m..=*end_m);
                let velocity_mph = rng.gen_range(lo..=hi);
                specs.push(VehicleSpec { id: None, position_m, velocity_mph, behavior: pick(m, malicious) });
            }
        }
        Some(Population::Platoon { n, malicious_pct, malicious, start_m, end_m, speed_mph }) => {
            let bad = marks(*n, *malicious_pct, rng);
            let step = if *n > 1 { (end_m - start_m) / (*n - 1) as f64 } else { 0.0 };
            for (i, m) in bad.into_iter().enumerate() {
                specs.push(VehicleSpec {
                    id: None,
                    position_m: start_m + step * i as f64,
                    velocity_mph: *speed_mph,
                    behavior: pick(m, malicious),
                });
            }
        }
        Some(Population::Approach { honest_n, malicious_n, malicious, speed_mph, poc_distance, poc_unit_m, gap_m }) => {
            let cell = s.first_rsu_m;
            for k in 0..*malicious_n {
                specs.push(VehicleSpec {
                    id: None,
                    position_m: cell + gap_m * k as f64,
                    velocity_mph: *speed_mph,
                    behavior: malicious.clone(),
                });
            }
            let front = cell - s.channel.range_m - poc_distance * poc_unit_m;
            for k in 0..*honest_n {
                specs.push(VehicleSpec {
                    id: None,
                    position_m: front - gap_m * k as f64,
                    velocity_mph: *speed_mph,
                    behavior: BehaviorProfile::honest(),
                });
            }
        }
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(specs.len());
    for (i, spec) in specs.into_iter().enumerate() {
        if !(0.0..=s.corridor_length_m).contains(&spec.position_m) {
            return Err(ScenarioError::Invalid(format!("vehicle {i} starts outside the corridor")));
        }
        let id = spec.id.clone().unwrap_or_else(|| VehicleId::numbered(i));
        if !seen.insert(id.clone()) {
            return Err(ScenarioError::Invalid(format!("duplicate vehicle id {id}")));
        }
        out.push((id, spec));
    }
    Ok(out)
}
