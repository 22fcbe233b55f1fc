use std::collections::{BTreeSet, VecDeque};

use super::dsg::Dsg;
use super::{Basis, Decision, Verdict};
use crate::ids::{Event, VehicleId};
use crate::messages::SearchResponse;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChallengeOutcome {
    Resolved {
        malicious: VehicleId,
        verdict: Event,
    },
    /// Neither vehicle proved its presence.
    Neither,
}

/// Interprets the presence results for a conflicting pair with differing events.
pub fn challenge_outcome(
    cv1: (&VehicleId, Event, SearchResponse),
    cv2: (&VehicleId, Event, SearchResponse),
) -> ChallengeOutcome {
    use SearchResponse::*;
    match (cv1.2, cv2.2) {
        (Received, NotReceived) => ChallengeOutcome::Resolved { malicious: cv2.0.clone(), verdict: cv1.1 },
        (NotReceived, Received) => ChallengeOutcome::Resolved { malicious: cv1.0.clone(), verdict: cv2.1 },
        (Received, Received) => {
            let slow = if cv1.1 == Event::Congested { cv1.0 } else { cv2.0 };
            ChallengeOutcome::Resolved { malicious: slow.clone(), verdict: Event::NonCongested }
        }
        (NotReceived, NotReceived) => ChallengeOutcome::Neither,
    }
}

pub fn decide(dsg: &Dsg, cv1: &VehicleId, r1: SearchResponse, cv2: &VehicleId, r2: SearchResponse) -> Decision {
    let (Some(e1), Some(e2)) = (dsg.event_of(cv1), dsg.event_of(cv2)) else {
        return Decision::undetermined();
    };
    match challenge_outcome((cv1, e1, r1), (cv2, e2, r2)) {
        ChallengeOutcome::Resolved { malicious, verdict } => {
            let (mal_list, nonmal_list) = filter_dsg(dsg, &malicious);
            Decision { verdict: Verdict::from(verdict), mal_list, nonmal_list, basis: Basis::ChallengeResponse }
        }
        ChallengeOutcome::Neither => Decision::undetermined(),
    }
}

/// Labels everything reachable from `malicious` in the graph, plus every
/// unreached vertex under the same RSU: vertices sharing the malicious
/// event are malicious, the rest are not.
pub fn filter_dsg(dsg: &Dsg, malicious: &VehicleId) -> (BTreeSet<VehicleId>, BTreeSet<VehicleId>) {
    let mut mal = BTreeSet::new();
    let mut nonmal = BTreeSet::new();
    let Some(seed) = dsg.vertex(malicious) else {
        return (mal, nonmal);
    };
    let bad_event = seed.event;
    let seed_rsu = seed.rsu.clone();

    let mut visited = BTreeSet::from([malicious.clone()]);
    let mut queue = VecDeque::from([malicious.clone()]);
    while let Some(v) = queue.pop_front() {
        if dsg.event_of(&v) == Some(bad_event) {
            mal.insert(v.clone());
        } else {
            nonmal.insert(v.clone());
        }
        for n in dsg.neighbors(&v) {
            if visited.insert(n.clone()) {
                queue.push_back(n.clone());
            }
        }
    }
    for (id, vx) in dsg.vertices() {
        if vx.rsu == seed_rsu && !visited.contains(id) {
            if vx.event == bad_event {
                mal.insert(id.clone());
            } else {
                nonmal.insert(id.clone());
            }
        }
    }
    (mal, nonmal)
}

/// Decision when no conflict exists among `reports`.
pub fn unanimous_decision<'a>(reports: impl IntoIterator<Item = (&'a VehicleId, Event)>) -> Decision {
    let mut ids = BTreeSet::new();
    let mut common = None;
    for (id, e) in reports {
        match common {
            None => common = Some(e),
            Some(c) if c != e => return Decision::undetermined(),
            _ => {}
        }
        ids.insert(id.clone());
    }
    match common {
        Some(e) => {
            Decision { verdict: Verdict::from(e), mal_list: BTreeSet::new(), nonmal_list: ids, basis: Basis::Unanimous }
        }
        None => Decision::undetermined(),
    }
}
