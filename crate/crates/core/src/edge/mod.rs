//! Edge-server decision pipeline.

mod challenge;
mod decision;
mod dsg;
mod pipeline;
mod poc;
mod scrutiny;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ids::{Event, VehicleId};

pub use challenge::{expected_presence, generate_challenge, ChallengePlan, DEFAULT_T_MAX_S};
pub use decision::{challenge_outcome, decide, filter_dsg, unanimous_decision, ChallengeOutcome};
pub use dsg::{build_dsg, Dsg, Vertex};
pub use pipeline::{EdgeAction, EdgeConfig, EdgeServer, RejectReason, Rejection};
pub use poc::{detect_poc, detect_poc_excluding, Poc, PocPass};
pub use scrutiny::{initial_scrutiny, scrutinize, ScrutinyOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Congested,
    NonCongested,
    Undetermined,
}

impl Verdict {
    pub fn event(self) -> Option<Event> {
        match self {
            Verdict::Congested => Some(Event::Congested),
            Verdict::NonCongested => Some(Event::NonCongested),
            Verdict::Undetermined => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Congested => "congested",
            Verdict::NonCongested => "non_congested",
            Verdict::Undetermined => "undetermined",
        }
    }
}

impl From<Event> for Verdict {
    fn from(e: Event) -> Self {
        match e {
            Event::Congested => Verdict::Congested,
            Event::NonCongested => Verdict::NonCongested,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Unanimous,
    InitialScrutiny,
    ChallengeResponse,
    Inconclusive,
}

impl Basis {
    pub fn as_str(self) -> &'static str {
        match self {
            Basis::Unanimous => "unanimous",
            Basis::InitialScrutiny => "initial_scrutiny",
            Basis::ChallengeResponse => "challenge_response",
            Basis::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub verdict: Verdict,
    pub mal_list: BTreeSet<VehicleId>,
    pub nonmal_list: BTreeSet<VehicleId>,
    pub basis: Basis,
}

impl Decision {
    pub fn undetermined() -> Self {
        Self {
            verdict: Verdict::Undetermined,
            mal_list: BTreeSet::new(),
            nonmal_list: BTreeSet::new(),
            basis: Basis::Inconclusive,
        }
    }

    pub fn lists_disjoint(&self) -> bool {
        self.mal_list.is_disjoint(&self.nonmal_list)
    }
}

/// Velocity-consistency thresholds, in mph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScrutinyParams {
    pub vel_congested: f64,
    pub vel_ncongested: f64,
    pub epsilon: f64,
}

impl Default for ScrutinyParams {
    fn default() -> Self {
        Self { vel_congested: 35.0, vel_ncongested: 40.0, epsilon: 5.0 }
    }
}

impl ScrutinyParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.vel_congested <= self.vel_ncongested) {
            return Err("vel_congested must not exceed vel_ncongested".into());
        }
        if !(self.epsilon >= 0.0) {
            return Err("epsilon must be non-negative".into());
        }
        Ok(())
    }

    /// Event an honest driver records at `vel_mph`.
    pub fn honest_event(&self, vel_mph: f64) -> Event {
        if vel_mph < self.vel_congested {
            Event::Congested
        } else {
            Event::NonCongested
        }
    }
}
