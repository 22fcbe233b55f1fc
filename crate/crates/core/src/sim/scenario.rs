use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::edge::{ScrutinyParams, DEFAULT_T_MAX_S};
use crate::ids::{Event, VehicleId};
use crate::road::{Corridor, DEFAULT_RANGE_M};
use crate::vehicle::BehaviorProfile;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Proposed,
    Majority,
    Reputation,
    PeerAuth,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] =
        [ModelKind::Proposed, ModelKind::Majority, ModelKind::Reputation, ModelKind::PeerAuth];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Proposed => "proposed",
            ModelKind::Majority => "majority",
            ModelKind::Reputation => "reputation",
            ModelKind::PeerAuth => "peer_auth",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelParams {
    pub range_m: f64,
    pub latency_s: f64,
    pub backhaul_latency_s: f64,
    /// Serialize a sender's transmissions, one latency slot each.
    pub queuing: bool,
    pub loss_prob: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self { range_m: DEFAULT_RANGE_M, latency_s: 0.1, backhaul_latency_s: 0.1, queuing: false, loss_prob: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleSpec {
    #[serde(default)]
    pub id: Option<VehicleId>,
    pub position_m: f64,
    pub velocity_mph: f64,
    #[serde(default = "BehaviorProfile::honest")]
    pub behavior: BehaviorProfile,
}

/// Generated vehicle populations, expanded deterministically from the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Population {
    /// Positions uniform over `[start_m, end_m]`; velocities drawn from the
    /// band matching the ground truth. Malicious members are picked by a
    /// seeded shuffle.
    Uniform { n: usize, malicious_pct: f64, malicious: BehaviorProfile, start_m: f64, end_m: f64 },
    /// Evenly spaced platoon driving at one speed.
    Platoon { n: usize, malicious_pct: f64, malicious: BehaviorProfile, start_m: f64, end_m: f64, speed_mph: f64 },
    /// A malicious cluster inside the first RSU's cell and an honest group
    /// approaching from `poc_distance * poc_unit_m` metres outside it.
    Approach {
        honest_n: usize,
        malicious_n: usize,
        malicious: BehaviorProfile,
        speed_mph: f64,
        poc_distance: f64,
        #[serde(default = "default_poc_unit")]
        poc_unit_m: f64,
        #[serde(default = "default_gap")]
        gap_m: f64,
    },
}

fn default_poc_unit() -> f64 {
    50.0
}

fn default_gap() -> f64 {
    10.0
}

fn default_threshold() -> usize {
    3
}

fn default_sigma() -> f64 {
    10.0
}

fn default_prime_bits() -> u64 {
    128
}

fn default_t_max() -> u32 {
    DEFAULT_T_MAX_S
}

fn default_horizon() -> f64 {
    900.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub seed: u64,
    #[serde(default = "default_model")]
    pub model: ModelKind,
    pub ground_truth: Event,
    pub corridor_length_m: f64,
    pub first_rsu_m: f64,
    pub rsu_spacing_m: f64,
    /// Defaults to as many RSUs as fit in the corridor.
    #[serde(default)]
    pub n_rsu: Option<usize>,
    /// Permit spacings outside 1000..=2500 m.
    #[serde(default)]
    pub free_spacing: bool,
    #[serde(default = "default_threshold")]
    pub threshold: usize,
    #[serde(default = "default_sigma")]
    pub sigma_s: f64,
    #[serde(default)]
    pub scrutiny: ScrutinyParams,
    #[serde(default)]
    pub channel: ChannelParams,
    #[serde(default = "default_prime_bits")]
    pub prime_bits: u64,
    #[serde(default = "default_t_max")]
    pub t_max_s: u32,
    #[serde(default = "default_horizon")]
    pub horizon_s: f64,
    #[serde(default)]
    pub vehicles: Vec<VehicleSpec>,
    #[serde(default)]
    pub population: Option<Population>,
    /// Vehicles whose reports are corrupted in transit to the RSU.
    #[serde(default)]
    pub tamper: Vec<VehicleId>,
}

fn default_model() -> ModelKind {
    ModelKind::Proposed
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        let s: Scenario = toml::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn rsu_count(&self) -> usize {
        self.n_rsu.unwrap_or_else(|| {
            if self.first_rsu_m > self.corridor_length_m {
                0
            } else {
                ((self.corridor_length_m - self.first_rsu_m) / self.rsu_spacing_m).floor() as usize + 1
            }
        })
    }

    pub fn corridor(&self) -> Corridor {
        Corridor::evenly_spaced(self.rsu_count(), self.first_rsu_m, self.rsu_spacing_m, self.channel.range_m)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |m: &str| Err(ScenarioError::Invalid(m.to_string()));
        if !(self.corridor_length_m > 0.0) {
            return bad("corridor_length_m must be positive");
        }
        if !(self.rsu_spacing_m > 0.0) {
            return bad("rsu_spacing_m must be positive");
        }
        if !self.free_spacing && !(1000.0..=2500.0).contains(&self.rsu_spacing_m) {
            return bad("rsu_spacing_m must lie in 1000..=2500 (set free_spacing to override)");
        }
        if self.rsu_count() == 0 {
            return bad("corridor has no RSU");
        }
        if self.threshold == 0 {
            return bad("threshold must be at least 1");
        }
        if !(self.sigma_s >= 0.0) || !(self.horizon_s > 0.0) {
            return bad("sigma_s must be non-negative and horizon_s positive");
        }
        if self.prime_bits < 64 {
            return bad("prime_bits must be at least 64");
        }
        let c = &self.channel;
        if !(c.range_m > 0.0) || !(c.latency_s >= 0.0) || !(c.backhaul_latency_s >= 0.0) {
            return bad("channel range must be positive and latencies non-negative");
        }
        if !(0.0..=1.0).contains(&c.loss_prob) {
            return bad("loss_prob must lie in [0, 1]");
        }
        self.scrutiny.validate().map_err(ScenarioError::Invalid)?;
        for v in &self.vehicles {
            if !(0.0..=self.corridor_length_m).contains(&v.position_m) {
                return bad("vehicle position outside the corridor");
            }
            if !(v.velocity_mph >= 0.0) {
                return bad("vehicle velocity must be non-negative");
            }
        }
        match &self.population {
            Some(Population::Uniform { malicious_pct, start_m, end_m, .. })
            | Some(Population::Platoon { malicious_pct, start_m, end_m, .. }) => {
                if !(0.0..=100.0).contains(malicious_pct) {
                    return bad("malicious_pct must lie in [0, 100]");
                }
                if !(0.0 <= *start_m && start_m <= end_m && *end_m <= self.corridor_length_m) {
                    return bad("population span must lie inside the corridor");
                }
            }
            Some(Population::Approach { poc_distance, poc_unit_m, speed_mph, .. })
                if !(*poc_distance >= 0.0 && *poc_unit_m > 0.0 && *speed_mph >= 0.0) =>
            {
                return bad("approach population needs non-negative distances and speed");
            }
            Some(Population::Approach { .. }) | None => {}
        }
        if self.vehicles.is_empty() && self.population.is_none() {
            return bad("scenario has no vehicles");
        }
        Ok(())
    }

    /// Sets the axis a sweep varies.
    pub fn set_axis(&mut self, axis: SweepAxis, value: f64) -> Result<(), ScenarioError> {
        match axis {
            SweepAxis::RsuSpacing => {
                self.rsu_spacing_m = value;
                Ok(())
            }
            SweepAxis::MaliciousPct => match &mut self.population {
                Some(Population::Uniform { malicious_pct, .. }) | Some(Population::Platoon { malicious_pct, .. }) => {
                    *malicious_pct = value;
                    Ok(())
                }
                _ => Err(ScenarioError::Invalid("malicious_pct needs a uniform or platoon population".into())),
            },
            SweepAxis::PocDistance => match &mut self.population {
                Some(Population::Approach { poc_distance, .. }) => {
                    *poc_distance = value;
                    Ok(())
                }
                _ => Err(ScenarioError::Invalid("poc_distance needs an approach population".into())),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    MaliciousPct,
    PocDistance,
    RsuSpacing,
}

impl SweepAxis {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "malicious_pct" => Some(Self::MaliciousPct),
            "poc_distance" => Some(Self::PocDistance),
            "rsu_spacing" => Some(Self::RsuSpacing),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::MaliciousPct => "malicious_pct",
            Self::PocDistance => "poc_distance",
            Self::RsuSpacing => "rsu_spacing",
        }
    }
}
