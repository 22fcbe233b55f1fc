//! Accuracy classification, broadcast and energy cost formulas, timing.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Energy drawn per transmission, in mW.
pub const ENERGY_PER_TRANSMISSION_MW: u64 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelPath {
    Majority,
    Reputation,
    PeerAuth,
    /// Proposed model resolved by initial scrutiny.
    ProposedLower,
    /// Proposed model that needed a challenge round.
    ProposedUpper,
}

impl ModelPath {
    pub const ALL: [ModelPath; 5] = [
        ModelPath::Majority,
        ModelPath::Reputation,
        ModelPath::PeerAuth,
        ModelPath::ProposedLower,
        ModelPath::ProposedUpper,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelPath::Majority => "majority",
            ModelPath::Reputation => "reputation",
            ModelPath::PeerAuth => "peer_auth",
            ModelPath::ProposedLower => "proposed_lower",
            ModelPath::ProposedUpper => "proposed_upper",
        }
    }
}

impl fmt::Display for ModelPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostModel {
    pub n: u64,
    pub threshold: u64,
    pub n_rsu: u64,
}

/// Total transmissions by vehicles, RSUs and the edge for one decision.
pub fn total_transmissions(model: ModelPath, c: CostModel) -> Ratio<u64> {
    let n = Ratio::from_integer(c.n);
    let per_batch = Ratio::new(c.n, c.threshold);
    match model {
        ModelPath::Majority | ModelPath::Reputation => n + per_batch,
        ModelPath::PeerAuth => n * (1 + c.threshold),
        ModelPath::ProposedLower => n * 2 + per_batch,
        ModelPath::ProposedUpper => n * 2 + per_batch + 2 * c.n_rsu + n + 1,
    }
}

/// Integer display value, rounding fractional counts up.
pub fn displayed(x: Ratio<u64>) -> u64 {
    x.ceil().to_integer()
}

pub fn energy_mw(model: ModelPath, c: CostModel) -> Ratio<u64> {
    total_transmissions(model, c) * ENERGY_PER_TRANSMISSION_MW
}

/// Broadcasts originated by vehicles.
pub fn vehicle_broadcasts(model: ModelPath, n: u64, threshold: u64) -> u64 {
    match model {
        ModelPath::Majority | ModelPath::Reputation => n,
        ModelPath::PeerAuth => n * threshold,
        ModelPath::ProposedLower => 2 * n,
        ModelPath::ProposedUpper => 3 * n,
    }
}

/// 1 for a correct verdict with the malicious set identified, 0.5 for a
/// conditional outcome, otherwise 0.
pub fn detection_accuracy(correct: bool, conditional: bool) -> f64 {
    if conditional {
        0.5
    } else if correct {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("no observations")]
pub struct NoObservations;

/// Fraction of observations at or below `limit`.
pub fn detection_probability(times: &[f64], limit: f64) -> Result<f64, NoObservations> {
    if times.is_empty() {
        return Err(NoObservations);
    }
    let hits = times.iter().filter(|&&t| t <= limit).count();
    Ok(hits as f64 / times.len() as f64)
}
