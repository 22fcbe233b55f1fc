//! Trusted central server: vehicle key directory, ROI routing, and
//! combination of per-region verdicts.

use std::collections::BTreeMap;

use rand::RngCore;
use thiserror::Error;

use crate::crypto::{EgGroup, EgKeyPair, EgPublicKey};
use crate::edge::Verdict;
use crate::ids::VehicleId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeHandle(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CentralError {
    #[error("vehicle {0} is already registered")]
    DuplicateId(VehicleId),
    #[error("region {0:?} is already registered")]
    DuplicateRegion(String),
    #[error("no edge server owns region {0:?}")]
    UnknownRegion(String),
    #[error("no regional decisions to aggregate")]
    NoDecisions,
}

#[derive(Debug, Clone)]
pub struct Registry {
    group: EgGroup,
    keys: BTreeMap<VehicleId, EgPublicKey>,
    regions: BTreeMap<String, EdgeHandle>,
}

impl Registry {
    pub fn new(group: EgGroup) -> Self {
        Self { group, keys: BTreeMap::new(), regions: BTreeMap::new() }
    }

    pub fn group(&self) -> &EgGroup {
        &self.group
    }

    /// Issues a key pair for `id`; only the public half is kept.
    pub fn register<R: RngCore + ?Sized>(&mut self, id: VehicleId, rng: &mut R) -> Result<EgKeyPair, CentralError> {
        if self.keys.contains_key(&id) {
            return Err(CentralError::DuplicateId(id));
        }
        let kp = EgKeyPair::generate(&self.group, rng);
        self.keys.insert(id, kp.public().clone());
        Ok(kp)
    }

    pub fn get_public(&self, id: &VehicleId) -> Option<&EgPublicKey> {
        self.keys.get(id)
    }

    pub fn is_registered(&self, id: &VehicleId) -> bool {
        self.keys.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn add_region(&mut self, roi: impl Into<String>, edge: EdgeHandle) -> Result<(), CentralError> {
        let roi = roi.into();
        if self.regions.contains_key(&roi) {
            return Err(CentralError::DuplicateRegion(roi));
        }
        self.regions.insert(roi, edge);
        Ok(())
    }

    pub fn route_request(&self, roi: &str) -> Result<EdgeHandle, CentralError> {
        self.regions.get(roi).copied().ok_or_else(|| CentralError::UnknownRegion(roi.to_string()))
    }
}

/// Verdict held by a strict plurality of edges; any tie for first place is undetermined.
pub fn aggregate_regions(decisions: impl IntoIterator<Item = Verdict>) -> Result<Verdict, CentralError> {
    let mut counts: BTreeMap<Verdict, usize> = BTreeMap::new();
    for v in decisions {
        *counts.entry(v).or_default() += 1;
    }
    let best = counts.values().copied().max().ok_or(CentralError::NoDecisions)?;
    let mut winners = counts.iter().filter(|(_, &c)| c == best).map(|(v, _)| *v);
    match (winners.next(), winners.next()) {
        (Some(v), None) => Ok(v),
        _ => Ok(Verdict::Undetermined),
    }
}
