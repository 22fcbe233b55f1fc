//! Identity newtypes shared by every protocol role.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdError {
    #[error("identifier is empty")]
    Empty,
    #[error("identifier {0:?} contains a character outside [0-9A-Z]")]
    BadVehicleChar(String),
    #[error("RSU identifier {0:?} must be 1..=255 printable ASCII characters")]
    BadRsuId(String),
}

/// Vehicle identity: uppercase letters and digits only, so that every
/// character's ASCII code fits in one base-100 digit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct VehicleId(String);

impl VehicleId {
    pub fn new(id: impl Into<String>) -> Result<Self, IdError> {
        let id = id.into();
        if id.is_empty() {
            return Err(IdError::Empty);
        }
        if !id.bytes().all(is_vehicle_id_byte) {
            return Err(IdError::BadVehicleChar(id));
        }
        Ok(Self(id))
    }

    /// Canonical simulator id: `CAR` followed by a zero-padded index.
    pub fn numbered(index: usize) -> Self {
        Self(format!("CAR{index:05}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub(crate) fn is_vehicle_id_byte(b: u8) -> bool {
    b.is_ascii_digit() || b.is_ascii_uppercase()
}

impl TryFrom<String> for VehicleId {
    type Error = IdError;
    fn try_from(s: String) -> Result<Self, IdError> {
        Self::new(s)
    }
}

impl From<VehicleId> for String {
    fn from(id: VehicleId) -> String {
        id.0
    }
}

impl fmt::Display for VehicleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct RsuId(String);

impl RsuId {
    pub fn new(id: impl Into<String>) -> Result<Self, IdError> {
        let id = id.into();
        if id.is_empty() || id.len() > 255 || !id.bytes().all(|b| b.is_ascii_graphic()) {
            return Err(IdError::BadRsuId(id));
        }
        Ok(Self(id))
    }

    pub fn numbered(index: usize) -> Self {
        Self(format!("RSU{index:03}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for RsuId {
    type Error = IdError;
    fn try_from(s: String) -> Result<Self, IdError> {
        Self::new(s)
    }
}

impl From<RsuId> for String {
    fn from(id: RsuId) -> String {
        id.0
    }
}

impl fmt::Display for RsuId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Traffic state recorded by a vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Event {
    Congested,
    NonCongested,
}

impl Event {
    pub fn opposite(self) -> Self {
        match self {
            Event::Congested => Event::NonCongested,
            Event::NonCongested => Event::Congested,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Event::Congested => "congested",
            Event::NonCongested => "non_congested",
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
