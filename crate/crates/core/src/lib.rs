//! Privacy-preserving, edge-assisted traffic monitoring for vehicular ad hoc
//! networks, plus a deterministic discrete-event simulator that drives the
//! protocol end to end and the comparison models it is measured against.

// NaN-rejecting validation reads best as negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod central;
pub mod crypto;
pub mod edge;
pub mod ids;
pub mod messages;
pub mod metrics;
pub mod oracle;
pub mod road;
pub mod rsu;
pub mod sim;
pub mod vehicle;

pub use ids::{Event, IdError, RsuId, VehicleId};
