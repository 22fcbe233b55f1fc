//! Deterministic discrete-event simulation of a road corridor.

mod channel;
mod engine;
mod population;
pub mod presets;
mod report;
mod scenario;

pub use channel::{secs_to_ms, Channel};
pub use engine::run;
pub use population::{expand, malicious_count, speed_band};
pub use report::{append_csv, write_csv, LogEntry, SimReport, CSV_HEADER};
pub use scenario::{ChannelParams, ModelKind, Population, Scenario, ScenarioError, SweepAxis, VehicleSpec};
