use std::io;

use serde::Serialize;

use super::scenario::ModelKind;
use crate::edge::{Decision, Verdict};
use crate::ids::Event;
use crate::metrics::{ModelPath, ENERGY_PER_TRANSMISSION_MW};

pub const CSV_HEADER: [&str; 12] = [
    "model",
    "n",
    "threshold",
    "n_rsu",
    "malicious_pct",
    "verdict",
    "accuracy",
    "vehicle_broadcasts",
    "total_transmissions",
    "energy_mw",
    "decision_time_s",
    "basis",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LogEntry {
    pub t_ms: u64,
    pub entity: String,
    pub event: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub model: ModelKind,
    pub path: ModelPath,
    pub n: usize,
    pub threshold: usize,
    pub n_rsu: usize,
    pub malicious: usize,
    pub ground_truth: Event,
    pub verdict: Verdict,
    /// The outcome hinged on something other than the reports (tie, prior scores).
    pub conditional: bool,
    pub basis: String,
    pub accuracy: f64,
    /// Present for the proposed model.
    pub decision: Option<Decision>,
    pub per_vehicle_broadcasts: Vec<u64>,
    pub rsu_transmissions: u64,
    pub edge_transmissions: u64,
    pub decision_time_ms: Option<u64>,
    pub end_time_ms: u64,
    pub log: Vec<LogEntry>,
}

impl SimReport {
    pub fn vehicle_broadcasts(&self) -> u64 {
        self.per_vehicle_broadcasts.iter().sum()
    }

    pub fn total_transmissions(&self) -> u64 {
        self.vehicle_broadcasts() + self.rsu_transmissions + self.edge_transmissions
    }

    /// Transmission energy in mW.
    pub fn energy_mw(&self) -> u64 {
        self.total_transmissions() * ENERGY_PER_TRANSMISSION_MW
    }

    pub fn malicious_pct(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            100.0 * self.malicious as f64 / self.n as f64
        }
    }

    pub fn decision_time_s(&self) -> Option<f64> {
        self.decision_time_ms.map(|ms| ms as f64 / 1000.0)
    }

    /// Internal consistency of a finished run.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.per_vehicle_broadcasts.len() != self.n {
            return Err(format!("{} broadcast counters for {} vehicles", self.per_vehicle_broadcasts.len(), self.n));
        }
        if let Some(d) = &self.decision {
            if !d.lists_disjoint() {
                return Err("a vehicle is on both the malicious and non-malicious lists".into());
            }
            if d.verdict != self.verdict {
                return Err("report verdict differs from the edge decision".into());
            }
        }
        if self.decision_time_ms.is_some_and(|t| t > self.end_time_ms) {
            return Err("decision recorded after the run ended".into());
        }
        if !(0.0..=1.0).contains(&self.accuracy) {
            return Err(format!("accuracy {} out of range", self.accuracy));
        }
        Ok(())
    }

    pub fn verdict_label(&self) -> &'static str {
        if self.conditional && self.verdict == Verdict::Undetermined {
            "conditional"
        } else {
            self.verdict.as_str()
        }
    }

    pub fn csv_record(&self) -> Vec<String> {
        let model = match self.model {
            ModelKind::Proposed => self.path.as_str(),
            other => other.as_str(),
        };
        vec![
            model.to_string(),
            self.n.to_string(),
            self.threshold.to_string(),
            self.n_rsu.to_string(),
            format!("{:.1}", self.malicious_pct()),
            self.verdict_label().to_string(),
            self.accuracy.to_string(),
            self.vehicle_broadcasts().to_string(),
            self.total_transmissions().to_string(),
            self.energy_mw().to_string(),
            self.decision_time_ms.map(|ms| format!("{:.3}", ms as f64 / 1000.0)).unwrap_or_default(),
            self.basis.clone(),
        ]
    }
}

pub fn write_csv<'a, W: io::Write>(out: W, reports: impl IntoIterator<Item = &'a SimReport>) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in reports {
        w.write_record(r.csv_record())?;
    }
    w.flush()?;
    Ok(())
}

/// Appends rows without a header, for extending an existing file.
pub fn append_csv<'a, W: io::Write>(out: W, reports: impl IntoIterator<Item = &'a SimReport>) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for r in reports {
        w.write_record(r.csv_record())?;
    }
    w.flush()?;
    Ok(())
}
