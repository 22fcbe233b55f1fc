//! One-dimensional corridor with roadside units at fixed positions.

use serde::{Deserialize, Serialize};

use crate::ids::RsuId;

/// Conversion factor from miles per hour to metres per second.
pub const MPH_TO_MPS: f64 = 0.44704;

pub const DEFAULT_RANGE_M: f64 = 510.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RsuSite {
    pub id: RsuId,
    pub location_m: f64,
}

/// RSUs sorted by location, all sharing one transmission range.
#[derive(Debug, Clone, PartialEq)]
pub struct Corridor {
    rsus: Vec<RsuSite>,
    range_m: f64,
}

impl Corridor {
    pub fn new(mut rsus: Vec<RsuSite>, range_m: f64) -> Self {
        rsus.sort_by(|a, b| a.location_m.total_cmp(&b.location_m).then_with(|| a.id.cmp(&b.id)));
        Self { rsus, range_m }
    }

    /// `count` RSUs starting at `first_m`, `spacing_m` apart, named RSU000, RSU001, ...
    pub fn evenly_spaced(count: usize, first_m: f64, spacing_m: f64, range_m: f64) -> Self {
        let rsus = (0..count)
            .map(|i| RsuSite { id: RsuId::numbered(i), location_m: first_m + spacing_m * i as f64 })
            .collect();
        Self::new(rsus, range_m)
    }

    pub fn rsus(&self) -> &[RsuSite] {
        &self.rsus
    }

    pub fn range_m(&self) -> f64 {
        self.range_m
    }

    pub fn index_of(&self, id: &RsuId) -> Option<usize> {
        self.rsus.iter().position(|r| &r.id == id)
    }

    pub fn location_of(&self, id: &RsuId) -> Option<f64> {
        self.index_of(id).map(|i| self.rsus[i].location_m)
    }

    pub fn in_range(&self, a_m: f64, b_m: f64) -> bool {
        (a_m - b_m).abs() <= self.range_m
    }

    /// Nearest RSU covering `pos_m`; ties go to the upstream one.
    pub fn nearest_in_range(&self, pos_m: f64) -> Option<&RsuSite> {
        self.rsus
            .iter()
            .filter(|r| self.in_range(r.location_m, pos_m))
            .min_by(|a, b| (a.location_m - pos_m).abs().total_cmp(&(b.location_m - pos_m).abs()))
    }

    /// RSUs a vehicle at `pos_m` is covered by now or will reach driving
    /// downstream, in corridor order.
    pub fn trajectory_from(&self, pos_m: f64) -> Vec<RsuId> {
        self.rsus.iter().filter(|r| r.location_m + self.range_m >= pos_m).map(|r| r.id.clone()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trajectory_includes_covering_rsu() {
        let c = Corridor::evenly_spaced(3, 500.0, 1000.0, DEFAULT_RANGE_M);
        let t = c.trajectory_from(900.0);
        assert_eq!(t, vec![RsuId::numbered(0), RsuId::numbered(1), RsuId::numbered(2)]);
        assert_eq!(c.trajectory_from(1100.0), vec![RsuId::numbered(1), RsuId::numbered(2)]);
        assert!(c.trajectory_from(3100.0).is_empty());
    }

    #[test]
    fn nearest() {
        let c = Corridor::evenly_spaced(2, 0.0, 1000.0, DEFAULT_RANGE_M);
        assert_eq!(c.nearest_in_range(499.0).unwrap().id, RsuId::numbered(0));
        assert_eq!(c.nearest_in_range(501.0).unwrap().id, RsuId::numbered(1));
        assert!(c.nearest_in_range(-600.0).is_none());
    }
}
