use crate::ids::{Event, VehicleId};
use crate::messages::{ChallengeEntry, ChallengePacket, DataPacket};
use crate::road::{Corridor, MPH_TO_MPS};

pub const DEFAULT_T_MAX_S: u32 = 600;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChallengePlan {
    pub entries: Vec<ChallengeEntry>,
    /// Conflicting vehicles no RSU on their trajectory can reach within `t_max`.
    pub unchallengeable: Vec<VehicleId>,
}

impl ChallengePlan {
    pub fn packet(&self) -> Option<ChallengePacket> {
        (!self.entries.is_empty()).then(|| ChallengePacket { entries: self.entries.clone() })
    }
}

/// Where and when `p`'s sender should show up if its report is true.
pub fn expected_presence(p: &DataPacket, corridor: &Corridor, t_max: u32) -> Option<ChallengeEntry> {
    let sites: Vec<(usize, f64)> =
        p.trajectory.iter().enumerate().filter_map(|(k, id)| corridor.location_of(id).map(|loc| (k, loc))).collect();
    let speed = p.vel_mph() * MPH_TO_MPS;
    let gps = p.gps_m();
    for t in 0..=t_max {
        let expected = gps + f64::from(t) * speed;
        let hit = sites.iter().find(|(_, loc)| corridor.in_range(expected, *loc)).map(|(k, _)| *k);
        let Some(k) = hit else { continue };
        let expected_rsus = match p.event {
            Event::Congested => vec![p.trajectory[k].clone()],
            Event::NonCongested => {
                p.trajectory[k..].iter().filter(|id| corridor.location_of(id).is_some()).cloned().collect()
            }
        };
        return Some(ChallengeEntry { cv: p.v_id.clone(), expected_rsus, time_s: t });
    }
    None
}

pub fn generate_challenge(p1: &DataPacket, p2: &DataPacket, corridor: &Corridor, t_max: u32) -> ChallengePlan {
    let mut plan = ChallengePlan::default();
    for p in [p1, p2] {
        match expected_presence(p, corridor, t_max) {
            Some(e) => plan.entries.push(e),
            None => plan.unchallengeable.push(p.v_id.clone()),
        }
    }
    plan
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::RsuId;
    use crate::messages::mph_to_centi;
    use crate::road::{RsuSite, DEFAULT_RANGE_M};
    use num_bigint::BigUint;

    fn pkt(event: Event, vel: f64, gps: f64, trajectory: Vec<RsuId>) -> DataPacket {
        DataPacket {
            v_id: VehicleId::new("CAR00001").unwrap(),
            ds: vec![],
            event,
            vel_centi_mph: mph_to_centi(vel),
            gps_mm: (gps * 1000.0) as i64,
            enc_ids: vec![BigUint::from(1u8)],
            trajectory,
        }
    }

    #[test]
    fn twenty_metres_per_second_reaches_rsu_at_25s() {
        let c = Corridor::new(vec![RsuSite { id: RsuId::numbered(0), location_m: 1000.0 }], DEFAULT_RANGE_M);
        let e = expected_presence(&pkt(Event::Congested, 44.704, 0.0, vec![RsuId::numbered(0)]), &c, 600).unwrap();
        assert_eq!(e.time_s, 25);
        assert_eq!(e.expected_rsus, vec![RsuId::numbered(0)]);
    }

    #[test]
    fn stationary_in_range_is_immediate() {
        let c = Corridor::evenly_spaced(2, 0.0, 2000.0, DEFAULT_RANGE_M);
        let e = expected_presence(&pkt(Event::Congested, 0.0, 2100.0, c.trajectory_from(2100.0)), &c, 600).unwrap();
        assert_eq!((e.time_s, e.expected_rsus), (0, vec![RsuId::numbered(1)]));
    }

    #[test]
    fn non_congested_lists_downstream_rsus() {
        let c = Corridor::evenly_spaced(4, 0.0, 1500.0, DEFAULT_RANGE_M);
        let e = expected_presence(&pkt(Event::NonCongested, 60.0, 1000.0, c.trajectory_from(1000.0)), &c, 600).unwrap();
        assert_eq!(e.expected_rsus, vec![RsuId::numbered(1), RsuId::numbered(2), RsuId::numbered(3)]);
    }

    #[test]
    fn unreachable_within_t_max() {
        let c = Corridor::evenly_spaced(1, 10_000.0, 1000.0, DEFAULT_RANGE_M);
        let p = pkt(Event::Congested, 0.0, 0.0, vec![RsuId::numbered(0)]);
        let q = pkt(Event::NonCongested, 60.0, 0.0, vec![RsuId::numbered(0)]);
        let plan = generate_challenge(&p, &q, &c, 600);
        assert_eq!(plan.unchallengeable.len(), 1);
        assert_eq!(plan.entries.len(), 1);
    }
}
