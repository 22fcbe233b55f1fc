use super::decision::filter_dsg;
use super::dsg::Dsg;
use super::{Basis, Decision, ScrutinyParams, Verdict};
use crate::ids::{Event, VehicleId};
use crate::messages::DataPacket;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScrutinyOutcome {
    /// Both velocities are plausible for the reported events.
    Neither,
    Malicious(VehicleId),
    Both,
}

fn implausible(p: &DataPacket, params: &ScrutinyParams) -> bool {
    let vel = p.vel_mph();
    match p.event {
        Event::Congested => vel > params.vel_congested + params.epsilon,
        Event::NonCongested => vel < params.vel_ncongested - params.epsilon,
    }
}

/// Velocity-consistency check on two conflicting reports.
pub fn scrutinize(p1: &DataPacket, p2: &DataPacket, params: &ScrutinyParams) -> ScrutinyOutcome {
    if p1.event == p2.event {
        return ScrutinyOutcome::Neither;
    }
    match (implausible(p1, params), implausible(p2, params)) {
        (false, false) => ScrutinyOutcome::Neither,
        (true, false) => ScrutinyOutcome::Malicious(p1.v_id.clone()),
        (false, true) => ScrutinyOutcome::Malicious(p2.v_id.clone()),
        (true, true) => ScrutinyOutcome::Both,
    }
}

/// Scrutiny on two vertices of `dsg`. `None` means the pair must be challenged.
pub fn initial_scrutiny(dsg: &Dsg, cv1: &VehicleId, cv2: &VehicleId, params: &ScrutinyParams) -> Option<Decision> {
    let p1 = dsg.packet_of(cv1)?;
    let p2 = dsg.packet_of(cv2)?;
    match scrutinize(p1, p2, params) {
        ScrutinyOutcome::Neither => None,
        ScrutinyOutcome::Malicious(m) => {
            let other = if m == *cv1 { p2 } else { p1 };
            let (mal_list, nonmal_list) = filter_dsg(dsg, &m);
            Some(Decision { verdict: Verdict::from(other.event), mal_list, nonmal_list, basis: Basis::InitialScrutiny })
        }
        ScrutinyOutcome::Both => Some(Decision {
            verdict: Verdict::Undetermined,
            mal_list: [cv1.clone(), cv2.clone()].into(),
            nonmal_list: Default::default(),
            basis: Basis::Inconclusive,
        }),
    }
}
