use std::collections::BTreeSet;

use super::dsg::Dsg;
use crate::ids::VehicleId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PocPass {
    /// Adjacent vertices disagree.
    Adjacency,
    /// Two vertices under the same RSU disagree.
    SameRsu,
}

/// Point of conflict; `cv1 < cv2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poc {
    pub cv1: VehicleId,
    pub cv2: VehicleId,
    pub pass: PocPass,
}

pub fn detect_poc(dsg: &Dsg) -> Option<Poc> {
    detect_poc_excluding(dsg, &BTreeSet::new())
}

/// Like [`detect_poc`], ignoring vertices in `excluded`. Ties go to the
/// lexicographically lowest pair.
pub fn detect_poc_excluding(dsg: &Dsg, excluded: &BTreeSet<VehicleId>) -> Option<Poc> {
    let live = |id: &VehicleId| !excluded.contains(id);
    for (a, b) in dsg.edges() {
        if live(a) && live(b) && dsg.event_of(a) != dsg.event_of(b) {
            return Some(Poc { cv1: a.clone(), cv2: b.clone(), pass: PocPass::Adjacency });
        }
    }
    let verts: Vec<_> = dsg.vertices().filter(|(id, _)| live(id)).collect();
    for (i, (a, va)) in verts.iter().enumerate() {
        for (b, vb) in &verts[i + 1..] {
            if va.rsu == vb.rsu && va.event != vb.event {
                return Some(Poc { cv1: (*a).clone(), cv2: (*b).clone(), pass: PocPass::SameRsu });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::{Event, RsuId};

    fn v(s: &str) -> VehicleId {
        VehicleId::new(s).unwrap()
    }

    #[test]
    fn neighbours_disagree() {
        let g = Dsg::from_parts(
            [(v("A"), Event::Congested, RsuId::numbered(0)), (v("B"), Event::NonCongested, RsuId::numbered(1))],
            [(v("B"), v("A"))],
        );
        let poc = detect_poc(&g).unwrap();
        assert_eq!((poc.cv1, poc.cv2, poc.pass), (v("A"), v("B"), PocPass::Adjacency));
    }

    #[test]
    fn agreement_has_no_poc() {
        let g = Dsg::from_parts(
            [(v("A"), Event::Congested, RsuId::numbered(0)), (v("B"), Event::Congested, RsuId::numbered(0))],
            [(v("A"), v("B"))],
        );
        assert_eq!(detect_poc(&g), None);
    }

    #[test]
    fn hidden_clique_found_by_same_rsu() {
        let r = RsuId::numbered(0);
        let mut verts = vec![(v("H"), Event::Congested, r.clone())];
        let ms = ["M1", "M2", "M3", "M4"];
        verts.extend(ms.iter().map(|m| (v(m), Event::NonCongested, r.clone())));
        let mut edges = Vec::new();
        for a in ms {
            for b in ms {
                if a != b {
                    edges.push((v(a), v(b)));
                }
            }
        }
        let g = Dsg::from_parts(verts, edges);
        let poc = detect_poc(&g).unwrap();
        assert_eq!(poc.pass, PocPass::SameRsu);
        assert_eq!((poc.cv1, poc.cv2), (v("H"), v("M1")));
    }

    #[test]
    fn different_rsus_do_not_conflict() {
        let g = Dsg::from_parts(
            [(v("A"), Event::Congested, RsuId::numbered(0)), (v("B"), Event::NonCongested, RsuId::numbered(1))],
            [],
        );
        assert_eq!(detect_poc(&g), None);
    }
}
