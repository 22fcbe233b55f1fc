use std::collections::{BTreeMap, BTreeSet};

use super::challenge::generate_challenge;
use super::decision::{challenge_outcome, filter_dsg, ChallengeOutcome};
use super::dsg::Dsg;
use super::poc::{detect_poc_excluding, Poc};
use super::scrutiny::{scrutinize, ScrutinyOutcome};
use super::{Basis, Decision, ScrutinyParams, Verdict};
use crate::central::Registry;
use crate::crypto::{decode_key, sym_decrypt, SsKeyPair};
use crate::ids::{Event, RsuId, VehicleId};
use crate::messages::{
    AggregatePacket, ChallengePacket, DataPacket, EncryptedDataPacket, SearchResponse, VehicleSearch, Wire,
};
use crate::road::Corridor;

#[derive(Debug, Clone)]
pub struct EdgeConfig {
    pub threshold: usize,
    pub scrutiny: ScrutinyParams,
    pub t_max: u32,
    pub corridor: Corridor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RejectReason {
    /// The signature does not verify under the claimed id's key.
    Masquerade,
    GpsOutOfRange,
    MalformedCrypto,
    /// Neighbour list length differs from the threshold.
    BadNeighborCount,
    /// A second packet from an id that already reported.
    Duplicate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub rsu: RsuId,
    pub claimed: Option<VehicleId>,
    pub reason: RejectReason,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeAction {
    Challenge(ChallengePacket),
    Decided { verdict: Event, basis: Basis },
}

#[derive(Debug, Clone)]
struct Pending {
    pair: [(VehicleId, Event); 2],
    awaiting: BTreeMap<VehicleId, BTreeSet<RsuId>>,
    received: BTreeSet<VehicleId>,
}

/// Incremental decision pipeline for one ROI round.
///
/// Aggregates are ingested as they arrive. Every arrival looks for a new
/// point of conflict among unlabelled reporters until a verdict exists.
#[derive(Debug, Clone)]
pub struct EdgeServer {
    keys: SsKeyPair,
    cfg: EdgeConfig,
    dsg: Dsg,
    rejections: Vec<Rejection>,
    mal: BTreeSet<VehicleId>,
    nonmal: BTreeSet<VehicleId>,
    suspects: BTreeSet<VehicleId>,
    verdict: Option<(Event, Basis)>,
    decided_at_ms: Option<u64>,
    pending: Option<Pending>,
    pocs: Vec<Poc>,
    challenges_issued: usize,
}

impl EdgeServer {
    pub fn new(keys: SsKeyPair, cfg: EdgeConfig) -> Self {
        Self {
            keys,
            cfg,
            dsg: Dsg::new(),
            rejections: Vec::new(),
            mal: BTreeSet::new(),
            nonmal: BTreeSet::new(),
            suspects: BTreeSet::new(),
            verdict: None,
            decided_at_ms: None,
            pending: None,
            pocs: Vec::new(),
            challenges_issued: 0,
        }
    }

    pub fn keys(&self) -> &SsKeyPair {
        &self.keys
    }

    pub fn dsg(&self) -> &Dsg {
        &self.dsg
    }

    pub fn rejections(&self) -> &[Rejection] {
        &self.rejections
    }

    pub fn pocs(&self) -> &[Poc] {
        &self.pocs
    }

    pub fn challenges_issued(&self) -> usize {
        self.challenges_issued
    }

    pub fn decided_at_ms(&self) -> Option<u64> {
        self.decided_at_ms
    }

    pub fn awaiting_challenge(&self) -> bool {
        self.pending.is_some()
    }

    fn open_packet(&self, enc: &EncryptedDataPacket) -> Option<DataPacket> {
        let key = decode_key(&self.keys.decrypt(&enc.tau)).ok()?;
        let plain = sym_decrypt(&enc.body, &key).ok()?;
        DataPacket::from_bytes(&plain).ok()
    }

    fn reject(&mut self, rsu: &RsuId, claimed: Option<VehicleId>, reason: RejectReason) {
        self.rejections.push(Rejection { rsu: rsu.clone(), claimed, reason });
    }

    /// Decrypts, authenticates and range-checks every packet in `agg`.
    pub fn ingest(&mut self, agg: &AggregatePacket, registry: &Registry) {
        let rsu_loc = agg.location_mm as f64 / 1000.0;
        for enc in &agg.packets {
            let Some(p) = self.open_packet(enc) else {
                self.reject(&agg.rsu_id, None, RejectReason::MalformedCrypto);
                continue;
            };
            let authentic = registry.get_public(&p.v_id).is_some_and(|pk| pk.verify_bytes(p.v_id.as_bytes(), &p.ds));
            if !authentic {
                self.reject(&agg.rsu_id, Some(p.v_id), RejectReason::Masquerade);
                continue;
            }
            if self.dsg.contains(&p.v_id) {
                self.reject(&agg.rsu_id, Some(p.v_id), RejectReason::Duplicate);
                continue;
            }
            if p.enc_ids.len() != self.cfg.threshold {
                self.mal.insert(p.v_id.clone());
                self.reject(&agg.rsu_id, Some(p.v_id), RejectReason::BadNeighborCount);
                continue;
            }
            if !self.cfg.corridor.in_range(p.gps_m(), rsu_loc) {
                self.mal.insert(p.v_id.clone());
                self.reject(&agg.rsu_id, Some(p.v_id), RejectReason::GpsOutOfRange);
                continue;
            }
            self.dsg.add_packet(p, agg.rsu_id.clone(), &self.keys, |id| registry.is_registered(id));
        }
    }

    pub fn on_aggregate(&mut self, agg: &AggregatePacket, registry: &Registry, now_ms: u64) -> Vec<EdgeAction> {
        self.ingest(agg, registry);
        self.advance(now_ms)
    }

    pub fn on_search(&mut self, search: &VehicleSearch, now_ms: u64) -> Vec<EdgeAction> {
        let Some(pending) = self.pending.as_mut() else { return Vec::new() };
        if let Some(rsus) = pending.awaiting.get_mut(&search.cv) {
            if rsus.remove(&search.rsu_id) && search.response == SearchResponse::Received {
                pending.received.insert(search.cv.clone());
            }
        }
        if pending.awaiting.values().all(BTreeSet::is_empty) {
            return self.resolve_pending(now_ms);
        }
        Vec::new()
    }

    fn resolve_pending(&mut self, now_ms: u64) -> Vec<EdgeAction> {
        let Some(p) = self.pending.take() else { return Vec::new() };
        let resp = |id: &VehicleId| {
            if p.received.contains(id) {
                SearchResponse::Received
            } else {
                SearchResponse::NotReceived
            }
        };
        let [(a, ea), (b, eb)] = &p.pair;
        match challenge_outcome((a, *ea, resp(a)), (b, *eb, resp(b))) {
            ChallengeOutcome::Resolved { malicious, verdict } => {
                self.conclude(&malicious, verdict, Basis::ChallengeResponse, now_ms)
            }
            ChallengeOutcome::Neither => {
                self.suspects.insert(a.clone());
                self.suspects.insert(b.clone());
                self.advance(now_ms)
            }
        }
    }

    fn excluded(&self) -> BTreeSet<VehicleId> {
        self.mal.iter().chain(&self.nonmal).chain(&self.suspects).cloned().collect()
    }

    /// Lowest pair of live reporters that disagree across different RSUs.
    fn cross_rsu_conflict(&self, excluded: &BTreeSet<VehicleId>) -> Option<(VehicleId, VehicleId)> {
        let live: Vec<_> = self.dsg.vertices().filter(|(id, _)| !excluded.contains(*id)).collect();
        for (i, (a, va)) in live.iter().enumerate() {
            if let Some((b, _)) = live[i + 1..].iter().find(|(_, vb)| vb.event != va.event) {
                return Some(((*a).clone(), (*b).clone()));
            }
        }
        None
    }

    fn advance(&mut self, now_ms: u64) -> Vec<EdgeAction> {
        loop {
            if self.verdict.is_some() || self.pending.is_some() {
                return Vec::new();
            }
            let excluded = self.excluded();
            let (cv1, cv2) = match detect_poc_excluding(&self.dsg, &excluded) {
                Some(poc) => {
                    let pair = (poc.cv1.clone(), poc.cv2.clone());
                    self.pocs.push(poc);
                    pair
                }
                None => match self.cross_rsu_conflict(&excluded) {
                    Some(pair) => pair,
                    None => return Vec::new(),
                },
            };
            let p1 = self.dsg.packet_of(&cv1).expect("accepted vertex has a packet").clone();
            let p2 = self.dsg.packet_of(&cv2).expect("accepted vertex has a packet").clone();
            match scrutinize(&p1, &p2, &self.cfg.scrutiny) {
                ScrutinyOutcome::Malicious(m) => {
                    let verdict = if m == cv1 { p2.event } else { p1.event };
                    return self.conclude(&m, verdict, Basis::InitialScrutiny, now_ms);
                }
                ScrutinyOutcome::Both => {
                    self.mal.insert(cv1);
                    self.mal.insert(cv2);
                }
                ScrutinyOutcome::Neither => {
                    let plan = generate_challenge(&p1, &p2, &self.cfg.corridor, self.cfg.t_max);
                    let Some(packet) = plan.packet() else {
                        self.suspects.insert(cv1);
                        self.suspects.insert(cv2);
                        continue;
                    };
                    let awaiting = plan
                        .entries
                        .iter()
                        .map(|e| (e.cv.clone(), e.expected_rsus.iter().cloned().collect()))
                        .collect();
                    self.pending =
                        Some(Pending { pair: [(cv1, p1.event), (cv2, p2.event)], awaiting, received: BTreeSet::new() });
                    self.challenges_issued += 1;
                    return vec![EdgeAction::Challenge(packet)];
                }
            }
        }
    }

    fn conclude(&mut self, malicious: &VehicleId, verdict: Event, basis: Basis, now_ms: u64) -> Vec<EdgeAction> {
        let (mal, nonmal) = filter_dsg(&self.dsg, malicious);
        for id in mal {
            if !self.nonmal.contains(&id) {
                self.mal.insert(id);
            }
        }
        for id in nonmal {
            if !self.mal.contains(&id) {
                self.nonmal.insert(id);
            }
        }
        self.verdict = Some((verdict, basis));
        self.decided_at_ms = Some(now_ms);
        vec![EdgeAction::Decided { verdict, basis }]
    }

    /// Closes the round. Reporters not yet labelled are sorted by whether
    /// they agree with the verdict.
    pub fn finalize(&mut self, now_ms: u64) -> Decision {
        if self.pending.is_some() {
            self.resolve_pending(now_ms);
        }
        if self.verdict.is_none() {
            let excluded = self.excluded();
            let mut live = self.dsg.vertices().filter(|(id, _)| !excluded.contains(*id)).map(|(_, v)| v.event);
            if let Some(first) = live.next() {
                if live.all(|e| e == first) {
                    self.verdict = Some((first, Basis::Unanimous));
                    self.decided_at_ms = Some(now_ms);
                }
            }
        }
        let Some((verdict, basis)) = self.verdict else {
            return Decision {
                verdict: Verdict::Undetermined,
                mal_list: self.mal.clone(),
                nonmal_list: self.nonmal.clone(),
                basis: Basis::Inconclusive,
            };
        };
        let unlabelled: Vec<(VehicleId, Event)> = self
            .dsg
            .vertices()
            .filter(|(id, _)| !self.mal.contains(*id) && !self.nonmal.contains(*id))
            .map(|(id, v)| (id.clone(), v.event))
            .collect();
        for (id, e) in unlabelled {
            if e == verdict {
                self.nonmal.insert(id);
            } else {
                self.mal.insert(id);
            }
        }
        Decision {
            verdict: Verdict::from(verdict),
            mal_list: self.mal.clone(),
            nonmal_list: self.nonmal.clone(),
            basis,
        }
    }
}
