use std::collections::{BTreeMap, BTreeSet};

use crate::crypto::{decode_id, SsKeyPair};
use crate::ids::{Event, RsuId, VehicleId};
use crate::messages::DataPacket;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub event: Event,
    pub rsu: RsuId,
    pub packet: Option<DataPacket>,
}

/// Decision similarity graph: one vertex per accepted reporter, an
/// undirected edge wherever one reporter names another as a neighbour.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dsg {
    vertices: BTreeMap<VehicleId, Vertex>,
    claims: BTreeMap<VehicleId, Vec<VehicleId>>,
    adj: BTreeMap<VehicleId, BTreeSet<VehicleId>>,
    edges: BTreeSet<(VehicleId, VehicleId)>,
    invalid_refs: Vec<VehicleId>,
}

fn ordered(a: &VehicleId, b: &VehicleId) -> (VehicleId, VehicleId) {
    if a < b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

impl Dsg {
    pub fn new() -> Self {
        Self::default()
    }

    /// Graph from bare labels and edges, without packets.
    pub fn from_parts(
        vertices: impl IntoIterator<Item = (VehicleId, Event, RsuId)>,
        edges: impl IntoIterator<Item = (VehicleId, VehicleId)>,
    ) -> Self {
        let mut claims: BTreeMap<VehicleId, Vec<VehicleId>> = BTreeMap::new();
        for (a, b) in edges {
            claims.entry(a).or_default().push(b);
        }
        let mut g = Self::new();
        for (id, event, rsu) in vertices {
            let c = claims.remove(&id).unwrap_or_default();
            g.insert(id, event, rsu, c, None);
        }
        g
    }

    /// Adds a reporter. Returns false, leaving the graph unchanged, if the id is already present.
    pub fn insert(
        &mut self,
        id: VehicleId,
        event: Event,
        rsu: RsuId,
        claimed: Vec<VehicleId>,
        packet: Option<DataPacket>,
    ) -> bool {
        if self.vertices.contains_key(&id) {
            return false;
        }
        let incoming: Vec<VehicleId> = self
            .claims
            .iter()
            .filter(|(_, targets)| targets.contains(&id))
            .map(|(claimer, _)| claimer.clone())
            .collect();
        for other in incoming {
            self.link(&id, &other);
        }
        let outgoing: Vec<VehicleId> = claimed.iter().filter(|t| self.vertices.contains_key(*t)).cloned().collect();
        for other in outgoing {
            self.link(&id, &other);
        }
        self.adj.entry(id.clone()).or_default();
        self.claims.insert(id.clone(), claimed);
        self.vertices.insert(id, Vertex { event, rsu, packet });
        true
    }

    fn link(&mut self, a: &VehicleId, b: &VehicleId) {
        if a == b {
            return;
        }
        self.edges.insert(ordered(a, b));
        self.adj.entry(a.clone()).or_default().insert(b.clone());
        self.adj.entry(b.clone()).or_default().insert(a.clone());
    }

    pub fn record_invalid_ref(&mut self, claimer: VehicleId) {
        self.invalid_refs.push(claimer);
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, id: &VehicleId) -> bool {
        self.vertices.contains_key(id)
    }

    pub fn vertex(&self, id: &VehicleId) -> Option<&Vertex> {
        self.vertices.get(id)
    }

    pub fn event_of(&self, id: &VehicleId) -> Option<Event> {
        self.vertices.get(id).map(|v| v.event)
    }

    pub fn rsu_of(&self, id: &VehicleId) -> Option<&RsuId> {
        self.vertices.get(id).map(|v| &v.rsu)
    }

    pub fn packet_of(&self, id: &VehicleId) -> Option<&DataPacket> {
        self.vertices.get(id).and_then(|v| v.packet.as_ref())
    }

    /// Vertices in id order.
    pub fn vertices(&self) -> impl Iterator<Item = (&VehicleId, &Vertex)> {
        self.vertices.iter()
    }

    pub fn ids(&self) -> impl Iterator<Item = &VehicleId> {
        self.vertices.keys()
    }

    /// Edges as `(low, high)` pairs in lexicographic order.
    pub fn edges(&self) -> &BTreeSet<(VehicleId, VehicleId)> {
        &self.edges
    }

    pub fn neighbors(&self, id: &VehicleId) -> impl Iterator<Item = &VehicleId> {
        self.adj.get(id).into_iter().flatten()
    }

    pub fn adjacent(&self, a: &VehicleId, b: &VehicleId) -> bool {
        self.adj.get(a).is_some_and(|n| n.contains(b))
    }

    /// Neighbour claims naming ids that have not reported.
    pub fn dangling(&self) -> Vec<(VehicleId, VehicleId)> {
        let mut out = Vec::new();
        for (claimer, targets) in &self.claims {
            for t in targets {
                if t != claimer && !self.vertices.contains_key(t) {
                    out.push((claimer.clone(), t.clone()));
                }
            }
        }
        out
    }

    pub fn invalid_refs(&self) -> &[VehicleId] {
        &self.invalid_refs
    }

    /// Decrypts `packet.enc_ids` and adds the reporter with its claimed neighbours.
    /// Ids that fail to decode or are unknown to `is_registered` count as invalid references.
    pub fn add_packet(
        &mut self,
        packet: DataPacket,
        rsu: RsuId,
        keys: &SsKeyPair,
        is_registered: impl Fn(&VehicleId) -> bool,
    ) -> bool {
        let mut claimed = Vec::with_capacity(packet.enc_ids.len());
        let mut invalid = 0;
        for c in &packet.enc_ids {
            match decode_id(&keys.decrypt(c)) {
                Ok(id) if is_registered(&id) => claimed.push(id),
                _ => invalid += 1,
            }
        }
        let id = packet.v_id.clone();
        let event = packet.event;
        let inserted = self.insert(id.clone(), event, rsu, claimed, Some(packet));
        if inserted {
            for _ in 0..invalid {
                self.record_invalid_ref(id.clone());
            }
        }
        inserted
    }
}

/// Builds the graph for a batch of accepted packets tagged with their RSU.
pub fn build_dsg(
    packets: impl IntoIterator<Item = (DataPacket, RsuId)>,
    keys: &SsKeyPair,
    is_registered: impl Fn(&VehicleId) -> bool,
) -> Dsg {
    let mut g = Dsg::new();
    for (p, rsu) in packets {
        g.add_packet(p, rsu, keys, &is_registered);
    }
    g
}
