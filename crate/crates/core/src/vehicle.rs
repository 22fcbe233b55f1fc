//! Per-vehicle protocol behaviour, honest and adversarial.

use num_bigint::BigUint;
use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crypto::{
    encode_id, encode_key, make_crypto_response, sym_encrypt, CryptoError, EgKeyPair, SsPublicKey, SymmetricKey,
};
use crate::edge::ScrutinyParams;
use crate::ids::{Event, RsuId, VehicleId};
use crate::messages::{
    metres_to_mm, mph_to_centi, CryptoChallenge, CryptoResponse, DataPacket, EncryptedDataPacket, Wire,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BehaviorKind {
    Honest,
    /// Reports the opposite event.
    EventSpoof,
    VelocitySpoof {
        delta_mph: f64,
    },
    GpsSpoof {
        delta_m: f64,
    },
    /// Broadcasts the target's encoded id and reports under the target's id.
    Impersonate {
        target: VehicleId,
    },
    /// Shares its encoded id but never reports or answers challenges.
    DropPackets,
    /// Reports the opposite event together with the rest of `group`.
    Colluding {
        group: String,
    },
    /// Reports the opposite event with a velocity chosen to pass scrutiny.
    ConsistentSpoof {
        reported_mph: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviorProfile {
    #[serde(flatten)]
    pub kind: BehaviorKind,
    /// After reporting, drive at the reported velocity.
    #[serde(default)]
    pub slow_to_prove: bool,
}

impl BehaviorProfile {
    pub fn honest() -> Self {
        Self::of(BehaviorKind::Honest)
    }

    pub fn of(kind: BehaviorKind) -> Self {
        Self { kind, slow_to_prove: false }
    }

    pub fn is_malicious(&self) -> bool {
        self.kind != BehaviorKind::Honest
    }

    pub fn collusion_group(&self) -> Option<&str> {
        match &self.kind {
            BehaviorKind::Colluding { group } => Some(group),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum VehicleError {
    #[error("only {have} of {need} neighbour ids collected")]
    NotEnoughNeighbors { have: usize, need: usize },
    #[error(transparent)]
    Crypto(#[from] CryptoError),
}

#[derive(Debug, Clone)]
pub struct VehicleState {
    pub id: VehicleId,
    pub eg_keys: EgKeyPair,
    pub position_m: f64,
    pub velocity_mph: f64,
    pub trajectory: Vec<RsuId>,
    pub behavior: BehaviorProfile,
    pub sym_key: SymmetricKey,
}

impl VehicleState {
    /// Draws a fresh symmetric key for the next reporting round.
    pub fn new_round<R: RngCore + ?Sized>(&mut self, rng: &mut R) {
        self.sym_key = SymmetricKey::generate(rng);
    }

    pub fn reported_id(&self) -> &VehicleId {
        match &self.behavior.kind {
            BehaviorKind::Impersonate { target } => target,
            _ => &self.id,
        }
    }

    pub fn reported_velocity(&self) -> f64 {
        match self.behavior.kind {
            BehaviorKind::VelocitySpoof { delta_mph } => (self.velocity_mph + delta_mph).max(0.0),
            BehaviorKind::ConsistentSpoof { reported_mph } => reported_mph,
            _ => self.velocity_mph,
        }
    }

    pub fn reported_gps(&self) -> f64 {
        match self.behavior.kind {
            BehaviorKind::GpsSpoof { delta_m } => self.position_m + delta_m,
            _ => self.position_m,
        }
    }
}

pub fn record_event(state: &VehicleState, params: &ScrutinyParams) -> Event {
    let truth = params.honest_event(state.velocity_mph);
    match state.behavior.kind {
        BehaviorKind::EventSpoof | BehaviorKind::Colluding { .. } | BehaviorKind::ConsistentSpoof { .. } => {
            truth.opposite()
        }
        _ => truth,
    }
}

pub fn make_enc_id(state: &VehicleState, n_public: &SsPublicKey) -> Result<BigUint, CryptoError> {
    n_public.encrypt(&encode_id(state.reported_id()))
}

/// The cleartext report, before encryption.
pub fn plain_packet<R: RngCore + ?Sized>(
    state: &VehicleState,
    neighbor_enc_ids: &[BigUint],
    threshold: usize,
    params: &ScrutinyParams,
    rng: &mut R,
) -> Result<DataPacket, VehicleError> {
    if neighbor_enc_ids.len() < threshold {
        return Err(VehicleError::NotEnoughNeighbors { have: neighbor_enc_ids.len(), need: threshold });
    }
    let v_id = state.reported_id().clone();
    let ds = state.eg_keys.sign(v_id.as_bytes(), rng).to_bytes();
    Ok(DataPacket {
        v_id,
        ds,
        event: record_event(state, params),
        vel_centi_mph: mph_to_centi(state.reported_velocity()),
        gps_mm: metres_to_mm(state.reported_gps()),
        enc_ids: neighbor_enc_ids[..threshold].to_vec(),
        trajectory: state.trajectory.clone(),
    })
}

/// Encrypted report for the edge, or `None` for vehicles that withhold it.
pub fn build_packets<R: RngCore + ?Sized>(
    state: &VehicleState,
    neighbor_enc_ids: &[BigUint],
    threshold: usize,
    n_public: &SsPublicKey,
    params: &ScrutinyParams,
    rng: &mut R,
) -> Result<Option<EncryptedDataPacket>, VehicleError> {
    if state.behavior.kind == BehaviorKind::DropPackets {
        return Ok(None);
    }
    let packet = plain_packet(state, neighbor_enc_ids, threshold, params, rng)?;
    let tau = n_public.encrypt(&encode_key(&state.sym_key))?;
    let body = sym_encrypt(&packet.to_bytes(), &state.sym_key, rng);
    Ok(Some(EncryptedDataPacket { tau, body }))
}

/// XOR of the vehicle's own id with every challenge in the frame. Challenges
/// of a different width get an empty response.
pub fn answer_challenge(state: &VehicleState, frame: &CryptoChallenge) -> Option<CryptoResponse> {
    if state.behavior.kind == BehaviorKind::DropPackets {
        return None;
    }
    let responses =
        frame.challenges.iter().map(|c| make_crypto_response(state.id.as_bytes(), c).unwrap_or_default()).collect();
    Some(CryptoResponse { rsu_id: frame.rsu_id.clone(), responses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::{
        decode_id, decode_key, make_crypto_challenge, match_response, sym_decrypt, EgGroup, SsKeyPair,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn state(kind: BehaviorKind, vel: f64, rng: &mut ChaCha8Rng) -> VehicleState {
        VehicleState {
            id: VehicleId::new("CAR00042").unwrap(),
            eg_keys: EgKeyPair::generate(&EgGroup::standard(), rng),
            position_m: 1200.0,
            velocity_mph: vel,
            trajectory: vec![RsuId::numbered(1), RsuId::numbered(2)],
            behavior: BehaviorProfile::of(kind),
            sym_key: SymmetricKey::generate(rng),
        }
    }

    #[test]
    fn events() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = ScrutinyParams::default();
        assert_eq!(record_event(&state(BehaviorKind::Honest, 20.0, &mut rng), &p), Event::Congested);
        assert_eq!(record_event(&state(BehaviorKind::Honest, 60.0, &mut rng), &p), Event::NonCongested);
        assert_eq!(record_event(&state(BehaviorKind::EventSpoof, 20.0, &mut rng), &p), Event::NonCongested);
    }

    #[test]
    fn enc_id_round_trip_and_determinism() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let keys = SsKeyPair::generate(128, &mut rng);
        let s = state(BehaviorKind::Honest, 20.0, &mut rng);
        let a = make_enc_id(&s, &keys.public_key()).unwrap();
        assert_eq!(a, make_enc_id(&s, &keys.public_key()).unwrap());
        assert_eq!(decode_id(&keys.decrypt(&a)).unwrap(), s.id);
        let victim = VehicleId::new("CAR00001").unwrap();
        let imp = state(BehaviorKind::Impersonate { target: victim.clone() }, 20.0, &mut rng);
        let c = make_enc_id(&imp, &keys.public_key()).unwrap();
        assert_eq!(decode_id(&keys.decrypt(&c)).unwrap(), victim);
    }

    #[test]
    fn packet_opens_at_edge() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let keys = SsKeyPair::generate(128, &mut rng);
        let s = state(BehaviorKind::VelocitySpoof { delta_mph: 30.0 }, 20.0, &mut rng);
        let ids: Vec<BigUint> = (1..=3u32).map(BigUint::from).collect();
        let enc =
            build_packets(&s, &ids, 3, &keys.public_key(), &ScrutinyParams::default(), &mut rng).unwrap().unwrap();
        let key = decode_key(&keys.decrypt(&enc.tau)).unwrap();
        let p = DataPacket::from_bytes(&sym_decrypt(&enc.body, &key).unwrap()).unwrap();
        assert_eq!(p.vel_centi_mph, 5000);
        assert_eq!(p.enc_ids, ids);
        assert!(s.eg_keys.public().verify_bytes(p.v_id.as_bytes(), &p.ds));
    }

    #[test]
    fn waits_for_neighbours_and_drops() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let keys = SsKeyPair::generate(128, &mut rng);
        let p = ScrutinyParams::default();
        let s = state(BehaviorKind::Honest, 20.0, &mut rng);
        let two = vec![BigUint::from(1u8); 2];
        assert!(matches!(
            build_packets(&s, &two, 3, &keys.public_key(), &p, &mut rng),
            Err(VehicleError::NotEnoughNeighbors { have: 2, need: 3 })
        ));
        let d = state(BehaviorKind::DropPackets, 20.0, &mut rng);
        assert!(build_packets(&d, &[two.clone(), two].concat(), 3, &keys.public_key(), &p, &mut rng)
            .unwrap()
            .is_none());
    }

    #[test]
    fn challenge_answers() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = state(BehaviorKind::Honest, 20.0, &mut rng);
        let tw = b"Q7Q7Q7Q7";
        let ch = make_crypto_challenge(s.id.as_bytes(), tw, 13).unwrap();
        let frame = CryptoChallenge { rsu_id: RsuId::numbered(0), challenges: vec![ch] };
        let r = answer_challenge(&s, &frame).unwrap();
        assert!(match_response(&r.responses[0], tw, 13));
        let d = state(BehaviorKind::DropPackets, 20.0, &mut rng);
        assert!(answer_challenge(&d, &frame).is_none());
    }
}
