//! Byte-exact codecs for the protocol's wire messages.
//!
//! Layout rules shared by every message:
//!
//! | field kind      | encoding                                         |
//! |-----------------|--------------------------------------------------|
//! | identifier      | `u8` length + ASCII bytes                        |
//! | byte string     | `u32` big-endian length + bytes                  |
//! | natural         | `u32` length + minimal big-endian magnitude      |
//! | sequence        | `u16` big-endian count + elements                |
//! | event           | `u8`: 0 congested, 1 non-congested               |
//! | velocity        | `u32` mph x 100                                  |
//! | position        | `i64` millimetres along the corridor             |
//!
//! Every encoding is canonical: decoding rejects trailing bytes and
//! non-minimal naturals, so each value has exactly one byte string.

use num_bigint::BigUint;
use thiserror::Error;

use crate::crypto::natural::{read_natural, write_natural, NaturalDecodeError};
use crate::ids::{Event, RsuId, VehicleId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("buffer ended inside a fixed-width field")]
    Truncated,
    #[error("declared length {declared} exceeds the {remaining} remaining bytes")]
    LengthOverflow { declared: usize, remaining: usize },
    #[error("{0} trailing bytes after message")]
    TrailingBytes(usize),
    #[error("non-canonical encoding")]
    NonCanonical,
    #[error("unknown message tag {0}")]
    UnknownTag(u8),
    #[error("invariant violated: {0}")]
    Invariant(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataPacket {
    pub v_id: VehicleId,
    /// ElGamal signature over the id bytes, in [`crate::crypto::Signature`] wire form.
    pub ds: Vec<u8>,
    pub event: Event,
    pub vel_centi_mph: u32,
    pub gps_mm: i64,
    pub enc_ids: Vec<BigUint>,
    pub trajectory: Vec<RsuId>,
}

impl DataPacket {
    pub fn vel_mph(&self) -> f64 {
        f64::from(self.vel_centi_mph) / 100.0
    }

    pub fn gps_m(&self) -> f64 {
        self.gps_mm as f64 / 1000.0
    }
}

pub fn mph_to_centi(mph: f64) -> u32 {
    (mph.max(0.0) * 100.0).round() as u32
}

pub fn metres_to_mm(m: f64) -> i64 {
    (m * 1000.0).round() as i64
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncryptedDataPacket {
    pub tau: BigUint,
    pub body: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregatePacket {
    pub rsu_id: RsuId,
    pub location_mm: i64,
    pub packets: Vec<EncryptedDataPacket>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChallengeEntry {
    pub cv: VehicleId,
    pub expected_rsus: Vec<RsuId>,
    pub time_s: u32,
}

/// One or two entries; a conflicting vehicle that cannot reach any RSU is
/// left out and treated as not received.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChallengePacket {
    pub entries: Vec<ChallengeEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchResponse {
    Received,
    NotReceived,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VehicleSearch {
    pub rsu_id: RsuId,
    pub cv: VehicleId,
    pub response: SearchResponse,
}

/// Everything an RSU broadcasts at one instant: one challenge per assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CryptoChallenge {
    pub rsu_id: RsuId,
    pub challenges: Vec<Vec<u8>>,
}

/// A vehicle's answer to one [`CryptoChallenge`] frame, position-aligned
/// with its challenges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CryptoResponse {
    pub rsu_id: RsuId,
    pub responses: Vec<Vec<u8>>,
}

/// Canonical binary encoding.
pub trait Wire: Sized {
    fn write(&self, w: &mut Vec<u8>);
    fn read(r: &mut Reader<'_>) -> Result<Self, DecodeError>;

    fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write(&mut out);
        out
    }

    fn from_bytes(buf: &[u8]) -> Result<Self, DecodeError> {
        let mut r = Reader::new(buf);
        let v = Self::read(&mut r)?;
        r.finish()?;
        Ok(v)
    }
}

pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    fn fixed<const N: usize>(&mut self) -> Result<[u8; N], DecodeError> {
        let s = self.buf.get(self.pos..self.pos + N).ok_or(DecodeError::Truncated)?;
        self.pos += N;
        Ok(s.try_into().expect("length checked"))
    }

    fn u8(&mut self) -> Result<u8, DecodeError> {
        Ok(self.fixed::<1>()?[0])
    }

    fn u16(&mut self) -> Result<u16, DecodeError> {
        Ok(u16::from_be_bytes(self.fixed()?))
    }

    fn u32(&mut self) -> Result<u32, DecodeError> {
        Ok(u32::from_be_bytes(self.fixed()?))
    }

    fn i64(&mut self) -> Result<i64, DecodeError> {
        Ok(i64::from_be_bytes(self.fixed()?))
    }

    fn take(&mut self, len: usize) -> Result<&'a [u8], DecodeError> {
        if len > self.remaining() {
            return Err(DecodeError::LengthOverflow { declared: len, remaining: self.remaining() });
        }
        let s = &self.buf[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn bytes(&mut self) -> Result<Vec<u8>, DecodeError> {
        let len = self.u32()? as usize;
        Ok(self.take(len)?.to_vec())
    }

    fn short_str(&mut self) -> Result<&'a str, DecodeError> {
        let len = usize::from(self.u8()?);
        std::str::from_utf8(self.take(len)?).map_err(|_| DecodeError::Invariant("non-ASCII identifier"))
    }

    fn vehicle_id(&mut self) -> Result<VehicleId, DecodeError> {
        VehicleId::new(self.short_str()?).map_err(|_| DecodeError::Invariant("bad vehicle id"))
    }

    fn rsu_id(&mut self) -> Result<RsuId, DecodeError> {
        RsuId::new(self.short_str()?).map_err(|_| DecodeError::Invariant("bad RSU id"))
    }

    fn natural(&mut self) -> Result<BigUint, DecodeError> {
        match read_natural(&self.buf[self.pos..]) {
            Ok((n, used)) => {
                self.pos += used;
                Ok(n)
            }
            Err(NaturalDecodeError::NonCanonical) => Err(DecodeError::NonCanonical),
            Err(NaturalDecodeError::Truncated) => {
                // Distinguish a short header from an over-long declared body.
                let len = self.u32()? as usize;
                Err(DecodeError::LengthOverflow { declared: len, remaining: self.remaining() })
            }
        }
    }

    fn event(&mut self) -> Result<Event, DecodeError> {
        match self.u8()? {
            0 => Ok(Event::Congested),
            1 => Ok(Event::NonCongested),
            _ => Err(DecodeError::Invariant("event tag")),
        }
    }

    fn seq<T>(&mut self, mut f: impl FnMut(&mut Self) -> Result<T, DecodeError>) -> Result<Vec<T>, DecodeError> {
        let n = self.u16()?;
        (0..n).map(|_| f(self)).collect()
    }

    fn finish(&self) -> Result<(), DecodeError> {
        match self.remaining() {
            0 => Ok(()),
            n => Err(DecodeError::TrailingBytes(n)),
        }
    }
}

fn put_short_str(w: &mut Vec<u8>, s: &str) {
    w.push(s.len() as u8);
    w.extend_from_slice(s.as_bytes());
}

fn put_bytes(w: &mut Vec<u8>, b: &[u8]) {
    w.extend_from_slice(&(b.len() as u32).to_be_bytes());
    w.extend_from_slice(b);
}

fn put_seq<T>(w: &mut Vec<u8>, items: &[T], mut f: impl FnMut(&mut Vec<u8>, &T)) {
    let n = u16::try_from(items.len()).expect("sequence longer than u16::MAX");
    w.extend_from_slice(&n.to_be_bytes());
    for item in items {
        f(w, item);
    }
}

fn event_tag(e: Event) -> u8 {
    match e {
        Event::Congested => 0,
        Event::NonCongested => 1,
    }
}

impl Wire for DataPacket {
    fn write(&self, w: &mut Vec<u8>) {
        put_short_str(w, self.v_id.as_str());
        put_bytes(w, &self.ds);
        w.push(event_tag(self.event));
        w.extend_from_slice(&self.vel_centi_mph.to_be_bytes());
        w.extend_from_slice(&self.gps_mm.to_be_bytes());
        put_seq(w, &self.enc_ids, write_natural);
        put_seq(w, &self.trajectory, |w, r| put_short_str(w, r.as_str()));
    }

    fn read(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        let v_id = r.vehicle_id()?;
        let ds = r.bytes()?;
        let event = r.event()?;
        let vel_centi_mph = r.u32()?;
        let gps_mm = r.i64()?;
        let enc_ids = r.seq(Reader::natural)?;
        let trajectory = r.seq(Reader::rsu_id)?;
        if enc_ids.is_empty() {
            return Err(DecodeError::Invariant("data packet without neighbour ids"));
        }
        if trajectory.is_empty() {
            return Err(DecodeError::Invariant("empty trajectory"));
        }
        Ok(Self { v_id, ds, event, vel_centi_mph, gps_mm, enc_ids, trajectory })
    }
}

impl Wire for EncryptedDataPacket {
    fn write(&self, w: &mut Vec<u8>) {
        write_natural(w, &self.tau);
        put_bytes(w, &self.body);
    }

    fn read(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        Ok(Self { tau: r.natural()?, body: r.bytes()? })
    }
}

impl Wire for AggregatePacket {
    fn write(&self, w: &mut Vec<u8>) {
        put_short_str(w, self.rsu_id.as_str());
        w.extend_from_slice(&self.location_mm.to_be_bytes());
        put_seq(w, &self.packets, |w, p| p.write(w));
    }

    fn read(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        let rsu_id = r.rsu_id()?;
        let location_mm = r.i64()?;
        let packets = r.seq(EncryptedDataPacket::read)?;
        if packets.is_empty() {
            return Err(DecodeError::Invariant("aggregate without packets"));
        }
        Ok(Self { rsu_id, location_mm, packets })
    }
}

impl Wire for ChallengePacket {
    fn write(&self, w: &mut Vec<u8>) {
        put_seq(w, &self.entries, |w, e| {
            put_short_str(w, e.cv.as_str());
            put_seq(w, &e.expected_rsus, |w, r| put_short_str(w, r.as_str()));
            w.extend_from_slice(&e.time_s.to_be_bytes());
        });
    }

    fn read(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        let entries = r.seq(|r| {
            let cv = r.vehicle_id()?;
            let expected_rsus = r.seq(Reader::rsu_id)?;
            let time_s = r.u32()?;
            if expected_rsus.is_empty() {
                return Err(DecodeError::Invariant("challenge entry without RSUs"));
            }
            Ok(ChallengeEntry { cv, expected_rsus, time_s })
        })?;
        match entries.as_slice() {
            [_] => {}
            [a, b] if a.cv != b.cv => {}
            [_, _] => return Err(DecodeError::Invariant("challenged vehicles must differ")),
            _ => return Err(DecodeError::Invariant("challenge packet needs one or two entries")),
        }
        Ok(Self { entries })
    }
}

impl Wire for VehicleSearch {
    fn write(&self, w: &mut Vec<u8>) {
        put_short_str(w, self.rsu_id.as_str());
        put_short_str(w, self.cv.as_str());
        w.push(match self.response {
            SearchResponse::Received => 1,
            SearchResponse::NotReceived => 0,
        });
    }

    fn read(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        let rsu_id = r.rsu_id()?;
        let cv = r.vehicle_id()?;
        let response = match r.u8()? {
            1 => SearchResponse::Received,
            0 => SearchResponse::NotReceived,
            _ => return Err(DecodeError::Invariant("search response tag")),
        };
        Ok(Self { rsu_id, cv, response })
    }
}

impl Wire for CryptoChallenge {
    fn write(&self, w: &mut Vec<u8>) {
        put_short_str(w, self.rsu_id.as_str());
        put_seq(w, &self.challenges, |w, c| put_bytes(w, c));
    }

    fn read(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        let rsu_id = r.rsu_id()?;
        let challenges = r.seq(Reader::bytes)?;
        if challenges.is_empty() {
            return Err(DecodeError::Invariant("empty challenge frame"));
        }
        Ok(Self { rsu_id, challenges })
    }
}

impl Wire for CryptoResponse {
    fn write(&self, w: &mut Vec<u8>) {
        put_short_str(w, self.rsu_id.as_str());
        put_seq(w, &self.responses, |w, c| put_bytes(w, c));
    }

    fn read(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        let rsu_id = r.rsu_id()?;
        let responses = r.seq(Reader::bytes)?;
        if responses.is_empty() {
            return Err(DecodeError::Invariant("empty response frame"));
        }
        Ok(Self { rsu_id, responses })
    }
}

/// Plain event report used by the comparison models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlainReport {
    pub v_id: VehicleId,
    pub event: Event,
}

/// Peer rating frame; carries the rater's own report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rating {
    pub rater: VehicleId,
    pub rater_event: Event,
    pub about: VehicleId,
    pub positive: bool,
}

impl Wire for PlainReport {
    fn write(&self, w: &mut Vec<u8>) {
        put_short_str(w, self.v_id.as_str());
        w.push(event_tag(self.event));
    }

    fn read(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        Ok(Self { v_id: r.vehicle_id()?, event: r.event()? })
    }
}

impl Wire for Rating {
    fn write(&self, w: &mut Vec<u8>) {
        put_short_str(w, self.rater.as_str());
        w.push(event_tag(self.rater_event));
        put_short_str(w, self.about.as_str());
        w.push(u8::from(self.positive));
    }

    fn read(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        let rater = r.vehicle_id()?;
        let rater_event = r.event()?;
        let about = r.vehicle_id()?;
        let positive = match r.u8()? {
            0 => false,
            1 => true,
            _ => return Err(DecodeError::Invariant("rating flag")),
        };
        Ok(Self { rater, rater_event, about, positive })
    }
}

/// Tagged envelope for anything that crosses the simulated channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Message {
    /// A vehicle's encrypted id, broadcast to its neighbours.
    EncodedId(BigUint),
    Encrypted(EncryptedDataPacket),
    Aggregate(AggregatePacket),
    Challenge(ChallengePacket),
    Search(VehicleSearch),
    CryptoChallenge(CryptoChallenge),
    CryptoResponse(CryptoResponse),
    Report(PlainReport),
    Rating(Rating),
}

impl Wire for Message {
    fn write(&self, w: &mut Vec<u8>) {
        match self {
            Message::Encrypted(m) => {
                w.push(1);
                m.write(w)
            }
            Message::Aggregate(m) => {
                w.push(2);
                m.write(w)
            }
            Message::Challenge(m) => {
                w.push(3);
                m.write(w)
            }
            Message::Search(m) => {
                w.push(4);
                m.write(w)
            }
            Message::CryptoChallenge(m) => {
                w.push(5);
                m.write(w)
            }
            Message::CryptoResponse(m) => {
                w.push(6);
                m.write(w)
            }
            Message::EncodedId(n) => {
                w.push(7);
                write_natural(w, n)
            }
            Message::Report(m) => {
                w.push(8);
                m.write(w)
            }
            Message::Rating(m) => {
                w.push(9);
                m.write(w)
            }
        }
    }

    fn read(r: &mut Reader<'_>) -> Result<Self, DecodeError> {
        Ok(match r.u8()? {
            1 => Message::Encrypted(EncryptedDataPacket::read(r)?),
            2 => Message::Aggregate(AggregatePacket::read(r)?),
            3 => Message::Challenge(ChallengePacket::read(r)?),
            4 => Message::Search(VehicleSearch::read(r)?),
            5 => Message::CryptoChallenge(CryptoChallenge::read(r)?),
            6 => Message::CryptoResponse(CryptoResponse::read(r)?),
            7 => Message::EncodedId(r.natural()?),
            8 => Message::Report(PlainReport::read(r)?),
            9 => Message::Rating(Rating::read(r)?),
            t => return Err(DecodeError::UnknownTag(t)),
        })
    }
}
