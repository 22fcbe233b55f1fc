//! Roadside unit: packet aggregation and presence challenges.

use rand::Rng;

use crate::crypto::{make_crypto_challenge, match_response};
use crate::ids::{RsuId, VehicleId};
use crate::messages::{
    metres_to_mm, AggregatePacket, ChallengePacket, CryptoChallenge, CryptoResponse, EncryptedDataPacket,
    SearchResponse, VehicleSearch,
};

const ID_ALPHABET: &[u8] = b"0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub cv: VehicleId,
    pub testing_word: Vec<u8>,
    pub left_num: u32,
    pub broadcast_at_ms: u64,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Collected {
    Flushed(AggregatePacket),
    /// First packet of a batch; the engine should call [`RsuState::on_deadline`] at `deadline_ms`.
    TimerArmed {
        deadline_ms: u64,
        epoch: u64,
    },
    Buffered,
}

#[derive(Debug, Clone)]
pub struct RsuState {
    pub id: RsuId,
    pub location_m: f64,
    pub range_m: f64,
    pub sigma_ms: u64,
    pub threshold: usize,
    buffer: Vec<EncryptedDataPacket>,
    epoch: u64,
    assignments: Vec<Assignment>,
}

impl RsuState {
    pub fn new(id: RsuId, location_m: f64, range_m: f64, sigma_ms: u64, threshold: usize) -> Self {
        Self { id, location_m, range_m, sigma_ms, threshold, buffer: Vec::new(), epoch: 0, assignments: Vec::new() }
    }

    pub fn buffered(&self) -> usize {
        self.buffer.len()
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    pub fn collect(&mut self, packet: EncryptedDataPacket, now_ms: u64) -> Collected {
        self.buffer.push(packet);
        if self.buffer.len() >= self.threshold {
            return Collected::Flushed(self.flush().expect("buffer is non-empty"));
        }
        if self.buffer.len() == 1 {
            return Collected::TimerArmed { deadline_ms: now_ms + self.sigma_ms, epoch: self.epoch };
        }
        Collected::Buffered
    }

    /// Timer expiry for the batch started in `epoch`; stale timers are ignored.
    pub fn on_deadline(&mut self, epoch: u64) -> Option<AggregatePacket> {
        if epoch != self.epoch {
            return None;
        }
        self.flush()
    }

    fn flush(&mut self) -> Option<AggregatePacket> {
        if self.buffer.is_empty() {
            return None;
        }
        self.epoch += 1;
        Some(AggregatePacket {
            rsu_id: self.id.clone(),
            location_mm: metres_to_mm(self.location_m),
            packets: std::mem::take(&mut self.buffer),
        })
    }

    /// Takes the entries naming this RSU. Returns the distinct broadcast
    /// times, earliest first.
    pub fn on_challenge<R: Rng + ?Sized>(&mut self, packet: &ChallengePacket, now_ms: u64, rng: &mut R) -> Vec<u64> {
        let mut times = Vec::new();
        for e in packet.entries.iter().filter(|e| e.expected_rsus.contains(&self.id)) {
            let len = e.cv.len();
            let testing_word = (0..len).map(|_| ID_ALPHABET[rng.gen_range(0..ID_ALPHABET.len())]).collect();
            let left_num = rng.gen_range(1..(8 * len as u32).max(2));
            let at = now_ms + u64::from(e.time_s) * 1000;
            self.assignments.push(Assignment {
                cv: e.cv.clone(),
                testing_word,
                left_num,
                broadcast_at_ms: at,
                matched: false,
            });
            times.push(at);
        }
        times.sort_unstable();
        times.dedup();
        times
    }

    /// One frame carrying every challenge scheduled for `at_ms`.
    pub fn challenge_frame(&self, at_ms: u64) -> Option<CryptoChallenge> {
        let challenges: Vec<Vec<u8>> = self
            .assignments
            .iter()
            .filter(|a| a.broadcast_at_ms == at_ms)
            .filter_map(|a| make_crypto_challenge(a.cv.as_bytes(), &a.testing_word, a.left_num).ok())
            .collect();
        (!challenges.is_empty()).then(|| CryptoChallenge { rsu_id: self.id.clone(), challenges })
    }

    /// Marks assignments whose window `[broadcast, broadcast + sigma]` is open and
    /// that some response in the frame answers.
    pub fn on_response(&mut self, frame: &CryptoResponse, now_ms: u64) {
        for a in &mut self.assignments {
            let open = a.broadcast_at_ms <= now_ms && now_ms <= a.broadcast_at_ms + self.sigma_ms;
            if open && !a.matched && frame.responses.iter().any(|r| match_response(r, &a.testing_word, a.left_num)) {
                a.matched = true;
            }
        }
    }

    /// Search results for the batch broadcast at `at_ms`; those assignments are retired.
    pub fn close_window(&mut self, at_ms: u64) -> Vec<VehicleSearch> {
        let (done, keep): (Vec<_>, Vec<_>) =
            std::mem::take(&mut self.assignments).into_iter().partition(|a| a.broadcast_at_ms == at_ms);
        self.assignments = keep;
        done.into_iter()
            .map(|a| VehicleSearch {
                rsu_id: self.id.clone(),
                cv: a.cv,
                response: if a.matched { SearchResponse::Received } else { SearchResponse::NotReceived },
            })
            .collect()
    }
}
