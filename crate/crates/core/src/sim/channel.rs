use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::scenario::ChannelParams;

pub fn secs_to_ms(s: f64) -> u64 {
    (s * 1000.0).round().max(0.0) as u64
}

/// Shared wireless medium: range-limited, fixed latency, optional
/// per-sender queuing and random loss.
#[derive(Debug, Clone)]
pub struct Channel {
    params: ChannelParams,
    latency_ms: u64,
    busy_until: Vec<u64>,
    rng: ChaCha8Rng,
}

impl Channel {
    pub fn new(params: ChannelParams, senders: usize, rng: ChaCha8Rng) -> Self {
        Self { params, latency_ms: secs_to_ms(params.latency_s), busy_until: vec![0; senders], rng }
    }

    pub fn range_m(&self) -> f64 {
        self.params.range_m
    }

    pub fn reaches(&self, src_m: f64, dst_m: f64) -> bool {
        (src_m - dst_m).abs() <= self.params.range_m
    }

    /// Reserves air time for one transmission from `sender` and returns when it lands.
    pub fn transmit(&mut self, sender: usize, now_ms: u64) -> u64 {
        if !self.params.queuing {
            return now_ms + self.latency_ms;
        }
        let start = self.busy_until[sender].max(now_ms);
        self.busy_until[sender] = start + self.latency_ms;
        start + self.latency_ms
    }

    /// Whether a receiver in range actually gets the frame.
    pub fn survives(&mut self) -> bool {
        self.params.loss_prob <= 0.0 || self.rng.gen::<f64>() >= self.params.loss_prob
    }
}
