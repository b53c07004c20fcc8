//! Seeded lossy link with latency and uniform jitter.

use super::NetError;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkConfig {
    pub latency_ms: f64,
    pub jitter_ms: f64,
    pub loss_probability: f64,
    pub seed: u64,
}

impl LinkConfig {
    pub fn validate(&self) -> Result<(), NetError> {
        if !(self.latency_ms >= 0.0) || !self.latency_ms.is_finite() {
            return Err(NetError::InvalidLink(format!("latency_ms {} must be >= 0", self.latency_ms)));
        }
        if !(self.jitter_ms >= 0.0) || !self.jitter_ms.is_finite() {
            return Err(NetError::InvalidLink(format!("jitter_ms {} must be >= 0", self.jitter_ms)));
        }
        if !(0.0..=1.0).contains(&self.loss_probability) {
            return Err(NetError::InvalidLink(format!("loss_probability {} outside [0, 1]", self.loss_probability)));
        }
        Ok(())
    }
}

/// One end-to-end direction. Each message costs exactly two RNG draws when
/// it survives and one when it is dropped, so a trace depends only on the
/// seed, the config and the number of messages sent.
#[derive(Debug, Clone)]
pub struct SimLink {
    config: LinkConfig,
    rng: ChaCha8Rng,
}

impl SimLink {
    pub fn new(config: LinkConfig) -> Result<Self, NetError> {
        config.validate()?;
        Ok(Self { config, rng: ChaCha8Rng::seed_from_u64(config.seed) })
    }

    pub fn config(&self) -> &LinkConfig {
        &self.config
    }

    /// Delivery time of a message sent at `send_ms`, or `None` if dropped.
    pub fn transmit(&mut self, send_ms: f64) -> Option<f64> {
        if self.rng.random_bool(self.config.loss_probability) {
            return None;
        }
        let jitter = if self.config.jitter_ms > 0.0 {
            self.rng.random_range(-self.config.jitter_ms..=self.config.jitter_ms)
        } else {
            0.0
        };
        Some((send_ms + self.config.latency_ms + jitter).max(0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delivery {
    /// Index into the submitted message list.
    pub index: usize,
    pub send_ms: f64,
    pub deliver_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DeliveryTrace {
    /// Ordered by delivery time; equal times keep submission order.
    pub delivered: Vec<Delivery>,
    pub dropped: Vec<usize>,
}

/// Pushes messages with the given send times through a fresh link.
pub fn link_transmit(config: &LinkConfig, send_times_ms: &[f64]) -> Result<DeliveryTrace, NetError> {
    let mut link = SimLink::new(*config)?;
    let mut trace = DeliveryTrace::default();
    for (index, &send_ms) in send_times_ms.iter().enumerate() {
        match link.transmit(send_ms) {
            Some(deliver_ms) => trace.delivered.push(Delivery { index, send_ms, deliver_ms }),
            None => trace.dropped.push(index),
        }
    }
    trace.delivered.sort_by(|a, b| a.deliver_ms.total_cmp(&b.deliver_ms));
    Ok(trace)
}
