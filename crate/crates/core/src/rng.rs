//! Counter-based Philox4x64-10 generator and per-path streams.

use rand_core::{impls, RngCore};

pub const RNG_NAME: &str = "philox4x64-10";

const M0: u64 = 0xD2E7_470E_E14C_6C93;
const M1: u64 = 0xCA5A_8263_9512_1157;
const W0: u64 = 0x9E37_79B9_7F4A_7C15;
const W1: u64 = 0xBB67_AE85_84CA_A73B;

#[inline]
fn mulhilo(a: u64, b: u64) -> (u64, u64) {
    let p = (a as u128) * (b as u128);
    ((p >> 64) as u64, p as u64)
}

/// One Philox4x64 block with 10 rounds.
pub fn philox4x64_10(mut ctr: [u64; 4], mut key: [u64; 2]) -> [u64; 4] {
    for round in 0..10 {
        if round > 0 {
            key[0] = key[0].wrapping_add(W0);
            key[1] = key[1].wrapping_add(W1);
        }
        let (hi0, lo0) = mulhilo(M0, ctr[0]);
        let (hi1, lo1) = mulhilo(M1, ctr[2]);
        ctr = [hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0];
    }
    ctr
}

/// Stream of Philox blocks for a fixed key and counter prefix.
///
/// The key is `(seed, STREAM_TAG)`; the counter is `(block, 0, stream,
/// purpose)`, so distinct `(stream, purpose)` pairs never share a block.
#[derive(Debug, Clone)]
pub struct RngStream {
    key: [u64; 2],
    stream: u64,
    purpose: u64,
    block: u64,
    buf: [u64; 4],
    pos: usize,
}

const STREAM_TAG: u64 = 0x6C65_7679_5F73_6368;

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self::with_purpose(seed, stream, 0)
    }

    pub fn with_purpose(seed: u64, stream: u64, purpose: u64) -> Self {
        Self {
            key: [seed, STREAM_TAG],
            stream,
            purpose,
            block: 0,
            buf: [0; 4],
            pos: 4,
        }
    }

    pub fn seed(&self) -> u64 {
        self.key[0]
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    fn refill(&mut self) {
        self.buf = philox4x64_10([self.block, 0, self.stream, self.purpose], self.key);
        self.block = self.block.wrapping_add(1);
        self.pos = 0;
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        if self.pos == 4 {
            self.refill();
        }
        let v = self.buf[self.pos];
        self.pos += 1;
        v
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        impls::fill_bytes_via_next(self, dst)
    }
}
