//! Counter-based random draws.
//!
//! Every draw is a pure function of `(seed, walk, hop, ordinal)`, so the order
//! in which walks are advanced never changes what they sample. The generator
//! is Philox-4x32 with ten rounds.

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;

#[inline(always)]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = u64::from(a) * u64::from(b);
    ((p >> 32) as u32, p as u32)
}

/// One Philox-4x32-10 block.
#[inline]
pub fn philox4x32_10(counter: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut c = counter;
    let mut k = key;
    for round in 0..10 {
        if round > 0 {
            k[0] = k[0].wrapping_add(PHILOX_W0);
            k[1] = k[1].wrapping_add(PHILOX_W1);
        }
        let (hi0, lo0) = mulhilo(PHILOX_M0, c[0]);
        let (hi1, lo1) = mulhilo(PHILOX_M1, c[2]);
        c = [hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0];
    }
    c
}

/// Keyed source of reproducible draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CounterRng {
    key: [u32; 2],
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self {
            key: [seed as u32, (seed >> 32) as u32],
        }
    }

    #[inline]
    pub fn bits(&self, walk: u64, hop: u32, ordinal: u32) -> u64 {
        let out = philox4x32_10([walk as u32, (walk >> 32) as u32, hop, ordinal], self.key);
        (u64::from(out[0]) << 32) | u64::from(out[1])
    }

    /// Uniform draw in the open interval (0, 1).
    #[inline]
    pub fn unit(&self, walk: u64, hop: u32, ordinal: u32) -> f64 {
        // 52 bits plus a half step keeps both ends strictly excluded.
        let x = self.bits(walk, hop, ordinal) >> 12;
        (x as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
    }
}
