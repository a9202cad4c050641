#![allow(dead_code)]

use pospopcnt::WordWidth;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent oracle: per-bit loop over words assembled byte by byte.
pub fn oracle(bytes: &[u8], width: WordWidth) -> Vec<u64> {
    let wb = width.bytes();
    assert_eq!(bytes.len() % wb, 0);
    let mut counts = vec![0u64; width.bits()];
    for word in bytes.chunks(wb) {
        for (j, count) in counts.iter_mut().enumerate() {
            *count += u64::from(word[j / 8] >> (j % 8) & 1);
        }
    }
    counts
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_bytes(rng: &mut impl RngCore, len: usize) -> Vec<u8> {
    let mut v = vec![0u8; len];
    rng.fill_bytes(&mut v);
    v
}

/// A buffer whose window `[start, start + len)` begins `align` bytes past a
/// 64-byte boundary, surrounded by `pad` bytes on each side.
pub struct Placed {
    storage: Vec<u8>,
    start: usize,
    len: usize,
}

impl Placed {
    pub fn new(data: &[u8], align: usize, pad: usize, fill: u8) -> Self {
        let mut storage = vec![fill; data.len() + 2 * pad + 128];
        let base = storage.as_ptr() as usize;
        let mut start = pad;
        while (base + start) % 64 != align % 64 {
            start += 1;
        }
        storage[start..start + data.len()].copy_from_slice(data);
        Placed { storage, start, len: data.len() }
    }

    pub fn bytes(&self) -> &[u8] {
        &self.storage[self.start..self.start + self.len]
    }
}
