//! The operations a kernel's register type must provide beyond plain
//! bitwise logic.
//!
//! A vector of `r` bits is viewed as `r / 64` lanes of 64 bits. Bit `i` of
//! lane `l` is input bit `64 l + i`, so every lane covers the same 64 bit
//! positions and counts for position `i` can be gathered by summing lanes.

use crate::csa::BitVector;
use crate::edge::TailCounters;

/// Places each bit `k` of a replicated byte into byte `k`.
pub(crate) const BIT_ISOLATE: u64 = 0x8040_2010_0804_0201;

pub trait SimdVector: BitVector {
    /// Vector width `r` in bits.
    const BITS: usize;
    const BYTES: usize = Self::BITS / 8;
    const LANES: usize = Self::BITS / 64;
    /// `log2(LANES)`: how many lane folds it takes to reach a single lane.
    const FOLD_LEVELS: u32;

    /// Broadcasts `x` into every lane.
    fn splat(x: u64) -> Self;

    /// Loads the first `BYTES` bytes of `bytes`. Panics if it is shorter.
    fn load(bytes: &[u8]) -> Self;

    /// Per-lane logical shifts.
    fn shl(self, n: u32) -> Self;
    fn shr(self, n: u32) -> Self;

    /// Lanewise 64-bit addition.
    fn add64(self, other: Self) -> Self;
    /// Elementwise wrapping 16-bit addition.
    fn add16(self, other: Self) -> Self;

    /// Pairs up lanes `l` and `l ^ (1 << level)` and sums them. The sum of
    /// `even`'s pair lands in the lane with that index bit clear, the sum of
    /// `odd`'s pair in the lane with it set:
    ///
    /// ```text
    /// out[l] = even[l] + even[l ^ m]   if l & m == 0
    /// out[l] = odd[l ^ m] + odd[l]     if l & m != 0      (m = 1 << level)
    /// ```
    ///
    /// Only called with `level < FOLD_LEVELS`.
    fn fold(even: Self, odd: Self, level: u32) -> Self;

    /// The lanes in order; entries past `LANES` are zero.
    fn to_lanes(self) -> [u64; 8];

    /// Adds the bits of whole 8-byte groups to byte-sized counters, one
    /// counter per bit of the group. `groups.len()` is a multiple of 8 and
    /// at most 255 groups long so no counter can wrap.
    #[inline(always)]
    fn count_groups(tail: &mut TailCounters, groups: &[u8]) {
        count_groups_swar(tail, groups)
    }
}

/// Bit-isolation counting on 64-bit words: replicate an input byte eight
/// times, keep bit `k` in copy `k`, turn nonzero bytes into 1 and add.
#[inline(always)]
pub(crate) fn count_groups_swar(tail: &mut TailCounters, groups: &[u8]) {
    debug_assert!(groups.len().is_multiple_of(8) && groups.len() <= 8 * 255);
    const REPLICATE: u64 = 0x0101_0101_0101_0101;
    const LOW7: u64 = 0x7f7f_7f7f_7f7f_7f7f;
    let mut words = tail.words();
    for group in groups.chunks_exact(8) {
        for (word, &byte) in words.iter_mut().zip(group) {
            let isolated = (byte as u64).wrapping_mul(REPLICATE) & BIT_ISOLATE;
            // each byte is 0 or a single bit <= 0x80, so adding 0x7f never carries
            *word += (isolated + LOW7) >> 7 & REPLICATE;
        }
    }
    tail.set_words(words);
}

/// The portable kernel's vector: one machine word, `r = 64`.
impl SimdVector for u64 {
    const BITS: usize = 64;
    const FOLD_LEVELS: u32 = 0;

    #[inline(always)]
    fn splat(x: u64) -> Self {
        x
    }

    #[inline(always)]
    fn load(bytes: &[u8]) -> Self {
        u64::from_le_bytes(bytes[..8].try_into().unwrap())
    }

    #[inline(always)]
    fn shl(self, n: u32) -> Self {
        self << n
    }

    #[inline(always)]
    fn shr(self, n: u32) -> Self {
        self >> n
    }

    #[inline(always)]
    fn add64(self, other: Self) -> Self {
        self.wrapping_add(other)
    }

    // The counters never exceed 0xffff, so a full-width add cannot carry
    // from one 16-bit element into the next.
    #[inline(always)]
    fn add16(self, other: Self) -> Self {
        self.wrapping_add(other)
    }

    fn fold(_even: Self, _odd: Self, _level: u32) -> Self {
        unreachable!("a single-lane vector has nothing to fold")
    }

    #[inline(always)]
    fn to_lanes(self) -> [u64; 8] {
        [self, 0, 0, 0, 0, 0, 0, 0]
    }
}
