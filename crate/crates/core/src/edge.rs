//! Unaligned heads, sub-block tails and arrays too short for the CSA path.

use crate::accum::{flush_fw, CounterVectors};
use crate::model::{CounterArray, InputView, MAX_WIDTH};
use crate::vector::SimdVector;
use crate::Error;

/// Most 8-byte groups byte counters can absorb before they must be drained.
pub const MAX_TAIL_GROUPS: usize = 255;

/// `w_max` byte-sized counters for the scalar tail, indexed by bit position
/// within an 8-byte group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(C, align(64))]
pub struct TailCounters {
    counts: [u8; MAX_WIDTH],
}

impl Default for TailCounters {
    fn default() -> Self {
        Self::new()
    }
}

impl TailCounters {
    pub const fn new() -> Self {
        TailCounters { counts: [0; MAX_WIDTH] }
    }

    #[inline]
    pub fn as_array(&self) -> &[u8; MAX_WIDTH] {
        &self.counts
    }

    #[inline]
    pub fn as_mut_array(&mut self) -> &mut [u8; MAX_WIDTH] {
        &mut self.counts
    }

    /// Counter bytes `8 k .. 8 k + 8` as little-endian word `k`.
    #[inline(always)]
    pub(crate) fn words(&self) -> [u64; 8] {
        let mut words = [0u64; 8];
        for (w, chunk) in words.iter_mut().zip(self.counts.chunks_exact(8)) {
            *w = u64::from_le_bytes(chunk.try_into().unwrap());
        }
        words
    }

    #[inline(always)]
    pub(crate) fn set_words(&mut self, words: [u64; 8]) {
        for (chunk, w) in self.counts.chunks_exact_mut(8).zip(words) {
            chunk.copy_from_slice(&w.to_le_bytes());
        }
    }

    /// Moves the counts into `c` and zeroes them.
    #[inline(always)]
    pub fn drain_into(&mut self, c: &mut CounterVectors) {
        c.add_bytes(&self.counts);
        self.counts = [0; MAX_WIDTH];
    }
}

/// The first vector of the main path.
#[derive(Clone, Copy, Debug)]
pub struct HeadResult<V> {
    /// The aligned vector containing the start of the input, with the bytes
    /// that precede the input cleared.
    pub v0: V,
    /// Input bytes covered by `v0`.
    pub consumed: usize,
    /// Whether the input did not start on a vector boundary.
    pub masked: bool,
}

/// Loads the vector-aligned block holding the start of `bytes`.
///
/// `v0` equals a load of the aligned block with every byte before the input
/// zeroed. Instead of reading the bytes in front of the input, they are
/// supplied from a zeroed scratch buffer.
///
/// # Panics
///
/// If `bytes` ends before the aligned block does.
#[inline(always)]
pub fn head_load<V: SimdVector>(bytes: &[u8]) -> HeadResult<V> {
    let offset = bytes.as_ptr() as usize % V::BYTES;
    if offset == 0 {
        return HeadResult { v0: V::load(bytes), consumed: V::BYTES, masked: false };
    }
    let consumed = V::BYTES - offset;
    let mut scratch = [0u8; 64];
    scratch[offset..V::BYTES].copy_from_slice(&bytes[..consumed]);
    HeadResult { v0: V::load(&scratch), consumed, masked: offset != 0 }
}

/// Adds the bits of `bytes` to `c`: bit `b` of byte `n` goes to counter
/// `(8 n + b) mod 64`. A partial final group is zero-padded.
#[inline(always)]
pub fn count_tail<V: SimdVector>(c: &mut CounterVectors, bytes: &[u8]) {
    if bytes.is_empty() {
        return;
    }
    let mut tail = TailCounters::new();
    let mut groups = bytes.chunks_exact(8 * MAX_TAIL_GROUPS);
    for batch in &mut groups {
        V::count_groups(&mut tail, batch);
        tail.drain_into(c);
    }
    let rest = groups.remainder();
    let whole = rest.len() & !7;
    V::count_groups(&mut tail, &rest[..whole]);
    if whole < rest.len() {
        let mut last = [0u8; 8];
        last[..rest.len() - whole].copy_from_slice(&rest[whole..]);
        V::count_groups(&mut tail, &last);
    }
    tail.drain_into(c);
}

/// Counts an array too short for the CSA path: byte counters, drained into
/// 16-bit counters, flushed into `counts`.
///
/// Works for any length; long inputs are flushed in slices small enough for
/// the 16-bit counters.
#[inline(always)]
pub fn count_short<V: SimdVector>(bytes: &[u8], counts: &mut CounterArray) -> Result<(), Error> {
    let input = InputView::new(bytes, counts.width())?;
    // 255 groups per flush keep every 16-bit counter well below its limit
    for chunk in input.bytes().chunks(8 * MAX_TAIL_GROUPS) {
        let mut c = CounterVectors::new();
        count_tail::<V>(&mut c, chunk);
        flush_fw(counts, &c);
    }
    Ok(())
}
