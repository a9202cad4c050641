//! The complete counting procedure, generic over the kernel's vector type.
//!
//! 1. Inputs shorter than 15 vectors go to [`count_short`].
//! 2. The aligned vector holding the first input byte is loaded with the
//!    bytes before the input cleared, and together with the next 14 vectors
//!    reduced into `(a8, a4, a2, a1)` by [`csa15`].
//! 3. While at least 16 vectors remain, [`csa16_4`] adds them to the
//!    accumulators and the skimmed `a16` is added to the 16-bit counters,
//!    which are flushed whenever the overflow tracker demands it.
//! 4. If at least half a block of whole vectors is left, they go through one
//!    more [`csa16_4`] with the missing vectors zero.
//! 5. The accumulators are added to the counters, the rest is counted with
//!    byte counters and everything is flushed into the output.

use crate::accum::{flush_fw, CounterBank, CounterVectors, OverflowTracker};
use crate::csa::{csa15, csa16_4, Accumulators};
use crate::edge::{count_short, count_tail, head_load};
use crate::model::{CounterArray, InputView};
use crate::vector::SimdVector;
use crate::Error;

/// Blocks of input handled per main-loop iteration, in vectors.
pub const BLOCK_VECTORS: usize = 16;
/// Vectors reduced by the initial CSA network.
pub const HEAD_VECTORS: usize = 15;
/// Fewest whole leftover vectors worth a zero-padded CSA step; fewer go to
/// the byte counters.
pub const PARTIAL_MIN_VECTORS: usize = 8;

/// Everything carried between main-loop iterations.
#[derive(Clone, Copy, Debug)]
pub struct PipelineState<V> {
    acc: Accumulators<V>,
    bank: CounterBank<V>,
    tracker: OverflowTracker,
    // input start minus the preceding vector boundary, in bytes
    skew: usize,
}

impl<V: SimdVector> PipelineState<V> {
    /// Reduces the head vector and the following 14 vectors. Returns the
    /// state and the number of input bytes consumed.
    ///
    /// # Panics
    ///
    /// If `bytes` is shorter than 15 vectors.
    #[inline(always)]
    pub fn start(bytes: &[u8]) -> (Self, usize) {
        let head = head_load::<V>(bytes);
        let used = head.consumed + (HEAD_VECTORS - 1) * V::BYTES;
        let rest = &bytes[head.consumed..used];
        let mut v = [V::zero(); HEAD_VECTORS];
        v[0] = head.v0;
        for (slot, chunk) in v[1..].iter_mut().zip(rest.chunks_exact(V::BYTES)) {
            *slot = V::load(chunk);
        }
        let state = PipelineState {
            acc: csa15(&v),
            bank: CounterBank::new(),
            tracker: OverflowTracker::new(V::BITS),
            skew: V::BYTES - head.consumed,
        };
        (state, used)
    }

    /// One main-loop iteration over exactly 16 vectors of input.
    #[inline(always)]
    pub fn step(&mut self, block: &[u8], counts: &mut CounterArray) {
        let block = &block[..BLOCK_VECTORS * V::BYTES];
        let mut v = [V::zero(); BLOCK_VECTORS];
        for (slot, chunk) in v.iter_mut().zip(block.chunks_exact(V::BYTES)) {
            *slot = V::load(chunk);
        }
        let (a16, acc) = csa16_4(&self.acc, &v);
        self.acc = acc;
        self.bank.add_a16(a16);
        self.tracker.record_iteration();
        if self.tracker.needs_flush() {
            self.flush(counts);
        }
    }

    /// A main-loop iteration over fewer than 16 whole vectors; the missing
    /// vectors are zero.
    #[inline(always)]
    pub fn step_partial(&mut self, vectors: &[u8], counts: &mut CounterArray) {
        debug_assert!(vectors.len().is_multiple_of(V::BYTES) && vectors.len() < BLOCK_VECTORS * V::BYTES);
        let mut v = [V::zero(); BLOCK_VECTORS];
        for (slot, chunk) in v.iter_mut().zip(vectors.chunks_exact(V::BYTES)) {
            *slot = V::load(chunk);
        }
        let (a16, acc) = csa16_4(&self.acc, &v);
        self.acc = acc;
        self.bank.add_a16(a16);
        self.tracker.record_iteration();
        if self.tracker.needs_flush() {
            self.flush(counts);
        }
    }

    fn flush(&mut self, counts: &mut CounterArray) {
        let mut c = self.bank.to_logical();
        c.shift_down_bytes(self.skew);
        flush_fw(counts, &c);
        self.bank.clear();
        self.tracker.reset();
    }

    /// Final accumulation, tail and last flush. `tail` must be shorter than
    /// 16 vectors and start right after the last block.
    #[inline(always)]
    pub fn finish(mut self, tail: &[u8], counts: &mut CounterArray) {
        debug_assert!(tail.len() < BLOCK_VECTORS * V::BYTES);
        self.bank.add_accumulators(&self.acc);
        let mut c = self.bank.to_logical();
        // the tail starts on a vector boundary, so it shares the skew
        count_tail::<V>(&mut c, tail);
        c.shift_down_bytes(self.skew);
        flush_fw(counts, &c);
    }

    /// Counts consumed but not yet flushed, numbered from the input start.
    pub fn pending(&self) -> CounterVectors {
        let mut bank = self.bank;
        bank.add_accumulators(&self.acc);
        let mut c = bank.to_logical();
        c.shift_down_bytes(self.skew);
        c
    }

    pub fn tracker(&self) -> &OverflowTracker {
        &self.tracker
    }
}

/// Adds the positional population count of `bytes` to `counts`.
#[inline(always)]
pub fn run<V: SimdVector>(bytes: &[u8], counts: &mut CounterArray) -> Result<(), Error> {
    let bytes = InputView::new(bytes, counts.width())?.bytes();
    if bytes.len() < HEAD_VECTORS * V::BYTES {
        return count_short::<V>(bytes, counts);
    }
    let (mut state, used) = PipelineState::<V>::start(bytes);
    let mut blocks = bytes[used..].chunks_exact(BLOCK_VECTORS * V::BYTES);
    for block in &mut blocks {
        state.step(block, counts);
    }
    let mut rest = blocks.remainder();
    let whole = rest.len() / V::BYTES * V::BYTES;
    if whole >= PARTIAL_MIN_VECTORS * V::BYTES {
        state.step_partial(&rest[..whole], counts);
        rest = &rest[whole..];
    }
    state.finish(rest, counts);
    Ok(())
}
