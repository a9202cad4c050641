//! Reducing CSA output into 16-bit counters and flushing those into the
//! 64-bit output array.
//!
//! A skimmed `a16` vector holds one bit per position. Its bits are split
//! into even and odd halves and folded over themselves (bits to crumbs to
//! nibbles to bytes), each fold summing lanes that cover the same positions
//! modulo 64, until a single lane is left or the elements are bytes. The
//! remaining byte elements are widened to 16 bits and added to the counter
//! registers. The nibble-to-byte step shifts left instead of right, which
//! multiplies by 16 for free.
//!
//! The leftover `(a8, a4, a2, a1)` at the end of the main loop are first
//! transposed into four vectors of 4-bit counts and then pushed through the
//! same folds.
//!
//! The register layout of the counters is permuted relative to bit order.
//! [`CounterBank::to_logical`] undoes the permutation.

use crate::csa::Accumulators;
use crate::model::{CounterArray, MAX_WIDTH};
use crate::vector::SimdVector;

const CRUMB_MASK: u64 = 0x5555_5555_5555_5555;
const NIBBLE_MASK: u64 = 0x3333_3333_3333_3333;
const BYTE_MASK: u64 = 0x0f0f_0f0f_0f0f_0f0f;
const WORD_MASK: u64 = 0x00ff_00ff_00ff_00ff;

/// `w_max` pending 16-bit counts, indexed by bit position modulo 64.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CounterVectors {
    counts: [u16; MAX_WIDTH],
}

impl Default for CounterVectors {
    fn default() -> Self {
        Self::new()
    }
}

impl CounterVectors {
    pub const fn new() -> Self {
        CounterVectors { counts: [0; MAX_WIDTH] }
    }

    pub const fn from_array(counts: [u16; MAX_WIDTH]) -> Self {
        CounterVectors { counts }
    }

    #[inline]
    pub fn as_array(&self) -> &[u16; MAX_WIDTH] {
        &self.counts
    }

    /// Adds `n` to counter `i`.
    ///
    /// # Panics
    ///
    /// If the counter would exceed `u16::MAX`; the overflow tracker keeps
    /// this from ever happening inside a kernel.
    #[inline]
    pub fn add(&mut self, i: usize, n: u16) {
        self.counts[i] = self.counts[i].checked_add(n).expect("16-bit counter overflow");
    }

    /// Elementwise addition. Overflow is checked only with debug assertions.
    #[inline(always)]
    pub fn add_all(&mut self, other: &CounterVectors) {
        debug_assert!(
            self.counts.iter().zip(&other.counts).all(|(&a, &b)| a.checked_add(b).is_some()),
            "16-bit counter overflow"
        );
        for (dst, &n) in self.counts.iter_mut().zip(&other.counts) {
            *dst = dst.wrapping_add(n);
        }
    }

    /// Adds byte-sized counts. Overflow is checked only with debug assertions.
    #[inline(always)]
    pub(crate) fn add_bytes(&mut self, other: &[u8; MAX_WIDTH]) {
        debug_assert!(
            self.counts.iter().zip(other).all(|(&a, &b)| a.checked_add(b as u16).is_some()),
            "16-bit counter overflow"
        );
        for (dst, &n) in self.counts.iter_mut().zip(other) {
            *dst = dst.wrapping_add(n as u16);
        }
    }

    pub fn clear(&mut self) {
        self.counts = [0; MAX_WIDTH];
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|&n| n == 0)
    }

    /// Renumbers counters so that position `i` becomes `i - 8 * bytes`
    /// modulo 64. Used when counting started `bytes` past a 64-bit boundary.
    #[inline(always)]
    pub(crate) fn shift_down_bytes(&mut self, bytes: usize) {
        // whole groups of 8 counters move, so copy them as blocks
        let s = bytes % 8;
        let old = self.counts;
        for (k, block) in self.counts.chunks_exact_mut(8).enumerate() {
            let from = 8 * ((k + s) % 8);
            block.copy_from_slice(&old[from..from + 8]);
        }
    }
}

/// Tracks an upper bound `h` on every pending 16-bit counter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OverflowTracker {
    high_water: u32,
    per_iteration: u32,
    limit: u32,
}

impl OverflowTracker {
    /// Tracker for a kernel with `vector_bits`-bit vectors. Each main-loop
    /// iteration adds at most `16 r / 64` to a counter; flushing is needed
    /// once there is no longer room for another iteration or for the final
    /// accumulation plus a maximal tail (`(15 + 15) r / 64`).
    pub const fn new(vector_bits: usize) -> Self {
        let per_lane = (vector_bits / MAX_WIDTH) as u32;
        OverflowTracker {
            high_water: 0,
            per_iteration: 16 * per_lane,
            limit: u16::MAX as u32 - 30 * per_lane,
        }
    }

    #[inline]
    pub fn high_water(&self) -> u32 {
        self.high_water
    }

    /// Largest `h` that still allows another iteration without a flush.
    #[inline]
    pub fn limit(&self) -> u32 {
        self.limit
    }

    /// Accounts for one main-loop iteration.
    #[inline(always)]
    pub fn record_iteration(&mut self) {
        self.high_water += self.per_iteration;
    }

    #[inline(always)]
    pub fn needs_flush(&self) -> bool {
        self.high_water > self.limit
    }

    #[inline(always)]
    pub fn reset(&mut self) {
        self.high_water = 0;
    }
}

/// Flushes `c` into `counts` and clears both `c` and the tracker if another
/// iteration could overflow. Returns whether a flush happened.
pub fn check_and_flush(
    tracker: &mut OverflowTracker,
    c: &mut CounterVectors,
    counts: &mut CounterArray,
) -> bool {
    if !tracker.needs_flush() {
        return false;
    }
    flush_fw(counts, c);
    c.clear();
    tracker.reset();
    true
}

/// Folds the 64 intermediate counters down to the output width and adds
/// them: `counts[j] += sum of c[i] for i = j mod w`. `c` is left untouched.
#[inline(always)]
pub fn flush_fw(counts: &mut CounterArray, c: &CounterVectors) {
    let out = counts.as_mut_slice();
    let w = out.len();
    for chunk in c.counts.chunks_exact(w) {
        for (dst, &n) in out.iter_mut().zip(chunk) {
            *dst += n as u64;
        }
    }
}

/// Transposes the four accumulator planes into vectors of 4-bit counts.
///
/// The returned vectors hold, in order, the counts for positions `p` with
/// `p mod 4` equal to 0, 1, 2 and 3. Nibble `j` of lane `l` in vector `v`
/// is the count for position `64 l + 4 j + v`.
#[inline(always)]
pub fn transpose_nibbles<V: SimdVector>(acc: &Accumulators<V>) -> [V; 4] {
    let lo1 = V::splat(CRUMB_MASK);
    let hi1 = V::splat(!CRUMB_MASK);
    let lo2 = V::splat(NIBBLE_MASK);
    let hi2 = V::splat(!NIBBLE_MASK);

    // 2x2 blocks: crumbs of (a2, a1) and (a8, a4) for even and odd positions
    let a12_even = acc.a1.and(lo1).or(acc.a2.shl(1).and(hi1));
    let a12_odd = acc.a2.and(hi1).or(acc.a1.shr(1).and(lo1));
    let a48_even = acc.a4.and(lo1).or(acc.a8.shl(1).and(hi1));
    let a48_odd = acc.a8.and(hi1).or(acc.a4.shr(1).and(lo1));

    // swap the off-diagonal crumbs to form nibbles
    let n0 = a12_even.and(lo2).or(a48_even.shl(2).and(hi2));
    let n2 = a48_even.and(hi2).or(a12_even.shr(2).and(lo2));
    let n1 = a12_odd.and(lo2).or(a48_odd.shl(2).and(hi2));
    let n3 = a48_odd.and(hi2).or(a12_odd.shr(2).and(lo2));

    [n0, n1, n2, n3]
}

/// Splits elements in two halves of double width. Step 2 (nibbles to bytes)
/// comes out pre-multiplied by 16.
#[inline(always)]
fn split_scaled<V: SimdVector>(x: V, step: usize) -> (V, V) {
    match step {
        0 => (x.and(V::splat(CRUMB_MASK)), x.shr(1).and(V::splat(CRUMB_MASK))),
        1 => (x.and(V::splat(NIBBLE_MASK)), x.shr(2).and(V::splat(NIBBLE_MASK))),
        2 => (x.and(V::splat(BYTE_MASK)).shl(4), x.and(V::splat(!BYTE_MASK))),
        _ => split_words(x),
    }
}

#[inline(always)]
fn split_words<V: SimdVector>(x: V) -> (V, V) {
    (x.and(V::splat(WORD_MASK)), x.shr(8).and(V::splat(WORD_MASK)))
}

/// Register position of every logical counter, per fold depth.
///
/// Entry `4 (q L + l) + k` is the bit position counted by 16-bit element `k`
/// of lane `l` of counter vector `q`, for `L = 2^levels` lanes. The parity
/// chosen by split step `s` (1-based) is lane index bit `levels - s` when
/// `s <= levels`, and vector index bit `4 - s` otherwise.
const fn slot_table(levels: u32) -> [u8; MAX_WIDTH] {
    let lanes = 1usize << levels;
    let mut table = [0u8; MAX_WIDTH];
    let mut idx = 0;
    while idx < MAX_WIDTH {
        let k = idx % 4;
        let lane = (idx / 4) % lanes;
        let q = idx / (4 * lanes);
        let mut pos = 16 * k;
        let mut s = 1;
        while s <= 4 {
            let parity = if s <= levels as usize {
                (lane >> (levels as usize - s)) & 1
            } else {
                (q >> (4 - s)) & 1
            };
            pos += parity << (s - 1);
            s += 1;
        }
        table[idx] = pos as u8;
        idx += 1;
    }
    table
}

const SLOTS: [[u8; MAX_WIDTH]; 4] = [slot_table(0), slot_table(1), slot_table(2), slot_table(3)];

/// The 16-bit counters as kept in vector registers: `1024 / r` vectors of
/// `r / 16` elements each, 64 counters in total.
#[derive(Clone, Copy, Debug)]
pub struct CounterBank<V> {
    vecs: [V; 16],
}

impl<V: SimdVector> Default for CounterBank<V> {
    fn default() -> Self {
        Self::new()
    }
}

impl<V: SimdVector> CounterBank<V> {
    const LEN: usize = 16 / V::LANES;

    #[inline(always)]
    pub fn new() -> Self {
        CounterBank { vecs: [V::zero(); 16] }
    }

    /// Adds `16 * a16[64 j + i]` summed over `j` to counter `i`.
    #[inline(always)]
    pub fn add_a16(&mut self, a16: V) {
        let levels = V::FOLD_LEVELS as usize;
        let mut v = [V::zero(); 16];
        v[0] = a16;
        let mut n = 1;
        for step in 0..4 {
            if step < levels {
                let (even, odd) = split_scaled(v[0], step);
                v[0] = V::fold(even, odd, (levels - 1 - step) as u32);
            } else {
                for q in (0..n).rev() {
                    let (even, odd) = split_scaled(v[q], step);
                    v[2 * q] = even;
                    v[2 * q + 1] = odd;
                }
                n *= 2;
            }
        }
        debug_assert_eq!(n, Self::LEN);
        for (c, x) in self.vecs[..Self::LEN].iter_mut().zip(v) {
            *c = c.add16(x);
        }
    }

    /// Adds the 4-bit counts held in `acc` to the counters.
    #[inline(always)]
    pub fn add_accumulators(&mut self, acc: &Accumulators<V>) {
        let planes = transpose_nibbles(acc);
        let byte_mask = V::splat(BYTE_MASK);

        // index 4 p1 + 2 p2 + p3, where p1 p2 select the plane and p3 the
        // nibble within each byte
        let mut b = [V::zero(); 8];
        for p1 in 0..2 {
            for p2 in 0..2 {
                let x = planes[p1 + 2 * p2];
                b[4 * p1 + 2 * p2] = x.and(byte_mask);
                b[4 * p1 + 2 * p2 + 1] = x.shr(4).and(byte_mask);
            }
        }

        // merge the most significant parity into lane index bits, the same
        // way add_a16 folds its splits
        let levels = V::FOLD_LEVELS;
        let mut n = 8;
        for merged in 0..levels {
            let half = n / 2;
            for j in 0..half {
                b[j] = V::fold(b[j], b[j + half], levels - 1 - merged);
            }
            n = half;
        }

        debug_assert_eq!(2 * n, Self::LEN);
        for (pair, &x) in self.vecs.chunks_exact_mut(2).zip(&b[..n]) {
            let (even, odd) = split_words(x);
            pair[0] = pair[0].add16(even);
            pair[1] = pair[1].add16(odd);
        }
    }

    /// The counters in bit order.
    #[inline(always)]
    pub fn to_logical(&self) -> CounterVectors {
        let slots = &SLOTS[V::FOLD_LEVELS as usize];
        let mut counts = [0u16; MAX_WIDTH];
        for q in 0..Self::LEN {
            let lanes = self.vecs[q].to_lanes();
            for (l, &lane) in lanes.iter().take(V::LANES).enumerate() {
                for k in 0..4 {
                    let slot = slots[4 * (q * V::LANES + l) + k] as usize;
                    counts[slot] = (lane >> (16 * k)) as u16;
                }
            }
        }
        CounterVectors { counts }
    }

    #[inline(always)]
    pub fn clear(&mut self) {
        *self = Self::new();
    }
}

/// Adds `16 * sum_j a16[64 j + i]` to `c[i]` using the fold scheme.
pub fn accumulate_a16<V: SimdVector>(c: &mut CounterVectors, a16: V) {
    let mut bank = CounterBank::<V>::new();
    bank.add_a16(a16);
    c.add_all(&bank.to_logical());
}

/// Adds the 4-bit count at every position `p` of `acc` to `c[p mod 64]`.
pub fn final_accumulate<V: SimdVector>(c: &mut CounterVectors, acc: &Accumulators<V>) {
    let mut bank = CounterBank::<V>::new();
    bank.add_accumulators(acc);
    c.add_all(&bank.to_logical());
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::WordWidth;

    #[test]
    fn slot_tables_are_permutations() {
        for table in SLOTS {
            let mut seen = [false; MAX_WIDTH];
            for &s in &table {
                assert!(!seen[s as usize]);
                seen[s as usize] = true;
            }
        }
        // no folds: plain bit order split four times
        assert_eq!(SLOTS[0][0], 0);
        assert_eq!(SLOTS[0][1], 16);
        assert_eq!(SLOTS[0][4], 8);
    }

    #[test]
    fn zero_a16_is_noop() {
        let mut c = CounterVectors::new();
        accumulate_a16(&mut c, 0u64);
        assert!(c.is_zero());
    }

    #[test]
    fn portable_a16_is_scaled_by_16() {
        let mut c = CounterVectors::new();
        accumulate_a16(&mut c, 1u64 << 6 | 1 << 63);
        for i in 0..64 {
            let expect = if i == 6 || i == 63 { 16 } else { 0 };
            assert_eq!(c.as_array()[i], expect, "counter {i}");
        }
    }

    #[test]
    fn transpose_places_value_nine() {
        let acc = Accumulators { a8: 1u64, a4: 0, a2: 0, a1: 1 };
        let [n0, n1, n2, n3] = transpose_nibbles(&acc);
        assert_eq!((n0, n1, n2, n3), (9, 0, 0, 0));
    }

    #[test]
    fn transpose_of_zero() {
        assert_eq!(transpose_nibbles(&Accumulators::<u64>::zero()), [0; 4]);
    }

    #[test]
    fn flush_identity_at_64() {
        let mut raw = [0u16; 64];
        for (i, x) in raw.iter_mut().enumerate() {
            *x = i as u16 * 3;
        }
        let mut out = CounterArray::new(WordWidth::W64);
        flush_fw(&mut out, &CounterVectors::from_array(raw));
        for j in 0..64 {
            assert_eq!(out[j], 3 * j as u64);
        }
    }

    #[test]
    fn flush_folds_residue_classes() {
        let mut out = CounterArray::new(WordWidth::W16);
        flush_fw(&mut out, &CounterVectors::from_array([1; 64]));
        assert!(out.as_slice().iter().all(|&x| x == 4));

        let mut ramp = [0u16; 64];
        for (i, x) in ramp.iter_mut().enumerate() {
            *x = i as u16;
        }
        let mut out = CounterArray::new(WordWidth::W8);
        flush_fw(&mut out, &CounterVectors::from_array(ramp));
        for j in 0..8 {
            assert_eq!(out[j], 8 * j as u64 + 224);
        }
    }

    #[test]
    fn tracker_thresholds() {
        assert_eq!(OverflowTracker::new(512).limit(), 65295);
        assert_eq!(OverflowTracker::new(64).limit(), 65505);
        let fresh = OverflowTracker::new(512);
        assert!(!fresh.needs_flush());
    }

    #[test]
    fn tracker_flushes_past_limit() {
        let mut t = OverflowTracker::new(512);
        let mut c = CounterVectors::from_array([5; 64]);
        let mut out = CounterArray::new(WordWidth::W64);
        let mut iterations = 0;
        while !t.needs_flush() {
            t.record_iteration();
            iterations += 1;
        }
        // 128 per iteration: 510 iterations reach 65280 <= 65295, one more does not
        assert_eq!(iterations, 511);
        assert!(check_and_flush(&mut t, &mut c, &mut out));
        assert_eq!(t.high_water(), 0);
        assert!(c.is_zero());
        assert_eq!(out[0], 5);
        assert!(!check_and_flush(&mut t, &mut c, &mut out));
    }

    #[test]
    fn shift_down_bytes_renumbers() {
        let mut raw = [0u16; 64];
        raw[8] = 1;
        raw[3] = 2;
        let mut c = CounterVectors::from_array(raw);
        c.shift_down_bytes(1);
        assert_eq!(c.as_array()[0], 1);
        assert_eq!(c.as_array()[59], 2);
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn counter_add_is_checked() {
        let mut c = CounterVectors::from_array([u16::MAX; 64]);
        c.add(0, 1);
    }
}
