//! A portable vector type for testing the generic pipeline.
//!
//! [`Counted<N>`] holds `N` 64-bit lanes (so `r = 64 N`) and records, per
//! thread, how many full adders were evaluated and the deepest chain of full
//! adders behind any value. Its 16-bit additions are checked and panic on
//! overflow instead of wrapping.

use std::cell::Cell;

use crate::csa::BitVector;
use crate::vector::SimdVector;

std::thread_local! {
    static FULL_ADDERS: Cell<u64> = const { Cell::new(0) };
    static MAX_DEPTH: Cell<u32> = const { Cell::new(0) };
}

/// Resets this thread's counters.
pub fn reset() {
    FULL_ADDERS.with(|c| c.set(0));
    MAX_DEPTH.with(|c| c.set(0));
}

/// Full adders evaluated on this thread since the last [`reset`].
pub fn full_adders() -> u64 {
    FULL_ADDERS.with(Cell::get)
}

/// Longest chain of full adders feeding any value produced since the last
/// [`reset`].
pub fn max_depth() -> u32 {
    MAX_DEPTH.with(Cell::get)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Counted<const N: usize> {
    pub lanes: [u64; N],
    /// Full adders on the longest path leading to this value.
    pub depth: u32,
}

impl<const N: usize> Counted<N> {
    pub fn new(lanes: [u64; N]) -> Self {
        Counted { lanes, depth: 0 }
    }

    fn zip(self, other: Self, f: impl Fn(u64, u64) -> u64) -> Self {
        let mut lanes = self.lanes;
        for (x, y) in lanes.iter_mut().zip(other.lanes) {
            *x = f(*x, y);
        }
        Counted { lanes, depth: self.depth.max(other.depth) }
    }

    fn map(self, f: impl Fn(u64) -> u64) -> Self {
        Counted { lanes: self.lanes.map(f), depth: self.depth }
    }
}

impl<const N: usize> BitVector for Counted<N> {
    fn zero() -> Self {
        Counted::new([0; N])
    }

    fn and(self, other: Self) -> Self {
        self.zip(other, |x, y| x & y)
    }

    fn or(self, other: Self) -> Self {
        self.zip(other, |x, y| x | y)
    }

    fn xor(self, other: Self) -> Self {
        self.zip(other, |x, y| x ^ y)
    }

    fn full_adder(a: Self, b: Self, c: Self) -> (Self, Self) {
        let ab = a.xor(b);
        let mut sum = ab.xor(c);
        let mut carry = a.and(b).or(ab.and(c));
        let depth = a.depth.max(b.depth).max(c.depth) + 1;
        sum.depth = depth;
        carry.depth = depth;
        FULL_ADDERS.with(|n| n.set(n.get() + 1));
        MAX_DEPTH.with(|d| d.set(d.get().max(depth)));
        (carry, sum)
    }
}

impl<const N: usize> SimdVector for Counted<N> {
    const BITS: usize = 64 * N;
    const FOLD_LEVELS: u32 = N.trailing_zeros();

    fn splat(x: u64) -> Self {
        Counted::new([x; N])
    }

    fn load(bytes: &[u8]) -> Self {
        let mut lanes = [0u64; N];
        for (lane, chunk) in lanes.iter_mut().zip(bytes[..8 * N].chunks_exact(8)) {
            *lane = u64::from_le_bytes(chunk.try_into().unwrap());
        }
        Counted::new(lanes)
    }

    fn shl(self, n: u32) -> Self {
        self.map(|x| x << n)
    }

    fn shr(self, n: u32) -> Self {
        self.map(|x| x >> n)
    }

    fn add64(self, other: Self) -> Self {
        self.zip(other, |x, y| x.checked_add(y).expect("64-bit lane overflow"))
    }

    /// # Panics
    ///
    /// If any 16-bit element overflows.
    fn add16(self, other: Self) -> Self {
        self.zip(other, |x, y| {
            let mut out = 0u64;
            for k in 0..4 {
                let e = (x >> (16 * k)) as u16;
                let f = (y >> (16 * k)) as u16;
                let s = e.checked_add(f).expect("16-bit counter overflow");
                out |= u64::from(s) << (16 * k);
            }
            out
        })
    }

    fn fold(even: Self, odd: Self, level: u32) -> Self {
        assert!(level < Self::FOLD_LEVELS);
        let m = 1usize << level;
        let mut lanes = [0u64; N];
        for (l, lane) in lanes.iter_mut().enumerate() {
            let src = if l & m == 0 { &even } else { &odd };
            *lane = src.lanes[l].checked_add(src.lanes[l ^ m]).expect("64-bit lane overflow");
        }
        Counted { lanes, depth: even.depth.max(odd.depth) }
    }

    fn to_lanes(self) -> [u64; 8] {
        let mut out = [0u64; 8];
        out[..N].copy_from_slice(&self.lanes);
        out
    }
}
