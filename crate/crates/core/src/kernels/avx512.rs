//! `r = 512` with AVX-512F and AVX-512BW.
//!
//! Same arrangement as the AVX2 kernel: intrinsics in `#[inline(always)]`
//! trait methods, made sound by the feature-gated entry points.

use core::arch::x86_64::*;

use crate::csa::BitVector;
use crate::edge::TailCounters;
use crate::vector::SimdVector;

#[derive(Clone, Copy, Debug)]
#[repr(transparent)]
pub(crate) struct Avx512(__m512i);

// lane indices for folding 128-bit blocks: 0-7 pick from even, 8-15 from odd
const FOLD128_LO: [u64; 8] = [0, 1, 8, 9, 4, 5, 12, 13];
const FOLD128_HI: [u64; 8] = [2, 3, 10, 11, 6, 7, 14, 15];

impl BitVector for Avx512 {
    #[inline(always)]
    fn zero() -> Self {
        Avx512(unsafe { _mm512_setzero_si512() })
    }

    #[inline(always)]
    fn and(self, other: Self) -> Self {
        Avx512(unsafe { _mm512_and_si512(self.0, other.0) })
    }

    #[inline(always)]
    fn or(self, other: Self) -> Self {
        Avx512(unsafe { _mm512_or_si512(self.0, other.0) })
    }

    #[inline(always)]
    fn xor(self, other: Self) -> Self {
        Avx512(unsafe { _mm512_xor_si512(self.0, other.0) })
    }

    // parity and majority straight from ternary logic truth tables
    #[inline(always)]
    fn full_adder(a: Self, b: Self, c: Self) -> (Self, Self) {
        unsafe {
            let sum = _mm512_ternarylogic_epi64::<0x96>(a.0, b.0, c.0);
            let carry = _mm512_ternarylogic_epi64::<0xe8>(a.0, b.0, c.0);
            (Avx512(carry), Avx512(sum))
        }
    }
}

impl SimdVector for Avx512 {
    const BITS: usize = 512;
    const FOLD_LEVELS: u32 = 3;

    #[inline(always)]
    fn splat(x: u64) -> Self {
        Avx512(unsafe { _mm512_set1_epi64(x as i64) })
    }

    #[inline(always)]
    fn load(bytes: &[u8]) -> Self {
        let bytes = &bytes[..64];
        Avx512(unsafe { _mm512_loadu_si512(bytes.as_ptr().cast()) })
    }

    #[inline(always)]
    fn shl(self, n: u32) -> Self {
        Avx512(unsafe {
            match n {
                1 => _mm512_slli_epi64::<1>(self.0),
                2 => _mm512_slli_epi64::<2>(self.0),
                4 => _mm512_slli_epi64::<4>(self.0),
                8 => _mm512_slli_epi64::<8>(self.0),
                _ => _mm512_sll_epi64(self.0, _mm_cvtsi32_si128(n as i32)),
            }
        })
    }

    #[inline(always)]
    fn shr(self, n: u32) -> Self {
        Avx512(unsafe {
            match n {
                1 => _mm512_srli_epi64::<1>(self.0),
                2 => _mm512_srli_epi64::<2>(self.0),
                4 => _mm512_srli_epi64::<4>(self.0),
                8 => _mm512_srli_epi64::<8>(self.0),
                _ => _mm512_srl_epi64(self.0, _mm_cvtsi32_si128(n as i32)),
            }
        })
    }

    #[inline(always)]
    fn add64(self, other: Self) -> Self {
        Avx512(unsafe { _mm512_add_epi64(self.0, other.0) })
    }

    #[inline(always)]
    fn add16(self, other: Self) -> Self {
        Avx512(unsafe { _mm512_add_epi16(self.0, other.0) })
    }

    #[inline(always)]
    fn fold(even: Self, odd: Self, level: u32) -> Self {
        unsafe {
            let (x, y) = match level {
                // 256-bit halves
                2 => (
                    _mm512_shuffle_i64x2::<0x44>(even.0, odd.0),
                    _mm512_shuffle_i64x2::<0xee>(even.0, odd.0),
                ),
                // 128-bit blocks within each half
                1 => {
                    let lo = _mm512_loadu_si512(FOLD128_LO.as_ptr().cast());
                    let hi = _mm512_loadu_si512(FOLD128_HI.as_ptr().cast());
                    (
                        _mm512_permutex2var_epi64(even.0, lo, odd.0),
                        _mm512_permutex2var_epi64(even.0, hi, odd.0),
                    )
                }
                // 64-bit lanes within each block
                _ => (_mm512_unpacklo_epi64(even.0, odd.0), _mm512_unpackhi_epi64(even.0, odd.0)),
            };
            Avx512(_mm512_add_epi64(x, y))
        }
    }

    #[inline(always)]
    fn to_lanes(self) -> [u64; 8] {
        let mut lanes = [0u64; 8];
        unsafe { _mm512_storeu_si512(lanes.as_mut_ptr().cast(), self.0) };
        lanes
    }

    // The group itself is the predicate: bit i selects counter byte i.
    #[inline(always)]
    fn count_groups(tail: &mut TailCounters, groups: &[u8]) {
        debug_assert!(groups.len().is_multiple_of(8) && groups.len() <= 8 * 255);
        unsafe {
            let ptr = tail.as_mut_array().as_mut_ptr();
            let mut counters = _mm512_loadu_si512(ptr.cast());
            let ones = _mm512_set1_epi8(1);
            for group in groups.chunks_exact(8) {
                let mask = u64::from_le_bytes(group.try_into().unwrap());
                counters = _mm512_mask_add_epi8(counters, mask, counters, ones);
            }
            _mm512_storeu_si512(ptr.cast(), counters);
        }
    }
}

entry_points!(Avx512, "avx512f,avx512bw");
