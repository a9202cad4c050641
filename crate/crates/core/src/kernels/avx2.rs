//! `r = 256` with AVX2.
//!
//! The trait methods use AVX2 intrinsics without enabling the feature
//! themselves. They are `#[inline(always)]` and only reached through the
//! entry points at the bottom, which carry `#[target_feature]` and are
//! called after runtime detection.

use core::arch::x86_64::*;

use crate::csa::BitVector;
use crate::edge::TailCounters;
use crate::vector::{SimdVector, BIT_ISOLATE};

#[derive(Clone, Copy, Debug)]
#[repr(transparent)]
pub(crate) struct Avx2(__m256i);

impl BitVector for Avx2 {
    #[inline(always)]
    fn zero() -> Self {
        Avx2(unsafe { _mm256_setzero_si256() })
    }

    #[inline(always)]
    fn and(self, other: Self) -> Self {
        Avx2(unsafe { _mm256_and_si256(self.0, other.0) })
    }

    #[inline(always)]
    fn or(self, other: Self) -> Self {
        Avx2(unsafe { _mm256_or_si256(self.0, other.0) })
    }

    #[inline(always)]
    fn xor(self, other: Self) -> Self {
        Avx2(unsafe { _mm256_xor_si256(self.0, other.0) })
    }
}

impl SimdVector for Avx2 {
    const BITS: usize = 256;
    const FOLD_LEVELS: u32 = 2;

    #[inline(always)]
    fn splat(x: u64) -> Self {
        Avx2(unsafe { _mm256_set1_epi64x(x as i64) })
    }

    #[inline(always)]
    fn load(bytes: &[u8]) -> Self {
        let bytes = &bytes[..32];
        Avx2(unsafe { _mm256_loadu_si256(bytes.as_ptr().cast()) })
    }

    #[inline(always)]
    fn shl(self, n: u32) -> Self {
        Avx2(unsafe {
            match n {
                1 => _mm256_slli_epi64::<1>(self.0),
                2 => _mm256_slli_epi64::<2>(self.0),
                4 => _mm256_slli_epi64::<4>(self.0),
                8 => _mm256_slli_epi64::<8>(self.0),
                _ => _mm256_sll_epi64(self.0, _mm_cvtsi32_si128(n as i32)),
            }
        })
    }

    #[inline(always)]
    fn shr(self, n: u32) -> Self {
        Avx2(unsafe {
            match n {
                1 => _mm256_srli_epi64::<1>(self.0),
                2 => _mm256_srli_epi64::<2>(self.0),
                4 => _mm256_srli_epi64::<4>(self.0),
                8 => _mm256_srli_epi64::<8>(self.0),
                _ => _mm256_srl_epi64(self.0, _mm_cvtsi32_si128(n as i32)),
            }
        })
    }

    #[inline(always)]
    fn add64(self, other: Self) -> Self {
        Avx2(unsafe { _mm256_add_epi64(self.0, other.0) })
    }

    #[inline(always)]
    fn add16(self, other: Self) -> Self {
        Avx2(unsafe { _mm256_add_epi16(self.0, other.0) })
    }

    #[inline(always)]
    fn fold(even: Self, odd: Self, level: u32) -> Self {
        unsafe {
            let (x, y) = match level {
                // 128-bit halves
                1 => (
                    _mm256_permute2x128_si256::<0x20>(even.0, odd.0),
                    _mm256_permute2x128_si256::<0x31>(even.0, odd.0),
                ),
                // 64-bit lanes within each half
                _ => (_mm256_unpacklo_epi64(even.0, odd.0), _mm256_unpackhi_epi64(even.0, odd.0)),
            };
            Avx2(_mm256_add_epi64(x, y))
        }
    }

    #[inline(always)]
    fn to_lanes(self) -> [u64; 8] {
        let mut lanes = [0u64; 8];
        unsafe { _mm256_storeu_si256(lanes.as_mut_ptr().cast(), self.0) };
        lanes
    }

    // Byte g of each group is replicated into bytes 8g..8g+8, masked down to
    // one bit per copy and compared against the mask: -1 where set. The
    // counters subtract that.
    #[inline(always)]
    fn count_groups(tail: &mut TailCounters, groups: &[u8]) {
        debug_assert!(groups.len().is_multiple_of(8) && groups.len() <= 8 * 255);
        unsafe {
            let ptr = tail.as_mut_array().as_mut_ptr().cast::<__m256i>();
            let mut lo = _mm256_loadu_si256(ptr);
            let mut hi = _mm256_loadu_si256(ptr.add(1));
            let isolate = _mm256_set1_epi64x(BIT_ISOLATE as i64);
            #[rustfmt::skip]
            let spread_lo = _mm256_setr_epi8(
                0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1,
                2, 2, 2, 2, 2, 2, 2, 2, 3, 3, 3, 3, 3, 3, 3, 3,
            );
            #[rustfmt::skip]
            let spread_hi = _mm256_setr_epi8(
                4, 4, 4, 4, 4, 4, 4, 4, 5, 5, 5, 5, 5, 5, 5, 5,
                6, 6, 6, 6, 6, 6, 6, 6, 7, 7, 7, 7, 7, 7, 7, 7,
            );
            for group in groups.chunks_exact(8) {
                let x = _mm256_set1_epi64x(i64::from_le_bytes(group.try_into().unwrap()));
                let bits_lo = _mm256_and_si256(_mm256_shuffle_epi8(x, spread_lo), isolate);
                let bits_hi = _mm256_and_si256(_mm256_shuffle_epi8(x, spread_hi), isolate);
                lo = _mm256_sub_epi8(lo, _mm256_cmpeq_epi8(bits_lo, isolate));
                hi = _mm256_sub_epi8(hi, _mm256_cmpeq_epi8(bits_hi, isolate));
            }
            _mm256_storeu_si256(ptr, lo);
            _mm256_storeu_si256(ptr.add(1), hi);
        }
    }
}

entry_points!(Avx2, "avx2");
