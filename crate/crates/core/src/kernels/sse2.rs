//! `r = 128` on the SSE2 baseline of x86-64.

use core::arch::x86_64::*;

use crate::csa::BitVector;
use crate::vector::SimdVector;

#[derive(Clone, Copy, Debug)]
#[repr(transparent)]
pub(crate) struct Sse2(__m128i);

// SSE2 is part of the x86-64 baseline, so the intrinsics are always sound.
impl BitVector for Sse2 {
    #[inline(always)]
    fn zero() -> Self {
        Sse2(unsafe { _mm_setzero_si128() })
    }

    #[inline(always)]
    fn and(self, other: Self) -> Self {
        Sse2(unsafe { _mm_and_si128(self.0, other.0) })
    }

    #[inline(always)]
    fn or(self, other: Self) -> Self {
        Sse2(unsafe { _mm_or_si128(self.0, other.0) })
    }

    #[inline(always)]
    fn xor(self, other: Self) -> Self {
        Sse2(unsafe { _mm_xor_si128(self.0, other.0) })
    }
}

impl SimdVector for Sse2 {
    const BITS: usize = 128;
    const FOLD_LEVELS: u32 = 1;

    #[inline(always)]
    fn splat(x: u64) -> Self {
        Sse2(unsafe { _mm_set1_epi64x(x as i64) })
    }

    #[inline(always)]
    fn load(bytes: &[u8]) -> Self {
        let bytes = &bytes[..16];
        Sse2(unsafe { _mm_loadu_si128(bytes.as_ptr().cast()) })
    }

    #[inline(always)]
    fn shl(self, n: u32) -> Self {
        Sse2(unsafe {
            match n {
                1 => _mm_slli_epi64::<1>(self.0),
                2 => _mm_slli_epi64::<2>(self.0),
                4 => _mm_slli_epi64::<4>(self.0),
                8 => _mm_slli_epi64::<8>(self.0),
                _ => _mm_sll_epi64(self.0, _mm_cvtsi32_si128(n as i32)),
            }
        })
    }

    #[inline(always)]
    fn shr(self, n: u32) -> Self {
        Sse2(unsafe {
            match n {
                1 => _mm_srli_epi64::<1>(self.0),
                2 => _mm_srli_epi64::<2>(self.0),
                4 => _mm_srli_epi64::<4>(self.0),
                8 => _mm_srli_epi64::<8>(self.0),
                _ => _mm_srl_epi64(self.0, _mm_cvtsi32_si128(n as i32)),
            }
        })
    }

    #[inline(always)]
    fn add64(self, other: Self) -> Self {
        Sse2(unsafe { _mm_add_epi64(self.0, other.0) })
    }

    #[inline(always)]
    fn add16(self, other: Self) -> Self {
        Sse2(unsafe { _mm_add_epi16(self.0, other.0) })
    }

    #[inline(always)]
    fn fold(even: Self, odd: Self, level: u32) -> Self {
        debug_assert_eq!(level, 0);
        unsafe {
            let x = _mm_unpacklo_epi64(even.0, odd.0);
            let y = _mm_unpackhi_epi64(even.0, odd.0);
            Sse2(_mm_add_epi64(x, y))
        }
    }

    #[inline(always)]
    fn to_lanes(self) -> [u64; 8] {
        let mut lanes = [0u64; 8];
        unsafe { _mm_storeu_si128(lanes.as_mut_ptr().cast(), self.0) };
        lanes
    }
}

entry_points!(Sse2);
