//! `r = 128` with AArch64 ASIMD. The carry of each full adder is a bitwise
//! select: `(a ^ b) ? c : b`.

use core::arch::aarch64::*;

use crate::csa::BitVector;
use crate::vector::SimdVector;

#[derive(Clone, Copy, Debug)]
#[repr(transparent)]
pub(crate) struct Neon(uint64x2_t);

// ASIMD is mandatory on AArch64.
impl BitVector for Neon {
    #[inline(always)]
    fn zero() -> Self {
        Neon(unsafe { vdupq_n_u64(0) })
    }

    #[inline(always)]
    fn and(self, other: Self) -> Self {
        Neon(unsafe { vandq_u64(self.0, other.0) })
    }

    #[inline(always)]
    fn or(self, other: Self) -> Self {
        Neon(unsafe { vorrq_u64(self.0, other.0) })
    }

    #[inline(always)]
    fn xor(self, other: Self) -> Self {
        Neon(unsafe { veorq_u64(self.0, other.0) })
    }

    #[inline(always)]
    fn full_adder(a: Self, b: Self, c: Self) -> (Self, Self) {
        unsafe {
            let ab = veorq_u64(a.0, b.0);
            let sum = veorq_u64(ab, c.0);
            let carry = vbslq_u64(ab, c.0, b.0);
            (Neon(carry), Neon(sum))
        }
    }
}

impl SimdVector for Neon {
    const BITS: usize = 128;
    const FOLD_LEVELS: u32 = 1;

    #[inline(always)]
    fn splat(x: u64) -> Self {
        Neon(unsafe { vdupq_n_u64(x) })
    }

    #[inline(always)]
    fn load(bytes: &[u8]) -> Self {
        let bytes = &bytes[..16];
        Neon(unsafe { vreinterpretq_u64_u8(vld1q_u8(bytes.as_ptr())) })
    }

    #[inline(always)]
    fn shl(self, n: u32) -> Self {
        Neon(unsafe {
            match n {
                1 => vshlq_n_u64::<1>(self.0),
                2 => vshlq_n_u64::<2>(self.0),
                4 => vshlq_n_u64::<4>(self.0),
                8 => vshlq_n_u64::<8>(self.0),
                _ => vshlq_u64(self.0, vdupq_n_s64(n as i64)),
            }
        })
    }

    #[inline(always)]
    fn shr(self, n: u32) -> Self {
        Neon(unsafe {
            match n {
                1 => vshrq_n_u64::<1>(self.0),
                2 => vshrq_n_u64::<2>(self.0),
                4 => vshrq_n_u64::<4>(self.0),
                8 => vshrq_n_u64::<8>(self.0),
                _ => vshlq_u64(self.0, vdupq_n_s64(-(n as i64))),
            }
        })
    }

    #[inline(always)]
    fn add64(self, other: Self) -> Self {
        Neon(unsafe { vaddq_u64(self.0, other.0) })
    }

    #[inline(always)]
    fn add16(self, other: Self) -> Self {
        Neon(unsafe {
            vreinterpretq_u64_u16(vaddq_u16(
                vreinterpretq_u16_u64(self.0),
                vreinterpretq_u16_u64(other.0),
            ))
        })
    }

    #[inline(always)]
    fn fold(even: Self, odd: Self, level: u32) -> Self {
        debug_assert_eq!(level, 0);
        unsafe { Neon(vaddq_u64(vzip1q_u64(even.0, odd.0), vzip2q_u64(even.0, odd.0))) }
    }

    #[inline(always)]
    fn to_lanes(self) -> [u64; 8] {
        unsafe { [vgetq_lane_u64::<0>(self.0), vgetq_lane_u64::<1>(self.0), 0, 0, 0, 0, 0, 0] }
    }
}

entry_points!(Neon);
