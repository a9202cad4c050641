//! Per-ISA vector types and the entry points instantiated for each.

/// Instantiates the generic pipeline for one vector type. With a feature
/// list, the entry points are compiled with those target features enabled
/// and are only sound to call once the CPU is known to support them.
macro_rules! entry_points {
    ($vector:ty $(, $features:literal)?) => {
        use crate::accum::{CounterBank, CounterVectors};
        use crate::csa::Accumulators;
        use crate::model::CounterArray;

        $(#[target_feature(enable = $features)])?
        pub(crate) unsafe fn count(
            bytes: &[u8],
            counts: &mut CounterArray,
        ) -> Result<(), crate::Error> {
            crate::pipeline::run::<$vector>(bytes, counts)
        }

        $(#[target_feature(enable = $features)])?
        pub(crate) unsafe fn accumulate_a16(c: &mut CounterVectors, a16: &[u8]) {
            let mut bank = CounterBank::<$vector>::new();
            bank.add_a16(<$vector as crate::vector::SimdVector>::load(a16));
            c.add_all(&bank.to_logical());
        }

        $(#[target_feature(enable = $features)])?
        pub(crate) unsafe fn final_accumulate(c: &mut CounterVectors, planes: [&[u8]; 4]) {
            let acc = Accumulators {
                a8: <$vector as crate::vector::SimdVector>::load(planes[0]),
                a4: <$vector as crate::vector::SimdVector>::load(planes[1]),
                a2: <$vector as crate::vector::SimdVector>::load(planes[2]),
                a1: <$vector as crate::vector::SimdVector>::load(planes[3]),
            };
            let mut bank = CounterBank::<$vector>::new();
            bank.add_accumulators(&acc);
            c.add_all(&bank.to_logical());
        }

        $(#[target_feature(enable = $features)])?
        pub(crate) unsafe fn count_tail(c: &mut CounterVectors, bytes: &[u8]) {
            crate::edge::count_tail::<$vector>(c, bytes)
        }
    };
}

pub(crate) mod portable {
    entry_points!(u64);
}

#[cfg(target_arch = "x86_64")]
pub(crate) mod avx2;
#[cfg(target_arch = "x86_64")]
pub(crate) mod avx512;
#[cfg(target_arch = "aarch64")]
pub(crate) mod neon;
#[cfg(target_arch = "x86_64")]
pub(crate) mod sse2;
