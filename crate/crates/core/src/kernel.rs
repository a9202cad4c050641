//! Kernel descriptors, capability probing and dispatch.

use core::fmt;
use core::sync::atomic::{AtomicU8, Ordering};

use crate::accum::CounterVectors;
use crate::kernels as imp;
use crate::model::CounterArray;
use crate::Error;

/// Identifies a compiled-in kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KernelId {
    /// Ordinary 64-bit machine words.
    Portable,
    /// 128-bit SSE2 registers (x86-64 baseline).
    Sse2,
    /// 256-bit AVX2 registers.
    Avx2,
    /// 512-bit AVX-512F/BW registers.
    Avx512,
    /// 128-bit AArch64 ASIMD registers.
    Neon,
}

impl KernelId {
    pub const fn name(self) -> &'static str {
        match self {
            KernelId::Portable => "portable",
            KernelId::Sse2 => "sse2",
            KernelId::Avx2 => "avx2",
            KernelId::Avx512 => "avx512",
            KernelId::Neon => "neon",
        }
    }

    const fn bit(self) -> u8 {
        1 << self as u8
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A kernel: the pipeline instantiated for one register width.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Kernel {
    id: KernelId,
    vector_bits: usize,
}

#[cfg(target_arch = "x86_64")]
const KERNELS: &[Kernel] = &[
    Kernel { id: KernelId::Portable, vector_bits: 64 },
    Kernel { id: KernelId::Sse2, vector_bits: 128 },
    Kernel { id: KernelId::Avx2, vector_bits: 256 },
    Kernel { id: KernelId::Avx512, vector_bits: 512 },
];

#[cfg(target_arch = "aarch64")]
const KERNELS: &[Kernel] = &[
    Kernel { id: KernelId::Portable, vector_bits: 64 },
    Kernel { id: KernelId::Neon, vector_bits: 128 },
];

#[cfg(not(any(target_arch = "x86_64", target_arch = "aarch64")))]
const KERNELS: &[Kernel] = &[Kernel { id: KernelId::Portable, vector_bits: 64 }];

impl Kernel {
    pub fn id(&self) -> KernelId {
        self.id
    }

    pub fn name(&self) -> &'static str {
        self.id.name()
    }

    /// Register width `r` in bits.
    pub fn vector_bits(&self) -> usize {
        self.vector_bits
    }

    /// Input consumed per main-loop iteration: 16 vectors.
    pub fn block_bytes(&self) -> usize {
        16 * self.vector_bits / 8
    }

    pub fn is_available(&self) -> bool {
        available_set() & self.id.bit() != 0
    }

    fn check(&self) -> Result<(), Error> {
        if self.is_available() {
            Ok(())
        } else {
            Err(Error::KernelUnavailable(self.id))
        }
    }

    /// Adds the positional population count of `bytes` to `counts`.
    pub fn count(&self, bytes: &[u8], counts: &mut CounterArray) -> Result<(), Error> {
        self.check()?;
        // SAFETY: availability of the required CPU features was checked above.
        unsafe {
            match self.id {
                KernelId::Portable => imp::portable::count(bytes, counts),
                #[cfg(target_arch = "x86_64")]
                KernelId::Sse2 => imp::sse2::count(bytes, counts),
                #[cfg(target_arch = "x86_64")]
                KernelId::Avx2 => imp::avx2::count(bytes, counts),
                #[cfg(target_arch = "x86_64")]
                KernelId::Avx512 => imp::avx512::count(bytes, counts),
                #[cfg(target_arch = "aarch64")]
                KernelId::Neon => imp::neon::count(bytes, counts),
                #[allow(unreachable_patterns)]
                _ => unreachable!("kernel not compiled for this target"),
            }
        }
    }

    /// Runs this kernel's `a16` accumulation on one vector, given as its
    /// `r / 8` bytes.
    ///
    /// # Panics
    ///
    /// If `a16` is shorter than one vector.
    pub fn accumulate_a16(&self, c: &mut CounterVectors, a16: &[u8]) -> Result<(), Error> {
        self.check()?;
        assert!(a16.len() >= self.vector_bits / 8, "a16 shorter than one vector");
        unsafe {
            match self.id {
                KernelId::Portable => imp::portable::accumulate_a16(c, a16),
                #[cfg(target_arch = "x86_64")]
                KernelId::Sse2 => imp::sse2::accumulate_a16(c, a16),
                #[cfg(target_arch = "x86_64")]
                KernelId::Avx2 => imp::avx2::accumulate_a16(c, a16),
                #[cfg(target_arch = "x86_64")]
                KernelId::Avx512 => imp::avx512::accumulate_a16(c, a16),
                #[cfg(target_arch = "aarch64")]
                KernelId::Neon => imp::neon::accumulate_a16(c, a16),
                #[allow(unreachable_patterns)]
                _ => unreachable!("kernel not compiled for this target"),
            }
        }
        Ok(())
    }

    /// Runs this kernel's final accumulation on the planes `[a8, a4, a2, a1]`,
    /// each given as `r / 8` bytes.
    ///
    /// # Panics
    ///
    /// If a plane is shorter than one vector.
    pub fn final_accumulate(&self, c: &mut CounterVectors, planes: [&[u8]; 4]) -> Result<(), Error> {
        self.check()?;
        assert!(
            planes.iter().all(|p| p.len() >= self.vector_bits / 8),
            "plane shorter than one vector"
        );
        unsafe {
            match self.id {
                KernelId::Portable => imp::portable::final_accumulate(c, planes),
                #[cfg(target_arch = "x86_64")]
                KernelId::Sse2 => imp::sse2::final_accumulate(c, planes),
                #[cfg(target_arch = "x86_64")]
                KernelId::Avx2 => imp::avx2::final_accumulate(c, planes),
                #[cfg(target_arch = "x86_64")]
                KernelId::Avx512 => imp::avx512::final_accumulate(c, planes),
                #[cfg(target_arch = "aarch64")]
                KernelId::Neon => imp::neon::final_accumulate(c, planes),
                #[allow(unreachable_patterns)]
                _ => unreachable!("kernel not compiled for this target"),
            }
        }
        Ok(())
    }

    /// Runs this kernel's byte-counter tail: bit `b` of byte `n` goes to
    /// counter `(8 n + b) mod 64`.
    pub fn count_tail(&self, c: &mut CounterVectors, bytes: &[u8]) -> Result<(), Error> {
        self.check()?;
        unsafe {
            match self.id {
                KernelId::Portable => imp::portable::count_tail(c, bytes),
                #[cfg(target_arch = "x86_64")]
                KernelId::Sse2 => imp::sse2::count_tail(c, bytes),
                #[cfg(target_arch = "x86_64")]
                KernelId::Avx2 => imp::avx2::count_tail(c, bytes),
                #[cfg(target_arch = "x86_64")]
                KernelId::Avx512 => imp::avx512::count_tail(c, bytes),
                #[cfg(target_arch = "aarch64")]
                KernelId::Neon => imp::neon::count_tail(c, bytes),
                #[allow(unreachable_patterns)]
                _ => unreachable!("kernel not compiled for this target"),
            }
        }
        Ok(())
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const PROBED: u8 = 0x80;
static AVAILABLE: AtomicU8 = AtomicU8::new(0);

// Racing threads compute the same value, so a relaxed store is enough.
fn available_set() -> u8 {
    let cached = AVAILABLE.load(Ordering::Relaxed);
    if cached & PROBED != 0 {
        return cached;
    }
    let set = probe() | PROBED;
    AVAILABLE.store(set, Ordering::Relaxed);
    set
}

#[allow(unused_mut)]
fn probe() -> u8 {
    let mut set = KernelId::Portable.bit();
    #[cfg(target_arch = "x86_64")]
    {
        set |= KernelId::Sse2.bit();
        if has_avx2() {
            set |= KernelId::Avx2.bit();
        }
        if has_avx512() {
            set |= KernelId::Avx512.bit();
        }
    }
    #[cfg(target_arch = "aarch64")]
    {
        set |= KernelId::Neon.bit();
    }
    set
}

#[cfg(all(target_arch = "x86_64", feature = "std"))]
fn has_avx2() -> bool {
    std::is_x86_feature_detected!("avx2")
}

#[cfg(all(target_arch = "x86_64", feature = "std"))]
fn has_avx512() -> bool {
    std::is_x86_feature_detected!("avx512f") && std::is_x86_feature_detected!("avx512bw")
}

// Without std there is no runtime detection; trust the build target.
#[cfg(all(target_arch = "x86_64", not(feature = "std")))]
fn has_avx2() -> bool {
    cfg!(target_feature = "avx2")
}

#[cfg(all(target_arch = "x86_64", not(feature = "std")))]
fn has_avx512() -> bool {
    cfg!(all(target_feature = "avx512f", target_feature = "avx512bw"))
}

/// Every compiled-in kernel, portable first, then by increasing width.
pub fn kernels() -> &'static [Kernel] {
    KERNELS
}

/// Every compiled-in kernel with its availability on this CPU.
pub fn list_kernels() -> impl Iterator<Item = (Kernel, bool)> {
    KERNELS.iter().map(|k| (*k, k.is_available()))
}

/// Looks up a kernel by name, available or not.
pub fn kernel_by_name(name: &str) -> Option<Kernel> {
    KERNELS.iter().copied().find(|k| k.name() == name)
}

/// The named kernel if given, otherwise the widest available one.
pub fn select_kernel(name: Option<&str>) -> Result<Kernel, Error> {
    match name {
        Some(name) => {
            let kernel = kernel_by_name(name).ok_or(Error::UnknownKernel)?;
            kernel.check()?;
            Ok(kernel)
        }
        None => Ok(widest_available()),
    }
}

fn widest_available() -> Kernel {
    KERNELS
        .iter()
        .copied()
        .filter(Kernel::is_available)
        .max_by_key(Kernel::vector_bits)
        .unwrap_or(KERNELS[0])
}

/// Name of the environment variable that overrides [`default_kernel`].
pub const KERNEL_ENV: &str = "POSPOPCNT_KERNEL";

/// The kernel used by [`crate::pospopcnt`]: `POSPOPCNT_KERNEL` if set, else
/// the widest available. Resolved once per process.
#[cfg(feature = "std")]
pub fn default_kernel() -> Result<Kernel, Error> {
    static DEFAULT: std::sync::OnceLock<Result<Kernel, Error>> = std::sync::OnceLock::new();
    *DEFAULT.get_or_init(|| {
        let name = std::env::var(KERNEL_ENV).ok().filter(|s| !s.is_empty());
        select_kernel(name.as_deref())
    })
}

#[cfg(not(feature = "std"))]
pub fn default_kernel() -> Result<Kernel, Error> {
    Ok(widest_available())
}
