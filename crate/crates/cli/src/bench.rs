//! Throughput measurement.
//!
//! Each (kernel, size) pair is timed in rounds. A round calls the kernel `k`
//! times on the same buffer and counter array. `k` starts at 1 and doubles
//! while a round takes less than half the minimum time, then jumps to the
//! count expected to fill the minimum time. Measurement stops after a round
//! of at least the minimum time, and never before the second round. Only the
//! last round is reported.

use std::fmt::Write as _;
use std::hint::black_box;
use std::time::{Duration, Instant};

use pospopcnt::{scalar_pospopcnt, select_kernel, CounterArray, Kernel, WordWidth};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::perf::{CounterValues, HardwareCounters};
use crate::CliError;

/// What gets timed: a library kernel or one of two references.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchKernel {
    /// The naive per-bit loop.
    Scalar,
    /// Sums the input as 64-bit words: an approximate memory-bandwidth bound.
    Roofline,
    Kernel(Kernel),
}

impl BenchKernel {
    pub fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "scalar" => Ok(BenchKernel::Scalar),
            "roofline" => Ok(BenchKernel::Roofline),
            _ => Ok(BenchKernel::Kernel(select_kernel(Some(name))?)),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BenchKernel::Scalar => "scalar",
            BenchKernel::Roofline => "roofline",
            BenchKernel::Kernel(k) => k.name(),
        }
    }

    /// The scalar reference followed by every available kernel.
    pub fn defaults() -> Vec<Self> {
        let mut all = vec![BenchKernel::Scalar];
        all.extend(pospopcnt::list_kernels().filter(|(_, a)| *a).map(|(k, _)| BenchKernel::Kernel(k)));
        all
    }

    #[inline]
    fn run(&self, bytes: &[u8], counts: &mut CounterArray) {
        let bytes = black_box(bytes);
        match self {
            BenchKernel::Scalar => scalar_pospopcnt(bytes, counts).unwrap(),
            BenchKernel::Roofline => roofline(bytes, counts),
            BenchKernel::Kernel(k) => k.count(bytes, counts).unwrap(),
        }
    }
}

fn roofline(bytes: &[u8], counts: &mut CounterArray) {
    let mut chunks = bytes.chunks_exact(8);
    let mut sum = 0u64;
    for chunk in &mut chunks {
        sum = sum.wrapping_add(u64::from_le_bytes(chunk.try_into().unwrap()));
    }
    for &b in chunks.remainder() {
        sum = sum.wrapping_add(u64::from(b));
    }
    counts.as_mut_slice()[0] = counts[0].wrapping_add(sum);
}

/// `2^i` for `i` in 1..=30 and `3 * 2^i` for `i` in 0..=29, ascending.
pub fn default_grid() -> Vec<usize> {
    let mut sizes: Vec<usize> = (1..=30).map(|i| 1usize << i).chain((0..30).map(|i| 3usize << i)).collect();
    sizes.sort_unstable();
    sizes
}

/// [`default_grid`] without the sizes that are not whole words of `width`.
pub fn default_grid_for(width: WordWidth) -> Vec<usize> {
    default_grid().into_iter().filter(|n| n % width.bytes() == 0).collect()
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub kernels: Vec<BenchKernel>,
    pub width: WordWidth,
    pub min_time: Duration,
    /// Fill buffers with random bytes instead of zeros.
    pub random_fill: bool,
    pub seed: u64,
    /// Try to read cycle and instruction counters.
    pub hardware_counters: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: default_grid_for(WordWidth::W16),
            kernels: BenchKernel::defaults(),
            width: WordWidth::W16,
            min_time: Duration::from_secs(2),
            random_fill: false,
            seed: 0,
            hardware_counters: true,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.min_time.is_zero() {
            return Err(CliError::Usage("minimum time must be positive".into()));
        }
        if self.sizes.is_empty() {
            return Err(CliError::Usage("no sizes given".into()));
        }
        if self.kernels.is_empty() {
            return Err(CliError::Usage("no kernels given".into()));
        }
        if let Some(bad) = self.sizes.iter().find(|&&n| n % self.width.bytes() != 0) {
            return Err(CliError::Usage(format!(
                "size {bad} is not a multiple of the word size ({} bytes)",
                self.width.bytes()
            )));
        }
        Ok(())
    }
}

/// One timed round.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Round {
    pub iterations: u64,
    pub seconds: f64,
    pub counters: Option<CounterValues>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchResult {
    pub kernel: String,
    pub width: WordWidth,
    pub size_bytes: usize,
    pub iterations: u64,
    pub seconds: f64,
    pub cycles: Option<u64>,
    pub instructions: Option<u64>,
    /// Rounds run, including the reported one.
    pub rounds: u32,
}

impl BenchResult {
    pub fn bytes_processed(&self) -> f64 {
        self.size_bytes as f64 * self.iterations as f64
    }

    pub fn bytes_per_sec(&self) -> f64 {
        self.bytes_processed() / self.seconds
    }

    pub fn cycles_per_byte(&self) -> Option<f64> {
        Some(self.cycles? as f64 / self.bytes_processed())
    }

    pub fn instr_per_byte(&self) -> Option<f64> {
        Some(self.instructions? as f64 / self.bytes_processed())
    }

    pub fn ipc(&self) -> Option<f64> {
        Some(self.instructions? as f64 / self.cycles? as f64)
    }

    pub fn has_counters(&self) -> bool {
        self.cycles.is_some() && self.instructions.is_some()
    }
}

pub const CSV_HEADER: &str = "kernel,width,size_bytes,iterations,seconds,bytes_per_sec";
pub const CSV_COUNTER_COLUMNS: &str = ",cycles_per_byte,instr_per_byte,ipc";

/// The CSV header, with the counter columns when `counters` is set.
pub fn csv_header(counters: bool) -> String {
    let mut h = CSV_HEADER.to_string();
    if counters {
        h.push_str(CSV_COUNTER_COLUMNS);
    }
    h
}

/// One CSV row. Floats are written in shortest round-trip form, so parsing
/// them back gives exactly the values the derived columns were computed from.
pub fn csv_row(r: &BenchResult, counters: bool) -> String {
    let mut row = format!(
        "{},{},{},{},{},{}",
        r.kernel,
        r.width.bits(),
        r.size_bytes,
        r.iterations,
        r.seconds,
        r.bytes_per_sec()
    );
    if counters {
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        let _ = write!(row, ",{},{},{}", opt(r.cycles_per_byte()), opt(r.instr_per_byte()), opt(r.ipc()));
    }
    row
}

/// A zeroed (or random) buffer of `size` bytes starting on a 64-byte boundary.
pub struct BenchBuffer {
    storage: Vec<u8>,
    start: usize,
    size: usize,
}

impl BenchBuffer {
    pub fn new(size: usize, random: Option<u64>) -> Self {
        let mut storage = vec![0u8; size + 64];
        let start = storage.as_ptr().align_offset(64);
        if let Some(seed) = random {
            ChaCha8Rng::seed_from_u64(seed).fill_bytes(&mut storage[start..start + size]);
        }
        BenchBuffer { storage, start, size }
    }

    pub fn bytes(&self) -> &[u8] {
        &self.storage[self.start..self.start + self.size]
    }
}

/// Iterations for the next round.
pub fn next_iterations(k: u64, seconds: f64, min_time: f64) -> u64 {
    if 2.0 * seconds < min_time {
        k.saturating_mul(2)
    } else {
        let scaled = (k as f64 * min_time / seconds.max(1e-9) * 1.05).ceil();
        (scaled as u64).max(k)
    }
}

/// Times one kernel on one buffer. `on_round` sees every round, including
/// the reported last one.
pub fn measure(
    kernel: BenchKernel,
    bytes: &[u8],
    width: WordWidth,
    min_time: Duration,
    mut counters: Option<&mut HardwareCounters>,
    on_round: &mut dyn FnMut(&Round),
) -> BenchResult {
    let min = min_time.as_secs_f64();
    let mut counts = CounterArray::new(width);
    let mut k = 1u64;
    let mut rounds = 0u32;
    let last = loop {
        if let Some(c) = counters.as_deref_mut() {
            c.start();
        }
        let start = Instant::now();
        for _ in 0..k {
            kernel.run(bytes, &mut counts);
        }
        let seconds = start.elapsed().as_secs_f64();
        let hw = counters.as_deref_mut().and_then(HardwareCounters::stop);
        rounds += 1;
        let round = Round { iterations: k, seconds, counters: hw };
        on_round(&round);
        if rounds >= 2 && seconds >= min {
            break round;
        }
        k = next_iterations(k, seconds, min);
    };
    black_box(counts.total());
    BenchResult {
        kernel: kernel.name().to_string(),
        width,
        size_bytes: bytes.len(),
        iterations: last.iterations,
        seconds: last.seconds,
        cycles: last.counters.map(|c| c.cycles),
        instructions: last.counters.map(|c| c.instructions),
        rounds,
    }
}

/// Runs every (size, kernel) pair of `cfg`, sizes outermost. `on_round` gets
/// the kernel name and size with every round.
pub fn run_benchmark(
    cfg: &BenchConfig,
    on_round: &mut dyn FnMut(&str, usize, &Round),
) -> Result<Vec<BenchResult>, CliError> {
    cfg.validate()?;
    let mut counters = if cfg.hardware_counters { HardwareCounters::open() } else { None };
    let mut results = Vec::with_capacity(cfg.sizes.len() * cfg.kernels.len());
    for &size in &cfg.sizes {
        let buffer = BenchBuffer::new(size, cfg.random_fill.then_some(cfg.seed ^ size as u64));
        for &kernel in &cfg.kernels {
            let result = measure(
                kernel,
                buffer.bytes(),
                cfg.width,
                cfg.min_time,
                counters.as_mut(),
                &mut |round| on_round(kernel.name(), size, round),
            );
            results.push(result);
        }
    }
    Ok(results)
}

/// Throughput of `kernel` relative to `baseline` at each size both were
/// measured at.
pub fn speedups(results: &[BenchResult], kernel: &str, baseline: &str) -> Vec<(usize, f64)> {
    results
        .iter()
        .filter(|r| r.kernel == kernel)
        .filter_map(|r| {
            let base = results.iter().find(|b| b.kernel == baseline && b.size_bytes == r.size_bytes)?;
            Some((r.size_bytes, r.bytes_per_sec() / base.bytes_per_sec()))
        })
        .collect()
}
