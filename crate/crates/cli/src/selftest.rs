//! Randomized comparison of every available kernel against the scalar
//! reference. Deterministic for a given seed.

use std::fmt;

use pospopcnt::{list_kernels, scalar_pospopcnt, CounterArray, Error, Kernel, WordWidth};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// How a kernel is invoked; replaceable so tests can inject faults.
pub type CountFn<'a> = dyn Fn(&Kernel, &[u8], &mut CounterArray) -> Result<(), Error> + 'a;

pub fn library_count(kernel: &Kernel, bytes: &[u8], counts: &mut CounterArray) -> Result<(), Error> {
    kernel.count(bytes, counts)
}

#[derive(Clone, Debug)]
pub struct SelftestConfig {
    pub seed: u64,
    pub iterations: u64,
    pub kernels: Vec<Kernel>,
}

impl SelftestConfig {
    /// All available kernels.
    pub fn new(seed: u64, iterations: u64) -> Self {
        let kernels = list_kernels().filter(|(_, a)| *a).map(|(k, _)| k).collect();
        SelftestConfig { seed, iterations, kernels }
    }
}

/// A smallest failing case found by shrinking the original one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub kernel: &'static str,
    pub width: WordWidth,
    pub length: usize,
    pub offset: usize,
    pub seed: u64,
    pub iteration: u64,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FAIL kernel={} width={} length={} offset={} seed={} iteration={}",
            self.kernel,
            self.width.bits(),
            self.length,
            self.offset,
            self.seed,
            self.iteration
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub seed: u64,
    pub cases: u64,
    pub kernels: Vec<&'static str>,
    pub failures: Vec<Failure>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed {} kernels {}", self.seed, self.kernels.join(","))?;
        for failure in &self.failures {
            writeln!(f, "{failure}")?;
        }
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status}: {} cases, {} failures", self.cases, self.failures.len())
    }
}

struct Case {
    width: WordWidth,
    offset: usize,
    data: Vec<u8>,
}

fn generate(rng: &mut ChaCha8Rng) -> Case {
    let width = WordWidth::ALL[rng.random_range(0..4)];
    let words = match rng.random_range(0..10) {
        0 => rng.random_range(0..=(1 << 20) / width.bytes()),
        1..=3 => rng.random_range(0..=16 * 1024 / width.bytes()),
        _ => rng.random_range(0..=4096 / width.bytes()),
    };
    let mut data = vec![0u8; words * width.bytes()];
    match rng.random_range(0..8) {
        0 => data.fill(0xff),
        1 => {
            for b in &mut data {
                *b = if rng.random_ratio(1, 16) { 1 << rng.random_range(0..8) } else { 0 };
            }
        }
        _ => rng.fill_bytes(&mut data),
    }
    Case { width, offset: rng.random_range(0..64), data }
}

fn placed(data: &[u8], offset: usize) -> (Vec<u8>, usize) {
    let mut storage = vec![0u8; data.len() + 128];
    let start = storage.as_ptr().align_offset(64) + offset;
    storage[start..start + data.len()].copy_from_slice(data);
    (storage, start)
}

fn fails(count: &CountFn<'_>, kernel: &Kernel, width: WordWidth, data: &[u8], offset: usize) -> bool {
    let (storage, start) = placed(data, offset);
    let bytes = &storage[start..start + data.len()];
    let mut want = CounterArray::new(width);
    scalar_pospopcnt(bytes, &mut want).expect("generated input is word-complete");
    let mut got = CounterArray::new(width);
    !matches!(count(kernel, bytes, &mut got), Ok(())) || got != want
}

// Shrinks length by halving, then by trimming from either end one word at
// a time, then tries offset 0.
fn minimize(count: &CountFn<'_>, kernel: &Kernel, case: &Case) -> (usize, usize) {
    let wb = case.width.bytes();
    let mut data = &case.data[..];
    let mut offset = case.offset;
    if fails(count, kernel, case.width, data, 0) {
        offset = 0;
    }
    loop {
        let half = data.len() / 2 / wb * wb;
        if half > 0 && fails(count, kernel, case.width, &data[..half], offset) {
            data = &data[..half];
        } else if half > 0 && fails(count, kernel, case.width, &data[data.len() - half..], offset) {
            data = &data[data.len() - half..];
        } else {
            break;
        }
    }
    for _ in 0..256 {
        if data.len() >= wb && fails(count, kernel, case.width, &data[..data.len() - wb], offset) {
            data = &data[..data.len() - wb];
        } else if data.len() >= wb && fails(count, kernel, case.width, &data[wb..], offset) {
            data = &data[wb..];
        } else {
            break;
        }
    }
    (data.len(), offset)
}

/// Runs `cfg.iterations` random cases on every kernel of `cfg`.
pub fn run_selftest(cfg: &SelftestConfig, count: &CountFn<'_>) -> Report {
    let mut failures = Vec::new();
    for iteration in 0..cfg.iterations {
        // one stream per case, so a failure can be replayed on its own
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(iteration);
        let case = generate(&mut rng);
        for kernel in &cfg.kernels {
            if fails(count, kernel, case.width, &case.data, case.offset) {
                let (length, offset) = minimize(count, kernel, &case);
                failures.push(Failure {
                    kernel: kernel.name(),
                    width: case.width,
                    length,
                    offset,
                    seed: cfg.seed,
                    iteration,
                });
            }
        }
    }
    Report {
        seed: cfg.seed,
        cases: cfg.iterations,
        kernels: cfg.kernels.iter().map(Kernel::name).collect(),
        failures,
    }
}
