use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use pospopcnt::{list_kernels, select_kernel, WordWidth};
use pospopcnt_cli::bench::{self, BenchConfig, BenchKernel};
use pospopcnt_cli::count::{count_reader, write_counts, Format};
use pospopcnt_cli::selftest::{library_count, run_selftest, SelftestConfig};
use pospopcnt_cli::CliError;

#[derive(Parser)]
#[command(name = "pospopcnt", version, about = "Positional population counts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count bit positions over a file or standard input.
    Count {
        #[arg(long, default_value_t = 16, value_parser = parse_width)]
        width: u32,
        /// Kernel name; defaults to POSPOPCNT_KERNEL or the widest available.
        #[arg(long)]
        kernel: Option<String>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Lines)]
        format: OutputFormat,
        /// Input file; standard input when absent or `-`
        file: Option<PathBuf>,
    },
    /// Measure throughput and print CSV.
    Bench {
        /// Comma-separated byte sizes; K, M and G suffixes are powers of 1024.
        #[arg(long, value_delimiter = ',', value_parser = parse_size, conflicts_with = "grid")]
        sizes: Vec<usize>,
        /// The full size grid (the default when --sizes is absent).
        #[arg(long)]
        grid: bool,
        /// Comma-separated kernels; `scalar` and `roofline` are references.
        #[arg(long, value_delimiter = ',')]
        kernels: Vec<String>,
        #[arg(long, default_value_t = 16, value_parser = parse_width)]
        width: u32,
        /// Minimum duration of the reported round, in seconds.
        #[arg(long, default_value_t = 2.0)]
        min_time: f64,
        /// Fill buffers with random bytes instead of zeros.
        #[arg(long)]
        random_fill: bool,
        /// Write CSV here instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Report every round on standard error.
        #[arg(long, short)]
        verbose: bool,
        /// Pin the process to this CPU.
        #[arg(long)]
        pin: Option<usize>,
        /// Skip cycle and instruction counters.
        #[arg(long)]
        no_counters: bool,
    },
    /// Compare every available kernel with the scalar reference on random input.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        iterations: u64,
    },
    /// List compiled-in kernels and whether this CPU supports them.
    Kernels,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Lines,
    Csv,
}

fn parse_width(s: &str) -> Result<u32, String> {
    let bits: u32 = s.parse().map_err(|e| format!("{e}"))?;
    WordWidth::from_bits(bits).map(|_| bits).ok_or_else(|| "must be 8, 16, 32 or 64".into())
}

fn parse_size(s: &str) -> Result<usize, String> {
    let (digits, shift) = match s.as_bytes().last() {
        Some(b'k' | b'K') => (&s[..s.len() - 1], 10),
        Some(b'm' | b'M') => (&s[..s.len() - 1], 20),
        Some(b'g' | b'G') => (&s[..s.len() - 1], 30),
        _ => (s, 0),
    };
    let n: usize = digits.parse().map_err(|e| format!("{e}"))?;
    n.checked_mul(1 << shift).ok_or_else(|| "size too large".into())
}

fn width_of(bits: u32) -> WordWidth {
    WordWidth::from_bits(bits).expect("validated by the parser")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::SelftestFailed) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Count { width, kernel, format, file } => {
            let kernel = match kernel {
                Some(name) => select_kernel(Some(&name))?,
                None => pospopcnt::default_kernel()?,
            };
            let width = width_of(width);
            let counts = match file.filter(|p| p.as_os_str() != "-") {
                Some(path) => count_reader(File::open(path)?, width, &kernel)?,
                None => count_reader(io::stdin().lock(), width, &kernel)?,
            };
            let format = match format {
                OutputFormat::Lines => Format::Lines,
                OutputFormat::Csv => Format::Csv,
            };
            write_counts(io::stdout().lock(), &counts, format)?;
            Ok(())
        }
        Command::Bench { sizes, grid: _, kernels, width, min_time, random_fill, csv, verbose, pin, no_counters } => {
            let width = width_of(width);
            if !(min_time > 0.0 && min_time.is_finite()) {
                return Err(CliError::Usage("--min-time must be a positive number of seconds".into()));
            }
            let kernels = if kernels.is_empty() {
                BenchKernel::defaults()
            } else {
                kernels.iter().map(|k| BenchKernel::parse(k)).collect::<Result<_, _>>()?
            };
            let cfg = BenchConfig {
                sizes: if sizes.is_empty() { bench::default_grid_for(width) } else { sizes },
                kernels,
                width,
                min_time: Duration::from_secs_f64(min_time),
                random_fill,
                seed: 0x5eed,
                hardware_counters: !no_counters,
            };
            cfg.validate()?;
            if let Some(cpu) = pin {
                pin_to_cpu(cpu)?;
            }
            bench_command(&cfg, csv, verbose)
        }
        Command::Selftest { seed, iterations } => {
            let report = run_selftest(&SelftestConfig::new(seed, iterations), &library_count);
            println!("{report}");
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::SelftestFailed)
            }
        }
        Command::Kernels => {
            let default = pospopcnt::default_kernel().ok();
            for (k, available) in list_kernels() {
                let mark = if Some(k) == default { " (default)" } else { "" };
                let status = if available { "available" } else { "unavailable" };
                println!("{:<9} r={:<3} block={:<5} {status}{mark}", k.name(), k.vector_bits(), k.block_bytes());
            }
            Ok(())
        }
    }
}

fn bench_command(cfg: &BenchConfig, csv: Option<PathBuf>, verbose: bool) -> Result<(), CliError> {
    let mut on_round = |kernel: &str, size: usize, round: &bench::Round| {
        if verbose {
            eprintln!(
                "{kernel} size={size} k={} t={:.6}s {:.3} GB/s",
                round.iterations,
                round.seconds,
                size as f64 * round.iterations as f64 / round.seconds / 1e9
            );
        }
    };
    let results = bench::run_benchmark(cfg, &mut on_round)?;
    let counters = !results.is_empty() && results.iter().all(|r| r.has_counters());

    let mut out: Box<dyn Write> = match &csv {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    };
    writeln!(out, "{}", bench::csv_header(counters))?;
    for r in &results {
        writeln!(out, "{}", bench::csv_row(r, counters))?;
    }
    out.flush()?;
    drop(out);

    if cfg.kernels.contains(&BenchKernel::Scalar) {
        for k in cfg.kernels.iter().filter(|k| **k != BenchKernel::Scalar) {
            for (size, ratio) in bench::speedups(&results, k.name(), "scalar") {
                eprintln!("speedup {} vs scalar at {size} bytes: {ratio:.2}x", k.name());
            }
        }
    }
    Ok(())
}

#[cfg(target_os = "linux")]
fn pin_to_cpu(cpu: usize) -> Result<(), CliError> {
    // SAFETY: cpu_set_t is plain data; CPU_SET bounds-checks against its size.
    unsafe {
        let mut set: libc::cpu_set_t = std::mem::zeroed();
        if cpu >= 8 * std::mem::size_of::<libc::cpu_set_t>() {
            return Err(CliError::Usage(format!("no such CPU: {cpu}")));
        }
        libc::CPU_SET(cpu, &mut set);
        if libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &set) != 0 {
            return Err(io::Error::last_os_error().into());
        }
    }
    Ok(())
}

#[cfg(not(target_os = "linux"))]
fn pin_to_cpu(_cpu: usize) -> Result<(), CliError> {
    Err(CliError::Usage("--pin is only supported on Linux".into()))
}
