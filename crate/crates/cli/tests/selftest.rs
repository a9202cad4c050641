use pospopcnt::{select_kernel, CounterArray, Error, Kernel};
use pospopcnt_cli::selftest::{library_count, run_selftest, SelftestConfig};

#[test]
fn portable_seed_1_passes() {
    let cfg = SelftestConfig {
        seed: 1,
        iterations: 1000,
        kernels: vec![select_kernel(Some("portable")).unwrap()],
    };
    let report = run_selftest(&cfg, &library_count);
    assert!(report.passed(), "{report}");
    assert_eq!(report.cases, 1000);
}

#[test]
fn all_kernels_pass() {
    let report = run_selftest(&SelftestConfig::new(7, 150), &library_count);
    assert!(report.passed(), "{report}");
}

#[test]
fn same_seed_same_report() {
    let cfg = SelftestConfig::new(99, 40);
    assert_eq!(run_selftest(&cfg, &library_count), run_selftest(&cfg, &library_count));
}

// Drops bit 3 of the 41st word whenever the input is at least 41 words long.
fn faulty(kernel: &Kernel, bytes: &[u8], counts: &mut CounterArray) -> Result<(), Error> {
    kernel.count(bytes, counts)?;
    let wb = counts.width().bytes();
    if bytes.len() >= 41 * wb && bytes[40 * wb] & 0x08 != 0 {
        counts.as_mut_slice()[3] -= 1;
    }
    Ok(())
}

#[test]
fn injected_fault_is_reported_minimized() {
    let cfg = SelftestConfig {
        seed: 3,
        iterations: 200,
        kernels: vec![select_kernel(Some("portable")).unwrap()],
    };
    let report = run_selftest(&cfg, &faulty);
    assert!(!report.passed());
    for f in &report.failures {
        // the smallest failing input is the first 41 words
        assert_eq!(f.length, 41 * f.width.bytes(), "{f}");
        assert_eq!(f.offset, 0);
        assert_eq!(f.seed, 3);
        assert_eq!(f.kernel, "portable");
    }
    let text = report.to_string();
    assert!(text.contains("FAIL kernel=portable"));
    assert!(text.ends_with(&format!("{} failures", report.failures.len())));
    assert_eq!(run_selftest(&cfg, &faulty), report);
}
