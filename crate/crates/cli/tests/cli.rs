use std::io::Write;
use std::process::{Command, Output, Stdio};

const BIN: &str = env!("CARGO_BIN_EXE_pospopcnt");

fn run(args: &[&str], stdin: &[u8], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    cmd.env_remove("POSPOPCNT_KERNEL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().unwrap();
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp_file(name: &str, contents: &[u8]) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("pospopcnt-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn count_all_ones_word() {
    let path = temp_file("ffff.bin", &[0xff, 0xff]);
    let o = run(&["count", "--width", "16", path.to_str().unwrap()], &[], &[]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1\n".repeat(16));
}

#[test]
fn count_empty_stdin() {
    let o = run(&["count", "--width", "8"], &[], &[]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0\n".repeat(8));
}

#[test]
fn dash_reads_stdin() {
    let o = run(&["count", "--width", "8", "--format", "csv", "-"], &[0x01, 0x80], &[]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1,0,0,0,0,0,0,1\n");
}

#[test]
fn count_random_file_matches_oracle() {
    let mut x = 0x9e37_79b9_7f4a_7c15u64;
    let data: Vec<u8> = (0..3 << 20)
        .map(|_| {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            x as u8
        })
        .collect();
    let path = temp_file("random.bin", &data);
    for width in [8usize, 16, 32, 64] {
        let mut want = vec![0u64; width];
        for word in data.chunks(width / 8) {
            for (j, n) in want.iter_mut().enumerate() {
                *n += u64::from(word[j / 8] >> (j % 8) & 1);
            }
        }
        let o = run(&["count", "--width", &width.to_string(), "--format", "csv", path.to_str().unwrap()], &[], &[]);
        assert!(o.status.success());
        let got: Vec<u64> = stdout(&o).trim().split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(got, want, "w={width}");
    }
}

#[test]
fn count_from_stdin_in_pieces() {
    let data: Vec<u8> = (0..10_000u32).map(|i| (i * 7) as u8).collect();
    let plain = run(&["count", "--width", "32", "--kernel", "portable"], &data, &[]);
    let widest = run(&["count", "--width", "32"], &data, &[]);
    assert!(plain.status.success());
    assert_eq!(stdout(&plain), stdout(&widest));
}

#[test]
fn input_errors_exit_2() {
    let o = run(&["count", "--width", "32"], &[1, 2, 3], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("multiple of the word size"));
    let o = run(&["count", "--width", "12"], &[], &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["count", "--kernel", "no-such"], &[], &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["frobnicate"], &[], &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["bench", "--sizes", "3", "--width", "16"], &[], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_file_exits_1() {
    let o = run(&["count", "/nonexistent/pospopcnt-input"], &[], &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn environment_override() {
    let o = run(&["count", "--width", "8"], &[0x81], &[("POSPOPCNT_KERNEL", "portable")]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1\n0\n0\n0\n0\n0\n0\n1\n");
    let o = run(&["kernels"], &[], &[("POSPOPCNT_KERNEL", "portable")]);
    assert!(stdout(&o).lines().any(|l| l.starts_with("portable") && l.ends_with("(default)")));
    let o = run(&["count"], &[], &[("POSPOPCNT_KERNEL", "no-such")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn kernels_lists_portable_first() {
    let o = run(&["kernels"], &[], &[]);
    assert!(o.status.success());
    let out = stdout(&o);
    let first = out.lines().next().unwrap();
    assert!(first.starts_with("portable") && first.contains("available"));
}

#[test]
fn selftest_passes_and_is_deterministic() {
    let a = run(&["selftest", "--seed", "1", "--iterations", "60"], &[], &[]);
    let b = run(&["selftest", "--seed", "1", "--iterations", "60"], &[], &[]);
    assert!(a.status.success(), "{}", stdout(&a));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("PASS: 60 cases, 0 failures"));
}

#[test]
fn bench_writes_csv() {
    let dir = std::env::temp_dir().join(format!("pospopcnt-bench-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("out.csv");
    let o = run(
        &[
            "bench", "--sizes", "64,1K", "--kernels", "scalar,portable,roofline", "--min-time", "0.01",
            "--csv", csv.to_str().unwrap(), "--verbose",
        ],
        &[],
        &[],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("kernel,width,size_bytes,iterations,seconds,bytes_per_sec"));
    assert_eq!(lines.count(), 6);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("speedup portable vs scalar at 1024 bytes"));
    assert!(err.lines().filter(|l| l.starts_with("portable size=64 k=")).count() >= 2);
}
