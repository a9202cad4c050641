use std::io::{self, Read, Write};

use pospopcnt::{CounterArray, Error, Kernel, WordWidth};

use crate::CliError;

const CHUNK: usize = 1 << 20;

/// Counts everything `reader` yields, one chunk at a time. Words may straddle
/// reads; only a partial word at end of input is an error.
pub fn count_reader<R: Read>(
    mut reader: R,
    width: WordWidth,
    kernel: &Kernel,
) -> Result<CounterArray, CliError> {
    let mut counts = CounterArray::new(width);
    let mut buf = vec![0u8; CHUNK];
    let mut filled = 0;
    let mut total = 0usize;
    loop {
        let n = match reader.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
            Err(e) => return Err(e.into()),
        };
        filled += n;
        total += n;
        if filled == buf.len() {
            kernel.count(&buf, &mut counts)?;
            filled = 0;
        }
    }
    let whole = filled / width.bytes() * width.bytes();
    if whole != filled {
        return Err(Error::WordIncomplete { len: total, word_bytes: width.bytes() }.into());
    }
    kernel.count(&buf[..whole], &mut counts)?;
    Ok(counts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Lines,
    Csv,
}

pub fn write_counts<W: Write>(mut out: W, counts: &CounterArray, format: Format) -> io::Result<()> {
    match format {
        Format::Lines => {
            for n in counts.as_slice() {
                writeln!(out, "{n}")?;
            }
        }
        Format::Csv => {
            let row: Vec<String> = counts.as_slice().iter().map(u64::to_string).collect();
            writeln!(out, "{}", row.join(","))?;
        }
    }
    Ok(())
}
