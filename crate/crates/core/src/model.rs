//! Word widths, counter arrays and the naive reference count.

use core::ops::Index;

use crate::Error;

/// Largest supported word width in bits. Every kernel counts internally
/// modulo this width and folds down to the requested width on flush.
pub const MAX_WIDTH: usize = 64;

/// Width `w` of the words whose bit positions are counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WordWidth {
    W8 = 8,
    W16 = 16,
    W32 = 32,
    W64 = 64,
}

impl WordWidth {
    pub const ALL: [WordWidth; 4] = [WordWidth::W8, WordWidth::W16, WordWidth::W32, WordWidth::W64];

    #[inline]
    pub const fn bits(self) -> usize {
        self as usize
    }

    #[inline]
    pub const fn bytes(self) -> usize {
        self as usize / 8
    }

    pub const fn from_bits(bits: u32) -> Option<Self> {
        match bits {
            8 => Some(WordWidth::W8),
            16 => Some(WordWidth::W16),
            32 => Some(WordWidth::W32),
            64 => Some(WordWidth::W64),
            _ => None,
        }
    }
}

impl core::fmt::Display for WordWidth {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.bits())
    }
}

/// A byte buffer checked to hold a whole number of `w`-bit little-endian words.
#[derive(Clone, Copy, Debug)]
pub struct InputView<'a> {
    bytes: &'a [u8],
    width: WordWidth,
}

impl<'a> InputView<'a> {
    pub fn new(bytes: &'a [u8], width: WordWidth) -> Result<Self, Error> {
        if !bytes.len().is_multiple_of(width.bytes()) {
            return Err(Error::WordIncomplete { len: bytes.len(), word_bytes: width.bytes() });
        }
        Ok(InputView { bytes, width })
    }

    #[inline]
    pub fn bytes(&self) -> &'a [u8] {
        self.bytes
    }

    #[inline]
    pub fn width(&self) -> WordWidth {
        self.width
    }

    /// Words in input order, zero-extended to 64 bits.
    pub fn words(&self) -> impl Iterator<Item = u64> + 'a {
        self.bytes.chunks_exact(self.width.bytes()).map(|chunk| {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            u64::from_le_bytes(buf)
        })
    }
}

/// The `w` output counters, one per bit position. Counts are only ever
/// added to; clearing is up to the caller.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterArray {
    width: WordWidth,
    counts: [u64; MAX_WIDTH],
}

impl CounterArray {
    pub const fn new(width: WordWidth) -> Self {
        CounterArray { width, counts: [0; MAX_WIDTH] }
    }

    #[inline]
    pub fn width(&self) -> WordWidth {
        self.width
    }

    #[inline]
    pub fn as_slice(&self) -> &[u64] {
        &self.counts[..self.width.bits()]
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [u64] {
        &mut self.counts[..self.width.bits()]
    }

    pub fn clear(&mut self) {
        self.counts = [0; MAX_WIDTH];
    }

    /// Sum over all positions, i.e. the plain population count of
    /// everything counted so far.
    pub fn total(&self) -> u64 {
        self.as_slice().iter().sum()
    }
}

impl Index<usize> for CounterArray {
    type Output = u64;

    fn index(&self, bit: usize) -> &u64 {
        &self.as_slice()[bit]
    }
}

/// Sum of all counters in `counts`.
pub fn total_popcount_of(counts: &CounterArray) -> u64 {
    counts.total()
}

/// Reference positional population count: visit every bit of every word.
pub fn scalar_pospopcnt(bytes: &[u8], counts: &mut CounterArray) -> Result<(), Error> {
    let input = InputView::new(bytes, counts.width())?;
    let out = counts.as_mut_slice();
    for word in input.words() {
        for (j, count) in out.iter_mut().enumerate() {
            *count += word >> j & 1;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_ones_word() {
        let mut c = CounterArray::new(WordWidth::W16);
        scalar_pospopcnt(&[0xff, 0xff], &mut c).unwrap();
        assert!(c.as_slice().iter().all(|&x| x == 1));
        assert_eq!(total_popcount_of(&c), 16);
    }

    #[test]
    fn empty_input_leaves_counts() {
        for w in WordWidth::ALL {
            let mut c = CounterArray::new(w);
            c.as_mut_slice()[0] = 7;
            let before = c.clone();
            scalar_pospopcnt(&[], &mut c).unwrap();
            assert_eq!(c, before);
        }
    }

    #[test]
    fn zero_counts_total() {
        assert_eq!(total_popcount_of(&CounterArray::new(WordWidth::W64)), 0);
    }

    #[test]
    fn rejects_partial_words() {
        let mut c = CounterArray::new(WordWidth::W32);
        assert_eq!(
            scalar_pospopcnt(&[1, 2, 3], &mut c),
            Err(Error::WordIncomplete { len: 3, word_bytes: 4 })
        );
        assert_eq!(c.total(), 0);
    }

    #[test]
    fn little_endian_bit_numbering() {
        let mut c = CounterArray::new(WordWidth::W16);
        scalar_pospopcnt(&[0x01, 0x80], &mut c).unwrap();
        assert_eq!(c[0], 1);
        assert_eq!(c[15], 1);
        assert_eq!(c.total(), 2);
    }

    #[test]
    fn width_parsing() {
        assert_eq!(WordWidth::from_bits(32), Some(WordWidth::W32));
        assert_eq!(WordWidth::from_bits(12), None);
        assert_eq!(WordWidth::W64.bytes(), 8);
    }
}
