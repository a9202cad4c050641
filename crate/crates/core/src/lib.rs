//! Positional population counts.
//!
//! For an array of `w`-bit little-endian words, counter `j` receives the
//! number of words with bit `j` set. Inputs are reduced with carry-save adder
//! networks into 4-bit counts per bit position; each 16 accumulated is passed
//! on as a weight-16 plane and added to 16-bit counters with a bit-parallel
//! shift-and-mask cascade, then flushed into 64-bit counters before they can
//! overflow.
//!
//! ```
//! use pospopcnt::{pospopcnt, CounterArray, WordWidth};
//!
//! let words: Vec<u8> = [0x8001u16; 1000].iter().flat_map(|w| w.to_le_bytes()).collect();
//! let mut counts = CounterArray::new(WordWidth::W16);
//! pospopcnt(&words, &mut counts).unwrap();
//! assert_eq!(counts[0], 1000);
//! assert_eq!(counts[15], 1000);
//! assert_eq!(counts.total(), 2000);
//! ```

#![no_std]

#[cfg(feature = "std")]
extern crate std;

pub mod accum;
pub mod csa;
pub mod edge;
mod error;
#[cfg(feature = "std")]
pub mod instrumented;
pub mod kernel;
mod kernels;
pub mod model;
pub mod pipeline;
pub mod vector;

pub use crate::error::Error;
pub use crate::kernel::{default_kernel, kernels, list_kernels, select_kernel, Kernel, KernelId};
pub use crate::model::{scalar_pospopcnt, total_popcount_of, CounterArray, InputView, WordWidth};

/// Adds the positional population count of `bytes` to `counts` using
/// [`default_kernel`].
pub fn pospopcnt(bytes: &[u8], counts: &mut CounterArray) -> Result<(), Error> {
    default_kernel()?.count(bytes, counts)
}
