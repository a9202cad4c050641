use core::fmt;

use crate::kernel::KernelId;

/// Errors reported by the counting entry points and kernel selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Error {
    /// The input length is not a multiple of the word size.
    WordIncomplete { len: usize, word_bytes: usize },
    /// No compiled-in kernel has the requested name.
    UnknownKernel,
    /// The kernel exists but the running CPU lacks the instructions it needs.
    KernelUnavailable(KernelId),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Error::WordIncomplete { len, word_bytes } => write!(
                f,
                "input length {len} is not a multiple of the word size ({word_bytes} bytes)"
            ),
            Error::UnknownKernel => f.write_str("unknown kernel name"),
            Error::KernelUnavailable(id) => {
                write!(f, "kernel `{}` is not supported by this CPU", id.name())
            }
        }
    }
}

impl core::error::Error for Error {}
