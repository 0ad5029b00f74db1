use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

/// A computational-basis outcome on `n` qubits.
///
/// Qubit 0 is the most significant bit, so `Display` prints qubit 0 first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    value: u64,
    n: usize,
}

impl BitString {
    pub fn new(value: u64, n: usize) -> Result<Self> {
        if n > 63 || (n < 64 && value >> n != 0) {
            return invalid(format!("value {value} does not fit in {n} bits"));
        }
        Ok(Self { value, n })
    }

    pub(crate) fn from_index(value: usize, n: usize) -> Self {
        Self {
            value: value as u64,
            n,
        }
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut value = 0u64;
        for &b in bits {
            if b > 1 {
                return invalid(format!("bit value {b} is not 0 or 1"));
            }
            value = (value << 1) | b as u64;
        }
        Self::new(value, bits.len())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Integer value with qubit 0 as the MSB; doubles as the index into
    /// probability vectors.
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn index(&self) -> usize {
        self.value as usize
    }

    pub fn bit(&self, qubit: usize) -> u8 {
        assert!(qubit < self.n, "qubit {qubit} out of range for {} bits", self.n);
        ((self.value >> (self.n - 1 - qubit)) & 1) as u8
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.n).map(|q| self.bit(q)).collect()
    }

    /// XOR of all bits.
    pub fn parity(&self) -> u8 {
        (self.value.count_ones() & 1) as u8
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", self.bit(q))?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits: Vec<u8> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => invalid(format!("'{other}' is not a bit")),
            })
            .collect::<Result<_>>()?;
        Self::from_bits(&bits)
    }
}

/// Parity of an integer index, used for probability vectors.
pub fn index_parity(index: usize) -> u8 {
    (index.count_ones() & 1) as u8
}
