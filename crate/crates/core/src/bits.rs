//! Fixed-width bitstrings used for questions, answers and plaintexts.
//!
//! Bit 0 is the most significant bit of `value`, matching the qubit ordering
//! used for amplitude indices.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

pub const MAX_BITS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bits {
    len: usize,
    value: u64,
}

impl Bits {
    pub fn new(len: usize, value: u64) -> Result<Self> {
        if len > MAX_BITS {
            return Err(Error::ResourceLimit(format!("bitstring of length {len}")));
        }
        if len < MAX_BITS && value >> len != 0 {
            return Err(Error::InvalidArgument(format!(
                "value {value} does not fit in {len} bits"
            )));
        }
        Ok(Self { len, value })
    }

    pub fn zero(len: usize) -> Self {
        Self { len, value: 0 }
    }

    pub fn empty() -> Self {
        Self::zero(0)
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self> {
        let mut value = 0u64;
        for &b in bits {
            value = (value << 1) | u64::from(b);
        }
        Self::new(bits.len(), value)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// Bit at position `i`, counted from the most significant end.
    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.value >> (self.len - 1 - i)) & 1 == 1
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.bit(i)).collect()
    }

    pub fn concat(&self, other: &Bits) -> Result<Bits> {
        let len = self.len + other.len;
        if len > MAX_BITS {
            return Err(Error::ResourceLimit(format!("bitstring of length {len}")));
        }
        let high = if other.len == MAX_BITS { 0 } else { self.value << other.len };
        Bits::new(len, high | other.value)
    }

    /// Sub-string of `len` bits starting at `start`.
    pub fn slice(&self, start: usize, len: usize) -> Result<Bits> {
        if start + len > self.len {
            return Err(Error::InvalidArgument(format!(
                "slice {start}..{} of a {}-bit string",
                start + len,
                self.len
            )));
        }
        if len == 0 {
            return Ok(Bits::empty());
        }
        let shifted = self.value >> (self.len - start - len);
        let mask = if len == MAX_BITS { u64::MAX } else { (1u64 << len) - 1 };
        Bits::new(len, shifted & mask)
    }

    pub fn parity(&self) -> bool {
        self.value.count_ones() % 2 == 1
    }

    /// Length-prefixed little-endian encoding.
    pub fn to_bytes(&self) -> [u8; 9] {
        let mut out = [0u8; 9];
        out[0] = self.len as u8;
        out[1..].copy_from_slice(&self.value.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Bits> {
        if bytes.len() != 9 {
            return Err(Error::MalformedCiphertext(format!(
                "expected 9 payload bytes, found {}",
                bytes.len()
            )));
        }
        let mut v = [0u8; 8];
        v.copy_from_slice(&bytes[1..]);
        Bits::new(bytes[0] as usize, u64::from_le_bytes(v))
            .map_err(|e| Error::MalformedCiphertext(e.to_string()))
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.bit(i)))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn msb_first_ordering() {
        let b = Bits::from_bools(&[true, false, false]).unwrap();
        assert_eq!(b.value(), 4);
        assert!(b.bit(0));
        assert_eq!(b.to_string(), "100");
    }

    #[test]
    fn concat_and_slice_roundtrip() {
        let a = Bits::new(3, 0b101).unwrap();
        let b = Bits::new(2, 0b01).unwrap();
        let ab = a.concat(&b).unwrap();
        assert_eq!(ab.len(), 5);
        assert_eq!(ab.slice(0, 3).unwrap(), a);
        assert_eq!(ab.slice(3, 2).unwrap(), b);
    }

    #[test]
    fn rejects_overflowing_value() {
        assert!(Bits::new(2, 4).is_err());
    }

    #[test]
    fn bytes_roundtrip() {
        let a = Bits::new(13, 0x1abc).unwrap();
        assert_eq!(Bits::from_bytes(&a.to_bytes()).unwrap(), a);
    }
}
