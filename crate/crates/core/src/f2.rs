//! Vectors over F2 of length 2g, written as `(a; b)` with `a, b ∈ F2^g`.

use std::fmt;
use std::ops::Add;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct F2Vec {
    bits: Vec<bool>,
}

impl F2Vec {
    pub fn zeros(len: usize) -> Self {
        F2Vec {
            bits: vec![false; len],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        F2Vec { bits }
    }

    /// Unit vector with a single 1 at `index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.bits[index] = true;
        v
    }

    /// Low `len` bits of `mask`, bit 0 first.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        F2Vec {
            bits: (0..len).map(|k| mask >> k & 1 == 1).collect(),
        }
    }

    pub fn to_mask(&self) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .fold(0u64, |m, (k, &b)| m | (u64::from(b) << k))
    }

    /// Concatenate `a` and `b` into `(a; b)`.
    pub fn join(a: &F2Vec, b: &F2Vec) -> Self {
        let mut bits = a.bits.clone();
        bits.extend_from_slice(&b.bits);
        F2Vec { bits }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::BadBitstring(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(F2Vec { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, k: usize) -> bool {
        self.bits[k]
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|b| !b)
    }

    pub fn expect_len(&self, len: usize) -> Result<()> {
        if self.len() == len {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: len,
                got: self.len(),
            })
        }
    }

    pub fn try_add(&self, other: &F2Vec) -> Result<F2Vec> {
        other.expect_len(self.len())?;
        Ok(F2Vec {
            bits: self.bits.iter().zip(&other.bits).map(|(x, y)| x ^ y).collect(),
        })
    }

    /// Split `(a; b)` into its two halves.
    pub fn halves(&self) -> (&[bool], &[bool]) {
        self.bits.split_at(self.len() / 2)
    }
}

impl Add<&F2Vec> for &F2Vec {
    type Output = F2Vec;
    fn add(self, rhs: &F2Vec) -> F2Vec {
        self.try_add(rhs).expect("F2 vectors of different lengths")
    }
}

impl fmt::Display for F2Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for F2Vec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for F2Vec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        F2Vec::parse(&s).map_err(D::Error::custom)
    }
}

/// Intersection pairing `Σ a_i b'_i + a'_i b_i` on packed masks of `(a; b)`.
pub fn pairing_mask(g: usize, x: u64, y: u64) -> bool {
    let low = (1u64 << g) - 1;
    let (a, b) = (x & low, x >> g);
    let (a2, b2) = (y & low, y >> g);
    ((a & b2) ^ (a2 & b)).count_ones() % 2 == 1
}

/// Cup product of two classes `(a; b)`, `(a'; b')` in F2^{2g}:
/// `Σ a_i b'_i + a'_i b_i`.
pub fn cup(x: &F2Vec, y: &F2Vec) -> Result<bool> {
    y.expect_len(x.len())?;
    if !x.len().is_multiple_of(2) {
        return Err(Error::LengthMismatch {
            expected: x.len() + 1,
            got: x.len(),
        });
    }
    let (a, b) = x.halves();
    let (a2, b2) = y.halves();
    Ok((0..a.len()).fold(false, |acc, i| acc ^ (a[i] & b2[i]) ^ (a2[i] & b[i])))
}

/// Serde adapter writing an F2 scalar as the integer 0 or 1.
pub mod bit {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(u8::from(*b))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(false),
            1 => Ok(true),
            n => Err(D::Error::custom(format!("F2 scalar must be 0 or 1, got {n}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitstring_roundtrip() {
        let v = F2Vec::parse("0110").unwrap();
        assert_eq!(v.to_string(), "0110");
        assert_eq!(F2Vec::from_mask(4, v.to_mask()), v);
        assert!(F2Vec::parse("01x").is_err());
    }

    #[test]
    fn add_is_xor() {
        let a = F2Vec::parse("1100").unwrap();
        let b = F2Vec::parse("1010").unwrap();
        assert_eq!((&a + &b).to_string(), "0110");
        assert!(a.try_add(&F2Vec::zeros(3)).is_err());
    }
}
