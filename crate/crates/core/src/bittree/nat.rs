//! Bit strings, the prefix-one bijection to naturals and greedy power
//! decompositions on arbitrary-precision integers.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Arbitrary-precision natural number.
pub type Nat = BigUint;

/// An ordered sequence of bits, most significant first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// Serializes bytes MSB-first.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        let mut bits = Vec::with_capacity(bytes.len() * 8);
        for &byte in bytes {
            for shift in (0..8).rev() {
                bits.push(byte >> shift & 1 == 1);
            }
        }
        Self(bits)
    }

    /// Packs the bits back into bytes; `None` unless the length is a multiple of 8.
    pub fn to_bytes(&self) -> Option<Vec<u8>> {
        if self.0.len() % 8 != 0 {
            return None;
        }
        Some(
            self.0
                .chunks(8)
                .map(|chunk| chunk.iter().fold(0u8, |acc, &b| acc << 1 | b as u8))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Fraction of set bits; 0 for the empty string.
    pub fn ones_fraction(&self) -> f64 {
        if self.0.is_empty() {
            0.0
        } else {
            self.count_ones() as f64 / self.0.len() as f64
        }
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> BitString {
        Self(self.0[range].to_vec())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(invalid(format!("unexpected character {other:?} in bit string"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> Self {
        Self(bits)
    }
}

/// Interprets `1 ‖ bits` as a binary number, MSB first.
///
/// The leading one keeps strings that differ only in leading zeros apart,
/// so the map is injective over all bit strings including the empty one.
pub fn nat_of_bits(bits: &BitString) -> Nat {
    let total = bits.len() + 1;
    let mut bytes = vec![0u8; total.div_ceil(8)];
    let offset = bytes.len() * 8 - total;
    let mut set = |pos: usize| bytes[pos / 8] |= 0x80 >> (pos % 8);
    set(offset);
    for (i, &b) in bits.bits().iter().enumerate() {
        if b {
            set(offset + 1 + i);
        }
    }
    BigUint::from_bytes_be(&bytes)
}

/// Binary representation of `n` with its leading one dropped.
pub fn bits_of_nat(n: &Nat) -> Result<BitString> {
    if n.is_zero() {
        return Err(invalid("bits_of_nat is undefined for 0"));
    }
    let len = n.bits() as usize;
    let bits = (1..len).map(|i| n.bit((len - 1 - i) as u64)).collect();
    Ok(BitString(bits))
}

/// Which power the greedy decomposition peels off at each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    #[default]
    Squares,
    Cubes,
}

impl Scheme {
    pub fn exponent(self) -> u32 {
        match self {
            Scheme::Squares => 2,
            Scheme::Cubes => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Squares => "squares",
            Scheme::Cubes => "cubes",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "squares" => Ok(Scheme::Squares),
            "cubes" => Ok(Scheme::Cubes),
            other => Err(invalid(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Largest `r` with `r^p <= n`, found by a bitwise binary search.
///
/// Each candidate bit is kept iff the resulting prefix still satisfies the
/// bound, which is a binary search over `[0, 2^(bits/p + 1))`.
pub fn integer_root(n: &Nat, p: u32) -> Nat {
    assert!(p >= 1, "root degree must be positive");
    if n.is_zero() {
        return Nat::zero();
    }
    let top = (n.bits() - 1) / p as u64;
    let mut root = Nat::zero();
    for bit in (0..=top).rev() {
        root.set_bit(bit, true);
        if &num_traits::pow(root.clone(), p as usize) > n {
            root.set_bit(bit, false);
        }
    }
    root
}

pub fn isqrt(n: &Nat) -> Nat {
    integer_root(n, 2)
}

pub fn icbrt(n: &Nat) -> Nat {
    integer_root(n, 3)
}

/// Greedy decomposition `n = 1 + Σ nᵢ^p`, largest power first.
pub fn decompose(n: &Nat, scheme: Scheme) -> Result<Vec<Nat>> {
    if n.is_zero() {
        return Err(invalid("decomposition is undefined for 0"));
    }
    let p = scheme.exponent();
    let mut rest = n - Nat::one();
    let mut parts = Vec::new();
    while !rest.is_zero() {
        let r = integer_root(&rest, p);
        rest -= num_traits::pow(r.clone(), p as usize);
        parts.push(r);
    }
    Ok(parts)
}

pub fn square_decomposition(n: &Nat) -> Result<Vec<Nat>> {
    decompose(n, Scheme::Squares)
}

pub fn cube_decomposition(n: &Nat) -> Result<Vec<Nat>> {
    decompose(n, Scheme::Cubes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn nat(v: u64) -> Nat {
        Nat::from(v)
    }

    #[test]
    fn nat_of_bits_fixtures() {
        assert_eq!(nat_of_bits(&bs("")), nat(1));
        assert_eq!(nat_of_bits(&bs("101")), nat(13));
        assert_eq!(nat_of_bits(&bs("0")), nat(2));
        assert_eq!(nat_of_bits(&bs("1")), nat(3));
        assert_eq!(nat_of_bits(&bs("00000000")), nat(256));
    }

    #[test]
    fn bits_of_nat_fixtures() {
        assert_eq!(bits_of_nat(&nat(1)).unwrap(), bs(""));
        assert_eq!(bits_of_nat(&nat(13)).unwrap(), bs("101"));
        assert!(matches!(bits_of_nat(&nat(0)), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn bijection_is_exhaustive_up_to_2_pow_16() {
        for n in 1..=(1u64 << 16) {
            let bits = bits_of_nat(&nat(n)).unwrap();
            assert_eq!(nat_of_bits(&bits), nat(n));
        }
    }

    #[test]
    fn every_short_string_maps_to_a_distinct_natural() {
        // strings of length L occupy exactly [2^L, 2^(L+1))
        for len in 0..=12usize {
            for v in 0..(1u64 << len) {
                let bits: Vec<bool> = (0..len).rev().map(|i| v >> i & 1 == 1).collect();
                let b = BitString::from_bits(bits);
                assert_eq!(nat_of_bits(&b), nat((1 << len) + v));
                assert_eq!(bits_of_nat(&nat_of_bits(&b)).unwrap(), b);
            }
        }
    }

    #[test]
    fn bytes_round_trip() {
        let b = BitString::from_bytes(b"A");
        assert_eq!(b.to_string(), "01000001");
        assert_eq!(b.to_bytes().unwrap(), b"A");
        assert!(bs("101").to_bytes().is_none());
    }

    #[test]
    fn isqrt_bounds_for_first_million() {
        for n in 1..=1_000_000u64 {
            let r = isqrt(&nat(n));
            assert!(&r * &r <= nat(n));
            let r1 = &r + 1u32;
            assert!(&r1 * &r1 > nat(n), "n = {n}");
        }
    }

    #[test]
    fn roots_agree_with_newton_on_large_values() {
        let mut x = nat(0x9E37_79B9_7F4A_7C15);
        for _ in 0..40 {
            x = &x * &x + 12345u32;
            if x.bits() > 3000 {
                break;
            }
            assert_eq!(isqrt(&x), x.sqrt());
            assert_eq!(icbrt(&x), x.cbrt());
        }
    }

    #[test]
    fn square_decomposition_fixtures() {
        assert!(square_decomposition(&nat(1)).unwrap().is_empty());
        assert_eq!(square_decomposition(&nat(7)).unwrap(), vec![nat(2), nat(1), nat(1)]);
        assert!(square_decomposition(&nat(0)).is_err());
    }

    #[test]
    fn cube_decomposition_fixtures() {
        assert!(cube_decomposition(&nat(1)).unwrap().is_empty());
        assert_eq!(cube_decomposition(&nat(10)).unwrap(), vec![nat(2), nat(1)]);
        assert!(cube_decomposition(&nat(0)).is_err());
    }

    #[test]
    fn decompositions_reconstruct_and_are_non_increasing() {
        for scheme in [Scheme::Squares, Scheme::Cubes] {
            let p = scheme.exponent() as usize;
            for n in 1..=10_000u64 {
                let parts = decompose(&nat(n), scheme).unwrap();
                let sum: Nat = parts.iter().map(|x| num_traits::pow(x.clone(), p)).sum();
                assert_eq!(sum + 1u32, nat(n));
                assert!(parts.windows(2).all(|w| w[0] >= w[1]));
                assert!(parts.iter().all(|x| !x.is_zero() && x < &nat(n)));
            }
        }
    }
}
