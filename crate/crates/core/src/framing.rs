//! Message framing: `UTF8(payload) ‖ 0 ‖ CRC15(payload)`.
//!
//! The checksum is CRC-15/CAN (polynomial 0x4599, zero init, no reflection,
//! no final xor) computed bit by bit and stored in a 16-bit field whose
//! first bit is always zero.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bittree::{decode_tree_bounded, encode_bits, BitString, Scheme, TopologyTree};
use crate::error::{invalid, Result};

pub const CRC15_POLY: u16 = 0x4599;
pub const CRC_FIELD_BITS: usize = 16;

/// Upper bound on the bit length of a candidate frame during extraction.
pub const MAX_FRAME_BITS: u64 = 1 << 16;

pub fn crc15(bits: &BitString) -> u16 {
    let mut crc: u16 = 0;
    for &bit in bits.bits() {
        let feedback = (crc >> 14 & 1 == 1) ^ bit;
        crc = crc << 1 & 0x7FFF;
        if feedback {
            crc ^= CRC15_POLY;
        }
    }
    crc
}

fn crc_field(bits: &BitString) -> BitString {
    let crc = crc15(bits);
    BitString::from_bits((0..CRC_FIELD_BITS).rev().map(|i| crc >> i & 1 == 1).collect())
}

/// Payload bits followed by the padded CRC field.
pub fn frame_message(text: &str) -> Result<BitString> {
    if text.is_empty() {
        return Err(invalid("cannot frame an empty message"));
    }
    let mut frame = BitString::from_bytes(text.as_bytes());
    let field = crc_field(&frame);
    frame.extend_from(&field);
    Ok(frame)
}

/// Validates a candidate frame. Rejection is the common case when scanning,
/// so it is a value rather than an error.
pub fn unframe(bits: &BitString) -> Option<String> {
    if bits.len() <= CRC_FIELD_BITS {
        return None;
    }
    let split = bits.len() - CRC_FIELD_BITS;
    if split % 8 != 0 {
        return None;
    }
    let payload = bits.slice(0..split);
    if bits.slice(split..bits.len()) != crc_field(&payload) {
        return None;
    }
    String::from_utf8(payload.to_bytes()?).ok()
}

/// Number of identical payload copies placed under a shared root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct RedundancyLevel(u32);

impl RedundancyLevel {
    pub const SINGLE: RedundancyLevel = RedundancyLevel(1);

    pub fn new(copies: u32) -> Result<Self> {
        if copies == 0 {
            return Err(invalid("redundancy level must be at least 1"));
        }
        Ok(Self(copies))
    }

    pub fn copies(self) -> u32 {
        self.0
    }
}

impl Default for RedundancyLevel {
    fn default() -> Self {
        Self::SINGLE
    }
}

impl TryFrom<u32> for RedundancyLevel {
    type Error = crate::Error;

    fn try_from(value: u32) -> Result<Self> {
        Self::new(value)
    }
}

impl From<RedundancyLevel> for u32 {
    fn from(level: RedundancyLevel) -> u32 {
        level.0
    }
}

/// The tree drawn for `text`: the encoded frame itself, or a fresh root
/// holding `R` copies of it.
pub fn build_code_tree(text: &str, redundancy: RedundancyLevel, scheme: Scheme) -> Result<TopologyTree> {
    let payload = encode_bits(&frame_message(text)?, scheme);
    Ok(match redundancy.copies() {
        1 => payload,
        r => TopologyTree::with_children(vec![payload; r as usize]),
    })
}

/// Decodes every candidate and keeps the ones whose frame validates.
pub fn extract_messages<'a>(
    candidates: impl IntoIterator<Item = &'a TopologyTree>,
    scheme: Scheme,
) -> BTreeSet<String> {
    candidates
        .into_iter()
        .filter_map(|tree| decode_tree_bounded(tree, scheme, MAX_FRAME_BITS))
        .filter_map(|bits| unframe(&bits))
        .collect()
}
