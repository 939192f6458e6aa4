//! Bit string ⇄ topology tree codec.
//!
//! A bit string is mapped to a natural number by prefixing a one bit, and
//! the natural is expanded into a tree by greedily peeling off the largest
//! square (or cube) at each level. Sibling order never changes the value,
//! so any drawing of the tree decodes to the same bits.

mod nat;
mod tree;

pub use nat::{
    bits_of_nat, cube_decomposition, decompose, icbrt, integer_root, isqrt, nat_of_bits,
    square_decomposition, BitString, Nat, Scheme,
};
pub use tree::{
    decode_tree, decode_tree_bounded, encode_bits, nat_to_tree, tree_to_nat, tree_to_nat_bounded,
    TopologyTree,
};
