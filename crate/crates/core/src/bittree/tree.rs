use std::fmt;
use std::str::FromStr;

use num_traits::One;

use super::nat::{bits_of_nat, decompose, nat_of_bits, BitString, Nat, Scheme};
use crate::error::{invalid, Error, Result};

/// A rooted, unlabeled, ordered tree.
///
/// Child order is kept in storage but never affects the decoded value.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TopologyTree {
    children: Vec<TopologyTree>,
}

impl TopologyTree {
    pub fn leaf() -> Self {
        Self::default()
    }

    pub fn with_children(children: Vec<TopologyTree>) -> Self {
        Self { children }
    }

    /// A path of `nodes` nested nodes (`nodes >= 1`).
    pub fn chain(nodes: usize) -> Self {
        let mut tree = Self::leaf();
        for _ in 1..nodes {
            tree = Self::with_children(vec![tree]);
        }
        tree
    }

    pub fn children(&self) -> &[TopologyTree] {
        &self.children
    }

    pub fn children_mut(&mut self) -> &mut Vec<TopologyTree> {
        &mut self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn node_count(&self) -> usize {
        1 + self.descendant_count()
    }

    pub fn descendant_count(&self) -> usize {
        self.children.iter().map(TopologyTree::node_count).sum()
    }

    /// Number of nodes on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(TopologyTree::depth).max().unwrap_or(0)
    }

    /// `F(T) = 1 + |D(T)|`.
    pub fn footprint(&self) -> u64 {
        self.node_count() as u64
    }

    /// Sum of the footprints of this node and all of its descendants.
    pub fn total_footprint(&self) -> u64 {
        fn walk(t: &TopologyTree) -> (u64, u64) {
            let (mut size, mut total) = (1, 0);
            for child in &t.children {
                let (s, f) = walk(child);
                size += s;
                total += f;
            }
            (size, total + size)
        }
        walk(self).1
    }

    /// Copy with every sibling list sorted by the canonical text of each
    /// subtree, so isomorphic trees canonicalize to equal values.
    pub fn canonicalize(&self) -> TopologyTree {
        fn walk(t: &TopologyTree) -> (TopologyTree, String) {
            let mut kids: Vec<_> = t.children.iter().map(walk).collect();
            kids.sort_by(|a, b| a.1.cmp(&b.1));
            let mut text = String::with_capacity(2 + kids.iter().map(|k| k.1.len()).sum::<usize>());
            text.push('(');
            for k in &kids {
                text.push_str(&k.1);
            }
            text.push(')');
            let tree = TopologyTree::with_children(kids.into_iter().map(|k| k.0).collect());
            (tree, text)
        }
        walk(self).0
    }

    pub fn is_isomorphic(&self, other: &TopologyTree) -> bool {
        self.node_count() == other.node_count() && self.canonicalize() == other.canonicalize()
    }
}

impl fmt::Display for TopologyTree {
    /// Parenthesized form: a node is `(` followed by its children and `)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for child in &self.children {
            child.fmt(f)?;
        }
        f.write_str(")")
    }
}

impl FromStr for TopologyTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut stack: Vec<Vec<TopologyTree>> = Vec::new();
        let mut root = None;
        for c in s.chars().filter(|c| !c.is_whitespace()) {
            if root.is_some() {
                return Err(invalid("trailing input after tree"));
            }
            match c {
                '(' => stack.push(Vec::new()),
                ')' => {
                    let children = stack.pop().ok_or_else(|| invalid("unbalanced ')'"))?;
                    let node = TopologyTree::with_children(children);
                    match stack.last_mut() {
                        Some(parent) => parent.push(node),
                        None => root = Some(node),
                    }
                }
                other => return Err(invalid(format!("unexpected character {other:?} in tree"))),
            }
        }
        root.ok_or_else(|| invalid("incomplete tree"))
    }
}

/// Builds the tree of `n`: a leaf for 1, otherwise one child per
/// decomposition member, recursively.
pub fn nat_to_tree(n: &Nat, scheme: Scheme) -> Result<TopologyTree> {
    let children = decompose(n, scheme)?
        .iter()
        .map(|part| nat_to_tree(part, scheme))
        .collect::<Result<Vec<_>>>()?;
    Ok(TopologyTree::with_children(children))
}

/// `1 + Σ value(child)^p`.
pub fn tree_to_nat(tree: &TopologyTree, scheme: Scheme) -> Nat {
    let p = scheme.exponent() as usize;
    Nat::one()
        + tree
            .children()
            .iter()
            .map(|c| num_traits::pow(tree_to_nat(c, scheme), p))
            .sum::<Nat>()
}

/// Like [`tree_to_nat`] but gives up once the value would need more than
/// `max_bits` bits. Values grow doubly exponentially with depth, so scanned
/// trees from arbitrary images need this guard.
pub fn tree_to_nat_bounded(tree: &TopologyTree, scheme: Scheme, max_bits: u64) -> Option<Nat> {
    let p = scheme.exponent() as usize;
    let mut sum = Nat::one();
    for child in tree.children() {
        let v = tree_to_nat_bounded(child, scheme, max_bits)?;
        if v.bits().saturating_mul(p as u64) > max_bits + p as u64 {
            return None;
        }
        sum += num_traits::pow(v, p);
        if sum.bits() > max_bits {
            return None;
        }
    }
    Some(sum)
}

pub fn encode_bits(bits: &BitString, scheme: Scheme) -> TopologyTree {
    nat_to_tree(&nat_of_bits(bits), scheme).expect("prefixed naturals are at least 1")
}

pub fn decode_tree(tree: &TopologyTree, scheme: Scheme) -> BitString {
    bits_of_nat(&tree_to_nat(tree, scheme)).expect("tree values are at least 1")
}

/// Bounded variant of [`decode_tree`] for untrusted trees.
pub fn decode_tree_bounded(tree: &TopologyTree, scheme: Scheme, max_bits: u64) -> Option<BitString> {
    tree_to_nat_bounded(tree, scheme, max_bits).map(|n| bits_of_nat(&n).expect("values are at least 1"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn leaf() -> TopologyTree {
        TopologyTree::leaf()
    }

    fn node(children: Vec<TopologyTree>) -> TopologyTree {
        TopologyTree::with_children(children)
    }

    fn random_tree(rng: &mut impl Rng, max_nodes: usize) -> TopologyTree {
        // random recursive tree: attach each new node under a uniform earlier one
        let n = rng.random_range(1..=max_nodes);
        let parents: Vec<usize> = (1..n).map(|i| rng.random_range(0..i)).collect();
        fn build(i: usize, parents: &[usize]) -> TopologyTree {
            let kids = (1..=parents.len())
                .filter(|&j| parents[j - 1] == i)
                .map(|j| build(j, parents))
                .collect();
            TopologyTree::with_children(kids)
        }
        build(0, &parents)
    }

    fn shuffle_recursively(t: &TopologyTree, rng: &mut impl Rng) -> TopologyTree {
        let mut kids: Vec<_> = t.children().iter().map(|c| shuffle_recursively(c, rng)).collect();
        kids.shuffle(rng);
        node(kids)
    }

    /// Brute-force isomorphism: try every pairing of children.
    fn brute_isomorphic(a: &TopologyTree, b: &TopologyTree) -> bool {
        let (ka, kb) = (a.children(), b.children());
        if ka.len() != kb.len() {
            return false;
        }
        fn assign(ka: &[TopologyTree], kb: &[TopologyTree], used: &mut Vec<bool>, i: usize) -> bool {
            if i == ka.len() {
                return true;
            }
            for j in 0..kb.len() {
                if !used[j] && brute_isomorphic(&ka[i], &kb[j]) {
                    used[j] = true;
                    if assign(ka, kb, used, i + 1) {
                        return true;
                    }
                    used[j] = false;
                }
            }
            false
        }
        assign(ka, kb, &mut vec![false; kb.len()], 0)
    }

    #[test]
    fn small_trees_from_naturals() {
        assert_eq!(nat_to_tree(&Nat::from(1u32), Scheme::Squares).unwrap(), leaf());
        let seven = nat_to_tree(&Nat::from(7u32), Scheme::Squares).unwrap();
        assert_eq!(seven, node(vec![node(vec![leaf()]), leaf(), leaf()]));
        assert!(nat_to_tree(&Nat::from(0u32), Scheme::Squares).is_err());
    }

    #[test]
    fn small_trees_to_naturals() {
        assert_eq!(tree_to_nat(&leaf(), Scheme::Squares), Nat::from(1u32));
        assert_eq!(tree_to_nat(&node(vec![leaf(), leaf()]), Scheme::Squares), Nat::from(3u32));
        assert_eq!(tree_to_nat(&node(vec![leaf(), leaf()]), Scheme::Cubes), Nat::from(3u32));
    }

    #[test]
    fn nat_tree_round_trip_exhaustive() {
        for scheme in [Scheme::Squares, Scheme::Cubes] {
            for n in 1..=100_000u32 {
                let n = Nat::from(n);
                assert_eq!(tree_to_nat(&nat_to_tree(&n, scheme).unwrap(), scheme), n);
            }
        }
    }

    #[test]
    fn decode_is_invariant_under_sibling_shuffles() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let tree = encode_bits(&"1011001110001111000010101".repeat(8).parse().unwrap(), Scheme::Squares);
        let expected = decode_tree(&tree, Scheme::Squares);
        for _ in 0..1000 {
            let shuffled = shuffle_recursively(&tree, &mut rng);
            assert_eq!(decode_tree(&shuffled, Scheme::Squares), expected);
        }
    }

    #[test]
    fn empty_bit_string_is_a_single_node() {
        let t = encode_bits(&BitString::new(), Scheme::Squares);
        assert_eq!(t, leaf());
        assert!(decode_tree(&t, Scheme::Squares).is_empty());
    }

    #[test]
    fn footprints() {
        assert_eq!(leaf().footprint(), 1);
        assert_eq!(leaf().total_footprint(), 1);
        assert_eq!(TopologyTree::chain(30).total_footprint(), 465);
        assert_eq!(node(vec![leaf(), leaf()]).total_footprint(), 5);
    }

    #[test]
    fn isomorphism_fixtures() {
        let a = node(vec![node(vec![leaf(), leaf()]), leaf(), node(vec![leaf()])]);
        let b = node(vec![node(vec![leaf()]), leaf(), node(vec![leaf(), leaf()])]);
        assert!(a.is_isomorphic(&b));
        assert!(!TopologyTree::chain(3).is_isomorphic(&node(vec![leaf(), leaf()])));
    }

    #[test]
    fn canonical_form_separates_trees_with_equal_values() {
        // 1 + 1² + 7² = 1 + 5² + 5² = 51
        let seven = nat_to_tree(&Nat::from(7u32), Scheme::Squares).unwrap();
        let five = nat_to_tree(&Nat::from(5u32), Scheme::Squares).unwrap();
        let a = node(vec![leaf(), seven]);
        let b = node(vec![five.clone(), five]);
        assert_eq!(tree_to_nat(&a, Scheme::Squares), tree_to_nat(&b, Scheme::Squares));
        assert!(!a.is_isomorphic(&b));
        // the tie case must not make canonical forms order-dependent
        let c = node(vec![a.clone(), b.clone()]);
        let d = node(vec![b, a]);
        assert!(c.is_isomorphic(&d));
    }

    #[test]
    fn isomorphism_matches_brute_force_on_small_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..500 {
            let a = random_tree(&mut rng, 8);
            let b = if rng.random_bool(0.5) {
                shuffle_recursively(&a, &mut rng)
            } else {
                random_tree(&mut rng, 8)
            };
            assert_eq!(a.is_isomorphic(&b), brute_isomorphic(&a, &b), "{a} vs {b}");
        }
    }

    #[test]
    fn text_form_round_trips() {
        let t = node(vec![node(vec![leaf()]), leaf()]);
        assert_eq!(t.to_string(), "((())())");
        assert_eq!("((())())".parse::<TopologyTree>().unwrap(), t);
        assert!("(()".parse::<TopologyTree>().is_err());
        assert!("()()".parse::<TopologyTree>().is_err());
        assert!("(x)".parse::<TopologyTree>().is_err());
    }

    #[test]
    fn bounded_decode_rejects_deep_chains() {
        let chain = TopologyTree::chain(64);
        assert!(tree_to_nat_bounded(&chain, Scheme::Squares, 1 << 16).is_none());
        let t = encode_bits(&"1".repeat(300).parse().unwrap(), Scheme::Squares);
        assert_eq!(
            decode_tree_bounded(&t, Scheme::Squares, 1 << 16),
            Some(decode_tree(&t, Scheme::Squares))
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn bits_round_trip(bits in proptest::collection::vec(any::<bool>(), 0..2048)) {
            let b = BitString::from_bits(bits);
            for scheme in [Scheme::Squares, Scheme::Cubes] {
                prop_assert_eq!(decode_tree(&encode_bits(&b, scheme), scheme), b.clone());
            }
        }

        #[test]
        fn canonical_form_is_a_fixed_point(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_tree(&mut rng, 40);
            let c = t.canonicalize();
            prop_assert_eq!(c.canonicalize(), c.clone());
            prop_assert_eq!(shuffle_recursively(&t, &mut rng).canonicalize(), c);
        }
    }
}
