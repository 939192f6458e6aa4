//! Contour hierarchy → global topology tree → candidate codes.

use crate::bittree::TopologyTree;

use super::contours::ContourHierarchy;

/// One node per retained contour under a synthetic frame root (node 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalTopologyTree {
    children: Vec<Vec<usize>>,
    contour: Vec<Option<usize>>,
}

impl GlobalTopologyTree {
    pub const ROOT: usize = 0;

    pub fn node_count(&self) -> usize {
        self.children.len()
    }

    pub fn children(&self, node: usize) -> &[usize] {
        &self.children[node]
    }

    /// Index into the hierarchy; `None` for the frame root.
    pub fn contour(&self, node: usize) -> Option<usize> {
        self.contour[node]
    }

    /// Descendant count of every node.
    pub fn descendant_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.node_count()];
        // nodes are numbered in pre-order, so children come after parents
        for node in (0..self.node_count()).rev() {
            counts[node] = self.children[node].iter().map(|&c| 1 + counts[c]).sum();
        }
        counts
    }

    /// The subtree under `node` as a plain tree.
    pub fn subtree(&self, node: usize) -> TopologyTree {
        TopologyTree::with_children(self.children[node].iter().map(|&c| self.subtree(c)).collect())
    }
}

/// Drops contours enclosing less than `min_area` pixels, attaching their
/// children to the nearest retained ancestor.
pub fn hierarchy_to_tree(h: &ContourHierarchy, min_area: f64) -> GlobalTopologyTree {
    let mut tree = GlobalTopologyTree { children: vec![Vec::new()], contour: vec![None] };
    let mut stack: Vec<(usize, usize)> = h.roots().into_iter().rev().map(|c| (c, GlobalTopologyTree::ROOT)).collect();
    while let Some((c, parent)) = stack.pop() {
        let attach = if h.contours[c].area() >= min_area {
            let node = tree.children.len();
            tree.children.push(Vec::new());
            tree.contour.push(Some(c));
            tree.children[parent].push(node);
            node
        } else {
            parent
        };
        stack.extend(h.children(c).into_iter().rev().map(|k| (k, attach)));
    }
    tree
}

/// Every node except the frame root with more than `min_descendants`
/// descendants, as `(node, subtree)` pairs.
pub fn candidate_roots(tree: &GlobalTopologyTree, min_descendants: usize) -> Vec<(usize, TopologyTree)> {
    let counts = tree.descendant_counts();
    (1..tree.node_count()).filter(|&n| counts[n] > min_descendants).map(|n| (n, tree.subtree(n))).collect()
}
