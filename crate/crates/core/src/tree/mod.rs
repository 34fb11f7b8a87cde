//! Finite rooted full binary trees.
//!
//! A [`BinaryTree`] is an index arena whose nodes are always stored in
//! preorder (root first, then the left subtree, then the right subtree).
//! Every constructor compacts into that layout, so two trees compare equal
//! with `==` exactly when they have the same shape, child order and labels,
//! and every parent index is smaller than the indices of its children.

mod reduce;
mod strahler;

pub use reduce::{prune, series_reduce, RootedTree};
pub use strahler::{
    assign_orders, horton_statistics, order_via_pruning, HortonStatistics, OrderAssignment,
};

use crate::error::{Error, Result};

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Node {
    pub(crate) parent: Option<NodeId>,
    pub(crate) children: Option<(NodeId, NodeId)>,
    pub(crate) label: Option<String>,
}

impl Node {
    pub fn parent(&self) -> Option<NodeId> {
        self.parent
    }

    pub fn children(&self) -> Option<(NodeId, NodeId)> {
        self.children
    }

    /// Free-text label carried over from ingestion. Ignored by all statistics.
    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }
}

/// A finite rooted full binary tree, possibly empty.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BinaryTree {
    pub(crate) nodes: Vec<Node>,
    pub(crate) root: Option<NodeId>,
}

impl BinaryTree {
    /// The empty tree.
    pub fn empty() -> Self {
        Self::default()
    }

    /// The single-vertex tree.
    pub fn single() -> Self {
        Self {
            nodes: vec![Node::default()],
            root: Some(0),
        }
    }

    /// Two leaves attached to a root.
    pub fn cherry() -> Self {
        Self::join(&Self::single(), &Self::single()).expect("nonempty operands")
    }

    /// A new root whose left and right subtrees are copies of `left` and `right`.
    pub fn join(left: &BinaryTree, right: &BinaryTree) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::EmptyTree);
        }
        let mut nodes = Vec::with_capacity(1 + left.len() + right.len());
        nodes.push(Node::default());
        let shift = |n: &Node, offset: usize, root_parent: NodeId| Node {
            parent: Some(n.parent.map_or(root_parent, |p| p + offset)),
            children: n.children.map(|(l, r)| (l + offset, r + offset)),
            label: n.label.clone(),
        };
        nodes.extend(left.nodes.iter().map(|n| shift(n, 1, 0)));
        let right_offset = 1 + left.len();
        nodes.extend(right.nodes.iter().map(|n| shift(n, right_offset, 0)));
        nodes[0].children = Some((1, right_offset));
        Ok(Self {
            nodes,
            root: Some(0),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    pub fn root(&self) -> Option<NodeId> {
        self.root
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn children(&self, id: NodeId) -> Option<(NodeId, NodeId)> {
        self.nodes.get(id).and_then(|n| n.children)
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes.get(id).and_then(|n| n.parent)
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    pub fn set_label(&mut self, id: NodeId, label: Option<String>) -> Result<()> {
        let node = self.nodes.get_mut(id).ok_or(Error::NodeNotFound(id))?;
        node.label = label;
        Ok(())
    }

    /// Copy of the subtree rooted at `v`.
    pub fn subtree(&self, v: NodeId) -> Result<BinaryTree> {
        if v >= self.nodes.len() {
            return Err(Error::NodeNotFound(v));
        }
        // Preorder layout: the subtree of v occupies a contiguous index range.
        let mut pending = 1usize;
        let mut i = v;
        while pending > 0 {
            pending -= 1;
            if self.nodes[i].children.is_some() {
                pending += 2;
            }
            i += 1;
        }
        let nodes = self.nodes[v..i]
            .iter()
            .enumerate()
            .map(|(k, n)| Node {
                parent: if k == 0 {
                    None
                } else {
                    n.parent.map(|p| p - v)
                },
                children: n.children.map(|(l, r)| (l - v, r - v)),
                label: n.label.clone(),
            })
            .collect();
        Ok(BinaryTree {
            nodes,
            root: Some(0),
        })
    }

    /// Nodes in an order where every child precedes its parent.
    pub fn postorder(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).rev()
    }
}

/// Incremental construction of a [`BinaryTree`] from leaves and joins.
///
/// Node handles returned by the builder are only meaningful to the builder;
/// `finish` compacts everything reachable from the chosen root into preorder.
#[derive(Debug, Default)]
pub struct TreeBuilder {
    children: Vec<Option<(NodeId, NodeId)>>,
    labels: Vec<Option<String>>,
    has_parent: Vec<bool>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            children: Vec::with_capacity(n),
            labels: Vec::with_capacity(n),
            has_parent: Vec::with_capacity(n),
        }
    }

    pub fn leaf(&mut self, label: Option<String>) -> NodeId {
        self.push(None, label)
    }

    pub fn internal(
        &mut self,
        left: NodeId,
        right: NodeId,
        label: Option<String>,
    ) -> Result<NodeId> {
        for c in [left, right] {
            match self.has_parent.get(c) {
                None => return Err(Error::NodeNotFound(c)),
                Some(true) => {
                    return Err(Error::InvalidConfig(format!(
                        "node {c} already has a parent"
                    )))
                }
                Some(false) => {}
            }
        }
        if left == right {
            return Err(Error::InvalidConfig(format!(
                "node {left} used twice as a child"
            )));
        }
        self.has_parent[left] = true;
        self.has_parent[right] = true;
        Ok(self.push(Some((left, right)), label))
    }

    fn push(&mut self, children: Option<(NodeId, NodeId)>, label: Option<String>) -> NodeId {
        self.children.push(children);
        self.labels.push(label);
        self.has_parent.push(false);
        self.children.len() - 1
    }

    pub fn finish(mut self, root: NodeId) -> Result<BinaryTree> {
        if root >= self.children.len() {
            return Err(Error::NodeNotFound(root));
        }
        let mut nodes: Vec<Node> = Vec::with_capacity(self.children.len());
        // (builder id, parent in output, is right child)
        let mut stack = vec![(root, None::<NodeId>, false)];
        while let Some((id, parent, right)) = stack.pop() {
            let out = nodes.len();
            nodes.push(Node {
                parent,
                children: None,
                label: self.labels[id].take(),
            });
            if let Some(p) = parent {
                let slot = nodes[p].children.get_or_insert((usize::MAX, usize::MAX));
                if right {
                    slot.1 = out;
                } else {
                    slot.0 = out;
                }
            }
            if let Some((l, r)) = self.children[id] {
                stack.push((r, Some(out), true));
                stack.push((l, Some(out), false));
            }
        }
        Ok(BinaryTree {
            nodes,
            root: Some(0),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// root -> (leaf, v1), v1 -> (leaf, v2), v2 -> (leaf, leaf)
    pub(crate) fn comb4() -> BinaryTree {
        let mut b = TreeBuilder::new();
        let a = b.leaf(None);
        let c = b.leaf(None);
        let v2 = b.internal(a, c, None).unwrap();
        let l1 = b.leaf(None);
        let v1 = b.internal(l1, v2, None).unwrap();
        let l0 = b.leaf(None);
        let root = b.internal(l0, v1, None).unwrap();
        b.finish(root).unwrap()
    }

    #[test]
    fn preorder_layout() {
        let t = comb4();
        assert_eq!(t.len(), 7);
        for (i, n) in t.nodes().iter().enumerate() {
            if let Some(p) = n.parent() {
                assert!(p < i);
            }
            if let Some((l, r)) = n.children() {
                assert_eq!(t.parent(l), Some(i));
                assert_eq!(t.parent(r), Some(i));
            }
        }
        assert_eq!(t.leaf_count(), 4);
    }

    #[test]
    fn join_matches_builder() {
        let perfect = BinaryTree::join(&BinaryTree::cherry(), &BinaryTree::cherry()).unwrap();
        let mut b = TreeBuilder::new();
        let leaves: Vec<_> = (0..4).map(|_| b.leaf(None)).collect();
        let x = b.internal(leaves[0], leaves[1], None).unwrap();
        let y = b.internal(leaves[2], leaves[3], None).unwrap();
        let r = b.internal(x, y, None).unwrap();
        assert_eq!(b.finish(r).unwrap(), perfect);
        assert!(BinaryTree::join(&BinaryTree::empty(), &perfect).is_err());
    }

    #[test]
    fn subtree_extracts_contiguous_block() {
        let t = comb4();
        let (_, v1) = t.children(0).unwrap();
        let sub = t.subtree(v1).unwrap();
        assert_eq!(sub.len(), 5);
        assert_eq!(sub.leaf_count(), 3);
        assert_eq!(t.subtree(0).unwrap(), t);
        assert_eq!(t.subtree(99), Err(Error::NodeNotFound(99)));
    }

    #[test]
    fn builder_rejects_reused_child() {
        let mut b = TreeBuilder::new();
        let a = b.leaf(None);
        let c = b.leaf(None);
        b.internal(a, c, None).unwrap();
        assert!(b.internal(a, c, None).is_err());
    }
}
