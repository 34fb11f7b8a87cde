//! Horton-Strahler orders and branch counting.

use std::collections::BTreeMap;

use super::{prune, BinaryTree, NodeId};
use crate::error::{Error, Result};

/// Horton-Strahler order of every node, indexed like the tree's nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderAssignment {
    pub orders: Vec<u32>,
    pub tree_order: u32,
}

impl OrderAssignment {
    pub fn order(&self, v: NodeId) -> Option<u32> {
        self.orders.get(v).copied()
    }
}

/// Leaves get order 1; a parent of children with orders `i`, `j` gets
/// `max(i, j) + 1` if `i == j` and `max(i, j)` otherwise.
pub fn assign_orders(t: &BinaryTree) -> Result<OrderAssignment> {
    if t.is_empty() {
        return Err(Error::EmptyTree);
    }
    let mut orders = vec![0u32; t.len()];
    for v in t.postorder() {
        orders[v] = match t.nodes[v].children {
            None => 1,
            Some((l, r)) => merge_order(orders[l], orders[r]),
        };
    }
    let tree_order = orders[0];
    Ok(OrderAssignment { orders, tree_order })
}

#[inline]
pub(crate) fn merge_order(i: u32, j: u32) -> u32 {
    if i == j {
        i + 1
    } else {
        i.max(j)
    }
}

/// Number of prunings needed to eliminate the subtree rooted at `v`,
/// found by pruning repeatedly.
pub fn order_via_pruning(t: &BinaryTree, v: NodeId) -> Result<u32> {
    if t.is_empty() {
        return Err(Error::EmptyTree);
    }
    let mut sub = t.subtree(v)?;
    let mut k = 0;
    while !sub.is_empty() {
        sub = prune(&sub);
        k += 1;
    }
    Ok(k)
}

/// Branch counts `N_k` and side-branch counts `N_ij` of one tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HortonStatistics {
    pub order: u32,
    /// `branch_counts[k - 1]` is `N_k`.
    pub branch_counts: Vec<u64>,
    /// Keyed by `(i, j)` with `i < j`; absent pairs are zero.
    pub side_branch_counts: BTreeMap<(u32, u32), u64>,
}

impl HortonStatistics {
    pub fn branches(&self, k: u32) -> u64 {
        if k == 0 {
            return 0;
        }
        self.branch_counts.get(k as usize - 1).copied().unwrap_or(0)
    }

    pub fn side_branches(&self, i: u32, j: u32) -> u64 {
        self.side_branch_counts.get(&(i, j)).copied().unwrap_or(0)
    }
}

/// Counts branches at their lowest vertex and side-branches at their junction.
pub fn horton_statistics(t: &BinaryTree) -> Result<HortonStatistics> {
    let orders = assign_orders(t)?;
    Ok(statistics_from_orders(t, &orders))
}

pub(crate) fn statistics_from_orders(t: &BinaryTree, orders: &OrderAssignment) -> HortonStatistics {
    let k_max = orders.tree_order;
    let mut branch_counts = vec![0u64; k_max as usize];
    let mut side_branch_counts = BTreeMap::new();
    for (v, node) in t.nodes.iter().enumerate() {
        let k = orders.orders[v];
        let starts_branch = node.parent.is_none_or(|p| orders.orders[p] != k);
        if starts_branch {
            branch_counts[k as usize - 1] += 1;
        }
        if let Some((l, r)) = node.children {
            let (a, b) = (orders.orders[l], orders.orders[r]);
            if a != b {
                *side_branch_counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
    }
    HortonStatistics {
        order: k_max,
        branch_counts,
        side_branch_counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::tests::comb4;

    fn perfect4() -> BinaryTree {
        BinaryTree::join(&BinaryTree::cherry(), &BinaryTree::cherry()).unwrap()
    }

    #[test]
    fn single_vertex_orders() {
        let o = assign_orders(&BinaryTree::single()).unwrap();
        assert_eq!(o.orders, vec![1]);
        assert_eq!(o.tree_order, 1);
    }

    #[test]
    fn perfect_tree_orders() {
        let t = perfect4();
        let o = assign_orders(&t).unwrap();
        assert_eq!(o.tree_order, 3);
        for v in 0..t.len() {
            let expected = if v == 0 {
                3
            } else if t.nodes()[v].is_leaf() {
                1
            } else {
                2
            };
            assert_eq!(o.orders[v], expected);
        }
        assert_eq!(order_via_pruning(&t, 0).unwrap(), 3);
    }

    #[test]
    fn empty_tree_rejected() {
        let e = BinaryTree::empty();
        assert_eq!(assign_orders(&e), Err(Error::EmptyTree));
        assert_eq!(horton_statistics(&e), Err(Error::EmptyTree));
        assert_eq!(order_via_pruning(&e, 0), Err(Error::EmptyTree));
        assert_eq!(
            order_via_pruning(&BinaryTree::single(), 3),
            Err(Error::NodeNotFound(3))
        );
    }

    #[test]
    fn leaves_have_pruning_order_one() {
        let t = comb4();
        for v in 0..t.len() {
            if t.nodes()[v].is_leaf() {
                assert_eq!(order_via_pruning(&t, v).unwrap(), 1);
            }
        }
    }

    #[test]
    fn perfect_tree_statistics() {
        let s = horton_statistics(&perfect4()).unwrap();
        assert_eq!(s.branch_counts, vec![4, 2, 1]);
        assert!(s.side_branch_counts.is_empty());
    }

    #[test]
    fn comb_statistics() {
        let s = horton_statistics(&comb4()).unwrap();
        assert_eq!(s.order, 2);
        assert_eq!(s.branch_counts, vec![4, 1]);
        assert_eq!(s.side_branches(1, 2), 2);
        assert_eq!(s.side_branch_counts.len(), 1);
    }
}
