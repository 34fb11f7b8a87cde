use super::{BinaryTree, Node, NodeId};
use crate::error::{Error, Result};

/// A rooted tree whose nodes may have any number of children.
///
/// This is the intermediate state between cutting leaves and series
/// reduction; [`series_reduce`] turns it back into a [`BinaryTree`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RootedTree {
    pub children: Vec<Vec<NodeId>>,
    pub labels: Vec<Option<String>>,
    pub root: Option<NodeId>,
}

impl RootedTree {
    pub fn add_node(&mut self, label: Option<String>) -> NodeId {
        self.children.push(Vec::new());
        self.labels.push(label);
        self.children.len() - 1
    }

    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }
}

impl From<&BinaryTree> for RootedTree {
    fn from(t: &BinaryTree) -> Self {
        RootedTree {
            children: t
                .nodes
                .iter()
                .map(|n| n.children.map_or_else(Vec::new, |(l, r)| vec![l, r]))
                .collect(),
            labels: t.nodes.iter().map(|n| n.label.clone()).collect(),
            root: t.root,
        }
    }
}

/// Removes every node with exactly one child, linking its parent straight
/// to the child (a one-child root is replaced by its child).
///
/// Fails with `NOT_FULL_BINARY` if some node has more than two children.
pub fn series_reduce(t: &RootedTree) -> Result<BinaryTree> {
    let Some(root) = t.root else {
        return Ok(BinaryTree::empty());
    };
    let descend = |mut v: NodeId| {
        while t.children[v].len() == 1 {
            v = t.children[v][0];
        }
        v
    };
    let mut nodes: Vec<Node> = Vec::with_capacity(t.len());
    let mut stack = vec![(descend(root), None::<NodeId>, false)];
    while let Some((v, parent, right)) = stack.pop() {
        let out = nodes.len();
        nodes.push(Node {
            parent,
            children: None,
            label: t.labels.get(v).cloned().flatten(),
        });
        if let Some(p) = parent {
            let slot = nodes[p].children.get_or_insert((usize::MAX, usize::MAX));
            if right {
                slot.1 = out;
            } else {
                slot.0 = out;
            }
        }
        match t.children[v].as_slice() {
            [] => {}
            [l, r] => {
                stack.push((descend(*r), Some(out), true));
                stack.push((descend(*l), Some(out), false));
            }
            more => {
                return Err(Error::NotFullBinary {
                    at: v,
                    children: more.len(),
                })
            }
        }
    }
    Ok(BinaryTree {
        nodes,
        root: Some(0),
    })
}

/// One pruning step: cut all leaves with their parental edges, then series-reduce.
pub fn prune(t: &BinaryTree) -> BinaryTree {
    if t.is_empty() {
        return BinaryTree::empty();
    }
    // Surviving nodes are the internal ones; keep their preorder positions.
    let mut index = vec![usize::MAX; t.len()];
    let mut cut = RootedTree::default();
    for (i, n) in t.nodes.iter().enumerate() {
        if !n.is_leaf() {
            index[i] = cut.add_node(n.label.clone());
        }
    }
    for (i, n) in t.nodes.iter().enumerate() {
        if let Some((l, r)) = n.children {
            let kept: Vec<NodeId> = [l, r]
                .into_iter()
                .filter(|&c| index[c] != usize::MAX)
                .map(|c| index[c])
                .collect();
            cut.children[index[i]] = kept;
        }
    }
    if !cut.children.is_empty() {
        cut.root = Some(0);
    }
    series_reduce(&cut).expect("cutting leaves never adds children")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::tests::comb4;

    fn perfect4() -> BinaryTree {
        BinaryTree::join(&BinaryTree::cherry(), &BinaryTree::cherry()).unwrap()
    }

    #[test]
    fn single_vertex_prunes_to_empty() {
        assert!(prune(&BinaryTree::single()).is_empty());
        assert!(prune(&BinaryTree::empty()).is_empty());
    }

    #[test]
    fn comb_prunes_to_single_vertex() {
        assert_eq!(prune(&comb4()), BinaryTree::single());
    }

    #[test]
    fn perfect_tree_prunes_to_cherry() {
        let once = prune(&perfect4());
        assert_eq!(once, BinaryTree::cherry());
        assert_eq!(prune(&once), BinaryTree::single());
    }

    #[test]
    fn chain_collapses_to_its_bottom() {
        let mut t = RootedTree::default();
        let root = t.add_node(Some("root".into()));
        let a = t.add_node(Some("a".into()));
        let b = t.add_node(Some("b".into()));
        t.children[root] = vec![a];
        t.children[a] = vec![b];
        t.root = Some(root);
        let reduced = series_reduce(&t).unwrap();
        assert_eq!(reduced.len(), 1);
        assert_eq!(reduced.node(0).unwrap().label(), Some("b"));
    }

    #[test]
    fn full_binary_is_fixed_point() {
        for t in [
            BinaryTree::single(),
            BinaryTree::cherry(),
            comb4(),
            perfect4(),
        ] {
            assert_eq!(series_reduce(&RootedTree::from(&t)).unwrap(), t);
        }
        assert!(series_reduce(&RootedTree::default()).unwrap().is_empty());
    }

    #[test]
    fn three_children_rejected() {
        let mut t = RootedTree::default();
        let root = t.add_node(None);
        let kids: Vec<_> = (0..3).map(|_| t.add_node(None)).collect();
        t.children[root] = kids;
        t.root = Some(root);
        assert_eq!(
            series_reduce(&t),
            Err(Error::NotFullBinary { at: 0, children: 3 })
        );
    }

    #[test]
    fn internal_chain_is_spliced_out() {
        // root -> (x, y); x -> (z); z -> (p, q); y leaf
        let mut t = RootedTree::default();
        let root = t.add_node(None);
        let x = t.add_node(Some("x".into()));
        let y = t.add_node(Some("y".into()));
        let z = t.add_node(Some("z".into()));
        let p = t.add_node(None);
        let q = t.add_node(None);
        t.children[root] = vec![x, y];
        t.children[x] = vec![z];
        t.children[z] = vec![p, q];
        t.root = Some(root);
        let reduced = series_reduce(&t).unwrap();
        assert_eq!(reduced.len(), 5);
        let (l, _) = reduced.children(0).unwrap();
        assert_eq!(reduced.node(l).unwrap().label(), Some("z"));
        assert_eq!(series_reduce(&RootedTree::from(&reduced)).unwrap(), reduced);
    }
}
