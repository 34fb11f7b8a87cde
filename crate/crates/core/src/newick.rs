//! A Newick subset for full binary trees.
//!
//! ```text
//! document := subtree ";"
//! subtree  := leaf | "(" subtree "," subtree ")" label
//! leaf     := label
//! label    := [A-Za-z0-9_]*
//! ```
//!
//! Whitespace is allowed between tokens. Labels are kept on the nodes but
//! play no part in any statistic.

use crate::error::{Error, Result};
use crate::tree::{BinaryTree, NodeId, TreeBuilder};

fn is_label_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn label(&mut self) -> Option<String> {
        let start = self.pos;
        while self.peek().is_some_and(is_label_byte) {
            self.pos += 1;
        }
        (self.pos > start)
            .then(|| String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned())
    }

    fn syntax(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }
}

fn describe(b: Option<u8>) -> String {
    match b {
        None => "end of input".to_string(),
        Some(b) if b.is_ascii_graphic() => format!("'{}'", b as char),
        Some(b) => format!("byte 0x{b:02x}"),
    }
}

pub fn parse_tree(doc: &str) -> Result<BinaryTree> {
    let mut cur = Cursor {
        bytes: doc.as_bytes(),
        pos: 0,
    };
    let mut builder = TreeBuilder::new();
    // Open groups: byte offset of '(' and the subtrees read so far.
    let mut open: Vec<(usize, Vec<NodeId>)> = Vec::new();
    loop {
        cur.skip_ws();
        if cur.peek() == Some(b'(') {
            open.push((cur.pos, Vec::with_capacity(2)));
            cur.pos += 1;
            continue;
        }
        let label = cur.label();
        let mut node = builder.leaf(label);
        loop {
            cur.skip_ws();
            let Some((at, kids)) = open.last_mut() else {
                if cur.peek() != Some(b';') {
                    return Err(cur.syntax(format!("expected ';', found {}", describe(cur.peek()))));
                }
                cur.pos += 1;
                cur.skip_ws();
                if cur.peek().is_some() {
                    return Err(cur.syntax("unexpected content after ';'"));
                }
                return builder.finish(node);
            };
            kids.push(node);
            match cur.peek() {
                Some(b',') => {
                    if kids.len() >= 2 {
                        return Err(Error::NotFullBinary {
                            at: *at,
                            children: kids.len() + 1,
                        });
                    }
                    cur.pos += 1;
                    break;
                }
                Some(b')') => {
                    if kids.len() != 2 {
                        return Err(Error::NotFullBinary {
                            at: *at,
                            children: kids.len(),
                        });
                    }
                    let (l, r) = (kids[0], kids[1]);
                    open.pop();
                    cur.pos += 1;
                    cur.skip_ws();
                    let label = cur.label();
                    node = builder.internal(l, r, label)?;
                }
                other => {
                    return Err(
                        cur.syntax(format!("expected ',' or ')', found {}", describe(other)))
                    )
                }
            }
        }
    }
}

/// Writes `t` in the grammar above, left child first as stored.
pub fn serialize_tree(t: &BinaryTree) -> Result<String> {
    let root = t.root().ok_or(Error::EmptyTree)?;
    enum Step {
        Visit(NodeId),
        Text(&'static str),
        Label(NodeId),
    }
    let mut out = String::with_capacity(t.len() * 3);
    let mut stack = vec![Step::Visit(root)];
    while let Some(step) = stack.pop() {
        match step {
            Step::Text(s) => out.push_str(s),
            Step::Label(v) => out.push_str(t.nodes()[v].label().unwrap_or("")),
            Step::Visit(v) => match t.children(v) {
                None => out.push_str(t.nodes()[v].label().unwrap_or("")),
                Some((l, r)) => {
                    out.push('(');
                    stack.push(Step::Label(v));
                    stack.push(Step::Text(")"));
                    stack.push(Step::Visit(r));
                    stack.push(Step::Text(","));
                    stack.push(Step::Visit(l));
                }
            },
        }
    }
    out.push(';');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{assign_orders, horton_statistics};

    #[test]
    fn single_vertex() {
        let t = parse_tree("x;").unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.nodes()[0].label(), Some("x"));
        assert_eq!(parse_tree(";").unwrap(), BinaryTree::single());
        assert_eq!(serialize_tree(&BinaryTree::single()).unwrap(), ";");
    }

    #[test]
    fn perfect_tree() {
        let t = parse_tree("((,),(,));").unwrap();
        assert_eq!(assign_orders(&t).unwrap().tree_order, 3);
        assert_eq!(serialize_tree(&t).unwrap(), "((,),(,));");
    }

    #[test]
    fn comb() {
        let t = parse_tree("(a,(b,(c,d)));").unwrap();
        let s = horton_statistics(&t).unwrap();
        assert_eq!(s.branch_counts, vec![4, 1]);
        assert_eq!(s.side_branches(1, 2), 2);
        assert_eq!(serialize_tree(&t).unwrap(), "(a,(b,(c,d)));");
    }

    #[test]
    fn cherry_and_whitespace() {
        assert_eq!(serialize_tree(&BinaryTree::cherry()).unwrap(), "(,);");
        let t = parse_tree(" ( a ,\n\t( b , c ) inner ) root ;\n").unwrap();
        assert_eq!(serialize_tree(&t).unwrap(), "(a,(b,c)inner)root;");
    }

    #[test]
    fn rejects_non_binary() {
        assert_eq!(
            parse_tree("(a,b,c);"),
            Err(Error::NotFullBinary { at: 0, children: 3 })
        );
        assert_eq!(
            parse_tree("((a),b);"),
            Err(Error::NotFullBinary { at: 1, children: 1 })
        );
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        let cases = [
            ("(a,b)", 5),
            ("(a,b", 4),
            ("a-b;", 1),
            ("(a,b);x", 6),
            ("(a;b);", 2),
            ("", 0),
        ];
        for (doc, offset) in cases {
            match parse_tree(doc) {
                Err(Error::Syntax { offset: o, .. }) => assert_eq!(o, offset, "{doc:?}"),
                other => panic!("{doc:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn empty_tree_not_serializable() {
        assert_eq!(serialize_tree(&BinaryTree::empty()), Err(Error::EmptyTree));
    }
}
