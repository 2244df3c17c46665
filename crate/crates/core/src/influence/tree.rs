use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_traits::Zero;
use rand::Rng;

use super::{BoolFunOracle, PartialAssignment};
use crate::bits::Bits;
use crate::strategies::Prob;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Leaf(bool),
    /// Reads coordinate `index`; children are arena indices.
    Query {
        index: usize,
        zero: usize,
        one: usize,
    },
}

/// A decision tree stored as an arena; node 0 is the root.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn leaf(b: bool) -> Self {
        DecisionTree {
            nodes: vec![Node::Leaf(b)],
        }
    }

    pub fn query(index: usize, zero: DecisionTree, one: DecisionTree) -> Self {
        let mut nodes = Vec::with_capacity(1 + zero.nodes.len() + one.nodes.len());
        nodes.push(Node::Leaf(false));
        let z = Self::graft(&mut nodes, &zero);
        let o = Self::graft(&mut nodes, &one);
        nodes[0] = Node::Query {
            index,
            zero: z,
            one: o,
        };
        DecisionTree { nodes }
    }

    fn graft(nodes: &mut Vec<Node>, sub: &DecisionTree) -> usize {
        let offset = nodes.len();
        nodes.extend(sub.nodes.iter().map(|n| match *n {
            Node::Leaf(b) => Node::Leaf(b),
            Node::Query { index, zero, one } => Node::Query {
                index,
                zero: zero + offset,
                one: one + offset,
            },
        }));
        offset
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// The complete tree computing the parity of coordinates `0..len`.
    pub fn parity(len: usize) -> Self {
        fn build(i: usize, len: usize, acc: bool) -> DecisionTree {
            if i == len {
                DecisionTree::leaf(acc)
            } else {
                DecisionTree::query(i, build(i + 1, len, acc), build(i + 1, len, !acc))
            }
        }
        build(0, len, false)
    }

    /// A random tree over `input_len` coordinates of depth at most
    /// `max_depth`, never reading a coordinate twice on a path.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, input_len: usize, max_depth: usize) -> Self {
        fn build<R: Rng + ?Sized>(
            rng: &mut R,
            input_len: usize,
            left: usize,
            path: &mut Vec<usize>,
        ) -> DecisionTree {
            if left == 0 || path.len() == input_len || rng.gen_ratio(1, 5) {
                return DecisionTree::leaf(rng.gen());
            }
            let index = loop {
                let i = rng.gen_range(0..input_len);
                if !path.contains(&i) {
                    break i;
                }
            };
            path.push(index);
            let zero = build(rng, input_len, left - 1, path);
            let one = build(rng, input_len, left - 1, path);
            path.pop();
            DecisionTree::query(index, zero, one)
        }
        build(rng, input_len, max_depth, &mut Vec::new())
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf(_) => 0,
                Node::Query { zero, one, .. } => 1 + go(nodes, zero).max(go(nodes, one)),
            }
        }
        go(&self.nodes, 0)
    }

    /// Largest coordinate read, plus one.
    pub fn arity(&self) -> usize {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Query { index, .. } => Some(index + 1),
                Node::Leaf(_) => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Whether every root-to-leaf path reads distinct coordinates.
    pub fn paths_distinct(&self) -> bool {
        fn go(nodes: &[Node], at: usize, path: &mut Vec<usize>) -> bool {
            match nodes[at] {
                Node::Leaf(_) => true,
                Node::Query { index, zero, one } => {
                    if path.contains(&index) {
                        return false;
                    }
                    path.push(index);
                    let ok = go(nodes, zero, path) && go(nodes, one, path);
                    path.pop();
                    ok
                }
            }
        }
        go(&self.nodes, 0, &mut Vec::new())
    }

    pub fn eval(&self, x: &Bits) -> bool {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf(b) => return b,
                Node::Query { index, zero, one } => at = if x.get(index) { one } else { zero },
            }
        }
    }

    /// Coordinates read on input `x`, in order.
    pub fn queries_on<'a>(&'a self, x: &'a Bits) -> impl Iterator<Item = usize> + 'a {
        let mut at = Some(0);
        core::iter::from_fn(move || match self.nodes[at?] {
            Node::Leaf(_) => {
                at = None;
                None
            }
            Node::Query { index, zero, one } => {
                at = Some(if x.get(index) { one } else { zero });
                Some(index)
            }
        })
    }

    /// `Pr_{x~U_g}[T(x) = 1]`, by walking the tree.
    pub fn prob_one(&self, g: &PartialAssignment) -> Prob {
        fn go(nodes: &[Node], at: usize, g: &PartialAssignment) -> Prob {
            match nodes[at] {
                Node::Leaf(b) => Prob::from(b as u128),
                Node::Query { index, zero, one } => match g.get(index) {
                    Some(false) => go(nodes, zero, g),
                    Some(true) => go(nodes, one, g),
                    None => (go(nodes, zero, g) + go(nodes, one, g)) / 2,
                },
            }
        }
        go(&self.nodes, 0, g)
    }

    /// `Var_{U_g}(T) = 2 p (1 - p)` with `p = Pr[T = 1]`.
    pub fn variance(&self, g: &PartialAssignment) -> Prob {
        let p = self.prob_one(g);
        p * (Prob::from(1) - p) * 2
    }

    /// `Inf_{U_g}(j, T)`, by walking the tree on `x` and `x xor e_j` in
    /// lockstep.
    pub fn influence(&self, g: &PartialAssignment, j: usize) -> Prob {
        // Reads of x and of x xor e_j share the assignment `seen`; free
        // coordinates are split the first time either walk reads them.
        fn go(nodes: &[Node], a: usize, b: usize, j: usize, seen: &mut PartialAssignment) -> Prob {
            let pick = match (nodes[a], nodes[b]) {
                (Node::Leaf(x), Node::Leaf(y)) => return Prob::from((x != y) as u128),
                (Node::Query { index, .. }, _) | (_, Node::Query { index, .. }) => index,
            };
            match seen.get(pick) {
                Some(v) => {
                    let step = |at: usize, flipped: bool| match nodes[at] {
                        Node::Query { index, zero, one } if index == pick => {
                            if v ^ (flipped && index == j) {
                                one
                            } else {
                                zero
                            }
                        }
                        _ => at,
                    };
                    go(nodes, step(a, false), step(b, true), j, seen)
                }
                None => {
                    let mut total = Prob::zero();
                    for v in [false, true] {
                        seen.fix(pick, v);
                        total += go(nodes, a, b, j, seen);
                    }
                    seen.unfix(pick);
                    total / 2
                }
            }
        }
        let mut seen = g.clone();
        go(&self.nodes, 0, 0, j, &mut seen)
    }

    /// `Δ_{U_g,S}(T)`, by walking the tree.
    pub fn avg_queries(&self, g: &PartialAssignment, inside: &[usize]) -> Prob {
        fn go(nodes: &[Node], at: usize, g: &PartialAssignment, inside: &[usize]) -> Prob {
            match nodes[at] {
                Node::Leaf(_) => Prob::zero(),
                Node::Query { index, zero, one } => {
                    let here = Prob::from((!inside.contains(&index)) as u128);
                    here + match g.get(index) {
                        Some(false) => go(nodes, zero, g, inside),
                        Some(true) => go(nodes, one, g, inside),
                        None => (go(nodes, zero, g, inside) + go(nodes, one, g, inside)) / 2,
                    }
                }
            }
        }
        go(&self.nodes, 0, g, inside)
    }
}

impl fmt::Display for DecisionTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(nodes: &[Node], at: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match nodes[at] {
                Node::Leaf(b) => write!(f, "leaf {}", b as u8),
                Node::Query { index, zero, one } => {
                    write!(f, "node {index} (")?;
                    go(nodes, zero, f)?;
                    f.write_str(") (")?;
                    go(nodes, one, f)?;
                    f.write_str(")")
                }
            }
        }
        go(&self.nodes, 0, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid decision tree at byte {position}: {message}")]
pub struct TreeParseError {
    pub position: usize,
    pub message: String,
}

struct TreeParser<'a> {
    src: &'a str,
    pos: usize,
}

impl TreeParser<'_> {
    fn err<T>(&self, message: &str) -> Result<T, TreeParseError> {
        Err(TreeParseError {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<usize, TreeParseError> {
        self.skip_ws();
        let digits = self.src[self.pos..]
            .bytes()
            .take_while(u8::is_ascii_digit)
            .count();
        if digits == 0 {
            return self.err("expected a number");
        }
        let text = &self.src[self.pos..self.pos + digits];
        self.pos += digits;
        text.parse().or_else(|_| self.err("number out of range"))
    }

    fn tree(&mut self) -> Result<DecisionTree, TreeParseError> {
        if self.eat("leaf") {
            match self.number()? {
                0 => Ok(DecisionTree::leaf(false)),
                1 => Ok(DecisionTree::leaf(true)),
                _ => self.err("leaf label must be 0 or 1"),
            }
        } else if self.eat("node") {
            let index = self.number()?;
            let zero = self.child()?;
            let one = self.child()?;
            Ok(DecisionTree::query(index, zero, one))
        } else {
            self.err("expected `leaf` or `node`")
        }
    }

    fn child(&mut self) -> Result<DecisionTree, TreeParseError> {
        if !self.eat("(") {
            return self.err("expected `(`");
        }
        let t = self.tree()?;
        if !self.eat(")") {
            return self.err("expected `)`");
        }
        Ok(t)
    }
}

impl FromStr for DecisionTree {
    type Err = TreeParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = TreeParser { src: s, pos: 0 };
        let t = p.tree()?;
        p.skip_ws();
        if p.pos != s.len() {
            return p.err("trailing input");
        }
        Ok(t)
    }
}

/// `F: {0,1}^N -> {0,1}^L` with one decision tree per output bit.
#[derive(Clone, Debug)]
pub struct TreeFunction {
    input_len: usize,
    trees: Vec<DecisionTree>,
    queries: u64,
}

impl TreeFunction {
    pub fn new(input_len: usize, trees: Vec<DecisionTree>) -> Self {
        assert!(trees.iter().all(|t| t.arity() <= input_len));
        TreeFunction {
            input_len,
            trees,
            queries: 0,
        }
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn depth(&self) -> usize {
        self.trees
            .iter()
            .map(DecisionTree::depth)
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &Bits) -> Bits {
        Bits::from_bools(&self.trees.iter().map(|t| t.eval(x)).collect::<Vec<_>>())
    }
}

impl BoolFunOracle for TreeFunction {
    fn input_len(&self) -> usize {
        self.input_len
    }

    fn output_len(&self) -> usize {
        self.trees.len()
    }

    fn query(&mut self, x: &Bits) -> Bits {
        self.queries += 1;
        self.eval(x)
    }

    fn query_count(&self) -> u64 {
        self.queries
    }
}
