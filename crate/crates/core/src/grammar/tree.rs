use super::{Rlcfg, Rule, Symbol};

pub const NO_PARENT: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Internal,
    Leaf,
    /// The `B^[t-1]` leaf standing for copies 2..t of a run `A -> B^t`.
    RunLeaf {
        copies: u64,
    },
}

#[derive(Clone, Debug)]
pub struct TreeNode {
    pub label: Symbol,
    pub kind: NodeKind,
    pub parent: u32,
    /// Offset of this node's span inside the parent's expansion.
    pub rel: u64,
    /// 0-based text position where the span starts.
    pub start: u64,
    /// Children are stored contiguously: `first_child..first_child+n_children`.
    pub first_child: u32,
    pub n_children: u32,
}

impl TreeNode {
    pub fn children(&self) -> std::ops::Range<u32> {
        self.first_child..self.first_child + self.n_children
    }
}

/// Pruned parse tree: the leftmost node labeled A stays internal, all other
/// A-labeled nodes become leaves, and run rules keep only their first child
/// plus one run leaf.
#[derive(Clone, Debug)]
pub struct GrammarTree {
    nodes: Vec<TreeNode>,
    internal_of: Vec<u32>,
    // every node labeled Nt(a), run leaves with base Nt(a) included
    occ: Vec<Vec<u32>>,
    leaves: Vec<u32>,
    phrase_ends: Vec<u64>,
}

impl GrammarTree {
    pub fn new(g: &Rlcfg) -> Self {
        let nr = g.rules().len();
        let root = Symbol::Nt(g.start());
        let mut nodes = vec![TreeNode {
            label: root,
            kind: NodeKind::Leaf,
            parent: NO_PARENT,
            rel: 0,
            start: 0,
            first_child: 0,
            n_children: 0,
        }];
        let mut internal_of = vec![NO_PARENT; nr];
        let mut occ = vec![Vec::new(); nr];
        let mut leaves = Vec::new();
        let mut pending = vec![0u32];
        // kind is decided on pop; pops happen in preorder, so the first
        // A-labeled node popped is the leftmost
        while let Some(v) = pending.pop() {
            let label = nodes[v as usize].label;
            if let Symbol::Nt(a) = label {
                occ[a as usize].push(v);
            }
            let a = match label {
                Symbol::Nt(a) if internal_of[a as usize] == NO_PARENT => a,
                _ => {
                    if !matches!(nodes[v as usize].kind, NodeKind::RunLeaf { .. }) {
                        nodes[v as usize].kind = NodeKind::Leaf;
                    }
                    leaves.push(v);
                    continue;
                }
            };
            internal_of[a as usize] = v;
            let first = nodes.len() as u32;
            let vstart = nodes[v as usize].start;
            let mut kids: Vec<(Symbol, NodeKind, u64)> = Vec::new();
            match g.rule(a) {
                Rule::Seq(ch) => {
                    let w = g.child_offsets(a);
                    for (i, &c) in ch.iter().enumerate() {
                        kids.push((c, NodeKind::Leaf, w[i]));
                    }
                }
                Rule::Run(b, t) => {
                    kids.push((*b, NodeKind::Leaf, 0));
                    kids.push((*b, NodeKind::RunLeaf { copies: t - 1 }, g.len(*b)));
                }
            }
            let node = &mut nodes[v as usize];
            node.kind = NodeKind::Internal;
            node.first_child = first;
            node.n_children = kids.len() as u32;
            for (label, kind, rel) in kids {
                nodes.push(TreeNode {
                    label,
                    kind,
                    parent: v,
                    rel,
                    start: vstart + rel,
                    first_child: 0,
                    n_children: 0,
                });
            }
            pending.extend((first..nodes.len() as u32).rev());
        }
        let phrase_ends = leaves
            .iter()
            .map(|&v| {
                let nd = &nodes[v as usize];
                let copies = match nd.kind {
                    NodeKind::RunLeaf { copies } => copies,
                    _ => 1,
                };
                nd.start + copies * g.len(nd.label)
            })
            .collect();
        GrammarTree { nodes, internal_of, occ, leaves, phrase_ends }
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node(&self, v: u32) -> &TreeNode {
        &self.nodes[v as usize]
    }

    pub fn root(&self) -> u32 {
        0
    }

    /// The unique internal node of nonterminal `a`.
    pub fn internal_of(&self, a: u32) -> u32 {
        self.internal_of[a as usize]
    }

    /// All nodes labeled `a`, in preorder; the first is the internal one.
    pub fn occurrences(&self, a: u32) -> &[u32] {
        &self.occ[a as usize]
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> &[u32] {
        &self.leaves
    }

    /// 1-based end positions of the phrases, strictly increasing, last = n.
    pub fn phrase_ends(&self) -> &[u64] {
        &self.phrase_ends
    }
}
