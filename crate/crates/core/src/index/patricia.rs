//! Patricia trees over a sorted multiset of grammar substrings.
//!
//! Leaves are the strings in rank order, each ending in a private
//! terminator, so equal strings become distinct leaves hanging from the
//! node of their common length. Edges store only their branching key; the
//! labels are read back from the grammar through the leftmost leaf.

use crate::binio::{Reader, Writer};
use crate::grammar::{Rlcfg, Symbol};
use crate::Result;

/// `exp(sym)[off..off+len]` in some grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StrRef {
    pub sym: Symbol,
    pub off: u64,
    pub len: u64,
}

/// A point of the trie: `depth` characters down the path to `node`, with
/// `depth` in `(depth(parent), depth(node)]` (or 0 at the root).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Locus {
    pub node: u32,
    pub depth: u64,
}

const TERMINATOR: u64 = 1 << 32;
pub const ROOT: u32 = 0;

#[derive(Clone, Debug)]
pub struct Patricia {
    depth: Vec<u64>,
    parent: Vec<u32>,
    lo: Vec<u32>,
    hi: Vec<u32>,
    child_start: Vec<u32>,
    child_key: Vec<u64>,
    child_node: Vec<u32>,
    leaf_node: Vec<u32>,
    strs: Vec<StrRef>,
    // rebuilt on load
    up: Vec<Vec<u32>>,
    first: Vec<u32>,
    euler: Vec<Vec<u32>>,
}

impl Patricia {
    /// `strs` sorted, `lcps[r]` the LCP of strings `r-1` and `r`, and
    /// `key_at(r, d)` the character at offset `d` of string `r`.
    pub fn build(strs: Vec<StrRef>, lcps: &[u64], key_at: impl Fn(usize, u64) -> u32) -> Self {
        let nleaf = strs.len();
        let mut depth = vec![0u64];
        let mut parent = vec![ROOT];
        let mut kids: Vec<Vec<u32>> = vec![Vec::new()];
        let mut leaf_node = Vec::with_capacity(nleaf);
        let mut stack = vec![ROOT];
        for r in 0..nleaf {
            let h = if r == 0 { 0 } else { lcps[r] };
            let mut last = None;
            while depth[*stack.last().unwrap() as usize] > h {
                last = stack.pop();
            }
            let top = *stack.last().unwrap();
            if depth[top as usize] < h {
                let last = last.expect("a deeper node was popped");
                let mid = depth.len() as u32;
                depth.push(h);
                parent.push(top);
                kids.push(vec![last]);
                let slot = kids[top as usize].iter().rposition(|&c| c == last).unwrap();
                kids[top as usize][slot] = mid;
                parent[last as usize] = mid;
                stack.push(mid);
            }
            let top = *stack.last().unwrap();
            let leaf = depth.len() as u32;
            depth.push(strs[r].len + 1);
            parent.push(top);
            kids.push(Vec::new());
            kids[top as usize].push(leaf);
            leaf_node.push(leaf);
            stack.push(leaf);
        }

        let nn = depth.len();
        let (mut lo, mut hi) = (vec![u32::MAX; nn], vec![0u32; nn]);
        for (r, &v) in leaf_node.iter().enumerate() {
            lo[v as usize] = r as u32;
            hi[v as usize] = r as u32;
        }
        // children hold larger ids than their parent except for split
        // nodes, so aggregate by explicit postorder
        for v in postorder(&kids) {
            for &c in &kids[v as usize] {
                lo[v as usize] = lo[v as usize].min(lo[c as usize]);
                hi[v as usize] = hi[v as usize].max(hi[c as usize]);
            }
        }
        let mut child_start = Vec::with_capacity(nn + 1);
        let mut child_key = Vec::new();
        let mut child_node = Vec::new();
        for v in 0..nn {
            child_start.push(child_key.len() as u32);
            let d = depth[v];
            let mut ks: Vec<(u64, u32)> = kids[v]
                .iter()
                .map(|&c| {
                    let r = lo[c as usize] as usize;
                    let key = if strs[r].len == d { TERMINATOR + r as u64 } else { key_at(r, d) as u64 };
                    (key, c)
                })
                .collect();
            ks.sort_unstable();
            child_key.extend(ks.iter().map(|e| e.0));
            child_node.extend(ks.iter().map(|e| e.1));
        }
        child_start.push(child_key.len() as u32);
        let mut t = Patricia {
            depth,
            parent,
            lo,
            hi,
            child_start,
            child_key,
            child_node,
            leaf_node,
            strs,
            up: Vec::new(),
            first: Vec::new(),
            euler: Vec::new(),
        };
        t.derive();
        t
    }

    fn derive(&mut self) {
        let nn = self.depth.len();
        let mut up = vec![self.parent.clone()];
        up[0][0] = ROOT;
        while (1usize << up.len()) < nn {
            let prev = up.last().unwrap();
            let next: Vec<u32> = (0..nn).map(|v| prev[prev[v] as usize]).collect();
            up.push(next);
        }
        self.up = up;

        let mut first = vec![0u32; nn];
        let mut tour = Vec::with_capacity(2 * nn);
        let mut stack = vec![(ROOT, 0u32)];
        while let Some(top) = stack.last_mut() {
            let (v, next) = *top;
            if next == 0 {
                first[v as usize] = tour.len() as u32;
            }
            tour.push(v);
            let (a, b) = (self.child_start[v as usize], self.child_start[v as usize + 1]);
            if a + next < b {
                top.1 += 1;
                let c = self.child_node[(a + next) as usize];
                stack.push((c, 0));
            } else {
                stack.pop();
            }
        }
        let mut euler = vec![tour];
        let mut w = 1;
        while 2 * w <= euler[0].len() {
            let prev = euler.last().unwrap();
            let next: Vec<u32> = (0..prev.len() - w).map(|i| self.shallower(prev[i], prev[i + w])).collect();
            euler.push(next);
            w *= 2;
        }
        self.first = first;
        self.euler = euler;
    }

    fn shallower(&self, a: u32, b: u32) -> u32 {
        if self.depth[b as usize] < self.depth[a as usize] {
            b
        } else {
            a
        }
    }

    pub fn num_leaves(&self) -> usize {
        self.strs.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.depth.len()
    }

    pub fn root(&self) -> Locus {
        Locus { node: ROOT, depth: 0 }
    }

    pub fn depth(&self, v: u32) -> u64 {
        self.depth[v as usize]
    }

    pub fn parent(&self, v: u32) -> u32 {
        self.parent[v as usize]
    }

    /// Leaf ranks below `v`, inclusive; `lo > hi` for an empty tree.
    pub fn range(&self, v: u32) -> (u32, u32) {
        (self.lo[v as usize], self.hi[v as usize])
    }

    pub fn leaf(&self, rank: u32) -> u32 {
        self.leaf_node[rank as usize]
    }

    pub fn string(&self, rank: u32) -> StrRef {
        self.strs[rank as usize]
    }

    pub fn strings(&self) -> &[StrRef] {
        &self.strs
    }

    /// Child of `v` by a non-terminator key.
    pub fn child(&self, v: u32, c: u32) -> Option<u32> {
        let (a, b) = (self.child_start[v as usize] as usize, self.child_start[v as usize + 1] as usize);
        let keys = &self.child_key[a..b];
        keys.binary_search(&(c as u64)).ok().map(|x| self.child_node[a + x])
    }

    /// Descends from the verified locus `from` comparing only branching
    /// characters of `probe` (which starts at depth 0).
    pub fn blind(&self, from: Locus, probe: &[u32]) -> u32 {
        let mut v = from.node;
        loop {
            let d = self.depth[v as usize];
            if d >= probe.len() as u64 {
                return v;
            }
            match self.child(v, probe[d as usize]) {
                Some(c) => v = c,
                None => return v,
            }
        }
    }

    /// LCP of `probe` with the leftmost string below `v`, knowing the
    /// first `known` characters agree.
    pub fn lcp_with(&self, g: &Rlcfg, v: u32, probe: &[u32], known: u64) -> u64 {
        let s = self.strs[self.lo[v as usize] as usize];
        let limit = s.len.min(probe.len() as u64);
        let mut d = known.min(limit);
        let mut chunk = 16u64;
        let mut buf = Vec::new();
        while d < limit {
            let take = chunk.min(limit - d);
            buf.clear();
            g.extract_into(s.sym, s.off + d, take, &mut buf);
            let probe_part = &probe[d as usize..(d + take) as usize];
            match buf.iter().zip(probe_part).position(|(a, b)| a != b) {
                Some(x) => return d + x as u64,
                None => d += take,
            }
            chunk = chunk.saturating_mul(2);
        }
        d
    }

    /// Deepest locus whose string is a prefix of `probe`.
    pub fn locate(&self, g: &Rlcfg, probe: &[u32]) -> Locus {
        self.locate_from(g, self.root(), probe)
    }

    /// As [`Patricia::locate`], resuming from a locus already known to
    /// spell a prefix of `probe`.
    pub fn locate_from(&self, g: &Rlcfg, from: Locus, probe: &[u32]) -> Locus {
        if self.strs.is_empty() {
            return self.root();
        }
        let v = self.blind(from, probe);
        let l = self.lcp_with(g, v, probe, from.depth);
        self.ancestor_at(v, l)
    }

    /// Weighted ancestor: the highest ancestor of `v` with depth `>= d`,
    /// as a locus at depth exactly `d`.
    pub fn ancestor_at(&self, mut v: u32, d: u64) -> Locus {
        debug_assert!(d <= self.depth[v as usize]);
        for lvl in self.up.iter().rev() {
            let u = lvl[v as usize];
            if self.depth[u as usize] >= d {
                v = u;
            }
        }
        Locus { node: v, depth: d }
    }

    /// Moves one character down without reading the text; the caller
    /// guarantees the path continues with `c` when inside an edge.
    pub fn step(&self, at: Locus, c: u32) -> Option<Locus> {
        if at.depth < self.depth[at.node as usize] {
            return Some(Locus { node: at.node, depth: at.depth + 1 });
        }
        self.child(at.node, c).map(|node| Locus { node, depth: at.depth + 1 })
    }

    /// Moves one character down by `c`, reading the text inside an edge.
    pub fn step_checked(&self, g: &Rlcfg, at: Locus, c: u32) -> Option<Locus> {
        if at.depth < self.depth[at.node as usize] {
            let s = self.strs[self.lo[at.node as usize] as usize];
            if at.depth >= s.len || g.char_at(s.sym, s.off + at.depth) != c {
                return None;
            }
            return Some(Locus { node: at.node, depth: at.depth + 1 });
        }
        self.child(at.node, c).map(|node| Locus { node, depth: at.depth + 1 })
    }

    /// The nearest explicit proper ancestor.
    pub fn up_explicit(&self, at: Locus) -> Locus {
        if at.node == ROOT {
            return at;
        }
        let p = self.parent[at.node as usize];
        Locus { node: p, depth: self.depth[p as usize] }
    }

    /// One character up.
    pub fn up_one(&self, at: Locus) -> Locus {
        debug_assert!(at.depth > 0);
        self.ancestor_at(at.node, at.depth - 1)
    }

    pub fn lca(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (self.first[a as usize] as usize, self.first[b as usize] as usize);
        let (l, r) = if x <= y { (x, y + 1) } else { (y, x + 1) };
        let k = (usize::BITS - 1 - (r - l).leading_zeros()) as usize;
        self.shallower(self.euler[k][l], self.euler[k][r - (1 << k)])
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.u64s(&self.depth);
        w.u32s(&self.parent);
        w.u32s(&self.lo);
        w.u32s(&self.hi);
        w.u32s(&self.child_start);
        w.u64s(&self.child_key);
        w.u32s(&self.child_node);
        w.u32s(&self.leaf_node);
        w.u64(self.strs.len() as u64);
        for s in &self.strs {
            w.u32(encode_sym(s.sym));
            w.u64(s.off);
            w.u64(s.len);
        }
    }

    pub(crate) fn read(r: &mut Reader) -> Result<Self> {
        let bad = |what: &str| crate::Error::Format(format!("patricia: {what}"));
        let depth = r.u64s()?;
        let parent = r.u32s()?;
        let lo = r.u32s()?;
        let hi = r.u32s()?;
        let child_start = r.u32s()?;
        let child_key = r.u64s()?;
        let child_node = r.u32s()?;
        let leaf_node = r.u32s()?;
        let ns = r.u64()? as usize;
        let nn = depth.len();
        if nn == 0
            || [parent.len(), lo.len(), hi.len()].iter().any(|&l| l != nn)
            || child_start.len() != nn + 1
            || child_key.len() != child_node.len()
            || *child_start.last().unwrap() as usize != child_key.len()
            || child_start.windows(2).any(|w| w[0] > w[1])
            || leaf_node.len() != ns
            || parent.iter().chain(&child_node).chain(&leaf_node).any(|&v| v as usize >= nn)
        {
            return Err(bad("inconsistent node arrays"));
        }
        let mut strs = Vec::with_capacity(ns.min(1 << 20));
        for _ in 0..ns {
            let sym = decode_sym(r.u32()?);
            strs.push(StrRef { sym, off: r.u64()?, len: r.u64()? });
        }
        let mut t = Patricia {
            depth,
            parent,
            lo,
            hi,
            child_start,
            child_key,
            child_node,
            leaf_node,
            strs,
            up: Vec::new(),
            first: Vec::new(),
            euler: Vec::new(),
        };
        t.derive();
        Ok(t)
    }
}

pub(crate) fn encode_sym(s: Symbol) -> u32 {
    match s {
        Symbol::Term(c) => c,
        Symbol::Nt(a) => a | 1 << 31,
    }
}

pub(crate) fn decode_sym(x: u32) -> Symbol {
    if x & 1 << 31 != 0 {
        Symbol::Nt(x & !(1 << 31))
    } else {
        Symbol::Term(x)
    }
}

fn postorder(kids: &[Vec<u32>]) -> Vec<u32> {
    let mut out = Vec::with_capacity(kids.len());
    let mut stack = vec![(ROOT, false)];
    while let Some((v, done)) = stack.pop() {
        if done {
            out.push(v);
        } else {
            stack.push((v, true));
            stack.extend(kids[v as usize].iter().map(|&c| (c, false)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::Rule;
    use proptest::prelude::*;

    /// A trie over plain strings stored as one grammar rule per string.
    fn trie_of(strs: &[Vec<u32>]) -> (Patricia, Rlcfg, Vec<Vec<u32>>) {
        let mut sorted = strs.to_vec();
        sorted.sort();
        let mut rules: Vec<Rule> = sorted
            .iter()
            .map(|s| {
                Rule::Seq(if s.is_empty() {
                    vec![Symbol::Term(0)]
                } else {
                    s.iter().map(|&c| Symbol::Term(c)).collect()
                })
            })
            .collect();
        let start = rules.len() as u32;
        rules.push(Rule::Seq((0..start).map(Symbol::Nt).collect()));
        let g = Rlcfg::new(rules, start).unwrap();
        let refs: Vec<StrRef> = sorted
            .iter()
            .enumerate()
            .map(|(r, s)| StrRef { sym: Symbol::Nt(r as u32), off: 0, len: s.len() as u64 })
            .collect();
        let lcps: Vec<u64> =
            (0..sorted.len()).map(|r| if r == 0 { 0 } else { lcp(&sorted[r - 1], &sorted[r]) as u64 }).collect();
        let t = Patricia::build(refs, &lcps, |r, d| sorted[r][d as usize]);
        (t, g, sorted)
    }

    fn lcp(a: &[u32], b: &[u32]) -> usize {
        a.iter().zip(b).take_while(|(x, y)| x == y).count()
    }

    fn spell(t: &Patricia, sorted: &[Vec<u32>], at: Locus) -> Vec<u32> {
        let r = t.range(at.node).0 as usize;
        sorted[r][..at.depth as usize].to_vec()
    }

    #[test]
    fn small_trie() {
        let strs: Vec<Vec<u32>> =
            ["ab", "abc", "abd", "b", "ab", ""].iter().map(|s| s.bytes().map(|b| b as u32).collect()).collect();
        let (t, g, sorted) = trie_of(&strs);
        assert_eq!(t.num_leaves(), 6);
        let probe: Vec<u32> = "abx".bytes().map(|b| b as u32).collect();
        let at = t.locate(&g, &probe);
        assert_eq!(at.depth, 2);
        assert_eq!(t.range(at.node), (1, 4));
        assert_eq!(t.locate(&g, &[]), t.root());
        // a full leaf string lands on the node of its length
        let at = t.locate(&g, &sorted[4]);
        assert_eq!(at.depth, 3);
        assert_eq!(t.range(at.node), (4, 4));
        assert_eq!(t.ancestor_at(at.node, 0), t.root());
        assert_eq!(t.ancestor_at(at.node, 3), at);
        assert_eq!(t.ancestor_at(at.node, 1).depth, 1);
        assert_eq!(t.range(t.ancestor_at(at.node, 1).node), (1, 4));
    }

    proptest! {
        #[test]
        fn locate_matches_best_lcp(strs in proptest::collection::vec(proptest::collection::vec(0u32..3, 0..8), 1..25),
                                   probes in proptest::collection::vec(proptest::collection::vec(0u32..3, 0..10), 1..10)) {
            let (t, g, sorted) = trie_of(&strs);
            for p in probes {
                let best = sorted.iter().map(|s| lcp(s, &p)).max().unwrap();
                let at = t.locate(&g, &p);
                prop_assert_eq!(at.depth as usize, best);
                prop_assert_eq!(spell(&t, &sorted, at), p[..best].to_vec());
                let (lo, hi) = t.range(at.node);
                for (r, s) in sorted.iter().enumerate() {
                    let inside = lo as usize <= r && r <= hi as usize;
                    prop_assert_eq!(inside, lcp(s, &p) >= best);
                }
                // resuming from any verified prefix gives the same answer
                let mid = t.ancestor_at(at.node, at.depth / 2);
                prop_assert_eq!(t.locate_from(&g, mid, &p), at);
            }
        }

        #[test]
        fn lca_and_steps(strs in proptest::collection::vec(proptest::collection::vec(0u32..3, 0..8), 1..25)) {
            let (t, _g, sorted) = trie_of(&strs);
            for a in 0..sorted.len() {
                for b in 0..sorted.len() {
                    let v = t.lca(t.leaf(a as u32), t.leaf(b as u32));
                    let (lo, hi) = t.range(v);
                    prop_assert!(lo as usize <= a.min(b) && a.max(b) <= hi as usize);
                    for c in t.child_start[v as usize]..t.child_start[v as usize + 1] {
                        let (l2, h2) = t.range(t.child_node[c as usize]);
                        prop_assert!(!(l2 as usize <= a.min(b) && a.max(b) <= h2 as usize));
                    }
                }
                // walking a string char by char reaches its leaf's locus
                let mut at = t.root();
                for &c in &sorted[a] {
                    at = t.step(at, c).unwrap();
                }
                let (lo, hi) = t.range(at.node);
                prop_assert!(lo as usize <= a && a <= hi as usize);
            }
        }
    }
}
