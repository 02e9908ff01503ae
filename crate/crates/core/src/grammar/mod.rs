//! Run-length context-free grammars: rules, random access to expansions,
//! the grammar tree and Karp-Rabin signatures.

mod kr;
mod serial;
mod tree;

pub use kr::KrContext;
pub use serial::{grammar_from_bytes, grammar_to_bytes};
pub use tree::{GrammarTree, NodeKind, TreeNode};

use crate::{Error, Result};

/// Byte codes 0..=255 plus two sentinels that never occur in byte input.
pub const SIGMA: u32 = 258;
pub const HASH: u32 = 256;
pub const DOLLAR: u32 = 257;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Term(u32),
    Nt(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    /// `A -> B1 ... Bt`, t >= 1.
    Seq(Vec<Symbol>),
    /// `A -> B^t`, t >= 2.
    Run(Symbol, u64),
}

impl Rule {
    pub fn size(&self) -> u64 {
        match self {
            Rule::Seq(c) => c.len() as u64,
            Rule::Run(..) => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Rlcfg {
    rules: Vec<Rule>,
    start: u32,
    exp_len: Vec<u64>,
    // w_0 = 0, w_i = |exp(B1..Bi)| for sequence rules; empty for runs
    prefix: Vec<Vec<u64>>,
    topo: Vec<u32>,
}

impl Rlcfg {
    /// Checks the structural rule invariants and precomputes expansion
    /// lengths. Every rule must be reachable from `start`.
    pub fn new(rules: Vec<Rule>, start: u32) -> Result<Self> {
        let g = rules.len();
        if start as usize >= g {
            return Err(Error::Grammar(format!("start symbol {start} has no rule")));
        }
        for (a, r) in rules.iter().enumerate() {
            let check = |s: &Symbol| match *s {
                Symbol::Term(c) if c >= SIGMA => {
                    Err(Error::Grammar(format!("rule {a}: terminal code {c} out of range")))
                }
                Symbol::Nt(b) if b as usize >= g => Err(Error::Grammar(format!("rule {a}: undefined nonterminal {b}"))),
                _ => Ok(()),
            };
            match r {
                Rule::Seq(ch) => {
                    if ch.is_empty() {
                        return Err(Error::Grammar(format!("rule {a}: empty right-hand side")));
                    }
                    ch.iter().try_for_each(check)?;
                }
                Rule::Run(b, t) => {
                    if *t < 2 {
                        return Err(Error::Grammar(format!("rule {a}: run length {t} < 2")));
                    }
                    check(b)?;
                }
            }
        }

        // iterative DFS from start: post-order gives children before parents
        let mut state = vec![0u8; g]; // 0 new, 1 open, 2 done
        let mut topo = Vec::with_capacity(g);
        let mut stack: Vec<(u32, usize)> = vec![(start, 0)];
        state[start as usize] = 1;
        while let Some(&mut (a, ref mut k)) = stack.last_mut() {
            let next = match &rules[a as usize] {
                Rule::Seq(ch) => ch.get(*k).copied(),
                Rule::Run(b, _) => (*k == 0).then_some(*b),
            };
            *k += 1;
            match next {
                Some(Symbol::Nt(b)) => match state[b as usize] {
                    0 => {
                        state[b as usize] = 1;
                        stack.push((b, 0));
                    }
                    1 => return Err(Error::Grammar(format!("rule {a}: cycle through {b}"))),
                    _ => {}
                },
                Some(Symbol::Term(_)) => {}
                None => {
                    state[a as usize] = 2;
                    topo.push(a);
                    stack.pop();
                }
            }
        }
        if let Some(a) = state.iter().position(|&s| s != 2) {
            return Err(Error::Grammar(format!("rule {a}: unreachable from start")));
        }

        let mut exp_len = vec![0u64; g];
        let mut prefix = vec![Vec::new(); g];
        let sym_len = |s: &Symbol, exp_len: &[u64]| match *s {
            Symbol::Term(_) => 1,
            Symbol::Nt(b) => exp_len[b as usize],
        };
        for &a in &topo {
            let a = a as usize;
            match &rules[a] {
                Rule::Seq(ch) => {
                    let mut w = Vec::with_capacity(ch.len() + 1);
                    let mut acc = 0u64;
                    w.push(0);
                    for s in ch {
                        acc = acc
                            .checked_add(sym_len(s, &exp_len))
                            .ok_or_else(|| Error::Grammar(format!("rule {a}: length overflow")))?;
                        w.push(acc);
                    }
                    exp_len[a] = acc;
                    prefix[a] = w;
                }
                Rule::Run(b, t) => {
                    exp_len[a] = sym_len(b, &exp_len)
                        .checked_mul(*t)
                        .ok_or_else(|| Error::Grammar(format!("rule {a}: length overflow")))?;
                }
            }
        }
        Ok(Rlcfg { rules, start, exp_len, prefix, topo })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, a: u32) -> &Rule {
        &self.rules[a as usize]
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    /// Nonterminals ordered so that every rule comes after its children.
    pub fn topo_order(&self) -> &[u32] {
        &self.topo
    }

    /// Prefix lengths `w_0..w_t` of a sequence rule.
    pub fn child_offsets(&self, a: u32) -> &[u64] {
        &self.prefix[a as usize]
    }

    pub fn len(&self, s: Symbol) -> u64 {
        match s {
            Symbol::Term(_) => 1,
            Symbol::Nt(a) => self.exp_len[a as usize],
        }
    }

    /// Length of the generated text.
    pub fn text_len(&self) -> u64 {
        self.exp_len[self.start as usize]
    }

    pub fn is_empty(&self) -> bool {
        self.text_len() == 0
    }

    /// Grammar size: sum of right-hand side lengths, 2 per run rule.
    pub fn size(&self) -> u64 {
        self.rules.iter().map(Rule::size).sum()
    }

    /// True iff the grammar generates exactly `text`. On mismatch the error
    /// names the position of the first differing character.
    pub fn validate(&self, text: &[u32]) -> Result<()> {
        let n = self.text_len();
        if n != text.len() as u64 {
            return Err(Error::Grammar(format!(
                "start rule {} expands to {} characters, text has {}",
                self.start,
                n,
                text.len()
            )));
        }
        let exp = self.extract(Symbol::Nt(self.start), 0, n);
        if let Some(p) = exp.iter().zip(text).position(|(a, b)| a != b) {
            return Err(Error::Grammar(format!(
                "expansion of start rule {} differs from text at position {}",
                self.start,
                p + 1
            )));
        }
        Ok(())
    }

    /// `exp(sym)[from..from+len]`. Bounds are the caller's responsibility.
    pub fn extract(&self, sym: Symbol, from: u64, len: u64) -> Vec<u32> {
        let mut out = Vec::with_capacity(len as usize);
        self.extract_into(sym, from, len, &mut out);
        out
    }

    pub fn extract_into(&self, sym: Symbol, from: u64, len: u64, out: &mut Vec<u32>) {
        debug_assert!(from + len <= self.len(sym));
        let mut stack = vec![(sym, from, len)];
        while let Some((s, f, l)) = stack.pop() {
            if l == 0 {
                continue;
            }
            let a = match s {
                Symbol::Term(c) => {
                    out.push(c);
                    continue;
                }
                Symbol::Nt(a) => a as usize,
            };
            let mark = stack.len();
            let end = f + l;
            match &self.rules[a] {
                Rule::Seq(ch) => {
                    let w = &self.prefix[a];
                    let mut i = w.partition_point(|&x| x <= f) - 1;
                    let mut pos = f;
                    while pos < end {
                        let stop = end.min(w[i + 1]);
                        stack.push((ch[i], pos - w[i], stop - pos));
                        pos = stop;
                        i += 1;
                    }
                }
                Rule::Run(b, _) => {
                    let bl = self.len(*b);
                    let mut pos = f;
                    while pos < end {
                        let cs = pos / bl * bl;
                        let stop = end.min(cs + bl);
                        stack.push((*b, pos - cs, stop - pos));
                        pos = stop;
                    }
                }
            }
            stack[mark..].reverse();
        }
    }

    /// Single character `exp(sym)[off]`, by one root-to-leaf descent.
    pub fn char_at(&self, mut sym: Symbol, mut off: u64) -> u32 {
        loop {
            match sym {
                Symbol::Term(c) => return c,
                Symbol::Nt(a) => match &self.rules[a as usize] {
                    Rule::Seq(ch) => {
                        let w = &self.prefix[a as usize];
                        let i = w.partition_point(|&x| x <= off) - 1;
                        off -= w[i];
                        sym = ch[i];
                    }
                    Rule::Run(b, _) => {
                        off %= self.len(*b);
                        sym = *b;
                    }
                },
            }
        }
    }

    pub fn expansion_prefix(&self, sym: Symbol, len: u64) -> Result<Vec<u32>> {
        if len > self.len(sym) {
            return Err(Error::Range(format!("prefix length {len} exceeds |exp| = {}", self.len(sym))));
        }
        Ok(self.extract(sym, 0, len))
    }

    pub fn expansion_suffix(&self, sym: Symbol, len: u64) -> Result<Vec<u32>> {
        let l = self.len(sym);
        if len > l {
            return Err(Error::Range(format!("suffix length {len} exceeds |exp| = {l}")));
        }
        Ok(self.extract(sym, l - len, len))
    }

    /// `T[i..j]`, 1-based inclusive.
    pub fn access(&self, i: u64, j: u64) -> Result<Vec<u32>> {
        let n = self.text_len();
        if i == 0 || i > j || j > n {
            return Err(Error::Range(format!("[{i}, {j}] not within [1, {n}]")));
        }
        Ok(self.extract(Symbol::Nt(self.start), i - 1, j - i + 1))
    }

    /// The whole text.
    pub fn expand(&self) -> Vec<u32> {
        self.extract(Symbol::Nt(self.start), 0, self.text_len())
    }
}

/// Maps bytes to terminal codes.
pub fn terminals(bytes: &[u8]) -> Vec<u32> {
    bytes.iter().map(|&b| b as u32).collect()
}

/// Inverse of [`terminals`]; sentinels have no byte form.
pub fn to_bytes(codes: &[u32]) -> Option<Vec<u8>> {
    codes.iter().map(|&c| u8::try_from(c).ok()).collect()
}
