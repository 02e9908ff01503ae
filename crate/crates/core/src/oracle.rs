//! Reference answers computed straight from the definitions, for checking
//! the index on samples. Slow by intent: substring search runs on a plain
//! suffix array sorted by comparison.

use std::collections::BTreeMap;

use crate::apps::{OverlapEdge, RlzPhrase};
use crate::mem::MemRecord;
use crate::sam::SuffixAutomaton;

/// A text with its suffixes sorted.
pub struct NaiveIndex {
    text: Vec<u32>,
    sa: Vec<u32>,
}

impl NaiveIndex {
    pub fn new(text: &[u32]) -> Self {
        let mut sa: Vec<u32> = (0..text.len() as u32).collect();
        sa.sort_by(|&a, &b| text[a as usize..].cmp(&text[b as usize..]));
        NaiveIndex { text: text.to_vec(), sa }
    }

    pub fn text(&self) -> &[u32] {
        &self.text
    }

    // suffix-array interval of suffixes starting with s
    fn interval(&self, s: &[u32]) -> (usize, usize) {
        let key = |x: u32| {
            let suf = &self.text[x as usize..];
            &suf[..s.len().min(suf.len())]
        };
        let lo = self.sa.partition_point(|&x| key(x) < s);
        let hi = self.sa.partition_point(|&x| key(x) <= s);
        (lo, hi)
    }

    pub fn count(&self, s: &[u32]) -> u64 {
        if s.is_empty() {
            return self.text.len() as u64 + 1;
        }
        let (lo, hi) = self.interval(s);
        (hi - lo) as u64
    }

    pub fn occurs(&self, s: &[u32]) -> bool {
        self.count(s) > 0
    }

    /// 1-based start of the leftmost occurrence.
    pub fn first(&self, s: &[u32]) -> Option<u64> {
        let (lo, hi) = self.interval(s);
        self.sa[lo..hi].iter().min().map(|&x| x as u64 + 1)
    }

    /// All 1-based starts, ascending.
    pub fn positions(&self, s: &[u32]) -> Vec<u64> {
        let (lo, hi) = self.interval(s);
        let mut v: Vec<u64> = self.sa[lo..hi].iter().map(|&x| x as u64 + 1).collect();
        v.sort_unstable();
        v
    }
}

/// Occurrences of `p` in `text` by scanning.
pub fn naive_count(text: &[u32], p: &[u32]) -> u64 {
    if p.is_empty() {
        return text.len() as u64 + 1;
    }
    if p.len() > text.len() {
        return 0;
    }
    text.windows(p.len()).filter(|w| *w == p).count() as u64
}

/// Longest prefix of each `P[q..]` occurring at least `k` times.
fn longest_with(nx: &NaiveIndex, p: &[u32], k: u64) -> Vec<usize> {
    let m = p.len();
    let mut out = vec![0; m];
    let mut l = 0usize;
    for q in 0..m {
        l = l.saturating_sub(1);
        while q + l < m && nx.count(&p[q..q + l + 1]) >= k {
            l += 1;
        }
        out[q] = l;
    }
    out
}

/// Matching statistics: per position, the longest prefix of `P[q..]` in T.
pub fn naive_ms(text: &[u32], p: &[u32]) -> Vec<u64> {
    let nx = NaiveIndex::new(text);
    longest_with(&nx, p, 1).into_iter().map(|x| x as u64).collect()
}

/// `P[i..j]` occurring at least `k` times, extendable on neither side
/// without dropping below `k`.
pub fn naive_kmems(text: &[u32], p: &[u32], k: u64) -> Vec<MemRecord> {
    let nx = NaiveIndex::new(text);
    naive_kmems_with(&nx, p, k)
}

pub fn naive_kmems_with(nx: &NaiveIndex, p: &[u32], k: u64) -> Vec<MemRecord> {
    let ls = longest_with(nx, p, k);
    let mut out = Vec::new();
    for (q, &l) in ls.iter().enumerate() {
        if l == 0 {
            continue;
        }
        let (i, j) = (q + 1, q + l);
        // right-maximal by construction; left-maximal when P[i-1..j] falls short
        if i > 1 && nx.count(&p[i - 2..j]) >= k {
            continue;
        }
        let start = nx.first(&p[q..j]).unwrap();
        out.push(MemRecord { i, j, p: start + l as u64 - 1 });
    }
    out
}

pub fn naive_mems(text: &[u32], p: &[u32]) -> Vec<MemRecord> {
    naive_kmems(text, p, 1)
}

/// MEMs occurring at most `k` times in T and at most `k` times in P.
pub fn naive_krare(text: &[u32], p: &[u32], k: u64) -> Vec<MemRecord> {
    naive_krare_with(&NaiveIndex::new(text), p, k)
}

pub fn naive_krare_with(nx: &NaiveIndex, p: &[u32], k: u64) -> Vec<MemRecord> {
    naive_kmems_with(nx, p, 1)
        .into_iter()
        .filter(|m| {
            let s = &p[m.i - 1..m.j];
            nx.count(s) <= k && naive_count(p, s) <= k
        })
        .collect()
}

pub fn naive_mums(text: &[u32], p: &[u32]) -> Vec<MemRecord> {
    naive_krare(text, p, 1)
}

/// MEMs by the four-phase walk over the suffix automaton of T: scan while
/// the window is empty, extend, report, then shorten through suffix links
/// until the next character fits. `step(i, j)` sees every window.
pub fn stree_walk(text: &[u32], p: &[u32], mut step: impl FnMut(usize, usize)) -> Vec<MemRecord> {
    let sa = SuffixAutomaton::new(text);
    let m = p.len();
    let (mut i, mut j) = (1usize, 0usize);
    let (mut v, mut len) = (0u32, 0u32);
    let mut out = Vec::new();
    while j < m {
        if len == 0 && sa.step(0, p[i - 1]).is_none() {
            i += 1;
            j += 1;
            step(i, j);
            continue;
        }
        while j < m {
            let Some(w) = sa.step(v, p[j]) else { break };
            v = w;
            len += 1;
            j += 1;
            step(i, j);
        }
        out.push(MemRecord { i, j, p: sa.first_end(v) as u64 + 1 });
        while i <= j && j < m && sa.step(v, p[j]).is_none() {
            i += 1;
            len -= 1;
            if v != 0 && len <= sa.max_len(sa.link(v)) {
                v = sa.link(v);
            }
            step(i, j);
        }
    }
    out
}

pub fn stree_mems(text: &[u32], p: &[u32]) -> Vec<MemRecord> {
    stree_walk(text, p, |_, _| {})
}

/// Greedy left-to-right parse of `t` into the longest prefixes occurring
/// in `r`, each mapped to its leftmost occurrence. `None` if some symbol of
/// `t` is absent from `r`.
pub fn naive_rlz(r: &[u32], t: &[u32]) -> Option<Vec<RlzPhrase>> {
    let nx = NaiveIndex::new(r);
    let mut out = Vec::new();
    let mut q = 0;
    while q < t.len() {
        let mut l = 0;
        while q + l < t.len() && nx.occurs(&t[q..q + l + 1]) {
            l += 1;
        }
        if l == 0 {
            return None;
        }
        let a = nx.first(&t[q..q + l]).unwrap();
        out.push(RlzPhrase { a, b: a + l as u64 - 1 });
        q += l;
    }
    Some(out)
}

/// Suffix-prefix overlaps between distinct reads (1-based ids) of length at
/// least `lmin`: all of them, or the longest per ordered pair.
pub fn naive_overlaps(reads: &[Vec<u32>], lmin: usize, all: bool) -> Vec<OverlapEdge> {
    let mut best: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (u, ru) in reads.iter().enumerate() {
        for (v, rv) in reads.iter().enumerate() {
            if u == v {
                continue;
            }
            for l in lmin.max(1)..=ru.len().min(rv.len()) {
                if ru[ru.len() - l..] == rv[..l] {
                    best.entry((u + 1, v + 1)).or_default().push(l);
                }
            }
        }
    }
    let mut out = Vec::new();
    for ((u, v), ls) in best {
        if all {
            out.extend(ls.iter().map(|&len| OverlapEdge { from: u, to: v, len }));
        } else {
            out.push(OverlapEdge { from: u, to: v, len: *ls.last().unwrap() });
        }
    }
    out.sort_unstable();
    out
}
