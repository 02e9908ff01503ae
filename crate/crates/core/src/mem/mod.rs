//! Maximal exact matches of a pattern against an indexed text, and the
//! queries built from them.

mod lcg;
mod ms;
mod scan;

pub use lcg::{find_mems_lcg, find_mems_lcg_stats, LcgStats};
pub use ms::{collection_mems, matching_statistics, mems_from_ms, MatchingStats};
pub use scan::{scan_all, Active, Scan};

use crate::index::Index;
use crate::sam::{SuffixAutomaton, Walker};

/// `P[i..j]` (1-based, inclusive) occurs in the text ending at `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MemRecord {
    pub i: usize,
    pub j: usize,
    pub p: u64,
}

impl MemRecord {
    pub fn len(&self) -> usize {
        self.j + 1 - self.i
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// 1-based text start of the reported occurrence.
    pub fn text_start(&self) -> u64 {
        self.p + 1 - self.len() as u64
    }
}

/// MEMs with the scan over any grammar.
pub fn find_mems_quadratic(idx: &Index, p: &[u32]) -> Vec<MemRecord> {
    chunked(idx, p, |q| scan_all(idx, q, 1))
}

/// MEMs with the fastest algorithm the index supports.
pub fn find_mems(idx: &Index, p: &[u32]) -> Vec<MemRecord> {
    match find_mems_lcg(idx, p) {
        Ok(v) => v,
        Err(_) => find_mems_quadratic(idx, p),
    }
}

/// Maximal substrings of `p` occurring at least `k` times in the text.
pub fn find_kmems(idx: &Index, p: &[u32], k: u64) -> Vec<MemRecord> {
    assert!(k >= 1, "k must be positive");
    chunked(idx, p, |q| scan_all(idx, q, k))
}

/// MEMs occurring at most `k` times in the text and at most `k` times in `p`.
pub fn find_krare(idx: &Index, p: &[u32], k: u64) -> Vec<MemRecord> {
    assert!(k >= 1, "k must be positive");
    let mems = find_mems(idx, p);
    if mems.is_empty() {
        return mems;
    }
    let sa = SuffixAutomaton::new(p);
    let mut w = Walker::new();
    // the walker spells p[lo..hi] (0-based); windows only move right
    let (mut lo, mut hi) = (0usize, 0usize);
    let mut out = Vec::new();
    for m in mems {
        while hi < m.j {
            let ok = w.push(&sa, p[hi]);
            debug_assert!(ok);
            hi += 1;
        }
        while lo < m.i - 1 {
            w.pop_front(&sa);
            lo += 1;
        }
        if w.count(&sa) <= k && idx.count_bounded(&p[m.i - 1..m.j], k).is_some() {
            out.push(m);
        }
    }
    out
}

/// Maximal unique matches: 1-rare MEMs.
pub fn find_mums(idx: &Index, p: &[u32]) -> Vec<MemRecord> {
    find_krare(idx, p, 1)
}

/// True iff the text at the record's position spells `P[i..j]`.
pub fn verify(idx: &Index, p: &[u32], m: &MemRecord) -> bool {
    if m.i == 0 || m.i > m.j || m.j > p.len() || m.p > idx.text_len() || (m.p as usize) < m.len() {
        return false;
    }
    idx.grammar().access(m.text_start(), m.p).map(|s| s[..] == p[m.i - 1..m.j]).unwrap_or(false)
}

/// Runs `f` on overlapping slabs when the pattern is much longer than the
/// text. No match is longer than the text, so every match lies strictly
/// inside some slab, and slab matches that touch an inner slab border are
/// dropped.
fn chunked(idx: &Index, p: &[u32], f: impl Fn(&[u32]) -> Vec<MemRecord>) -> Vec<MemRecord> {
    let m = p.len();
    let n = idx.text_len() as usize;
    let width = 2 * n + 2;
    if m <= width {
        return f(p);
    }
    let mut out: Vec<MemRecord> = Vec::new();
    let mut s = 0;
    loop {
        let e = (s + width).min(m);
        for mut r in f(&p[s..e]) {
            if (r.i == 1 && s > 0) || (r.j == e - s && e < m) {
                continue;
            }
            r.i += s;
            r.j += s;
            if out.last().is_none_or(|l| (l.i, l.j) < (r.i, r.j)) {
                out.push(r);
            }
        }
        if e == m {
            break;
        }
        s += n;
    }
    out
}
