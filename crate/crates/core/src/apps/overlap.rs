//! All-pairs suffix-prefix overlaps. The reads are indexed as one text,
//! each followed by a separator. Each read is then scanned as a pattern;
//! while its prefix `P[1..j]` occurs, one step with the separator is tried
//! on a copy of the scan: the occurrences of `P[1..j]$` end exactly at the
//! reads having `P[1..j]` as a suffix. The copy is then dropped.

use crate::grammar::DOLLAR;
use crate::index::Index;
use crate::mem::Scan;
use crate::Result;

/// Terminal code placed after every read.
pub const SEPARATOR: u32 = DOLLAR;

/// An edge `from -> to` (1-based read ids): the last `len` characters of
/// `from` are the first `len` of `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OverlapEdge {
    pub from: usize,
    pub to: usize,
    pub len: usize,
}

/// `r_1 $ r_2 $ ... r_N $`.
pub fn overlap_text(reads: &[Vec<u32>]) -> Vec<u32> {
    let mut t = Vec::with_capacity(reads.iter().map(|r| r.len() + 1).sum());
    for r in reads {
        t.extend_from_slice(r);
        t.push(SEPARATOR);
    }
    t
}

/// The index of the separated reads and the text position of each separator.
pub struct OverlapIndex {
    pub index: Index,
    ends: Vec<u64>,
}

impl OverlapIndex {
    pub fn build(reads: &[Vec<u32>], seed: u64) -> Result<Self> {
        let text = overlap_text(reads);
        let mut ends = Vec::with_capacity(reads.len());
        let mut at = 0u64;
        for r in reads {
            at += r.len() as u64 + 1;
            ends.push(at);
        }
        Ok(OverlapIndex { index: Index::from_text(&text, seed)?, ends })
    }

    fn read_ending_at(&self, e: u64) -> Option<usize> {
        self.ends.binary_search(&e).ok().map(|x| x + 1)
    }

    /// Edges into read `to` (1-based). With `trace`, the scan's state hash
    /// after every pattern step is appended.
    pub fn edges_into(
        &self,
        to: usize,
        read: &[u32],
        lmin: usize,
        all: bool,
        mut trace: Option<&mut Vec<u64>>,
    ) -> Vec<OverlapEdge> {
        let mut found: Vec<OverlapEdge> = Vec::new();
        let mut scan = Scan::new(&self.index, read, 1);
        let mut sink = Vec::new();
        while !scan.is_done() {
            scan.advance(&mut sink);
            let (i, j) = scan.window();
            if i == 1 && j >= lmin.max(1) {
                let keep = scan.clone();
                scan.advance_with(SEPARATOR, &mut sink);
                if scan.window() == (1, j + 1) {
                    for e in scan.occurrence_ends() {
                        match self.read_ending_at(e) {
                            Some(from) if from != to => found.push(OverlapEdge { from, to, len: j }),
                            _ => {}
                        }
                    }
                }
                scan = keep;
            }
            if let Some(t) = trace.as_deref_mut() {
                t.push(scan.state_hash());
            }
            if i > 1 && trace.is_none() {
                // no longer prefix can occur
                break;
            }
        }
        if !all {
            // keep the longest per source; lengths arrive in increasing order
            found.sort_by_key(|e| (e.from, std::cmp::Reverse(e.len)));
            found.dedup_by_key(|e| e.from);
        }
        found
    }
}

/// Overlap edges among `reads`, at least `lmin` long, sorted by
/// `(from, to, len)`; only the longest per ordered pair unless `all`.
pub fn all_pairs_suffix_prefix(reads: &[Vec<u32>], lmin: usize, all: bool, seed: u64) -> Result<Vec<OverlapEdge>> {
    if reads.iter().all(|r| r.is_empty()) {
        return Ok(Vec::new());
    }
    let ox = OverlapIndex::build(reads, seed)?;
    let mut out: Vec<OverlapEdge> = Vec::new();
    for (v, r) in reads.iter().enumerate() {
        if r.len() >= lmin {
            out.extend(ox.edges_into(v + 1, r, lmin, all, None));
        }
    }
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::terminals;
    use crate::oracle::naive_overlaps;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn t(s: &str) -> Vec<u32> {
        terminals(s.as_bytes())
    }

    #[test]
    fn two_reads() {
        let reads = vec![t("abcd"), t("cdab")];
        let e = all_pairs_suffix_prefix(&reads, 1, false, 1).unwrap();
        assert_eq!(e, vec![OverlapEdge { from: 1, to: 2, len: 2 }, OverlapEdge { from: 2, to: 1, len: 2 }]);
        assert!(all_pairs_suffix_prefix(&reads, 1_000_000, false, 1).unwrap().is_empty());
        let same = vec![t("acgt"); 3];
        let e = all_pairs_suffix_prefix(&same, 4, false, 1).unwrap();
        assert_eq!(e.len(), 6);
        assert!(e.iter().all(|x| x.len == 4 && x.from != x.to));
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for case in 0..30 {
            let sigma = [2u32, 4][case % 2];
            let base: Vec<u32> = (0..rng.gen_range(20..80)).map(|_| rng.gen_range(0..sigma)).collect();
            let reads: Vec<Vec<u32>> = (0..rng.gen_range(1..12))
                .map(|_| {
                    let a = rng.gen_range(0..base.len());
                    let b = rng.gen_range(a..=base.len());
                    base[a..b].to_vec()
                })
                .collect();
            let lmin = rng.gen_range(1..4);
            for all in [false, true] {
                let got = all_pairs_suffix_prefix(&reads, lmin, all, case as u64).unwrap();
                assert_eq!(got, naive_overlaps(&reads, lmin, all), "case {case} all={all}");
            }
        }
    }

    #[test]
    fn undo_restores_state() {
        let reads = vec![t("abcab"), t("cabca"), t("bcabc"), t("aaaa")];
        let ox = OverlapIndex::build(&reads, 3).unwrap();
        for (v, r) in reads.iter().enumerate() {
            let mut with = Vec::new();
            ox.edges_into(v + 1, r, 1, true, Some(&mut with));
            let mut plain = Vec::new();
            let mut s = Scan::new(&ox.index, r, 1);
            let mut sink = Vec::new();
            while !s.is_done() {
                s.advance(&mut sink);
                plain.push(s.state_hash());
            }
            assert_eq!(with, plain);
        }
    }
}
