//! Matching statistics from MEMs and back, and MEMs common to a collection.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use super::MemRecord;
use crate::{Error, Result};

/// `len[q-1]` is the length of the longest prefix of `P[q..]` occurring in
/// the text, and `pos[q-1]` its 1-based text start (0 when `len` is 0).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MatchingStats {
    pub len: Vec<u64>,
    pub pos: Vec<u64>,
}

fn check_sorted(mems: &[MemRecord], m: usize) -> Result<()> {
    for (x, r) in mems.iter().enumerate() {
        if r.i == 0 || r.i > r.j || r.j > m {
            return Err(Error::Range(format!("match ({}, {}) not within [1, {m}]", r.i, r.j)));
        }
        if (r.p as usize) < r.len() {
            return Err(Error::Range(format!("match ({}, {}) ends at text position {}", r.i, r.j, r.p)));
        }
        if x > 0 && !(mems[x - 1].i < r.i && mems[x - 1].j < r.j) {
            return Err(Error::Format("matches must have strictly increasing i and j".into()));
        }
    }
    Ok(())
}

/// Spreads each MEM `(i_r, j_r)` over the positions `i_r..min(j_r, i_{r+1}-1)`.
pub fn matching_statistics(mems: &[MemRecord], m: usize) -> Result<MatchingStats> {
    check_sorted(mems, m)?;
    let mut ms = MatchingStats { len: vec![0; m], pos: vec![0; m] };
    for (x, r) in mems.iter().enumerate() {
        let stop = mems.get(x + 1).map_or(r.j, |nx| r.j.min(nx.i - 1));
        let start = r.text_start();
        for q in r.i..=stop {
            ms.len[q - 1] = (r.j - q + 1) as u64;
            ms.pos[q - 1] = start + (q - r.i) as u64;
        }
    }
    Ok(ms)
}

/// The MEMs are the pairs `(q, q+M[q]-1)` whose end passes every earlier one.
pub fn mems_from_ms(ms: &MatchingStats) -> Result<Vec<MemRecord>> {
    let m = ms.len.len();
    if ms.pos.len() != m {
        return Err(Error::Format("length and position arrays differ in size".into()));
    }
    let mut out = Vec::new();
    let mut last_end = 0usize;
    for q in 1..=m {
        let l = ms.len[q - 1] as usize;
        if q > 1 && (ms.len[q - 2] as usize) > l + 1 {
            return Err(Error::Format(format!("statistic at {q} drops by more than one")));
        }
        if l == 0 {
            continue;
        }
        let e = q + l - 1;
        if e > m || ms.pos[q - 1] == 0 {
            return Err(Error::Range(format!("statistic at {q} runs past the pattern")));
        }
        if e > last_end {
            out.push(MemRecord { i: q, j: e, p: ms.pos[q - 1] + l as u64 - 1 });
            last_end = e;
        }
    }
    Ok(out)
}

/// Maximal segments contained in one segment of every list. The text
/// position reported is the one from the first list.
///
/// Only segment starts can start an answer. Starts are merged across lists
/// with a heap; each list's reach (the end of its latest segment started so
/// far, which is also its farthest) sits in a multiset whose minimum bounds
/// the answer.
pub fn collection_mems(lists: &[Vec<MemRecord>]) -> Vec<MemRecord> {
    let mut out: Vec<MemRecord> = Vec::new();
    if lists.is_empty() || lists.iter().any(|l| l.is_empty()) {
        return out;
    }
    let tau = lists.len();
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..tau).map(|t| Reverse((lists[t][0].i, t))).collect();
    let mut cur: Vec<Option<usize>> = vec![None; tau];
    let mut reach: BTreeMap<usize, usize> = BTreeMap::new();
    let mut seen = 0;
    let mut last_end = 0;
    while let Some(Reverse((q, t))) = heap.pop() {
        let x = cur[t].map_or(0, |c| c + 1);
        if let Some(c) = cur[t] {
            let e = lists[t][c].j;
            let slot = reach.get_mut(&e).unwrap();
            *slot -= 1;
            if *slot == 0 {
                reach.remove(&e);
            }
        } else {
            seen += 1;
        }
        cur[t] = Some(x);
        *reach.entry(lists[t][x].j).or_insert(0) += 1;
        if let Some(nx) = lists[t].get(x + 1) {
            heap.push(Reverse((nx.i, t)));
        }
        // report once every list has moved to its last segment starting at q
        if heap.peek().is_some_and(|Reverse((nq, _))| *nq == q) || seen < tau {
            continue;
        }
        let e = *reach.keys().next().unwrap();
        if e >= q && e > last_end {
            let s = lists[0][cur[0].unwrap()];
            out.push(MemRecord { i: q, j: e, p: s.p - (s.j - e) as u64 });
            last_end = e;
        }
    }
    out
}
