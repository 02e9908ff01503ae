//! Deepest loci for every suffix of a probe at once.
//!
//! Each suffix start `s` keeps a verified locus and an interval of
//! candidate end positions; the intervals are aligned to a common halving
//! of `[0, m]`, so all suffixes tested at the same midpoint share it. A test
//! descends blindly from the verified locus, rejects on a Karp-Rabin
//! mismatch, and otherwise confirms the unverified tail by extraction.

use super::patricia::{Locus, Patricia};
use crate::grammar::{KrContext, Rlcfg};

/// `out[s]` is the deepest locus of `probe[s..]` in `t`, for `s` in `0..=m`.
pub fn deepest_all(t: &Patricia, g: &Rlcfg, kr: &KrContext, probe: &[u32]) -> Vec<Locus> {
    let m = probe.len();
    let mut loc = vec![t.root(); m + 1];
    if m == 0 || t.num_leaves() == 0 {
        return loc;
    }
    let sig = kr.prefix_table(probe);
    // every member s of (a, b, set) matches probe[s..max(a,s)] at loc[s],
    // and probe[s..b+1] is known absent when b < m
    let mut work = vec![(0usize, m, (0..m).collect::<Vec<usize>>())];
    while let Some((a, b, set)) = work.pop() {
        if set.is_empty() || a == b {
            continue;
        }
        let c = (a + b).div_ceil(2);
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for s in set {
            if s >= c {
                right.push(s);
                continue;
            }
            match test(t, g, kr, probe, &sig, s, c, loc[s]) {
                Some(at) => {
                    loc[s] = at;
                    right.push(s);
                }
                None => left.push(s),
            }
        }
        work.push((a, c - 1, left));
        work.push((c, b, right));
    }
    loc
}

#[allow(clippy::too_many_arguments)]
fn test(
    t: &Patricia,
    g: &Rlcfg,
    kr: &KrContext,
    probe: &[u32],
    sig: &[u64],
    s: usize,
    c: usize,
    from: Locus,
) -> Option<Locus> {
    let target = (c - s) as u64;
    let v = t.blind(from, &probe[s..c]);
    let rep = t.string(t.range(v).0);
    if t.depth(v) < target || rep.len < target {
        return None;
    }
    let got = kr.substring(g, rep.sym, rep.off, target).expect("within the string");
    if got != kr.range(sig, s, c) {
        return None;
    }
    let known = from.depth;
    let tail = g.extract(rep.sym, rep.off + known, target - known);
    if tail[..] != probe[s + known as usize..c] {
        return None;
    }
    Some(t.ancestor_at(v, target))
}
