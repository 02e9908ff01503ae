//! Parsing a pattern with the text's levels, and the cut set `M(i,j)` of a
//! sliding window.

use std::collections::HashMap;

use super::{alpha, block_ends, thresholds, LcgLevels};
use crate::grammar::{Rlcfg, DOLLAR, HASH, SIGMA};

/// The levels `P_0..P_K` of `#P$` plus the cursors of a window `P[i..j]`.
///
/// Positions are 1-based pattern positions, which are also indices into
/// `P_0` because `#` sits at index 0.
#[derive(Clone, Debug)]
pub struct PatternLevels {
    m: usize,
    seqs: Vec<Vec<u32>>,
    // ends[k][x]: P_0 index of the last character of P_k[x]
    ends: Vec<Vec<u32>>,
    ic: Vec<usize>,
    jc: Vec<usize>,
    i: usize,
    j: usize,
    /// Total cursor increments, for instrumentation.
    pub cursor_moves: u64,
    /// Number of symbols that were not in the text's dictionaries.
    pub fresh_symbols: u64,
}

impl PatternLevels {
    /// Parses `#P$` with the text's dictionaries and permutations. Blocks
    /// unknown to the text get fresh ids, and symbols that did not occur in
    /// the text's previous level get permutation values past the maximum in
    /// order of first appearance.
    pub fn new(lv: &LcgLevels, g: &Rlcfg, p: &[u32]) -> Self {
        let m = p.len();
        let nr = g.rules().len() as u32;
        let mut next_fresh = SIGMA + nr;
        let mut fresh_len: HashMap<u32, u64> = HashMap::new();
        let mut fresh_runs: HashMap<(u32, u64), u32> = HashMap::new();
        let mut fresh_blocks: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut fresh_count = 0u64;
        let len_of = |x: u32, fresh_len: &HashMap<u32, u64>| -> u64 {
            if x == HASH || x == DOLLAR {
                u64::MAX
            } else if x < SIGMA {
                1
            } else if x < SIGMA + nr {
                g.len(crate::grammar::Symbol::Nt(x - SIGMA))
            } else {
                fresh_len[&x]
            }
        };

        let mut s0 = Vec::with_capacity(m + 2);
        s0.push(HASH);
        s0.extend_from_slice(p);
        s0.push(DOLLAR);
        let mut seqs = vec![s0];
        let mut ends: Vec<Vec<u32>> = vec![(0..m as u32 + 2).collect()];

        for k in 1..=lv.height() {
            let (lim, _) = thresholds(k);
            let s = &seqs[k as usize - 1];
            let e_prev = &ends[k as usize - 1];
            let mut next = Vec::new();
            let mut next_ends = Vec::new();
            if k % 2 == 1 {
                let mut i = 0;
                while i < s.len() {
                    let x = s[i];
                    let mut e = i + 1;
                    if len_of(x, &fresh_len) <= lim {
                        while e < s.len() && s[e] == x {
                            e += 1;
                        }
                    }
                    let t = (e - i) as u64;
                    let id = if t == 1 {
                        x
                    } else if let Some(id) = lv.run_symbol(x, t) {
                        id
                    } else {
                        *fresh_runs.entry((x, t)).or_insert_with(|| {
                            fresh_len.insert(next_fresh, len_of(x, &fresh_len).saturating_mul(t));
                            fresh_count += 1;
                            next_fresh += 1;
                            next_fresh - 1
                        })
                    };
                    next.push(id);
                    next_ends.push(e_prev[e - 1]);
                    i = e;
                }
            } else {
                let pi = lv.pi(k);
                let base = pi.len() as u32;
                let mut extra: HashMap<u32, u32> = HashMap::new();
                for &x in s {
                    if !pi.contains_key(&x) {
                        let r = base + extra.len() as u32;
                        extra.entry(x).or_insert(r);
                    }
                }
                let rank = |x: u32| pi.get(&x).copied().unwrap_or_else(|| extra[&x]);
                let be = block_ends(s, rank, |x| len_of(x, &fresh_len) <= lim);
                let mut b = 0;
                for e in be {
                    let id = if e == b {
                        s[b]
                    } else if let Some(id) = lv.block_symbol(&s[b..=e]) {
                        id
                    } else if let Some(&id) = fresh_blocks.get(&s[b..=e]) {
                        id
                    } else {
                        let l = s[b..=e].iter().map(|&x| len_of(x, &fresh_len)).fold(0u64, u64::saturating_add);
                        fresh_len.insert(next_fresh, l);
                        fresh_blocks.insert(s[b..=e].to_vec(), next_fresh);
                        fresh_count += 1;
                        next_fresh += 1;
                        next_fresh - 1
                    };
                    next.push(id);
                    next_ends.push(e_prev[e]);
                    b = e + 1;
                }
            }
            seqs.push(next);
            ends.push(next_ends);
        }
        let levels = seqs.len();
        PatternLevels {
            m,
            seqs,
            ends,
            ic: vec![0; levels],
            jc: vec![0; levels],
            i: 1,
            j: 0,
            cursor_moves: 0,
            fresh_symbols: fresh_count,
        }
        .with_window(1, 0)
    }

    fn with_window(mut self, i: usize, j: usize) -> Self {
        self.i = i;
        self.j = j;
        for k in 0..self.ends.len() {
            self.ic[k] = self.ends[k].partition_point(|&e| (e as usize) < i);
            self.jc[k] = self.ends[k].partition_point(|&e| (e as usize) < j);
        }
        self
    }

    /// Pattern length m.
    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn levels(&self) -> usize {
        self.seqs.len()
    }

    /// `P_k` as symbol ids (terminal codes, `SIGMA + nonterminal`, or fresh
    /// ids past the grammar).
    pub fn level(&self, k: usize) -> &[u32] {
        &self.seqs[k]
    }

    /// `P_0` indices where the symbols of `P_k` end.
    pub fn level_ends(&self, k: usize) -> &[u32] {
        &self.ends[k]
    }

    /// Current window `(i, j)`, 1-based; empty when `i > j`.
    pub fn window(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    /// Cursors `(i_k, j_k)`: indices of the `P_k` symbols holding `P[i]`
    /// and `P[j]`.
    pub fn cursors(&self, k: usize) -> (usize, usize) {
        (self.ic[k], self.jc[k])
    }

    /// `j ← j+1`. Stops climbing at the first level whose cursor stays.
    pub fn grow_j(&mut self) {
        assert!(self.j < self.m, "window end past the pattern");
        self.j += 1;
        Self::advance(&self.ends, &mut self.jc, self.j, &mut self.cursor_moves);
    }

    /// `i ← i+1`; the window may become empty (`i = j+1`).
    pub fn grow_i(&mut self) {
        assert!(self.i <= self.j, "window already empty");
        self.i += 1;
        Self::advance(&self.ends, &mut self.ic, self.i, &mut self.cursor_moves);
    }

    fn advance(ends: &[Vec<u32>], cur: &mut [usize], pos: usize, moves: &mut u64) {
        for k in 0..ends.len() {
            let before = cur[k];
            while (ends[k][cur[k]] as usize) < pos {
                cur[k] += 1;
                *moves += 1;
            }
            if cur[k] == before {
                break;
            }
        }
    }

    /// `M(i,j)`, sorted and duplicate-free. Per level k, with `α = α_{k+1}`
    /// and `q = e-i+1` for block ends `e ∈ [i, j-1]`: every q in `[1, 2α]`,
    /// every q in `(j-i-α, j-i]`, and the smallest q in between. The window
    /// end itself is not included.
    pub fn cut_set(&self, out: &mut Vec<usize>) {
        out.clear();
        let (i, j) = (self.i, self.j);
        if i >= j {
            return;
        }
        let w = (j - i) as u64;
        for k in 0..self.ends.len() {
            let (a, b) = (self.ic[k], self.jc[k]);
            if a >= b {
                break;
            }
            let al = alpha(k as u32 + 1);
            let e = &self.ends[k];
            let q = |x: usize| e[x] as u64 - i as u64 + 1;
            let mut x = a;
            while x < b && q(x) <= al.saturating_mul(2) {
                out.push(e[x] as usize);
                x += 1;
            }
            if x < b && q(x).saturating_add(al) <= w {
                out.push(e[x] as usize);
            }
            let mut y = b;
            while y > x && q(y - 1).saturating_add(al) > w {
                y -= 1;
                out.push(e[y] as usize);
            }
        }
        out.sort_unstable();
        out.dedup();
    }

    /// `M(i,j)` straight from the definition, scanning every level.
    pub fn cut_set_naive(&self) -> Vec<usize> {
        let (i, j) = (self.i as u64, self.j as u64);
        let mut out = Vec::new();
        if i >= j {
            return out;
        }
        let w = j - i;
        for (k, e) in self.ends.iter().enumerate() {
            let al = alpha(k as u32 + 1);
            let qs: Vec<u64> = e.iter().map(|&x| x as u64).filter(|&x| x >= i && x < j).map(|x| x - i + 1).collect();
            let in_band = |q: u64| q > al.saturating_mul(2) && q.saturating_add(al) <= w;
            out.extend(qs.iter().filter(|&&q| !in_band(q)).map(|&q| (q + i - 1) as usize));
            if let Some(&q) = qs.iter().find(|&&q| in_band(q)) {
                out.push((q + i - 1) as usize);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}
