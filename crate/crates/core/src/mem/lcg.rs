//! The scan restricted to the cut set of the window under the text's
//! locally consistent parse. The deepest loci of every `P[..r]^rev` and
//! `P[r+1..]` are found in one batch up front; a position re-entering the
//! cut set gets its Y locus by a weighted ancestor query and its X locus by
//! range expansion.

use super::MemRecord;
use crate::index::{deepest_all, Index, Locus};
use crate::lcg::PatternLevels;
use crate::{Error, Result};

/// Instrumentation of one run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LcgStats {
    /// Largest number of active positions at once.
    pub max_active: usize,
    /// Largest cut set, window end included.
    pub max_cut_set: usize,
    /// Window start increments made one at a time after a failed extension.
    pub shrink_steps: u64,
    pub cursor_moves: u64,
}

#[derive(Clone, Copy)]
struct Act {
    r: usize,
    y: Locus,
    x: Locus,
}

impl Act {
    fn start(&self) -> usize {
        self.r + 1 - self.x.depth as usize
    }
}

pub fn find_mems_lcg(idx: &Index, p: &[u32]) -> Result<Vec<MemRecord>> {
    find_mems_lcg_stats(idx, p).map(|r| r.0)
}

pub fn find_mems_lcg_stats(idx: &Index, p: &[u32]) -> Result<(Vec<MemRecord>, LcgStats)> {
    let lv = idx.levels().ok_or_else(|| Error::Grammar("index has no parse levels".into()))?;
    let m = p.len();
    let mut stats = LcgStats::default();
    let mut out = Vec::new();
    if m == 0 {
        return Ok((out, stats));
    }
    let mut pl = PatternLevels::new(lv, idx.grammar(), p);
    let q: Vec<u32> = p.iter().rev().copied().collect();
    // vy[r]: P[r+1..]; vx[m - r]: P[..r]^rev
    let vy = deepest_all(idx.py(), idx.grammar(), idx.kr(), p);
    let vx = deepest_all(idx.px(), idx.grammar_rev(), idx.kr_rev(), &q);
    let (px, py) = (idx.px(), idx.py());

    let mut act: Vec<Act> = Vec::new();
    let mut cuts: Vec<usize> = Vec::new();
    let mut i = 1usize;
    let mut pos = 0u64;
    for (j, &c) in p.iter().enumerate() {
        let end = j + 1;
        if i == end && px.child(px.root().node, c).is_none() {
            pl.grow_j();
            pl.grow_i();
            i += 1;
            act.clear();
            continue;
        }
        pl.grow_j();
        act.retain_mut(|a| {
            if a.r + vy[a.r].depth as usize <= j {
                return false;
            }
            a.y = py.step(a.y, c).expect("verified path");
            true
        });
        let mut reported = false;
        loop {
            pl.cut_set(&mut cuts);
            cuts.push(end);
            stats.max_cut_set = stats.max_cut_set.max(cuts.len());
            // merge R with the cut set; both are sorted by r
            let mut next = Vec::with_capacity(cuts.len());
            let mut it = act.iter().peekable();
            for &r in &cuts {
                while it.peek().is_some_and(|a| a.r < r) {
                    it.next();
                }
                let y = match it.peek() {
                    Some(a) if a.r == r => a.y,
                    _ if r + vy[r].depth as usize >= end => py.ancestor_at(vy[r].node, (end - r) as u64),
                    _ => continue,
                };
                let v = vx[m - r];
                let cap = v.depth.min((r + 1 - i) as u64);
                let x = idx.range_expand(px.ancestor_at(v.node, cap), idx.y_range(y));
                if x.depth > 0 {
                    next.push(Act { r, y, x });
                }
            }
            act = next;
            stats.max_active = stats.max_active.max(act.len());
            if let Some(a) = act.iter().find(|a| a.start() == i) {
                let col = idx.rect_first(idx.x_range(a.x), idx.y_range(a.y)).expect("nonempty");
                pos = idx.points()[col as usize].pos + (end - a.r) as u64;
                break;
            }
            // P[i..j+1] does not occur
            if !reported && i <= j {
                out.push(MemRecord { i, j, p: pos });
            }
            reported = true;
            if i == end {
                // cannot happen while P[j+1] occurs
                i += 1;
                pl.grow_i();
                act.clear();
                break;
            }
            pl.grow_i();
            i += 1;
            stats.shrink_steps += 1;
        }
    }
    if i <= m {
        out.push(MemRecord { i, j: m, p: pos });
    }
    stats.cursor_moves = pl.cursor_moves;
    Ok((out, stats))
}
