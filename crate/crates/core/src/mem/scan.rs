//! The window scan over any grammar: one active position per cut that still
//! admits a primary occurrence of its part of the window.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use super::MemRecord;
use crate::index::{Index, Locus};

/// An active position `r` (1-based): the cut `P[..r] · P[r+1..]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Active {
    pub r: usize,
    /// Locus of `P[r+1..j]` in the Y tree.
    pub y: Locus,
    /// Depth of the deepest Y locus of `P[r+1..]`.
    pub ell: usize,
    /// Deepest X locus of a suffix of `P[i..r]^rev` whose rectangle with
    /// `y` holds points.
    pub x: Locus,
}

impl Active {
    /// Leftmost window position this cut reaches.
    pub fn start(&self) -> usize {
        self.r + 1 - self.x.depth as usize
    }
}

/// Scan state for the window `P[i..j]`, 1-based, empty when `i > j`.
#[derive(Clone)]
pub struct Scan<'a> {
    idx: &'a Index,
    p: &'a [u32],
    k: u64,
    i: usize,
    j: usize,
    act: Vec<Active>,
    // 1-based text end of an occurrence of the current window
    pos: u64,
}

impl<'a> Scan<'a> {
    /// A scan reporting windows that occur at least `k` times.
    pub fn new(idx: &'a Index, p: &'a [u32], k: u64) -> Self {
        assert!(k >= 1);
        Scan { idx, p, k, i: 1, j: 0, act: Vec::new(), pos: 0 }
    }

    pub fn window(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    pub fn active(&self) -> &[Active] {
        &self.act
    }

    pub fn is_done(&self) -> bool {
        self.j == self.p.len()
    }

    /// Hash of everything that drives later steps.
    pub fn state_hash(&self) -> u64 {
        let mut h = DefaultHasher::new();
        (self.i, self.j, self.pos, self.k).hash(&mut h);
        self.act.hash(&mut h);
        h.finish()
    }

    /// Extends the window by `P[j+1]`, reporting `(i, j)` if it was maximal.
    pub fn advance(&mut self, out: &mut Vec<MemRecord>) {
        let c = self.p[self.j];
        let ell = self.idx.y_locate(&self.p[self.j + 1..]).depth as usize;
        self.extend(c, Some(ell), out);
    }

    /// Extends the window by a character that is not part of the pattern;
    /// nothing about the text is assumed.
    pub fn advance_with(&mut self, c: u32, out: &mut Vec<MemRecord>) {
        self.extend(c, None, out);
    }

    /// Reports the last window; call once the pattern is consumed.
    pub fn finish(&self, out: &mut Vec<MemRecord>) {
        if self.i <= self.j {
            out.push(MemRecord { i: self.i, j: self.j, p: self.pos });
        }
    }

    /// 1-based text end positions of every occurrence of the window
    /// `P[i..j]`, ascending.
    pub fn occurrence_ends(&self) -> Vec<u64> {
        let (i, j) = (self.i, self.j);
        let mut out = Vec::new();
        if i > j {
            return out;
        }
        let len = (j + 1 - i) as u64;
        for a in self.counted(i, j) {
            let (xr, yr) = (self.idx.x_range(a.x), self.idx.y_range(a.y));
            for col in self.idx.rect_points(xr, yr) {
                for (rule, off, _) in self.idx.point_primaries(col, (a.r + 1 - i) as u64, len) {
                    self.idx.expand(rule, off, u64::MAX, &mut |q| out.push(q + len));
                }
            }
        }
        out.sort_unstable();
        out
    }

    // The cuts whose primary occurrences make up those of P[l..end]; the
    // cut at the window end duplicates the inner ones unless the window is
    // a single character.
    fn counted(&self, l: usize, end: usize) -> impl Iterator<Item = &Active> + '_ {
        self.act.iter().filter(move |a| a.start() == l && (a.r != end || l == end))
    }

    fn extend(&mut self, c: u32, ell: Option<usize>, out: &mut Vec<MemRecord>) {
        let idx = self.idx;
        let j = self.j;
        let end = j + 1;
        if self.i == end && idx.px().child(idx.px().root().node, c).is_none() {
            self.i += 1;
            self.j = end;
            return;
        }
        // the new position r = j+1, with P[..r] taken inside the window
        let mut probe = Vec::with_capacity(end + 1 - self.i);
        probe.push(c);
        probe.extend(self.p[self.i - 1..j].iter().rev());
        let fresh = Active { r: end, y: idx.py().root(), ell: ell.unwrap_or(0), x: idx.x_locate(&probe) };

        self.act.retain_mut(|a| {
            let y = match ell {
                Some(_) if a.r + a.ell <= j => return false,
                Some(_) => idx.py().step(a.y, c),
                None => idx.py().step_checked(idx.grammar(), a.y, c),
            };
            let Some(y) = y else { return false };
            a.y = y;
            a.x = idx.parent_walk(a.x, idx.y_range(y));
            a.x.depth > 0
        });
        if fresh.x.depth > 0 {
            self.act.push(fresh);
        }

        let mut l = self.act.iter().map(Active::start).min().unwrap_or(end + 1);
        if self.k > 1 {
            l = self.raise_to_k(l, end);
        }
        if l > self.i {
            if self.i <= j {
                out.push(MemRecord { i: self.i, j, p: self.pos });
            }
            self.i = l;
        }
        self.j = end;
        if self.i <= end {
            let a = *self.counted(self.i, end).next().expect("a cut reaches the window start");
            let col = idx.rect_first(idx.x_range(a.x), idx.y_range(a.y)).expect("nonempty");
            self.pos = idx.points()[col as usize].pos + (end - a.r) as u64;
        } else {
            self.act.clear();
        }
    }

    // Smallest l' >= l such that P[l'..end] occurs at least k times, moving
    // the cuts that start before it one character up.
    fn raise_to_k(&mut self, mut l: usize, end: usize) -> usize {
        let idx = self.idx;
        while l <= end {
            let mut q = 0u64;
            for a in self.counted(l, end) {
                let (xr, yr) = (idx.x_range(a.x), idx.y_range(a.y));
                q += idx.count_rect(xr, yr, (a.r + 1 - l) as u64, (end + 1 - l) as u64, self.k - q);
                if q >= self.k {
                    return l;
                }
            }
            for a in self.act.iter_mut().filter(|a| a.start() == l) {
                a.x = idx.px().up_one(a.x);
            }
            self.act.retain(|a| a.x.depth > 0);
            l += 1;
        }
        l
    }
}

/// Runs the scan over all of `p`.
pub fn scan_all(idx: &Index, p: &[u32], k: u64) -> Vec<MemRecord> {
    let mut out = Vec::new();
    let mut s = Scan::new(idx, p, k);
    while !s.is_done() {
        s.advance(&mut out);
    }
    s.finish(&mut out);
    out
}
