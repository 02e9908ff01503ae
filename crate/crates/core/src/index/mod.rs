//! The grammar index: for every split of a rule between consecutive
//! children, the reversed left part goes to the set X and the rest of the
//! rule to the set Y. Both sets are sorted into Patricia trees, and a grid
//! links each X string to its Y string. A pattern occurrence that crosses a
//! phrase boundary (a primary occurrence) shows up as a grid point below the
//! loci of its two halves; all other occurrences are copies reached through
//! the grammar tree.

mod batch;
mod bundle;
mod patricia;
mod sa;
mod wavelet;

pub use batch::deepest_all;
pub use patricia::{Locus, Patricia, StrRef};
pub use wavelet::WaveletMatrix;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grammar::{GrammarTree, KrContext, NodeKind, Rlcfg, Rule, Symbol};
use crate::lcg::{build_lcg, LcgLevels};
use crate::Result;

/// A split of rule `rule` at offset `split` of its expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Point {
    pub rule: u32,
    pub split: u64,
    /// 0-based text position of the split in the rule's internal node.
    pub pos: u64,
    /// `(|B|, t)` for a run rule `A -> B^t`.
    pub run: Option<(u64, u64)>,
}

/// One occurrence, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Occurrence {
    pub pos: u64,
    pub primary: bool,
}

/// An inclusive range of ranks; empty when `lo > hi`.
pub type Range = (u32, u32);

pub struct Index {
    g: Rlcfg,
    grev: Rlcfg,
    tree: GrammarTree,
    seed: u64,
    kr_base: u64,
    kr: KrContext,
    kr_rev: KrContext,
    px: Patricia,
    py: Patricia,
    // indexed by column (X rank)
    points: Vec<Point>,
    col_of_row: Vec<u32>,
    grid: WaveletMatrix,
    levels: Option<LcgLevels>,
}

/// The grammar with every sequence rule reversed; it generates `T^rev` and
/// `exp(A)^rev` for each symbol.
pub fn reversed(g: &Rlcfg) -> Rlcfg {
    let rules = g
        .rules()
        .iter()
        .map(|r| match r {
            Rule::Seq(ch) => Rule::Seq(ch.iter().rev().copied().collect()),
            Rule::Run(b, t) => Rule::Run(*b, *t),
        })
        .collect();
    Rlcfg::new(rules, g.start()).expect("reversal keeps a valid grammar")
}

pub const DEFAULT_RETRIES: u32 = 3;

impl Index {
    /// Builds the locally consistent grammar of `text` and indexes it.
    pub fn from_text(text: &[u32], seed: u64) -> Result<Index> {
        let (g, lv) = build_lcg(text, seed, DEFAULT_RETRIES)?;
        Ok(Index::build(g, Some(lv), seed))
    }

    /// Indexes any grammar. `levels` enables the LCG query algorithms.
    pub fn build(g: Rlcfg, levels: Option<LcgLevels>, seed: u64) -> Index {
        let text = g.expand();
        let n = text.len();
        let rev: Vec<u32> = text.iter().rev().copied().collect();
        let tree = GrammarTree::new(&g);
        let grev = reversed(&g);

        // (point, X start in rev, X length, Y start in text, Y length)
        let mut raw: Vec<(Point, StrRef, usize, StrRef, usize)> = Vec::new();
        for a in 0..g.rules().len() as u32 {
            let node = tree.node(tree.internal_of(a));
            let alen = g.len(Symbol::Nt(a));
            let mut add = |b: Symbol, split: u64, run| {
                let pos = node.start + split;
                let bl = g.len(b);
                raw.push((
                    Point { rule: a, split, pos, run },
                    StrRef { sym: b, off: 0, len: bl },
                    n - pos as usize,
                    StrRef { sym: Symbol::Nt(a), off: split, len: alen - split },
                    pos as usize,
                ));
            };
            match g.rule(a) {
                Rule::Seq(ch) => {
                    let w = g.child_offsets(a);
                    for s in 1..ch.len() {
                        add(ch[s - 1], w[s], None);
                    }
                }
                Rule::Run(b, t) => add(*b, g.len(*b), Some((g.len(*b), *t))),
            }
        }
        let start = Symbol::Nt(g.start());
        raw.push((
            Point { rule: g.start(), split: n as u64, pos: n as u64, run: None },
            StrRef { sym: start, off: 0, len: n as u64 },
            0,
            StrRef { sym: start, off: n as u64, len: 0 },
            n,
        ));

        let lce_t = sa::Lce::new(&text);
        let lce_r = sa::Lce::new(&rev);
        let np = raw.len();
        let mut by_x: Vec<usize> = (0..np).collect();
        by_x.sort_by(|&a, &b| {
            let (x, y) = (&raw[a], &raw[b]);
            lce_r.compare(x.2, x.1.len as usize, y.2, y.1.len as usize).0.then(a.cmp(&b))
        });
        let mut by_y: Vec<usize> = (0..np).collect();
        by_y.sort_by(|&a, &b| {
            let (x, y) = (&raw[a], &raw[b]);
            lce_t.compare(x.4, x.3.len as usize, y.4, y.3.len as usize).0.then(a.cmp(&b))
        });
        let adjacent = |order: &[usize], lce: &sa::Lce, f: &dyn Fn(usize) -> (usize, usize)| -> Vec<u64> {
            (0..order.len())
                .map(|r| {
                    if r == 0 {
                        return 0;
                    }
                    let ((a, la), (b, lb)) = (f(order[r - 1]), f(order[r]));
                    lce.compare(a, la, b, lb).1 as u64
                })
                .collect()
        };
        let xl = adjacent(&by_x, &lce_r, &|k| (raw[k].2, raw[k].1.len as usize));
        let yl = adjacent(&by_y, &lce_t, &|k| (raw[k].4, raw[k].3.len as usize));
        let px =
            Patricia::build(by_x.iter().map(|&k| raw[k].1).collect(), &xl, |r, d| rev[raw[by_x[r]].2 + d as usize]);
        let py =
            Patricia::build(by_y.iter().map(|&k| raw[k].3).collect(), &yl, |r, d| text[raw[by_y[r]].4 + d as usize]);
        let mut col = vec![0u32; np];
        for (c, &k) in by_x.iter().enumerate() {
            col[k] = c as u32;
        }
        let points: Vec<Point> = by_x.iter().map(|&k| raw[k].0).collect();
        let col_of_row: Vec<u32> = by_y.iter().map(|&k| col[k]).collect();
        Index::assemble(g, grev, tree, seed, px, py, points, col_of_row, levels)
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        g: Rlcfg,
        grev: Rlcfg,
        tree: GrammarTree,
        seed: u64,
        px: Patricia,
        py: Patricia,
        points: Vec<Point>,
        col_of_row: Vec<u32>,
        levels: Option<LcgLevels>,
    ) -> Index {
        let kr_base = ChaCha8Rng::seed_from_u64(seed).next_u64();
        let kr = KrContext::new(&g, kr_base);
        let kr_rev = KrContext::new(&grev, kr_base);
        let grid = WaveletMatrix::new(&col_of_row);
        Index { g, grev, tree, seed, kr_base, kr, kr_rev, px, py, points, col_of_row, grid, levels }
    }

    pub fn grammar(&self) -> &Rlcfg {
        &self.g
    }

    /// The reversed grammar, over which X strings are forward strings.
    pub fn grammar_rev(&self) -> &Rlcfg {
        &self.grev
    }

    pub fn tree(&self) -> &GrammarTree {
        &self.tree
    }

    pub fn levels(&self) -> Option<&LcgLevels> {
        self.levels.as_ref()
    }

    pub fn kr(&self) -> &KrContext {
        &self.kr
    }

    pub fn kr_rev(&self) -> &KrContext {
        &self.kr_rev
    }

    pub fn px(&self) -> &Patricia {
        &self.px
    }

    pub fn py(&self) -> &Patricia {
        &self.py
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn text_len(&self) -> u64 {
        self.g.text_len()
    }

    /// Column of the point in row `y`.
    pub fn col_of_row(&self, y: u32) -> u32 {
        self.col_of_row[y as usize]
    }

    /// Deepest locus of `probe_rev` (a reversed left part) in X.
    pub fn x_locate(&self, probe_rev: &[u32]) -> Locus {
        self.px.locate(&self.grev, probe_rev)
    }

    /// Deepest locus of `probe` (a right part) in Y.
    pub fn y_locate(&self, probe: &[u32]) -> Locus {
        self.py.locate(&self.g, probe)
    }

    pub fn x_range(&self, at: Locus) -> Range {
        self.px.range(at.node)
    }

    pub fn y_range(&self, at: Locus) -> Range {
        self.py.range(at.node)
    }

    /// Smallest column of a point in the rectangle.
    pub fn rect_first(&self, xr: Range, yr: Range) -> Option<u32> {
        self.col_from(xr.0 as u64, yr).filter(|&c| c <= xr.1)
    }

    pub fn rect_empty(&self, xr: Range, yr: Range) -> bool {
        self.rect_first(xr, yr).is_none()
    }

    /// Columns of all points in the rectangle, ascending.
    pub fn rect_points(&self, xr: Range, yr: Range) -> impl Iterator<Item = u32> + '_ {
        let mut next = self.rect_first(xr, yr);
        std::iter::from_fn(move || {
            let c = next?;
            next = self.col_from(c as u64 + 1, yr).filter(|&d| d <= xr.1);
            Some(c)
        })
    }

    /// Successor to the right: smallest column `>= x` with a point in rows `yr`.
    pub fn col_from(&self, x: u64, yr: Range) -> Option<u32> {
        if yr.0 > yr.1 {
            return None;
        }
        self.grid.next_value(yr.0 as usize, yr.1 as usize + 1, x)
    }

    /// Successor to the left: largest column `<= x` with a point in rows `yr`.
    pub fn col_upto(&self, x: u64, yr: Range) -> Option<u32> {
        if yr.0 > yr.1 {
            return None;
        }
        self.grid.prev_value(yr.0 as usize, yr.1 as usize + 1, x)
    }

    /// Lowest ancestor of `vx` whose column range meets a point in rows
    /// `yr`. The root means no occurrence with this cut.
    pub fn range_expand(&self, vx: Locus, yr: Range) -> Locus {
        let (x1, x2) = self.x_range(vx);
        if x1 > x2 || self.rect_first((x1, x2), yr).is_some() {
            return vx;
        }
        let left = if x1 > 0 { self.col_upto(x1 as u64 - 1, yr) } else { None };
        let right = self.col_from(x2 as u64 + 1, yr);
        let cand = |c: Option<u32>| c.map(|c| self.px.lca(self.px.leaf(c), vx.node));
        let best = match (cand(left), cand(right)) {
            (Some(a), Some(b)) => {
                if self.px.depth(a) >= self.px.depth(b) {
                    a
                } else {
                    b
                }
            }
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => patricia::ROOT,
        };
        Locus { node: best, depth: self.px.depth(best) }
    }

    /// The same answer by climbing one explicit node at a time.
    pub fn parent_walk(&self, mut x: Locus, yr: Range) -> Locus {
        while x.depth > 0 && self.rect_empty(self.x_range(x), yr) {
            x = self.px.up_explicit(x);
        }
        x
    }

    /// Primary occurrences a point yields for a pattern piece whose cut
    /// leaves `lx` characters on the left out of `len`: `(rule, offset in
    /// exp(rule), 0-based text position)`. Run rules give one per copy
    /// boundary the piece can straddle.
    pub fn point_primaries(&self, col: u32, lx: u64, len: u64) -> impl Iterator<Item = (u32, u64, u64)> + '_ {
        let pt = self.points[col as usize];
        let (step, count) = match pt.run {
            None => (0, 1),
            Some((bl, t)) => {
                // o_c = bl - lx + c*bl, need o_c + len <= t*bl and c <= t-2
                let base = bl - lx;
                let fit = (t * bl - base - len) / bl;
                (bl, fit.min(t - 2) + 1)
            }
        };
        let off0 = pt.split - lx;
        (0..count).map(move |c| (pt.rule, off0 + c * step, pt.pos - lx + c * step))
    }

    /// Calls `f` with the 0-based text position of every occurrence of
    /// `exp(rule)[off..]` inside the text, i.e. the primary copy and all
    /// copies reached through the grammar tree, until `budget` runs out.
    /// Returns the number reported.
    pub fn expand(&self, rule: u32, off: u64, budget: u64, f: &mut dyn FnMut(u64)) -> u64 {
        let mut done = 0u64;
        let mut stack = vec![(rule, off)];
        while let Some((a, o)) = stack.pop() {
            for &v in self.tree.occurrences(a).iter().rev() {
                if done >= budget {
                    return done;
                }
                let nd = self.tree.node(v);
                if v == self.tree.root() {
                    f(o);
                    done += 1;
                    continue;
                }
                let Symbol::Nt(b) = self.tree.node(nd.parent).label else { unreachable!() };
                match nd.kind {
                    NodeKind::RunLeaf { copies } => {
                        let al = self.g.len(Symbol::Nt(a));
                        for q in (0..copies).rev() {
                            stack.push((b, o + nd.rel + q * al));
                        }
                    }
                    _ => stack.push((b, o + nd.rel)),
                }
            }
        }
        done
    }

    /// Occurrences of `pattern[r+1-lx .. ]` of length `len` with the cut
    /// after `lx` left characters, from the points in the rectangle;
    /// stops after `budget`.
    pub fn count_rect(&self, xr: Range, yr: Range, lx: u64, len: u64, budget: u64) -> u64 {
        let mut total = 0;
        for c in self.rect_points(xr, yr) {
            for (rule, off, _) in self.point_primaries(c, lx, len) {
                if total >= budget {
                    return total;
                }
                total += self.expand(rule, off, budget - total, &mut |_| {});
            }
        }
        total
    }

    /// All occurrences of `p`, sorted, each flagged primary or secondary.
    pub fn locate(&self, p: &[u32]) -> Vec<Occurrence> {
        let mut out = Vec::new();
        self.for_each_cut(p, |idx, xr, yr, lx| {
            for c in idx.rect_points(xr, yr) {
                for (k, (rule, off, pos)) in idx.point_primaries(c, lx, p.len() as u64).enumerate() {
                    idx.expand(rule, off, u64::MAX, &mut |q| {
                        out.push(Occurrence { pos: q + 1, primary: k == 0 && q == pos })
                    });
                }
            }
            true
        });
        out.sort_unstable();
        debug_assert!(out.windows(2).all(|w| w[0].pos < w[1].pos));
        out
    }

    /// Number of occurrences of `p` if at most `bound`, else `None`.
    pub fn count_bounded(&self, p: &[u32], bound: u64) -> Option<u64> {
        let mut total = 0u64;
        let limit = bound.saturating_add(1);
        self.for_each_cut(p, |idx, xr, yr, lx| {
            total += idx.count_rect(xr, yr, lx, p.len() as u64, limit - total);
            total < limit
        });
        (total <= bound).then_some(total)
    }

    /// Visits the non-empty rectangle of every cut of `p` that can hold a
    /// primary occurrence: all inner cuts, or the end cut for one character.
    fn for_each_cut(&self, p: &[u32], mut f: impl FnMut(&Self, Range, Range, u64) -> bool) {
        let m = p.len();
        if m == 0 || m as u64 > self.text_len() {
            return;
        }
        let q: Vec<u32> = p.iter().rev().copied().collect();
        let cuts = if m == 1 { 1..2 } else { 1..m };
        for r in cuts {
            let x = self.x_locate(&q[m - r..]);
            if x.depth != r as u64 {
                continue;
            }
            let y = self.y_locate(&p[r..]);
            if y.depth != (m - r) as u64 {
                continue;
            }
            if !f(self, self.x_range(x), self.y_range(y), r as u64) {
                return;
            }
        }
    }

    /// Seed the index was built with; it also fixes the Karp-Rabin base.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn kr_base(&self) -> u64 {
        self.kr_base
    }
}

#[cfg(test)]
mod tests;
