//! Locally consistent grammar: level-by-level run-length and block
//! compression with randomly permuted local minima.
//!
//! Level `k` groups only symbols whose expansion is at most
//! `ℓ_k = (4/3)^(⌈k/2⌉-1)`; longer ones are paused and act as block
//! delimiters. Odd levels collapse maximal runs, even levels cut blocks at
//! local minima of a random permutation `π_k`.

mod pattern;

pub use pattern::PatternLevels;

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::binio::{Reader, Writer};
use crate::grammar::{Rlcfg, Rule, Symbol, SIGMA};
use crate::{Error, Result};

/// Dense id of a symbol: terminals keep their code, nonterminal `a` is
/// `SIGMA + a`.
pub fn sym_id(s: Symbol) -> u32 {
    match s {
        Symbol::Term(c) => c,
        Symbol::Nt(a) => SIGMA + a,
    }
}

pub fn id_sym(id: u32) -> Symbol {
    if id < SIGMA {
        Symbol::Term(id)
    } else {
        Symbol::Nt(id - SIGMA)
    }
}

/// `⌊2^bits / 3^e⌋`, saturating at `u64::MAX`.
fn floor_ratio(bits: usize, e: usize) -> u64 {
    let mut limbs = vec![0u32; bits / 32 + 1];
    limbs[bits / 32] = 1 << (bits % 32);
    // nested floor division by 3 equals floor division by 3^e
    for _ in 0..e {
        let mut rem = 0u64;
        for l in limbs.iter_mut().rev() {
            let cur = (rem << 32) | *l as u64;
            *l = (cur / 3) as u32;
            rem = cur % 3;
        }
    }
    if limbs.iter().skip(2).any(|&x| x != 0) {
        return u64::MAX;
    }
    limbs[0] as u64 | (limbs.get(1).copied().unwrap_or(0) as u64) << 32
}

/// `⌊ℓ_k⌋` and `α_k = ⌈8ℓ_k⌉`, exact, saturating at `u64::MAX`.
pub fn thresholds(k: u32) -> (u64, u64) {
    if k == 0 {
        // ℓ_0 = 3/4
        return (0, 6);
    }
    let e = (k.div_ceil(2) - 1) as usize;
    let eight = floor_ratio(2 * e + 3, e);
    // 3^e never divides 2^(2e+3) for e >= 1
    let alpha = if e == 0 { eight } else { eight.saturating_add(1) };
    (floor_ratio(2 * e, e), alpha)
}

/// `α_k` alone.
pub fn alpha(k: u32) -> u64 {
    thresholds(k).1
}

/// Per-level tables needed to parse a pattern the way the text was parsed.
#[derive(Clone, Debug, Default)]
pub struct LcgLevels {
    /// Number of levels K; `S_K` has length 1.
    height: u32,
    /// `π_k` for even k, over the symbol ids of `S_{k-1}`, at index k.
    pi: Vec<HashMap<u32, u32>>,
    runs: HashMap<(u32, u64), u32>,
    blocks: HashMap<Vec<u32>, u32>,
    /// `S_0..S_K` as symbol ids; only present right after construction.
    seqs: Vec<Vec<u32>>,
}

struct Built {
    rules: Vec<Rule>,
    start: u32,
    levels: LcgLevels,
}

fn build_once(text: &[u32], rng: &mut ChaCha8Rng) -> Built {
    let mut rules: Vec<Rule> = Vec::new();
    let mut lens: Vec<u64> = Vec::new();
    let mut lv = LcgLevels { pi: vec![HashMap::new()], ..Default::default() };
    let mut s: Vec<u32> = text.to_vec();
    lv.seqs.push(s.clone());
    let len_of = |id: u32, lens: &[u64]| if id < SIGMA { 1 } else { lens[(id - SIGMA) as usize] };
    let mut k = 0u32;
    while s.len() > 1 {
        k += 1;
        let (lim, _) = thresholds(k);
        let mut next = Vec::with_capacity(s.len());
        if k % 2 == 1 {
            let mut i = 0;
            while i < s.len() {
                let x = s[i];
                let mut e = i + 1;
                if len_of(x, &lens) <= lim {
                    while e < s.len() && s[e] == x {
                        e += 1;
                    }
                }
                let t = (e - i) as u64;
                if t == 1 {
                    next.push(x);
                } else {
                    let id = *lv.runs.entry((x, t)).or_insert_with(|| {
                        rules.push(Rule::Run(id_sym(x), t));
                        lens.push(len_of(x, &lens) * t);
                        SIGMA + rules.len() as u32 - 1
                    });
                    next.push(id);
                }
                i = e;
            }
            lv.pi.push(HashMap::new());
        } else {
            let mut distinct: Vec<u32> = s.clone();
            distinct.sort_unstable();
            distinct.dedup();
            distinct.shuffle(rng);
            let pi: HashMap<u32, u32> = distinct.iter().enumerate().map(|(r, &x)| (x, r as u32)).collect();
            let ends = block_ends(&s, |x| pi[&x], |x| len_of(x, &lens) <= lim);
            let mut b = 0;
            for e in ends {
                if e == b {
                    next.push(s[b]);
                } else {
                    let key = s[b..=e].to_vec();
                    let id = match lv.blocks.get(&key) {
                        Some(&id) => id,
                        None => {
                            rules.push(Rule::Seq(key.iter().map(|&x| id_sym(x)).collect()));
                            lens.push(key.iter().map(|&x| len_of(x, &lens)).sum());
                            let id = SIGMA + rules.len() as u32 - 1;
                            lv.blocks.insert(key, id);
                            id
                        }
                    };
                    next.push(id);
                }
                b = e + 1;
            }
            lv.pi.push(pi);
        }
        s = next;
        lv.seqs.push(s.clone());
    }
    lv.height = k;
    let start = if s[0] < SIGMA {
        rules.push(Rule::Seq(vec![Symbol::Term(s[0])]));
        rules.len() as u32 - 1
    } else {
        s[0] - SIGMA
    };
    Built { rules, start, levels: lv }
}

/// Block ends (inclusive indices) of one even level: local minima of `π`,
/// the last position, and both sides of every paused symbol. A paused left
/// neighbour does not count toward a local minimum, the same as the left
/// end of the sequence.
pub(crate) fn block_ends(s: &[u32], pi: impl Fn(u32) -> u32, groupable: impl Fn(u32) -> bool) -> Vec<usize> {
    let n = s.len();
    let g: Vec<bool> = s.iter().map(|&x| groupable(x)).collect();
    let p: Vec<u32> = s.iter().map(|&x| pi(x)).collect();
    let mut ends = Vec::new();
    for i in 0..n {
        let end = i + 1 == n || !g[i] || !g[i + 1] || (i > 0 && g[i - 1] && p[i - 1] > p[i] && p[i] < p[i + 1]);
        if end {
            ends.push(i);
        }
    }
    ends
}

/// Builds the grammar `retries` times with independent permutations and
/// keeps the smallest. The text must be nonempty.
pub fn build_lcg(text: &[u32], seed: u64, retries: u32) -> Result<(Rlcfg, LcgLevels)> {
    if text.is_empty() {
        return Err(Error::Range("cannot build a grammar for an empty text".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(u64, Built)> = None;
    for _ in 0..retries.max(1) {
        let b = build_once(text, &mut rng);
        let size: u64 = b.rules.iter().map(Rule::size).sum();
        if best.as_ref().is_none_or(|(s, _)| size < *s) {
            best = Some((size, b));
        }
    }
    let (_, b) = best.unwrap();
    let g = Rlcfg::new(b.rules, b.start)?;
    Ok((g, b.levels))
}

impl LcgLevels {
    pub fn height(&self) -> u32 {
        self.height
    }

    /// `S_k` as symbol ids, if the sequences were kept.
    pub fn sequence(&self, k: u32) -> Option<&[u32]> {
        self.seqs.get(k as usize).map(|v| &v[..])
    }

    pub fn pi(&self, k: u32) -> &HashMap<u32, u32> {
        &self.pi[k as usize]
    }

    pub fn run_symbol(&self, x: u32, t: u64) -> Option<u32> {
        self.runs.get(&(x, t)).copied()
    }

    pub fn block_symbol(&self, b: &[u32]) -> Option<u32> {
        self.blocks.get(b).copied()
    }

    /// Drops the per-level sequences, which only the consistency check uses.
    pub fn forget_sequences(&mut self) {
        self.seqs.clear();
    }

    /// 1-based text positions p in `B_k`: a level-k symbol ends at p.
    pub fn block_end_flags(&self, g: &Rlcfg, k: u32) -> Option<Vec<bool>> {
        let s = self.sequence(k)?;
        let n = g.text_len() as usize;
        let mut flags = vec![false; n + 1];
        let mut pos = 0u64;
        for &x in s {
            pos += g.len(id_sym(x));
            flags[pos as usize] = true;
        }
        Some(flags)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.u32(self.height);
        let mut runs: Vec<_> = self.runs.iter().collect();
        runs.sort_unstable();
        w.u64(runs.len() as u64);
        for (&(x, t), &id) in runs {
            w.u32(x);
            w.u64(t);
            w.u32(id);
        }
        let mut blocks: Vec<_> = self.blocks.iter().collect();
        blocks.sort_unstable();
        w.u64(blocks.len() as u64);
        for (b, &id) in blocks {
            w.u32s(b);
            w.u32(id);
        }
        w.u64(self.pi.len() as u64);
        for pi in &self.pi {
            let mut v: Vec<_> = pi.iter().collect();
            v.sort_unstable();
            w.u64(v.len() as u64);
            for (&x, &r) in v {
                w.u32(x);
                w.u32(r);
            }
        }
        w.buf
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        let mut r = Reader::new(data);
        let height = r.u32()?;
        let bound = |n: u64| -> Result<usize> {
            if n as usize > data.len() {
                Err(Error::Format("level table length exceeds data".into()))
            } else {
                Ok(n as usize)
            }
        };
        let mut runs = HashMap::new();
        for _ in 0..bound(r.u64()?)? {
            let x = r.u32()?;
            let t = r.u64()?;
            runs.insert((x, t), r.u32()?);
        }
        let mut blocks = HashMap::new();
        for _ in 0..bound(r.u64()?)? {
            let b = r.u32s()?;
            blocks.insert(b, r.u32()?);
        }
        let mut pi = Vec::new();
        for _ in 0..bound(r.u64()?)? {
            let mut m = HashMap::new();
            for _ in 0..bound(r.u64()?)? {
                let x = r.u32()?;
                m.insert(x, r.u32()?);
            }
            pi.push(m);
        }
        if !r.is_empty() || pi.len() != height as usize + 1 {
            return Err(Error::Format("malformed level tables".into()));
        }
        Ok(LcgLevels { height, pi, runs, blocks, seqs: Vec::new() })
    }
}

/// Checks `B_k(i+2α_k, j-α_k) = B_k(i'+2α_k, j'-α_k)` for two occurrences
/// `T[i..j] = T[i'..j']` (1-based), at every level. Requires the level
/// sequences.
pub fn local_consistency_check(
    g: &Rlcfg,
    lv: &LcgLevels,
    text: &[u32],
    (i, j): (u64, u64),
    (i2, j2): (u64, u64),
) -> Result<bool> {
    let n = text.len() as u64;
    if i == 0 || i2 == 0 || i > j || i2 > j2 || j > n || j2 > n {
        return Err(Error::Range(format!("[{i}, {j}] or [{i2}, {j2}] not within [1, {n}]")));
    }
    if text[i as usize - 1..j as usize] != text[i2 as usize - 1..j2 as usize] {
        return Err(Error::Range("the two substrings differ".into()));
    }
    for k in 0..=lv.height() {
        let Some(flags) = lv.block_end_flags(g, k) else {
            return Err(Error::Range("level sequences were not kept".into()));
        };
        let a = alpha(k);
        let restricted = |i: u64, j: u64| -> Vec<u64> {
            // B_k(i', j') with i' = i+2α, j' = j-α: ends p in [i'..j'-1]
            let lo = i.saturating_add(a.saturating_mul(2));
            let hi = j.saturating_sub(a);
            if lo >= hi || hi <= 1 {
                return Vec::new();
            }
            (lo..hi).filter(|&p| flags[p as usize]).map(|p| p - lo + 1).collect()
        };
        if restricted(i, j) != restricted(i2, j2) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exhaustive form of the check: at every level, whether p ends a block is
/// a function of the context `T[p-2α_k .. p+α_k+1]`. Returns the first
/// violating `(k, p, p')`, 1-based.
pub fn find_consistency_violation(g: &Rlcfg, lv: &LcgLevels, text: &[u32]) -> Option<(u32, u64, u64)> {
    let n = text.len() as u64;
    for k in 0..=lv.height() {
        let flags = lv.block_end_flags(g, k)?;
        let a = alpha(k);
        if a.saturating_mul(3).saturating_add(2) > n {
            continue;
        }
        let mut seen: HashMap<&[u32], (bool, u64)> = HashMap::new();
        for p in 2 * a + 1..=n - a - 1 {
            let ctx = &text[(p - 2 * a - 1) as usize..(p + a + 1) as usize];
            let f = flags[p as usize];
            match seen.get(ctx) {
                Some(&(f0, p0)) if f0 != f => return Some((k, p0, p)),
                Some(_) => {}
                None => {
                    seen.insert(ctx, (f, p));
                }
            }
        }
    }
    None
}
