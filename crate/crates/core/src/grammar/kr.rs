use super::{Rlcfg, Rule, Symbol};
use crate::{Error, Result};

const P: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    let x = a as u128 * b as u128;
    let r = ((x >> 61) as u64) + ((x as u64) & P);
    if r >= P {
        r - P
    } else {
        r
    }
}

fn addmod(a: u64, b: u64) -> u64 {
    let r = a + b;
    if r >= P {
        r - P
    } else {
        r
    }
}

fn submod(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

/// Polynomial signatures `κ(s) = Σ (s_i+1)·b^(|s|-1-i) mod 2^61-1` with
/// per-rule prefix signatures, so that `κ(exp(A)[..ℓ])` costs one descent.
#[derive(Clone, Debug)]
pub struct KrContext {
    base: u64,
    full: Vec<u64>,
    // κ_i(A) = κ(exp(B1..Bi)) for sequence rules
    prefix: Vec<Vec<u64>>,
}

impl KrContext {
    pub fn new(g: &Rlcfg, base: u64) -> Self {
        let base = base % (P - 2) + 2;
        let n = g.rules().len();
        let mut ctx = KrContext { base, full: vec![0; n], prefix: vec![Vec::new(); n] };
        for &a in g.topo_order() {
            let a = a as usize;
            match &g.rules()[a] {
                Rule::Seq(ch) => {
                    let mut acc = 0;
                    let mut pre = Vec::with_capacity(ch.len() + 1);
                    pre.push(0);
                    for &c in ch {
                        acc = ctx.compose(acc, ctx.sym(c), g.len(c));
                        pre.push(acc);
                    }
                    ctx.full[a] = acc;
                    ctx.prefix[a] = pre;
                }
                Rule::Run(b, t) => ctx.full[a] = ctx.power_of(ctx.sym(*b), g.len(*b), *t),
            }
        }
        ctx
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn empty(&self) -> u64 {
        0
    }

    pub fn char_sig(&self, c: u32) -> u64 {
        c as u64 + 1
    }

    fn sym(&self, s: Symbol) -> u64 {
        match s {
            Symbol::Term(c) => self.char_sig(c),
            Symbol::Nt(a) => self.full[a as usize],
        }
    }

    pub fn pow(&self, mut e: u64) -> u64 {
        let mut r = 1;
        let mut b = self.base;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        r
    }

    /// κ(S·S') from κ(S), κ(S') and |S'|.
    pub fn compose(&self, s: u64, s2: u64, len2: u64) -> u64 {
        addmod(mulmod(s, self.pow(len2)), s2)
    }

    /// κ(S') from κ(S·S'), κ(S) and |S'|.
    pub fn strip_prefix(&self, whole: u64, s: u64, len2: u64) -> u64 {
        submod(whole, mulmod(s, self.pow(len2)))
    }

    /// κ(X^q) given κ(X) and |X|.
    fn power_of(&self, x: u64, xlen: u64, q: u64) -> u64 {
        // doubling over (κ(X^k), b^(k|X|))
        let mut acc = 0u64;
        let (mut blk, mut blk_pow) = (x, self.pow(xlen));
        let mut q = q;
        while q > 0 {
            if q & 1 == 1 {
                acc = addmod(mulmod(acc, blk_pow), blk);
            }
            blk = addmod(mulmod(blk, blk_pow), blk);
            blk_pow = mulmod(blk_pow, blk_pow);
            q >>= 1;
        }
        acc
    }

    /// Character-wise fold, the reference definition.
    pub fn fold(&self, s: &[u32]) -> u64 {
        s.iter().fold(0, |acc, &c| addmod(mulmod(acc, self.base), self.char_sig(c)))
    }

    /// Prefix signatures of a character string: `out[i] = κ(s[..i])`.
    pub fn prefix_table(&self, s: &[u32]) -> Vec<u64> {
        let mut out = Vec::with_capacity(s.len() + 1);
        let mut acc = 0;
        out.push(0);
        for &c in s {
            acc = addmod(mulmod(acc, self.base), self.char_sig(c));
            out.push(acc);
        }
        out
    }

    /// κ(s[a..b]) from a prefix table.
    pub fn range(&self, table: &[u64], a: usize, b: usize) -> u64 {
        self.strip_prefix(table[b], table[a], (b - a) as u64)
    }

    /// κ(exp(sym)[..len]), descending through stored prefix signatures.
    pub fn signature(&self, g: &Rlcfg, mut sym: Symbol, mut len: u64) -> Result<u64> {
        if len > g.len(sym) {
            return Err(Error::Range(format!("signature length {len} exceeds |exp| = {}", g.len(sym))));
        }
        let mut acc = 0u64;
        loop {
            if len == 0 {
                return Ok(acc);
            }
            if len == g.len(sym) {
                return Ok(self.compose(acc, self.sym(sym), len));
            }
            let Symbol::Nt(a) = sym else { unreachable!("partial prefix of a terminal") };
            match g.rule(a) {
                Rule::Seq(ch) => {
                    let w = g.child_offsets(a);
                    // child i holds position len-1: w[i] < len <= w[i+1]
                    let i = w.partition_point(|&x| x < len) - 1;
                    acc = self.compose(acc, self.prefix[a as usize][i], w[i]);
                    len -= w[i];
                    sym = ch[i];
                }
                Rule::Run(b, _) => {
                    let bl = g.len(*b);
                    let q = (len - 1) / bl;
                    acc = self.compose(acc, self.power_of(self.sym(*b), bl, q), q * bl);
                    len -= q * bl;
                    sym = *b;
                }
            }
        }
    }

    /// κ(exp(sym)[from..from+len]).
    pub fn substring(&self, g: &Rlcfg, sym: Symbol, from: u64, len: u64) -> Result<u64> {
        let whole = self.signature(g, sym, from + len)?;
        let head = self.signature(g, sym, from)?;
        Ok(self.strip_prefix(whole, head, len))
    }
}
