//! Binary grammar format, little-endian:
//!
//! ```text
//! "GRMRLCFG"  magic
//! u32         version (1)
//! u64         n, length of the generated text
//! u32         alphabet size (258)
//! u32         rule count g
//! u32         start nonterminal
//! g rules:    u8 tag 0 = sequence: u32 t, then t symbols
//!             u8 tag 1 = run:      one symbol, u64 repetitions
//! ```
//!
//! A symbol is a u32; bit 31 set marks a nonterminal index, otherwise a
//! terminal code.

use super::{Rlcfg, Rule, Symbol, SIGMA};
use crate::binio::{Reader, Writer};
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"GRMRLCFG";
const VERSION: u32 = 1;
const NT_BIT: u32 = 1 << 31;

fn enc(s: Symbol) -> u32 {
    match s {
        Symbol::Term(c) => c,
        Symbol::Nt(a) => a | NT_BIT,
    }
}

fn dec(v: u32) -> Symbol {
    if v & NT_BIT != 0 {
        Symbol::Nt(v & !NT_BIT)
    } else {
        Symbol::Term(v)
    }
}

pub fn grammar_to_bytes(g: &Rlcfg) -> Vec<u8> {
    let mut w = Writer::new();
    w.bytes(MAGIC);
    w.u32(VERSION);
    w.u64(g.text_len());
    w.u32(SIGMA);
    w.u32(g.rules().len() as u32);
    w.u32(g.start());
    for r in g.rules() {
        match r {
            Rule::Seq(ch) => {
                w.u8(0);
                w.u32(ch.len() as u32);
                for &c in ch {
                    w.u32(enc(c));
                }
            }
            Rule::Run(b, t) => {
                w.u8(1);
                w.u32(enc(*b));
                w.u64(*t);
            }
        }
    }
    w.buf
}

pub fn grammar_from_bytes(data: &[u8]) -> Result<Rlcfg> {
    let mut r = Reader::new(data);
    if r.bytes(8)? != MAGIC {
        return Err(Error::Format("not a grammar file (bad magic)".into()));
    }
    let v = r.u32()?;
    if v != VERSION {
        return Err(Error::Format(format!("unsupported grammar version {v}")));
    }
    let n = r.u64()?;
    let sigma = r.u32()?;
    if sigma != SIGMA {
        return Err(Error::Format(format!("alphabet size {sigma}, expected {SIGMA}")));
    }
    let count = r.u32()? as usize;
    let start = r.u32()?;
    let mut rules = Vec::with_capacity(count.min(data.len()));
    for _ in 0..count {
        match r.u8()? {
            0 => {
                let t = r.u32()? as usize;
                if t > data.len() {
                    return Err(Error::Format("rule length exceeds data".into()));
                }
                let ch = (0..t).map(|_| r.u32().map(dec)).collect::<Result<Vec<_>>>()?;
                rules.push(Rule::Seq(ch));
            }
            1 => {
                let b = dec(r.u32()?);
                rules.push(Rule::Run(b, r.u64()?));
            }
            t => return Err(Error::Format(format!("unknown rule tag {t}"))),
        }
    }
    if !r.is_empty() {
        return Err(Error::Format("trailing bytes after grammar".into()));
    }
    let g = Rlcfg::new(rules, start)?;
    if g.text_len() != n {
        return Err(Error::Format(format!("header says n = {n}, grammar generates {}", g.text_len())));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn round_trip() {
        for g in [example_grammar(), run8()] {
            let b = grammar_to_bytes(&g);
            let h = grammar_from_bytes(&b).unwrap();
            assert_eq!(h.rules(), g.rules());
            assert_eq!(h.start(), g.start());
            assert_eq!(h.expand(), g.expand());
        }
    }

    #[test]
    fn rejects_corruption() {
        let b = grammar_to_bytes(&example_grammar());
        assert!(grammar_from_bytes(&b[..b.len() - 1]).is_err());
        let mut bad = b.clone();
        bad[0] = b'X';
        assert!(grammar_from_bytes(&bad).is_err());
        let mut bad = b.clone();
        bad[12] ^= 1; // n
        assert!(grammar_from_bytes(&bad).is_err());
        let mut long = b;
        long.push(0);
        assert!(grammar_from_bytes(&long).is_err());
    }
}
