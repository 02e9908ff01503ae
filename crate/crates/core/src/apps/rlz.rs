//! Relative Lempel-Ziv: the text as a shortest sequence of reference
//! substrings, read off the MEMs of the text against the reference.
//!
//! File layout, little-endian:
//!
//! ```text
//! "GRMRLZ01"  magic
//! [u8; 32]    SHA-256 of the reference (codes as u32)
//! u64         text length
//! u64         z, then z pairs of u64 (a, b)
//! ```

use sha2::{Digest, Sha256};

use crate::binio::{Reader, Writer};
use crate::index::Index;
use crate::mem::find_mems;
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"GRMRLZ01";

/// `R[a..b]`, 1-based inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RlzPhrase {
    pub a: u64,
    pub b: u64,
}

impl RlzPhrase {
    pub fn len(&self) -> u64 {
        self.b + 1 - self.a
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Greedy cover of `t` by reference substrings. Each phrase runs from the
/// current position to the end of the MEM that reaches farthest among those
/// starting at or before it.
pub fn rlz_compress(reference: &Index, t: &[u32]) -> Result<Vec<RlzPhrase>> {
    let mems = find_mems(reference, t);
    let mut out = Vec::new();
    let mut c = 0usize;
    let mut p = 1usize;
    while p <= t.len() {
        while c + 1 < mems.len() && mems[c + 1].i <= p {
            c += 1;
        }
        match mems.get(c) {
            Some(m) if m.i <= p && p <= m.j => {
                let b = m.p;
                out.push(RlzPhrase { a: b - (m.j - p) as u64, b });
                p = m.j + 1;
            }
            _ => return Err(Error::SymbolAbsent(t[p - 1])),
        }
    }
    Ok(out)
}

pub fn rlz_decompress(reference: &[u32], phrases: &[RlzPhrase]) -> Result<Vec<u32>> {
    let n = reference.len() as u64;
    let mut out = Vec::new();
    for ph in phrases {
        if ph.a == 0 || ph.a > ph.b || ph.b > n {
            return Err(Error::Range(format!("phrase ({}, {}) not within [1, {n}]", ph.a, ph.b)));
        }
        out.extend_from_slice(&reference[ph.a as usize - 1..ph.b as usize]);
    }
    Ok(out)
}

pub fn text_hash(text: &[u32]) -> [u8; 32] {
    let mut h = Sha256::new();
    for &c in text {
        h.update(c.to_le_bytes());
    }
    h.finalize().into()
}

/// A compressed text tied to its reference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RlzFile {
    pub reference_hash: [u8; 32],
    pub text_len: u64,
    pub phrases: Vec<RlzPhrase>,
}

impl RlzFile {
    /// Phrase bytes over text length.
    pub fn ratio(&self) -> f64 {
        if self.text_len == 0 {
            return 0.0;
        }
        16.0 * self.phrases.len() as f64 / self.text_len as f64
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.bytes(MAGIC);
        w.bytes(&self.reference_hash);
        w.u64(self.text_len);
        w.u64(self.phrases.len() as u64);
        for ph in &self.phrases {
            w.u64(ph.a);
            w.u64(ph.b);
        }
        w.buf
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        let mut r = Reader::new(data);
        if r.bytes(8)? != MAGIC {
            return Err(Error::Format("not an RLZ file".into()));
        }
        let reference_hash: [u8; 32] = r.bytes(32)?.try_into().unwrap();
        let text_len = r.u64()?;
        let z = r.u64()?;
        if z.saturating_mul(16) != (data.len() - 56) as u64 {
            return Err(Error::Format("RLZ phrase count does not match file size".into()));
        }
        let mut phrases = Vec::with_capacity(z as usize);
        for _ in 0..z {
            let a = r.u64()?;
            let b = r.u64()?;
            phrases.push(RlzPhrase { a, b });
        }
        if phrases.iter().map(|p| p.b.saturating_sub(p.a) + 1).sum::<u64>() != text_len {
            return Err(Error::Format("RLZ phrases do not add up to the text length".into()));
        }
        Ok(RlzFile { reference_hash, text_len, phrases })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::terminals;
    use crate::oracle::naive_rlz;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn t(s: &str) -> Vec<u32> {
        terminals(s.as_bytes())
    }

    #[test]
    fn example_example() {
        let r = t("la_sal_sala_la_ensalada");
        let idx = Index::from_text(&r, 1).unwrap();
        let ph = rlz_compress(&idx, &t("sala_sal")).unwrap();
        assert_eq!(ph, vec![RlzPhrase { a: 8, b: 12 }, RlzPhrase { a: 4, b: 6 }]);
        assert_eq!(rlz_decompress(&r, &ph).unwrap(), t("sala_sal"));
        assert_eq!(rlz_compress(&idx, &r).unwrap(), vec![RlzPhrase { a: 1, b: 23 }]);
        assert!(rlz_compress(&idx, &[]).unwrap().is_empty());
        assert!(rlz_decompress(&r, &[]).unwrap().is_empty());
        assert!(matches!(rlz_compress(&idx, &t("saz")), Err(Error::SymbolAbsent(c)) if c == b'z' as u32));
        assert!(rlz_decompress(&r, &[RlzPhrase { a: 20, b: 24 }]).is_err());
    }

    #[test]
    fn greedy_count_and_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for case in 0..60 {
            let sigma = [2u32, 4, 16][case % 3];
            // every symbol occurs in the reference
            let mut r: Vec<u32> = (0..rng.gen_range(1..300)).map(|_| rng.gen_range(0..sigma)).collect();
            r.extend(0..sigma);
            let t: Vec<u32> = (0..rng.gen_range(0..200)).map(|_| rng.gen_range(0..sigma)).collect();
            let idx = Index::from_text(&r, case as u64).unwrap();
            let got = rlz_compress(&idx, &t).unwrap();
            let want = naive_rlz(&r, &t).unwrap();
            assert_eq!(got.len(), want.len());
            assert_eq!(rlz_decompress(&r, &got).unwrap(), t);
            let f = RlzFile { reference_hash: text_hash(&r), text_len: t.len() as u64, phrases: got };
            assert_eq!(RlzFile::from_bytes(&f.to_bytes()).unwrap(), f);
        }
    }
}
