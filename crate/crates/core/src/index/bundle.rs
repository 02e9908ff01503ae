//! Index bundle, little-endian:
//!
//! ```text
//! "GRMINDEX"  magic
//! u32         version (1)
//! u64         n
//! [u8; 32]    SHA-256 of the grammar payload
//! blob        grammar (see grammar::grammar_to_bytes)
//! u8          1 if LCG levels follow
//! blob        levels
//! u64         seed (fixes the Karp-Rabin base)
//! ...         Patricia tree of X, then of Y
//! u64         point count, then per point: u32 rule, u64 split, u64 pos,
//!             u64 |B| and u64 t (both 0 for sequence rules)
//! u32 array   column of the point in each row
//! ```
//!
//! The reversed grammar, grammar tree, wavelet matrix and LCA tables are
//! rebuilt on load.

use std::path::Path;

use sha2::{Digest, Sha256};

use super::{reversed, Index, Patricia, Point};
use crate::binio::{Reader, Writer};
use crate::grammar::{grammar_from_bytes, grammar_to_bytes, GrammarTree};
use crate::lcg::LcgLevels;
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"GRMINDEX";
const VERSION: u32 = 1;

impl Index {
    pub fn to_bytes(&self) -> Vec<u8> {
        let gb = grammar_to_bytes(&self.g);
        let mut w = Writer::new();
        w.bytes(MAGIC);
        w.u32(VERSION);
        w.u64(self.text_len());
        w.bytes(&Sha256::digest(&gb));
        w.blob(&gb);
        match &self.levels {
            Some(lv) => {
                w.u8(1);
                w.blob(&lv.to_bytes());
            }
            None => w.u8(0),
        }
        w.u64(self.seed);
        self.px.write(&mut w);
        self.py.write(&mut w);
        w.u64(self.points.len() as u64);
        for p in &self.points {
            w.u32(p.rule);
            w.u64(p.split);
            w.u64(p.pos);
            let (bl, t) = p.run.unwrap_or((0, 0));
            w.u64(bl);
            w.u64(t);
        }
        w.u32s(&self.col_of_row);
        w.buf
    }

    pub fn from_bytes(data: &[u8]) -> Result<Index> {
        let bad = |what: &str| Error::Format(format!("index bundle: {what}"));
        let mut r = Reader::new(data);
        if r.bytes(8)? != MAGIC {
            return Err(bad("not an index bundle"));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(bad(&format!("version {version}, expected {VERSION}")));
        }
        let n = r.u64()?;
        let hash = r.bytes(32)?.to_vec();
        let gb = r.blob()?;
        if Sha256::digest(gb)[..] != hash[..] {
            return Err(bad("grammar checksum mismatch"));
        }
        let g = grammar_from_bytes(gb)?;
        if g.text_len() != n {
            return Err(bad("text length mismatch"));
        }
        let levels = match r.u8()? {
            0 => None,
            1 => Some(LcgLevels::from_bytes(r.blob()?)?),
            _ => return Err(bad("bad levels flag")),
        };
        let seed = r.u64()?;
        let px = Patricia::read(&mut r)?;
        let py = Patricia::read(&mut r)?;
        let np = r.u64()? as usize;
        if np.saturating_mul(36) > data.len() {
            return Err(bad("point count exceeds data"));
        }
        let nr = g.rules().len() as u32;
        let mut points = Vec::with_capacity(np);
        for _ in 0..np {
            let rule = r.u32()?;
            let split = r.u64()?;
            let pos = r.u64()?;
            let bl = r.u64()?;
            let t = r.u64()?;
            if rule >= nr || pos > n {
                return Err(bad("point out of range"));
            }
            points.push(Point { rule, split, pos, run: (t > 0).then_some((bl, t)) });
        }
        let col_of_row = r.u32s()?;
        if !r.is_empty() {
            return Err(bad("trailing bytes"));
        }
        let mut seen = vec![false; np];
        for &c in &col_of_row {
            if c as usize >= np || std::mem::replace(&mut seen[c as usize], true) {
                return Err(bad("grid is not a permutation"));
            }
        }
        if col_of_row.len() != np || px.num_leaves() != np || py.num_leaves() != np {
            return Err(bad("point counts disagree"));
        }
        let tree = GrammarTree::new(&g);
        let grev = reversed(&g);
        Ok(Index::assemble(g, grev, tree, seed, px, py, points, col_of_row, levels))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Index> {
        Index::from_bytes(&std::fs::read(path)?)
    }
}
