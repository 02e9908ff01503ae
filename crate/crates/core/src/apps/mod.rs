//! Applications of MEM finding: relative Lempel-Ziv compression against an
//! indexed reference, and suffix-prefix overlaps among reads.

mod overlap;
mod rlz;

pub use overlap::{all_pairs_suffix_prefix, overlap_text, OverlapEdge, OverlapIndex, SEPARATOR};
pub use rlz::{rlz_compress, rlz_decompress, text_hash, RlzFile, RlzPhrase};
