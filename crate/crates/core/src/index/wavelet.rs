//! Wavelet matrix over a sequence of small integers: rank-based counting,
//! quantiles and range successor/predecessor of values.

#[derive(Clone, Debug)]
struct Bits {
    words: Vec<u64>,
    // ones before each word
    before: Vec<u32>,
}

impl Bits {
    fn new(flags: &[bool]) -> Self {
        let mut words = vec![0u64; flags.len() / 64 + 1];
        for (i, &f) in flags.iter().enumerate() {
            if f {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        let mut before = Vec::with_capacity(words.len());
        let mut acc = 0u32;
        for w in &words {
            before.push(acc);
            acc += w.count_ones();
        }
        Bits { words, before }
    }

    /// Ones in `[0, i)`.
    fn rank1(&self, i: usize) -> usize {
        let (w, b) = (i / 64, i % 64);
        let mask = if b == 0 { 0 } else { u64::MAX >> (64 - b) };
        self.before[w] as usize + (self.words[w] & mask).count_ones() as usize
    }

    fn rank0(&self, i: usize) -> usize {
        i - self.rank1(i)
    }
}

#[derive(Clone, Debug)]
pub struct WaveletMatrix {
    len: usize,
    levels: Vec<Bits>,
    zeros: Vec<usize>,
}

impl WaveletMatrix {
    pub fn new(values: &[u32]) -> Self {
        let max = values.iter().copied().max().unwrap_or(0);
        let height = (32 - max.leading_zeros()).max(1) as usize;
        let mut cur = values.to_vec();
        let mut levels = Vec::with_capacity(height);
        let mut zeros = Vec::with_capacity(height);
        for l in (0..height).rev() {
            let flags: Vec<bool> = cur.iter().map(|&v| v >> l & 1 == 1).collect();
            let (z, o): (Vec<u32>, Vec<u32>) = cur.iter().partition(|&&v| v >> l & 1 == 0);
            zeros.push(z.len());
            levels.push(Bits::new(&flags));
            cur = z;
            cur.extend(o);
        }
        WaveletMatrix { len: values.len(), levels, zeros }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn height(&self) -> usize {
        self.levels.len()
    }

    /// Number of values `< x` in positions `[l, r)`.
    pub fn count_less(&self, mut l: usize, mut r: usize, x: u64) -> usize {
        let h = self.height();
        if x >= 1u64 << h {
            return r - l;
        }
        let mut count = 0;
        for (d, bits) in self.levels.iter().enumerate() {
            let bit = x >> (h - 1 - d) & 1;
            let (l0, r0) = (bits.rank0(l), bits.rank0(r));
            if bit == 1 {
                count += r0 - l0;
                l = self.zeros[d] + (l - l0);
                r = self.zeros[d] + (r - r0);
            } else {
                l = l0;
                r = r0;
            }
        }
        count
    }

    /// The `k`-th smallest value (0-based) in positions `[l, r)`.
    pub fn kth_smallest(&self, mut l: usize, mut r: usize, mut k: usize) -> u32 {
        debug_assert!(k < r - l);
        let h = self.height();
        let mut v = 0u32;
        for (d, bits) in self.levels.iter().enumerate() {
            let (l0, r0) = (bits.rank0(l), bits.rank0(r));
            if k < r0 - l0 {
                l = l0;
                r = r0;
            } else {
                k -= r0 - l0;
                v |= 1 << (h - 1 - d);
                l = self.zeros[d] + (l - l0);
                r = self.zeros[d] + (r - r0);
            }
        }
        v
    }

    /// Smallest value `>= x` in positions `[l, r)`.
    pub fn next_value(&self, l: usize, r: usize, x: u64) -> Option<u32> {
        if l >= r {
            return None;
        }
        let c = self.count_less(l, r, x);
        (c < r - l).then(|| self.kth_smallest(l, r, c))
    }

    /// Largest value `<= x` in positions `[l, r)`.
    pub fn prev_value(&self, l: usize, r: usize, x: u64) -> Option<u32> {
        if l >= r {
            return None;
        }
        let c = self.count_less(l, r, x + 1);
        (c > 0).then(|| self.kth_smallest(l, r, c - 1))
    }
}
