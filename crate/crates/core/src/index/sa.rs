//! Suffix array, LCP array and a sparse-table range minimum, used only at
//! build time to sort the X and Y sets.

/// Suffix array by prefix doubling.
pub fn suffix_array(s: &[u32]) -> Vec<u32> {
    let n = s.len();
    let mut sa: Vec<u32> = (0..n as u32).collect();
    if n <= 1 {
        return sa;
    }
    let mut rank: Vec<u32> = s.to_vec();
    let mut tmp = vec![0u32; n];
    let mut h = 1usize;
    loop {
        // key: (rank[i], rank[i+h] + 1 or 0 past the end)
        let key = |i: u32, rank: &[u32]| -> (u32, u32) {
            let i = i as usize;
            (rank[i], if i + h < n { rank[i + h] + 1 } else { 0 })
        };
        sa.sort_unstable_by_key(|&i| key(i, &rank));
        tmp[sa[0] as usize] = 0;
        for w in 1..n {
            let bump = key(sa[w - 1], &rank) != key(sa[w], &rank);
            tmp[sa[w] as usize] = tmp[sa[w - 1] as usize] + bump as u32;
        }
        std::mem::swap(&mut rank, &mut tmp);
        if rank[sa[n - 1] as usize] as usize == n - 1 || h >= n {
            break;
        }
        h *= 2;
    }
    sa
}

/// Kasai: `lcp[r]` = LCP of the suffixes of ranks `r-1` and `r`; `lcp[0] = 0`.
pub fn lcp_array(s: &[u32], sa: &[u32]) -> Vec<u32> {
    let n = s.len();
    let mut rank = vec![0u32; n];
    for (r, &p) in sa.iter().enumerate() {
        rank[p as usize] = r as u32;
    }
    let mut lcp = vec![0u32; n];
    let mut h = 0usize;
    for i in 0..n {
        let r = rank[i] as usize;
        if r == 0 {
            h = 0;
            continue;
        }
        let j = sa[r - 1] as usize;
        while i + h < n && j + h < n && s[i + h] == s[j + h] {
            h += 1;
        }
        lcp[r] = h as u32;
        h = h.saturating_sub(1);
    }
    lcp
}

/// Range minimum over a fixed array.
#[derive(Clone, Debug)]
pub struct SparseMin {
    table: Vec<Vec<u32>>,
}

impl SparseMin {
    pub fn new(a: &[u32]) -> Self {
        let mut table = vec![a.to_vec()];
        let mut w = 1;
        while 2 * w <= a.len() {
            let prev = table.last().unwrap();
            let next: Vec<u32> = (0..=a.len() - 2 * w).map(|i| prev[i].min(prev[i + w])).collect();
            table.push(next);
            w *= 2;
        }
        SparseMin { table }
    }

    /// Minimum of `a[l..r]`, `l < r`.
    pub fn min(&self, l: usize, r: usize) -> u32 {
        debug_assert!(l < r);
        let k = (usize::BITS - 1 - (r - l).leading_zeros()) as usize;
        self.table[k][l].min(self.table[k][r - (1 << k)])
    }
}

/// Longest-common-extension queries between suffixes of one string.
pub struct Lce {
    n: usize,
    rank: Vec<u32>,
    rmq: SparseMin,
}

impl Lce {
    pub fn new(s: &[u32]) -> Self {
        let sa = suffix_array(s);
        let lcp = lcp_array(s, &sa);
        let mut rank = vec![0u32; s.len()];
        for (r, &p) in sa.iter().enumerate() {
            rank[p as usize] = r as u32;
        }
        Lce { n: s.len(), rank, rmq: SparseMin::new(&lcp) }
    }

    /// LCP of the suffixes starting at `a` and `b` (either may be `n`).
    pub fn lce(&self, a: usize, b: usize) -> usize {
        if a == self.n || b == self.n {
            return 0;
        }
        if a == b {
            return self.n - a;
        }
        let (ra, rb) = (self.rank[a] as usize, self.rank[b] as usize);
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.rmq.min(lo + 1, hi + 1) as usize
    }

    /// Compares `s[a..a+la]` with `s[b..b+lb]`; also returns their LCP.
    pub fn compare(&self, a: usize, la: usize, b: usize, lb: usize) -> (std::cmp::Ordering, usize) {
        let l = self.lce(a, b).min(la).min(lb);
        if l == la || l == lb {
            return (la.cmp(&lb), l);
        }
        (self.rank[a].cmp(&self.rank[b]), l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn sa_and_lcp_match_naive(s in proptest::collection::vec(0u32..3, 0..80)) {
            let sa = suffix_array(&s);
            let mut naive: Vec<u32> = (0..s.len() as u32).collect();
            naive.sort_by(|&a, &b| s[a as usize..].cmp(&s[b as usize..]));
            prop_assert_eq!(&sa, &naive);
            let lcp = lcp_array(&s, &sa);
            for r in 1..s.len() {
                let (a, b) = (&s[sa[r - 1] as usize..], &s[sa[r] as usize..]);
                let l = a.iter().zip(b).take_while(|(x, y)| x == y).count();
                prop_assert_eq!(lcp[r] as usize, l);
            }
        }

        #[test]
        fn substring_compare(s in proptest::collection::vec(0u32..2, 1..50),
                             a in 0usize..50, la in 0usize..20, b in 0usize..50, lb in 0usize..20) {
            let n = s.len();
            let (a, b) = (a % (n + 1), b % (n + 1));
            let (la, lb) = (la.min(n - a), lb.min(n - b));
            let lce = Lce::new(&s);
            let (x, y) = (&s[a..a + la], &s[b..b + lb]);
            let l = x.iter().zip(y).take_while(|(p, q)| p == q).count();
            prop_assert_eq!(lce.compare(a, la, b, lb), (x.cmp(y), l));
        }
    }
}
