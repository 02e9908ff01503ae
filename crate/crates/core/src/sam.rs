//! Suffix automaton with occurrence counts.
//!
//! A state is the class of substrings sharing one set of end positions; it
//! covers the lengths `(len(link), len]`. Seen from a suffix tree of the
//! reversed string, a state is a node and `count` is its number of leaves,
//! which is what the MUM and k-rare filters ask of a locus.

#[derive(Clone, Debug)]
pub struct SuffixAutomaton {
    next: Vec<Vec<(u32, u32)>>,
    link: Vec<u32>,
    len: Vec<u32>,
    first_end: Vec<u32>,
    count: Vec<u64>,
}

const NONE: u32 = u32::MAX;

impl SuffixAutomaton {
    pub fn new(s: &[u32]) -> Self {
        let cap = 2 * s.len() + 1;
        let mut sa = SuffixAutomaton {
            next: Vec::with_capacity(cap),
            link: Vec::with_capacity(cap),
            len: Vec::with_capacity(cap),
            first_end: Vec::with_capacity(cap),
            count: Vec::with_capacity(cap),
        };
        sa.push_state(0, NONE, 0, 0);
        let mut last = 0u32;
        for (pos, &c) in s.iter().enumerate() {
            let cur = sa.push_state(sa.len[last as usize] + 1, NONE, pos as u32, 1);
            let mut p = last;
            while p != NONE && sa.step(p, c).is_none() {
                sa.next[p as usize].push((c, cur));
                p = sa.link[p as usize];
            }
            if p == NONE {
                sa.link[cur as usize] = 0;
            } else {
                let q = sa.step(p, c).unwrap();
                if sa.len[p as usize] + 1 == sa.len[q as usize] {
                    sa.link[cur as usize] = q;
                } else {
                    let clone = sa.push_state(sa.len[p as usize] + 1, sa.link[q as usize], sa.first_end[q as usize], 0);
                    sa.next[clone as usize] = sa.next[q as usize].clone();
                    while p != NONE && sa.step(p, c) == Some(q) {
                        for e in sa.next[p as usize].iter_mut() {
                            if e.0 == c {
                                e.1 = clone;
                            }
                        }
                        p = sa.link[p as usize];
                    }
                    sa.link[q as usize] = clone;
                    sa.link[cur as usize] = clone;
                }
            }
            last = cur;
        }
        // endpos sizes: accumulate along suffix links, longest states first
        let mut order: Vec<u32> = (1..sa.len.len() as u32).collect();
        order.sort_unstable_by_key(|&v| std::cmp::Reverse(sa.len[v as usize]));
        for v in order {
            let l = sa.link[v as usize] as usize;
            sa.count[l] += sa.count[v as usize];
        }
        sa
    }

    fn push_state(&mut self, len: u32, link: u32, first_end: u32, count: u64) -> u32 {
        self.next.push(Vec::new());
        self.link.push(link);
        self.len.push(len);
        self.first_end.push(first_end);
        self.count.push(count);
        self.len.len() as u32 - 1
    }

    pub fn step(&self, v: u32, c: u32) -> Option<u32> {
        self.next[v as usize].iter().find(|e| e.0 == c).map(|e| e.1)
    }

    pub fn link(&self, v: u32) -> u32 {
        self.link[v as usize]
    }

    pub fn max_len(&self, v: u32) -> u32 {
        self.len[v as usize]
    }

    /// 0-based end position of the first occurrence of the strings of `v`.
    pub fn first_end(&self, v: u32) -> u32 {
        self.first_end[v as usize]
    }

    /// Number of occurrences of the strings of `v`.
    pub fn count(&self, v: u32) -> u64 {
        self.count[v as usize]
    }

    pub fn num_states(&self) -> usize {
        self.len.len()
    }

    /// Occurrence count of `s`, 0 if absent.
    pub fn count_of(&self, s: &[u32]) -> u64 {
        let mut v = 0;
        for &c in s {
            match self.step(v, c) {
                Some(w) => v = w,
                None => return 0,
            }
        }
        // the root's count is n; the empty string occurs n+1 times
        self.count[v as usize] + s.is_empty() as u64
    }
}

/// A sliding window over the automaton: the current string can grow on the
/// right and shrink on the left.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Walker {
    pub state: u32,
    pub len: u32,
}

impl Default for Walker {
    fn default() -> Self {
        Self::new()
    }
}

impl Walker {
    pub fn new() -> Self {
        Walker { state: 0, len: 0 }
    }

    /// Appends `c`; false (and no change) if the result does not occur.
    pub fn push(&mut self, sa: &SuffixAutomaton, c: u32) -> bool {
        match sa.step(self.state, c) {
            Some(w) => {
                self.state = w;
                self.len += 1;
                true
            }
            None => false,
        }
    }

    /// Drops the first character.
    pub fn pop_front(&mut self, sa: &SuffixAutomaton) {
        debug_assert!(self.len > 0);
        self.len -= 1;
        if self.state != 0 && self.len <= sa.max_len(sa.link(self.state)) {
            self.state = sa.link(self.state);
        }
    }

    pub fn count(&self, sa: &SuffixAutomaton) -> u64 {
        sa.count(self.state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_count(s: &[u32], p: &[u32]) -> u64 {
        if p.is_empty() {
            return s.len() as u64 + 1;
        }
        s.windows(p.len()).filter(|w| *w == p).count() as u64
    }

    #[test]
    fn counts_small() {
        let s: Vec<u32> = b"la_sal_sala_la_ensalada".iter().map(|&b| b as u32).collect();
        let sa = SuffixAutomaton::new(&s);
        let t = |x: &str| x.bytes().map(|b| b as u32).collect::<Vec<_>>();
        assert_eq!(sa.count_of(&t("la")), 4);
        assert_eq!(sa.count_of(&t("sala")), 2);
        assert_eq!(sa.count_of(&t("ens")), 1);
        assert_eq!(sa.count_of(&t("xyz")), 0);
        assert!(sa.num_states() < 2 * s.len());
    }

    proptest! {
        #[test]
        fn walker_tracks_window(s in proptest::collection::vec(0u32..3, 1..60),
                                ops in proptest::collection::vec(any::<bool>(), 0..200)) {
            let sa = SuffixAutomaton::new(&s);
            let mut w = Walker::new();
            let (mut i, mut j) = (0usize, 0usize); // window s[i..j]
            for grow in ops {
                if grow && j < s.len() {
                    prop_assert!(w.push(&sa, s[j]));
                    j += 1;
                } else if i < j {
                    w.pop_front(&sa);
                    i += 1;
                }
                prop_assert_eq!(w.len as usize, j - i);
                if j > i {
                    prop_assert_eq!(w.count(&sa), naive_count(&s, &s[i..j]));
                    let e = sa.first_end(w.state) as usize;
                    prop_assert_eq!(&s[e + 1 - (j - i)..=e], &s[i..j]);
                }
            }
        }
    }
}
