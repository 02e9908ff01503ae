use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::grammar::fixtures::{example_grammar, run8, EXAMPLE_TEXT};
use crate::grammar::terminals;

fn t(s: &str) -> Vec<u32> {
    terminals(s.as_bytes())
}

fn naive_occ(text: &[u32], p: &[u32]) -> Vec<u64> {
    if p.is_empty() || p.len() > text.len() {
        return Vec::new();
    }
    text.windows(p.len()).enumerate().filter(|(_, w)| *w == p).map(|(i, _)| i as u64 + 1).collect()
}

fn random_text(rng: &mut ChaCha8Rng, n: usize, sigma: u32) -> Vec<u32> {
    (0..n).map(|_| b'a' as u32 + rng.gen_range(0..sigma)).collect()
}

fn repetitive(rng: &mut ChaCha8Rng, base: usize, copies: usize, sigma: u32) -> Vec<u32> {
    let b = random_text(rng, base, sigma);
    let mut out = Vec::new();
    for _ in 0..copies {
        let mut c = b.clone();
        for x in c.iter_mut() {
            if rng.gen_bool(0.02) {
                *x = b'a' as u32 + rng.gen_range(0..sigma);
            }
        }
        out.extend(c);
    }
    out
}

/// The X and Y strings of every point, materialized, by column and row.
fn materialize(idx: &Index) -> (Vec<Vec<u32>>, Vec<Vec<u32>>) {
    let xs = idx.px().strings().iter().map(|s| idx.grammar_rev().extract(s.sym, s.off, s.len)).collect();
    let ys = idx.py().strings().iter().map(|s| idx.grammar().extract(s.sym, s.off, s.len)).collect();
    (xs, ys)
}

fn lcp(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

#[test]
fn example_locate_a_underscore() {
    let idx = Index::build(example_grammar(), None, 7);
    let occ = idx.locate(&t("a_"));
    assert_eq!(
        occ,
        vec![
            Occurrence { pos: 2, primary: true },
            Occurrence { pos: 11, primary: true },
            Occurrence { pos: 14, primary: false },
        ]
    );
    assert!(idx.locate(&t("xyz")).is_empty());
    assert!(idx.locate(&t("")).is_empty());
}

#[test]
fn example_primary_points_and_expansion() {
    let idx = Index::build(example_grammar(), None, 7);
    let p = t("a_");
    let x = idx.x_locate(&t("a"));
    let y = idx.y_locate(&t("_"));
    assert_eq!((x.depth, y.depth), (1, 1));
    let mut pos: Vec<u64> =
        idx.rect_points(idx.x_range(x), idx.y_range(y)).map(|c| idx.points()[c as usize].pos).collect();
    pos.sort_unstable();
    // 1-based positions of the left half's last character
    assert_eq!(pos, vec![2, 11]);
    // the primary at 2 lies in A, which occurs again at 13
    let col = idx.rect_points(idx.x_range(x), idx.y_range(y)).find(|&c| idx.points()[c as usize].pos == 2).unwrap();
    let (rule, off, _) = idx.point_primaries(col, 1, p.len() as u64).next().unwrap();
    let mut got = Vec::new();
    idx.expand(rule, off, u64::MAX, &mut |q| got.push(q + 1));
    got.sort_unstable();
    assert_eq!(got, vec![2, 14]);
    let mut one = Vec::new();
    assert_eq!(idx.expand(rule, off, 1, &mut |q| one.push(q + 1)), 1);
    assert_eq!(one.len(), 1);
}

#[test]
fn example_y_probe_depth() {
    let idx = Index::build(example_grammar(), None, 7);
    let (_, ys) = materialize(&idx);
    let probe = t("a_e");
    let best = ys.iter().map(|y| lcp(y, &probe)).max().unwrap();
    assert_eq!(best, 2);
    let at = idx.y_locate(&probe);
    assert_eq!(at.depth, 2);
    assert_eq!(idx.y_locate(&[]), idx.py().root());
}

#[test]
fn point_counts() {
    // one point per split, plus the end-of-text point
    let idx = Index::build(run8(), None, 1);
    assert_eq!(idx.points().len(), 2);
    let (xs, ys) = materialize(&idx);
    let run_col = idx.points().iter().position(|p| p.run.is_some()).unwrap();
    assert_eq!(xs[run_col], t("a"));
    let row = (0..2).find(|&r| idx.col_of_row(r) as usize == run_col).unwrap();
    assert_eq!(ys[row as usize], t("aaaaaaa"));
    assert_eq!(idx.locate(&t("a")).len(), 8);
    assert_eq!(idx.locate(&t("aaa")).iter().map(|o| o.pos).collect::<Vec<_>>(), (1..=6).collect::<Vec<_>>());

    let g = Rlcfg::new(vec![Rule::Seq(t("abcab").into_iter().map(Symbol::Term).collect())], 0).unwrap();
    let idx = Index::build(g, None, 1);
    assert_eq!(idx.points().len(), 4 + 1);
}

#[test]
fn full_grid_nonempty() {
    let idx = Index::build(example_grammar(), None, 3);
    let np = idx.points().len() as u32;
    assert!(!idx.rect_empty((0, np - 1), (0, np - 1)));
}

#[test]
fn grid_queries_match_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..20 {
        let text = repetitive(&mut rng, 40, 5, 3);
        let idx = Index::from_text(&text, case).unwrap();
        let np = idx.points().len() as u32;
        let pts: Vec<(u32, u32)> = (0..np).map(|y| (idx.col_of_row(y), y)).collect();
        for _ in 0..500 {
            let (a, b) = (rng.gen_range(0..np), rng.gen_range(0..np));
            let (c, d) = (rng.gen_range(0..np), rng.gen_range(0..np));
            let (xr, yr) = ((a.min(b), a.max(b)), (c.min(d), c.max(d)));
            let inside: Vec<u32> = {
                let mut v: Vec<u32> = pts
                    .iter()
                    .filter(|&&(x, y)| xr.0 <= x && x <= xr.1 && yr.0 <= y && y <= yr.1)
                    .map(|p| p.0)
                    .collect();
                v.sort_unstable();
                v
            };
            assert_eq!(idx.rect_empty(xr, yr), inside.is_empty());
            assert_eq!(idx.rect_points(xr, yr).collect::<Vec<_>>(), inside);
            let in_band = |x: u32, y: u32| yr.0 <= y && y <= yr.1 && x <= xr.0;
            let left = pts.iter().filter(|&&(x, y)| in_band(x, y)).map(|p| p.0).max();
            assert_eq!(idx.col_upto(xr.0 as u64, yr), left);
            let right = pts.iter().filter(|&&(x, y)| yr.0 <= y && y <= yr.1 && x >= xr.1).map(|p| p.0).min();
            assert_eq!(idx.col_from(xr.1 as u64, yr), right);
        }
    }
}

#[test]
fn patricia_depths_match_materialized_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..15 {
        let text = if case % 2 == 0 { repetitive(&mut rng, 60, 6, 2) } else { random_text(&mut rng, 300, 4) };
        let idx = Index::from_text(&text, case).unwrap();
        let (xs, ys) = materialize(&idx);
        // sorted order
        assert!(xs.windows(2).all(|w| w[0] <= w[1]));
        assert!(ys.windows(2).all(|w| w[0] <= w[1]));
        for _ in 0..100 {
            let a = rng.gen_range(0..text.len());
            let len = rng.gen_range(0..30).min(text.len() - a);
            let mut probe = text[a..a + len].to_vec();
            if rng.gen_bool(0.3) && !probe.is_empty() {
                let k = rng.gen_range(0..probe.len());
                probe[k] = b'a' as u32 + rng.gen_range(0..4);
            }
            let yb = ys.iter().map(|y| lcp(y, &probe)).max().unwrap();
            let yl = idx.y_locate(&probe);
            assert_eq!(yl.depth as usize, yb);
            let (lo, hi) = idx.y_range(yl);
            for (r, y) in ys.iter().enumerate() {
                assert_eq!(lo as usize <= r && r <= hi as usize, lcp(y, &probe) >= yb);
            }
            let xb = xs.iter().map(|x| lcp(x, &probe)).max().unwrap();
            assert_eq!(idx.x_locate(&probe).depth as usize, xb);
        }
    }
}

#[test]
fn batched_matches_single_searches() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for case in 0..20 {
        let text = repetitive(&mut rng, 50, 8, 2 + case as u32 % 3);
        let idx = Index::from_text(&text, case).unwrap();
        let a = rng.gen_range(0..text.len() / 2);
        let mut p = text[a..a + rng.gen_range(1..text.len() / 2)].to_vec();
        for x in p.iter_mut() {
            if rng.gen_bool(0.03) {
                *x = b'a' as u32 + rng.gen_range(0..4);
            }
        }
        let q: Vec<u32> = p.iter().rev().copied().collect();
        let ys = deepest_all(idx.py(), idx.grammar(), idx.kr(), &p);
        let xs = deepest_all(idx.px(), idx.grammar_rev(), idx.kr_rev(), &q);
        for s in 0..=p.len() {
            assert_eq!(ys[s], idx.y_locate(&p[s..]), "y suffix {s}");
            assert_eq!(xs[s], idx.x_locate(&q[s..]), "x suffix {s}");
        }
    }
}

#[test]
fn range_expand_agrees_with_parent_walk() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for case in 0..20 {
        let text = if case % 2 == 0 { repetitive(&mut rng, 80, 10, 2) } else { random_text(&mut rng, 500, 3) };
        let idx = Index::from_text(&text, case).unwrap();
        let q: Vec<u32> = text.iter().rev().copied().collect();
        for _ in 0..300 {
            // a reachable state: vx from a reversed text piece, y from a text piece
            let a = rng.gen_range(0..text.len());
            let vx = idx.x_locate(&q[a..(a + rng.gen_range(1..40)).min(q.len())]);
            let b = rng.gen_range(0..text.len());
            let y = idx.y_locate(&text[b..(b + rng.gen_range(0..10)).min(text.len())]);
            let yr = idx.y_range(y);
            let fast = idx.range_expand(vx, yr);
            let slow = idx.parent_walk(vx, yr);
            if slow == vx {
                assert_eq!(fast, vx);
            } else {
                assert_eq!((fast.node, fast.depth), (slow.node, slow.depth));
            }
            // the result is minimal: one step down toward vx is empty
            if fast != vx {
                assert!(!idx.rect_empty(idx.x_range(fast), yr) || fast.depth == 0);
            }
            if y.depth == 0 && vx.depth > 0 {
                assert!(fast.depth > 0);
            }
        }
    }
}

#[test]
fn locate_matches_naive() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..40 {
        let text = match case % 3 {
            0 => repetitive(&mut rng, 70, 12, 2),
            1 => {
                let n = rng.gen_range(1..400);
                random_text(&mut rng, n, 2)
            }
            _ => {
                let n = rng.gen_range(1..400);
                random_text(&mut rng, n, 16)
            }
        };
        let idx = Index::from_text(&text, case).unwrap();
        for _ in 0..30 {
            let p = if rng.gen_bool(0.7) {
                let a = rng.gen_range(0..text.len());
                text[a..(a + rng.gen_range(1..12)).min(text.len())].to_vec()
            } else {
                let n = rng.gen_range(1..5);
                random_text(&mut rng, n, 3)
            };
            let want = naive_occ(&text, &p);
            let got = idx.locate(&p);
            assert_eq!(got.iter().map(|o| o.pos).collect::<Vec<_>>(), want);
            assert_eq!(idx.count_bounded(&p, u64::MAX - 1), Some(want.len() as u64));
            for b in [0u64, 1, 2, 5] {
                let c = idx.count_bounded(&p, b);
                assert_eq!(c, (want.len() as u64 <= b).then_some(want.len() as u64));
            }
            // primaries are exactly the occurrences crossing a phrase boundary
            let ends = idx.tree().phrase_ends();
            for o in &got {
                let (s, e) = (o.pos, o.pos + p.len() as u64 - 1);
                let crosses =
                    if p.len() == 1 { ends.binary_search(&s).is_ok() } else { ends.iter().any(|&x| s <= x && x < e) };
                if o.primary {
                    assert!(crosses);
                }
            }
        }
    }
}

#[test]
fn counts_on_example_text() {
    let idx = Index::build(example_grammar(), None, 2);
    assert_eq!(idx.count_bounded(&t("ens"), 1), Some(1));
    assert_eq!(idx.count_bounded(&t("la"), 3), None);
    assert_eq!(idx.count_bounded(&t("la"), 4), Some(4));
    assert_eq!(idx.count_bounded(&t("zz"), 1), Some(0));
    assert_eq!(naive_occ(&t(EXAMPLE_TEXT), &t("la")), vec![1, 10, 13, 20]);
}

#[test]
fn bundle_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let text = repetitive(&mut rng, 100, 10, 4);
    let idx = Index::from_text(&text, 4).unwrap();
    let bytes = idx.to_bytes();
    let back = Index::from_bytes(&bytes).unwrap();
    assert_eq!(back.to_bytes(), bytes);
    for _ in 0..50 {
        let a = rng.gen_range(0..text.len());
        let p = text[a..(a + rng.gen_range(1..20)).min(text.len())].to_vec();
        assert_eq!(idx.locate(&p), back.locate(&p));
    }
    let mut bad = bytes.clone();
    bad[60] ^= 1;
    assert!(Index::from_bytes(&bad).is_err());
    assert!(Index::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    let mut v = bytes;
    v[8] = 9;
    assert!(Index::from_bytes(&v).is_err());
}
