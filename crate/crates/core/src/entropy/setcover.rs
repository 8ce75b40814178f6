//! Set-cover machinery: word bitsets, greedy cover, maximal cliques and an
//! exact branch-and-bound cover on `u64` masks.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet { words: vec![0; len.div_ceil(64)] }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::new(len);
        for i in 0..len {
            s.insert(i);
        }
        s
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn intersection_count(&self, other: &BitSet) -> usize {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn remove_all(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }
}

/// Lazy greedy set cover; ties go to the lowest set index. `None` when the
/// sets do not cover the universe.
pub fn greedy_cover(sets: &[BitSet], universe: usize) -> Option<Vec<usize>> {
    let mut uncovered = BitSet::full(universe);
    let mut heap: BinaryHeap<(usize, Reverse<usize>)> =
        sets.iter().enumerate().map(|(i, s)| (s.intersection_count(&uncovered), Reverse(i))).collect();
    let mut chosen = Vec::new();
    let mut left = universe;
    while left > 0 {
        let (gain, Reverse(i)) = heap.pop()?;
        if gain == 0 {
            return None;
        }
        let fresh = sets[i].intersection_count(&uncovered);
        if fresh == gain {
            uncovered.remove_all(&sets[i]);
            left -= fresh;
            chosen.push(i);
        } else if fresh > 0 {
            heap.push((fresh, Reverse(i)));
        }
    }
    Some(chosen)
}

/// Maximal cliques of the graph with adjacency masks `adj` (no self loops),
/// by Bron–Kerbosch with pivoting.
pub fn maximal_cliques(adj: &[u64]) -> Vec<u64> {
    let all = if adj.len() == 64 { u64::MAX } else { (1u64 << adj.len()) - 1 };
    let mut out = Vec::new();
    bron_kerbosch(0, all, 0, adj, &mut out);
    out
}

fn bron_kerbosch(r: u64, mut p: u64, mut x: u64, adj: &[u64], out: &mut Vec<u64>) {
    if p == 0 {
        if x == 0 {
            out.push(r);
        }
        return;
    }
    let mut px = p | x;
    let mut pivot = 0;
    let mut best = 0;
    let mut first = true;
    while px != 0 {
        let u = px.trailing_zeros() as usize;
        px &= px - 1;
        let c = (p & adj[u]).count_ones();
        if first || c > best {
            best = c;
            pivot = u;
            first = false;
        }
    }
    let mut cand = p & !adj[pivot];
    while cand != 0 {
        let v = cand.trailing_zeros() as usize;
        let bit = 1u64 << v;
        cand &= !bit;
        bron_kerbosch(r | bit, p & adj[v], x & adj[v], adj, out);
        p &= !bit;
        x |= bit;
    }
}

struct Search<'a> {
    sets: &'a [u64],
    containing: Vec<Vec<usize>>,
    reach: Vec<u64>,
    best: Vec<usize>,
    stack: Vec<usize>,
    max_size: u32,
}

impl Search<'_> {
    fn lower_bound(&self, uncovered: u64) -> usize {
        let by_size = (uncovered.count_ones()).div_ceil(self.max_size) as usize;
        let mut u = uncovered;
        let mut independent = 0;
        while u != 0 {
            let e = u.trailing_zeros() as usize;
            independent += 1;
            u &= !self.reach[e];
            u &= !(1u64 << e);
        }
        by_size.max(independent)
    }

    fn run(&mut self, uncovered: u64) {
        if uncovered == 0 {
            if self.stack.len() < self.best.len() {
                self.best = self.stack.clone();
            }
            return;
        }
        if self.stack.len() + self.lower_bound(uncovered) >= self.best.len() {
            return;
        }
        let mut u = uncovered;
        let mut pick = usize::MAX;
        let mut fewest = usize::MAX;
        while u != 0 {
            let e = u.trailing_zeros() as usize;
            u &= u - 1;
            if self.containing[e].len() < fewest {
                fewest = self.containing[e].len();
                pick = e;
            }
        }
        let mut options: Vec<usize> = self.containing[pick].clone();
        options.sort_by_key(|&s| (Reverse((self.sets[s] & uncovered).count_ones()), s));
        for s in options {
            self.stack.push(s);
            self.run(uncovered & !self.sets[s]);
            self.stack.pop();
        }
    }
}

/// Minimum set cover of `universe` by `sets`; `None` when uncoverable.
pub fn exact_cover(sets: &[u64], universe: u64) -> Option<Vec<usize>> {
    if sets.iter().fold(0, |a, s| a | s) & universe != universe {
        return None;
    }
    if universe == 0 {
        return Some(Vec::new());
    }
    // drop sets contained in another set
    let mut keep: Vec<usize> = Vec::new();
    for (i, &s) in sets.iter().enumerate() {
        let s = s & universe;
        if s == 0 {
            continue;
        }
        let dominated = sets.iter().enumerate().any(|(j, &t)| {
            let t = t & universe;
            j != i && s & t == s && (s != t || j < i)
        });
        if !dominated {
            keep.push(i);
        }
    }
    let reduced: Vec<u64> = keep.iter().map(|&i| sets[i] & universe).collect();
    let n = 64 - universe.leading_zeros() as usize;
    let mut containing = vec![Vec::new(); n];
    let mut reach = vec![0u64; n];
    for (k, &s) in reduced.iter().enumerate() {
        let mut b = s;
        while b != 0 {
            let e = b.trailing_zeros() as usize;
            b &= b - 1;
            containing[e].push(k);
            reach[e] |= s;
        }
    }
    let greedy = {
        let mut u = universe;
        let mut chosen = Vec::new();
        while u != 0 {
            let (k, _) = reduced
                .iter()
                .enumerate()
                .map(|(k, s)| (k, (s & u).count_ones()))
                .max_by_key(|&(k, c)| (c, Reverse(k)))
                .expect("coverable");
            chosen.push(k);
            u &= !reduced[k];
        }
        chosen
    };
    let max_size = reduced.iter().map(|s| s.count_ones()).max().unwrap_or(1);
    let mut search = Search { sets: &reduced, containing, reach, best: greedy, stack: Vec::new(), max_size };
    search.run(universe);
    Some(search.best.into_iter().map(|k| keep[k]).collect())
}
