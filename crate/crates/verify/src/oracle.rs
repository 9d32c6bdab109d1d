//! Brute-force oracles. Each one recomputes a library answer from first
//! principles: explicit word rewriting, hyperplane majorities, ball scans.

use rustc_hash::{FxHashMap, FxHashSet};

use raagtk_core::graph::DefGraph;
use raagtk_core::word::{
    geodesic_hyperplanes, invert, median, multiply, power, Hyperplane, Letter, NormalForm,
};

/// Words of length at most 15 over at most 16 letter codes, packed as
/// `len | code_i << (4 + 4i)`.
pub type Packed = u64;

pub fn pack(w: &[Letter]) -> Packed {
    assert!(w.len() <= 15);
    w.iter().enumerate().fold(w.len() as u64, |acc, (i, l)| {
        acc | (l.code() as u64) << (4 + 4 * i)
    })
}

pub fn unpack(p: Packed) -> Vec<Letter> {
    let len = (p & 15) as usize;
    (0..len)
        .map(|i| Letter::from_code((p >> (4 + 4 * i) & 15) as u8))
        .collect()
}

/// Lex-least shortest word equal to a given word, found by exploring
/// commutations of adjacent commuting letters and deletions of adjacent
/// inverse pairs. Memoized over whole commutation classes.
pub struct ShuffleOracle<'g> {
    g: &'g DefGraph,
    memo: FxHashMap<Packed, Packed>,
}

impl<'g> ShuffleOracle<'g> {
    pub fn new(g: &'g DefGraph) -> Self {
        ShuffleOracle {
            g,
            memo: FxHashMap::default(),
        }
    }

    pub fn least(&mut self, w: &[Letter]) -> Vec<Letter> {
        unpack(self.resolve(pack(w)))
    }

    fn resolve(&mut self, start: Packed) -> Packed {
        if let Some(&v) = self.memo.get(&start) {
            return v;
        }
        let mut class = vec![start];
        let mut seen: FxHashSet<Packed> = FxHashSet::default();
        seen.insert(start);
        let mut shorter = None;
        let mut i = 0;
        while i < class.len() {
            let w = unpack(class[i]);
            i += 1;
            for j in 0..w.len().saturating_sub(1) {
                let (x, y) = (w[j], w[j + 1]);
                if x == y.inverse() {
                    if shorter.is_none() {
                        let mut v = w.clone();
                        v.drain(j..j + 2);
                        shorter = Some(pack(&v));
                    }
                } else if self.g.adjacent(x.vertex(), y.vertex()) {
                    let mut v = w.clone();
                    v.swap(j, j + 1);
                    let p = pack(&v);
                    if seen.insert(p) {
                        class.push(p);
                    }
                }
            }
        }
        let value = match shorter {
            Some(s) => self.resolve(s),
            None => *class
                .iter()
                .min_by_key(|&&p| unpack(p).iter().map(|l| l.code()).collect::<Vec<_>>())
                .expect("class is nonempty"),
        };
        for p in class {
            self.memo.insert(p, value);
        }
        value
    }
}

/// Every word of length `len` over the letters of `g`.
pub fn all_words(g: &DefGraph, len: usize) -> impl Iterator<Item = Vec<Letter>> {
    let k = 2 * g.len() as u64;
    let total = k.pow(len as u32);
    (0..total).map(move |mut i| {
        (0..len)
            .map(|_| {
                let c = (i % k) as u8;
                i /= k;
                Letter::from_code(c)
            })
            .collect()
    })
}

/// The hyperplanes separating `1` from each element, as sorted interned ids.
pub struct WallSets {
    ids: FxHashMap<Hyperplane, u32>,
}

impl Default for WallSets {
    fn default() -> Self {
        Self::new()
    }
}

impl WallSets {
    pub fn new() -> Self {
        WallSets {
            ids: FxHashMap::default(),
        }
    }

    pub fn of(&mut self, g: &DefGraph, x: &NormalForm) -> Vec<u32> {
        let mut out: Vec<u32> = geodesic_hyperplanes(g, x)
            .into_iter()
            .map(|h| {
                let next = self.ids.len() as u32;
                *self.ids.entry(h).or_insert(next)
            })
            .collect();
        out.sort_unstable();
        out
    }
}

/// Hyperplanes lying in at least two of three sorted sets.
pub fn majority(a: &[u32], b: &[u32], c: &[u32]) -> Vec<u32> {
    let mut all: Vec<u32> = a.iter().chain(b).chain(c).copied().collect();
    all.sort_unstable();
    let mut out = Vec::new();
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j] == all[i] {
            j += 1;
        }
        if j - i >= 2 {
            out.push(all[i]);
        }
        i = j;
    }
    out
}

/// Whether `v ∈ Γ(x)`: in a tree, `d(p, x² p) > d(p, x p)` exactly when `x`
/// is loxodromic, and `v`-letter counts are `T_v` distances from the base
/// vertex.
pub fn in_gamma(g: &DefGraph, v: usize, x: &NormalForm) -> bool {
    multiply(g, x, x).count_vertex(v) > x.count_vertex(v)
}

/// Whether `k` maps the coset `x A_{Γ∖v}` to itself.
pub fn fixes_tree_vertex(g: &DefGraph, v: usize, x: &NormalForm, k: &NormalForm) -> bool {
    let y = multiply(g, &multiply(g, &invert(g, x), k), x);
    y.count_vertex(v) == 0
}

/// Translation length in `T_v` read off from `count_v(x^(2n)) − count_v(x^n)`
/// for `n` large enough that both powers reach the axis.
pub fn translation_length(g: &DefGraph, v: usize, x: &NormalForm) -> usize {
    let n = x.len().max(1) as i64;
    let a = power(g, x, n).count_vertex(v);
    let b = power(g, x, 2 * n).count_vertex(v);
    b.saturating_sub(a) / n as usize
}

/// Whether `k` stabilizes the hyperplane dual to the edge `(q, q v)`, that
/// is, whether `q^-1 k q ∈ A_{lk v}`.
pub fn stabilizes_hyperplane(g: &DefGraph, h: &Hyperplane, k: &NormalForm) -> bool {
    let y = multiply(g, &multiply(g, &invert(g, &h.base), k), &h.base);
    y.support().is_subset(g.adjacency()[h.label])
}

pub fn commutes(g: &DefGraph, x: &NormalForm, y: &NormalForm) -> bool {
    multiply(g, x, y) == multiply(g, y, x)
}

/// Length of the shortest conjugate by one of `conjugators`.
pub fn conjugacy_length(g: &DefGraph, x: &NormalForm, conjugators: &[NormalForm]) -> usize {
    conjugators
        .iter()
        .map(|c| multiply(g, &multiply(g, c, x), &invert(g, c)).len())
        .min()
        .unwrap_or(x.len())
}

/// Defect by direct median computation over every triple of the ball with
/// `p` on an `x`–`y` geodesic.
pub fn defect_by_medians(
    g: &DefGraph,
    images: &dyn Fn(&NormalForm) -> NormalForm,
    ball: &[NormalForm],
) -> usize {
    let phi: Vec<NormalForm> = ball.iter().map(images).collect();
    let mut best = 0;
    for (i, (x, fx)) in ball.iter().zip(&phi).enumerate() {
        for (y, fy) in ball[i..].iter().zip(&phi[i..]) {
            for (p, fp) in ball.iter().zip(&phi) {
                if median(g, x, y, p) != *p {
                    continue;
                }
                let m = median(g, fp, fx, fy);
                best = best.max(multiply(g, &invert(g, fp), &m).len());
            }
        }
    }
    best
}

/// Whether `x` is a proper power of some element of `candidates`.
pub fn is_proper_power(g: &DefGraph, x: &NormalForm, candidates: &[NormalForm]) -> bool {
    candidates
        .iter()
        .filter(|r| !r.is_identity())
        .any(|r| (2..=x.len() as i64).any(|n| power(g, r, n) == *x || power(g, r, -n) == *x))
}
