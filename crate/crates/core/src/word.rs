//! Words over Γ^±, normal forms, medians and hyperplane bookkeeping.
//!
//! Letters are packed as `vertex * 2 + positive`, so the derived ordering is
//! graph order with `v^-1 < v`, which is exactly the order used to pick the
//! canonical representative of a shuffle class.

use std::fmt;

use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::graph::{DefGraph, VertexSet};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u8);

impl Letter {
    pub fn new(vertex: usize, positive: bool) -> Self {
        debug_assert!(vertex < 64);
        Letter((vertex as u8) << 1 | positive as u8)
    }

    pub fn pos(vertex: usize) -> Self {
        Letter::new(vertex, true)
    }

    pub fn neg(vertex: usize) -> Self {
        Letter::new(vertex, false)
    }

    pub fn from_code(code: u8) -> Self {
        Letter(code)
    }

    #[inline]
    pub fn code(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn vertex(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn sign(self) -> i64 {
        if self.is_positive() {
            1
        } else {
            -1
        }
    }

    #[inline]
    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "#{}", self.vertex())
        } else {
            write!(f, "#{}^-1", self.vertex())
        }
    }
}

/// An arbitrary, possibly unreduced, word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses whitespace-separated letters `a`, `a^-1` or `a^k`; `1` is the
    /// empty word.
    pub fn parse(g: &DefGraph, text: &str) -> Result<Word> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            if token == "1" {
                continue;
            }
            let (name, exponent) = match token.split_once('^') {
                None => (token, 1i64),
                Some((name, exp)) => {
                    let exp: i64 = exp
                        .parse()
                        .map_err(|_| Error::InvalidLetter(token.to_string()))?;
                    if exp.unsigned_abs() > 1 << 16 {
                        return Err(Error::InvalidLetter(token.to_string()));
                    }
                    (name, exp)
                }
            };
            if name.is_empty() {
                return Err(Error::InvalidLetter(token.to_string()));
            }
            let v = g.vertex(name)?;
            let letter = Letter::new(v, exponent > 0);
            letters.extend(std::iter::repeat(letter).take(exponent.unsigned_abs() as usize));
        }
        Ok(Word(letters))
    }

    pub fn check(&self, g: &DefGraph) -> Result<()> {
        check_letters(g, &self.0)
    }
}

pub fn check_letters(g: &DefGraph, letters: &[Letter]) -> Result<()> {
    match letters.iter().find(|l| l.vertex() >= g.len()) {
        Some(l) => Err(Error::InvalidLetter(format!("{l:?}"))),
        None => Ok(()),
    }
}

/// Formats letters as `a b^-1 c`; the empty word is `1`.
pub fn format_letters(g: &DefGraph, letters: &[Letter]) -> String {
    if letters.is_empty() {
        return "1".to_string();
    }
    let mut out = String::new();
    for (i, l) in letters.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(g.name(l.vertex()));
        if !l.is_positive() {
            out.push_str("^-1");
        }
    }
    out
}

/// The canonical reduced representative of a group element.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalForm(Vec<Letter>);

impl NormalForm {
    pub fn identity() -> Self {
        NormalForm(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn support(&self) -> VertexSet {
        support(&self.0)
    }

    /// Number of letters `v^±1`.
    pub fn count_vertex(&self, v: usize) -> usize {
        self.0.iter().filter(|l| l.vertex() == v).count()
    }

    pub fn format(&self, g: &DefGraph) -> String {
        format_letters(g, &self.0)
    }

    pub fn parse(g: &DefGraph, text: &str) -> Result<Self> {
        Ok(normalize(g, Word::parse(g, text)?.letters()))
    }

    pub fn generator(v: usize) -> Self {
        NormalForm(vec![Letter::pos(v)])
    }
}

pub fn support(letters: &[Letter]) -> VertexSet {
    letters.iter().map(|l| l.vertex()).collect()
}

#[inline]
fn dependent(g: &DefGraph, a: Letter, b: Letter) -> bool {
    !g.adjacency()[a.vertex()].contains(b.vertex())
}

/// Free reduction modulo the commutation relations. Each incoming letter scans
/// back over the letters it commutes with and cancels against an inverse if
/// it meets one.
pub fn reduce(g: &DefGraph, letters: &[Letter]) -> Vec<Letter> {
    let adj = g.adjacency();
    let mut stack: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        let v = l.vertex();
        let mut cancel = None;
        for j in (0..stack.len()).rev() {
            let m = stack[j];
            if m.vertex() == v {
                if m == l.inverse() {
                    cancel = Some(j);
                }
                break;
            }
            if !adj[v].contains(m.vertex()) {
                break;
            }
        }
        match cancel {
            Some(j) => {
                stack.remove(j);
            }
            None => stack.push(l),
        }
    }
    stack
}

/// Reorders a reduced word into its canonical representative by repeatedly
/// emitting the least letter that can be shuffled to the front.
pub fn canonicalize(g: &DefGraph, w: &[Letter]) -> Vec<Letter> {
    let n = w.len();
    if n <= 1 {
        return w.to_vec();
    }
    let mut blockers = vec![0u32; n];
    for k in 1..n {
        for i in 0..k {
            if dependent(g, w[i], w[k]) {
                blockers[k] += 1;
            }
        }
    }
    let mut done = vec![false; n];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best: Option<usize> = None;
        for k in 0..n {
            if !done[k] && blockers[k] == 0 && best.map_or(true, |b| w[k] < w[b]) {
                best = Some(k);
            }
        }
        let k = best.expect("a dependency DAG always has a source");
        done[k] = true;
        out.push(w[k]);
        for j in k + 1..n {
            if !done[j] && dependent(g, w[k], w[j]) {
                blockers[j] -= 1;
            }
        }
    }
    out
}

pub fn normalize(g: &DefGraph, letters: &[Letter]) -> NormalForm {
    NormalForm(canonicalize(g, &reduce(g, letters)))
}

/// As [`normalize`], rejecting letters outside the graph.
pub fn try_normalize(g: &DefGraph, letters: &[Letter]) -> Result<NormalForm> {
    check_letters(g, letters)?;
    Ok(normalize(g, letters))
}

pub fn is_reduced(g: &DefGraph, letters: &[Letter]) -> bool {
    reduce(g, letters).len() == letters.len()
}

pub fn inverse_letters(letters: &[Letter]) -> Vec<Letter> {
    letters.iter().rev().map(|l| l.inverse()).collect()
}

pub fn invert(g: &DefGraph, x: &NormalForm) -> NormalForm {
    NormalForm(canonicalize(g, &inverse_letters(&x.0)))
}

pub fn multiply(g: &DefGraph, x: &NormalForm, y: &NormalForm) -> NormalForm {
    let mut w = Vec::with_capacity(x.len() + y.len());
    w.extend_from_slice(&x.0);
    w.extend_from_slice(&y.0);
    normalize(g, &w)
}

/// Normal form of the product of several elements.
pub fn product(g: &DefGraph, factors: &[&NormalForm]) -> NormalForm {
    let w: Vec<Letter> = factors.iter().flat_map(|f| f.0.iter().copied()).collect();
    normalize(g, &w)
}

/// `x y x^-1`.
pub fn conjugate(g: &DefGraph, x: &NormalForm, y: &NormalForm) -> NormalForm {
    let mut w = Vec::with_capacity(2 * x.len() + y.len());
    w.extend_from_slice(&x.0);
    w.extend_from_slice(&y.0);
    w.extend(inverse_letters(&x.0));
    normalize(g, &w)
}

pub fn power(g: &DefGraph, x: &NormalForm, n: i64) -> NormalForm {
    let base = if n < 0 {
        inverse_letters(&x.0)
    } else {
        x.0.clone()
    };
    let mut w = Vec::with_capacity(base.len() * n.unsigned_abs() as usize);
    for _ in 0..n.unsigned_abs() {
        w.extend_from_slice(&base);
    }
    normalize(g, &w)
}

/// Word distance `|x^-1 y|` in the Cayley graph (= the Salvetti complex's
/// 1-skeleton).
pub fn distance(g: &DefGraph, x: &NormalForm, y: &NormalForm) -> usize {
    let mut w = inverse_letters(&x.0);
    w.extend_from_slice(&y.0);
    reduce(g, &w).len()
}

/// Codes of the letters of a reduced word that can be shuffled to the front,
/// as a bitmask indexed by [`Letter::code`].
pub fn first_letters(g: &DefGraph, w: &[Letter]) -> u128 {
    scan_extremal(g, w.iter().copied())
}

/// Codes of the letters that can be shuffled to the end.
pub fn last_letters(g: &DefGraph, w: &[Letter]) -> u128 {
    scan_extremal(g, w.iter().rev().copied())
}

fn scan_extremal(g: &DefGraph, letters: impl Iterator<Item = Letter>) -> u128 {
    let adj = g.adjacency();
    let all = g.all().bits();
    let mut blocked = 0u64;
    let mut out = 0u128;
    for l in letters {
        let v = l.vertex();
        if blocked >> v & 1 == 0 {
            out |= 1 << l.code();
        }
        blocked |= !adj[v].bits();
        if blocked & all == all {
            break;
        }
    }
    out
}

pub fn letters_of_mask(mask: u128) -> impl Iterator<Item = Letter> {
    let mut bits = mask;
    std::iter::from_fn(move || {
        if bits == 0 {
            None
        } else {
            let c = bits.trailing_zeros() as u8;
            bits &= bits - 1;
            Some(Letter::from_code(c))
        }
    })
}

fn remove_first_occurrence(w: &mut Vec<Letter>, v: usize) {
    let i = w
        .iter()
        .position(|l| l.vertex() == v)
        .expect("letter present");
    w.remove(i);
}

fn remove_last_occurrence(w: &mut Vec<Letter>, v: usize) {
    let i = w
        .iter()
        .rposition(|l| l.vertex() == v)
        .expect("letter present");
    w.remove(i);
}

/// Greatest common prefix of two reduced words in the prefix order of the
/// trace monoid, i.e. the median of `1`, `u`, `v`.
pub fn gcp(g: &DefGraph, u: &[Letter], v: &[Letter]) -> NormalForm {
    let mut u = u.to_vec();
    let mut v = v.to_vec();
    let mut prefix = Vec::new();
    loop {
        let common = first_letters(g, &u) & first_letters(g, &v);
        if common == 0 {
            break;
        }
        for l in letters_of_mask(common) {
            remove_first_occurrence(&mut u, l.vertex());
            remove_first_occurrence(&mut v, l.vertex());
            prefix.push(l);
        }
    }
    NormalForm(canonicalize(g, &prefix))
}

/// The cubical median `m(x, y, z) = x · gcp(x^-1 y, x^-1 z)`.
pub fn median(g: &DefGraph, x: &NormalForm, y: &NormalForm, z: &NormalForm) -> NormalForm {
    let xi = inverse_letters(&x.0);
    let mut wy = xi.clone();
    wy.extend_from_slice(&y.0);
    let mut wz = xi;
    wz.extend_from_slice(&z.0);
    let p = gcp(g, &reduce(g, &wy), &reduce(g, &wz));
    if p.is_empty() {
        return x.clone();
    }
    multiply(g, x, &p)
}

/// `g = x · core · x^-1` with the concatenation reduced and `core` cyclically
/// reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicDecomposition {
    pub conjugator: NormalForm,
    pub core: NormalForm,
}

/// Peels off, one at a time, the least first letter whose inverse is a last
/// letter; what remains is cyclically reduced.
pub fn cyclic_reduce(g: &DefGraph, x: &NormalForm) -> CyclicDecomposition {
    let mut core = x.0.clone();
    let mut conj = Vec::new();
    loop {
        let first = first_letters(g, &core);
        let last = last_letters(g, &core);
        // a letter l with l first and l^-1 last; l and l^-1 have codes differing in bit 0
        let flipped = ((last & 0x5555_5555_5555_5555_5555_5555_5555_5555) << 1)
            | ((last >> 1) & 0x5555_5555_5555_5555_5555_5555_5555_5555);
        let candidates = first & flipped;
        if candidates == 0 {
            break;
        }
        let l = Letter::from_code(candidates.trailing_zeros() as u8);
        remove_first_occurrence(&mut core, l.vertex());
        remove_last_occurrence(&mut core, l.vertex());
        conj.push(l);
    }
    CyclicDecomposition {
        conjugator: NormalForm(canonicalize(g, &conj)),
        core: NormalForm(canonicalize(g, &core)),
    }
}

pub fn is_cyclically_reduced(g: &DefGraph, x: &NormalForm) -> bool {
    cyclic_reduce(g, x).conjugator.is_empty()
}

/// Strips, to a fixpoint, last letters whose vertex lies in `strip`, giving the
/// shortest representative of the coset `w · A_strip`.
pub fn coset_representative(g: &DefGraph, w: &[Letter], strip: VertexSet) -> NormalForm {
    let mut w = reduce(g, w);
    loop {
        let removable: Vec<Letter> = letters_of_mask(last_letters(g, &w))
            .filter(|l| strip.contains(l.vertex()))
            .collect();
        if removable.is_empty() {
            break;
        }
        for l in removable {
            remove_last_occurrence(&mut w, l.vertex());
        }
    }
    NormalForm(canonicalize(g, &w))
}

/// A hyperplane of the Salvetti complex's universal cover: the family of
/// edges `q·{1, v}` with `q` ranging over `base · A_{lk v}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hyperplane {
    pub label: usize,
    pub base: NormalForm,
}

impl Hyperplane {
    /// The hyperplane dual to the edge from `q` to `q·v`.
    pub fn from_edge(g: &DefGraph, q: &[Letter], label: usize) -> Self {
        Hyperplane {
            label,
            base: coset_representative(g, q, g.adjacency()[label]),
        }
    }

    /// The hyperplane dual to the edge from `p` to `p·l`.
    pub fn crossed_by(g: &DefGraph, p: &[Letter], l: Letter) -> Self {
        let mut q = p.to_vec();
        if !l.is_positive() {
            q.push(l);
        }
        Hyperplane::from_edge(g, &q, l.vertex())
    }

    pub fn translate(&self, g: &DefGraph, k: &NormalForm) -> Self {
        let mut q = k.0.clone();
        q.extend_from_slice(&self.base.0);
        Hyperplane::from_edge(g, &q, self.label)
    }

    pub fn format(&self, g: &DefGraph) -> String {
        format!("{}@[{}]", g.name(self.label), self.base.format(g))
    }
}

/// The hyperplanes crossed by the canonical geodesic from `1` to `x`, in
/// crossing order.
pub fn geodesic_hyperplanes(g: &DefGraph, x: &NormalForm) -> Vec<Hyperplane> {
    hyperplanes_along(g, &x.0)
}

/// The hyperplanes crossed by the path spelled by a reduced word from `1`.
pub fn hyperplanes_along(g: &DefGraph, w: &[Letter]) -> Vec<Hyperplane> {
    (0..w.len())
        .map(|i| Hyperplane::crossed_by(g, &w[..i], w[i]))
        .collect()
}

/// Result of a capped median-subalgebra closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closure {
    pub elements: Vec<Vec<NormalForm>>,
    pub truncated: bool,
}

pub const DEFAULT_CLOSURE_CAP: usize = 100_000;

/// Least median-closed set of tuples containing `seeds`, with the median taken
/// coordinatewise. Stops with `truncated = true` once more than `cap` tuples
/// have been produced.
pub fn subalgebra_closure(g: &DefGraph, seeds: &[Vec<NormalForm>], cap: usize) -> Result<Closure> {
    let arity = seeds.first().map_or(0, Vec::len);
    if let Some(bad) = seeds.iter().find(|t| t.len() != arity) {
        return Err(Error::ArityMismatch {
            expected: arity,
            found: bad.len(),
        });
    }
    let mut seen: FxHashSet<Vec<NormalForm>> = FxHashSet::default();
    let mut all: Vec<Vec<NormalForm>> = Vec::new();
    for t in seeds {
        if seen.insert(t.clone()) {
            all.push(t.clone());
        }
    }
    let mut old = 0;
    let mut truncated = all.len() > cap;
    'outer: while old < all.len() && !truncated {
        let end = all.len();
        for k in old..end {
            for j in 0..=k {
                for i in 0..=j {
                    let m: Vec<NormalForm> = (0..arity)
                        .map(|c| median(g, &all[i][c], &all[j][c], &all[k][c]))
                        .collect();
                    if seen.insert(m.clone()) {
                        all.push(m);
                        if all.len() > cap {
                            truncated = true;
                            break 'outer;
                        }
                    }
                }
            }
        }
        old = end;
    }
    all.sort();
    Ok(Closure {
        elements: all,
        truncated,
    })
}

/// `RAAGTK_BALL_CAP` if set, else `default`.
pub fn env_cap(default: usize) -> usize {
    std::env::var("RAAGTK_BALL_CAP")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(default)
}

/// Default cap on ball sizes; `RAAGTK_BALL_CAP` overrides it.
pub fn ball_cap() -> usize {
    env_cap(200_000)
}

/// All elements of word length exactly `0..=radius`, grouped by sphere.
pub fn spheres(g: &DefGraph, radius: usize, cap: usize) -> Result<Vec<Vec<NormalForm>>> {
    let mut out = vec![vec![NormalForm::identity()]];
    let mut total = 1;
    for r in 1..=radius {
        let mut next: FxHashSet<NormalForm> = FxHashSet::default();
        for w in &out[r - 1] {
            let last = last_letters(g, &w.0);
            for v in 0..g.len() {
                for l in [Letter::neg(v), Letter::pos(v)] {
                    if last >> l.inverse().code() & 1 == 1 {
                        continue;
                    }
                    let mut x = w.0.clone();
                    x.push(l);
                    next.insert(NormalForm(canonicalize(g, &x)));
                }
            }
            if total + next.len() > cap {
                return Err(Error::BallCapExceeded {
                    radius,
                    size: total + next.len(),
                    cap,
                });
            }
        }
        let mut sphere: Vec<NormalForm> = next.into_iter().collect();
        sphere.sort();
        total += sphere.len();
        out.push(sphere);
    }
    Ok(out)
}

/// The ball of the given radius about `1`, sorted by (length, letters).
pub fn ball(g: &DefGraph, radius: usize, cap: usize) -> Result<Vec<NormalForm>> {
    Ok(spheres(g, radius, cap)?.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::library::*;
    use proptest::prelude::*;

    fn nf(g: &DefGraph, s: &str) -> NormalForm {
        NormalForm::parse(g, s).unwrap()
    }

    fn show(g: &DefGraph, x: &NormalForm) -> String {
        x.format(g)
    }

    #[test]
    fn normalize_examples() {
        let e = complete(2);
        assert_eq!(show(&e, &nf(&e, "b a b^-1 a^-1")), "1");
        assert_eq!(show(&e, &nf(&e, "a a^-1")), "1");
        let p = path(3);
        assert_eq!(show(&p, &nf(&p, "c a")), "c a");
        assert_eq!(show(&p, &nf(&p, "b a")), "a b");
        assert_eq!(show(&p, &nf(&p, "c b a^-1 b^-1")), "c a^-1");
        assert_eq!(show(&p, &nf(&p, "a^3 b^-2")), "a a a b^-1 b^-1");
    }

    #[test]
    fn parse_errors() {
        let p = path(3);
        assert_eq!(
            Word::parse(&p, "a z"),
            Err(Error::UnknownVertex("z".into()))
        );
        assert!(matches!(
            Word::parse(&p, "a^x"),
            Err(Error::InvalidLetter(_))
        ));
        assert!(matches!(
            Word::parse(&p, "^2"),
            Err(Error::InvalidLetter(_))
        ));
        assert_eq!(Word::parse(&p, "1").unwrap(), Word::default());
        assert!(try_normalize(&p, &[Letter::pos(5)]).is_err());
    }

    #[test]
    fn multiply_and_invert() {
        let e = complete(2);
        let a = nf(&e, "a");
        let b = nf(&e, "b");
        assert_eq!(multiply(&e, &a, &b), multiply(&e, &b, &a));
        let x = nf(&e, "a b^-1 a");
        assert!(multiply(&e, &x, &invert(&e, &x)).is_identity());
        assert_eq!(power(&e, &x, -2), invert(&e, &power(&e, &x, 2)));
    }

    #[test]
    fn cyclic_reduce_examples() {
        let p = path(3);
        let d = cyclic_reduce(&p, &nf(&p, "a"));
        assert!(d.conjugator.is_identity());
        assert_eq!(show(&p, &d.core), "a");
        let d = cyclic_reduce(&p, &nf(&p, "c a c^-1"));
        assert_eq!(show(&p, &d.conjugator), "c");
        assert_eq!(show(&p, &d.core), "a");
        // b commutes with both neighbours, so b a c b^-1 is conjugate to a c
        let d = cyclic_reduce(&p, &nf(&p, "b a c b^-1"));
        assert_eq!(d.core.len(), 3 + 1 - 2);
    }

    #[test]
    fn hyperplane_examples() {
        let e = complete(2);
        let hs = geodesic_hyperplanes(&e, &nf(&e, "a b"));
        assert_eq!(hs.iter().map(|h| h.label).collect::<Vec<_>>(), vec![0, 1]);
        assert!(geodesic_hyperplanes(&e, &NormalForm::identity()).is_empty());
        // in Z^2 the edge a at 1 and the edge a at b are parallel
        assert_eq!(
            Hyperplane::crossed_by(&e, &[], Letter::pos(0)),
            Hyperplane::crossed_by(&e, nf(&e, "b").letters(), Letter::pos(0))
        );
        // the edge a^-1 at a is the edge a at 1
        assert_eq!(
            Hyperplane::crossed_by(&e, nf(&e, "a").letters(), Letter::neg(0)),
            Hyperplane::crossed_by(&e, &[], Letter::pos(0))
        );
    }

    #[test]
    fn median_examples() {
        let e = complete(2);
        let m = median(
            &e,
            &NormalForm::identity(),
            &nf(&e, "a b"),
            &nf(&e, "a b^-1"),
        );
        assert_eq!(show(&e, &m), "a");
        let x = nf(&e, "a a b");
        let y = nf(&e, "b^-1");
        assert_eq!(median(&e, &x, &x, &y), x);
    }

    #[test]
    fn closure_examples() {
        let e = complete(2);
        let one = |s: &str| vec![nf(&e, s)];
        let c = subalgebra_closure(&e, &[one("a b")], 10).unwrap();
        assert_eq!(c.elements.len(), 1);
        let chain = [one("1"), one("a"), one("a a")];
        assert_eq!(
            subalgebra_closure(&e, &chain, 10).unwrap().elements.len(),
            3
        );
        let corners = [one("1"), one("a a"), one("b b"), one("a a b b")];
        let c = subalgebra_closure(&e, &corners, 100).unwrap();
        // coordinatewise medians of the corners of a square are corners again
        assert_eq!(c.elements.len(), 4);
        assert!(!c.truncated);
        let bad = [one("a"), vec![nf(&e, "a"), nf(&e, "b")]];
        assert_eq!(
            subalgebra_closure(&e, &bad, 10),
            Err(Error::ArityMismatch {
                expected: 1,
                found: 2
            })
        );
    }

    #[test]
    fn closure_truncates() {
        let f = edgeless(2);
        let seeds: Vec<Vec<NormalForm>> = ["a b", "b a", "a^-1 b", "b^-1 a^-1", "a a b"]
            .iter()
            .map(|s| vec![nf(&f, s)])
            .collect();
        let c = subalgebra_closure(&f, &seeds, 6).unwrap();
        assert!(c.truncated || c.elements.len() <= 6);
    }

    #[test]
    fn ball_sizes() {
        // free group of rank 2: 1 + 4 + 12 + 36
        assert_eq!(ball(&edgeless(2), 3, 1000).unwrap().len(), 53);
        // Z^2: centred squares 2r^2 + 2r + 1
        assert_eq!(ball(&complete(2), 3, 1000).unwrap().len(), 25);
        assert!(matches!(
            ball(&edgeless(3), 6, 100),
            Err(Error::BallCapExceeded { .. })
        ));
    }

    #[test]
    fn geodesic_hyperplanes_are_distinct() {
        for n in 1..=4 {
            for g in all_up_to_isomorphism(n) {
                for x in ball(&g, 5, 100_000).unwrap() {
                    let hs = geodesic_hyperplanes(&g, &x);
                    let set: FxHashSet<_> = hs.iter().collect();
                    assert_eq!(set.len(), hs.len());
                }
            }
        }
    }

    fn graph_strategy() -> impl Strategy<Value = DefGraph> {
        (1usize..=5)
            .prop_flat_map(|n| {
                let pairs = n * (n - 1) / 2;
                (Just(n), proptest::bits::u64::between(0, pairs.max(1)))
            })
            .prop_map(|(n, mask)| {
                let names: Vec<String> = (0..n)
                    .map(|i| ((b'a' + i as u8) as char).to_string())
                    .collect();
                let pairs: Vec<(usize, usize)> = (0..n)
                    .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                    .collect();
                let edges: Vec<_> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                DefGraph::new(&names, &edges).unwrap()
            })
    }

    fn word_in(g: &DefGraph, max: usize) -> impl Strategy<Value = Vec<Letter>> {
        let n = g.len() as u8;
        proptest::collection::vec((0..2 * n).prop_map(Letter::from_code), 0..=max)
    }

    fn graph_and_words(
        k: usize,
        max: usize,
    ) -> impl Strategy<Value = (DefGraph, Vec<Vec<Letter>>)> {
        graph_strategy().prop_flat_map(move |g| {
            let words = proptest::collection::vec(word_in(&g, max), k);
            (Just(g), words)
        })
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent_and_length_bounded((g, ws) in graph_and_words(2, 12)) {
            let x = normalize(&g, &ws[0]);
            let y = normalize(&g, &ws[1]);
            prop_assert_eq!(normalize(&g, x.letters()), x.clone());
            prop_assert!(x.len() <= ws[0].len());
            prop_assert!(multiply(&g, &x, &y).len() <= x.len() + y.len());
            prop_assert_eq!(invert(&g, &x).len(), x.len());
            prop_assert!(multiply(&g, &x, &invert(&g, &x)).is_identity());
        }

        #[test]
        fn cyclic_decomposition_is_reduced((g, ws) in graph_and_words(1, 14)) {
            let x = normalize(&g, &ws[0]);
            let d = cyclic_reduce(&g, &x);
            prop_assert_eq!(conjugate(&g, &d.conjugator, &d.core), x.clone());
            prop_assert_eq!(2 * d.conjugator.len() + d.core.len(), x.len());
            prop_assert!(is_cyclically_reduced(&g, &d.core));
            // every cyclic permutation of a cyclically reduced word is at least as long
            for i in 0..d.core.len() {
                let mut rot = d.core.letters()[i..].to_vec();
                rot.extend_from_slice(&d.core.letters()[..i]);
                prop_assert_eq!(reduce(&g, &rot).len(), d.core.len());
            }
        }

        #[test]
        fn median_axioms((g, ws) in graph_and_words(4, 7)) {
            let [a, b, c, d]: [NormalForm; 4] =
                std::array::from_fn(|i| normalize(&g, &ws[i]));
            let m = median(&g, &a, &b, &c);
            prop_assert_eq!(median(&g, &a, &a, &b), a.clone());
            for (x, y, z) in [(&a, &c, &b), (&b, &a, &c), (&b, &c, &a), (&c, &a, &b), (&c, &b, &a)] {
                prop_assert_eq!(median(&g, x, y, z), m.clone());
            }
            // m(m(a,b,c),b,d) = m(a,b,m(c,b,d))
            let lhs = median(&g, &m, &b, &d);
            let rhs = median(&g, &a, &b, &median(&g, &c, &b, &d));
            prop_assert_eq!(lhs, rhs);
            // the median lies on a geodesic between any two of its arguments
            prop_assert_eq!(distance(&g, &a, &m) + distance(&g, &m, &b), distance(&g, &a, &b));
        }

        #[test]
        fn median_is_left_equivariant((g, ws) in graph_and_words(4, 7)) {
            let [k, x, y, z]: [NormalForm; 4] =
                std::array::from_fn(|i| normalize(&g, &ws[i]));
            let lhs = multiply(&g, &k, &median(&g, &x, &y, &z));
            let rhs = median(&g, &multiply(&g, &k, &x), &multiply(&g, &k, &y), &multiply(&g, &k, &z));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn hyperplanes_translate_equivariantly((g, ws) in graph_and_words(2, 8)) {
            let k = normalize(&g, &ws[0]);
            let x = normalize(&g, &ws[1]);
            // W(1|x) translated by k is W(k|kx)
            let mut lhs: Vec<Hyperplane> =
                geodesic_hyperplanes(&g, &x).iter().map(|h| h.translate(&g, &k)).collect();
            let kx = multiply(&g, &k, &x);
            let mut rhs = Vec::new();
            let path: Vec<Letter> = x.letters().to_vec();
            for i in 0..path.len() {
                let mut p = k.letters().to_vec();
                p.extend_from_slice(&path[..i]);
                rhs.push(Hyperplane::crossed_by(&g, &p, path[i]));
            }
            lhs.sort();
            rhs.sort();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(distance(&g, &k, &kx), x.len());
        }
    }
}
