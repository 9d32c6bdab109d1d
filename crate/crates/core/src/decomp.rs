//! Hyperplane pairs, decent geodesics, good decompositions and chain
//! decompositions of arcs in `T_v`, for the group acting on its own Salvetti
//! complex (a single orbit of vertices, `q = 1`).

use std::collections::BTreeMap;

use crate::element::gamma;
use crate::error::{Error, Result};
use crate::graph::{DefGraph, VertexSet};
use crate::subgroup::SubgroupForm;
use crate::tree::TreeArc;
use crate::word::{
    coset_representative, geodesic_hyperplanes, is_reduced, multiply, normalize, power, support,
    Hyperplane, Letter, NormalForm,
};

/// Strict trace order on the letters of a reduced word: `i ≺ k` iff `i < k`
/// and a chain of pairwise non-commuting letters leads from `i` to `k`.
pub fn trace_order(g: &DefGraph, w: &[Letter]) -> Vec<Vec<bool>> {
    let n = w.len();
    let mut before = vec![vec![false; n]; n];
    for k in 0..n {
        for i in (0..k).rev() {
            if before[i][k] {
                continue;
            }
            if !g.adjacent(w[i].vertex(), w[k].vertex()) {
                before[i][k] = true;
                for h in 0..i {
                    if before[h][i] {
                        before[h][k] = true;
                    }
                }
            }
        }
    }
    before
}

/// Two disjoint hyperplanes `u`, `w` together with a geodesic crossing exactly
/// `W(u, w)`: it starts at `start`, its first edge is dual to `u` and its
/// last edge to `w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperplanePair {
    pub u: Hyperplane,
    pub w: Hyperplane,
    pub start: NormalForm,
    pub word: Vec<Letter>,
}

impl HyperplanePair {
    /// The pair crossed at positions `i < k` of the reduced path `path`
    /// starting at `start`.
    pub fn from_path(
        g: &DefGraph,
        start: &NormalForm,
        path: &[Letter],
        i: usize,
        k: usize,
    ) -> Result<Self> {
        if !is_reduced(g, path) {
            return Err(Error::NotReduced(crate::word::format_letters(g, path)));
        }
        if i >= k || k >= path.len() {
            return Err(Error::InvalidPair(format!(
                "positions {i}, {k} in a path of length {}",
                path.len()
            )));
        }
        let order = trace_order(g, path);
        if !order[i][k] {
            return Err(Error::InvalidPair("the two hyperplanes cross".into()));
        }
        Ok(Self::from_interval(g, start, path, i, Some(k), &order))
    }

    /// The pair whose realizing geodesic is the whole of `word`, read from `1`.
    pub fn from_word(g: &DefGraph, word: &[Letter]) -> Result<Self> {
        if word.len() < 2 {
            return Err(Error::InvalidPair(
                "a pair needs at least two hyperplanes".into(),
            ));
        }
        let pair = Self::from_path(g, &NormalForm::identity(), word, 0, word.len() - 1)?;
        if pair.word.len() != word.len() {
            return Err(Error::InvalidPair(
                "word crosses hyperplanes outside W(u,w)".into(),
            ));
        }
        Ok(pair)
    }

    /// `k = None` gives the degenerate "pair" of a single hyperplane.
    pub(crate) fn from_interval(
        g: &DefGraph,
        start: &NormalForm,
        path: &[Letter],
        i: usize,
        k: Option<usize>,
        order: &[Vec<bool>],
    ) -> Self {
        let k_idx = k.unwrap_or(i);
        let after_i = |m: usize| m == i || order[i][m];
        let mut prefix = start.letters().to_vec();
        let mut word = Vec::new();
        for m in 0..path.len() {
            if !after_i(m) {
                prefix.push(path[m]);
            } else if m == k_idx || (m < k_idx && order[m][k_idx]) {
                word.push(path[m]);
            }
        }
        let start = normalize(g, &prefix);
        let hs = crate::word::hyperplanes_along(g, &word);
        let at = |h: &Hyperplane| h.translate(g, &start);
        HyperplanePair {
            u: at(&hs[0]),
            w: at(&hs[hs.len() - 1]),
            start,
            word,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.word.len() == 1
    }

    /// All hyperplanes in `W(u, w)`, in crossing order.
    pub fn hyperplanes(&self, g: &DefGraph) -> Vec<Hyperplane> {
        crate::word::hyperplanes_along(g, &self.word)
            .iter()
            .map(|h| h.translate(g, &self.start))
            .collect()
    }

    pub fn end(&self, g: &DefGraph) -> NormalForm {
        let mut w = self.start.letters().to_vec();
        w.extend_from_slice(&self.word);
        normalize(g, &w)
    }

    /// The subgroup stabilizing both hyperplanes, `s · A_{Δ^⊥} · s^-1`.
    pub fn stabilizer(&self, g: &DefGraph) -> SubgroupForm {
        let perp = g
            .perp(support(&self.word))
            .expect("letters are graph vertices");
        SubgroupForm::parabolic(coset_representative(g, self.start.letters(), perp), perp)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaInvariants {
    pub delta: VertexSet,
    pub size: usize,
    /// Number of hyperplanes with each label of Δ strictly between `u` and `w`.
    pub between: BTreeMap<usize, usize>,
}

pub fn delta_invariants(pair: &HyperplanePair) -> DeltaInvariants {
    let delta = support(&pair.word);
    let mut between: BTreeMap<usize, usize> = delta.iter().map(|v| (v, 0)).collect();
    if pair.word.len() >= 2 {
        for l in &pair.word[1..pair.word.len() - 1] {
            *between.get_mut(&l.vertex()).expect("label in Δ") += 1;
        }
    }
    DeltaInvariants {
        delta,
        size: delta.len(),
        between,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecencyReport {
    pub decent: bool,
    /// `(v, i, j)`: the subpath between vertices `i < j` has `v` in its Γ.
    pub witnesses: Vec<(usize, usize, usize)>,
    pub missing: Vec<usize>,
}

/// Decency for the single-orbit action: every label `v` of `α` lies in
/// `Γ(x^-1 y)` for two vertices `x`, `y` of `α`.
pub fn is_decent(g: &DefGraph, alpha: &[Letter]) -> Result<DecencyReport> {
    if !is_reduced(g, alpha) {
        return Err(Error::NotReduced(crate::word::format_letters(g, alpha)));
    }
    Ok(decency(g, alpha))
}

fn decency(g: &DefGraph, alpha: &[Letter]) -> DecencyReport {
    let n = alpha.len();
    let mut gammas = Vec::new();
    for len in 1..=n {
        for i in 0..=n - len {
            gammas.push((i, i + len, gamma(g, &normalize(g, &alpha[i..i + len]))));
        }
    }
    let mut witnesses = Vec::new();
    let mut missing = Vec::new();
    for v in support(alpha).iter() {
        match gammas.iter().find(|(_, _, s)| s.contains(v)) {
            Some(&(i, j, _)) => witnesses.push((v, i, j)),
            None => missing.push(v),
        }
    }
    DecencyReport {
        decent: missing.is_empty(),
        witnesses,
        missing,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PieceKind {
    Edge,
    Good,
    Decent,
}

impl PieceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PieceKind::Edge => "edge",
            PieceKind::Good => "good",
            PieceKind::Decent => "decent",
        }
    }
}

/// Subsegment `[start, end]` between vertices of a path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Piece {
    pub start: usize,
    pub end: usize,
    pub kind: PieceKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub pieces: Vec<Piece>,
    pub bound: u128,
}

impl Decomposition {
    pub fn within_bound(&self) -> bool {
        (self.pieces.len() as u128) <= self.bound
    }
}

/// `q^q · max(7, 2q)^(q^2 V)`, saturating.
pub fn good_decomposition_bound(q: u32, vertices: u32) -> u128 {
    let base = 7u128.max(2 * q as u128);
    let mut out = (q as u128).saturating_pow(q);
    for _ in 0..(q as u64 * q as u64 * vertices as u64).min(1 << 16) {
        out = out.saturating_mul(base);
        if out == u128::MAX {
            break;
        }
    }
    out
}

fn label_counts(w: &[Letter]) -> [u32; 64] {
    let mut counts = [0u32; 64];
    for l in w {
        counts[l.vertex()] += 1;
    }
    counts
}

/// Every vertex is in the unique orbit, so a segment is excellent iff it has
/// at least two edges and no label occurs on exactly one of them.
fn is_excellent(w: &[Letter]) -> bool {
    w.len() >= 2 && label_counts(w).iter().all(|&c| c != 1)
}

/// A union of excellent subsegments.
pub fn is_good(w: &[Letter]) -> bool {
    let n = w.len();
    if n < 2 {
        return false;
    }
    let mut covered = vec![false; n];
    for a in 0..n {
        for b in a + 2..=n {
            if is_excellent(&w[a..b]) {
                covered[a..b].iter_mut().for_each(|c| *c = true);
            }
        }
    }
    covered.into_iter().all(|c| c)
}

/// Splits a reduced path into single edges and good subsegments. A segment
/// that is not good has a label occurring exactly once (it is not excellent);
/// the least such label's edge is cut out and both sides are recursed on,
/// each with one label fewer.
pub fn decompose_good(g: &DefGraph, alpha: &[Letter]) -> Result<Decomposition> {
    if !is_reduced(g, alpha) {
        return Err(Error::NotReduced(crate::word::format_letters(g, alpha)));
    }
    let mut pieces = Vec::new();
    split_good(alpha, 0, alpha.len(), &mut pieces);
    Ok(Decomposition {
        pieces,
        bound: good_decomposition_bound(1, g.len() as u32),
    })
}

fn split_good(w: &[Letter], start: usize, end: usize, out: &mut Vec<Piece>) {
    match end - start {
        0 => {}
        1 => out.push(Piece {
            start,
            end,
            kind: PieceKind::Edge,
        }),
        _ if is_good(&w[start..end]) => out.push(Piece {
            start,
            end,
            kind: PieceKind::Good,
        }),
        _ => {
            let counts = label_counts(&w[start..end]);
            let once = (0..64)
                .find(|&v| counts[v] == 1)
                .expect("a non-excellent segment has a singleton label");
            let cut = start
                + w[start..end]
                    .iter()
                    .position(|l| l.vertex() == once)
                    .expect("present");
            split_good(w, start, cut, out);
            out.push(Piece {
                start: cut,
                end: cut + 1,
                kind: PieceKind::Edge,
            });
            split_good(w, cut + 1, end, out);
        }
    }
}

/// The constants of the chain decomposition for `q` orbits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainConstants {
    pub q: u32,
    pub n_q: u128,
    /// Bound on `d_v` between consecutive decent pairs, `2 N_q V`.
    pub gap: u128,
    /// Bound on the number of decent pairs, `N_q^V`.
    pub count: u128,
    /// Bound on μ-lengths and on the number of ν-pieces. A μ-piece may absorb
    /// decent pairs of length at most `2q` together with the gaps around them.
    pub l: u128,
}

pub fn chain_constants(q: u32, vertices: u32) -> ChainConstants {
    let n_q = good_decomposition_bound(q, vertices);
    let gap = n_q.saturating_mul(2).saturating_mul(vertices as u128);
    let count = n_q.saturating_pow(vertices);
    let l = count
        .saturating_add(1)
        .saturating_mul(gap.saturating_add(2 * q as u128));
    ChainConstants {
        q,
        n_q,
        gap,
        count,
        l,
    }
}

/// A decent pair of `v`-hyperplanes along the arc, as a range of `v`-edge
/// indices (inclusive).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainLink {
    pub first: usize,
    pub last: usize,
    pub pair: HyperplanePair,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainReport {
    pub label: usize,
    pub length: usize,
    pub constants: ChainConstants,
    /// Decent pairs produced by the recursion, before short ones are merged.
    pub links: Vec<ChainLink>,
    /// Indices into `links` of the ν-pieces (length > 2q).
    pub nu: Vec<usize>,
    pub mu_lengths: Vec<usize>,
    pub nu_lengths: Vec<usize>,
    pub checks: Vec<(&'static str, bool)>,
}

impl ChainReport {
    pub fn s(&self) -> usize {
        self.nu.len()
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

/// Decomposes an arc of `T_v` as `μ_0 ν_1 μ_1 … ν_s μ_s` with every `ν_i`
/// bounded by a decent pair of `v`-hyperplanes.
pub fn decompose_chain(g: &DefGraph, arc: &TreeArc) -> Result<ChainReport> {
    let v = arc.label;
    let (start, path) = arc.path(g);
    let v_positions: Vec<usize> = (0..path.len())
        .filter(|&i| path.letters()[i].vertex() == v)
        .collect();
    let m = v_positions.len();
    if m == 0 {
        return Err(Error::DegenerateArc("endpoints coincide".into()));
    }
    let constants = chain_constants(1, g.len() as u32);
    let mut links = Vec::new();
    if m >= 2 {
        let order = trace_order(g, path.letters());
        let pair = HyperplanePair::from_interval(
            g,
            &start,
            path.letters(),
            v_positions[0],
            Some(v_positions[m - 1]),
            &order,
        );
        chain_links(g, v, pair, 0, &mut links);
    }
    let q = constants.q as usize;
    let nu: Vec<usize> = (0..links.len())
        .filter(|&i| links[i].last - links[i].first + 1 > 2 * q)
        .collect();
    let nu_lengths: Vec<usize> = nu
        .iter()
        .map(|&i| links[i].last - links[i].first + 1)
        .collect();
    let mut mu_lengths = Vec::new();
    let mut cursor = 0;
    for &i in &nu {
        mu_lengths.push(links[i].first - cursor);
        cursor = links[i].last + 1;
    }
    mu_lengths.push(m - cursor);

    let mut gaps_ok = true;
    let mut prev_end: Option<usize> = None;
    for link in &links {
        let gap = match prev_end {
            None => link.first,
            Some(e) => link.first - e - 1,
        };
        gaps_ok &= (gap as u128) <= constants.gap;
        prev_end = Some(link.last);
    }
    if let Some(e) = prev_end {
        gaps_ok &= ((m - 1 - e) as u128) <= constants.gap;
    } else {
        gaps_ok &= (m as u128) <= constants.gap;
    }
    let decent_ok = links.iter().all(|l| decency(g, &l.pair.word).decent);
    let checks = vec![
        ("d_v gaps <= 2 N_q V", gaps_ok),
        ("pairs <= N_q^V", (links.len() as u128) <= constants.count),
        ("nu pieces bounded by decent pairs", decent_ok),
        ("nu lengths > 2q", nu_lengths.iter().all(|&l| l > 2 * q)),
        (
            "mu lengths <= L",
            mu_lengths.iter().all(|&l| (l as u128) <= constants.l),
        ),
        ("s <= L", (nu.len() as u128) <= constants.l),
        (
            "pieces cover the arc",
            mu_lengths.iter().sum::<usize>() + nu_lengths.iter().sum::<usize>() == m,
        ),
    ];
    Ok(ChainReport {
        label: v,
        length: m,
        constants,
        links,
        nu,
        mu_lengths,
        nu_lengths,
        checks,
    })
}

/// `offset` is the index, among the arc's `v`-edges, of the pair's first edge.
fn chain_links(
    g: &DefGraph,
    v: usize,
    pair: HyperplanePair,
    offset: usize,
    out: &mut Vec<ChainLink>,
) {
    let count = pair.word.iter().filter(|l| l.vertex() == v).count();
    if decency(g, &pair.word).decent {
        out.push(ChainLink {
            first: offset,
            last: offset + count - 1,
            pair,
        });
        return;
    }
    let mut pieces = Vec::new();
    split_good(&pair.word, 0, pair.word.len(), &mut pieces);
    let order = trace_order(g, &pair.word);
    for piece in pieces.into_iter().filter(|p| p.kind != PieceKind::Edge) {
        let vs: Vec<usize> = (piece.start..piece.end)
            .filter(|&i| pair.word[i].vertex() == v)
            .collect();
        if vs.len() < 2 {
            continue;
        }
        let before = pair.word[..vs[0]]
            .iter()
            .filter(|l| l.vertex() == v)
            .count();
        let sub = HyperplanePair::from_interval(
            g,
            &pair.start,
            &pair.word,
            vs[0],
            Some(vs[vs.len() - 1]),
            &order,
        );
        chain_links(g, v, sub, offset + before, out);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairClass {
    /// `Z Z(G_u ∩ G_w) = G_u ∩ G_w`.
    Centralizer { stabilizer: SubgroupForm },
    /// `Z Z(G_u ∩ G_w) = Z(g)` with `g` label-irreducible.
    Cyclic {
        stabilizer: SubgroupForm,
        g: NormalForm,
        skewered: usize,
        total: usize,
    },
}

/// Double-centralizer classification of a decent pair via the perp calculus:
/// the stabilizer is `s A_{Δ^⊥} s^-1`, and `Z Z(A_S) = A_{(S_⊥)_⊥}`.
pub fn classify_decent_pair(g: &DefGraph, pair: &HyperplanePair) -> Result<PairClass> {
    let report = decency(g, &pair.word);
    if !report.decent {
        let missing: Vec<&str> = report.missing.iter().map(|&v| g.name(v)).collect();
        return Err(Error::NotDecent(format!(
            "no witness for {}",
            missing.join(",")
        )));
    }
    let delta = support(&pair.word);
    let perp = g.perp(delta)?;
    let sigma = g.perp_closed(g.perp_closed(perp)?)?;
    let stabilizer = pair.stabilizer(g);
    if sigma == perp {
        return Ok(PairClass::Centralizer { stabilizer });
    }
    let extra = sigma.difference(perp);
    match (extra.first(), extra.len(), delta.len()) {
        (Some(d), 1, 1) if delta.contains(d) => {
            let gen = NormalForm::generator(d);
            let x = crate::word::conjugate(g, &pair.start, &gen);
            let hs = pair.hyperplanes(g);
            let skewered = hs.iter().filter(|h| skewers(g, &x, &pair.start, h)).count();
            Ok(PairClass::Cyclic {
                stabilizer,
                g: x,
                skewered,
                total: hs.len(),
            })
        }
        _ => Err(Error::Inconsistent(format!(
            "double perp closure {} of Δ^⊥ = {} fits neither case",
            g.format_set(sigma),
            g.format_set(perp)
        ))),
    }
}

/// Whether `h` separates `x^-N p` from `x^N p` for large `N`, with `p` on an
/// axis of `x`.
fn skewers(g: &DefGraph, x: &NormalForm, p: &NormalForm, h: &Hyperplane) -> bool {
    let n = (h.base.len() + p.len() + 4) as i64;
    let a = multiply(g, &power(g, x, -n), p);
    let b = multiply(g, &power(g, x, n), p);
    let ab = multiply(g, &crate::word::invert(g, &a), &b);
    geodesic_hyperplanes(g, &ab)
        .iter()
        .any(|k| k.translate(g, &a) == *h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::library::*;
    use crate::tree::TreeVertex;
    use crate::word::Word;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn word(g: &DefGraph, s: &str) -> Vec<Letter> {
        Word::parse(g, s).unwrap().0
    }

    #[test]
    fn trace_order_examples() {
        let p = path(3);
        let w = word(&p, "a b c a");
        let o = trace_order(&p, &w);
        assert!(!o[0][1]);
        assert!(o[0][2] && o[2][3] && o[0][3]);
        assert!(!o[1][3]);
    }

    #[test]
    fn delta_examples() {
        let f = edgeless(1);
        let pair = HyperplanePair::from_word(&f, &word(&f, "a a")).unwrap();
        let d = delta_invariants(&pair);
        assert_eq!(d.size, 1);
        assert_eq!(d.between[&0], 0);
        let p = path(3);
        let pair = HyperplanePair::from_word(&p, &word(&p, "a c a")).unwrap();
        let d = delta_invariants(&pair);
        assert_eq!(d.delta, p.parse_set("a,c").unwrap());
        assert_eq!(d.between[&2], 1);
        assert_eq!(d.between[&0], 0);
        // in the path, b commutes with a so the two b-hyperplanes of "b a b" are
        // not separated by the a-hyperplane
        let pair = HyperplanePair::from_path(&p, &NormalForm::identity(), &word(&p, "b a b"), 0, 2)
            .unwrap();
        assert_eq!(pair.word, word(&p, "b b"));
        assert_eq!(pair.start, NormalForm::parse(&p, "a").unwrap());
        assert!(matches!(
            HyperplanePair::from_path(&p, &NormalForm::identity(), &word(&p, "a b"), 0, 1),
            Err(Error::InvalidPair(_))
        ));
    }

    #[test]
    fn delta_is_join_irreducible_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 2..=5 {
            for g in all_up_to_isomorphism(n) {
                for _ in 0..20 {
                    let len = rng.gen_range(2..=10);
                    let w: Vec<Letter> = (0..len)
                        .map(|_| Letter::from_code(rng.gen_range(0..2 * n as u8)))
                        .collect();
                    let x = normalize(&g, &w);
                    if x.len() < 2 {
                        continue;
                    }
                    let o = trace_order(&g, x.letters());
                    for i in 0..x.len() {
                        for k in i + 1..x.len() {
                            if o[i][k] {
                                let pair = HyperplanePair::from_path(
                                    &g,
                                    &NormalForm::identity(),
                                    x.letters(),
                                    i,
                                    k,
                                )
                                .unwrap();
                                let d = delta_invariants(&pair);
                                assert!(g.is_join_irreducible(d.delta));
                                assert_ne!(pair.u, pair.w);
                                // W(u, w) is exactly what the realizing word crosses
                                let hs = pair.hyperplanes(&g);
                                assert_eq!(hs[0], pair.u);
                                assert_eq!(hs[hs.len() - 1], pair.w);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn decency_examples() {
        let f = edgeless(1);
        assert!(is_decent(&f, &word(&f, "a a")).unwrap().decent);
        let p = path(3);
        assert!(is_decent(&p, &word(&p, "b")).unwrap().decent);
        // for the group acting on itself every single edge is a witness
        let r = is_decent(&p, &word(&p, "a c a^-1")).unwrap();
        assert!(r.decent);
        assert_eq!(r.witnesses, vec![(0, 0, 1), (2, 1, 2)]);
        assert!(matches!(
            is_decent(&p, &word(&p, "a b a^-1")),
            Err(Error::NotReduced(_))
        ));
        let f2 = edgeless(2);
        let r = is_decent(&f2, &word(&f2, "a b a^-1")).unwrap();
        assert!(r.decent);
    }

    #[test]
    fn good_decomposition_examples() {
        let f = edgeless(1);
        let d = decompose_good(&f, &word(&f, "a a a")).unwrap();
        assert_eq!(
            d.pieces,
            vec![Piece {
                start: 0,
                end: 3,
                kind: PieceKind::Good
            }]
        );
        let d = decompose_good(&f, &word(&f, "a")).unwrap();
        assert_eq!(
            d.pieces,
            vec![Piece {
                start: 0,
                end: 1,
                kind: PieceKind::Edge
            }]
        );
        assert_eq!(d.bound, 7);
        let f2 = edgeless(2);
        let d = decompose_good(&f2, &word(&f2, "a a b a a")).unwrap();
        assert_eq!(d.pieces.len(), 3);
        assert_eq!(
            d.pieces[1],
            Piece {
                start: 2,
                end: 3,
                kind: PieceKind::Edge
            }
        );
        assert!(decompose_good(&f2, &word(&f2, "a a^-1")).is_err());
    }

    #[test]
    fn good_pieces_are_decent_and_counted() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=4 {
            for g in all_up_to_isomorphism(n) {
                for _ in 0..30 {
                    let len = rng.gen_range(0..=12);
                    let w: Vec<Letter> = (0..len)
                        .map(|_| Letter::from_code(rng.gen_range(0..2 * n as u8)))
                        .collect();
                    let x = crate::word::reduce(&g, &w);
                    let d = decompose_good(&g, &x).unwrap();
                    assert!(d.within_bound());
                    let mut cursor = 0;
                    for p in &d.pieces {
                        assert_eq!(p.start, cursor);
                        cursor = p.end;
                        if p.kind == PieceKind::Good {
                            assert!(is_decent(&g, &x[p.start..p.end]).unwrap().decent);
                            // every label of a good piece occurs at least twice
                            let c = label_counts(&x[p.start..p.end]);
                            assert!(c.iter().all(|&k| k != 1));
                        }
                    }
                    assert_eq!(cursor, x.len());
                }
            }
        }
    }

    #[test]
    fn constants() {
        assert_eq!(good_decomposition_bound(1, 3), 343);
        assert_eq!(good_decomposition_bound(2, 1), 4 * 7u128.pow(4));
        let c = chain_constants(1, 2);
        assert_eq!(c.n_q, 49);
        assert_eq!(c.gap, 196);
        assert_eq!(c.count, 49 * 49);
        assert_eq!(good_decomposition_bound(3, 64), u128::MAX);
    }

    #[test]
    fn chain_examples() {
        let f = edgeless(1);
        let arc = TreeArc::new(
            &f,
            0,
            &NormalForm::identity(),
            &NormalForm::parse(&f, "a a a a").unwrap(),
        )
        .unwrap();
        let r = decompose_chain(&f, &arc).unwrap();
        assert_eq!(r.s(), 1);
        assert_eq!(r.mu_lengths, vec![0, 0]);
        assert!(r.all_checks_pass());
        let p = path(3);
        let arc = TreeArc::new(
            &p,
            1,
            &NormalForm::identity(),
            &NormalForm::parse(&p, "b").unwrap(),
        )
        .unwrap();
        let r = decompose_chain(&p, &arc).unwrap();
        assert_eq!(r.s(), 0);
        assert_eq!(r.mu_lengths, vec![1]);
        let e = TreeVertex::new(&p, 1, &NormalForm::identity()).unwrap();
        assert!(TreeArc::from_vertices(e.clone(), e).is_err());
    }

    #[test]
    fn chain_on_an_arc_with_commuting_letters() {
        let p = path(3);
        let x = NormalForm::parse(&p, "b a b b c b").unwrap();
        let arc = TreeArc::new(&p, 1, &NormalForm::identity(), &x).unwrap();
        let r = decompose_chain(&p, &arc).unwrap();
        assert!(r.all_checks_pass(), "{:?}", r.checks);
        assert_eq!(r.length, 4);
    }

    #[test]
    fn classify_examples() {
        let e = complete(2);
        let pair = HyperplanePair::from_word(&e, &word(&e, "a a")).unwrap();
        match classify_decent_pair(&e, &pair).unwrap() {
            PairClass::Cyclic {
                g: x,
                skewered,
                total,
                ..
            } => {
                assert_eq!(x, NormalForm::parse(&e, "a").unwrap());
                assert_eq!((skewered, total), (2, 2));
            }
            other => panic!("{other:?}"),
        }
        // the free group has trivial centre, so the trivial stabilizer is its own
        // double centralizer
        let f = edgeless(2);
        let pair = HyperplanePair::from_word(&f, &word(&f, "a a")).unwrap();
        assert!(matches!(
            classify_decent_pair(&f, &pair).unwrap(),
            PairClass::Centralizer { .. }
        ));
        let p = path(3);
        let pair = HyperplanePair::from_word(&p, &word(&p, "a c a c")).unwrap();
        assert!(matches!(
            classify_decent_pair(&p, &pair).unwrap(),
            PairClass::Centralizer { .. }
        ));
        let pair = HyperplanePair::from_word(&f, &word(&f, "a b")).unwrap();
        assert!(matches!(
            classify_decent_pair(&f, &pair).unwrap(),
            PairClass::Centralizer { .. }
        ));
    }
}
