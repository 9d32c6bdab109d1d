//! The acceptance criteria. Each check recomputes library answers with the
//! oracles in [`crate::oracle`] and reports a one-line summary.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::{FxHashMap, FxHashSet};

use raagtk_core::cmp::{cmp_defect, DefectOptions};
use raagtk_core::decomp::{
    classify_decent_pair, decompose_chain, decompose_good, is_decent, trace_order, HyperplanePair,
    PairClass, PieceKind,
};
use raagtk_core::dls::{
    build_partial_conjugation, build_transvection, outer_order_certificate, parse_dls,
    verify_automorphism, DlsAutomorphism,
};
use raagtk_core::element::{centralizer, gamma, membership_centralizer};
use raagtk_core::graph::library::{all_labelled, all_up_to_isomorphism, complete, path};
use raagtk_core::graph::{DefGraph, VertexSet};
use raagtk_core::tree::{almost_stabilizer, classify_almost_stabilizer, AlmostSide, TreeArc};
use raagtk_core::word::{
    ball, format_letters, invert, median, multiply, normalize, reduce, Letter, NormalForm,
};

use crate::oracle::{self, ShuffleOracle, WallSets};

type Check = fn(u64) -> Result<String, String>;

pub const CRITERIA: [(&str, Check); 11] = [
    ("normal forms", normal_forms),
    ("medians", medians),
    ("centralizers", centralizers),
    ("good decomposition bound", good_decomposition),
    ("chain decomposition", chain_decomposition),
    ("cmp counterexample", cmp_counterexample),
    ("cmp plateau", cmp_plateau),
    ("non-inner certificates", certificates),
    ("almost-stabilizer dichotomy", almost_stabilizers),
    ("automorphism soundness", automorphisms),
    ("double centralizers", double_centralizers),
];

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self, timed: bool) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let time = if timed {
            format!(" [{:.1}s]", self.seconds)
        } else {
            String::new()
        };
        format!(
            "criterion {:>2} {:<28} {status}{time}  {}",
            self.id, self.name, self.detail
        )
    }
}

pub fn run(id: usize, seed: u64) -> Outcome {
    let (name, check) = CRITERIA[id - 1];
    let start = Instant::now();
    let result = check(seed);
    let seconds = start.elapsed().as_secs_f64();
    let (passed, detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Outcome {
        id,
        name,
        passed,
        detail,
        seconds,
    }
}

pub fn run_all(seed: u64) -> Vec<Outcome> {
    (1..=CRITERIA.len()).map(|id| run(id, seed)).collect()
}

fn rng_for(seed: u64, criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ criterion.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn random_graph(rng: &mut ChaCha8Rng, min: usize, max: usize) -> DefGraph {
    let n = rng.gen_range(min..=max);
    all_up_to_isomorphism(n)
        .choose(rng)
        .expect("nonempty")
        .clone()
}

fn random_letters(rng: &mut ChaCha8Rng, vertices: &[usize], len: usize) -> Vec<Letter> {
    (0..len)
        .map(|_| Letter::new(vertices[rng.gen_range(0..vertices.len())], rng.gen()))
        .collect()
}

fn random_element(rng: &mut ChaCha8Rng, g: &DefGraph, max: usize) -> NormalForm {
    let vs: Vec<usize> = (0..g.len()).collect();
    let len = rng.gen_range(0..=max);
    normalize(g, &random_letters(rng, &vs, len))
}

fn random_in(rng: &mut ChaCha8Rng, g: &DefGraph, allowed: VertexSet, max: usize) -> NormalForm {
    let vs: Vec<usize> = allowed.iter().collect();
    if vs.is_empty() {
        return NormalForm::identity();
    }
    let len = rng.gen_range(0..=max);
    normalize(g, &random_letters(rng, &vs, len))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: raagtk_core::Error) -> String {
    format!("unexpected error: {e}")
}

/// Every word of length at most 6 over every labelled graph on at most 4
/// vertices.
fn normal_forms(_seed: u64) -> Result<String, String> {
    let (mut graphs, mut words) = (0, 0u64);
    for n in 1..=4 {
        for g in all_labelled(n) {
            graphs += 1;
            let mut oracle = ShuffleOracle::new(&g);
            for len in 0..=6 {
                for w in oracle::all_words(&g, len) {
                    words += 1;
                    let expected = oracle.least(&w);
                    let got = normalize(&g, &w);
                    ensure(got.letters() == expected.as_slice(), || {
                        format!(
                            "{}: normalize gives {}, oracle {}",
                            format_letters(&g, &w),
                            got.format(&g),
                            format_letters(&g, &expected)
                        )
                    })?;
                }
            }
        }
    }
    Ok(format!("{words} words over {graphs} graphs"))
}

/// Every unordered triple of the radius-3 ball over every graph on at most 4
/// vertices: the median is the element whose hyperplanes are the majority.
fn medians(_seed: u64) -> Result<String, String> {
    let mut triples = 0u64;
    for n in 1..=4 {
        for g in all_up_to_isomorphism(n) {
            let mut walls = WallSets::new();
            let big = ball(&g, 4, usize::MAX).map_err(err)?;
            let by_walls: FxHashMap<Vec<u32>, usize> = big
                .iter()
                .enumerate()
                .map(|(i, x)| (walls.of(&g, x), i))
                .collect();
            let small = ball(&g, 3, usize::MAX).map_err(err)?;
            let ws: Vec<Vec<u32>> = small.iter().map(|x| walls.of(&g, x)).collect();
            for i in 0..small.len() {
                for j in i..small.len() {
                    for k in j..small.len() {
                        triples += 1;
                        let m = oracle::majority(&ws[i], &ws[j], &ws[k]);
                        let Some(&idx) = by_walls.get(&m) else {
                            return Err(format!(
                                "majority set of a triple has no vertex in the radius-4 ball"
                            ));
                        };
                        let got = median(&g, &small[i], &small[j], &small[k]);
                        ensure(got == big[idx], || {
                            format!(
                                "median({}, {}, {}) = {}, oracle {}",
                                small[i].format(&g),
                                small[j].format(&g),
                                small[k].format(&g),
                                got.format(&g),
                                big[idx].format(&g)
                            )
                        })?;
                    }
                }
            }
        }
    }
    Ok(format!("{triples} triples"))
}

fn centralizers(seed: u64) -> Result<String, String> {
    let mut rng = rng_for(seed, 3);
    let mut checked = 0u64;
    for _ in 0..50 {
        let g = random_graph(&mut rng, 1, 4);
        let x = loop {
            let x = random_element(&mut rng, &g, 6);
            if !x.is_identity() {
                break x;
            }
        };
        let cf = centralizer(&g, &x).map_err(err)?;
        for k in ball(&g, 4, usize::MAX).map_err(err)? {
            checked += 1;
            let got = membership_centralizer(&g, &cf, &k).map_err(err)?;
            ensure(got == oracle::commutes(&g, &x, &k), || {
                format!(
                    "centralizer of {} on {}: membership {got}",
                    x.format(&g),
                    k.format(&g)
                )
            })?;
        }
    }
    Ok(format!("50 elements, {checked} memberships"))
}

/// Decency checked by brute force: every label occurs in Γ of some subpath.
fn decent_by_search(g: &DefGraph, alpha: &[Letter]) -> bool {
    let labels: FxHashSet<usize> = alpha.iter().map(|l| l.vertex()).collect();
    labels.into_iter().all(|v| {
        (0..alpha.len()).any(|i| {
            (i + 1..=alpha.len()).any(|j| oracle::in_gamma(g, v, &normalize(g, &alpha[i..j])))
        })
    })
}

fn good_decomposition(seed: u64) -> Result<String, String> {
    let mut rng = rng_for(seed, 4);
    let mut pieces = 0;
    for _ in 0..500 {
        let g = random_graph(&mut rng, 1, 4);
        let vs: Vec<usize> = (0..g.len()).collect();
        let len = rng.gen_range(0..=12);
        let alpha = reduce(&g, &random_letters(&mut rng, &vs, len));
        let d = decompose_good(&g, &alpha).map_err(err)?;
        let bound = 7u128.pow(g.len() as u32);
        ensure(d.pieces.len() as u128 <= bound, || {
            format!(
                "{} pieces for {} (bound {bound})",
                d.pieces.len(),
                format_letters(&g, &alpha)
            )
        })?;
        let mut cursor = 0;
        for p in &d.pieces {
            ensure(p.start == cursor && p.end > p.start, || {
                "pieces do not tile the geodesic".into()
            })?;
            cursor = p.end;
            let seg = &alpha[p.start..p.end];
            match p.kind {
                PieceKind::Edge => ensure(seg.len() == 1, || "edge piece is not one edge".into())?,
                _ => {
                    let lib = is_decent(&g, seg).map_err(err)?.decent;
                    ensure(lib && decent_by_search(&g, seg), || {
                        format!("piece {} is not decent", format_letters(&g, seg))
                    })?;
                }
            }
        }
        ensure(cursor == alpha.len(), || {
            "pieces do not cover the geodesic".into()
        })?;
        pieces += d.pieces.len();
    }
    Ok(format!("500 geodesics, {pieces} pieces"))
}

fn chain_decomposition(seed: u64) -> Result<String, String> {
    let mut rng = rng_for(seed, 5);
    let g = path(3);
    let vs: Vec<usize> = (0..3).collect();
    let v_count = 3u32;
    let n_q = 7u128.pow(v_count);
    let gap = 2 * n_q * v_count as u128;
    let count = n_q.pow(v_count);
    let l = (count + 1) * (gap + 2);
    let (mut arcs, mut total_nu) = (0, 0);
    while arcs < 200 {
        let v = rng.gen_range(0..3);
        let x = random_element(&mut rng, &g, 3);
        let len = rng.gen_range(1..=12);
        let y = multiply(&g, &x, &normalize(&g, &random_letters(&mut rng, &vs, len)));
        let Ok(arc) = TreeArc::new(&g, v, &x, &y) else {
            continue;
        };
        arcs += 1;
        let m = multiply(&g, &invert(&g, &x), &y).count_vertex(v);
        let r = decompose_chain(&g, &arc).map_err(err)?;
        ensure(r.all_checks_pass(), || {
            format!("library checks failed: {:?}", r.checks)
        })?;
        ensure(r.length == m, || {
            "arc length disagrees with the v-letter count".into()
        })?;
        ensure(r.nu_lengths.iter().all(|&k| k > 2), || {
            "a ν-piece has length ≤ 2q".into()
        })?;
        ensure(r.mu_lengths.iter().all(|&k| (k as u128) <= l), || {
            "a μ-piece exceeds L".into()
        })?;
        ensure((r.s() as u128) <= l, || "s exceeds L".into())?;
        ensure(r.mu_lengths.len() == r.s() + 1, || {
            "pieces do not alternate".into()
        })?;
        ensure(
            r.mu_lengths.iter().sum::<usize>() + r.nu_lengths.iter().sum::<usize>() == m,
            || "pieces do not cover the arc".into(),
        )?;
        ensure((r.links.len() as u128) <= count, || {
            "too many decent pairs".into()
        })?;
        for &i in &r.nu {
            let link = &r.links[i];
            ensure(decent_by_search(&g, &link.pair.word), || {
                "a ν-piece is not bounded by a decent pair".into()
            })?;
            let first = link.pair.word.first().map(|l| l.vertex());
            let last = link.pair.word.last().map(|l| l.vertex());
            ensure(first == Some(v) && last == Some(v), || {
                "ν-piece ends are not v-edges".into()
            })?;
        }
        total_nu += r.s();
    }
    Ok(format!("200 arcs, {total_nu} ν-pieces, L = {l}"))
}

fn exact(cap: usize) -> DefectOptions {
    DefectOptions {
        cap,
        sample: None,
        seed: 0,
    }
}

fn cmp_counterexample(_seed: u64) -> Result<String, String> {
    let g = complete(2);
    let phi = parse_dls(&g, "twist v=b z=a").map_err(err)?;
    let mut seq = Vec::new();
    for r in 1..=5 {
        let lib = cmp_defect(&g, &phi.map, r, exact(100_000))
            .map_err(err)?
            .defect;
        let b = ball(&g, r, usize::MAX).map_err(err)?;
        let brute = oracle::defect_by_medians(&g, &|x| phi.apply(&g, x), &b);
        ensure(lib == brute && lib == r, || {
            format!("radius {r}: library {lib}, oracle {brute}")
        })?;
        seq.push(lib.to_string());
    }
    Ok(format!("defects {}", seq.join(",")))
}

fn cmp_plateau(_seed: u64) -> Result<String, String> {
    let free = DefGraph::from_edges(&["a", "c"], &[]).map_err(err)?;
    let p = path(3);
    let cases = [(&free, "fold v=a z=c"), (&p, "pc A=a,b B=b,c C=b z=a")];
    let mut out = Vec::new();
    for (g, literal) in cases {
        let phi = parse_dls(g, literal).map_err(err)?;
        let mut seq = Vec::new();
        for r in 1..=6 {
            let lib = cmp_defect(g, &phi.map, r, exact(100_000))
                .map_err(err)?
                .defect;
            if r <= 3 {
                let b = ball(g, r, usize::MAX).map_err(err)?;
                let brute = oracle::defect_by_medians(g, &|x| phi.apply(g, x), &b);
                ensure(lib == brute, || {
                    format!("{literal} radius {r}: library {lib}, oracle {brute}")
                })?;
            }
            seq.push(lib);
        }
        ensure(seq.iter().all(|&d| d == seq[0]), || {
            format!("{literal}: defects {seq:?} are not constant")
        })?;
        out.push(format!("{literal}: {}", seq[0]));
    }
    Ok(out.join("; "))
}

fn substitute(g: &DefGraph, phi: &DlsAutomorphism, x: &NormalForm) -> NormalForm {
    let mut w = Vec::new();
    for l in x.letters() {
        let img = &phi.map.images[l.vertex()];
        let img = if l.is_positive() {
            img.clone()
        } else {
            invert(g, img)
        };
        w.extend_from_slice(img.letters());
    }
    normalize(g, &w)
}

fn certificates(_seed: u64) -> Result<String, String> {
    let z2 = complete(2);
    let free = DefGraph::from_edges(&["a", "c"], &[]).map_err(err)?;
    let cases = [(&z2, "twist v=b z=a", "b"), (&free, "fold v=a z=c", "a")];
    let mut out = Vec::new();
    for (g, literal, probe) in cases {
        let phi = parse_dls(g, literal).map_err(err)?;
        let probe = NormalForm::parse(g, probe).map_err(err)?;
        let rep =
            outer_order_certificate(g, &phi.map, std::slice::from_ref(&probe), 8).map_err(err)?;
        ensure(rep.certified(), || format!("{literal}: no certificate"))?;
        let mut x = probe.clone();
        let mut brute = Vec::new();
        for n in 0..=8 {
            if n > 0 {
                x = substitute(g, &phi, &x);
            }
            let conj = ball(g, x.len().div_ceil(2), usize::MAX).map_err(err)?;
            brute.push(oracle::conjugacy_length(g, &x, &conj));
        }
        ensure(brute == rep.lengths[0], || {
            format!("{literal}: lengths {:?}, oracle {brute:?}", rep.lengths[0])
        })?;
        ensure(brute.windows(2).all(|w| w[0] < w[1]), || {
            format!("{literal}: {brute:?} not increasing")
        })?;
        out.push(format!("{literal}: {brute:?}"));
    }
    Ok(out.join("; "))
}

/// The vertex of `T_v` reached after `t` of the `v`-letters of `y`, from `x`.
fn arc_point(g: &DefGraph, v: usize, x: &NormalForm, y: &NormalForm, t: usize) -> NormalForm {
    let mut w = x.letters().to_vec();
    let mut seen = 0;
    for &l in y.letters() {
        if seen == t {
            break;
        }
        w.push(l);
        if l.vertex() == v {
            seen += 1;
        }
    }
    normalize(g, &w)
}

fn almost_stabilizers(seed: u64) -> Result<String, String> {
    let mut rng = rng_for(seed, 9);
    let (mut samples, mut elements, mut case2) = (0, 0, 0);
    while samples < 100 {
        let g = random_graph(&mut rng, 1, 4);
        let r = g.clique_number();
        let v = rng.gen_range(0..g.len());
        let delta = rng.gen_range(0..=2usize);
        let m = (delta * (4 * r + 2)).max(1) + rng.gen_range(0..=2);
        let others: Vec<usize> = (0..g.len()).filter(|&u| u != v).collect();
        let sign = rng.gen();
        let mut y = Vec::new();
        if rng.gen() && !others.is_empty() {
            let k = rng.gen_range(0..=2);
            let unit = random_letters(&mut rng, &others, k);
            for _ in 0..m {
                y.push(Letter::new(v, sign));
                y.extend_from_slice(&unit);
            }
        } else {
            for _ in 0..m {
                y.push(Letter::new(v, sign));
                if !others.is_empty() {
                    let k = rng.gen_range(0..=2);
                    y.extend(random_letters(&mut rng, &others, k));
                }
            }
        }
        let y = normalize(&g, &y);
        let x = random_element(&mut rng, &g, 2);
        let end = multiply(&g, &x, &y);
        let arc = TreeArc::new(&g, v, &x, &end).map_err(err)?;
        ensure(arc.len(&g) == m, || {
            "arc length differs from the number of v-letters".into()
        })?;
        samples += 1;

        let b = ball(&g, 4, usize::MAX).map_err(err)?;
        let moved = |p: &NormalForm, k: &NormalForm| {
            multiply(&g, &multiply(&g, &invert(&g, p), k), p).count_vertex(v)
        };
        let d: Vec<NormalForm> = b
            .iter()
            .filter(|k| moved(&x, k).max(moved(&end, k)) <= delta)
            .cloned()
            .collect();
        let lib = almost_stabilizer(&g, &arc, delta, 4).map_err(err)?;
        ensure(lib == d, || {
            format!("D(β, {delta}) differs from the displacement scan")
        })?;
        let rep = classify_almost_stabilizer(&g, &arc, delta, &d).map_err(err)?;
        ensure(rep.holds(), || {
            format!("library violations: {:?}", rep.violations)
        })?;

        let p1 = arc_point(&g, v, &x, &y, delta / 2);
        let q1 = arc_point(&g, v, &x, &y, m - delta / 2);
        let fixes = |k: &NormalForm| {
            oracle::fixes_tree_vertex(&g, v, &p1, k) && oracle::fixes_tree_vertex(&g, v, &q1, k)
        };
        if let Some(h) = &rep.direction {
            case2 += 1;
            let lh = oracle::translation_length(&g, v, h);
            ensure(lh > 0 && lh <= delta, || {
                format!("direction {} has length {lh}", h.format(&g))
            })?;
            ensure(moved(&p1, h) == lh && moved(&q1, h) == lh, || {
                "axis of the direction misses β^δ".into()
            })?;
            let candidates: Vec<NormalForm> =
                b.iter().filter(|c| c.len() < h.len()).cloned().collect();
            ensure(!oracle::is_proper_power(&g, h, &candidates), || {
                "direction is a proper power".into()
            })?;
        }
        for (k, side) in d.iter().zip(&rep.sides) {
            elements += 1;
            let elliptic = !oracle::in_gamma(&g, v, k);
            let axial = match &rep.direction {
                Some(h) if !elliptic => (-4i64..=4).filter(|&n| n != 0).find(|&n| {
                    let h0 = multiply(&g, &raagtk_core::word::power(&g, h, -n), k);
                    fixes(&h0) && oracle::commutes(&g, h, &h0)
                }),
                _ => None,
            };
            let ok = match side {
                AlmostSide::Fixes => elliptic && fixes(k),
                AlmostSide::Axial { power } => !elliptic && axial == Some(*power),
            };
            ensure(ok, || format!("{} is on neither side", k.format(&g)))?;
        }
        ensure(d.len() == rep.sides.len(), || {
            "not every element was classified".into()
        })?;
        if rep.direction.is_none() {
            let stab: Vec<&NormalForm> = b.iter().filter(|k| fixes(k)).collect();
            ensure(stab.len() == d.len(), || {
                "case 1 but D differs from the stabilizer of β^δ".into()
            })?;
        }
    }
    Ok(format!(
        "{samples} arcs, {elements} elements, {case2} in the cyclic case"
    ))
}

fn visual_amalgams(g: &DefGraph) -> Vec<(VertexSet, VertexSet, VertexSet)> {
    let n = g.len();
    let mut out = Vec::new();
    for code in 0..3usize.pow(n as u32) {
        let (mut a, mut b) = (VertexSet::EMPTY, VertexSet::EMPTY);
        let mut c = code;
        for v in 0..n {
            match c % 3 {
                0 => a.insert(v),
                1 => b.insert(v),
                _ => {
                    a.insert(v);
                    b.insert(v);
                }
            }
            c /= 3;
        }
        let c = a.intersection(b);
        if c == a || c == b {
            continue;
        }
        let separated = a
            .difference(c)
            .iter()
            .all(|x| b.difference(c).iter().all(|y| !g.adjacent(x, y)));
        if separated {
            out.push((a, b, c));
        }
    }
    out
}

fn automorphisms(seed: u64) -> Result<String, String> {
    let mut rng = rng_for(seed, 10);
    let (mut transvections, mut conjugations, mut pairs) = (0, 0, 0);
    for _ in 0..200 {
        let g = random_graph(&mut rng, 2, 5);
        let amalgams = visual_amalgams(&g);
        let commutes_with = |u: usize, w: usize| u == w || g.adjacent(u, w);
        let (phi, inverse_images) = if !amalgams.is_empty() && rng.gen() {
            let (a, b, c) = amalgams[rng.gen_range(0..amalgams.len())];
            let allowed: VertexSet = a
                .iter()
                .filter(|&u| c.iter().all(|w| commutes_with(u, w)))
                .collect();
            let z = random_in(&mut rng, &g, allowed, 4);
            let phi = build_partial_conjugation(&g, a, b, c, &z).map_err(err)?;
            let zi = invert(&g, &z);
            let inv: Vec<NormalForm> = (0..g.len())
                .map(|u| {
                    let x = NormalForm::generator(u);
                    if b.difference(c).contains(u) {
                        multiply(&g, &multiply(&g, &zi, &x), &z)
                    } else {
                        x
                    }
                })
                .collect();
            conjugations += 1;
            (phi, inv)
        } else {
            let v = rng.gen_range(0..g.len());
            let link: Vec<usize> = (0..g.len()).filter(|&w| g.adjacent(v, w)).collect();
            let allowed: VertexSet = (0..g.len())
                .filter(|&u| u != v && link.iter().all(|&w| commutes_with(u, w)))
                .collect();
            let z = random_in(&mut rng, &g, allowed, 4);
            let phi = build_transvection(&g, v, &z).map_err(err)?;
            let inv: Vec<NormalForm> = (0..g.len())
                .map(|u| {
                    let x = NormalForm::generator(u);
                    if u == v {
                        multiply(&g, &invert(&g, &z), &x)
                    } else {
                        x
                    }
                })
                .collect();
            transvections += 1;
            (phi, inv)
        };
        let literal = phi.format(&g);
        ensure(verify_automorphism(&g, &phi), || {
            format!("{literal} fails verification")
        })?;
        for (u, w) in g.edges() {
            ensure(
                oracle::commutes(&g, &phi.map.images[u], &phi.map.images[w]),
                || format!("{literal} breaks the relator of an edge"),
            )?;
        }
        for u in 0..g.len() {
            let x = NormalForm::generator(u);
            let there = substitute(&g, &phi, &inverse_images[u]);
            let mut back = Vec::new();
            for l in phi.map.images[u].letters() {
                let img = &inverse_images[l.vertex()];
                let img = if l.is_positive() {
                    img.clone()
                } else {
                    invert(&g, img)
                };
                back.extend_from_slice(img.letters());
            }
            ensure(there == x && normalize(&g, &back) == x, || {
                format!("{literal} is not inverted by z^-1")
            })?;
        }
        for _ in 0..20 {
            let x = random_element(&mut rng, &g, 6);
            let y = random_element(&mut rng, &g, 6);
            let lhs = phi.apply(&g, &multiply(&g, &x, &y));
            let rhs = multiply(&g, &phi.apply(&g, &x), &phi.apply(&g, &y));
            ensure(
                lhs == rhs && lhs == substitute(&g, &phi, &multiply(&g, &x, &y)),
                || {
                    format!(
                        "{literal} is not multiplicative on {} and {}",
                        x.format(&g),
                        y.format(&g)
                    )
                },
            )?;
            pairs += 1;
        }
    }
    Ok(format!(
        "{transvections} transvections, {conjugations} partial conjugations, {pairs} pairs"
    ))
}

fn random_pair(rng: &mut ChaCha8Rng, g: &DefGraph) -> Option<HyperplanePair> {
    let vs: Vec<usize> = (0..g.len()).collect();
    let start = random_element(rng, g, 1);
    let path = if rng.gen_range(0..3) == 0 {
        let v = rng.gen_range(0..g.len());
        let sign = rng.gen();
        vec![Letter::new(v, sign); rng.gen_range(2..=3)]
    } else {
        let len = rng.gen_range(2..=6);
        normalize(g, &random_letters(rng, &vs, len)).into_letters()
    };
    let order = trace_order(g, &path);
    let pairs: Vec<(usize, usize)> = (0..path.len())
        .flat_map(|i| (i + 1..path.len()).map(move |k| (i, k)))
        .filter(|&(i, k)| order[i][k])
        .collect();
    let &(i, k) = pairs.choose(rng)?;
    HyperplanePair::from_path(g, &start, &path, i, k).ok()
}

fn double_centralizers(seed: u64) -> Result<String, String> {
    let mut rng = rng_for(seed, 11);
    let (mut pairs, mut cyclic) = (0, 0);
    let mut balls: FxHashMap<String, Vec<NormalForm>> = FxHashMap::default();
    while pairs < 50 {
        let g = random_graph(&mut rng, 2, 5);
        let Some(pair) = random_pair(&mut rng, &g) else {
            continue;
        };
        if pair.stabilizer(&g).conjugator.len() > 1 {
            continue;
        }
        pairs += 1;
        let b = balls
            .entry(g.dump())
            .or_insert_with(|| ball(&g, 4, usize::MAX).expect("uncapped"))
            .clone();
        let s: Vec<&NormalForm> = b
            .iter()
            .filter(|k| {
                oracle::stabilizes_hyperplane(&g, &pair.u, k)
                    && oracle::stabilizes_hyperplane(&g, &pair.w, k)
            })
            .collect();
        let z: Vec<&NormalForm> = b
            .iter()
            .filter(|k| s.iter().all(|h| oracle::commutes(&g, k, h)))
            .collect();
        let z3: Vec<&NormalForm> = z.iter().copied().filter(|k| k.len() <= 3).collect();
        let zz: Vec<&NormalForm> = b
            .iter()
            .filter(|k| z3.iter().all(|h| oracle::commutes(&g, k, h)))
            .collect();
        let word = format_letters(&g, &pair.word);
        let expected: Vec<&NormalForm> = match classify_decent_pair(&g, &pair).map_err(err)? {
            PairClass::Centralizer { .. } => s.clone(),
            PairClass::Cyclic {
                g: x,
                skewered,
                total,
                ..
            } => {
                cyclic += 1;
                ensure(skewered + 2 >= total, || {
                    format!("{word}: {x:?} skewers only {skewered} of {total}")
                })?;
                ensure(
                    gamma(&g, &x) == pair.word.iter().map(|l| l.vertex()).collect(),
                    || format!("{word}: Γ(g) differs from Δ"),
                )?;
                b.iter().filter(|k| oracle::commutes(&g, k, &x)).collect()
            }
        };
        ensure(zz == expected, || {
            format!(
                "{word} from {}: double centralizer has {} ball elements, expected {}",
                pair.start.format(&g),
                zz.len(),
                expected.len()
            )
        })?;
    }
    Ok(format!("{pairs} pairs, {cyclic} in the cyclic case"))
}
