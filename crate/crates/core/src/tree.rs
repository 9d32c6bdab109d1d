//! The Bass–Serre trees `T_v`: vertices are cosets `g·A_{Γ∖v}`, edges are
//! hyperplanes labelled `v`.

use crate::decomp::{trace_order, HyperplanePair};
use crate::element::{li_components, primitive_root};
use crate::error::{Error, Result};
use crate::graph::{DefGraph, VertexSet};
use crate::subgroup::SubgroupForm;
use crate::word::{coset_representative, cyclic_reduce, invert, multiply, NormalForm};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeVertex {
    pub label: usize,
    pub coset: NormalForm,
}

impl TreeVertex {
    pub fn new(g: &DefGraph, v: usize, x: &NormalForm) -> Result<Self> {
        g.check_vertex(v)?;
        Ok(TreeVertex {
            label: v,
            coset: coset_representative(g, x.letters(), complement(g, v)),
        })
    }

    pub fn translate(&self, g: &DefGraph, k: &NormalForm) -> Self {
        TreeVertex {
            label: self.label,
            coset: coset_representative(
                g,
                multiply(g, k, &self.coset).letters(),
                complement(g, self.label),
            ),
        }
    }
}

fn complement(g: &DefGraph, v: usize) -> VertexSet {
    let mut s = g.all();
    s.remove(v);
    s
}

/// Number of `v`-hyperplanes separating the cosets of `x` and `y`.
pub fn tv_distance(g: &DefGraph, v: usize, x: &NormalForm, y: &NormalForm) -> Result<usize> {
    g.check_vertex(v)?;
    Ok(multiply(g, &invert(g, x), y).count_vertex(v))
}

fn vertex_distance(g: &DefGraph, a: &TreeVertex, b: &TreeVertex) -> usize {
    multiply(g, &invert(g, &a.coset), &b.coset).count_vertex(a.label)
}

/// Translation length of `x` in `T_v`: the number of `v` letters in its
/// cyclic core.
pub fn tv_translation_length(g: &DefGraph, v: usize, x: &NormalForm) -> Result<usize> {
    g.check_vertex(v)?;
    Ok(cyclic_reduce(g, x).core.count_vertex(v))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeArc {
    pub label: usize,
    pub p: TreeVertex,
    pub q: TreeVertex,
}

impl TreeArc {
    pub fn new(g: &DefGraph, v: usize, x: &NormalForm, y: &NormalForm) -> Result<Self> {
        Self::from_vertices(TreeVertex::new(g, v, x)?, TreeVertex::new(g, v, y)?)
    }

    pub fn from_vertices(p: TreeVertex, q: TreeVertex) -> Result<Self> {
        if p.label != q.label {
            return Err(Error::Precondition(
                "arc endpoints lie in different trees".into(),
            ));
        }
        if p == q {
            return Err(Error::DegenerateArc("endpoints coincide".into()));
        }
        Ok(TreeArc {
            label: p.label,
            p,
            q,
        })
    }

    pub fn len(&self, g: &DefGraph) -> usize {
        vertex_distance(g, &self.p, &self.q)
    }

    /// A geodesic of the group realizing the arc: it starts at the
    /// representative of `p` and spells the returned normal form.
    pub fn path(&self, g: &DefGraph) -> (NormalForm, NormalForm) {
        (
            self.p.coset.clone(),
            multiply(g, &invert(g, &self.p.coset), &self.q.coset),
        )
    }

    /// The vertices of the arc, from `p` to `q`.
    pub fn vertices(&self, g: &DefGraph) -> Vec<TreeVertex> {
        let (start, path) = self.path(g);
        let mut out = vec![self.p.clone()];
        let mut prefix = start.letters().to_vec();
        for &l in path.letters() {
            prefix.push(l);
            if l.vertex() == self.label {
                out.push(TreeVertex {
                    label: self.label,
                    coset: coset_representative(g, &prefix, complement(g, self.label)),
                });
            }
        }
        out
    }

    /// Endpoints of `β^t`, the arc with `t/2` removed from each end. The
    /// action has no inversions, so fixing a midpoint of an edge is the same
    /// as fixing the edge and only `⌊t/2⌋` whole edges are removed.
    pub fn shrink(&self, g: &DefGraph, t: usize) -> Result<(TreeVertex, TreeVertex)> {
        let vs = self.vertices(g);
        let m = vs.len() - 1;
        let cut = t / 2;
        if t > m {
            return Err(Error::OutOfRange(format!(
                "cannot shrink an arc of length {m} by {t}"
            )));
        }
        Ok((vs[cut].clone(), vs[m - cut].clone()))
    }

    pub fn fixed_by(&self, g: &DefGraph, k: &NormalForm) -> bool {
        self.p.translate(g, k) == self.p && self.q.translate(g, k) == self.q
    }

    /// `max(d(p, kp), d(q, kq))`.
    pub fn displacement(&self, g: &DefGraph, k: &NormalForm) -> usize {
        let dp = vertex_distance(g, &self.p, &self.p.translate(g, k));
        let dq = vertex_distance(g, &self.q, &self.q.translate(g, k));
        dp.max(dq)
    }
}

/// The stabilizer of the arc: that of its first and last edges, which are
/// dual to the first and last `v`-hyperplanes along a realizing geodesic.
pub fn arc_stabilizer(g: &DefGraph, arc: &TreeArc) -> SubgroupForm {
    edge_pair(g, arc).stabilizer(g)
}

pub(crate) fn edge_pair(g: &DefGraph, arc: &TreeArc) -> HyperplanePair {
    let (start, path) = arc.path(g);
    let vs: Vec<usize> = (0..path.len())
        .filter(|&i| path.letters()[i].vertex() == arc.label)
        .collect();
    let order = trace_order(g, path.letters());
    let last = if vs.len() >= 2 {
        Some(vs[vs.len() - 1])
    } else {
        None
    };
    HyperplanePair::from_interval(g, &start, path.letters(), vs[0], last, &order)
}

/// Ball elements of word length at most `radius` moving both endpoints of
/// the arc by at most `s`.
pub fn almost_stabilizer(
    g: &DefGraph,
    arc: &TreeArc,
    s: usize,
    radius: usize,
) -> Result<Vec<NormalForm>> {
    let m = arc.len(g);
    if 2 * s >= m {
        return Err(Error::OutOfRange(format!(
            "s = {s} must be below half the arc length {m}"
        )));
    }
    let ball = crate::word::ball(g, radius, crate::word::ball_cap())?;
    Ok(ball
        .into_iter()
        .filter(|k| arc.displacement(g, k) <= s)
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlmostSide {
    /// Elliptic, fixing `β^δ`.
    Fixes,
    /// Loxodromic: `h^n · h0` with `h0` fixing `β^δ`.
    Axial { power: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DichotomyReport {
    pub delta: usize,
    pub shrunk: (TreeVertex, TreeVertex),
    pub sides: Vec<AlmostSide>,
    /// The common primitive direction of the loxodromic elements.
    pub direction: Option<NormalForm>,
    pub violations: Vec<String>,
}

impl DichotomyReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    /// `1` when every element fixes `β^δ`, `2` when a loxodromic occurs.
    pub fn case(&self) -> u8 {
        if self.direction.is_some() {
            2
        } else {
            1
        }
    }
}

/// Classifies each element of a truncation of `D(β, δ)` into one side of the
/// dichotomy for `δ ≤ ℓ(β)/(4r+2)`, with `r` the clique number.
pub fn classify_almost_stabilizer(
    g: &DefGraph,
    arc: &TreeArc,
    delta: usize,
    elements: &[NormalForm],
) -> Result<DichotomyReport> {
    let m = arc.len(g);
    let r = g.clique_number();
    if delta * (4 * r + 2) > m {
        return Err(Error::OutOfRange(format!(
            "δ = {delta} exceeds ℓ(β)/(4r+2) with ℓ(β) = {m}, r = {r}"
        )));
    }
    let v = arc.label;
    let (p1, q1) = arc.shrink(g, delta)?;
    let fixes_core = |k: &NormalForm| p1.translate(g, k) == p1 && q1.translate(g, k) == q1;
    let mut sides = Vec::new();
    let mut direction: Option<NormalForm> = None;
    let mut violations = Vec::new();
    for k in elements {
        let label = k.format(g);
        if arc.displacement(g, k) > delta {
            violations.push(format!("{label}: not in D(β, δ)"));
            continue;
        }
        let len = tv_translation_length(g, v, k)?;
        if len == 0 {
            if !fixes_core(k) {
                violations.push(format!("{label}: elliptic but moves β^δ"));
            }
            sides.push(AlmostSide::Fixes);
            continue;
        }
        let li = li_components(g, k)?;
        let lox: Vec<&NormalForm> = li
            .components
            .iter()
            .filter(|c| tv_translation_length(g, v, c).unwrap_or(0) > 0)
            .collect();
        if lox.len() != 1 {
            violations.push(format!("{label}: {} loxodromic components", lox.len()));
            continue;
        }
        let c = lox[0];
        let (root, n) = primitive_root(g, c)?;
        let inv = invert(g, &root);
        let (h, sign) = if (inv.len(), inv.letters()) < (root.len(), root.letters()) {
            (inv, -1)
        } else {
            (root, 1)
        };
        match &direction {
            None => {
                let lh = tv_translation_length(g, v, &h)?;
                if lh == 0 || lh > delta {
                    violations.push(format!("{label}: direction has translation length {lh}"));
                }
                for x in [&p1, &q1] {
                    if vertex_distance(g, x, &x.translate(g, &h)) != lh {
                        violations.push(format!("{label}: axis of the direction misses β^δ"));
                    }
                }
                direction = Some(h.clone());
            }
            Some(d) if *d != h => {
                violations.push(format!(
                    "{label}: direction {} differs from {}",
                    h.format(g),
                    d.format(g)
                ));
            }
            Some(_) => {}
        }
        let h0 = multiply(g, &invert(g, c), k);
        if !fixes_core(&h0) {
            violations.push(format!("{label}: elliptic part moves β^δ"));
        }
        sides.push(AlmostSide::Axial {
            power: sign * n as i64,
        });
    }
    Ok(DichotomyReport {
        delta,
        shrunk: (p1, q1),
        sides,
        direction,
        violations,
    })
}

/// Whether `x` is conjugate into `A_{Γ∖v}` by an element of the ball of the
/// given radius.
pub fn elliptic_by_search(g: &DefGraph, v: usize, x: &NormalForm, radius: usize) -> Result<bool> {
    for c in crate::word::ball(g, radius, crate::word::ball_cap())? {
        let y = crate::word::conjugate(g, &c, x);
        if y.count_vertex(v) == 0 {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::library::*;
    use crate::subgroup::member;
    use crate::word::{ball, normalize, power};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn nf(g: &DefGraph, s: &str) -> NormalForm {
        NormalForm::parse(g, s).unwrap()
    }

    fn random_element(g: &DefGraph, rng: &mut ChaCha8Rng, max: usize) -> NormalForm {
        let len = rng.gen_range(0..=max);
        let w: Vec<_> = (0..len)
            .map(|_| crate::word::Letter::from_code(rng.gen_range(0..2 * g.len() as u8)))
            .collect();
        normalize(g, &w)
    }

    #[test]
    fn distance_examples() {
        let p = path(3);
        let e = NormalForm::identity();
        assert_eq!(tv_distance(&p, 1, &e, &e).unwrap(), 0);
        assert_eq!(tv_distance(&p, 1, &e, &nf(&p, "a b c b")).unwrap(), 2);
        assert_eq!(tv_translation_length(&p, 1, &nf(&p, "a b")).unwrap(), 1);
        assert_eq!(tv_translation_length(&p, 1, &nf(&p, "a c")).unwrap(), 0);
        assert_eq!(
            tv_translation_length(&p, 1, &nf(&p, "c b c^-1")).unwrap(),
            1
        );
        assert!(tv_distance(&p, 7, &e, &e).is_err());
        assert_eq!(
            TreeVertex::new(&p, 1, &nf(&p, "b a c")).unwrap().coset,
            nf(&p, "b")
        );
    }

    #[test]
    fn distance_is_a_metric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for g in all_up_to_isomorphism(4) {
            for _ in 0..30 {
                let v = rng.gen_range(0..4);
                let xs: Vec<_> = (0..3).map(|_| random_element(&g, &mut rng, 8)).collect();
                let t: Vec<_> = xs
                    .iter()
                    .map(|x| TreeVertex::new(&g, v, x).unwrap())
                    .collect();
                let d = |i: usize, j: usize| tv_distance(&g, v, &xs[i], &xs[j]).unwrap();
                assert_eq!(d(0, 1), d(1, 0));
                assert!(d(0, 2) <= d(0, 1) + d(1, 2));
                assert_eq!(d(0, 1) == 0, t[0] == t[1]);
                // the action is by isometries
                let k = random_element(&g, &mut rng, 4);
                assert_eq!(
                    vertex_distance(&g, &t[0].translate(&g, &k), &t[1].translate(&g, &k)),
                    d(0, 1)
                );
            }
        }
    }

    #[test]
    fn translation_length_of_powers() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for g in all_up_to_isomorphism(4) {
            for _ in 0..20 {
                let x = random_element(&g, &mut rng, 8);
                let v = rng.gen_range(0..4);
                let l = tv_translation_length(&g, v, &x).unwrap();
                assert_eq!(l > 0, crate::element::gamma(&g, &x).contains(v));
                for n in 1..=4 {
                    assert_eq!(
                        tv_translation_length(&g, v, &power(&g, &x, n)).unwrap(),
                        n as usize * l
                    );
                }
            }
        }
    }

    #[test]
    fn elliptic_iff_zero_translation() {
        for g in all_up_to_isomorphism(3) {
            for x in ball(&g, 3, 1 << 20).unwrap() {
                for v in 0..3 {
                    let l = tv_translation_length(&g, v, &x).unwrap();
                    assert_eq!(
                        elliptic_by_search(&g, v, &x, 2).unwrap(),
                        l == 0,
                        "{} {v}",
                        x.format(&g)
                    );
                }
            }
        }
    }

    #[test]
    fn arc_examples() {
        let p = path(3);
        let e = NormalForm::identity();
        let arc = TreeArc::new(&p, 1, &e, &nf(&p, "b")).unwrap();
        assert_eq!(arc.len(&p), 1);
        let st = arc_stabilizer(&p, &arc);
        assert_eq!(st.format(&p), "kind=parabolic conj=1 roots= support=a,c");
        let z2 = complete(2);
        let arc = TreeArc::new(&z2, 0, &e, &nf(&z2, "a a")).unwrap();
        assert_eq!(
            arc_stabilizer(&z2, &arc).support,
            z2.parse_set("b").unwrap()
        );
        let f = edgeless(2);
        let arc = TreeArc::new(&f, 0, &e, &nf(&f, "a b a")).unwrap();
        assert!(arc_stabilizer(&f, &arc).is_trivial());
        assert!(matches!(
            TreeArc::new(&p, 1, &e, &nf(&p, "a c")),
            Err(Error::DegenerateArc(_))
        ));
    }

    #[test]
    fn arc_stabilizer_matches_fixers() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for g in all_up_to_isomorphism(3) {
            let b = ball(&g, 3, 1 << 20).unwrap();
            for _ in 0..6 {
                let v = rng.gen_range(0..3);
                let x = random_element(&g, &mut rng, 3);
                let y = random_element(&g, &mut rng, 5);
                let Ok(arc) = TreeArc::new(&g, v, &x, &y) else {
                    continue;
                };
                let st = arc_stabilizer(&g, &arc);
                for k in &b {
                    assert_eq!(member(&g, &st, k).unwrap(), arc.fixed_by(&g, k));
                }
                // the stabilizer fixes every vertex of the arc
                for k in st.generators(&g) {
                    for t in arc.vertices(&g) {
                        assert_eq!(t.translate(&g, &k), t);
                    }
                }
            }
        }
    }

    #[test]
    fn almost_stabilizer_examples() {
        let z2 = complete(2);
        let e = NormalForm::identity();
        let arc = TreeArc::new(&z2, 0, &e, &nf(&z2, "a a a")).unwrap();
        let d = almost_stabilizer(&z2, &arc, 1, 2).unwrap();
        assert!(d.contains(&nf(&z2, "a")));
        assert!(!d.contains(&nf(&z2, "a a")));
        let d0 = almost_stabilizer(&z2, &arc, 0, 2).unwrap();
        assert!(d0.iter().all(|k| arc.fixed_by(&z2, k)));
        assert!(matches!(
            almost_stabilizer(&z2, &arc, 2, 2),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn dichotomy_examples() {
        let f = edgeless(1);
        let e = NormalForm::identity();
        let arc = TreeArc::new(&f, 0, &e, &nf(&f, "a a a a a a")).unwrap();
        let d = almost_stabilizer(&f, &arc, 1, 3).unwrap();
        let r = classify_almost_stabilizer(&f, &arc, 1, &d).unwrap();
        assert!(r.holds(), "{:?}", r.violations);
        assert_eq!(r.case(), 2);
        assert_eq!(r.direction, Some(nf(&f, "a^-1")));
        let p = path(3);
        let x = nf(&p, "b a b c b a b c b a b c b");
        let arc = TreeArc::new(&p, 1, &e, &x).unwrap();
        assert_eq!(arc.len(&p), 7);
        let d = almost_stabilizer(&p, &arc, 0, 3).unwrap();
        let r = classify_almost_stabilizer(&p, &arc, 0, &d).unwrap();
        assert!(r.holds());
        assert_eq!(r.case(), 1);
        assert!(classify_almost_stabilizer(&p, &arc, 1, &d).is_err());
    }

    #[test]
    fn shrink_and_vertices() {
        let f = edgeless(1);
        let arc = TreeArc::new(&f, 0, &NormalForm::identity(), &nf(&f, "a a a a")).unwrap();
        assert_eq!(arc.vertices(&f).len(), 5);
        let (p, q) = arc.shrink(&f, 3).unwrap();
        assert_eq!(p.coset, nf(&f, "a"));
        assert_eq!(q.coset, nf(&f, "a a a"));
    }
}
