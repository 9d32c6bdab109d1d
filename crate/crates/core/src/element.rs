//! Per-element invariants: Γ(g), label-irreducible components, roots and
//! centralizers.

use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::graph::{DefGraph, VertexSet};
use crate::word::{
    conjugate, cyclic_reduce, invert, is_cyclically_reduced, multiply, normalize, power, Letter,
    NormalForm,
};

/// Γ(g): the support of the cyclic core.
pub fn gamma(g: &DefGraph, x: &NormalForm) -> VertexSet {
    cyclic_reduce(g, x).core.support()
}

pub fn is_label_irreducible(g: &DefGraph, x: &NormalForm) -> bool {
    g.is_join_irreducible(gamma(g, x))
}

/// Letters of `w` whose vertex lies in `keep`, normalized. Deleting generators
/// is a retraction onto `A_keep`, so this is a homomorphism.
pub fn project(g: &DefGraph, w: &NormalForm, keep: VertexSet) -> NormalForm {
    let letters: Vec<Letter> = w
        .letters()
        .iter()
        .copied()
        .filter(|l| keep.contains(l.vertex()))
        .collect();
    normalize(g, &letters)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LIDecomposition {
    pub components: Vec<NormalForm>,
    pub supports: Vec<VertexSet>,
}

pub fn li_components(g: &DefGraph, x: &NormalForm) -> Result<LIDecomposition> {
    if x.is_identity() {
        return Err(Error::IdentityElement);
    }
    let d = cyclic_reduce(g, x);
    let factors = g.join_decomposition(d.core.support())?;
    let components = factors
        .iter()
        .map(|&f| conjugate(g, &d.conjugator, &project(g, &d.core, f)))
        .collect();
    Ok(LIDecomposition {
        components,
        supports: factors,
    })
}

/// `(r, n)` with `x = r^n` and `n` maximal.
pub fn primitive_root(g: &DefGraph, x: &NormalForm) -> Result<(NormalForm, u32)> {
    if x.is_identity() {
        return Err(Error::IdentityElement);
    }
    let d = cyclic_reduce(g, x);
    let (root, n) = cyclic_root(g, &d.core);
    Ok((conjugate(g, &d.conjugator, &root), n))
}

/// Root extraction for a cyclically reduced, nontrivial element. If
/// `a = r^n` then the first copy of `r` is a prefix of the trace of `a`, and
/// since occurrences of one vertex are totally ordered it consists of the
/// first `count/n` occurrences of each signed letter.
fn cyclic_root(g: &DefGraph, a: &NormalForm) -> (NormalForm, u32) {
    let mut counts = [0u32; 128];
    for l in a.letters() {
        counts[l.code() as usize] += 1;
    }
    let common = counts.iter().copied().filter(|&c| c > 0).fold(0, gcd);
    for n in (2..=common).rev().filter(|n| common % n == 0) {
        let mut quota: Vec<u32> = counts.iter().map(|c| c / n).collect();
        let candidate: Vec<Letter> = a
            .letters()
            .iter()
            .copied()
            .filter(|l| {
                let q = &mut quota[l.code() as usize];
                if *q > 0 {
                    *q -= 1;
                    true
                } else {
                    false
                }
            })
            .collect();
        let r = normalize(g, &candidate);
        if power(g, &r, n as i64) == *a {
            return (r, n);
        }
    }
    (a.clone(), 1)
}

/// Primitive root of a nontrivial cyclically reduced element; `None` otherwise.
pub fn cyclic_root_of(g: &DefGraph, a: &NormalForm) -> Option<NormalForm> {
    (!a.is_identity() && is_cyclically_reduced(g, a)).then(|| cyclic_root(g, a).0)
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn commutes(g: &DefGraph, x: &NormalForm, y: &NormalForm) -> bool {
    multiply(g, x, y) == multiply(g, y, x)
}

/// `Z(g) = x · (⟨h_1⟩ × … × ⟨h_k⟩ × A_Δ) · x^-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralizerForm {
    pub conjugator: NormalForm,
    pub cyclic_roots: Vec<NormalForm>,
    pub parabolic_support: VertexSet,
}

pub fn centralizer(g: &DefGraph, x: &NormalForm) -> Result<CentralizerForm> {
    if x.is_identity() {
        return Err(Error::IdentityElement);
    }
    let d = cyclic_reduce(g, x);
    let supp = d.core.support();
    let cyclic_roots = g
        .join_decomposition(supp)?
        .into_iter()
        .map(|f| cyclic_root(g, &project(g, &d.core, f)).0)
        .collect();
    Ok(CentralizerForm {
        conjugator: d.conjugator,
        cyclic_roots,
        parabolic_support: g.perp(supp)?,
    })
}

/// Checks the structural requirements shared by centralizer and
/// semi-parabolic descriptions: nontrivial cyclically reduced roots, and
/// supports of roots and Δ pairwise orthogonal.
pub(crate) fn check_product_structure(
    g: &DefGraph,
    roots: &[NormalForm],
    delta: VertexSet,
) -> std::result::Result<(), String> {
    g.check_set(delta).map_err(|e| e.to_string())?;
    for (i, r) in roots.iter().enumerate() {
        if r.is_identity() {
            return Err(format!("root {i} is trivial"));
        }
        if !is_cyclically_reduced(g, r) {
            return Err(format!("root {i} is not cyclically reduced"));
        }
        let s = r.support();
        if !s.is_subset(g.perp(delta).expect("checked")) {
            return Err(format!("Γ(root {i}) is not contained in Δ^⊥"));
        }
        for (j, other) in roots.iter().enumerate().skip(i + 1) {
            if !s.is_subset(g.perp(other.support()).expect("valid")) {
                return Err(format!("Γ(root {i}) is not contained in Γ(root {j})^⊥"));
            }
        }
    }
    Ok(())
}

/// Membership in `conj · (⟨roots⟩ × A_Δ) · conj^-1` for a structurally valid
/// description: conjugate back, then project onto each root's support and
/// compare with powers of the root.
pub(crate) fn member_product(
    g: &DefGraph,
    conj: &NormalForm,
    roots: &[NormalForm],
    delta: VertexSet,
    h: &NormalForm,
) -> bool {
    let h = conjugate(g, &invert(g, conj), h);
    let allowed = roots.iter().fold(delta, |acc, r| acc.union(r.support()));
    if !h.support().is_subset(allowed) {
        return false;
    }
    roots.iter().all(|r| {
        let p = project(g, &h, r.support());
        if p.is_identity() {
            return true;
        }
        if p.len() % r.len() != 0 {
            return false;
        }
        let n = (p.len() / r.len()) as i64;
        power(g, r, n) == p || power(g, r, -n) == p
    })
}

pub fn membership_centralizer(g: &DefGraph, cf: &CentralizerForm, h: &NormalForm) -> Result<bool> {
    if cf.cyclic_roots.is_empty() {
        return Err(Error::InvalidSubgroup(
            "centralizer form has no cyclic roots".into(),
        ));
    }
    check_product_structure(g, &cf.cyclic_roots, cf.parabolic_support)
        .map_err(Error::InvalidSubgroup)?;
    Ok(member_product(
        g,
        &cf.conjugator,
        &cf.cyclic_roots,
        cf.parabolic_support,
        h,
    ))
}

/// Breadth-first search over products of at most `budget` factors from
/// `{x^±1, y^±1}` for an element `k` with `Γ(x) ∪ Γ(y) ⊆ Γ(k)`.
pub fn increasing_labels_search(
    g: &DefGraph,
    x: &NormalForm,
    y: &NormalForm,
    budget: usize,
) -> Option<NormalForm> {
    let target = gamma(g, x).union(gamma(g, y));
    let gens = [x.clone(), invert(g, x), y.clone(), invert(g, y)];
    let mut seen: FxHashSet<NormalForm> = FxHashSet::default();
    let mut layer = vec![NormalForm::identity()];
    for _ in 0..budget {
        let mut next = Vec::new();
        for w in &layer {
            for s in &gens {
                let k = multiply(g, w, s);
                if target.is_subset(gamma(g, &k)) {
                    return Some(k);
                }
                if seen.insert(k.clone()) {
                    next.push(k);
                }
            }
        }
        layer = next;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::library::*;
    use crate::word::ball;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn nf(g: &DefGraph, s: &str) -> NormalForm {
        NormalForm::parse(g, s).unwrap()
    }

    fn random_element(g: &DefGraph, rng: &mut ChaCha8Rng, max: usize) -> NormalForm {
        let n = rng.gen_range(0..=max);
        let letters: Vec<Letter> = (0..n)
            .map(|_| Letter::from_code(rng.gen_range(0..2 * g.len() as u8)))
            .collect();
        normalize(g, &letters)
    }

    #[test]
    fn gamma_examples() {
        let p = path(3);
        assert_eq!(gamma(&p, &nf(&p, "c a c^-1")), p.parse_set("a").unwrap());
        let e = complete(2);
        assert_eq!(gamma(&e, &nf(&e, "a b")), e.all());
    }

    #[test]
    fn li_examples() {
        let e = complete(2);
        let li = li_components(&e, &nf(&e, "a b")).unwrap();
        assert_eq!(li.components, vec![nf(&e, "a"), nf(&e, "b")]);
        let p = path(3);
        let li = li_components(&p, &nf(&p, "a c")).unwrap();
        assert_eq!(li.components, vec![nf(&p, "a c")]);
        assert_eq!(
            li_components(&p, &NormalForm::identity()),
            Err(Error::IdentityElement)
        );
    }

    #[test]
    fn root_examples() {
        let f = edgeless(2);
        assert_eq!(
            primitive_root(&f, &nf(&f, "a a")).unwrap(),
            (nf(&f, "a"), 2)
        );
        let e = complete(2);
        assert_eq!(
            primitive_root(&e, &nf(&e, "a b a b")).unwrap(),
            (nf(&e, "a b"), 2)
        );
        assert_eq!(
            primitive_root(&f, &nf(&f, "a b a^-1")).unwrap(),
            (nf(&f, "a b a^-1"), 1)
        );
        assert_eq!(
            primitive_root(&f, &nf(&f, "b a a b^-1")).unwrap(),
            (nf(&f, "b a b^-1"), 2)
        );
        // a^2 b^2 in Z^2 is (ab)^2, but a^2 b^4 is (a b^2)^2
        assert_eq!(
            primitive_root(&e, &nf(&e, "a a b b b b")).unwrap(),
            (nf(&e, "a b b"), 2)
        );
    }

    #[test]
    fn root_when_canonical_form_is_not_periodic() {
        // canonical forms of powers need not be periodic words
        let p = path(3);
        for r in ["b a c", "a c b", "c b a c^-1"] {
            let r = nf(&p, r);
            let (root, n) = primitive_root(&p, &power(&p, &r, 3)).unwrap();
            assert_eq!(n, 3);
            assert_eq!(power(&p, &root, 3), power(&p, &r, 3));
        }
    }

    #[test]
    fn commutes_examples() {
        let p = path(3);
        let x = nf(&p, "a b c^-1");
        assert!(commutes(&p, &x, &power(&p, &x, 2)));
        assert!(commutes(&p, &nf(&p, "a"), &nf(&p, "b")));
        assert!(!commutes(&p, &nf(&p, "a"), &nf(&p, "c")));
    }

    #[test]
    fn centralizer_examples() {
        let p = path(3);
        let cf = centralizer(&p, &nf(&p, "b")).unwrap();
        assert_eq!(cf.cyclic_roots, vec![nf(&p, "b")]);
        assert_eq!(cf.parabolic_support, p.parse_set("a,c").unwrap());
        assert!(membership_centralizer(&p, &cf, &nf(&p, "a c a^-1")).unwrap());
        assert!(membership_centralizer(&p, &cf, &nf(&p, "b")).unwrap());
        let e = complete(2);
        let cf = centralizer(&e, &nf(&e, "a")).unwrap();
        assert_eq!(cf.parabolic_support, e.parse_set("b").unwrap());
        let f = edgeless(2);
        let cf = centralizer(&f, &nf(&f, "a b")).unwrap();
        assert_eq!(cf.cyclic_roots, vec![nf(&f, "a b")]);
        assert!(cf.parabolic_support.is_empty());
        assert_eq!(
            centralizer(&f, &NormalForm::identity()),
            Err(Error::IdentityElement)
        );
    }

    #[test]
    fn centralizer_membership_matches_commutation_on_balls() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for g in all_up_to_isomorphism(3) {
            let ball = ball(&g, 3, 10_000).unwrap();
            for _ in 0..4 {
                let x = random_element(&g, &mut rng, 6);
                if x.is_identity() {
                    continue;
                }
                let cf = centralizer(&g, &x).unwrap();
                for h in &ball {
                    assert_eq!(
                        membership_centralizer(&g, &cf, h).unwrap(),
                        commutes(&g, &x, h),
                        "x = {}, h = {}",
                        x.format(&g),
                        h.format(&g)
                    );
                }
            }
        }
    }

    #[test]
    fn increasing_labels_examples() {
        let f = edgeless(2);
        let k = increasing_labels_search(&f, &nf(&f, "a"), &nf(&f, "b"), 3).unwrap();
        assert_eq!(gamma(&f, &k), f.all());
        let p = path(3);
        let k = increasing_labels_search(&p, &nf(&p, "a"), &nf(&p, "c"), 3).unwrap();
        assert_eq!(gamma(&p, &k), p.parse_set("a,c").unwrap());
        let k = increasing_labels_search(&p, &nf(&p, "a b"), &nf(&p, "b"), 1).unwrap();
        assert_eq!(k, nf(&p, "a b"));
    }

    proptest! {
        #[test]
        fn invariants_on_random_elements(seed in any::<u64>(), n in 1usize..=5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let graphs = all_labelled(n);
            let g = &graphs[rng.gen_range(0..graphs.len())];
            let x = random_element(g, &mut rng, 10);
            let k = random_element(g, &mut rng, 6);
            prop_assume!(!x.is_identity());
            let gx = gamma(g, &x);
            prop_assert_eq!(gamma(g, &conjugate(g, &k, &x)), gx);
            for n in [2, 3, -1] {
                prop_assert_eq!(gamma(g, &power(g, &x, n)), gx);
            }
            let li = li_components(g, &x).unwrap();
            let all: Vec<&NormalForm> = li.components.iter().collect();
            prop_assert_eq!(crate::word::product(g, &all), x.clone());
            for (i, c) in li.components.iter().enumerate() {
                prop_assert!(is_label_irreducible(g, c));
                prop_assert_eq!(gamma(g, c), li.supports[i]);
                for (j, d) in li.components.iter().enumerate().skip(i + 1) {
                    prop_assert!(commutes(g, c, d));
                    prop_assert!(li.supports[i].is_subset(g.perp(li.supports[j]).unwrap()));
                    for p in 1..=4 {
                        for q in 1..=4 {
                            prop_assert_ne!(power(g, c, p), power(g, d, q));
                        }
                    }
                }
            }
            let (r, e) = primitive_root(g, &x).unwrap();
            prop_assert_eq!(power(g, &r, e as i64), x.clone());
            prop_assert_eq!(primitive_root(g, &r).unwrap().1, 1);
            // commutation splits over li-components
            let y = random_element(g, &mut rng, 6);
            if !y.is_identity() {
                let ly = li_components(g, &y).unwrap();
                let componentwise = li.components.iter().all(|c| ly.components.iter().all(|d| commutes(g, c, d)));
                prop_assert_eq!(commutes(g, &x, &y), componentwise);
            }
        }
    }
}
