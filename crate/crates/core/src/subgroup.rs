//! Parabolic and semi-parabolic subgroups `x · (⟨a_1, …, a_k⟩ × A_Δ) · x^-1`.

use std::fmt;

use rustc_hash::FxHashSet;

use crate::element::{
    check_product_structure, cyclic_root_of, is_label_irreducible, member_product, primitive_root,
    project,
};
use crate::error::{Error, Result};
use crate::graph::{DefGraph, VertexSet};
use crate::literal::{get, key_values};
use crate::word::{ball, ball_cap, conjugate, cyclic_reduce, invert, multiply, NormalForm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SubgroupKind {
    Parabolic,
    SemiParabolic,
}

impl fmt::Display for SubgroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubgroupKind::Parabolic => "parabolic",
            SubgroupKind::SemiParabolic => "semi_parabolic",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubgroupForm {
    pub kind: SubgroupKind,
    pub conjugator: NormalForm,
    pub abelian_roots: Vec<NormalForm>,
    pub support: VertexSet,
}

impl SubgroupForm {
    pub fn parabolic(conjugator: NormalForm, support: VertexSet) -> Self {
        SubgroupForm {
            kind: SubgroupKind::Parabolic,
            conjugator,
            abelian_roots: Vec::new(),
            support,
        }
    }

    pub fn semi_parabolic(
        conjugator: NormalForm,
        roots: Vec<NormalForm>,
        support: VertexSet,
    ) -> Self {
        SubgroupForm {
            kind: SubgroupKind::SemiParabolic,
            conjugator,
            abelian_roots: roots,
            support,
        }
    }

    pub fn trivial() -> Self {
        SubgroupForm::parabolic(NormalForm::identity(), VertexSet::EMPTY)
    }

    pub fn is_trivial(&self) -> bool {
        self.abelian_roots.is_empty() && self.support.is_empty()
    }

    /// Parses `conj=W roots=W1,W2 support=a,b [kind=parabolic|semi_parabolic]`.
    /// Every field is optional; values run until the next `key=`.
    pub fn parse(g: &DefGraph, text: &str) -> Result<Self> {
        let fields = key_values(text, &["conj", "roots", "support", "kind"], "subgroup")?;
        let get = |key: &str| get(&fields, key);
        let conjugator = NormalForm::parse(g, get("conj").unwrap_or("1"))?;
        let abelian_roots = match get("roots") {
            None => Vec::new(),
            Some(v) => v
                .split(',')
                .map(str::trim)
                .filter(|w| !w.is_empty())
                .map(|w| NormalForm::parse(g, w))
                .collect::<Result<_>>()?,
        };
        let support = g.parse_set(get("support").unwrap_or(""))?;
        let kind = match get("kind").map(str::trim) {
            None if abelian_roots.is_empty() => SubgroupKind::Parabolic,
            None => SubgroupKind::SemiParabolic,
            Some("parabolic") => SubgroupKind::Parabolic,
            Some("semi_parabolic") | Some("semi-parabolic") => SubgroupKind::SemiParabolic,
            Some(other) => return Err(Error::Syntax(format!("unknown subgroup kind `{other}`"))),
        };
        Ok(SubgroupForm {
            kind,
            conjugator,
            abelian_roots,
            support,
        })
    }

    pub fn format(&self, g: &DefGraph) -> String {
        let roots: Vec<String> = self.abelian_roots.iter().map(|r| r.format(g)).collect();
        format!(
            "kind={} conj={} roots={} support={}",
            self.kind,
            self.conjugator.format(g),
            roots.join(","),
            g.set_names(self.support).join(",")
        )
    }

    /// Generators `x a_i x^-1` and `x v x^-1` (v ∈ Δ).
    pub fn generators(&self, g: &DefGraph) -> Vec<NormalForm> {
        self.abelian_roots
            .iter()
            .cloned()
            .chain(self.support.iter().map(NormalForm::generator))
            .map(|h| conjugate(g, &self.conjugator, &h))
            .collect()
    }
}

/// `Ok(())` or the first violated clause.
pub fn validate(g: &DefGraph, sf: &SubgroupForm) -> std::result::Result<(), String> {
    if sf.kind == SubgroupKind::Parabolic && !sf.abelian_roots.is_empty() {
        return Err("a parabolic subgroup has no abelian roots".into());
    }
    crate::word::check_letters(g, sf.conjugator.letters()).map_err(|e| e.to_string())?;
    for (i, r) in sf.abelian_roots.iter().enumerate() {
        crate::word::check_letters(g, r.letters()).map_err(|e| e.to_string())?;
        if r.is_identity() {
            return Err(format!("root {i} is trivial"));
        }
        if !cyclic_reduce(g, r).conjugator.is_identity() {
            return Err(format!("root {i} is not cyclically reduced"));
        }
        if !is_label_irreducible(g, r) {
            return Err(format!("root {i} is not label-irreducible"));
        }
        if primitive_root(g, r).expect("nontrivial").1 != 1 {
            return Err(format!("root {i} is a proper power"));
        }
    }
    check_product_structure(g, &sf.abelian_roots, sf.support)
}

pub fn is_valid(g: &DefGraph, sf: &SubgroupForm) -> bool {
    validate(g, sf).is_ok()
}

pub fn member(g: &DefGraph, sf: &SubgroupForm, h: &NormalForm) -> Result<bool> {
    validate(g, sf).map_err(Error::InvalidSubgroup)?;
    Ok(member_unchecked(g, sf, h))
}

fn member_unchecked(g: &DefGraph, sf: &SubgroupForm, h: &NormalForm) -> bool {
    member_product(g, &sf.conjugator, &sf.abelian_roots, sf.support, h)
}

pub fn contains(g: &DefGraph, big: &SubgroupForm, small: &SubgroupForm) -> Result<bool> {
    validate(g, big).map_err(Error::InvalidSubgroup)?;
    validate(g, small).map_err(Error::InvalidSubgroup)?;
    Ok(small
        .generators(g)
        .iter()
        .all(|h| member_unchecked(g, big, h)))
}

pub fn same_subgroup(g: &DefGraph, a: &SubgroupForm, b: &SubgroupForm) -> Result<bool> {
    Ok(contains(g, a, b)? && contains(g, b, a)?)
}

/// Desk-scale intersection. The label-irreducible elements of length at most
/// `radius` lying in both subgroups are collected and pruned to those not
/// already produced by shorter ones; a form is then sought, over candidate
/// conjugators, whose generators lie in both subgroups and which contains
/// every collected element. The answer is exact whenever the intersection is
/// generated by label-irreducibles of length at most `radius`.
pub fn intersect(
    g: &DefGraph,
    a: &SubgroupForm,
    b: &SubgroupForm,
    radius: usize,
) -> Result<SubgroupForm> {
    validate(g, a).map_err(Error::InvalidSubgroup)?;
    validate(g, b).map_err(Error::InvalidSubgroup)?;
    let in_both = |h: &NormalForm| member_unchecked(g, a, h) && member_unchecked(g, b, h);
    let found: Vec<NormalForm> = ball(g, radius, ball_cap())?
        .into_iter()
        .filter(|h| !h.is_identity() && in_both(h) && is_label_irreducible(g, h))
        .collect();
    if found.is_empty() {
        return Ok(SubgroupForm::trivial());
    }
    let kept = prune(g, &found, radius);

    let mut candidates: Vec<NormalForm> = std::iter::once(NormalForm::identity())
        .chain(kept.iter().map(|h| cyclic_reduce(g, h).conjugator))
        .collect::<FxHashSet<_>>()
        .into_iter()
        .collect();
    candidates.sort_by(|x, y| (x.len(), x).cmp(&(y.len(), y)));

    for y in &candidates {
        let yi = invert(g, y);
        let cores: Vec<NormalForm> = kept.iter().map(|h| conjugate(g, &yi, h)).collect();
        let union = cores
            .iter()
            .fold(VertexSet::EMPTY, |s, c| s.union(c.support()));
        let mut roots = Vec::new();
        let mut delta = VertexSet::EMPTY;
        let mut ok = true;
        for factor in g.join_decomposition(union)? {
            if factor
                .iter()
                .all(|v| in_both(&conjugate(g, y, &NormalForm::generator(v))))
            {
                delta = delta.union(factor);
                continue;
            }
            let mut projections: Vec<NormalForm> = cores
                .iter()
                .map(|c| project(g, c, factor))
                .filter(|p| !p.is_identity())
                .collect();
            projections.sort_by(|x, y| (x.len(), x).cmp(&(y.len(), y)));
            let Some(shortest) = projections.first() else {
                ok = false;
                break;
            };
            let Some(root) = cyclic_root_of(g, shortest) else {
                ok = false;
                break;
            };
            if !in_both(&conjugate(g, y, &root)) {
                ok = false;
                break;
            }
            roots.push(root);
        }
        if !ok {
            continue;
        }
        let form = if roots.is_empty() {
            SubgroupForm::parabolic(y.clone(), delta)
        } else {
            SubgroupForm::semi_parabolic(y.clone(), roots, delta)
        };
        if is_valid(g, &form)
            && form.generators(g).iter().all(in_both)
            && found.iter().all(|h| member_unchecked(g, &form, h))
        {
            return Ok(form);
        }
    }
    Err(Error::RadiusTooSmall(radius))
}

/// Drops every element already in the product closure (within the radius) of
/// the shorter elements kept before it.
fn prune(g: &DefGraph, found: &[NormalForm], radius: usize) -> Vec<NormalForm> {
    let mut kept: Vec<NormalForm> = Vec::new();
    let mut reach: FxHashSet<NormalForm> = FxHashSet::default();
    reach.insert(NormalForm::identity());
    for h in found {
        if reach.contains(h) {
            continue;
        }
        kept.push(h.clone());
        let gens: Vec<NormalForm> = kept
            .iter()
            .flat_map(|k| [k.clone(), invert(g, k)])
            .collect();
        let mut frontier: Vec<NormalForm> = reach.iter().cloned().collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for c in &frontier {
                for s in &gens {
                    let p = multiply(g, c, s);
                    if p.len() <= radius && reach.insert(p.clone()) {
                        next.push(p);
                    }
                }
            }
            frontier = next;
        }
    }
    kept
}

/// For a parabolic `sf` containing `w · core(h) · w^-1`, checks that every
/// single-letter conjugate `w a_i w^-1` of the core's letters lies in `sf`.
pub fn parabolic_direction_check(
    g: &DefGraph,
    h: &NormalForm,
    w: &NormalForm,
    sf: &SubgroupForm,
) -> Result<bool> {
    validate(g, sf).map_err(Error::InvalidSubgroup)?;
    if sf.kind != SubgroupKind::Parabolic {
        return Err(Error::Precondition("subgroup is not parabolic".into()));
    }
    let core = cyclic_reduce(g, h).core;
    if !member_unchecked(g, sf, &conjugate(g, w, &core)) {
        return Err(Error::Precondition(
            "w · core(h) · w^-1 is not in the subgroup".into(),
        ));
    }
    Ok(core.letters().iter().all(|&l| {
        let gen = NormalForm::generator(l.vertex());
        member_unchecked(g, sf, &conjugate(g, w, &gen))
    }))
}
