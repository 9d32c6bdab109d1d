//! Automorphisms determined by visual splittings: transvections for the HNN
//! splittings `A_Γ = A_{Γ∖v} ∗_{A_{lk v}}` and partial conjugations for visual
//! amalgams `A_{Δ_A} ∗_{A_{Δ_C}} A_{Δ_B}`.

use std::fmt;

use crate::element::commutes;
use crate::error::{Error, Result};
use crate::graph::{DefGraph, VertexSet};
use crate::literal::{get, key_values};
use crate::word::{
    check_letters, conjugate, cyclic_reduce, invert, multiply, normalize, NormalForm,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Splitting {
    /// Stable letter `v`, vertex group `A_{Γ∖v}`, edge group `A_{lk v}`.
    Hnn { vertex: usize },
    Amalgam {
        a: VertexSet,
        b: VertexSet,
        c: VertexSet,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DlsKind {
    PartialConjugation,
    Twist,
    Fold,
    MixedTransvection,
}

impl DlsKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DlsKind::PartialConjugation => "partial_conjugation",
            DlsKind::Twist => "twist",
            DlsKind::Fold => "fold",
            DlsKind::MixedTransvection => "mixed_transvection",
        }
    }
}

impl fmt::Display for DlsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An endomorphism given by the images of the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorMap {
    pub images: Vec<NormalForm>,
}

impl GeneratorMap {
    pub fn identity(g: &DefGraph) -> Self {
        GeneratorMap {
            images: (0..g.len()).map(NormalForm::generator).collect(),
        }
    }

    /// Inner automorphism `x ↦ k x k^-1`.
    pub fn inner(g: &DefGraph, k: &NormalForm) -> Self {
        GeneratorMap {
            images: (0..g.len())
                .map(|v| conjugate(g, k, &NormalForm::generator(v)))
                .collect(),
        }
    }

    pub fn check(&self, g: &DefGraph) -> Result<()> {
        if self.images.len() != g.len() {
            return Err(Error::ArityMismatch {
                expected: g.len(),
                found: self.images.len(),
            });
        }
        self.images
            .iter()
            .try_for_each(|x| check_letters(g, x.letters()))
    }

    pub fn apply(&self, g: &DefGraph, x: &NormalForm) -> NormalForm {
        let mut w = Vec::new();
        for l in x.letters() {
            let image = self.images[l.vertex()].letters();
            if l.is_positive() {
                w.extend_from_slice(image);
            } else {
                w.extend(image.iter().rev().map(|m| m.inverse()));
            }
        }
        normalize(g, &w)
    }

    /// `x ↦ self(other(x))`.
    pub fn compose(&self, g: &DefGraph, other: &GeneratorMap) -> GeneratorMap {
        GeneratorMap {
            images: other.images.iter().map(|x| self.apply(g, x)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(v, x)| *x == NormalForm::generator(v))
    }

    /// Every commutation relator `[u, w]` of an edge maps to the identity.
    pub fn preserves_relators(&self, g: &DefGraph) -> bool {
        g.edges()
            .all(|(u, w)| commutes(g, &self.images[u], &self.images[w]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DlsAutomorphism {
    pub splitting: Splitting,
    pub z: NormalForm,
    pub kind: DlsKind,
    pub map: GeneratorMap,
}

impl DlsAutomorphism {
    pub fn apply(&self, g: &DefGraph, x: &NormalForm) -> NormalForm {
        self.map.apply(g, x)
    }

    /// The literal accepted by [`parse_dls`].
    pub fn format(&self, g: &DefGraph) -> String {
        match &self.splitting {
            Splitting::Hnn { vertex } => {
                format!("transvection v={} z={}", g.name(*vertex), self.z.format(g))
            }
            Splitting::Amalgam { a, b, c } => format!(
                "pc A={} B={} C={} z={}",
                g.set_names(*a).join(","),
                g.set_names(*b).join(","),
                g.set_names(*c).join(","),
                self.z.format(g)
            ),
        }
    }
}

fn transvection_kind(g: &DefGraph, v: usize, z: &NormalForm) -> Result<DlsKind> {
    let link = g.link(v)?;
    let centre = link.intersection(g.perp_closed(link)?);
    if z.support().is_subset(centre) {
        Ok(DlsKind::Twist)
    } else if cyclic_reduce(g, z).core.support().is_disjoint(link) {
        Ok(DlsKind::Fold)
    } else {
        Ok(DlsKind::MixedTransvection)
    }
}

/// `v ↦ z v`, other generators fixed, for `z ∈ Z_{A_{Γ∖v}}(A_{lk v})`.
pub fn build_transvection(g: &DefGraph, v: usize, z: &NormalForm) -> Result<DlsAutomorphism> {
    g.check_vertex(v)?;
    check_letters(g, z.letters())?;
    let link = g.link(v)?;
    if z.support().contains(v) {
        return Err(Error::NotInCentralizer(format!(
            "z involves the stable letter `{}`",
            g.name(v)
        )));
    }
    for u in z.support().iter() {
        if let Some(w) = link.iter().find(|&w| w != u && !g.adjacent(u, w)) {
            return Err(Error::NotInCentralizer(format!(
                "`{}` does not commute with link generator `{}`",
                g.name(u),
                g.name(w)
            )));
        }
    }
    let kind = transvection_kind(g, v, z)?;
    let mut map = GeneratorMap::identity(g);
    map.images[v] = multiply(g, z, &NormalForm::generator(v));
    Ok(DlsAutomorphism {
        splitting: Splitting::Hnn { vertex: v },
        z: z.clone(),
        kind,
        map,
    })
}

fn check_amalgam(g: &DefGraph, a: VertexSet, b: VertexSet, c: VertexSet) -> Result<()> {
    for s in [a, b, c] {
        g.check_set(s)?;
    }
    if a.union(b) != g.all() {
        return Err(Error::NotVisualSplitting(
            "A ∪ B must be every vertex".into(),
        ));
    }
    if a.intersection(b) != c {
        return Err(Error::NotVisualSplitting("A ∩ B must equal C".into()));
    }
    if c == a || c == b {
        return Err(Error::NotVisualSplitting(
            "C equals one of the factors".into(),
        ));
    }
    for x in a.difference(c).iter() {
        if let Some(y) = b.difference(c).iter().find(|&y| g.adjacent(x, y)) {
            return Err(Error::NotVisualSplitting(format!(
                "edge {}-{} joins the two sides outside C",
                g.name(x),
                g.name(y)
            )));
        }
    }
    Ok(())
}

/// `u ↦ z u z^-1` on `Δ_B ∖ Δ_C`, identity on `Δ_A`, for
/// `z ∈ Z_{A_{Δ_A}}(A_{Δ_C})`.
pub fn build_partial_conjugation(
    g: &DefGraph,
    a: VertexSet,
    b: VertexSet,
    c: VertexSet,
    z: &NormalForm,
) -> Result<DlsAutomorphism> {
    check_amalgam(g, a, b, c)?;
    check_letters(g, z.letters())?;
    if let Some(u) = z.support().difference(a).first() {
        return Err(Error::NotInCentralizer(format!(
            "`{}` is not in A",
            g.name(u)
        )));
    }
    if let Some(w) = c
        .iter()
        .find(|&w| !commutes(g, z, &NormalForm::generator(w)))
    {
        return Err(Error::NotInCentralizer(format!(
            "z does not commute with `{}`",
            g.name(w)
        )));
    }
    let mut map = GeneratorMap::identity(g);
    for u in b.difference(c).iter() {
        map.images[u] = conjugate(g, z, &NormalForm::generator(u));
    }
    Ok(DlsAutomorphism {
        splitting: Splitting::Amalgam { a, b, c },
        z: z.clone(),
        kind: DlsKind::PartialConjugation,
        map,
    })
}

/// The automorphism built from the same splitting with `z^-1`.
pub fn inverse(g: &DefGraph, phi: &DlsAutomorphism) -> Result<DlsAutomorphism> {
    let z = invert(g, &phi.z);
    match phi.splitting {
        Splitting::Hnn { vertex } => build_transvection(g, vertex, &z),
        Splitting::Amalgam { a, b, c } => build_partial_conjugation(g, a, b, c, &z),
    }
}

pub fn compose(g: &DefGraph, phi: &DlsAutomorphism, psi: &DlsAutomorphism) -> GeneratorMap {
    phi.map.compose(g, &psi.map)
}

/// The images agree with the defining rule, edge relators map to the
/// identity, and composing with the inverse gives the identity both ways.
pub fn verify_automorphism(g: &DefGraph, phi: &DlsAutomorphism) -> bool {
    if phi.map.check(g).is_err() {
        return false;
    }
    let rebuilt = match phi.splitting {
        Splitting::Hnn { vertex } => build_transvection(g, vertex, &phi.z),
        Splitting::Amalgam { a, b, c } => build_partial_conjugation(g, a, b, c, &phi.z),
    };
    let Ok(rebuilt) = rebuilt else { return false };
    let Ok(inv) = inverse(g, phi) else {
        return false;
    };
    rebuilt.map == phi.map
        && rebuilt.kind == phi.kind
        && phi.map.preserves_relators(g)
        && inv.map.preserves_relators(g)
        && phi.map.compose(g, &inv.map).is_identity()
        && inv.map.compose(g, &phi.map).is_identity()
}

/// Parses `transvection|twist|fold|mixed v=<vertex> z=<word>` or
/// `pc A=<set> B=<set> C=<set> z=<word>`. A named transvection kind must
/// match the computed one.
pub fn parse_dls(g: &DefGraph, text: &str) -> Result<DlsAutomorphism> {
    let text = text.trim();
    let (head, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
    let requested = match head {
        "transvection" => None,
        "twist" => Some(DlsKind::Twist),
        "fold" => Some(DlsKind::Fold),
        "mixed" | "mixed_transvection" => Some(DlsKind::MixedTransvection),
        "pc" | "partial_conjugation" => {
            let fields = key_values(rest, &["A", "B", "C", "z"], "partial conjugation")?;
            let set = |k: &str| {
                get(&fields, k)
                    .ok_or_else(|| Error::Syntax(format!("missing field `{k}`")))
                    .and_then(|s| g.parse_set(s))
            };
            let z = NormalForm::parse(g, get(&fields, "z").unwrap_or("1"))?;
            return build_partial_conjugation(g, set("A")?, set("B")?, set("C")?, &z);
        }
        other => {
            return Err(Error::Syntax(format!(
                "unknown automorphism kind `{other}`"
            )))
        }
    };
    let fields = key_values(rest, &["v", "z"], "transvection")?;
    let v = g.vertex(
        get(&fields, "v")
            .ok_or_else(|| Error::Syntax("missing field `v`".into()))?
            .trim(),
    )?;
    let z = NormalForm::parse(g, get(&fields, "z").unwrap_or("1"))?;
    let phi = build_transvection(g, v, &z)?;
    match requested {
        Some(k) if k != phi.kind => Err(Error::KindMismatch {
            requested: k.as_str().into(),
            computed: phi.kind.as_str().into(),
        }),
        _ => Ok(phi),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OuterOrderReport {
    pub max_power: usize,
    /// `lengths[i][n]`: cyclic-core length of `φ^n(probes[i])`.
    pub lengths: Vec<Vec<usize>>,
    /// Index of the first probe whose lengths strictly increase.
    pub witness: Option<usize>,
}

impl OuterOrderReport {
    /// Conjugacy length is invariant under inner automorphisms, so a strictly
    /// increasing sequence shows that `φ^n` is outer for `1 ≤ n ≤ max_power`.
    pub fn certified(&self) -> bool {
        self.witness.is_some()
    }
}

pub fn outer_order_certificate(
    g: &DefGraph,
    phi: &GeneratorMap,
    probes: &[NormalForm],
    max_power: usize,
) -> Result<OuterOrderReport> {
    if probes.is_empty() {
        return Err(Error::Precondition("at least one probe is required".into()));
    }
    phi.check(g)?;
    let mut lengths = Vec::new();
    for p in probes {
        check_letters(g, p.letters())?;
        let mut x = p.clone();
        let mut row = vec![cyclic_reduce(g, &x).core.len()];
        for _ in 0..max_power {
            x = phi.apply(g, &x);
            row.push(cyclic_reduce(g, &x).core.len());
        }
        lengths.push(row);
    }
    let witness = if max_power == 0 {
        None
    } else {
        lengths
            .iter()
            .position(|row| row.windows(2).all(|w| w[0] < w[1]))
    };
    Ok(OuterOrderReport {
        max_power,
        lengths,
        witness,
    })
}
