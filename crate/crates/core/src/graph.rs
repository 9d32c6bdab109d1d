//! The defining graph and its link/star/perp calculus.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

pub const MAX_VERTICES: usize = 64;

/// A subset of the vertices of a [`DefGraph`], kept as a bitmask indexed by
/// vertex position, so iteration is always in graph order.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn from_bits(bits: u64) -> Self {
        VertexSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(1 << v)
    }

    pub fn contains(self, v: usize) -> bool {
        v < MAX_VERTICES && self.0 >> v & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        self.0 |= 1 << v;
    }

    pub fn remove(&mut self, v: usize) {
        self.0 &= !(1 << v);
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: Self) -> Self {
        VertexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        VertexSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        VertexSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    /// Least vertex in graph order.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(v)
            }
        })
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = VertexSet::EMPTY;
        for v in iter {
            set.insert(v);
        }
        set
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A finite simplicial graph. Vertex order is the declaration order and is
/// fixed for the lifetime of the graph; canonical normal forms depend on it.
#[derive(Clone, PartialEq, Eq)]
pub struct DefGraph {
    names: Vec<String>,
    adjacency: Vec<VertexSet>,
    index: HashMap<String, usize>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl DefGraph {
    pub fn new<S: AsRef<str>>(names: &[S], edges: &[(usize, usize)]) -> Result<Self> {
        if names.len() > MAX_VERTICES {
            return Err(Error::TooManyVertices(names.len()));
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            let name = name.as_ref();
            if !valid_name(name) {
                return Err(Error::Syntax(format!("invalid vertex name `{name}`")));
            }
            if index.insert(name.to_string(), i).is_some() {
                return Err(Error::Syntax(format!("duplicate vertex `{name}`")));
            }
        }
        let mut adjacency = vec![VertexSet::EMPTY; names.len()];
        for &(u, v) in edges {
            if u >= names.len() || v >= names.len() {
                return Err(Error::OutOfRange(format!("edge ({u}, {v})")));
            }
            if u == v {
                return Err(Error::Syntax(format!("loop at `{}`", names[u].as_ref())));
            }
            if adjacency[u].contains(v) {
                return Err(Error::Syntax(format!(
                    "repeated edge `{} {}`",
                    names[u].as_ref(),
                    names[v].as_ref()
                )));
            }
            adjacency[u].insert(v);
            adjacency[v].insert(u);
        }
        Ok(DefGraph {
            names: names.iter().map(|s| s.as_ref().to_string()).collect(),
            adjacency,
            index,
        })
    }

    /// Builds a graph from vertex names and named edges.
    pub fn from_edges(names: &[&str], edges: &[(&str, &str)]) -> Result<Self> {
        let lookup = |n: &str| {
            names
                .iter()
                .position(|m| *m == n)
                .ok_or_else(|| Error::UnknownVertex(n.to_string()))
        };
        let edges = edges
            .iter()
            .map(|&(u, v)| Ok((lookup(u)?, lookup(v)?)))
            .collect::<Result<Vec<_>>>()?;
        DefGraph::new(names, &edges)
    }

    /// Parses the line-oriented graph format:
    ///
    /// ```text
    /// vertices: a b c
    /// edge: a b
    /// edge: b c
    /// ```
    ///
    /// `#` starts a comment that runs to the end of the line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut names: Option<Vec<String>> = None;
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::GraphSyntax {
                line: lineno + 1,
                message,
            };
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| err(format!("expected `key: value`, found `{line}`")))?;
            match (key.trim(), &names) {
                ("vertices", None) => {
                    names = Some(rest.split_whitespace().map(str::to_string).collect());
                }
                ("vertices", Some(_)) => return Err(err("duplicate `vertices:` line".into())),
                ("edge", Some(ns)) => {
                    let ends: Vec<&str> = rest.split_whitespace().collect();
                    if ends.len() != 2 {
                        return Err(err(format!(
                            "edge needs two endpoints, found {}",
                            ends.len()
                        )));
                    }
                    let find = |n: &str| {
                        ns.iter()
                            .position(|m| m == n)
                            .ok_or_else(|| Error::UnknownVertex(n.to_string()))
                    };
                    edges.push((find(ends[0])?, find(ends[1])?));
                }
                ("edge", None) => return Err(err("`edge:` before `vertices:`".into())),
                (other, _) => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        let names = names.ok_or(Error::GraphSyntax {
            line: 0,
            message: "missing `vertices:` line".into(),
        })?;
        DefGraph::new(&names, &edges).map_err(|e| match e {
            Error::Syntax(message) => Error::GraphSyntax { line: 0, message },
            other => other,
        })
    }

    /// Canonical text form; `parse(dump())` reproduces the graph and dumping
    /// again is byte-identical.
    pub fn dump(&self) -> String {
        let mut out = String::from("vertices:");
        for name in &self.names {
            out.push(' ');
            out.push_str(name);
        }
        out.push('\n');
        for (u, v) in self.edges() {
            out.push_str(&format!("edge: {} {}\n", self.names[u], self.names[v]));
        }
        out
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).flat_map(move |u| {
            self.adjacency[u]
                .iter()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(format!("#{v}")))
        }
    }

    pub fn check_set(&self, set: VertexSet) -> Result<()> {
        if set.is_subset(self.all()) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(format!("{set:?}")))
        }
    }

    pub fn all(&self) -> VertexSet {
        if self.len() == MAX_VERTICES {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << self.len()) - 1)
        }
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].contains(v)
    }

    /// Adjacency bitmasks indexed by vertex; the hot loops read these directly.
    #[inline]
    pub fn adjacency(&self) -> &[VertexSet] {
        &self.adjacency
    }

    pub fn link(&self, v: usize) -> Result<VertexSet> {
        self.check_vertex(v)?;
        Ok(self.adjacency[v])
    }

    pub fn star(&self, v: usize) -> Result<VertexSet> {
        self.check_vertex(v)?;
        let mut st = self.adjacency[v];
        st.insert(v);
        Ok(st)
    }

    /// Common link of `set`; the full vertex set when `set` is empty.
    pub fn perp(&self, set: VertexSet) -> Result<VertexSet> {
        self.check_set(set)?;
        Ok(set
            .iter()
            .fold(self.all(), |acc, v| acc.intersection(self.adjacency[v])))
    }

    /// Common star of `set`; the full vertex set when `set` is empty.
    pub fn perp_closed(&self, set: VertexSet) -> Result<VertexSet> {
        self.check_set(set)?;
        Ok(set.iter().fold(self.all(), |acc, v| {
            let mut st = self.adjacency[v];
            st.insert(v);
            acc.intersection(st)
        }))
    }

    /// Maximal join decomposition of the subgraph induced on `set`: the
    /// connected components of the complement graph, ordered by least vertex.
    pub fn join_decomposition(&self, set: VertexSet) -> Result<Vec<VertexSet>> {
        self.check_set(set)?;
        if set.is_empty() {
            return Err(Error::EmptyVertexSet);
        }
        let mut remaining = set;
        let mut factors = Vec::new();
        while let Some(start) = remaining.first() {
            let mut component = VertexSet::singleton(start);
            let mut frontier = component;
            while !frontier.is_empty() {
                let mut next = VertexSet::EMPTY;
                for u in frontier.iter() {
                    // complement neighbours of u inside `set`
                    let non_adjacent = set.difference(self.adjacency[u]).difference(component);
                    next = next.union(non_adjacent);
                }
                next.remove_all(component);
                component = component.union(next);
                frontier = next;
            }
            remaining = remaining.difference(component);
            factors.push(component);
        }
        Ok(factors)
    }

    pub fn is_join_irreducible(&self, set: VertexSet) -> bool {
        !set.is_empty()
            && self
                .join_decomposition(set)
                .map(|f| f.len() == 1)
                .unwrap_or(false)
    }

    /// Size of a largest clique, which is the dimension of the cube complex.
    pub fn clique_number(&self) -> usize {
        fn extend(g: &DefGraph, clique: usize, candidates: VertexSet, best: &mut usize) {
            if clique + candidates.len() <= *best {
                return;
            }
            if candidates.is_empty() {
                *best = (*best).max(clique);
                return;
            }
            let mut rest = candidates;
            for v in candidates.iter() {
                extend(g, clique + 1, rest.intersection(g.adjacency[v]), best);
                rest.remove(v);
                if clique + rest.len() <= *best {
                    break;
                }
            }
        }
        let mut best = 0;
        extend(self, 0, self.all(), &mut best);
        best
    }

    pub fn format_set(&self, set: VertexSet) -> String {
        let names: Vec<&str> = set.iter().map(|v| self.name(v)).collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn set_names(&self, set: VertexSet) -> Vec<String> {
        set.iter().map(|v| self.names[v].clone()).collect()
    }

    /// Parses a comma- or space-separated list of vertex names.
    pub fn parse_set(&self, text: &str) -> Result<VertexSet> {
        let text = text.trim().trim_start_matches('{').trim_end_matches('}');
        text.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| self.vertex(s))
            .collect()
    }
}

impl VertexSet {
    fn remove_all(&mut self, other: VertexSet) {
        self.0 &= !other.0;
    }
}

impl fmt::Debug for DefGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DefGraph({})", self.dump().replace('\n', "; "))
    }
}

/// Small named graphs used throughout tests and examples.
pub mod library {
    use super::DefGraph;

    fn letters(n: usize) -> Vec<String> {
        (0..n)
            .map(|i| ((b'a' + i as u8) as char).to_string())
            .collect()
    }

    pub fn edgeless(n: usize) -> DefGraph {
        DefGraph::new(&letters(n), &[]).expect("valid graph")
    }

    pub fn complete(n: usize) -> DefGraph {
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        DefGraph::new(&letters(n), &edges).expect("valid graph")
    }

    pub fn path(n: usize) -> DefGraph {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        DefGraph::new(&letters(n), &edges).expect("valid graph")
    }

    pub fn cycle(n: usize) -> DefGraph {
        let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        edges.push((0, n - 1));
        DefGraph::new(&letters(n), &edges).expect("valid graph")
    }

    /// Every graph on `n` labelled vertices `a, b, …` (2^(n choose 2) of them).
    pub fn all_labelled(n: usize) -> Vec<DefGraph> {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        (0u64..1 << pairs.len())
            .map(|mask| {
                let edges: Vec<_> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                DefGraph::new(&letters(n), &edges).expect("valid graph")
            })
            .collect()
    }

    /// One representative per isomorphism class of graphs on `n ≤ 5` vertices.
    pub fn all_up_to_isomorphism(n: usize) -> Vec<DefGraph> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        let perms = permutations(n);
        for g in all_labelled(n) {
            let key = perms
                .iter()
                .map(|p| {
                    let mut edges: Vec<(usize, usize)> = g
                        .edges()
                        .map(|(u, v)| {
                            let (a, b) = (p[u], p[v]);
                            (a.min(b), a.max(b))
                        })
                        .collect();
                    edges.sort_unstable();
                    edges
                })
                .min()
                .unwrap_or_default();
            if seen.insert(key) {
                out.push(g);
            }
        }
        out
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for i in 0..n {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::library::*;
    use super::*;

    fn set(g: &DefGraph, s: &str) -> VertexSet {
        g.parse_set(s).unwrap()
    }

    #[test]
    fn link_examples() {
        let p = path(3);
        assert_eq!(p.link(1).unwrap(), set(&p, "a,c"));
        assert_eq!(p.link(0).unwrap(), set(&p, "b"));
        let e = edgeless(2);
        assert_eq!(e.link(0).unwrap(), VertexSet::EMPTY);
        assert!(matches!(p.link(7), Err(Error::UnknownVertex(_))));
    }

    #[test]
    fn perp_examples() {
        let p = path(3);
        assert_eq!(p.perp(set(&p, "a,c")).unwrap(), set(&p, "b"));
        let sq = cycle(4);
        assert_eq!(sq.perp(set(&sq, "a,c")).unwrap(), set(&sq, "b,d"));
        for g in [p, sq, edgeless(3)] {
            assert_eq!(g.perp(VertexSet::EMPTY).unwrap(), g.all());
            assert_eq!(g.perp_closed(VertexSet::EMPTY).unwrap(), g.all());
        }
    }

    #[test]
    fn perp_closed_splits_as_perp_plus_central_vertices() {
        for n in 1..=5 {
            for g in all_labelled(n).into_iter().step_by(7) {
                for bits in 0..1u64 << n {
                    let d = VertexSet::from_bits(bits);
                    let central: VertexSet = d
                        .iter()
                        .filter(|&c| d.is_subset(g.star(c).unwrap()))
                        .collect();
                    let perp = g.perp(d).unwrap();
                    assert!(perp.is_disjoint(central));
                    assert_eq!(g.perp_closed(d).unwrap(), perp.union(central));
                }
            }
        }
    }

    #[test]
    fn join_decomposition_examples() {
        let edge = complete(2);
        assert_eq!(
            edge.join_decomposition(edge.all()).unwrap(),
            vec![set(&edge, "a"), set(&edge, "b")]
        );
        let p = path(3);
        assert_eq!(
            p.join_decomposition(set(&p, "a,c")).unwrap(),
            vec![set(&p, "a,c")]
        );
        let sq = cycle(4);
        assert_eq!(
            sq.join_decomposition(sq.all()).unwrap(),
            vec![set(&sq, "a,c"), set(&sq, "b,d")]
        );
        assert_eq!(
            p.join_decomposition(VertexSet::EMPTY),
            Err(Error::EmptyVertexSet)
        );
    }

    #[test]
    fn galois_and_join_properties_on_small_graphs() {
        for n in 1..=5 {
            for g in all_up_to_isomorphism(n) {
                for bits in 0..1u64 << n {
                    let d = VertexSet::from_bits(bits);
                    let p = g.perp(d).unwrap();
                    assert_eq!(g.perp(g.perp(p).unwrap()).unwrap(), p);
                    for sub in 0..1u64 << n {
                        if sub & !bits == 0 {
                            let ds = VertexSet::from_bits(sub);
                            assert!(p.is_subset(g.perp(ds).unwrap()));
                        }
                    }
                    if d.is_empty() {
                        continue;
                    }
                    let factors = g.join_decomposition(d).unwrap();
                    assert_eq!(factors.iter().fold(VertexSet::EMPTY, |a, f| a.union(*f)), d);
                    for (i, f) in factors.iter().enumerate() {
                        assert_eq!(g.join_decomposition(*f).unwrap().len(), 1);
                        for h in &factors[i + 1..] {
                            assert!(f.is_disjoint(*h));
                            for u in f.iter() {
                                for v in h.iter() {
                                    assert!(g.adjacent(u, v));
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn parse_and_dump_round_trip() {
        let text = "# a path\nvertices: a b c   # three\n\nedge: c b\nedge: a b\n";
        let g = DefGraph::parse(text).unwrap();
        let dumped = g.dump();
        assert_eq!(dumped, "vertices: a b c\nedge: a b\nedge: b c\n");
        assert_eq!(DefGraph::parse(&dumped).unwrap().dump(), dumped);
        assert_eq!(DefGraph::parse(&dumped).unwrap(), g);
    }

    #[test]
    fn parse_rejects_malformed_graphs() {
        assert!(DefGraph::parse("vertices: a a\n").is_err());
        assert!(DefGraph::parse("vertices: a b\nedge: a a\n").is_err());
        assert!(DefGraph::parse("vertices: a b\nedge: a b\nedge: b a\n").is_err());
        assert!(matches!(
            DefGraph::parse("vertices: a b\nedge: a z\n"),
            Err(Error::UnknownVertex(_))
        ));
        assert!(DefGraph::parse("edge: a b\n").is_err());
        assert!(DefGraph::parse("vertices: a 1b\n").is_err());
    }

    #[test]
    fn clique_numbers() {
        assert_eq!(edgeless(3).clique_number(), 1);
        assert_eq!(path(4).clique_number(), 2);
        assert_eq!(complete(4).clique_number(), 4);
        assert_eq!(cycle(5).clique_number(), 2);
        assert_eq!(DefGraph::new::<&str>(&[], &[]).unwrap().clique_number(), 0);
    }

    #[test]
    fn isomorphism_class_counts() {
        let counts: Vec<usize> = (1..=4).map(|n| all_up_to_isomorphism(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 4, 11]);
    }
}
