use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use raagtk_core::cmp::{cmp_certify, cmp_defect, DefectOptions};
use raagtk_core::decomp::{
    classify_decent_pair, decompose_chain, decompose_good, delta_invariants, is_decent,
    HyperplanePair, PairClass,
};
use raagtk_core::dls::{
    inverse, outer_order_certificate, parse_dls, verify_automorphism, DlsAutomorphism,
};
use raagtk_core::element::{
    centralizer, gamma, is_label_irreducible, li_components, membership_centralizer, primitive_root,
};
use raagtk_core::subgroup::{intersect, member, validate, SubgroupForm};
use raagtk_core::tree::{
    almost_stabilizer, arc_stabilizer, classify_almost_stabilizer, tv_distance,
    tv_translation_length, AlmostSide, TreeArc, TreeVertex,
};
use raagtk_core::word::{env_cap, median, product, subalgebra_closure, Word, DEFAULT_CLOSURE_CAP};
use raagtk_core::{DefGraph, NormalForm, VertexSet};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(#[from] raagtk_core::Error),
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Domain(e) => e.code(),
            CliError::Io { .. } => "io",
            CliError::Usage(_) => "usage",
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub struct Report {
    pub command: String,
    pub text: Vec<String>,
    pub body: Value,
    /// `false` turns a completed run into exit code 1 (failed selftest).
    pub success: bool,
}

impl Report {
    fn new(command: &str, text: Vec<String>, body: Value) -> Self {
        Report {
            command: command.into(),
            text,
            body,
            success: true,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "raagtk",
    version,
    about = "Exact computation in right-angled Artin groups"
)]
pub struct Cli {
    /// Defining graph file (`vertices: a b c` then `edge: a b` lines).
    #[arg(long, global = true)]
    pub graph: Option<PathBuf>,
    /// Emit one JSON document instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for every sampled computation.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Inspect the defining graph.
    Graph {
        #[command(subcommand)]
        action: Option<GraphCmd>,
    },
    /// Normal form of a word.
    Normalize {
        #[arg(long)]
        word: String,
    },
    /// Product of one or more words, left to right.
    Multiply {
        #[arg(long = "word", required = true)]
        words: Vec<String>,
    },
    /// Median of three elements.
    Median {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        z: String,
    },
    /// Median closure of tuples; coordinates are separated by commas.
    Closure {
        #[arg(long = "tuple", required = true)]
        tuples: Vec<String>,
        /// Maximum number of tuples before truncating.
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Element invariants.
    Element {
        #[command(subcommand)]
        action: ElementCmd,
    },
    /// Restriction-quotient tree actions.
    Tree {
        #[command(subcommand)]
        action: TreeCmd,
    },
    /// Parabolic and semi-parabolic subgroups.
    Subgroup {
        #[command(subcommand)]
        action: SubgroupCmd,
    },
    /// DLS automorphisms.
    Dls {
        #[command(subcommand)]
        action: DlsCmd,
    },
    /// Coarse-median preservation.
    Cmp {
        #[command(subcommand)]
        action: CmpCmd,
    },
    /// Geodesic decompositions and decent pairs.
    Decomp {
        #[command(subcommand)]
        action: DecompCmd,
    },
    /// Run the oracle-backed acceptance suite.
    Selftest {
        /// Run only these criteria (1-based).
        #[arg(long = "criterion")]
        criteria: Vec<usize>,
    },
}

#[derive(Subcommand, Debug)]
pub enum GraphCmd {
    /// Summary: vertices, edges, links, clique number, join factors.
    Info,
    /// Canonical text form.
    Dump,
}

#[derive(Args, Debug)]
pub struct WordArg {
    #[arg(long)]
    word: String,
}

#[derive(Subcommand, Debug)]
pub enum ElementCmd {
    /// Labels on an axis.
    Gamma(WordArg),
    /// Label-irreducible components.
    Li(WordArg),
    /// Primitive root and exponent.
    Root(WordArg),
    /// Centralizer normal form, optionally testing membership.
    Centralizer {
        #[arg(long)]
        word: String,
        #[arg(long)]
        member: Option<String>,
    },
}

#[derive(Args, Debug)]
pub struct ArcArgs {
    /// Vertex `v` of the tree `T_v`.
    #[arg(long)]
    vertex: String,
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
}

#[derive(Subcommand, Debug)]
pub enum TreeCmd {
    /// Distance between the vertices `x A` and `y A` of `T_v`.
    Dist(ArcArgs),
    /// Translation length in `T_v`.
    Length {
        #[arg(long)]
        vertex: String,
        #[arg(long)]
        word: String,
    },
    /// Pointwise stabilizer of an arc.
    Stab(ArcArgs),
    /// Elements of a ball moving both arc endpoints at most `delta`.
    AlmostStab {
        #[command(flatten)]
        arc: ArcArgs,
        #[arg(long)]
        delta: usize,
        #[arg(long, default_value_t = 4)]
        radius: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum SubgroupCmd {
    Validate {
        #[arg(long)]
        subgroup: String,
    },
    Member {
        #[arg(long)]
        subgroup: String,
        #[arg(long)]
        word: String,
    },
    Intersect {
        #[arg(long = "subgroup", num_args = 1, required = true)]
        subgroups: Vec<String>,
        #[arg(long, default_value_t = 4)]
        radius: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum DlsCmd {
    /// Build, verify and invert an automorphism.
    Build {
        #[arg(long)]
        dls: String,
    },
    /// Image of a word.
    Apply {
        #[arg(long)]
        dls: String,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 1)]
        power: u32,
    },
    /// Certificate that no power up to `max-power` is inner.
    Certify {
        #[arg(long)]
        dls: String,
        /// Probe words; defaults to the generators.
        #[arg(long = "probe")]
        probes: Vec<String>,
        #[arg(long, default_value_t = 8)]
        max_power: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum CmpCmd {
    /// Largest median defect over a ball.
    Defect {
        #[arg(long)]
        dls: String,
        #[arg(long)]
        radius: usize,
        /// Scan this many random triples instead of all of them.
        #[arg(long)]
        sample: Option<usize>,
    },
    /// Verdict from the sufficient conditions, falling back to defect probes.
    Certify {
        #[arg(long)]
        dls: String,
        #[arg(long)]
        sample: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
pub enum DecompCmd {
    /// Decency and good decomposition of a geodesic.
    Good(WordArg),
    /// Chain decomposition of an arc of `T_v`.
    Chain(ArcArgs),
    /// Double-centralizer class of the pair realized by a word.
    Classify(WordArg),
}

pub fn run(cli: &Cli) -> Result<Report> {
    if let Command::Selftest { criteria } = &cli.command {
        return selftest(cli.seed, criteria);
    }
    let path = cli
        .graph
        .as_ref()
        .ok_or_else(|| CliError::Usage("--graph is required for this command".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let g = DefGraph::parse(&text)?;
    let g = &g;
    match &cli.command {
        Command::Graph { action } => graph(g, action.as_ref().unwrap_or(&GraphCmd::Info)),
        Command::Normalize { word } => {
            let w = Word::parse(g, word)?;
            let nf = NormalForm::parse(g, word)?;
            let f = nf.format(g);
            Ok(Report::new(
                "normalize",
                vec![f.clone()],
                json!({ "input_length": w.len(), "normal_form": f, "length": nf.len() }),
            ))
        }
        Command::Multiply { words } => {
            let xs = words
                .iter()
                .map(|w| NormalForm::parse(g, w))
                .collect::<raagtk_core::Result<Vec<_>>>()?;
            let refs: Vec<&NormalForm> = xs.iter().collect();
            let p = product(g, &refs);
            let f = p.format(g);
            Ok(Report::new(
                "multiply",
                vec![f.clone()],
                json!({ "product": f, "length": p.len() }),
            ))
        }
        Command::Median { x, y, z } => {
            let m = median(
                g,
                &NormalForm::parse(g, x)?,
                &NormalForm::parse(g, y)?,
                &NormalForm::parse(g, z)?,
            );
            let f = m.format(g);
            Ok(Report::new(
                "median",
                vec![f.clone()],
                json!({ "median": f }),
            ))
        }
        Command::Closure { tuples, cap } => closure(g, tuples, *cap),
        Command::Element { action } => element(g, action),
        Command::Tree { action } => tree(g, action),
        Command::Subgroup { action } => subgroup(g, action),
        Command::Dls { action } => dls(g, action),
        Command::Cmp { action } => cmp(g, action, cli.seed),
        Command::Decomp { action } => decomp(g, action),
        Command::Selftest { .. } => unreachable!("handled above"),
    }
}

fn fmt_all(g: &DefGraph, xs: &[NormalForm]) -> Vec<String> {
    xs.iter().map(|x| x.format(g)).collect()
}

fn set(g: &DefGraph, s: VertexSet) -> Vec<String> {
    g.set_names(s)
}

fn graph(g: &DefGraph, action: &GraphCmd) -> Result<Report> {
    match action {
        GraphCmd::Dump => {
            let d = g.dump();
            Ok(Report::new(
                "graph dump",
                d.lines().map(str::to_string).collect(),
                json!({ "dump": d }),
            ))
        }
        GraphCmd::Info => {
            let edges: Vec<[&str; 2]> = g.edges().map(|(u, v)| [g.name(u), g.name(v)]).collect();
            let joins: Vec<Vec<String>> = g
                .join_decomposition(g.all())?
                .into_iter()
                .map(|f| set(g, f))
                .collect();
            let mut links = serde_json::Map::new();
            let mut text = vec![
                format!("vertices: {}", g.names().join(" ")),
                format!("edges: {}", edges.len()),
                format!("clique_number: {}", g.clique_number()),
                format!(
                    "join_factors: {}",
                    joins
                        .iter()
                        .map(|f| f.join(","))
                        .collect::<Vec<_>>()
                        .join(" | ")
                ),
            ];
            for v in 0..g.len() {
                let l = set(g, g.link(v)?);
                text.push(format!("lk {}: {}", g.name(v), l.join(",")));
                links.insert(g.name(v).to_string(), json!(l));
            }
            Ok(Report::new(
                "graph info",
                text,
                json!({
                    "vertices": g.names(),
                    "edges": edges,
                    "clique_number": g.clique_number(),
                    "join_factors": joins,
                    "links": links,
                }),
            ))
        }
    }
}

fn closure(g: &DefGraph, tuples: &[String], cap: Option<usize>) -> Result<Report> {
    let seeds = tuples
        .iter()
        .map(|t| {
            t.split(',')
                .map(|w| NormalForm::parse(g, w.trim()))
                .collect::<raagtk_core::Result<Vec<_>>>()
        })
        .collect::<raagtk_core::Result<Vec<_>>>()?;
    let cap = cap.unwrap_or_else(|| env_cap(DEFAULT_CLOSURE_CAP));
    let c = subalgebra_closure(g, &seeds, cap)?;
    let rows: Vec<String> = c
        .elements
        .iter()
        .map(|t| fmt_all(g, t).join(", "))
        .collect();
    let mut text = vec![
        format!("size: {}", c.elements.len()),
        format!("truncated: {}", c.truncated),
    ];
    text.extend(rows.iter().cloned());
    let arr: Vec<Vec<String>> = c.elements.iter().map(|t| fmt_all(g, t)).collect();
    Ok(Report::new(
        "closure",
        text,
        json!({ "size": c.elements.len(), "truncated": c.truncated, "elements": arr }),
    ))
}

fn element(g: &DefGraph, action: &ElementCmd) -> Result<Report> {
    match action {
        ElementCmd::Gamma(WordArg { word }) => {
            let x = NormalForm::parse(g, word)?;
            let s = set(g, gamma(g, &x));
            let irr = !x.is_identity() && is_label_irreducible(g, &x);
            Ok(Report::new(
                "element gamma",
                vec![
                    format!("gamma: {}", s.join(",")),
                    format!("label_irreducible: {irr}"),
                ],
                json!({ "gamma": s, "label_irreducible": irr }),
            ))
        }
        ElementCmd::Li(WordArg { word }) => {
            let x = NormalForm::parse(g, word)?;
            let d = li_components(g, &x)?;
            let comps = fmt_all(g, &d.components);
            let sups: Vec<Vec<String>> = d.supports.iter().map(|&s| set(g, s)).collect();
            let text = comps
                .iter()
                .zip(&sups)
                .map(|(c, s)| format!("{c}  [{}]", s.join(",")))
                .collect();
            Ok(Report::new(
                "element li",
                text,
                json!({ "components": comps, "supports": sups }),
            ))
        }
        ElementCmd::Root(WordArg { word }) => {
            let x = NormalForm::parse(g, word)?;
            let (r, n) = primitive_root(g, &x)?;
            let f = r.format(g);
            Ok(Report::new(
                "element root",
                vec![format!("root: {f}"), format!("exponent: {n}")],
                json!({ "root": f, "exponent": n }),
            ))
        }
        ElementCmd::Centralizer { word, member } => {
            let x = NormalForm::parse(g, word)?;
            let cf = centralizer(g, &x)?;
            let conj = cf.conjugator.format(g);
            let roots = fmt_all(g, &cf.cyclic_roots);
            let sup = set(g, cf.parabolic_support);
            let mut text = vec![
                format!("conjugator: {conj}"),
                format!("cyclic_roots: {}", roots.join(",")),
                format!("parabolic_support: {}", sup.join(",")),
            ];
            let mut body =
                json!({ "conjugator": conj, "cyclic_roots": roots, "parabolic_support": sup });
            if let Some(h) = member {
                let h = NormalForm::parse(g, h)?;
                let m = membership_centralizer(g, &cf, &h)?;
                text.push(format!("member: {m}"));
                body["member"] = json!(m);
            }
            Ok(Report::new("element centralizer", text, body))
        }
    }
}

fn arc(g: &DefGraph, a: &ArcArgs) -> Result<(usize, NormalForm, NormalForm)> {
    Ok((
        g.vertex(a.vertex.trim())?,
        NormalForm::parse(g, &a.x)?,
        NormalForm::parse(g, &a.y)?,
    ))
}

fn tree_vertex_json(g: &DefGraph, p: &TreeVertex) -> String {
    p.coset.format(g)
}

fn subgroup_json(g: &DefGraph, s: &SubgroupForm) -> Value {
    json!({
        "kind": s.kind.to_string(),
        "conjugator": s.conjugator.format(g),
        "roots": fmt_all(g, &s.abelian_roots),
        "support": set(g, s.support),
        "literal": s.format(g),
    })
}

fn tree(g: &DefGraph, action: &TreeCmd) -> Result<Report> {
    match action {
        TreeCmd::Dist(a) => {
            let (v, x, y) = arc(g, a)?;
            let d = tv_distance(g, v, &x, &y)?;
            Ok(Report::new(
                "tree dist",
                vec![d.to_string()],
                json!({ "distance": d }),
            ))
        }
        TreeCmd::Length { vertex, word } => {
            let v = g.vertex(vertex.trim())?;
            let x = NormalForm::parse(g, word)?;
            let l = tv_translation_length(g, v, &x)?;
            let kind = if l == 0 { "elliptic" } else { "loxodromic" };
            Ok(Report::new(
                "tree length",
                vec![format!("translation_length: {l}"), format!("type: {kind}")],
                json!({ "translation_length": l, "type": kind }),
            ))
        }
        TreeCmd::Stab(a) => {
            let (v, x, y) = arc(g, a)?;
            let arc = TreeArc::new(g, v, &x, &y)?;
            let s = arc_stabilizer(g, &arc);
            Ok(Report::new(
                "tree stab",
                vec![format!("length: {}", arc.len(g)), s.format(g)],
                json!({ "length": arc.len(g), "stabilizer": subgroup_json(g, &s) }),
            ))
        }
        TreeCmd::AlmostStab {
            arc: a,
            delta,
            radius,
        } => {
            let (v, x, y) = arc(g, a)?;
            let arc = TreeArc::new(g, v, &x, &y)?;
            let d = almost_stabilizer(g, &arc, *delta, *radius)?;
            let elems = fmt_all(g, &d);
            let mut text = vec![
                format!("length: {}", arc.len(g)),
                format!("size: {}", d.len()),
            ];
            let mut body = json!({ "length": arc.len(g), "delta": delta, "radius": radius, "elements": elems });
            let r = g.clique_number();
            if delta * (4 * r + 2) <= arc.len(g) {
                let rep = classify_almost_stabilizer(g, &arc, *delta, &d)?;
                let sides: Vec<Value> = rep
                    .sides
                    .iter()
                    .map(|s| match s {
                        AlmostSide::Fixes => json!("fixes"),
                        AlmostSide::Axial { power } => json!({ "axial": power }),
                    })
                    .collect();
                let dir = rep.direction.as_ref().map(|h| h.format(g));
                text.push(format!("case: {}", rep.case()));
                text.push(format!(
                    "direction: {}",
                    dir.clone().unwrap_or_else(|| "-".into())
                ));
                text.push(format!("holds: {}", rep.holds()));
                for (e, s) in elems.iter().zip(&rep.sides) {
                    let s = match s {
                        AlmostSide::Fixes => "fixes".to_string(),
                        AlmostSide::Axial { power } => format!("axial {power}"),
                    };
                    text.push(format!("{e}  {s}"));
                }
                body["dichotomy"] = json!({
                    "case": rep.case(),
                    "holds": rep.holds(),
                    "direction": dir,
                    "shrunk": [tree_vertex_json(g, &rep.shrunk.0), tree_vertex_json(g, &rep.shrunk.1)],
                    "sides": sides,
                    "violations": rep.violations,
                });
            } else {
                text.extend(elems.iter().cloned());
                body["dichotomy"] = Value::Null;
            }
            Ok(Report::new("tree almost-stab", text, body))
        }
    }
}

fn subgroup(g: &DefGraph, action: &SubgroupCmd) -> Result<Report> {
    match action {
        SubgroupCmd::Validate { subgroup } => {
            let s = SubgroupForm::parse(g, subgroup)?;
            let (valid, diag) = match validate(g, &s) {
                Ok(()) => (true, None),
                Err(d) => (false, Some(d)),
            };
            let mut text = vec![format!("valid: {valid}")];
            text.extend(diag.clone());
            Ok(Report::new(
                "subgroup validate",
                text,
                json!({ "valid": valid, "diagnostic": diag, "subgroup": subgroup_json(g, &s) }),
            ))
        }
        SubgroupCmd::Member { subgroup, word } => {
            let s = SubgroupForm::parse(g, subgroup)?;
            let m = member(g, &s, &NormalForm::parse(g, word)?)?;
            Ok(Report::new(
                "subgroup member",
                vec![m.to_string()],
                json!({ "member": m }),
            ))
        }
        SubgroupCmd::Intersect { subgroups, radius } => {
            if subgroups.len() != 2 {
                return Err(CliError::Usage(
                    "intersect needs exactly two --subgroup arguments".into(),
                ));
            }
            let a = SubgroupForm::parse(g, &subgroups[0])?;
            let b = SubgroupForm::parse(g, &subgroups[1])?;
            let s = intersect(g, &a, &b, *radius)?;
            Ok(Report::new(
                "subgroup intersect",
                vec![s.format(g)],
                json!({ "radius": radius, "intersection": subgroup_json(g, &s) }),
            ))
        }
    }
}

fn images(g: &DefGraph, phi: &DlsAutomorphism) -> (Vec<String>, serde_json::Map<String, Value>) {
    let mut text = Vec::new();
    let mut map = serde_json::Map::new();
    for (v, img) in phi.map.images.iter().enumerate() {
        text.push(format!("{} -> {}", g.name(v), img.format(g)));
        map.insert(g.name(v).to_string(), json!(img.format(g)));
    }
    (text, map)
}

fn dls(g: &DefGraph, action: &DlsCmd) -> Result<Report> {
    match action {
        DlsCmd::Build { dls } => {
            let phi = parse_dls(g, dls)?;
            let inv = inverse(g, &phi)?;
            let ok = verify_automorphism(g, &phi);
            let (mut text, map) = images(g, &phi);
            text.insert(0, format!("kind: {}", phi.kind.as_str()));
            text.insert(1, format!("automorphism: {}", phi.format(g)));
            text.push(format!("inverse: {}", inv.format(g)));
            text.push(format!("verified: {ok}"));
            Ok(Report::new(
                "dls build",
                text,
                json!({
                    "kind": phi.kind.as_str(),
                    "automorphism": phi.format(g),
                    "images": map,
                    "inverse": inv.format(g),
                    "verified": ok,
                }),
            ))
        }
        DlsCmd::Apply { dls, word, power } => {
            let phi = parse_dls(g, dls)?;
            let mut x = NormalForm::parse(g, word)?;
            for _ in 0..*power {
                x = phi.apply(g, &x);
            }
            let f = x.format(g);
            Ok(Report::new(
                "dls apply",
                vec![f.clone()],
                json!({ "power": power, "image": f }),
            ))
        }
        DlsCmd::Certify {
            dls,
            probes,
            max_power,
        } => {
            let phi = parse_dls(g, dls)?;
            let probes: Vec<NormalForm> = if probes.is_empty() {
                (0..g.len()).map(NormalForm::generator).collect()
            } else {
                probes
                    .iter()
                    .map(|p| NormalForm::parse(g, p))
                    .collect::<raagtk_core::Result<_>>()?
            };
            let rep = outer_order_certificate(g, &phi.map, &probes, *max_power)?;
            let names = fmt_all(g, &probes);
            let mut text = vec![format!("certified: {}", rep.certified())];
            for (p, ls) in names.iter().zip(&rep.lengths) {
                let ls: Vec<String> = ls.iter().map(usize::to_string).collect();
                text.push(format!("{p}: {}", ls.join(" ")));
            }
            let witness = rep.witness.map(|i| names[i].clone());
            Ok(Report::new(
                "dls certify",
                text,
                json!({
                    "certified": rep.certified(),
                    "max_power": rep.max_power,
                    "probes": names,
                    "lengths": rep.lengths,
                    "witness": witness,
                }),
            ))
        }
    }
}

fn cmp(g: &DefGraph, action: &CmpCmd, seed: u64) -> Result<Report> {
    let opts = |sample: Option<usize>| DefectOptions {
        sample,
        seed,
        ..DefectOptions::default()
    };
    match action {
        CmpCmd::Defect {
            dls,
            radius,
            sample,
        } => {
            let phi = parse_dls(g, dls)?;
            let r = cmp_defect(g, &phi.map, *radius, opts(*sample))?;
            let w = [
                r.witness.0.format(g),
                r.witness.1.format(g),
                r.witness.2.format(g),
            ];
            Ok(Report::new(
                "cmp defect",
                vec![
                    format!("defect: {}", r.defect),
                    format!("ball_size: {}", r.ball_size),
                    format!("witness: x={} y={} p={}", w[0], w[1], w[2]),
                ],
                json!({
                    "radius": r.radius,
                    "defect": r.defect,
                    "ball_size": r.ball_size,
                    "witness": { "x": w[0], "y": w[1], "p": w[2] },
                    "sampled": r.sampled,
                }),
            ))
        }
        CmpCmd::Certify { dls, sample } => {
            let phi = parse_dls(g, dls)?;
            let c = cmp_certify(g, &phi, opts(*sample))?;
            let mut text = vec![format!("verdict: {}", c.verdict.as_str())];
            text.extend(c.trace.iter().cloned());
            for (r, d) in &c.defects {
                text.push(format!("defect R={r}: {d}"));
            }
            let defects: Vec<Value> = c
                .defects
                .iter()
                .map(|(r, d)| json!({ "radius": r, "defect": d }))
                .collect();
            Ok(Report::new(
                "cmp certify",
                text,
                json!({ "verdict": c.verdict.as_str(), "kind": phi.kind.as_str(), "trace": c.trace, "defects": defects }),
            ))
        }
    }
}

fn decomp(g: &DefGraph, action: &DecompCmd) -> Result<Report> {
    match action {
        DecompCmd::Good(WordArg { word }) => {
            let w = Word::parse(g, word)?;
            let alpha = w.letters();
            let dec = is_decent(g, alpha)?;
            let d = decompose_good(g, alpha)?;
            let pieces: Vec<Value> = d
                .pieces
                .iter()
                .map(|p| {
                    json!({
                        "start": p.start,
                        "end": p.end,
                        "kind": p.kind.as_str(),
                        "word": raagtk_core::word::format_letters(g, &alpha[p.start..p.end]),
                    })
                })
                .collect();
            let witnesses: Vec<Value> = dec
                .witnesses
                .iter()
                .map(|&(v, i, j)| json!({ "label": g.name(v), "from": i, "to": j }))
                .collect();
            let mut text = vec![
                format!("decent: {}", dec.decent),
                format!("pieces: {} (bound {})", d.pieces.len(), d.bound),
            ];
            for p in &d.pieces {
                text.push(format!(
                    "[{}, {}] {} {}",
                    p.start,
                    p.end,
                    p.kind.as_str(),
                    raagtk_core::word::format_letters(g, &alpha[p.start..p.end])
                ));
            }
            Ok(Report::new(
                "decomp good",
                text,
                json!({
                    "decent": dec.decent,
                    "witnesses": witnesses,
                    "missing": dec.missing.iter().map(|&v| g.name(v)).collect::<Vec<_>>(),
                    "bound": d.bound.to_string(),
                    "within_bound": d.within_bound(),
                    "pieces": pieces,
                }),
            ))
        }
        DecompCmd::Chain(a) => {
            let (v, x, y) = arc(g, a)?;
            let arc = TreeArc::new(g, v, &x, &y)?;
            let r = decompose_chain(g, &arc)?;
            let c = r.constants;
            let checks: serde_json::Map<String, Value> = r
                .checks
                .iter()
                .map(|(k, ok)| (k.to_string(), json!(ok)))
                .collect();
            let mut text = vec![
                format!("length: {}", r.length),
                format!("s: {}", r.s()),
                format!("mu_lengths: {:?}", r.mu_lengths),
                format!("nu_lengths: {:?}", r.nu_lengths),
                format!(
                    "constants: N_q={} gap={} count={} L={}",
                    c.n_q, c.gap, c.count, c.l
                ),
            ];
            for (k, ok) in &r.checks {
                text.push(format!("check {k}: {ok}"));
            }
            Ok(Report::new(
                "decomp chain",
                text,
                json!({
                    "label": g.name(r.label),
                    "length": r.length,
                    "s": r.s(),
                    "mu_lengths": r.mu_lengths,
                    "nu_lengths": r.nu_lengths,
                    "pairs": r.links.len(),
                    "constants": {
                        "q": c.q,
                        "n_q": c.n_q.to_string(),
                        "gap": c.gap.to_string(),
                        "count": c.count.to_string(),
                        "l": c.l.to_string(),
                    },
                    "checks": checks,
                    "all_checks_pass": r.all_checks_pass(),
                }),
            ))
        }
        DecompCmd::Classify(WordArg { word }) => {
            let w = Word::parse(g, word)?;
            let pair = HyperplanePair::from_word(g, w.letters())?;
            let inv = delta_invariants(&pair);
            let between: serde_json::Map<String, Value> = inv
                .between
                .iter()
                .map(|(&v, &n)| (g.name(v).to_string(), json!(n)))
                .collect();
            let mut text = vec![
                format!("u: {}", pair.u.format(g)),
                format!("w: {}", pair.w.format(g)),
                format!("delta: {}", set(g, inv.delta).join(",")),
            ];
            let mut body = json!({
                "u": pair.u.format(g),
                "w": pair.w.format(g),
                "delta": set(g, inv.delta),
                "between": between,
            });
            match classify_decent_pair(g, &pair)? {
                PairClass::Centralizer { stabilizer } => {
                    text.push("class: centralizer_case".into());
                    text.push(format!("stabilizer: {}", stabilizer.format(g)));
                    body["class"] = json!("centralizer_case");
                    body["stabilizer"] = subgroup_json(g, &stabilizer);
                }
                PairClass::Cyclic {
                    stabilizer,
                    g: x,
                    skewered,
                    total,
                } => {
                    text.push("class: cyclic_case".into());
                    text.push(format!("g: {}", x.format(g)));
                    text.push(format!("stabilizer: {}", stabilizer.format(g)));
                    text.push(format!("skewered: {skewered}/{total}"));
                    body["class"] = json!("cyclic_case");
                    body["g"] = json!(x.format(g));
                    body["stabilizer"] = subgroup_json(g, &stabilizer);
                    body["skewered"] = json!(skewered);
                    body["total"] = json!(total);
                }
            }
            Ok(Report::new("decomp classify", text, body))
        }
    }
}

fn selftest(seed: u64, only: &[usize]) -> Result<Report> {
    use raagtk_verify::criteria::{run, CRITERIA};
    let ids: Vec<usize> = if only.is_empty() {
        (1..=CRITERIA.len()).collect()
    } else {
        only.to_vec()
    };
    if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > CRITERIA.len()) {
        return Err(CliError::Usage(format!(
            "no criterion {bad}; criteria are 1..={}",
            CRITERIA.len()
        )));
    }
    let outcomes: Vec<_> = ids.iter().map(|&i| run(i, seed)).collect();
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let mut text: Vec<String> = outcomes.iter().map(|o| o.line(false)).collect();
    text.push(format!("{passed} of {} criteria passed", outcomes.len()));
    let list: Vec<Value> = outcomes
        .iter()
        .map(|o| json!({ "id": o.id, "name": o.name, "passed": o.passed, "detail": o.detail }))
        .collect();
    let all = passed == outcomes.len();
    let mut rep = Report::new(
        "selftest",
        text,
        json!({ "seed": seed, "passed": all, "criteria": list }),
    );
    rep.success = all;
    Ok(rep)
}
