//! Relational structures, their hypergraphs, and a brute-force homomorphism
//! oracle.
//!
//! Elements are interned: a [`Structure`] keeps its universe as an ordered
//! list of string ids and stores tuples as index vectors into that list. The
//! universe order is the file order and fixes every iteration order below.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::report::ValidationReport;
use crate::{Error, Result};

pub type Tuple = Vec<usize>;

/// Default node budget for the backtracking oracle.
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelSymbol {
    pub name: String,
    pub arity: usize,
}

impl RelSymbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Self { name: name.into(), arity }
    }
}

/// On-disk form of a structure. Ids are strings; nothing is validated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureFile {
    pub signature: Vec<RelSymbol>,
    pub universe: Vec<String>,
    pub relations: IndexMap<String, Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StructureViolation {
    DuplicateSymbol(String),
    ZeroArity(String),
    DuplicateElement(String),
    UnknownRelation(String),
    ArityMismatch { rel: String, tuple: Vec<String>, expected: usize },
    DanglingElement { rel: String, element: String },
    DuplicateTuple { rel: String, tuple: Vec<String> },
}

impl fmt::Display for StructureViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DuplicateSymbol(r) => write!(f, "relation symbol `{r}` declared twice"),
            Self::ZeroArity(r) => write!(f, "relation `{r}` has arity 0"),
            Self::DuplicateElement(e) => write!(f, "element `{e}` listed twice in universe"),
            Self::UnknownRelation(r) => write!(f, "relation `{r}` not in signature"),
            Self::ArityMismatch { rel, tuple, expected } => {
                write!(f, "{rel}({}) has arity {}, expected {expected}", tuple.join(","), tuple.len())
            }
            Self::DanglingElement { rel, element } => {
                write!(f, "{rel} mentions unknown element `{element}`")
            }
            Self::DuplicateTuple { rel, tuple } => {
                write!(f, "{rel}({}) listed twice", tuple.join(","))
            }
        }
    }
}

/// Checks a raw structure against the invariants of [`Structure`].
pub fn validate_structure(raw: &StructureFile) -> ValidationReport<StructureViolation> {
    let mut rep = ValidationReport::new();
    let mut arity: HashMap<&str, usize> = HashMap::new();
    for sym in &raw.signature {
        if arity.insert(&sym.name, sym.arity).is_some() {
            rep.push(StructureViolation::DuplicateSymbol(sym.name.clone()));
        }
        if sym.arity == 0 {
            rep.push(StructureViolation::ZeroArity(sym.name.clone()));
        }
    }
    let mut elems = HashSet::new();
    for e in &raw.universe {
        if !elems.insert(e.as_str()) {
            rep.push(StructureViolation::DuplicateElement(e.clone()));
        }
    }
    for (name, tuples) in &raw.relations {
        let Some(&ar) = arity.get(name.as_str()) else {
            rep.push(StructureViolation::UnknownRelation(name.clone()));
            continue;
        };
        let mut seen = HashSet::new();
        for t in tuples {
            if t.len() != ar {
                rep.push(StructureViolation::ArityMismatch {
                    rel: name.clone(),
                    tuple: t.clone(),
                    expected: ar,
                });
            }
            for e in t {
                if !elems.contains(e.as_str()) {
                    rep.push(StructureViolation::DanglingElement {
                        rel: name.clone(),
                        element: e.clone(),
                    });
                }
            }
            if !seen.insert(t) {
                rep.push(StructureViolation::DuplicateTuple { rel: name.clone(), tuple: t.clone() });
            }
        }
    }
    rep
}

/// A finite relational structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    signature: Vec<RelSymbol>,
    universe: Vec<String>,
    index: HashMap<String, usize>,
    relations: Vec<Vec<Tuple>>,
}

impl Structure {
    /// Builds a structure from named tuples, rejecting anything that
    /// [`validate_structure`] would flag.
    pub fn from_file(raw: &StructureFile) -> Result<Self> {
        let rep = validate_structure(raw);
        if !rep.is_ok() {
            return Err(Error::InvalidStructure(rep.to_string()));
        }
        let index: HashMap<String, usize> =
            raw.universe.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let relations = raw
            .signature
            .iter()
            .map(|sym| {
                raw.relations
                    .get(&sym.name)
                    .map(|ts| ts.iter().map(|t| t.iter().map(|e| index[e]).collect()).collect())
                    .unwrap_or_default()
            })
            .collect();
        Ok(Self { signature: raw.signature.clone(), universe: raw.universe.clone(), index, relations })
    }

    /// Builds a structure from index tuples. Fails on out-of-range indices,
    /// arity mismatches and duplicates.
    pub fn new(
        signature: Vec<RelSymbol>,
        universe: Vec<String>,
        relations: Vec<Vec<Tuple>>,
    ) -> Result<Self> {
        if relations.len() != signature.len() {
            return Err(Error::InvalidStructure(format!(
                "{} relation lists for {} symbols",
                relations.len(),
                signature.len()
            )));
        }
        let s = Self::new_unchecked(signature, universe, relations);
        let rep = validate_structure(&s.to_file_lossy());
        if !rep.is_ok() {
            return Err(Error::InvalidStructure(rep.to_string()));
        }
        for (sym, ts) in s.signature.iter().zip(&s.relations) {
            for t in ts {
                if t.iter().any(|&e| e >= s.universe.len()) {
                    return Err(Error::InvalidStructure(format!("{} has out-of-range index", sym.name)));
                }
            }
        }
        Ok(s)
    }

    pub(crate) fn new_unchecked(
        signature: Vec<RelSymbol>,
        universe: Vec<String>,
        relations: Vec<Vec<Tuple>>,
    ) -> Self {
        let index = universe.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        Self { signature, universe, index, relations }
    }

    fn to_file_lossy(&self) -> StructureFile {
        let name = |e: usize| self.universe.get(e).cloned().unwrap_or_else(|| format!("#{e}"));
        StructureFile {
            signature: self.signature.clone(),
            universe: self.universe.clone(),
            relations: self
                .signature
                .iter()
                .zip(&self.relations)
                .map(|(sym, ts)| {
                    (sym.name.clone(), ts.iter().map(|t| t.iter().map(|&e| name(e)).collect()).collect())
                })
                .collect(),
        }
    }

    pub fn to_file(&self) -> StructureFile {
        self.to_file_lossy()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: StructureFile = serde_json::from_str(text)?;
        Self::from_file(&raw)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("structure serializes")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    pub fn signature(&self) -> &[RelSymbol] {
        &self.signature
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn element(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.signature.iter().position(|s| s.name == name)
    }

    pub fn relation(&self, i: usize) -> &[Tuple] {
        &self.relations[i]
    }

    pub fn relation_by_name(&self, name: &str) -> Option<&[Tuple]> {
        self.relation_index(name).map(|i| self.relations[i].as_slice())
    }

    pub fn relations(&self) -> impl Iterator<Item = (&RelSymbol, &[Tuple])> {
        self.signature.iter().zip(self.relations.iter().map(|v| v.as_slice()))
    }

    /// ‖A‖: total number of tuples.
    pub fn size(&self) -> usize {
        self.relations.iter().map(Vec::len).sum()
    }

    pub fn arity(&self) -> usize {
        self.signature.iter().map(|s| s.arity).max().unwrap_or(0)
    }

    /// Same signature and universe, with each relation filtered by `keep`.
    pub fn filter_tuples(&self, mut keep: impl FnMut(usize, &Tuple) -> bool) -> Structure {
        let relations = self
            .relations
            .iter()
            .enumerate()
            .map(|(r, ts)| ts.iter().filter(|t| keep(r, t)).cloned().collect())
            .collect();
        Self::new_unchecked(self.signature.clone(), self.universe.clone(), relations)
    }

    pub fn hypergraph(&self) -> Hypergraph {
        hypergraph_of(self)
    }

    pub fn names_of(&self, t: &[usize]) -> Vec<String> {
        t.iter().map(|&e| self.universe[e].clone()).collect()
    }
}

/// Incremental construction of a structure by element names.
#[derive(Default, Debug, Clone)]
pub struct StructureBuilder {
    signature: Vec<RelSymbol>,
    universe: Vec<String>,
    index: HashMap<String, usize>,
    relations: Vec<Vec<Tuple>>,
    seen: Vec<HashSet<Tuple>>,
}

impl StructureBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn relation(mut self, name: &str, arity: usize) -> Self {
        self.declare(name, arity);
        self
    }

    pub fn declare(&mut self, name: &str, arity: usize) -> usize {
        if let Some(i) = self.signature.iter().position(|s| s.name == name) {
            return i;
        }
        self.signature.push(RelSymbol::new(name, arity));
        self.relations.push(Vec::new());
        self.seen.push(HashSet::new());
        self.signature.len() - 1
    }

    pub fn element(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.universe.push(name.to_string());
        self.index.insert(name.to_string(), self.universe.len() - 1);
        self.universe.len() - 1
    }

    pub fn elements<S: AsRef<str>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        for n in names {
            self.element(n.as_ref());
        }
        self
    }

    /// Adds a tuple, interning unseen elements. Duplicate tuples are ignored.
    pub fn add(&mut self, rel: &str, tuple: &[&str]) -> Result<()> {
        let r = self
            .signature
            .iter()
            .position(|s| s.name == rel)
            .ok_or_else(|| Error::InvalidStructure(format!("undeclared relation `{rel}`")))?;
        if self.signature[r].arity != tuple.len() {
            return Err(Error::InvalidStructure(format!(
                "{rel} has arity {}, got {} coordinates",
                self.signature[r].arity,
                tuple.len()
            )));
        }
        let t: Tuple = tuple.iter().map(|e| self.element(e)).collect();
        self.add_indices(r, t);
        Ok(())
    }

    pub fn add_indices(&mut self, rel: usize, t: Tuple) {
        if self.seen[rel].insert(t.clone()) {
            self.relations[rel].push(t);
        }
    }

    pub fn tuple(mut self, rel: &str, tuple: &[&str]) -> Self {
        self.add(rel, tuple).expect("builder tuple");
        self
    }

    pub fn build(self) -> Structure {
        Structure::new_unchecked(self.signature, self.universe, self.relations)
    }
}

/// A hypergraph on vertices `0..n` with named vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    names: Vec<String>,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Edges are sorted and deduplicated, keeping first-appearance order.
    pub fn new(names: Vec<String>, edges: impl IntoIterator<Item = Vec<usize>>) -> Self {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for mut e in edges {
            e.sort_unstable();
            e.dedup();
            if seen.insert(e.clone()) {
                out.push(e);
            }
        }
        Self { names, edges: out }
    }

    /// Anonymous vertices named `0..n`.
    pub fn with_size(n: usize, edges: impl IntoIterator<Item = Vec<usize>>) -> Self {
        Self::new((0..n).map(|i| i.to_string()).collect(), edges)
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    /// Adjacency lists of the primal (Gaifman) graph, sorted.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let n = self.num_vertices();
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            for (i, &u) in e.iter().enumerate() {
                for &v in &e[i + 1..] {
                    adj[u].push(v);
                    adj[v].push(u);
                }
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        adj
    }

    /// Adjacency bitmasks; only for graphs with at most 64 vertices.
    pub fn adjacency_masks(&self) -> Vec<u64> {
        assert!(self.num_vertices() <= 64);
        self.adjacency()
            .iter()
            .map(|a| a.iter().fold(0u64, |m, &v| m | (1 << v)))
            .collect()
    }

    pub fn is_graph(&self) -> bool {
        self.edges.iter().all(|e| e.len() == 2)
    }

    /// Gaifman graph as a 2-uniform hypergraph.
    pub fn primal_graph(&self) -> Hypergraph {
        let adj = self.adjacency();
        let edges = adj
            .iter()
            .enumerate()
            .flat_map(|(u, a)| a.iter().filter(move |&&v| v > u).map(move |&v| vec![u, v]));
        Hypergraph::new(self.names.clone(), edges)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        if n == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == n
    }
}

/// Hypergraph of `s`: one edge per distinct tuple support.
pub fn hypergraph_of(s: &Structure) -> Hypergraph {
    let edges = s.relations.iter().flatten().cloned();
    Hypergraph::new(s.universe.clone(), edges)
}

pub fn gaifman_graph(s: &Structure) -> Hypergraph {
    hypergraph_of(s).primal_graph()
}

pub fn is_connected(s: &Structure) -> bool {
    hypergraph_of(s).is_connected()
}

/// A simple undirected graph as a structure with one symmetric binary
/// relation `E`.
pub fn graph_structure(g: &Hypergraph) -> Structure {
    let mut tuples = Vec::new();
    for e in g.edges() {
        if let [u, v] = e[..] {
            tuples.push(vec![u, v]);
            tuples.push(vec![v, u]);
        }
    }
    tuples.sort();
    tuples.dedup();
    Structure::new_unchecked(vec![RelSymbol::new("E", 2)], g.names().to_vec(), vec![tuples])
}

/// A partial map from A's universe into B's universe.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(pub Vec<Option<usize>>);

impl Assignment {
    pub fn empty(n: usize) -> Self {
        Self(vec![None; n])
    }

    pub fn total(values: Vec<usize>) -> Self {
        Self(values.into_iter().map(Some).collect())
    }

    pub fn is_total(&self) -> bool {
        self.0.iter().all(Option::is_some)
    }

    pub fn domain(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, v)| v.is_some()).map(|(i, _)| i).collect()
    }

    pub fn get(&self, a: usize) -> Option<usize> {
        self.0.get(a).copied().flatten()
    }

    pub fn set(&mut self, a: usize, b: usize) {
        self.0[a] = Some(b);
    }

    /// Total values; panics on a partial assignment.
    pub fn values(&self) -> Vec<usize> {
        self.0.iter().map(|v| v.expect("total assignment")).collect()
    }

    /// Builds from `(a-name, b-name)` pairs.
    pub fn from_names(a: &Structure, b: &Structure, pairs: &[(&str, &str)]) -> Result<Self> {
        let mut h = Self::empty(a.len());
        for (x, y) in pairs {
            let xi = a.element(x).ok_or_else(|| Error::InvalidArgument(format!("unknown `{x}`")))?;
            let yi = b.element(y).ok_or_else(|| Error::InvalidArgument(format!("unknown `{y}`")))?;
            h.set(xi, yi);
        }
        Ok(h)
    }
}

/// For each relation of `a`, the index of the same-named relation in `b`.
fn match_signatures(a: &Structure, b: &Structure) -> Result<Vec<usize>> {
    a.signature
        .iter()
        .map(|sym| {
            let j = b
                .relation_index(&sym.name)
                .ok_or_else(|| Error::SignatureMismatch(format!("`{}` missing from target", sym.name)))?;
            if b.signature[j].arity != sym.arity {
                return Err(Error::SignatureMismatch(format!(
                    "`{}` has arity {} in source, {} in target",
                    sym.name, sym.arity, b.signature[j].arity
                )));
            }
            Ok(j)
        })
        .collect()
}

pub fn is_homomorphism(h: &Assignment, a: &Structure, b: &Structure) -> Result<bool> {
    if h.0.len() != a.len() {
        return Err(Error::InvalidArgument(format!(
            "assignment has {} entries for a universe of {}",
            h.0.len(),
            a.len()
        )));
    }
    if let Some(i) = h.0.iter().position(Option::is_none) {
        return Err(Error::PartialAssignment(a.universe[i].clone()));
    }
    let map = match_signatures(a, b)?;
    let vals = h.values();
    if vals.iter().any(|&v| v >= b.len()) {
        return Ok(false);
    }
    for (r, ts) in a.relations.iter().enumerate() {
        let target: HashSet<&Tuple> = b.relations[map[r]].iter().collect();
        for t in ts {
            let img: Tuple = t.iter().map(|&e| vals[e]).collect();
            if !target.contains(&img) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Backtracking search state shared by enumeration and counting.
struct HomSearch<'a> {
    a: &'a Structure,
    /// Per relation of `a`: tuple set of the matching relation in `b`.
    sets: Vec<HashSet<&'a Tuple>>,
    /// Per relation of `a`, per position, value → tuples of `b` having it.
    by_pos: Vec<Vec<HashMap<usize, Vec<&'a Tuple>>>>,
    /// For each element of `a`: `(relation, tuple index)` pairs touching it.
    touching: Vec<Vec<(usize, usize)>>,
    nb: usize,
    budget: u64,
    nodes: u64,
}

impl<'a> HomSearch<'a> {
    fn new(a: &'a Structure, b: &'a Structure, budget: u64) -> Result<Self> {
        let map = match_signatures(a, b)?;
        let mut sets = Vec::new();
        let mut by_pos = Vec::new();
        for (r, sym) in a.signature.iter().enumerate() {
            let rel = &b.relations[map[r]];
            sets.push(rel.iter().collect());
            let mut pos = vec![HashMap::<usize, Vec<&Tuple>>::new(); sym.arity];
            for t in rel {
                for (p, &v) in t.iter().enumerate() {
                    pos[p].entry(v).or_default().push(t);
                }
            }
            by_pos.push(pos);
        }
        let mut touching = vec![Vec::new(); a.len()];
        for (r, ts) in a.relations.iter().enumerate() {
            for (i, t) in ts.iter().enumerate() {
                let mut seen = Vec::new();
                for &e in t {
                    if !seen.contains(&e) {
                        seen.push(e);
                        touching[e].push((r, i));
                    }
                }
            }
        }
        Ok(Self { a, sets, by_pos, touching, nb: b.len(), budget, nodes: 0 })
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(format!("homomorphism search exceeded {} nodes", self.budget)));
        }
        Ok(())
    }

    /// Sorted candidate images for element `v` given the current partial map.
    fn candidates(&self, v: usize, h: &[Option<usize>]) -> Vec<usize> {
        let mut cand: Option<Vec<bool>> = None;
        for &(r, i) in &self.touching[v] {
            let t = &self.a.relations[r][i];
            // Narrow via an already-assigned coordinate if there is one.
            let pool: Vec<&Tuple> = match t.iter().position(|&e| h[e].is_some()) {
                Some(p) => self.by_pos[r][p].get(&h[t[p]].unwrap()).cloned().unwrap_or_default(),
                None => self.sets[r].iter().copied().collect(),
            };
            let mut allowed = vec![false; self.nb];
            'tuples: for bt in pool {
                let mut img = None;
                for (p, &e) in t.iter().enumerate() {
                    if e == v {
                        match img {
                            None => img = Some(bt[p]),
                            Some(x) if x != bt[p] => continue 'tuples,
                            _ => {}
                        }
                    } else if let Some(x) = h[e] {
                        if x != bt[p] {
                            continue 'tuples;
                        }
                    }
                }
                allowed[img.unwrap()] = true;
            }
            cand = Some(match cand {
                None => allowed,
                Some(c) => c.iter().zip(&allowed).map(|(x, y)| *x && *y).collect(),
            });
        }
        match cand {
            None => (0..self.nb).collect(),
            Some(c) => c.iter().enumerate().filter(|(_, &ok)| ok).map(|(i, _)| i).collect(),
        }
    }

    /// Full-tuple check for tuples completed by assigning `v`. Partially
    /// assigned tuples were already given support by `candidates`.
    fn consistent(&self, v: usize, h: &[Option<usize>]) -> bool {
        for &(r, i) in &self.touching[v] {
            let t = &self.a.relations[r][i];
            if t.iter().all(|&e| h[e].is_some()) {
                let img: Tuple = t.iter().map(|&e| h[e].unwrap()).collect();
                if !self.sets[r].contains(&img) {
                    return false;
                }
            }
        }
        true
    }

    fn run(&mut self, mut visit: impl FnMut(&[Option<usize>])) -> Result<()> {
        let n = self.a.len();
        let mut h = vec![None; n];
        if n == 0 {
            visit(&h);
            return Ok(());
        }
        self.rec(0, &mut h, &mut visit)
    }

    fn rec(
        &mut self,
        depth: usize,
        h: &mut Vec<Option<usize>>,
        visit: &mut impl FnMut(&[Option<usize>]),
    ) -> Result<()> {
        self.tick()?;
        if depth == h.len() {
            visit(h);
            return Ok(());
        }
        for c in self.candidates(depth, h) {
            h[depth] = Some(c);
            if self.consistent(depth, h) {
                self.rec(depth + 1, h, visit)?;
            }
        }
        h[depth] = None;
        Ok(())
    }
}

pub fn enumerate_homs(a: &Structure, b: &Structure) -> Result<Vec<Assignment>> {
    enumerate_homs_with_budget(a, b, DEFAULT_NODE_BUDGET)
}

/// All homomorphisms in lexicographic order (universe order of `a`, element
/// order of `b`).
pub fn enumerate_homs_with_budget(a: &Structure, b: &Structure, budget: u64) -> Result<Vec<Assignment>> {
    let mut out = Vec::new();
    HomSearch::new(a, b, budget)?.run(|h| out.push(Assignment(h.to_vec())))?;
    Ok(out)
}

pub fn count_homs(a: &Structure, b: &Structure) -> Result<u64> {
    count_homs_with_budget(a, b, DEFAULT_NODE_BUDGET)
}

pub fn count_homs_with_budget(a: &Structure, b: &Structure, budget: u64) -> Result<u64> {
    let mut n = 0u64;
    HomSearch::new(a, b, budget)?.run(|_| n += 1)?;
    Ok(n)
}

/// Drops every tuple of `b` not hit by some homomorphism from `a`.
pub fn reduce_structure(a: &Structure, b: &Structure) -> Result<Structure> {
    let map = match_signatures(a, b)?;
    let mut witnessed: Vec<HashSet<Tuple>> = vec![HashSet::new(); b.signature.len()];
    HomSearch::new(a, b, DEFAULT_NODE_BUDGET)?.run(|h| {
        for (r, ts) in a.relations.iter().enumerate() {
            for t in ts {
                witnessed[map[r]].insert(t.iter().map(|&e| h[e].unwrap()).collect());
            }
        }
    })?;
    Ok(b.filter_tuples(|r, t| witnessed[r].contains(t)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle_query() -> Structure {
        StructureBuilder::new()
            .relation("E", 2)
            .tuple("E", &["x", "y"])
            .tuple("E", &["x", "z"])
            .tuple("E", &["y", "z"])
            .build()
    }

    fn triangle_target() -> Structure {
        let mut b = StructureBuilder::new().relation("E", 2);
        for a in ["a1", "a2"] {
            for t in ["b1", "b2", "d1", "d2", "c"] {
                b.add("E", &[a, t]).unwrap();
            }
        }
        for s in ["b1", "b2"] {
            b.add("E", &[s, "c"]).unwrap();
        }
        for t in ["d1", "d2"] {
            b.add("E", &["c", t]).unwrap();
        }
        b.build()
    }

    /// Independent oracle: try every total map.
    fn brute_force(a: &Structure, b: &Structure) -> Vec<Assignment> {
        let n = a.len();
        let m = b.len();
        let mut out = Vec::new();
        let total = (m as u64).pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let mut vals = vec![0; n];
            for v in vals.iter_mut().rev() {
                *v = (c % m as u64) as usize;
                c /= m as u64;
            }
            let h = Assignment::total(vals);
            if is_homomorphism(&h, a, b).unwrap() {
                out.push(h);
            }
        }
        out
    }

    #[test]
    fn triangle_has_eight_homs_matching_brute_force() {
        let a = triangle_query();
        let b = triangle_target();
        let homs = enumerate_homs(&a, &b).unwrap();
        assert_eq!(homs.len(), 8);
        assert_eq!(homs, brute_force(&a, &b));
        assert_eq!(count_homs(&a, &b).unwrap(), 8);
    }

    #[test]
    fn triangle_membership() {
        let a = triangle_query();
        let b = triangle_target();
        let yes = Assignment::from_names(&a, &b, &[("x", "a1"), ("y", "b1"), ("z", "c")]).unwrap();
        let no = Assignment::from_names(&a, &b, &[("x", "a1"), ("y", "b1"), ("z", "d1")]).unwrap();
        assert!(is_homomorphism(&yes, &a, &b).unwrap());
        assert!(!is_homomorphism(&no, &a, &b).unwrap());
        let partial = Assignment::from_names(&a, &b, &[("x", "a1")]).unwrap();
        assert!(matches!(is_homomorphism(&partial, &a, &b), Err(Error::PartialAssignment(_))));
    }

    #[test]
    fn identity_is_a_homomorphism() {
        let a = triangle_query();
        let id = Assignment::total((0..a.len()).collect());
        assert!(is_homomorphism(&id, &a, &a).unwrap());
    }

    #[test]
    fn empty_target_relation_gives_no_homs() {
        let a = triangle_query();
        let b = StructureBuilder::new().relation("E", 2).elements(["p", "q"]).build();
        assert!(enumerate_homs(&a, &b).unwrap().is_empty());
        assert_eq!(count_homs(&a, &b).unwrap(), 0);
    }

    #[test]
    fn missing_relation_is_a_signature_mismatch() {
        let a = triangle_query();
        let b = StructureBuilder::new().relation("F", 2).build();
        assert!(matches!(count_homs(&a, &b), Err(Error::SignatureMismatch(_))));
    }

    #[test]
    fn hypergraph_and_gaifman() {
        let a = StructureBuilder::new()
            .relation("R", 3)
            .relation("E", 2)
            .tuple("R", &["x", "y", "z"])
            .tuple("E", &["x", "w"])
            .tuple("E", &["w", "y"])
            .build();
        let h = hypergraph_of(&a);
        let (x, y, z, w) = (0, 1, 2, 3);
        assert_eq!(h.edges(), &[vec![x, y, z], vec![x, w], vec![y, w]]);
        let g = gaifman_graph(&a);
        let mut edges = g.edges().to_vec();
        edges.sort();
        assert_eq!(edges, vec![vec![x, y], vec![x, z], vec![x, w], vec![y, z], vec![y, w]]);
        assert!(is_connected(&a));
    }

    #[test]
    fn equal_supports_collapse() {
        let a = StructureBuilder::new()
            .relation("E", 2)
            .relation("P", 1)
            .tuple("E", &["u", "v"])
            .tuple("E", &["v", "u"])
            .tuple("P", &["u"])
            .build();
        let h = hypergraph_of(&a);
        assert_eq!(h.edges(), &[vec![0, 1], vec![0]]);
        assert!(gaifman_graph(&a).edges().len() == 1);
    }

    #[test]
    fn disconnected_and_singleton() {
        let a = StructureBuilder::new()
            .relation("P", 1)
            .relation("Q", 1)
            .tuple("P", &["u"])
            .tuple("Q", &["v"])
            .build();
        assert!(!is_connected(&a));
        let one = StructureBuilder::new().relation("P", 1).tuple("P", &["u"]).build();
        assert!(is_connected(&one));
        assert!(gaifman_graph(&one).edges().is_empty());
    }

    #[test]
    fn validation_flags_problems() {
        let raw: StructureFile = serde_json::from_str(
            r#"{"signature":[{"name":"E","arity":2}],"universe":["a","b"],
                "relations":{"E":[["a","b"],["a","q"],["a"],["a","b"]]}}"#,
        )
        .unwrap();
        let rep = validate_structure(&raw);
        assert_eq!(rep.violations.len(), 3);
        assert!(rep.violations.iter().any(|v| matches!(v, StructureViolation::DanglingElement { .. })));
        assert!(rep.violations.iter().any(|v| matches!(v, StructureViolation::ArityMismatch { .. })));
        assert!(rep.violations.iter().any(|v| matches!(v, StructureViolation::DuplicateTuple { .. })));
        assert!(Structure::from_file(&raw).is_err());
    }

    #[test]
    fn json_round_trip() {
        let b = triangle_target();
        let text = b.to_json();
        let back = Structure::from_json(&text).unwrap();
        assert_eq!(back, b);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn reduce_removes_unreachable_tuple() {
        let a = triangle_query();
        let mut bb = StructureBuilder::new().relation("E", 2);
        for t in triangle_target().relation(0) {
            let names = triangle_target().names_of(t);
            bb.add("E", &[&names[0], &names[1]]).unwrap();
        }
        bb.add("E", &["e", "a1"]).unwrap();
        let b = bb.build();
        assert_eq!(b.size(), 15);
        let r = reduce_structure(&a, &b).unwrap();
        assert_eq!(r.size(), 14);
        assert_eq!(count_homs(&a, &r).unwrap(), 8);
        let rr = reduce_structure(&a, &r).unwrap();
        assert_eq!(rr, r);
    }

    #[test]
    fn budget_is_enforced() {
        let a = triangle_query();
        let b = triangle_target();
        assert!(matches!(count_homs_with_budget(&a, &b, 3), Err(Error::BudgetExceeded(_))));
    }
}
